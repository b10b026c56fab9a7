//! Exact differentiation, with the chain rule threaded through
//! unknown-function nodes: d/dx f(z(x,…), w(x,…)) = f_z·z_x + f_w·w_x,
//! where f_z, f_w are the same node with an incremented multi-index.

use super::{add, mul, pow, Expr, UnknownFn};
use crate::sym::{Func, Sym};

pub fn differentiate(e: &Expr, v: Sym) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) => Expr::zero(),
        Expr::Var(s) => {
            if *s == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(ts) => add(ts.iter().map(|t| differentiate(t, v)).collect()),
        Expr::Prod(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                let df = differentiate(f, v);
                if df.is_zero_lit() {
                    continue;
                }
                let mut rest: Vec<Expr> = Vec::with_capacity(fs.len());
                rest.push(df);
                for (j, g) in fs.iter().enumerate() {
                    if j != i {
                        rest.push(g.clone());
                    }
                }
                terms.push(mul(rest));
            }
            add(terms)
        }
        Expr::Pow(b, x) => {
            let db = differentiate(b, v);
            let dx = differentiate(x, v);
            let mut terms = Vec::new();
            if !db.is_zero_lit() {
                // e·b^(e-1)·b'
                let em1 = (**x).clone() - Expr::one();
                terms.push(mul(vec![(**x).clone(), pow((**b).clone(), em1), db]));
            }
            if !dx.is_zero_lit() {
                // b^e·ln(b)·e'
                terms.push(mul(vec![e.clone(), Expr::ln((**b).clone()), dx]));
            }
            add(terms)
        }
        Expr::Func(f, a) => {
            let da = differentiate(a, v);
            if da.is_zero_lit() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => pow((**a).clone(), Expr::int(-1)),
                Func::Tanh => Expr::one() - Expr::tanh((**a).clone()).powi(2),
            };
            outer * da
        }
        Expr::Unknown(u) => {
            let mut terms = Vec::new();
            for (slot, arg) in u.args.iter().enumerate() {
                let darg = differentiate(arg, v);
                if darg.is_zero_lit() {
                    continue;
                }
                let mut deriv = u.deriv.clone();
                deriv[slot] += 1;
                let node = Expr::Unknown(UnknownFn::new(u.name, u.args.clone(), deriv));
                terms.push(node * darg);
            }
            add(terms)
        }
    }
}
