//! Immutable symbolic expression trees.
//!
//! Expressions are kept in a canonical normal form: sums and products are
//! flattened and sorted under a fixed total node order, like terms carry
//! exact rational coefficients, and powers of a common base are merged.
//! Structural equality of normalized trees is therefore canonical-form
//! equality, which is what every golden-table comparison in this crate
//! relies on.

mod diff;
mod eval;
mod normal;
mod parse;
mod render;
mod subst;
mod zero;

pub use diff::differentiate;
pub use eval::{evaluate, Bindings, EvalError};
pub use normal::{add, func, mul, normalize, normalize_in, pow, Domain};
pub use parse::{parse, ParseError};
pub use render::render;
pub use subst::{substitute, substitute_unknown};
pub use zero::{is_zero, SampleBox, ZeroConfig, ZeroStatus, ZeroVerdict, DEFAULT_SEED};

use crate::sym::{Func, Sym};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn qint(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qrat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// An unknown-function application such as `f(z,w)` together with a
/// derivative multi-index over its argument slots: `deriv[k]` is the number
/// of differentiations with respect to slot `k`, so `f_zw` carries `[1,1]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnknownFn {
    pub name: Sym,
    pub args: Vec<Expr>,
    pub deriv: Vec<u32>,
}

impl UnknownFn {
    pub fn new(name: Sym, args: Vec<Expr>, deriv: Vec<u32>) -> Self {
        assert_eq!(args.len(), deriv.len(), "multi-index length != argument count");
        UnknownFn { name, args, deriv }
    }

    /// Application at the default argument list with a zero multi-index.
    pub fn base(name: Sym) -> Self {
        let sig = name
            .unknown_signature()
            .unwrap_or_else(|| panic!("{name} is not an unknown function"));
        UnknownFn {
            name,
            args: sig.iter().map(|s| Expr::var(*s)).collect(),
            deriv: vec![0; sig.len()],
        }
    }

    pub fn total_order(&self) -> u32 {
        self.deriv.iter().sum()
    }

    /// True when the arguments are exactly the default chart variables.
    pub fn has_default_args(&self) -> bool {
        match self.name.unknown_signature() {
            Some(sig) => {
                sig.len() == self.args.len()
                    && sig.iter().zip(&self.args).all(|(s, a)| *a == Expr::var(*s))
            }
            None => false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    /// Exact rational constant, stored reduced. Integers are rationals with
    /// denominator one.
    Num(Q),
    /// Named constant (`c1`, `a`, …): zero derivative along every variable.
    Const(Sym),
    Var(Sym),
    Func(Func, Box<Expr>),
    Unknown(UnknownFn),
    Pow(Box<Expr>, Box<Expr>),
    /// Flattened, sorted product. Never nested, never fewer than two factors.
    Prod(Vec<Expr>),
    /// Flattened, sorted sum. Never nested, never fewer than two terms.
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(qint(n))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::Num(qrat(n, d))
    }

    pub fn num(q: Q) -> Expr {
        Expr::Num(q)
    }

    pub fn var(s: Sym) -> Expr {
        Expr::Var(s)
    }

    pub fn constant(s: Sym) -> Expr {
        Expr::Const(s)
    }

    pub fn exp(arg: Expr) -> Expr {
        func(Func::Exp, arg)
    }

    pub fn ln(arg: Expr) -> Expr {
        func(Func::Ln, arg)
    }

    pub fn tanh(arg: Expr) -> Expr {
        func(Func::Tanh, arg)
    }

    pub fn zero() -> Expr {
        Expr::Num(Q::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Q::one())
    }

    pub fn is_zero_lit(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    pub fn is_one_lit(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_one())
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    /// Integer power with exact folding for numeric bases.
    pub fn powi(self, n: i64) -> Expr {
        pow(self, Expr::int(n))
    }

    pub fn powe(self, e: Expr) -> Expr {
        pow(self, e)
    }

    pub fn recip(self) -> Expr {
        pow(self, Expr::int(-1))
    }

    /// Collects the free variable symbols (named constants excluded).
    /// Variables inside unknown-function arguments count as free.
    pub fn free_vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Var(s) = e {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
        });
        out.sort();
        out
    }

    pub fn free_constants(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Const(s) = e {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
        });
        out.sort();
        out
    }

    pub fn contains_var(&self, v: Sym) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, Expr::Var(s) if *s == v) {
                found = true;
            }
        });
        found
    }

    pub fn contains_unknown(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, Expr::Unknown(_)) {
                found = true;
            }
        });
        found
    }

    /// True when the expression involves no chart variables and no unknown
    /// functions, i.e. it is built from numbers and named constants only.
    pub fn is_constant_only(&self) -> bool {
        let mut ok = true;
        self.walk(&mut |e| {
            if matches!(e, Expr::Var(_) | Expr::Unknown(_)) {
                ok = false;
            }
        });
        ok
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => {}
            Expr::Func(_, a) => a.walk(f),
            Expr::Unknown(u) => {
                for a in &u.args {
                    a.walk(f);
                }
            }
            Expr::Pow(b, e) => {
                b.walk(f);
                e.walk(f);
            }
            Expr::Prod(xs) | Expr::Sum(xs) => {
                for x in xs {
                    x.walk(f);
                }
            }
        }
    }

    /// The terms of a sum, or the expression itself as a single term.
    pub fn terms(&self) -> &[Expr] {
        match self {
            Expr::Sum(ts) => ts,
            _ => std::slice::from_ref(self),
        }
    }

    /// The factors of a product, or the expression itself as a single factor.
    pub fn factors(&self) -> &[Expr] {
        match self {
            Expr::Prod(fs) => fs,
            _ => std::slice::from_ref(self),
        }
    }

    /// Splits a canonical term into (rational coefficient, monomial part).
    /// The monomial part of a pure number is `1`.
    pub fn split_coeff(&self) -> (Q, Expr) {
        match self {
            Expr::Num(q) => (q.clone(), Expr::one()),
            Expr::Prod(fs) => {
                if let Expr::Num(q) = &fs[0] {
                    let rest = fs[1..].to_vec();
                    let mono = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::Prod(rest)
                    };
                    (q.clone(), mono)
                } else {
                    (Q::one(), self.clone())
                }
            }
            _ => (Q::one(), self.clone()),
        }
    }

    /// Splits a canonical factor into (base, exponent).
    pub fn split_power(&self) -> (&Expr, Expr) {
        match self {
            Expr::Pow(b, e) => (b, (**e).clone()),
            _ => (self, Expr::one()),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Expr::Num(_) => 0,
            Expr::Const(_) => 1,
            Expr::Var(_) => 2,
            Expr::Func(..) => 3,
            Expr::Unknown(_) => 4,
            Expr::Pow(..) => 5,
            Expr::Prod(_) => 6,
            Expr::Sum(_) => 7,
        }
    }
}

/// Total node order used for canonical sorting. Any deterministic total
/// order works; this one keeps numbers first so a product's rational
/// coefficient always leads.
impl Ord for Expr {
    fn cmp(&self, other: &Expr) -> Ordering {
        use Expr::*;
        self.kind_rank().cmp(&other.kind_rank()).then_with(|| match (self, other) {
            (Num(a), Num(b)) => a.cmp(b),
            (Const(a), Const(b)) | (Var(a), Var(b)) => a.cmp(b),
            (Func(fa, aa), Func(fb, ab)) => fa.cmp(fb).then_with(|| aa.cmp(ab)),
            (Unknown(a), Unknown(b)) => a
                .name
                .cmp(&b.name)
                .then_with(|| a.deriv.cmp(&b.deriv))
                .then_with(|| a.args.cmp(&b.args)),
            (Pow(ba, ea), Pow(bb, eb)) => ba.cmp(bb).then_with(|| ea.cmp(eb)),
            (Prod(a), Prod(b)) | (Sum(a), Sum(b)) => a.cmp(b),
            _ => unreachable!("kind ranks already distinguished"),
        })
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Expr) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(self))
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        add(vec![self, -rhs])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        mul(vec![self, rhs.recip()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        mul(vec![Expr::int(-1), self])
    }
}

/// Rational sign helper: -1, 0, +1.
pub fn qsign(q: &Q) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
