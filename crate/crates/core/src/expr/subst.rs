//! Simultaneous substitution. The language has no binders, so substitution
//! is plain node replacement followed by renormalization.

use super::{differentiate, normalize_in, Domain, Expr, UnknownFn};
use crate::sym::Sym;
use std::collections::BTreeMap;

/// Replaces every `Var(k)` or `Const(k)` for keys in the map, simultaneously,
/// inside unknown-function arguments included, then normalizes.
pub fn substitute(e: &Expr, map: &BTreeMap<Sym, Expr>, dom: Domain) -> Expr {
    let raw = subst_raw(e, map);
    normalize_in(&raw, dom)
}

fn subst_raw(e: &Expr, map: &BTreeMap<Sym, Expr>) -> Expr {
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Const(s) | Expr::Var(s) => match map.get(s) {
            Some(r) => r.clone(),
            None => e.clone(),
        },
        Expr::Func(f, a) => Expr::Func(*f, Box::new(subst_raw(a, map))),
        Expr::Unknown(u) => Expr::Unknown(UnknownFn {
            name: u.name,
            args: u.args.iter().map(|a| subst_raw(a, map)).collect(),
            deriv: u.deriv.clone(),
        }),
        Expr::Pow(b, x) => Expr::Pow(Box::new(subst_raw(b, map)), Box::new(subst_raw(x, map))),
        Expr::Prod(fs) => Expr::Prod(fs.iter().map(|f| subst_raw(f, map)).collect()),
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| subst_raw(t, map)).collect()),
    }
}

/// Instantiates an unknown function with a concrete body.
///
/// `body` is an expression in the parameter variables `params`. Every node
/// `name_{multi-index}(args…)` becomes the multi-index derivative of `body`
/// with respect to `params`, with `params ↦ args` substituted afterwards;
/// a bare `Var(name)` stands for the function at its default arguments and
/// becomes `body` itself.
pub fn substitute_unknown(
    e: &Expr,
    name: Sym,
    params: &[Sym],
    body: &Expr,
    dom: Domain,
) -> Expr {
    let raw = subst_unknown_raw(e, name, params, body, dom);
    normalize_in(&raw, dom)
}

fn subst_unknown_raw(e: &Expr, name: Sym, params: &[Sym], body: &Expr, dom: Domain) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) => e.clone(),
        Expr::Var(s) => {
            if *s == name {
                body.clone()
            } else {
                e.clone()
            }
        }
        Expr::Func(f, a) => Expr::Func(*f, Box::new(subst_unknown_raw(a, name, params, body, dom))),
        Expr::Unknown(u) if u.name == name => {
            assert_eq!(
                u.args.len(),
                params.len(),
                "unknown-function arity mismatch for {name}"
            );
            let mut d = body.clone();
            for (slot, count) in u.deriv.iter().enumerate() {
                for _ in 0..*count {
                    d = differentiate(&d, params[slot]);
                }
            }
            let map: BTreeMap<Sym, Expr> = params
                .iter()
                .copied()
                .zip(
                    u.args
                        .iter()
                        .map(|a| subst_unknown_raw(a, name, params, body, dom)),
                )
                .collect();
            substitute(&d, &map, dom)
        }
        Expr::Unknown(u) => Expr::Unknown(UnknownFn {
            name: u.name,
            args: u
                .args
                .iter()
                .map(|a| subst_unknown_raw(a, name, params, body, dom))
                .collect(),
            deriv: u.deriv.clone(),
        }),
        Expr::Pow(b, x) => Expr::Pow(
            Box::new(subst_unknown_raw(b, name, params, body, dom)),
            Box::new(subst_unknown_raw(x, name, params, body, dom)),
        ),
        Expr::Prod(fs) => Expr::Prod(
            fs.iter()
                .map(|f| subst_unknown_raw(f, name, params, body, dom))
                .collect(),
        ),
        Expr::Sum(ts) => Expr::Sum(
            ts.iter()
                .map(|t| subst_unknown_raw(t, name, params, body, dom))
                .collect(),
        ),
    }
}
