//! Rewrites a substituted residual from the old chart variables into the
//! invariant variables, splitting it as prefactor × equation.
//!
//! Each monomial factors as (rational) × (constants) × (old-variable part)
//! × (unknown-function part). Taking formal logarithms turns the
//! old-variable parts into vectors over a monomial basis of log-atoms; a
//! term rewrites exactly when its log-vector differs from the anchor
//! term's by a rational combination of the invariants' log-vectors. The
//! anchor is the term whose unknown part is dep²·(∂ over the last slot) —
//! the image of u²u_t — when present, otherwise the first term; its
//! variable part becomes the prefactor.

use super::ReduceError;
use crate::expr::{add, mul, normalize_in, pow, qsign, Domain, Expr, Q, UnknownFn};
use crate::sym::{Func, Sym};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// The invariants defining the target chart: (new variable, expression in
/// the old variables). The new variables must be the unknown function's
/// default signature, in order.
pub struct ChartTarget {
    pub unknown: Sym,
    pub invariants: Vec<(Sym, Expr)>,
}

pub struct Factored {
    pub prefactor: Expr,
    pub equation: Expr,
}

struct TermParts {
    coeff: Q,
    consts: Vec<Expr>,
    var_part: Vec<Expr>,
    unk_part: Vec<Expr>,
}

/// Formal logarithm of a product of factors, normalized under the positive
/// domain so products split and exponents come down.
fn log_of_factors(factors: &[Expr]) -> Expr {
    let terms: Vec<Expr> = factors
        .iter()
        .map(|f| {
            let (base, exp) = f.split_power();
            exp * normalize_in(&Expr::Func(Func::Ln, Box::new(base.clone())), Domain::positive())
        })
        .collect();
    normalize_in(&add(terms), Domain::positive())
}

/// Decomposes a normalized expression into per-term vectors over the
/// monomial basis of its sum terms.
fn coeff_vector(e: &Expr, basis: &mut Vec<Expr>) -> Vec<(usize, Q)> {
    let mut out = Vec::new();
    if e.is_zero_lit() {
        return out;
    }
    for t in e.terms() {
        let (q, key) = t.split_coeff();
        let idx = match basis.iter().position(|b| *b == key) {
            Some(i) => i,
            None => {
                basis.push(key);
                basis.len() - 1
            }
        };
        out.push((idx, q));
    }
    out
}

fn to_dense(sparse: &[(usize, Q)], len: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); len];
    for (i, q) in sparse {
        v[*i] = q.clone();
    }
    v
}

/// Rational-vector content of a list: gcd of numerators over lcm of
/// denominators, with the given sign.
fn rational_content(qs: &[Q]) -> Q {
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::one();
    for q in qs {
        num = num.gcd(q.numer());
        den = den.lcm(q.denom());
    }
    if num.is_zero() {
        return Q::one();
    }
    Q::new(num, den)
}

pub fn rewrite_to_chart(residual: &Expr, target: &ChartTarget) -> Result<Factored, ReduceError> {
    let dom = Domain::positive();
    let e = normalize_in(residual, dom);
    if e.is_zero_lit() {
        return Ok(Factored {
            prefactor: Expr::one(),
            equation: Expr::zero(),
        });
    }
    let unk = target.unknown;
    let sig: Vec<Sym> = unk.unknown_signature().expect("unknown function").to_vec();
    assert_eq!(
        sig,
        target.invariants.iter().map(|(v, _)| *v).collect::<Vec<_>>(),
        "target variables must match the unknown function's signature"
    );
    let inv_args: Vec<Expr> = target.invariants.iter().map(|(_, e)| e.clone()).collect();

    // Split every term.
    let mut parts: Vec<TermParts> = Vec::new();
    for t in e.terms() {
        let (coeff, key) = t.split_coeff();
        let mut consts = Vec::new();
        let mut var_part = Vec::new();
        let mut unk_part = Vec::new();
        for f in key.factors() {
            let (base, _) = f.split_power();
            match base {
                Expr::Unknown(u) if u.name == unk => {
                    if u.args != inv_args {
                        return Err(ReduceError::NotFactorable {
                            term: t.clone(),
                            detail: format!(
                                "unknown-function arguments differ from the chart invariants: {base}"
                            ),
                        });
                    }
                    unk_part.push(f.clone());
                }
                Expr::Unknown(u) => {
                    return Err(ReduceError::NotFactorable {
                        term: t.clone(),
                        detail: format!("foreign unknown function {}", u.name),
                    })
                }
                _ if base.is_constant_only() => consts.push(f.clone()),
                _ => var_part.push(f.clone()),
            }
        }
        parts.push(TermParts {
            coeff,
            consts,
            var_part,
            unk_part,
        });
    }

    // Anchor: unknown part equal to dep^2 · ∂_last(dep), else first term.
    let anchor_pattern = {
        let zero_idx = vec![0u32; sig.len()];
        let mut first = vec![0u32; sig.len()];
        *first.last_mut().unwrap() = 1;
        let d0 = Expr::Unknown(UnknownFn::new(unk, inv_args.clone(), zero_idx));
        let d1 = Expr::Unknown(UnknownFn::new(unk, inv_args.clone(), first));
        mul(vec![d0.powi(2), d1])
    };
    let anchor = parts
        .iter()
        .position(|p| mul(p.unk_part.clone()) == anchor_pattern)
        .unwrap_or(0);

    // Log-vectors relative to the anchor, expressed over the invariants.
    let mut basis: Vec<Expr> = Vec::new();
    let zeta_sparse: Vec<Vec<(usize, Q)>> = target
        .invariants
        .iter()
        .map(|(_, inv)| {
            let l = normalize_in(
                &Expr::Func(Func::Ln, Box::new(inv.clone())),
                Domain::positive(),
            );
            coeff_vector(&l, &mut basis)
        })
        .collect();
    let log_anchor = log_of_factors(&parts[anchor].var_part);
    let mut term_logs: Vec<Expr> = Vec::new();
    for p in &parts {
        term_logs.push(log_of_factors(&p.var_part));
    }
    let mut rel_sparse: Vec<Vec<(usize, Q)>> = Vec::new();
    for l in &term_logs {
        let rel = normalize_in(&(l.clone() - log_anchor.clone()), dom);
        rel_sparse.push(coeff_vector(&rel, &mut basis));
    }
    let n = basis.len();
    let zetas: Vec<Vec<Q>> = zeta_sparse.iter().map(|s| to_dense(s, n)).collect();

    let mut alphas: Vec<Vec<Q>> = Vec::new();
    for (k, rel) in rel_sparse.iter().enumerate() {
        let t = to_dense(rel, n);
        match crate::algebra::solve_span(&zetas, &t) {
            Some(a) => alphas.push(a),
            None => {
                return Err(ReduceError::NotFactorable {
                    term: e.terms()[k].clone(),
                    detail: "variable content is not a rational power product of the invariants"
                        .into(),
                })
            }
        }
    }

    // Content over the new variables: shift minimal powers into the prefactor.
    let nvars = target.invariants.len();
    let mut var_shift: Vec<Q> = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let min = alphas.iter().map(|a| a[i].clone()).min().unwrap();
        var_shift.push(min);
    }

    // Content over each named constant (rational exponents only).
    let mut const_vals: BTreeMap<Sym, Q> = BTreeMap::new();
    let mut first = true;
    for p in &parts {
        let mut vals: BTreeMap<Sym, Q> = BTreeMap::new();
        for f in &p.consts {
            let (base, exp) = f.split_power();
            if let (Expr::Const(s), Some(q)) = (base, exp.as_num()) {
                *vals.entry(*s).or_insert_with(Q::zero) += q.clone();
            }
        }
        if first {
            const_vals = vals;
            first = false;
        } else {
            // Pointwise minimum; a constant missing from a term has power 0.
            let keys: Vec<Sym> = const_vals.keys().copied().collect();
            for k in keys {
                let n = vals.get(&k).cloned().unwrap_or_else(Q::zero);
                let cur = const_vals.get_mut(&k).unwrap();
                if n < *cur {
                    *cur = n;
                }
            }
            for (k, v) in vals {
                const_vals
                    .entry(k)
                    .or_insert_with(|| if v.is_positive() { Q::zero() } else { v });
            }
        }
    }
    const_vals.retain(|_, v| !v.is_zero());

    // Numeric content with the anchor's sign.
    let mut content = rational_content(&parts.iter().map(|p| p.coeff.clone()).collect::<Vec<_>>());
    if qsign(&parts[anchor].coeff) < 0 {
        content = -content;
    }

    // Assemble the equation.
    let mut eq_terms: Vec<Expr> = Vec::new();
    for (p, a) in parts.iter().zip(&alphas) {
        let mut fs: Vec<Expr> = Vec::new();
        fs.push(Expr::num(&p.coeff / &content));
        for f in &p.consts {
            fs.push(f.clone());
        }
        for (sym, v) in &const_vals {
            fs.push(pow(Expr::constant(*sym), Expr::num(-v.clone())));
        }
        for (i, (v, _)) in target.invariants.iter().enumerate() {
            let ex = &a[i] - &var_shift[i];
            if !ex.is_zero() {
                fs.push(pow(Expr::var(*v), Expr::num(ex)));
            }
        }
        for f in &p.unk_part {
            fs.push(abstract_unknown(f, &sig));
        }
        eq_terms.push(mul(fs));
    }
    let equation = add(eq_terms);

    // Prefactor: the anchor's variable part shifted by the extracted
    // invariant powers, times the numeric and constant content.
    let mut pref_log = log_anchor;
    for (i, (_, inv)) in target.invariants.iter().enumerate() {
        if !var_shift[i].is_zero() {
            let l = normalize_in(&Expr::Func(Func::Ln, Box::new(inv.clone())), dom);
            pref_log = normalize_in(&(pref_log + Expr::num(var_shift[i].clone()) * l), dom);
        }
    }
    let mut pref_factors = vec![
        Expr::num(content),
        normalize_in(&Expr::exp(pref_log), dom),
    ];
    for (sym, v) in &const_vals {
        pref_factors.push(pow(Expr::constant(*sym), Expr::num(v.clone())));
    }
    let prefactor = normalize_in(&mul(pref_factors), dom);

    Ok(Factored { prefactor, equation })
}

/// Replaces concrete invariant arguments by the chart variables; a
/// zero-index application becomes the bare symbol.
fn abstract_unknown(factor: &Expr, sig: &[Sym]) -> Expr {
    let (base, exp) = factor.split_power();
    let Expr::Unknown(u) = base else {
        unreachable!("unknown factor expected")
    };
    let node = if u.total_order() == 0 {
        Expr::var(u.name)
    } else {
        Expr::Unknown(UnknownFn::new(
            u.name,
            sig.iter().map(|s| Expr::var(*s)).collect(),
            u.deriv.clone(),
        ))
    };
    pow(node, exp)
}
