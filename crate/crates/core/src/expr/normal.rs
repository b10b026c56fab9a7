//! Canonical-form constructors.
//!
//! Every expression the crate hands out is built through `add`, `mul`,
//! `pow` and `func`, which maintain the normal form: a sum of monomials
//! over a fixed total node order, with exact rational coefficients,
//! merged powers of a common base, and a single merged `exp` factor per
//! monomial. Products distribute over sums, so the normal form is fully
//! expanded and structural equality decides expression equality.

use super::{Expr, Q};
use crate::sym::Func;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Sum powers `(x+…)^k` are expanded for positive integer k up to here.
const EXPAND_POW_LIMIT: i64 = 8;

/// Domain assumptions steering the rewrite rules.
///
/// With `positive` set, every variable and ln argument is assumed positive,
/// which licenses `e^(ln a) = a`, `ln(a·b) = ln a + ln b`, `ln(a^b) = b·ln a`
/// and distribution of non-integer powers over products. Off by default.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct Domain {
    pub positive: bool,
}

impl Domain {
    pub fn positive() -> Domain {
        Domain { positive: true }
    }
}

pub fn add(terms: Vec<Expr>) -> Expr {
    add_in(terms, Domain::default())
}

pub fn mul(factors: Vec<Expr>) -> Expr {
    mul_in(factors, Domain::default())
}

pub fn pow(base: Expr, exp: Expr) -> Expr {
    pow_in(base, exp, Domain::default())
}

pub fn func(f: Func, arg: Expr) -> Expr {
    func_in(f, arg, Domain::default())
}

/// Re-canonicalizes an arbitrary tree bottom-up. Total on any input.
pub fn normalize(e: &Expr) -> Expr {
    normalize_in(e, Domain::default())
}

pub fn normalize_in(e: &Expr, dom: Domain) -> Expr {
    match e {
        Expr::Num(q) => Expr::Num(q.clone()),
        Expr::Const(s) => Expr::Const(*s),
        Expr::Var(s) => Expr::Var(*s),
        Expr::Func(f, a) => func_in(*f, normalize_in(a, dom), dom),
        Expr::Unknown(u) => Expr::Unknown(super::UnknownFn {
            name: u.name,
            args: u.args.iter().map(|a| normalize_in(a, dom)).collect(),
            deriv: u.deriv.clone(),
        }),
        Expr::Pow(b, x) => pow_in(normalize_in(b, dom), normalize_in(x, dom), dom),
        Expr::Prod(fs) => mul_in(fs.iter().map(|f| normalize_in(f, dom)).collect(), dom),
        Expr::Sum(ts) => add_in(ts.iter().map(|t| normalize_in(t, dom)).collect(), dom),
    }
}

/// n-ary sum of canonical inputs: flattens, collects like monomials with
/// exact rational coefficients, drops zeros, sorts by monomial key.
pub fn add_in(terms: Vec<Expr>, _dom: Domain) -> Expr {
    let mut by_key: BTreeMap<Expr, Q> = BTreeMap::new();
    let mut stack = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        if let Expr::Sum(ts) = t {
            for x in ts.into_iter().rev() {
                stack.push(x);
            }
            continue;
        }
        let (q, key) = t.split_coeff();
        let entry = by_key.entry(key).or_insert_with(Q::zero);
        *entry += q;
    }
    let mut out: Vec<Expr> = Vec::with_capacity(by_key.len());
    for (key, q) in by_key {
        if q.is_zero() {
            continue;
        }
        out.push(attach_coeff(q, key));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::Sum(out),
    }
}

/// Reattaches a rational coefficient to a monomial key.
pub(crate) fn attach_coeff(q: Q, key: Expr) -> Expr {
    if key.is_one_lit() {
        return Expr::Num(q);
    }
    if q.is_one() {
        return key;
    }
    let mut fs = Vec::with_capacity(1 + key.factors().len());
    fs.push(Expr::Num(q));
    fs.extend(key.factors().iter().cloned());
    Expr::Prod(fs)
}

/// n-ary product of canonical inputs.
pub fn mul_in(factors: Vec<Expr>, dom: Domain) -> Expr {
    // Flatten and split off sum factors for distribution.
    let mut flat: Vec<Expr> = Vec::new();
    let mut sums: Vec<Vec<Expr>> = Vec::new();
    let mut stack = factors;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match f {
            Expr::Prod(fs) => {
                for x in fs.into_iter().rev() {
                    stack.push(x);
                }
            }
            Expr::Sum(ts) => sums.push(ts),
            other => {
                if other.is_zero_lit() {
                    return Expr::zero();
                }
                flat.push(other);
            }
        }
    }

    if !sums.is_empty() {
        // Distribute: expand the product over every sum factor.
        let base = mul_in(flat, dom);
        let mut expanded = vec![base];
        for sum in sums {
            let mut next = Vec::with_capacity(expanded.len() * sum.len());
            for t in &expanded {
                for s in &sum {
                    next.push(mul_in(vec![t.clone(), s.clone()], dom));
                }
            }
            expanded = next;
        }
        return add_in(expanded, dom);
    }

    // Merge: rational coefficient, one exp factor, powers by base.
    let mut coeff = Q::one();
    let mut exp_terms: Vec<Expr> = Vec::new();
    let mut by_base: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for f in flat {
        match f {
            Expr::Num(q) => coeff *= q,
            Expr::Func(Func::Exp, a) => exp_terms.push(*a),
            Expr::Pow(b, e) => match *b {
                Expr::Func(Func::Exp, a) => exp_terms.push(mul_in(vec![*e, *a], dom)),
                base => by_base.entry(base).or_default().push(*e),
            },
            other => by_base.entry(other).or_default().push(Expr::one()),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }

    let mut rebuilt: Vec<Expr> = Vec::new();
    let mut needs_repass = false;
    for (base, exps) in by_base {
        let e = add_in(exps, dom);
        if e.is_zero_lit() {
            continue; // base^0 = 1 (bases assumed nonzero)
        }
        let f = if e.is_one_lit() { base } else { pow_in(base, e, dom) };
        match &f {
            Expr::Num(_) | Expr::Prod(_) | Expr::Sum(_) | Expr::Func(Func::Exp, _) => {
                needs_repass = true
            }
            _ => {}
        }
        rebuilt.push(f);
    }
    let exp_arg = add_in(exp_terms, dom);
    if !exp_arg.is_zero_lit() {
        let f = func_in(Func::Exp, exp_arg, dom);
        if !f.is_one_lit() {
            match &f {
                Expr::Num(_) | Expr::Prod(_) | Expr::Sum(_) => needs_repass = true,
                _ => {}
            }
            rebuilt.push(f);
        }
    }

    if needs_repass {
        // Power merging re-folded something (e.g. exponents cancelled down to
        // a numeric power, or a sum power expanded); run the product again.
        rebuilt.push(Expr::Num(coeff));
        return mul_in(rebuilt, dom);
    }

    rebuilt.sort();
    if rebuilt.is_empty() {
        return Expr::Num(coeff);
    }
    if coeff.is_one() && rebuilt.len() == 1 {
        return rebuilt.into_iter().next().unwrap();
    }
    let mut out = Vec::with_capacity(rebuilt.len() + 1);
    if !coeff.is_one() {
        out.push(Expr::Num(coeff));
    }
    out.extend(rebuilt);
    if out.len() == 1 {
        out.into_iter().next().unwrap()
    } else {
        Expr::Prod(out)
    }
}

/// Exact rational power for integer exponents that fit a u32.
fn qpow(q: &Q, k: &BigInt) -> Option<Q> {
    let mag = k.magnitude().to_u32()?;
    let p = Q::new(q.numer().pow(mag), q.denom().pow(mag));
    if k.is_negative() {
        if p.is_zero() {
            return None;
        }
        Some(p.recip())
    } else {
        Some(p)
    }
}

pub fn pow_in(base: Expr, exp: Expr, dom: Domain) -> Expr {
    if exp.is_zero_lit() {
        return Expr::one(); // bases assumed nonzero
    }
    if exp.is_one_lit() {
        return base;
    }
    if base.is_one_lit() {
        return Expr::one();
    }

    let int_exp: Option<BigInt> = match &exp {
        Expr::Num(q) if q.is_integer() => Some(q.numer().clone()),
        _ => None,
    };
    let merge_ok = int_exp.is_some() || dom.positive;

    match base {
        Expr::Num(q) => {
            if q.is_zero() {
                if let Expr::Num(e) = &exp {
                    if e.is_positive() {
                        return Expr::zero();
                    }
                }
                // 0 to a negative or symbolic power: left alone, rejected at
                // numeric evaluation.
            } else if let Some(k) = &int_exp {
                if let Some(v) = qpow(&q, k) {
                    return Expr::Num(v);
                }
            }
            Expr::Pow(Box::new(Expr::Num(q)), Box::new(exp))
        }
        Expr::Func(Func::Exp, a) => {
            let arg = mul_in(vec![exp, *a], dom);
            func_in(Func::Exp, arg, dom)
        }
        Expr::Pow(b2, e2) if merge_ok => {
            let merged = mul_in(vec![*e2, exp], dom);
            pow_in(*b2, merged, dom)
        }
        Expr::Prod(fs) if merge_ok => {
            let parts = fs
                .into_iter()
                .map(|f| pow_in(f, exp.clone(), dom))
                .collect::<Vec<_>>();
            mul_in(parts, dom)
        }
        Expr::Sum(ts) => {
            let expand_n = int_exp
                .as_ref()
                .and_then(|k| k.to_i64())
                .filter(|n| (2..=EXPAND_POW_LIMIT).contains(n));
            let b = Expr::Sum(ts);
            if let Some(n) = expand_n {
                let mut acc = b.clone();
                for _ in 1..n {
                    acc = mul_in(vec![acc, b.clone()], dom);
                }
                acc
            } else {
                Expr::Pow(Box::new(b), Box::new(exp))
            }
        }
        other => Expr::Pow(Box::new(other), Box::new(exp)),
    }
}

pub fn func_in(f: Func, arg: Expr, dom: Domain) -> Expr {
    match f {
        Func::Exp => {
            if arg.is_zero_lit() {
                return Expr::one();
            }
            if let Expr::Func(Func::Ln, b) = &arg {
                if dom.positive {
                    return (**b).clone();
                }
            }
            if dom.positive {
                // Pull every c·ln(B) term out of the exponent as B^c.
                let mut pulled: Vec<Expr> = Vec::new();
                let mut kept: Vec<Expr> = Vec::new();
                for t in arg.terms() {
                    match extract_log_term(t) {
                        Some((base, weight)) => pulled.push(pow_in(base, weight, dom)),
                        None => kept.push(t.clone()),
                    }
                }
                if !pulled.is_empty() {
                    let rest = add_in(kept, dom);
                    if !rest.is_zero_lit() {
                        pulled.push(Expr::Func(Func::Exp, Box::new(rest)));
                    }
                    return mul_in(pulled, dom);
                }
            }
            Expr::Func(Func::Exp, Box::new(arg))
        }
        Func::Ln => {
            if arg.is_one_lit() {
                return Expr::zero();
            }
            if let Expr::Func(Func::Exp, b) = arg {
                return *b; // ln(e^x) = x holds on all of R
            }
            if dom.positive {
                match arg {
                    Expr::Prod(fs) => {
                        let parts = fs
                            .into_iter()
                            .map(|x| func_in(Func::Ln, x, dom))
                            .collect::<Vec<_>>();
                        return add_in(parts, dom);
                    }
                    Expr::Pow(b, e) => {
                        let l = func_in(Func::Ln, *b, dom);
                        return mul_in(vec![*e, l], dom);
                    }
                    _ => {}
                }
            }
            Expr::Func(Func::Ln, Box::new(arg))
        }
        Func::Tanh => {
            if arg.is_zero_lit() {
                return Expr::zero();
            }
            Expr::Func(Func::Tanh, Box::new(arg))
        }
    }
}

/// Matches a term of the shape c·k·ln(B) where c is rational and k a
/// product of named-constant powers; returns (B, c·k).
fn extract_log_term(t: &Expr) -> Option<(Expr, Expr)> {
    let (q, key) = t.split_coeff();
    let mut log_base: Option<Expr> = None;
    let mut const_part: Vec<Expr> = vec![Expr::Num(q)];
    for f in key.factors() {
        match f {
            Expr::Func(Func::Ln, b) => {
                if log_base.is_some() {
                    return None; // two log factors, leave alone
                }
                log_base = Some((**b).clone());
            }
            other if other.is_constant_only() => const_part.push(other.clone()),
            _ => return None,
        }
    }
    let base = log_base?;
    Some((base, mul(const_part)))
}
