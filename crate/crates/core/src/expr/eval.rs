//! IEEE double evaluation under explicit bindings.

use super::Expr;
use crate::sym::{Func, Sym};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;

/// Values for every free symbol (variables and named constants alike).
pub type Bindings = BTreeMap<Sym, f64>;

#[derive(Clone, PartialEq, Debug)]
pub enum EvalError {
    UnboundSymbol(Sym),
    /// ln of a non-positive value, zero to a negative power, or a negative
    /// base under a non-integer exponent.
    DomainViolation { what: String, value: f64 },
    UnknownFunction(Sym),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundSymbol(s) => write!(f, "unbound symbol {s}"),
            EvalError::DomainViolation { what, value } => {
                write!(f, "domain violation: {what} at {value}")
            }
            EvalError::UnknownFunction(s) => {
                write!(f, "unknown function {s} is not numerically evaluable")
            }
        }
    }
}

impl std::error::Error for EvalError {}

pub fn evaluate(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    match e {
        Expr::Num(q) => Ok(q.to_f64().unwrap_or(f64::NAN)),
        Expr::Const(s) | Expr::Var(s) => {
            b.get(s).copied().ok_or(EvalError::UnboundSymbol(*s))
        }
        Expr::Func(f, a) => {
            let v = evaluate(a, b)?;
            match f {
                Func::Exp => Ok(v.exp()),
                Func::Ln => {
                    if v <= 0.0 {
                        Err(EvalError::DomainViolation {
                            what: "ln of non-positive argument".into(),
                            value: v,
                        })
                    } else {
                        Ok(v.ln())
                    }
                }
                Func::Tanh => Ok(v.tanh()),
            }
        }
        Expr::Unknown(u) => Err(EvalError::UnknownFunction(u.name)),
        Expr::Pow(base, exp) => {
            let bv = evaluate(base, b)?;
            let ev = evaluate(exp, b)?;
            power(bv, ev)
        }
        Expr::Prod(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= evaluate(f, b)?;
            }
            Ok(acc)
        }
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += evaluate(t, b)?;
            }
            Ok(acc)
        }
    }
}

fn power(base: f64, exp: f64) -> Result<f64, EvalError> {
    let is_int = exp.fract() == 0.0 && exp.abs() < 1e15;
    if base == 0.0 {
        if exp > 0.0 {
            return Ok(0.0);
        }
        if exp == 0.0 {
            return Ok(1.0);
        }
        return Err(EvalError::DomainViolation {
            what: "zero to a negative power".into(),
            value: exp,
        });
    }
    if base < 0.0 && !is_int {
        return Err(EvalError::DomainViolation {
            what: "negative base under non-integer exponent".into(),
            value: base,
        });
    }
    if is_int && exp.abs() <= 1024.0 {
        Ok(base.powi(exp as i32))
    } else {
        Ok(base.powf(exp))
    }
}
