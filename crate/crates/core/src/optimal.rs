//! Canonicalization of an algebra element onto the eight normal forms of
//! the one-dimensional optimal system, with a replayable adjoint word.
//!
//! The case is decided by the zero pattern of (a4, a5, a6) — these
//! coefficients are invariant under every adjoint map, so the pattern is an
//! orbit invariant. Within a case, coefficients with a nonzero partner
//! pivot are killed by the translation-type maps F1, F2, F3; surviving
//! coefficients among (a1, a2, a3) are rescaled to ±1 by the exponential
//! maps F5, F6, F4; the whole element is then scaled so the pivot
//! coefficient lands exactly on +1. The scale factor carries the pivot's
//! sign: the adjoint action cannot change sign(a4..a6), so elements with a
//! negative pivot reach the templates only through a negative scale.
//! Parameters are solved directly from the required cancellation instead of
//! trusting quoted signs, and `verify_orbit` replays the word.

use crate::algebra::{render_combination, AlgebraError, LieElement};
use crate::expr::{evaluate, normalize_in, qsign, Bindings, Domain, Expr, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A parameter of one adjoint step, kept in a form whose application is
/// exact: translations use the rational value itself, rescalings store
/// s = ln(r) so that e^s collapses to the rational r.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AdjointParam {
    Rational(Q),
    /// s = ln(r) with r > 0.
    LnRational(Q),
}

impl AdjointParam {
    pub fn to_expr(&self) -> Expr {
        match self {
            AdjointParam::Rational(q) => Expr::num(q.clone()),
            AdjointParam::LnRational(r) => Expr::ln(Expr::num(r.clone())),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let b = Bindings::new();
        evaluate(&self.to_expr(), &b).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for AdjointParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdjointParam::Rational(q) => write!(f, "{q}"),
            AdjointParam::LnRational(r) => write!(f, "ln({r})"),
        }
    }
}

/// Ordered adjoint steps (generator index, parameter) followed by one
/// overall scale factor. The scale is 1/pivot, so it is negative exactly
/// when the input's pivot coefficient is negative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdjointWord {
    pub steps: Vec<(usize, AdjointParam)>,
    pub scale: Q,
}

impl fmt::Display for AdjointWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            write!(f, "(empty word)")?;
        } else {
            let steps: Vec<String> = self
                .steps
                .iter()
                .map(|(i, p)| format!("F{i}(s={p})"))
                .collect();
            write!(f, "{}", steps.join(" then "))?;
        }
        write!(f, ", scale {}", self.scale)
    }
}

/// One of the eight normal-form templates:
///
/// ```text
/// 1) X4 + a·X5 + b·X6        5) ε·X3 + X5 + a·X6
/// 2) ε·X2 + X4 + a·X5        6) ε·X2 + ε'·X3 + X5
/// 3) ε·X1 + X4 + a·X6        7) ε·X1 + ε'·X3 + X6
/// 4) ε·X1 + ε'·X2 + X4       8) ε·X1 + c·X2 + ε'·X3
/// ```
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalForm {
    pub case_id: u8,
    pub a: Option<Q>,
    pub b: Option<Q>,
    pub c: Option<Q>,
    pub eps: i8,
    pub eps_p: i8,
}

impl NormalForm {
    /// The coefficient vector the template denotes.
    pub fn vector(&self) -> LieElement {
        let q = |n: i8| Q::from_integer(BigInt::from(n));
        let a = || self.a.clone().unwrap_or_else(Q::zero);
        let b = || self.b.clone().unwrap_or_else(Q::zero);
        let c = || self.c.clone().unwrap_or_else(Q::zero);
        let one = Q::one();
        let zero = Q::zero();
        let v = match self.case_id {
            1 => vec![zero.clone(), zero.clone(), zero, one, a(), b()],
            2 => vec![zero.clone(), q(self.eps), zero.clone(), one, a(), zero],
            3 => vec![q(self.eps), zero.clone(), zero.clone(), one, zero, a()],
            4 => vec![q(self.eps), q(self.eps_p), zero.clone(), one, zero.clone(), zero],
            5 => vec![zero.clone(), zero.clone(), q(self.eps), zero, one, a()],
            6 => vec![zero.clone(), q(self.eps), q(self.eps_p), zero.clone(), one, zero],
            7 => vec![q(self.eps), zero.clone(), q(self.eps_p), zero.clone(), zero, one],
            8 => vec![q(self.eps), c(), q(self.eps_p), zero.clone(), zero.clone(), zero],
            _ => unreachable!("case id 1..=8"),
        };
        LieElement(v)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "case {}: {}",
            self.case_id,
            render_combination(&self.vector().to_exprs())
        )
    }
}

/// The eight-way case split on the zero pattern of (a4, a5, a6).
pub fn classify(x: &LieElement) -> Result<u8, AlgebraError> {
    if x.is_zero() {
        return Err(AlgebraError::ZeroElement);
    }
    let nz = |k: usize| !x.0[k].is_zero();
    Ok(match (nz(3), nz(4), nz(5)) {
        (true, true, true) => 1,
        (true, true, false) => 2,
        (true, false, true) => 3,
        (true, false, false) => 4,
        (false, true, true) => 5,
        (false, true, false) => 6,
        (false, false, true) => 7,
        (false, false, false) => 8,
    })
}

/// Canonicalizes a nonzero element: the returned word applied to the input
/// (steps in order, then the scale) reproduces the normal form's vector
/// exactly.
pub fn canonicalize(x: &LieElement) -> Result<(NormalForm, AdjointWord), AlgebraError> {
    let case = classify(x)?;
    let a = &x.0;
    let mut steps: Vec<(usize, AdjointParam)> = Vec::new();

    // Translation maps: F3 moves a3 by −s·a4, F1 moves a1 by −s·a5,
    // F2 moves a2 by −s·a6. The cancelling parameter is coeff/pivot.
    let mut kill = |gen: usize, coeff: &Q, pivot: &Q| {
        if !coeff.is_zero() {
            steps.push((gen, AdjointParam::Rational(coeff / pivot)));
        }
    };
    match case {
        1 => {
            kill(3, &a[2], &a[3]);
            kill(1, &a[0], &a[4]);
            kill(2, &a[1], &a[5]);
        }
        2 => {
            kill(3, &a[2], &a[3]);
            kill(1, &a[0], &a[4]);
        }
        3 => {
            kill(3, &a[2], &a[3]);
            kill(2, &a[1], &a[5]);
        }
        4 => kill(3, &a[2], &a[3]),
        5 => {
            kill(1, &a[0], &a[4]);
            kill(2, &a[1], &a[5]);
        }
        6 => kill(1, &a[0], &a[4]),
        7 => kill(2, &a[1], &a[5]),
        8 => {}
        _ => unreachable!(),
    }

    // Exponential maps: F5 scales a1, F6 scales a2, F4 scales a3 by e^s.
    // With the final scale λ = 1/pivot, e^s = |pivot/coeff| brings the
    // coefficient to ±1; its sign relative to the pivot is ε.
    let pivot: Q = match case {
        1..=4 => a[3].clone(),
        5 | 6 => a[4].clone(),
        7 => a[5].clone(),
        _ => Q::one(),
    };
    let mut rescale = |gen: usize, coeff: &Q| -> i8 {
        if coeff.is_zero() {
            return 0;
        }
        let ratio = (&pivot / coeff).abs();
        if !ratio.is_one() {
            steps.push((gen, AdjointParam::LnRational(ratio)));
        }
        qsign(coeff) * qsign(&pivot)
    };

    let mut eps = 0i8;
    let mut eps_p = 0i8;
    match case {
        2 => eps = rescale(6, &a[1]),
        3 => eps = rescale(5, &a[0]),
        4 => {
            eps = rescale(5, &a[0]);
            eps_p = rescale(6, &a[1]);
        }
        5 => eps = rescale(4, &a[2]),
        6 => {
            eps = rescale(6, &a[1]);
            eps_p = rescale(4, &a[2]);
        }
        7 => {
            eps = rescale(5, &a[0]);
            eps_p = rescale(4, &a[2]);
        }
        8 => {
            eps = rescale(5, &a[0]);
            eps_p = rescale(4, &a[2]);
        }
        _ => {}
    }

    let nf = match case {
        1 => NormalForm {
            case_id: 1,
            a: Some(&a[4] / &a[3]),
            b: Some(&a[5] / &a[3]),
            c: None,
            eps: 0,
            eps_p: 0,
        },
        2 => NormalForm {
            case_id: 2,
            a: Some(&a[4] / &a[3]),
            b: None,
            c: None,
            eps,
            eps_p: 0,
        },
        3 => NormalForm {
            case_id: 3,
            a: Some(&a[5] / &a[3]),
            b: None,
            c: None,
            eps,
            eps_p: 0,
        },
        4 => NormalForm {
            case_id: 4,
            a: None,
            b: None,
            c: None,
            eps,
            eps_p,
        },
        5 => NormalForm {
            case_id: 5,
            a: Some(&a[5] / &a[4]),
            b: None,
            c: None,
            eps,
            eps_p: 0,
        },
        6 => NormalForm {
            case_id: 6,
            a: None,
            b: None,
            c: None,
            eps,
            eps_p,
        },
        7 => NormalForm {
            case_id: 7,
            a: None,
            b: None,
            c: None,
            eps,
            eps_p,
        },
        8 => NormalForm {
            case_id: 8,
            a: None,
            b: None,
            c: Some(a[1].clone()),
            eps,
            eps_p,
        },
        _ => unreachable!(),
    };

    let word = AdjointWord {
        steps,
        scale: Q::one() / pivot,
    };
    Ok((nf, word))
}

/// Applies a word's steps (in order) and scale to an element. Coefficients
/// are carried as expressions so ln-parameters stay exact: translations add
/// −s·a_src, rescalings multiply by e^s.
pub fn apply_word(x: &LieElement, word: &AdjointWord) -> Vec<Expr> {
    let dom = Domain::positive();
    let mut v: Vec<Expr> = x.to_exprs();
    for (gen, param) in &word.steps {
        let s = param.to_expr();
        match gen {
            1 => v[0] = normalize_in(&(v[0].clone() - s * v[4].clone()), dom),
            2 => v[1] = normalize_in(&(v[1].clone() - s * v[5].clone()), dom),
            3 => v[2] = normalize_in(&(v[2].clone() - s * v[3].clone()), dom),
            4 => v[2] = normalize_in(&(Expr::exp(s) * v[2].clone()), dom),
            5 => v[0] = normalize_in(&(Expr::exp(s) * v[0].clone()), dom),
            6 => v[1] = normalize_in(&(Expr::exp(s) * v[1].clone()), dom),
            _ => panic!("generator index must be 1..=6"),
        }
    }
    let lambda = Expr::num(word.scale.clone());
    v.into_iter()
        .map(|c| normalize_in(&(lambda.clone() * c), dom))
        .collect()
}

/// True iff replaying the word on `x` reproduces the normal form's vector:
/// exactly for rational words, and to 1e-10 otherwise.
pub fn verify_orbit(x: &LieElement, word: &AdjointWord, nf: &NormalForm) -> bool {
    let got = apply_word(x, word);
    let want = nf.vector();
    got.iter().zip(&want.0).all(|(g, w)| {
        let diff = normalize_in(&(g.clone() - Expr::num(w.clone())), Domain::positive());
        if diff.is_zero_lit() {
            return true;
        }
        match evaluate(&diff, &Bindings::new()) {
            Ok(v) => v.abs() <= 1e-10,
            Err(_) => false,
        }
    })
}

/// Continued-fraction snap of a float to a rational with relative
/// tolerance, so zero tests on classified coefficients are exact.
pub fn snap_to_rational(x: f64, tol: f64) -> Q {
    if !x.is_finite() {
        panic!("cannot snap a non-finite value");
    }
    let scale = x.abs().max(1.0);
    if x.abs() <= tol * scale {
        return Q::zero();
    }
    let negative = x < 0.0;
    let mut v = x.abs();
    // Convergents h_n / k_n of the continued fraction of |x|.
    let (mut h0, mut k0) = (BigInt::zero(), BigInt::one());
    let (mut h1, mut k1) = (BigInt::one(), BigInt::zero());
    for _ in 0..64 {
        let a = v.floor();
        let ab = BigInt::from(a as i64);
        let h2 = &ab * &h1 + &h0;
        let k2 = &ab * &k1 + &k0;
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        let approx = Q::new(h1.clone(), k1.clone());
        let b = Bindings::new();
        let approx_f = evaluate(&Expr::num(approx.clone()), &b).unwrap();
        if (approx_f - x.abs()).abs() <= tol * scale {
            return if negative { -approx } else { approx };
        }
        let frac = v - a;
        if frac.abs() < 1e-18 {
            break;
        }
        v = 1.0 / frac;
    }
    let approx = Q::new(h1, k1);
    if negative {
        -approx
    } else {
        approx
    }
}

/// Canonicalizes a float vector by snapping to rationals first
/// (continued fractions, relative tolerance 1e-12).
pub fn canonicalize_f64(coords: &[f64; 6]) -> Result<(NormalForm, AdjointWord), AlgebraError> {
    let v: Vec<Q> = coords.iter().map(|x| snap_to_rational(*x, 1e-12)).collect();
    canonicalize(&LieElement(v))
}
