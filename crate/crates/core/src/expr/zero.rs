//! Seeded numeric zero test: the equality oracle behind every "= 0" claim.
//!
//! An expression is first simplified; a literal zero is `ProvedZero`.
//! Otherwise it is sampled on a box with a deterministic seeded generator
//! and judged relative to the magnitude of its largest top-level term.

use super::{evaluate, normalize_in, Bindings, Domain, Expr};
use crate::sym::Sym;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default sampling seed, recorded in every report.
pub const DEFAULT_SEED: u64 = 0x5269_6363;

/// Sampling ranges per symbol. Every free symbol of the expression under
/// test must have a range.
#[derive(Clone, Debug, Default)]
pub struct SampleBox {
    pub ranges: BTreeMap<Sym, (f64, f64)>,
}

impl SampleBox {
    pub fn new() -> Self {
        SampleBox::default()
    }

    pub fn with(mut self, s: Sym, lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "sample range for {s} must have positive volume");
        self.ranges.insert(s, (lo, hi));
        self
    }

    /// Ranges for a list of symbols sharing one interval.
    pub fn uniform(syms: &[Sym], lo: f64, hi: f64) -> Self {
        let mut b = SampleBox::new();
        for s in syms {
            b = b.with(*s, lo, hi);
        }
        b
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Bindings {
        self.ranges
            .iter()
            .map(|(s, (lo, hi))| (*s, rng.gen_range(*lo..*hi)))
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ZeroStatus {
    ProvedZero,
    NumericallyZero,
    NonZero,
}

impl std::fmt::Display for ZeroStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ZeroStatus::ProvedZero => "proved-zero",
            ZeroStatus::NumericallyZero => "numerically-zero",
            ZeroStatus::NonZero => "non-zero",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroVerdict {
    pub status: ZeroStatus,
    /// Failing sample point and its residual, present when `NonZero`.
    pub witness: Option<(Vec<(String, f64)>, f64)>,
    /// Largest |residual| observed across samples.
    pub max_magnitude: f64,
    /// Diagnostic for unsampleable expressions.
    pub note: Option<String>,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self.status, ZeroStatus::ProvedZero | ZeroStatus::NumericallyZero)
    }

    fn proved() -> Self {
        ZeroVerdict {
            status: ZeroStatus::ProvedZero,
            witness: None,
            max_magnitude: 0.0,
            note: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ZeroConfig {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Redraw rejected samples up to `samples * oversample` times.
    pub oversample: usize,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        ZeroConfig {
            samples: 200,
            tol: 1e-8,
            seed: DEFAULT_SEED,
            oversample: 10,
        }
    }
}

/// Tests whether `e` vanishes identically on the box.
pub fn is_zero(e: &Expr, bounds: &SampleBox, cfg: &ZeroConfig) -> ZeroVerdict {
    let s = normalize_in(e, Domain::positive());
    if s.is_zero_lit() {
        return ZeroVerdict::proved();
    }
    if s.contains_unknown() {
        return ZeroVerdict {
            status: ZeroStatus::NonZero,
            witness: None,
            max_magnitude: f64::NAN,
            note: Some("expression contains unknown-function nodes and cannot be sampled".into()),
        };
    }

    let terms: Vec<&Expr> = s.terms().iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_resid: f64 = 0.0;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let budget = cfg.samples * cfg.oversample.max(1);

    while accepted < cfg.samples && attempts < budget {
        attempts += 1;
        let point = bounds.draw(&mut rng);
        let mut sum = 0.0;
        let mut largest: f64 = 0.0;
        let mut rejected = false;
        for t in &terms {
            match evaluate(t, &point) {
                Ok(v) if v.is_finite() => {
                    sum += v;
                    largest = largest.max(v.abs());
                }
                _ => {
                    rejected = true;
                    break;
                }
            }
        }
        if rejected {
            continue;
        }
        accepted += 1;
        let resid = sum.abs();
        max_resid = max_resid.max(resid);
        if resid > cfg.tol * (1.0 + largest) {
            let witness = point
                .iter()
                .map(|(s, v)| (s.name().to_string(), *v))
                .collect();
            return ZeroVerdict {
                status: ZeroStatus::NonZero,
                witness: Some((witness, sum)),
                max_magnitude: max_resid,
                note: None,
            };
        }
    }

    if accepted == 0 {
        return ZeroVerdict {
            status: ZeroStatus::NonZero,
            witness: None,
            max_magnitude: f64::NAN,
            note: Some(format!(
                "no admissible sample in {attempts} draws (domain rejections)"
            )),
        };
    }

    ZeroVerdict {
        status: ZeroStatus::NumericallyZero,
        witness: None,
        max_magnitude: max_resid,
        note: if accepted < cfg.samples {
            Some(format!("only {accepted}/{} samples admissible", cfg.samples))
        } else {
            None
        },
    }
}
