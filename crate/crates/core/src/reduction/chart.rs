//! Invariants of a one-parameter subgroup via the characteristic system
//! dv_1/ξ_1 = dv_2/ξ_2 = …: a variable with zero coefficient is itself an
//! invariant; every other variable pairs with a pivot through the
//! closed-form antiderivative of dv/ξ(v).

use super::ReduceError;
use crate::expr::{
    add, differentiate, evaluate, is_zero, normalize_in, substitute, Bindings, Domain, Expr,
    SampleBox, ZeroConfig, ZeroStatus,
};
use crate::fields::VectorField;
use crate::sym::Sym;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// How one coefficient depends on its own variable. These are the only
/// shapes the characteristic integrator accepts; each has a closed-form
/// antiderivative of dv/ξ(v).
#[derive(Clone, PartialEq, Debug)]
enum CoeffClass {
    Zero,
    /// ξ = α, constant: P = v/α.
    Linear(Expr),
    /// ξ = α + β·v: P = ln(α + β·v)/β.
    Affine(Expr, Expr),
    /// ξ = β·v: P = ln(v)/β.
    Log(Expr),
    /// ξ = β·v·ln(v): P = ln(ln v)/β.
    LogLog(Expr),
}

impl CoeffClass {
    fn is_log_type(&self) -> bool {
        matches!(
            self,
            CoeffClass::Affine(..) | CoeffClass::Log(_) | CoeffClass::LogLog(_)
        )
    }
}

fn classify_coefficient(coeff: &Expr, v: Sym) -> Result<CoeffClass, ReduceError> {
    if coeff.is_zero_lit() {
        return Ok(CoeffClass::Zero);
    }
    let bad = || ReduceError::OutsideIntegrableClass {
        var: v,
        coeff: coeff.clone(),
    };
    let mut alpha: Vec<Expr> = Vec::new();
    let mut beta: Vec<Expr> = Vec::new();
    let mut gamma: Vec<Expr> = Vec::new();
    for t in coeff.terms() {
        // Split the term into the factor of interest and a constant rest.
        let (q, key) = t.split_coeff();
        let mut has_v = false;
        let mut has_vlnv = false;
        let mut consts: Vec<Expr> = vec![Expr::num(q)];
        for f in key.factors() {
            if f == &Expr::var(v) {
                has_v = true;
            } else if f == &Expr::ln(Expr::var(v)) {
                has_vlnv = true;
            } else if f.is_constant_only() {
                consts.push(f.clone());
            } else {
                return Err(bad());
            }
        }
        let c = crate::expr::mul(consts);
        match (has_v, has_vlnv) {
            (false, false) => alpha.push(c),
            (true, false) => beta.push(c),
            (true, true) => gamma.push(c),
            (false, true) => return Err(bad()),
        }
    }
    let alpha = add(alpha);
    let beta = add(beta);
    let gamma = add(gamma);
    match (
        alpha.is_zero_lit(),
        beta.is_zero_lit(),
        gamma.is_zero_lit(),
    ) {
        (false, true, true) => Ok(CoeffClass::Linear(alpha)),
        (false, false, true) => Ok(CoeffClass::Affine(alpha, beta)),
        (true, false, true) => Ok(CoeffClass::Log(beta)),
        (true, true, false) => Ok(CoeffClass::LogLog(gamma)),
        _ => Err(bad()),
    }
}

/// The closed-form antiderivative P(v) of dv/ξ(v).
fn antiderivative(class: &CoeffClass, v: Sym) -> Expr {
    let vx = Expr::var(v);
    match class {
        CoeffClass::Zero => unreachable!("zero coefficients never integrate"),
        CoeffClass::Linear(alpha) => vx / alpha.clone(),
        CoeffClass::Affine(alpha, beta) => {
            Expr::ln(alpha.clone() + beta.clone() * vx) / beta.clone()
        }
        CoeffClass::Log(beta) => Expr::ln(vx) / beta.clone(),
        CoeffClass::LogLog(beta) => Expr::ln(Expr::ln(vx)) / beta.clone(),
    }
}

/// The β of a log-type class (the reciprocal log-atom weight in P).
fn log_weight(class: &CoeffClass) -> Option<&Expr> {
    match class {
        CoeffClass::Affine(_, b) | CoeffClass::Log(b) | CoeffClass::LogLog(b) => Some(b),
        _ => None,
    }
}

/// One computed invariant with the chart position it sorts by.
struct RawInvariant {
    position: usize,
    expr: Expr,
    is_dependent: bool,
}

/// Runs the characteristic system on a vector field and returns the
/// invariants in chart order, dependent-variable invariant last.
fn characteristic_system(x: &VectorField) -> Result<Vec<RawInvariant>, ReduceError> {
    let chart = &x.chart;
    let dep = chart.dependent;
    let dom = Domain::positive();

    let mut classes: Vec<CoeffClass> = Vec::new();
    for (v, c) in chart.vars.iter().zip(&x.coeffs) {
        classes.push(classify_coefficient(c, *v)?);
    }
    if classes.iter().all(|c| matches!(c, CoeffClass::Zero)) {
        return Err(ReduceError::ZeroField);
    }

    // Pivot: first log-type variable in chart order, else first nonzero.
    let pivot_idx = classes
        .iter()
        .position(|c| c.is_log_type())
        .or_else(|| classes.iter().position(|c| !matches!(c, CoeffClass::Zero)))
        .unwrap();
    let pivot_var = chart.vars[pivot_idx];
    let pivot_class = &classes[pivot_idx];
    let p_pivot = antiderivative(pivot_class, pivot_var);

    let mut out: Vec<RawInvariant> = Vec::new();
    for (idx, (v, class)) in chart.vars.iter().zip(&classes).enumerate() {
        if idx == pivot_idx {
            continue;
        }
        match class {
            CoeffClass::Zero => out.push(RawInvariant {
                position: idx,
                expr: Expr::var(*v),
                is_dependent: *v == dep,
            }),
            _ => {
                let d = normalize_in(&(p_pivot.clone() - antiderivative(class, *v)), dom);
                // Scale so the paired variable (or, failing that, the pivot)
                // enters with weight one.
                let c = if let Some(beta) = log_weight(class) {
                    -beta.clone()
                } else if let Some(beta) = log_weight(pivot_class) {
                    beta.clone()
                } else if let CoeffClass::Linear(alpha) = class {
                    -alpha.clone()
                } else {
                    Expr::one()
                };
                let scaled = normalize_in(&(c * d), dom);
                let inv = if pivot_class.is_log_type() {
                    normalize_in(&Expr::exp(scaled), dom)
                } else {
                    scaled
                };
                out.push(RawInvariant {
                    position: idx,
                    expr: inv,
                    is_dependent: *v == dep,
                });
            }
        }
    }
    out.sort_by_key(|r| (r.is_dependent, r.position));
    Ok(out)
}

/// Solves `f_def = dep·M` or `f_def = dep + R` for the dependent variable.
/// Returns the dependent variable expressed in `fvar` and the remaining
/// chart variables.
fn solve_for_dependent(f_def: &Expr, dep: Sym, fvar: Sym) -> Result<Expr, ReduceError> {
    let dom = Domain::positive();
    let not_solvable = || ReduceError::NotSolvable {
        f_def: f_def.clone(),
    };
    if let Expr::Sum(ts) = f_def {
        // Linear shape: one bare ±dep term, the rest free of dep.
        let mut coeff: Option<Expr> = None;
        let mut rest: Vec<Expr> = Vec::new();
        for t in ts {
            if t.contains_var(dep) {
                let (q, key) = t.split_coeff();
                if key == Expr::var(dep) && coeff.is_none() {
                    coeff = Some(Expr::num(q));
                } else {
                    return Err(not_solvable());
                }
            } else {
                rest.push(t.clone());
            }
        }
        let coeff = coeff.ok_or_else(not_solvable)?;
        let r = add(rest);
        return Ok(normalize_in(&((Expr::var(fvar) - r) / coeff), dom));
    }
    // Monomial shape: f_def / dep must be free of dep.
    let m = normalize_in(&(f_def.clone() / Expr::var(dep)), dom);
    if m.contains_var(dep) {
        return Err(not_solvable());
    }
    Ok(normalize_in(&(Expr::var(fvar) / m), dom))
}

/// The similarity chart of a main-chart generator: two independent
/// invariants (z, w), the dependent invariant f_def, and u solved from it.
#[derive(Clone, PartialEq, Debug)]
pub struct InvariantChart {
    pub generator: VectorField,
    pub z: Expr,
    pub w: Expr,
    pub f_def: Expr,
    pub u_solve: Expr,
}

impl InvariantChart {
    /// Builds a chart from given invariants, solving f_def for u.
    pub fn from_invariants(
        generator: VectorField,
        z: Expr,
        w: Expr,
        f_def: Expr,
    ) -> Result<Self, ReduceError> {
        let dep = generator.chart.dependent;
        let u_solve = solve_for_dependent(&f_def, dep, Sym::F)?;
        Ok(InvariantChart {
            generator,
            z,
            w,
            f_def,
            u_solve,
        })
    }
}

/// A second-level chart on (z, w, f): the invariant s, the dependent
/// invariant g_def, and f solved from it.
#[derive(Clone, PartialEq, Debug)]
pub struct SubChart {
    /// Generator on the reduced chart; absent for table-supplied charts
    /// whose generators fall outside the integrable class.
    pub generator: Option<VectorField>,
    pub s_inv: Expr,
    pub g_def: Expr,
    pub f_solve: Expr,
}

impl SubChart {
    pub fn from_invariants(
        generator: Option<VectorField>,
        s_inv: Expr,
        g_def: Expr,
    ) -> Result<Self, ReduceError> {
        let f_solve = solve_for_dependent(&g_def, Sym::F, Sym::G)?;
        Ok(SubChart {
            generator,
            s_inv,
            g_def,
            f_solve,
        })
    }
}

/// Default positive sampling box for chart checks; stays above 1 so nested
/// logarithms are defined, and binds every named constant.
pub fn default_box(syms: &[Sym]) -> SampleBox {
    let mut b = SampleBox::new();
    for s in syms {
        b = b.with(*s, 1.15, 2.85);
    }
    b
}

/// Computes the similarity chart of a generator on the main chart and
/// verifies X(I) = 0 for every invariant before returning it.
pub fn characteristic_invariants(x: &VectorField) -> Result<InvariantChart, ReduceError> {
    let invs = characteristic_system(x)?;
    let (dep, indep): (Vec<_>, Vec<_>) = invs.into_iter().partition(|r| r.is_dependent);
    if indep.len() != 2 || dep.len() != 1 {
        return Err(ReduceError::WrongInvariantCount {
            got: indep.len() + dep.len(),
            want: 3,
        });
    }
    let chart = InvariantChart::from_invariants(
        x.clone(),
        indep[0].expr.clone(),
        indep[1].expr.clone(),
        dep.into_iter().next().unwrap().expr,
    )?;
    for inv in [&chart.z, &chart.w, &chart.f_def] {
        check_annihilation(x, inv)?;
    }
    Ok(chart)
}

/// Computes the (s, g) invariants of a generator on the reduced chart.
pub fn characteristic_subchart(v: &VectorField) -> Result<SubChart, ReduceError> {
    let invs = characteristic_system(v)?;
    let (dep, indep): (Vec<_>, Vec<_>) = invs.into_iter().partition(|r| r.is_dependent);
    if indep.len() != 1 || dep.len() != 1 {
        return Err(ReduceError::WrongInvariantCount {
            got: indep.len() + dep.len(),
            want: 2,
        });
    }
    let sub = SubChart::from_invariants(
        Some(v.clone()),
        indep[0].expr.clone(),
        dep.into_iter().next().unwrap().expr,
    )?;
    check_annihilation(v, &sub.s_inv)?;
    check_annihilation(v, &sub.g_def)?;
    Ok(sub)
}

fn check_annihilation(x: &VectorField, inv: &Expr) -> Result<(), ReduceError> {
    let applied = x.apply(inv).map_err(ReduceError::Field)?;
    let mut syms = applied.free_vars();
    syms.extend(applied.free_constants());
    let verdict = is_zero(&applied, &default_box(&syms), &ZeroConfig::default());
    if verdict.is_zero() {
        Ok(())
    } else {
        Err(ReduceError::NotInvariant {
            invariant: inv.clone(),
            residual: applied,
        })
    }
}

/// Per-chart verification report.
#[derive(Clone, Debug)]
pub struct ChartCheck {
    /// Zero-verdict statuses for X(z), X(w), X(f_def).
    pub annihilation: [ZeroStatus; 3],
    /// u_solve with f ↦ f_def reproduces u exactly.
    pub roundtrip_exact: bool,
    /// The 3×4 Jacobian of (z, w, f_def) has numeric rank 3 at samples.
    pub jacobian_rank_ok: bool,
}

impl ChartCheck {
    pub fn passed(&self) -> bool {
        self.annihilation
            .iter()
            .all(|s| *s != ZeroStatus::NonZero)
            && self.roundtrip_exact
            && self.jacobian_rank_ok
    }
}

/// Validates a chart independently of how it was produced: annihilation of
/// each invariant, the u_solve round trip, and functional independence via
/// numeric Jacobian rank.
pub fn verify_chart(c: &InvariantChart) -> Result<ChartCheck, ReduceError> {
    let x = &c.generator;
    let dom = Domain::positive();
    let mut statuses = Vec::with_capacity(3);
    for inv in [&c.z, &c.w, &c.f_def] {
        let applied = x.apply(inv).map_err(ReduceError::Field)?;
        let mut syms = applied.free_vars();
        syms.extend(applied.free_constants());
        let verdict = is_zero(&applied, &default_box(&syms), &ZeroConfig::default());
        statuses.push(verdict.status);
    }

    let mut map = BTreeMap::new();
    map.insert(Sym::F, c.f_def.clone());
    let rt = substitute(&c.u_solve, &map, dom);
    let dep = x.chart.dependent;
    let roundtrip_exact = rt == Expr::var(dep);

    let jacobian_rank_ok = jacobian_rank(
        &[c.z.clone(), c.w.clone(), c.f_def.clone()],
        &x.chart.vars,
        3,
    );

    Ok(ChartCheck {
        annihilation: [statuses[0], statuses[1], statuses[2]],
        roundtrip_exact,
        jacobian_rank_ok,
    })
}

/// True when the combined system of published and computed invariants still
/// has rank 3, i.e. each computed invariant is functionally dependent on
/// the published triple.
pub fn charts_equivalent(published: &InvariantChart, computed: &InvariantChart) -> bool {
    let vars = &published.generator.chart.vars;
    let funcs = vec![
        published.z.clone(),
        published.w.clone(),
        published.f_def.clone(),
        computed.z.clone(),
        computed.w.clone(),
        computed.f_def.clone(),
    ];
    jacobian_rank(&funcs, vars, 3)
}

/// Checks that the Jacobian d(funcs)/d(vars) has the expected numeric rank
/// at several random sample points (tolerance 1e-8 relative).
fn jacobian_rank(funcs: &[Expr], vars: &[Sym], want: usize) -> bool {
    let mut syms: Vec<Sym> = vars.to_vec();
    for f in funcs {
        for c in f.free_constants() {
            if !syms.contains(&c) {
                syms.push(c);
            }
        }
    }
    let bbox = default_box(&syms);
    let grads: Vec<Vec<Expr>> = funcs
        .iter()
        .map(|f| vars.iter().map(|v| differentiate(f, *v)).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(crate::expr::DEFAULT_SEED);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 5 && attempts < 60 {
        attempts += 1;
        let point: Bindings = bbox
            .ranges
            .iter()
            .map(|(s, (lo, hi))| (*s, rng.gen_range(*lo..*hi)))
            .collect();
        let mut m: Vec<Vec<f64>> = Vec::new();
        let mut ok = true;
        for row in &grads {
            let mut r = Vec::new();
            for g in row {
                match evaluate(g, &point) {
                    Ok(v) if v.is_finite() => r.push(v),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            m.push(r);
        }
        if !ok {
            continue;
        }
        checked += 1;
        if numeric_rank(m, 1e-8) != want {
            return false;
        }
    }
    checked > 0
}

fn numeric_rank(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |a, b| a.max(b.abs()))
        .max(1.0);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).max_by(|a, b| {
            m[*a][col].abs().partial_cmp(&m[*b][col].abs()).unwrap()
        }) else {
            break;
        };
        if m[p][col].abs() <= tol * scale {
            continue;
        }
        m.swap(row, p);
        let pv = m[row][col];
        for r in (row + 1)..rows {
            let f = m[r][col] / pv;
            for c in col..cols {
                m[r][c] -= f * m[row][c];
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}
