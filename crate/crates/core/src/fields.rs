//! Vector fields on coordinate charts: symbolic commutators, extraction of
//! structure constants from a concrete basis, the closed-form one-parameter
//! flows of the six symmetry generators, and the solution-to-solution
//! transformations they induce.

use crate::algebra::{LieElement, StructureConstants};
use crate::expr::{
    add, differentiate, normalize_in, parse, substitute, Domain, Expr, ParseError, Q,
};
use crate::sym::Sym;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Ordered chart variables with one designated dependent variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoordinateChart {
    pub vars: Vec<Sym>,
    pub dependent: Sym,
}

impl CoordinateChart {
    pub fn new(vars: Vec<Sym>, dependent: Sym) -> Self {
        assert!(vars.contains(&dependent), "dependent variable not in chart");
        let mut seen = vars.clone();
        seen.dedup();
        assert_eq!(seen.len(), vars.len(), "chart variables must be distinct");
        CoordinateChart { vars, dependent }
    }

    /// The main chart (x, y, t, u) with dependent u.
    pub fn main() -> Self {
        CoordinateChart::new(vec![Sym::X, Sym::Y, Sym::T, Sym::U], Sym::U)
    }

    /// The reduced chart (z, w, f) with dependent f.
    pub fn reduced() -> Self {
        CoordinateChart::new(vec![Sym::Z, Sym::W, Sym::F], Sym::F)
    }

    /// The ODE chart (s, g) with dependent g.
    pub fn ode() -> Self {
        CoordinateChart::new(vec![Sym::S, Sym::G], Sym::G)
    }

    pub fn independents(&self) -> impl Iterator<Item = Sym> + '_ {
        self.vars.iter().copied().filter(move |v| *v != self.dependent)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum FieldError {
    ChartMismatch { offending: Sym },
    /// A commutator left the rational span of the basis.
    OutsideSpan { i: usize, j: usize },
    Parse(ParseError),
    BadTerm { offset: usize, reason: String },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::ChartMismatch { offending } => {
                write!(f, "expression uses `{offending}` which is not a chart variable")
            }
            FieldError::OutsideSpan { i, j } => write!(
                f,
                "[X{},X{}] does not lie in the rational span of the basis",
                i + 1,
                j + 1
            ),
            FieldError::Parse(e) => write!(f, "{e}"),
            FieldError::BadTerm { offset, reason } => {
                write!(f, "bad vector-field term at offset {offset}: {reason}")
            }
        }
    }
}

impl std::error::Error for FieldError {}

impl From<ParseError> for FieldError {
    fn from(e: ParseError) -> Self {
        FieldError::Parse(e)
    }
}

/// First-order differential operator Σ coeff_i · ∂/∂var_i with expression
/// coefficients over a chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    pub chart: CoordinateChart,
    pub coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: CoordinateChart, coeffs: Vec<Expr>) -> Result<Self, FieldError> {
        assert_eq!(chart.vars.len(), coeffs.len(), "one coefficient per variable");
        for c in &coeffs {
            for v in c.free_vars() {
                if !chart.vars.contains(&v) {
                    return Err(FieldError::ChartMismatch { offending: v });
                }
            }
        }
        Ok(VectorField {
            chart,
            coeffs: coeffs.iter().map(|c| normalize_in(c, Domain::default())).collect(),
        })
    }

    pub fn coefficient(&self, v: Sym) -> &Expr {
        let idx = self
            .chart
            .vars
            .iter()
            .position(|s| *s == v)
            .expect("variable in chart");
        &self.coeffs[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_lit())
    }

    /// Applies the operator: Σ coeff_i · ∂e/∂var_i, simplified.
    pub fn apply(&self, e: &Expr) -> Result<Expr, FieldError> {
        for v in e.free_vars() {
            if !self.chart.vars.contains(&v) {
                return Err(FieldError::ChartMismatch { offending: v });
            }
        }
        let terms = self
            .chart
            .vars
            .iter()
            .zip(&self.coeffs)
            .map(|(v, c)| c.clone() * differentiate(e, *v))
            .collect();
        Ok(add(terms))
    }

    /// The commutator [X, Y]: its v-coefficient is X(Y_v) − Y(X_v).
    pub fn commutator(&self, other: &VectorField) -> Result<VectorField, FieldError> {
        if self.chart != other.chart {
            return Err(FieldError::ChartMismatch {
                offending: other.chart.dependent,
            });
        }
        let coeffs = other
            .coeffs
            .iter()
            .zip(&self.coeffs)
            .map(|(yc, xc)| Ok(self.apply(yc)? - other.apply(xc)?))
            .collect::<Result<Vec<_>, FieldError>>()?;
        VectorField::new(self.chart.clone(), coeffs)
    }

    /// Linear combination Σ weight_k · basis_k.
    pub fn combination(basis: &[VectorField], weights: &[Expr]) -> Result<VectorField, FieldError> {
        assert_eq!(basis.len(), weights.len());
        let chart = basis[0].chart.clone();
        let coeffs = (0..chart.vars.len())
            .map(|i| {
                add(basis
                    .iter()
                    .zip(weights)
                    .map(|(b, w)| w.clone() * b.coeffs[i].clone())
                    .collect())
            })
            .collect();
        VectorField::new(chart, coeffs)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (v, c) in self.chart.vars.iter().zip(&self.coeffs) {
            if c.is_zero_lit() {
                continue;
            }
            if c.is_one_lit() {
                parts.push(format!("d_{v}"));
            } else {
                let needs_parens = matches!(c, Expr::Sum(_));
                let rendered = crate::expr::render(c);
                if needs_parens {
                    parts.push(format!("({rendered})*d_{v}"));
                } else {
                    parts.push(format!("{rendered}*d_{v}"));
                }
            }
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

/// The six symmetry generators on the main chart:
/// X1 = ∂x, X2 = ∂y, X3 = ∂t, X4 = t∂t + u∂u, X5 = x∂x − u∂u,
/// X6 = y∂y − u∂u.
pub fn symmetry_basis() -> Vec<VectorField> {
    let mk = |coeffs: [&str; 4]| -> VectorField {
        let chart = CoordinateChart::main();
        let coeffs = coeffs.iter().map(|c| parse(c).unwrap()).collect();
        VectorField::new(chart, coeffs).unwrap()
    };
    vec![
        mk(["1", "0", "0", "0"]),
        mk(["0", "1", "0", "0"]),
        mk(["0", "0", "1", "0"]),
        mk(["0", "0", "t", "u"]),
        mk(["x", "0", "0", "-u"]),
        mk(["0", "y", "0", "-u"]),
    ]
}

/// The generator Σ a_k X_k for a coefficient vector over the symmetry basis.
pub fn from_element(x: &LieElement) -> VectorField {
    let basis = symmetry_basis();
    let weights: Vec<Expr> = x.0.iter().map(|q| Expr::num(q.clone())).collect();
    VectorField::combination(&basis, &weights).expect("basis shares the main chart")
}

/// Extracts exact structure constants from a concrete basis by matching
/// commutator coefficients monomial by monomial. Errors when a commutator
/// leaves the rational span of the basis.
pub fn structure_constants_from_basis(
    basis: &[VectorField],
) -> Result<StructureConstants, FieldError> {
    let n = basis.len();
    // Monomial-indexed linear system: unknown c_k with
    // Σ_k c_k · basis_k = commutator, one equation per (variable, monomial).
    let mut keys: Vec<(usize, Expr)> = Vec::new();
    let mut columns: Vec<BTreeMap<(usize, Expr), Q>> = Vec::new();
    for b in basis {
        let mut col = BTreeMap::new();
        for (vi, coeff) in b.coeffs.iter().enumerate() {
            for t in coeff.terms() {
                if t.is_zero_lit() {
                    continue;
                }
                let (q, key) = t.split_coeff();
                let k = (vi, key);
                if !keys.contains(&k) {
                    keys.push(k.clone());
                }
                *col.entry(k).or_insert_with(Q::zero) += q;
            }
        }
        columns.push(col);
    }

    let mut sc = StructureConstants::zero(n);
    for i in 0..n {
        for j in 0..n {
            let comm = basis[i].commutator(&basis[j])?;
            let mut target: BTreeMap<(usize, Expr), Q> = BTreeMap::new();
            for (vi, coeff) in comm.coeffs.iter().enumerate() {
                for t in coeff.terms() {
                    if t.is_zero_lit() {
                        continue;
                    }
                    let (q, key) = t.split_coeff();
                    let k = (vi, key);
                    if !keys.contains(&k) {
                        // The commutator contains a monomial no basis field
                        // has: cannot be in the span.
                        return Err(FieldError::OutsideSpan { i, j });
                    }
                    *target.entry(k).or_insert_with(Q::zero) += q;
                }
            }
            let vecs: Vec<Vec<Q>> = columns
                .iter()
                .map(|col| keys.iter().map(|k| col.get(k).cloned().unwrap_or_else(Q::zero)).collect())
                .collect();
            let tvec: Vec<Q> = keys
                .iter()
                .map(|k| target.get(k).cloned().unwrap_or_else(Q::zero))
                .collect();
            let sol = crate::algebra::solve_span(&vecs, &tvec)
                .ok_or(FieldError::OutsideSpan { i, j })?;
            for (k, c) in sol.into_iter().enumerate() {
                sc.set(i, j, k, c);
            }
        }
    }
    Ok(sc)
}

/// Closed-form action of the one-parameter group g_k(s) on a point of the
/// main chart:
///
/// ```text
/// g1: (x+s, y, t, u)        g4: (x, y, t·e^s, u·e^s)
/// g2: (x, y+s, t, u)        g5: (x·e^s, y, t, u·e^(−s))
/// g3: (x, y, t+s, u)        g6: (x, y·e^s, t, u·e^(−s))
/// ```
pub fn flow_point(k: usize, s: f64, p: [f64; 4]) -> [f64; 4] {
    let [x, y, t, u] = p;
    let es = s.exp();
    let ens = (-s).exp();
    match k {
        1 => [x + s, y, t, u],
        2 => [x, y + s, t, u],
        3 => [x, y, t + s, u],
        4 => [x, y, t * es, u * es],
        5 => [x * es, y, t, u * ens],
        6 => [x, y * es, t, u * ens],
        _ => panic!("generator index must be 1..=6"),
    }
}

/// Transforms a candidate solution u(x,y,t) by g_k(s): substitution plus the
/// exponential prefactor where the group scales u. The parameter may be any
/// expression (a float snapped to a rational, or a named constant).
pub fn transform_solution(k: usize, s: &Expr, u_expr: &Expr) -> Expr {
    let dom = Domain::positive();
    let sub = |v: Sym, replacement: Expr| -> Expr {
        let mut map = BTreeMap::new();
        map.insert(v, replacement);
        substitute(u_expr, &map, dom)
    };
    let e_s = Expr::exp(s.clone());
    let e_ms = Expr::exp(-s.clone());
    match k {
        1 => sub(Sym::X, Expr::var(Sym::X) - s.clone()),
        2 => sub(Sym::Y, Expr::var(Sym::Y) - s.clone()),
        3 => sub(Sym::T, Expr::var(Sym::T) - s.clone()),
        4 => e_s * sub(Sym::T, Expr::var(Sym::T) * e_ms.clone()),
        5 => e_ms.clone() * sub(Sym::X, Expr::var(Sym::X) * e_ms),
        6 => e_ms.clone() * sub(Sym::Y, Expr::var(Sym::Y) * e_ms),
        _ => panic!("generator index must be 1..=6"),
    }
}

/// Parses the CLI vector-field grammar `coef*d_var + ...` on a chart, e.g.
/// `t*d_t + u*d_u` or `d_x + y*d_y - u*d_u`.
pub fn parse_vector_field(text: &str, chart: &CoordinateChart) -> Result<VectorField, FieldError> {
    let mut coeffs: Vec<Expr> = vec![Expr::zero(); chart.vars.len()];
    let mut term = String::new();
    let mut terms: Vec<(String, bool)> = Vec::new(); // (text, negated)
    let mut depth = 0usize;
    let mut negated = false;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                term.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                term.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !term.trim().is_empty() {
                    terms.push((term.clone(), negated));
                }
                negated = ch == '-';
                term.clear();
            }
            _ => term.push(ch),
        }
    }
    if !term.trim().is_empty() {
        terms.push((term, negated));
    }

    for (ttext, neg) in terms {
        let offset = text.find(ttext.trim()).unwrap_or(0);
        // Locate the d_<var> factor.
        let mut var: Option<Sym> = None;
        let mut rest = String::new();
        for piece in ttext.split('*') {
            let p = piece.trim();
            if let Some(vname) = p.strip_prefix("d_") {
                if var.is_some() {
                    return Err(FieldError::BadTerm {
                        offset,
                        reason: "more than one d_<var> factor".into(),
                    });
                }
                let sym = Sym::from_name(vname).filter(|s| chart.vars.contains(s)).ok_or(
                    FieldError::BadTerm {
                        offset,
                        reason: format!("`d_{vname}` is not a chart direction"),
                    },
                )?;
                var = Some(sym);
            } else {
                if !rest.is_empty() {
                    rest.push('*');
                }
                rest.push_str(p);
            }
        }
        let var = var.ok_or(FieldError::BadTerm {
            offset,
            reason: "term has no d_<var> factor".into(),
        })?;
        let mut coeff = if rest.is_empty() {
            Expr::one()
        } else {
            parse(&rest)?
        };
        if neg {
            coeff = -coeff;
        }
        let idx = chart.vars.iter().position(|s| *s == var).unwrap();
        coeffs[idx] = coeffs[idx].clone() + coeff;
    }
    VectorField::new(chart.clone(), coeffs)
}

/// Parses a linear combination of basis elements, e.g. `X1 + 2*X4 - X5` or
/// `3/2*X4`, into a coefficient vector.
pub fn parse_element(text: &str, dim: usize) -> Result<LieElement, FieldError> {
    let prepared = text.replace(['X', 'V'], "#");
    let mut coeffs = vec![Q::zero(); dim];
    let mut term = String::new();
    let mut terms: Vec<(String, bool)> = Vec::new();
    let mut negated = false;
    for ch in prepared.chars() {
        match ch {
            '+' | '-' => {
                if !term.trim().is_empty() {
                    terms.push((term.clone(), negated));
                }
                negated = ch == '-';
                term.clear();
            }
            _ => term.push(ch),
        }
    }
    if !term.trim().is_empty() {
        terms.push((term, negated));
    }
    if terms.is_empty() {
        return Err(FieldError::BadTerm {
            offset: 0,
            reason: "empty element".into(),
        });
    }
    for (ttext, neg) in terms {
        let t = ttext.trim();
        let (coeff_text, idx_text) = match t.split_once('#') {
            Some((c, i)) => (c.trim().trim_end_matches('*').trim(), i.trim()),
            None => {
                return Err(FieldError::BadTerm {
                    offset: 0,
                    reason: format!("term `{t}` has no basis element"),
                })
            }
        };
        let idx: usize = idx_text.parse().map_err(|_| FieldError::BadTerm {
            offset: 0,
            reason: format!("bad basis index `{idx_text}`"),
        })?;
        if idx < 1 || idx > dim {
            return Err(FieldError::BadTerm {
                offset: 0,
                reason: format!("basis index {idx} out of range 1..={dim}"),
            });
        }
        let mut q = if coeff_text.is_empty() {
            Q::one()
        } else {
            let e = parse(coeff_text)?;
            match e.as_num() {
                Some(v) => v.clone(),
                None => {
                    return Err(FieldError::BadTerm {
                        offset: 0,
                        reason: format!("coefficient `{coeff_text}` is not rational"),
                    })
                }
            }
        };
        if neg {
            q = -q;
        }
        coeffs[idx - 1] += q;
    }
    Ok(LieElement(coeffs))
}
