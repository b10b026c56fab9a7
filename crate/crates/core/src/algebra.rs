//! The abstract six-dimensional symmetry algebra, given by structure
//! constants: brackets of coefficient vectors, validation of the algebra
//! axioms, and the symbolic adjoint matrices `Ad(exp(s·X_i))`.
//!
//! The adjoint matrix is the exactly-summed exponential series of
//! `−s·ad(X_i)`: the minimal polynomial of `ad(X_i)` is computed over the
//! rationals, its roots give a Hermite interpolation problem whose solution
//! closes the series into polynomial and exponential entries. Matrices act
//! on coefficient column vectors: column j of `M_i` is the image of `X_j`,
//! matching the convention of the displayed proof matrices.

use crate::expr::{normalize_in, qint, substitute, Domain, Expr, Q};
use crate::sym::Sym;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Structure constants c[i][j][k] meaning [X_i, X_j] = Σ_k c[i][j][k]·X_k.
/// Indices are zero-based internally; rendering is one-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<Vec<Vec<Q>>>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum AlgebraError {
    BadIndex { line: usize },
    BadValue { line: usize, text: String },
    /// The exponential series of ad(X_i) does not close over the rationals.
    NonClosedExponential { generator: usize },
    ZeroElement,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::BadIndex { line } => write!(f, "bad index on line {line}"),
            AlgebraError::BadValue { line, text } => {
                write!(f, "bad rational value `{text}` on line {line}")
            }
            AlgebraError::NonClosedExponential { generator } => write!(
                f,
                "adjoint exponential of generator X{} does not close: minimal polynomial has irrational roots",
                generator + 1
            ),
            AlgebraError::ZeroElement => write!(f, "the zero element has no canonical form"),
        }
    }
}

impl std::error::Error for AlgebraError {}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants {
            dim,
            c: vec![vec![vec![Q::zero(); dim]; dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.c[i][j][k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Q) {
        self.c[i][j][k] = v;
    }

    /// Sets c[i][j][k] = v and c[j][i][k] = −v.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, k: usize, v: Q) {
        self.c[j][i][k] = -v.clone();
        self.c[i][j][k] = v;
    }

    /// The commutator table of the symmetry algebra: the only nonzero
    /// brackets are [X1,X5] = X1, [X2,X6] = X2, [X3,X4] = X3 and their
    /// antisymmetric counterparts. Ships as the default embedded dataset.
    pub fn table1() -> Self {
        let mut sc = StructureConstants::zero(6);
        sc.set_antisymmetric(0, 4, 0, Q::one());
        sc.set_antisymmetric(1, 5, 1, Q::one());
        sc.set_antisymmetric(2, 3, 2, Q::one());
        sc
    }

    /// Loads constants from a plain-text table: one `i j k value` entry per
    /// line, one-based indices, `#` comments allowed. Antisymmetric
    /// counterparts are not implied; every nonzero entry must be listed.
    pub fn from_text(dim: usize, text: &str) -> Result<Self, AlgebraError> {
        let mut sc = StructureConstants::zero(dim);
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let idx = |p: Option<&str>| -> Result<usize, AlgebraError> {
                let v: usize = p
                    .and_then(|x| x.parse().ok())
                    .ok_or(AlgebraError::BadIndex { line: ln + 1 })?;
                if v < 1 || v > dim {
                    return Err(AlgebraError::BadIndex { line: ln + 1 });
                }
                Ok(v - 1)
            };
            let i = idx(parts.next())?;
            let j = idx(parts.next())?;
            let k = idx(parts.next())?;
            let raw = parts.next().ok_or(AlgebraError::BadIndex { line: ln + 1 })?;
            let v = parse_rational(raw).ok_or_else(|| AlgebraError::BadValue {
                line: ln + 1,
                text: raw.to_string(),
            })?;
            sc.set(i, j, k, v);
        }
        Ok(sc)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let v = &self.c[i][j][k];
                    if !v.is_zero() {
                        out.push_str(&format!("{} {} {} {}\n", i + 1, j + 1, k + 1, v));
                    }
                }
            }
        }
        out
    }

    /// Bilinear extension of the constants: [x, y].
    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let mut out = vec![Q::zero(); self.dim];
        for i in 0..self.dim {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y.0[j].is_zero() {
                    continue;
                }
                let scale = &x.0[i] * &y.0[j];
                for k in 0..self.dim {
                    let c = &self.c[i][j][k];
                    if !c.is_zero() {
                        out[k] += c * &scale;
                    }
                }
            }
        }
        LieElement(out)
    }

    /// Checks antisymmetry and the Jacobi identity for every index tuple.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        violations.push(Violation::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for k in 0..n {
                        let mut acc = Q::zero();
                        for m in 0..n {
                            acc += &self.c[j][l][m] * &self.c[i][m][k];
                            acc += &self.c[l][i][m] * &self.c[j][m][k];
                            acc += &self.c[i][j][m] * &self.c[l][m][k];
                        }
                        if !acc.is_zero() {
                            violations.push(Violation::Jacobi { i, j, l, k });
                        }
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// The matrix of ad(X_i): entry (k, j) is the X_k coefficient of
    /// [X_i, X_j].
    pub fn ad_matrix(&self, i: usize) -> Vec<Vec<Q>> {
        let n = self.dim;
        let mut m = vec![vec![Q::zero(); n]; n];
        for j in 0..n {
            for k in 0..n {
                m[k][j] = self.c[i][j][k].clone();
            }
        }
        m
    }

    /// The symbolic matrix of `X ↦ Ad(exp(s·X_i)) X = exp(−s·ad X_i) X`.
    pub fn adjoint_matrix(&self, i: usize, s: Sym) -> Result<AdjointMatrix, AlgebraError> {
        let mut a = self.ad_matrix(i);
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        let entries = exp_matrix_symbolic(&a, s)
            .ok_or(AlgebraError::NonClosedExponential { generator: i })?;
        Ok(AdjointMatrix { param: s, entries })
    }
}

fn parse_rational(text: &str) -> Option<Q> {
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = text.trim().parse().ok()?;
        Some(Q::from_integer(n))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Violation {
    Antisymmetry { i: usize, j: usize, k: usize },
    Jacobi { i: usize, j: usize, l: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Antisymmetry { i, j, k } => write!(
                f,
                "antisymmetry violated at (i,j,k) = ({},{},{})",
                i + 1,
                j + 1,
                k + 1
            ),
            Violation::Jacobi { i, j, l, k } => write!(
                f,
                "Jacobi identity violated at (i,j,l;k) = ({},{},{};{})",
                i + 1,
                j + 1,
                l + 1,
                k + 1
            ),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Coefficient vector over the basis X_1..X_n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElement(pub Vec<Q>);

impl LieElement {
    pub fn zero(dim: usize) -> Self {
        LieElement(vec![Q::zero(); dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Q::zero(); dim];
        v[k] = Q::one();
        LieElement(v)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        LieElement(v.iter().map(|n| qint(*n)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|q| q.is_zero())
    }

    pub fn scale(&self, q: &Q) -> Self {
        LieElement(self.0.iter().map(|v| v * q).collect())
    }

    pub fn add(&self, other: &LieElement) -> Self {
        LieElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn to_exprs(&self) -> Vec<Expr> {
        self.0.iter().map(|q| Expr::num(q.clone())).collect()
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_combination(&self.to_exprs()))
    }
}

/// Renders Σ coeff_k · X_{k+1} with signs folded into the joins.
pub fn render_combination(coeffs: &[Expr]) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero_lit() {
            continue;
        }
        let (neg, mag) = match c.as_num() {
            Some(q) if q.is_negative() => (true, Expr::num(-q.clone())),
            _ => (false, c.clone()),
        };
        let piece = if mag.is_one_lit() {
            format!("X{}", k + 1)
        } else {
            let inner = crate::expr::render(&mag);
            if matches!(mag, Expr::Sum(_)) {
                format!("({inner})*X{}", k + 1)
            } else {
                format!("{inner}*X{}", k + 1)
            }
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&piece);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Square matrix of expressions in the adjoint parameter.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdjointMatrix {
    pub param: Sym,
    pub entries: Vec<Vec<Expr>>,
}

impl AdjointMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// The symbolic image of basis vector X_j (column j).
    pub fn column(&self, j: usize) -> Vec<Expr> {
        self.entries.iter().map(|row| row[j].clone()).collect()
    }

    /// Matrix-vector product with the parameter substituted. `s_value` may
    /// be any expression; with `ln(r)` for rational r > 0 the result stays
    /// exact because `e^(ln r)` collapses to `r`.
    pub fn apply(&self, s_value: &Expr, x: &[Expr]) -> Vec<Expr> {
        let mut map = BTreeMap::new();
        map.insert(self.param, s_value.clone());
        let dom = Domain::positive();
        (0..self.dim())
            .map(|r| {
                let terms: Vec<Expr> = (0..self.dim())
                    .map(|c| {
                        let entry = substitute(&self.entries[r][c], &map, dom);
                        entry * x[c].clone()
                    })
                    .collect();
                normalize_in(&crate::expr::add(terms), dom)
            })
            .collect()
    }

    /// Numeric matrix-vector product at a concrete parameter value.
    pub fn apply_f64(&self, s_value: f64, x: &[f64]) -> Vec<f64> {
        let mut b = crate::expr::Bindings::new();
        b.insert(self.param, s_value);
        (0..self.dim())
            .map(|r| {
                (0..self.dim())
                    .map(|c| {
                        crate::expr::evaluate(&self.entries[r][c], &b).unwrap_or(f64::NAN) * x[c]
                    })
                    .sum()
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Exact matrix exponential over the rationals.

fn mat_identity(n: usize) -> Vec<Vec<Q>> {
    let mut m = vec![vec![Q::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut out = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Monic minimal polynomial coefficients [c_0, …, c_{d−1}, 1] of a rational
/// matrix, found as the first linear dependence among its powers.
fn minimal_polynomial(a: &[Vec<Q>]) -> Vec<Q> {
    let n = a.len();
    let mut powers: Vec<Vec<Q>> = Vec::new();
    let mut current = mat_identity(n);
    loop {
        let flat: Vec<Q> = current.iter().flatten().cloned().collect();
        if let Some(coeffs) = express_in_span(&powers, &flat) {
            // current = Σ coeffs_j · A^j, so the minimal polynomial is
            // λ^d − Σ coeffs_j λ^j.
            let mut poly: Vec<Q> = coeffs.into_iter().map(|c| -c).collect();
            poly.push(Q::one());
            return poly;
        }
        powers.push(flat);
        current = mat_mul(&current, a);
        assert!(
            powers.len() <= n * n + 1,
            "no linear dependence among matrix powers"
        );
    }
}

/// Solves Σ x_j v_j = target exactly, if the target lies in the span.
pub(crate) fn solve_span(vectors: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    express_in_span(vectors, target)
}

fn express_in_span(vectors: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let rows = target.len();
    let cols = vectors.len();
    if cols == 0 {
        return if target.iter().all(|q| q.is_zero()) {
            Some(vec![])
        } else {
            None
        };
    }
    let mut m: Vec<Vec<Q>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Q> = (0..cols).map(|c| vectors[c][r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|r| !m[*r][col].is_zero()) else {
            pivot_rows.push(usize::MAX);
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].clone().recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..=cols {
                    let delta = &m[row][c] * &factor;
                    m[r][c] -= delta;
                }
            }
        }
        pivot_rows.push(row);
        row += 1;
    }
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut xs = vec![Q::zero(); cols];
    for (col, pr) in pivot_rows.iter().enumerate() {
        if *pr != usize::MAX {
            xs[col] = m[*pr][cols].clone();
        }
    }
    Some(xs)
}

/// Rational roots with multiplicities of a monic rational polynomial, or
/// `None` when it does not split over Q.
fn rational_roots(poly: &[Q]) -> Option<Vec<(Q, usize)>> {
    let mut lcm = BigInt::one();
    for c in poly {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = poly
        .iter()
        .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut work: Vec<Q> = poly.to_vec();
    let mut roots: Vec<(Q, usize)> = Vec::new();

    let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
    let tail = ints
        .iter()
        .find(|c| !c.is_zero())
        .cloned()
        .unwrap_or_else(BigInt::one);
    let mut candidates: Vec<Q> = vec![Q::zero()];
    for p in divisors(&tail) {
        for q in divisors(&lead) {
            let r = Q::new(p.clone(), q.clone());
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    candidates.sort();
    candidates.dedup();

    while work.len() > 1 {
        let root = candidates
            .iter()
            .find(|cand| eval_poly(&work, cand).is_zero())?
            .clone();
        let mut mult = 0;
        while work.len() > 1 && eval_poly(&work, &root).is_zero() {
            work = deflate(&work, &root);
            mult += 1;
        }
        roots.push((root, mult));
    }
    Some(roots)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    // Trial division is plenty: these integers stay tiny.
    let mut out = Vec::new();
    if let Some(small) = n.to_u64() {
        let mut d = 1u64;
        while d.saturating_mul(d) <= small {
            if small % d == 0 {
                out.push(BigInt::from(d));
                out.push(BigInt::from(small / d));
            }
            d += 1;
        }
    } else {
        out.push(BigInt::one());
        out.push(n.clone());
    }
    out.sort();
    out.dedup();
    out
}

fn eval_poly(poly: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Divides a monic polynomial by (λ − root); the remainder must vanish.
fn deflate(poly: &[Q], root: &Q) -> Vec<Q> {
    let d = poly.len() - 1;
    let mut out = vec![Q::zero(); d];
    let mut carry = Q::zero();
    for k in (0..d).rev() {
        carry = &poly[k + 1] + &carry * root;
        out[k] = carry.clone();
    }
    out
}

/// exp(s·A) for a rational matrix whose minimal polynomial splits over Q,
/// as symbolic entries in the parameter `s`.
fn exp_matrix_symbolic(a: &[Vec<Q>], s: Sym) -> Option<Vec<Vec<Expr>>> {
    let n = a.len();
    let minpoly = minimal_polynomial(a);
    let d = minpoly.len() - 1;
    if d == 0 {
        return Some(
            mat_identity(n)
                .into_iter()
                .map(|row| row.into_iter().map(Expr::num).collect())
                .collect(),
        );
    }
    let roots = rational_roots(&minpoly)?;

    // Hermite interpolation: find p(λ) = Σ c_k λ^k of degree < d with
    // p^(j)(λ_r) = s^j e^(λ_r s) for each root of multiplicity m_r, j < m_r.
    // The confluent Vandermonde matrix is rational; eliminate against the
    // symbolic right-hand sides.
    let sv = Expr::var(s);
    let mut vmat: Vec<Vec<Q>> = Vec::with_capacity(d);
    let mut rhs: Vec<Expr> = Vec::with_capacity(d);
    for (root, mult) in &roots {
        for j in 0..*mult {
            let mut row = vec![Q::zero(); d];
            for (k, slot) in row.iter_mut().enumerate() {
                if k >= j {
                    let mut ff = Q::one();
                    for step in 0..j {
                        ff *= qint((k - step) as i64);
                    }
                    *slot = ff * qpow_int(root, (k - j) as u32);
                }
            }
            vmat.push(row);
            let e_part = Expr::exp(Expr::num(root.clone()) * sv.clone());
            rhs.push(sv.clone().powi(j as i64) * e_part);
        }
    }
    let coeffs = solve_symbolic(vmat, rhs)?;

    // M = Σ_k c_k(s) · A^k
    let mut power = mat_identity(n);
    let mut entries = vec![vec![Expr::zero(); n]; n];
    for c in coeffs.iter().take(d) {
        for i in 0..n {
            for j in 0..n {
                if !power[i][j].is_zero() {
                    let add = c.clone() * Expr::num(power[i][j].clone());
                    entries[i][j] = entries[i][j].clone() + add;
                }
            }
        }
        power = mat_mul(&power, a);
    }
    Some(entries)
}

fn qpow_int(q: &Q, k: u32) -> Q {
    Q::new(q.numer().pow(k), q.denom().pow(k))
}

/// Gaussian elimination with a rational coefficient matrix and symbolic
/// right-hand sides.
fn solve_symbolic(mut m: Vec<Vec<Q>>, mut rhs: Vec<Expr>) -> Option<Vec<Expr>> {
    let d = m.len();
    for col in 0..d {
        let p = (col..d).find(|r| !m[*r][col].is_zero())?;
        m.swap(col, p);
        rhs.swap(col, p);
        let inv = m[col][col].clone().recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        rhs[col] = rhs[col].clone() * Expr::num(inv);
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c2 in 0..d {
                    let delta = &m[col][c2] * &factor;
                    m[r][c2] -= delta;
                }
                let delta = rhs[col].clone() * Expr::num(factor);
                rhs[r] = rhs[r].clone() - delta;
            }
        }
    }
    Some(rhs)
}
