//! Vectors, linear functionals, dense matrices, norms and semi-norms.
//!
//! All value types are immutable after construction and all operations are
//! pure, so everything here is safe to share across threads freely.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

const P_INF: f64 = f64::INFINITY;

// ---------------------------------------------------------------------------
// Vectors and functionals
// ---------------------------------------------------------------------------

/// A point of a finite-dimensional real space (dimension at least two).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "vectors must have dimension >= 2, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("vector entries must be finite".into()));
        }
        Ok(Vector { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// Exact zero vector test (the zero conventions key off this).
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn norm2(&self) -> f64 {
        l2(&self.coords)
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(dot(&self.coords, &other.coords))
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector { coords: self.coords.iter().map(|c| c * t).collect() }
    }

    /// `self + t * other`
    pub fn axpy(&self, t: f64, other: &Vector) -> Result<Vector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.axpy(-1.0, other)
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.coords
    }
}

/// A linear functional `f(x) = sum_i f_i x_i`, stored by its coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Functional {
    coords: Vec<f64>,
}

impl Functional {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "functionals must have dimension >= 2, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("functional entries must be finite".into()));
        }
        Ok(Functional { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    /// Evaluate the functional; linear in both the coordinates and `v`.
    pub fn apply(&self, v: &Vector) -> Result<f64> {
        check_dims(self.dim(), v.dim())?;
        Ok(dot(&self.coords, v.as_slice()))
    }

    pub(crate) fn pairing(&self, y: &[f64]) -> f64 {
        dot(&self.coords, y)
    }

    pub fn scale(&self, t: f64) -> Functional {
        Functional { coords: self.coords.iter().map(|c| c * t).collect() }
    }
}

impl TryFrom<Vec<f64>> for Functional {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Functional::new(v)
    }
}

impl From<Functional> for Vec<f64> {
    fn from(f: Functional) -> Vec<f64> {
        f.coords
    }
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRaw", into = "MatrixRaw")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

#[derive(Serialize, Deserialize)]
struct MatrixRaw {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<MatrixRaw> for Matrix {
    type Error = Error;
    fn try_from(raw: MatrixRaw) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl From<Matrix> for MatrixRaw {
    fn from(m: Matrix) -> MatrixRaw {
        MatrixRaw { rows: m.rows, cols: m.cols, data: m.data }
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidSpec("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidSpec(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("matrix entries must be finite".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidSpec("ragged matrix rows".into()));
            }
            data.extend_from_slice(row);
        }
        Matrix::new(r, c, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix::new(n, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `out = M y` on raw slices; `out.len()` must equal `rows`.
    pub fn apply_slice(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), y);
        }
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        check_dims(self.cols, v.dim())?;
        let mut out = vec![0.0; self.rows];
        self.apply_slice(v.as_slice(), &mut out);
        Vector::new(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// Gram matrix `M^T M` (cols x cols, symmetric positive semidefinite).
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut data = vec![0.0; n * n];
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..n {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                for b in 0..n {
                    data[a * n + b] += ra * row[b];
                }
            }
        }
        Matrix { rows: n, cols: n, data }
    }

    /// `self + t * other`
    pub fn add_scaled(&self, t: f64, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + t * b)
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// An evaluable norm description.
///
/// `p = infinity` is a legal `Lp` value and evaluates as `max_i |v_i|`; in
/// JSON it is written as the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Lp {
        #[serde(with = "p_value")]
        p: f64,
    },
    WeightedLp {
        #[serde(with = "p_value")]
        p: f64,
        weights: Vec<f64>,
    },
    Polyhedral {
        generators: Vec<Functional>,
    },
    Euclidean,
}

impl NormSpec {
    pub fn lp(p: f64) -> Self {
        NormSpec::Lp { p }
    }

    pub fn l1() -> Self {
        NormSpec::Lp { p: 1.0 }
    }

    pub fn l2() -> Self {
        NormSpec::Lp { p: 2.0 }
    }

    pub fn linf() -> Self {
        NormSpec::Lp { p: P_INF }
    }

    /// True iff the description defines a genuine norm: `p >= 1`, strictly
    /// positive weights, and polyhedral generators of full column rank (so
    /// that `max_i |f_i(x)|` separates points).
    pub fn is_valid_norm(&self) -> bool {
        match self {
            NormSpec::Lp { p } => *p >= 1.0,
            NormSpec::WeightedLp { p, weights } => {
                *p >= 1.0 && !weights.is_empty() && weights.iter().all(|w| w.is_finite() && *w > 0.0)
            }
            NormSpec::Polyhedral { generators } => {
                if generators.is_empty() {
                    return false;
                }
                let dim = generators[0].dim();
                if generators.iter().any(|g| g.dim() != dim) {
                    return false;
                }
                row_rank(generators) == dim
            }
            NormSpec::Euclidean => true,
        }
    }

    /// Dimension the spec is pinned to, if any.
    pub fn expected_dim(&self) -> Option<usize> {
        match self {
            NormSpec::Lp { .. } | NormSpec::Euclidean => None,
            NormSpec::WeightedLp { weights, .. } => Some(weights.len()),
            NormSpec::Polyhedral { generators } => generators.first().map(|g| g.dim()),
        }
    }

    pub(crate) fn eval_slice(&self, y: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => l2(y),
            NormSpec::Lp { p } => {
                if *p == 1.0 {
                    l1(y)
                } else if *p == 2.0 {
                    l2(y)
                } else if p.is_infinite() {
                    linf(y)
                } else {
                    lp(y, *p)
                }
            }
            NormSpec::WeightedLp { p, weights } => {
                if p.is_infinite() {
                    y.iter().zip(weights).fold(0.0, |m, (v, w)| m.max(w * v.abs()))
                } else if *p == 1.0 {
                    y.iter().zip(weights).map(|(v, w)| w * v.abs()).sum()
                } else {
                    y.iter()
                        .zip(weights)
                        .map(|(v, w)| w * v.abs().powf(*p))
                        .sum::<f64>()
                        .powf(1.0 / *p)
                }
            }
            NormSpec::Polyhedral { generators } => generators
                .iter()
                .fold(0.0, |m, g| m.max(g.pairing(y).abs())),
        }
    }

    pub fn eval(&self, v: &Vector) -> Result<f64> {
        if let Some(d) = self.expected_dim() {
            check_dims(d, v.dim())?;
        }
        Ok(self.eval_slice(v.as_slice()))
    }
}

/// Dual norm of a functional with respect to a primal norm.
///
/// Closed forms for the `lp` family; polyhedral duals are computed exactly by
/// enumerating the vertices of the primal unit ball (dimensions up to 4).
pub fn dual_norm(f: &Functional, norm: &NormSpec) -> Result<f64> {
    if let Some(d) = norm.expected_dim() {
        check_dims(d, f.dim())?;
    }
    match norm {
        NormSpec::Euclidean => Ok(l2(f.as_slice())),
        NormSpec::Lp { p } => Ok(conjugate_lp(f.as_slice(), *p)),
        NormSpec::WeightedLp { p, weights } => {
            // With u_i = w_i^{1/p} x_i the norm is plain lp of u, so the dual
            // is the conjugate lp norm of f_i w_i^{-1/p}.
            if p.is_infinite() {
                Ok(f.as_slice().iter().zip(weights).map(|(c, w)| c.abs() / w).sum())
            } else if *p == 1.0 {
                Ok(f
                    .as_slice()
                    .iter()
                    .zip(weights)
                    .fold(0.0, |m, (c, w)| m.max(c.abs() / w)))
            } else {
                let scaled: Vec<f64> = f
                    .as_slice()
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| c / w.powf(1.0 / *p))
                    .collect();
                Ok(conjugate_lp(&scaled, *p))
            }
        }
        NormSpec::Polyhedral { generators } => {
            let dim = f.dim();
            if dim > 4 {
                return Err(Error::UnsupportedDim(dim));
            }
            if !norm.is_valid_norm() {
                return Err(Error::InvalidSpec("polyhedral generators do not span the space".into()));
            }
            let verts = polyhedral_ball_vertices(generators, dim)?;
            Ok(verts
                .iter()
                .fold(0.0, |m: f64, v| m.max(f.pairing(v).abs())))
        }
    }
}

fn conjugate_lp(y: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        linf(y)
    } else if p.is_infinite() {
        l1(y)
    } else if p == 2.0 {
        l2(y)
    } else {
        lp(y, p / (p - 1.0))
    }
}

/// Vertices of `{x : |g_i(x)| <= 1 for all i}`: intersect every full-rank
/// choice of `dim` generators with sign patterns, keep the feasible points.
fn polyhedral_ball_vertices(generators: &[Functional], dim: usize) -> Result<Vec<Vec<f64>>> {
    let m = generators.len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0usize; dim];
    enumerate_combinations(m, dim, &mut idx, 0, 0, &mut |combo| {
        for signs in 0..(1usize << dim) {
            let mut a = vec![0.0; dim * dim];
            let mut b = vec![0.0; dim];
            for (r, &gi) in combo.iter().enumerate() {
                for c in 0..dim {
                    a[r * dim + c] = generators[gi].as_slice()[c];
                }
                b[r] = if signs & (1 << r) != 0 { 1.0 } else { -1.0 };
            }
            if let Some(x) = solve_dense(&mut a, &mut b, dim) {
                let feasible = generators.iter().all(|g| g.pairing(&x).abs() <= 1.0 + 1e-9);
                if feasible {
                    verts.push(x);
                }
            }
        }
    });
    if verts.is_empty() {
        return Err(Error::InvalidSpec("polyhedral unit ball has no vertices".into()));
    }
    Ok(verts)
}

fn enumerate_combinations(
    m: usize,
    k: usize,
    idx: &mut Vec<usize>,
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(idx);
        return;
    }
    for i in start..m {
        idx[depth] = i;
        enumerate_combinations(m, k, idx, depth + 1, i + 1, visit);
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-12 * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * x[c];
        }
        x[col] = s / a[col * n + col];
    }
    Some(x)
}

fn row_rank(generators: &[Functional]) -> usize {
    let m = generators.len();
    let n = generators[0].dim();
    let mut a: Vec<f64> = generators.iter().flat_map(|g| g.as_slice().to_vec()).collect();
    let scale = a.iter().fold(0.0f64, |mx, c| mx.max(c.abs())).max(1e-300);
    let mut rank = 0;
    for col in 0..n {
        let mut piv = None;
        for r in rank..m {
            if a[r * n + col].abs() > 1e-12 * scale {
                piv = Some(r);
                break;
            }
        }
        let Some(p) = piv else { continue };
        for c in 0..n {
            a.swap(rank * n + c, p * n + c);
        }
        let d = a[rank * n + col];
        for r in (rank + 1)..m {
            let factor = a[r * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= factor * a[rank * n + c];
            }
        }
        rank += 1;
        if rank == m.min(n) {
            break;
        }
    }
    rank
}

// ---------------------------------------------------------------------------
// Semi-norms
// ---------------------------------------------------------------------------

/// An evaluable semi-norm: a full norm, one coordinate's absolute value, or
/// the norm of a linear image (whose kernel may be nontrivial).
#[derive(Clone, Debug, PartialEq)]
pub enum SemiNormSpec {
    Norm(NormSpec),
    CoordinateAbs { index: usize },
    LinearImage { matrix: Matrix, inner: NormSpec },
}

impl SemiNormSpec {
    pub fn coord_abs(index: usize) -> Self {
        SemiNormSpec::CoordinateAbs { index }
    }

    /// Non-triviality: some point evaluates to a nonzero value.
    pub fn is_nontrivial(&self) -> bool {
        match self {
            SemiNormSpec::Norm(n) => n.is_valid_norm(),
            SemiNormSpec::CoordinateAbs { .. } => true,
            SemiNormSpec::LinearImage { matrix, inner } => !matrix.is_zero() && inner.is_valid_norm(),
        }
    }

    pub fn expected_dim(&self) -> Option<usize> {
        match self {
            SemiNormSpec::Norm(n) => n.expected_dim(),
            SemiNormSpec::CoordinateAbs { .. } => None,
            SemiNormSpec::LinearImage { matrix, .. } => Some(matrix.cols()),
        }
    }

    /// Smallest dimension on which the spec makes sense.
    pub fn min_dim(&self) -> usize {
        match self {
            SemiNormSpec::CoordinateAbs { index } => index + 1,
            _ => self.expected_dim().unwrap_or(2),
        }
    }

    pub(crate) fn eval_slice(&self, y: &[f64]) -> f64 {
        match self {
            SemiNormSpec::Norm(n) => n.eval_slice(y),
            SemiNormSpec::CoordinateAbs { index } => y[*index].abs(),
            SemiNormSpec::LinearImage { matrix, inner } => {
                let mut img = vec![0.0; matrix.rows()];
                matrix.apply_slice(y, &mut img);
                inner.eval_slice(&img)
            }
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let Some(d) = self.expected_dim() {
            check_dims(d, dim)?;
        }
        if dim < self.min_dim() {
            return Err(Error::DimensionMismatch { expected: self.min_dim(), got: dim });
        }
        Ok(())
    }

    /// Evaluate the semi-norm at `v`.
    pub fn eval(&self, v: &Vector) -> Result<f64> {
        self.check_dim(v.dim())?;
        Ok(self.eval_slice(v.as_slice()))
    }
}

// Serde: the six `kind` tags live in one flat JSON namespace; norm kinds map
// to `Norm(..)`, the remaining two to their own variants.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SemiExtra {
    CoordAbs { index: usize },
    LinearImage { matrix: Matrix, inner: NormSpec },
}

impl Serialize for SemiNormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SemiNormSpec::Norm(n) => n.serialize(s),
            SemiNormSpec::CoordinateAbs { index } => SemiExtra::CoordAbs { index: *index }.serialize(s),
            SemiNormSpec::LinearImage { matrix, inner } => SemiExtra::LinearImage {
                matrix: matrix.clone(),
                inner: inner.clone(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SemiNormSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let value = serde_json::Value::deserialize(d)?;
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| D::Error::custom("semi-norm spec requires a \"kind\" field"))?;
        match kind {
            "coord_abs" | "linear_image" => {
                let extra: SemiExtra = serde_json::from_value(value).map_err(D::Error::custom)?;
                Ok(match extra {
                    SemiExtra::CoordAbs { index } => SemiNormSpec::CoordinateAbs { index },
                    SemiExtra::LinearImage { matrix, inner } => SemiNormSpec::LinearImage { matrix, inner },
                })
            }
            _ => {
                let norm: NormSpec = serde_json::from_value(value).map_err(D::Error::custom)?;
                Ok(SemiNormSpec::Norm(norm))
            }
        }
    }
}

/// A finite ordered family of non-trivial semi-norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SemiNormSpec>", into = "Vec<SemiNormSpec>")]
pub struct SemiNormFamily {
    members: Vec<SemiNormSpec>,
}

impl SemiNormFamily {
    pub fn new(members: Vec<SemiNormSpec>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidSpec("semi-norm family must be non-empty".into()));
        }
        for (i, member) in members.iter().enumerate() {
            if !member.is_nontrivial() {
                return Err(Error::InvalidSpec(format!("family member {i} is a trivial semi-norm")));
            }
        }
        let pinned: Vec<usize> = members.iter().filter_map(|m| m.expected_dim()).collect();
        if pinned.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidSpec("family members pin inconsistent dimensions".into()));
        }
        Ok(SemiNormFamily { members })
    }

    pub fn single(member: SemiNormSpec) -> Result<Self> {
        Self::new(vec![member])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &SemiNormSpec {
        &self.members[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SemiNormSpec> {
        self.members.iter()
    }

    pub fn min_dim(&self) -> usize {
        self.members.iter().map(|m| m.min_dim()).max().unwrap_or(2)
    }

    /// `max_i p_i(y)`
    pub fn eval_max(&self, v: &Vector) -> Result<f64> {
        let mut best = 0.0f64;
        for m in &self.members {
            best = best.max(m.eval(v)?);
        }
        Ok(best)
    }
}

impl TryFrom<Vec<SemiNormSpec>> for SemiNormFamily {
    type Error = Error;
    fn try_from(v: Vec<SemiNormSpec>) -> Result<Self> {
        SemiNormFamily::new(v)
    }
}

impl From<SemiNormFamily> for Vec<SemiNormSpec> {
    fn from(f: SemiNormFamily) -> Vec<SemiNormSpec> {
        f.members
    }
}

// ---------------------------------------------------------------------------
// Shared numeric helpers
// ---------------------------------------------------------------------------

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l1(y: &[f64]) -> f64 {
    y.iter().map(|c| c.abs()).sum()
}

pub(crate) fn l2(y: &[f64]) -> f64 {
    y.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn linf(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m, c| m.max(c.abs()))
}

fn lp(y: &[f64], p: f64) -> f64 {
    // Scale out the largest entry so powf stays in a well-conditioned range.
    let m = linf(y);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = y.iter().map(|c| (c.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}


mod p_value {
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(p),
            Raw::Text(t) => match t.as_str() {
                "inf" | "infinity" | "Inf" | "Infinity" => Ok(f64::INFINITY),
                other => other
                    .parse::<f64>()
                    .map_err(|_| D::Error::custom(format!("invalid p value: {other}"))),
            },
        }
    }
}
