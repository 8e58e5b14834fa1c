//! Constructive per-direction representatives and sphere discretization.
//!
//! Directions (projective classes of nonzero vectors) get exactly one
//! representative each: the base-norm-one vector whose first nonzero
//! coordinate is positive, optionally rescaled by a per-direction override.
//! The symmetrized set (representatives together with their negatives) is a
//! per-direction-scaled sphere and is discretized here for operator-level
//! maximizations.

use crate::spaces::{check_dims, NormSpec, Vector};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Coordinates smaller than this fraction of the largest one count as zero
/// for the sign-canonicalization rule.
const SIGN_ZERO_REL: f64 = 1e-12;

/// Angular tolerance when matching a direction against override keys.
const OVERRIDE_MATCH_TOL: f64 = 1e-9;

/// A per-direction scale attached to one projective class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleOverride {
    pub direction: Vector,
    pub scale: f64,
}

/// Constructive representative-per-direction rule: base-norm-one vectors,
/// sign-fixed, with optional per-direction scale overrides in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AdmissibleRaw", into = "AdmissibleRaw")]
pub struct AdmissibleSpec {
    base_norm: NormSpec,
    overrides: Vec<ScaleOverride>,
}

#[derive(Serialize, Deserialize)]
struct AdmissibleRaw {
    base_norm: NormSpec,
    #[serde(default)]
    overrides: Vec<ScaleOverride>,
}

impl TryFrom<AdmissibleRaw> for AdmissibleSpec {
    type Error = Error;
    fn try_from(raw: AdmissibleRaw) -> Result<Self> {
        AdmissibleSpec::new(raw.base_norm, raw.overrides)
    }
}

impl From<AdmissibleSpec> for AdmissibleRaw {
    fn from(spec: AdmissibleSpec) -> AdmissibleRaw {
        AdmissibleRaw { base_norm: spec.base_norm, overrides: spec.overrides }
    }
}

impl AdmissibleSpec {
    /// Unit sphere of `base_norm`, no overrides.
    pub fn unit_sphere(base_norm: NormSpec) -> Self {
        AdmissibleSpec { base_norm, overrides: Vec::new() }
    }

    /// Build a spec, canonicalizing every override key so that lookups are
    /// by representative direction. Scales above one are rejected: the
    /// orthogonality-space predicate relies on unscaled classes carrying the
    /// supremum.
    pub fn new(base_norm: NormSpec, overrides: Vec<ScaleOverride>) -> Result<Self> {
        if !base_norm.is_valid_norm() {
            return Err(Error::InvalidSpec("admissible base norm is not a norm".into()));
        }
        let mut spec = AdmissibleSpec { base_norm, overrides: Vec::new() };
        for o in overrides {
            if !(o.scale.is_finite() && o.scale > 0.0 && o.scale <= 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "override scale must lie in (0, 1], got {}",
                    o.scale
                )));
            }
            let dir = spec.canonical_direction(&o.direction)?;
            if spec
                .overrides
                .iter()
                .any(|existing| angular_distance_units(existing.direction.as_slice(), dir.as_slice()) <= OVERRIDE_MATCH_TOL)
            {
                return Err(Error::InvalidSpec("duplicate override direction".into()));
            }
            spec.overrides.push(ScaleOverride { direction: dir, scale: o.scale });
        }
        Ok(spec)
    }

    pub fn with_override(base_norm: NormSpec, direction: Vector, scale: f64) -> Result<Self> {
        Self::new(base_norm, vec![ScaleOverride { direction, scale }])
    }

    pub fn base_norm(&self) -> &NormSpec {
        &self.base_norm
    }

    pub fn overrides(&self) -> &[ScaleOverride] {
        &self.overrides
    }

    /// Base-norm-one, sign-canonicalized direction of `x` (no scale applied).
    ///
    /// The sign rule makes this a projective invariant: the first coordinate
    /// whose magnitude exceeds `1e-12` of the largest is made positive.
    pub fn canonical_direction(&self, x: &Vector) -> Result<Vector> {
        if x.is_zero() {
            return Err(Error::ZeroVector);
        }
        let n = self.base_norm.eval(x)?;
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut u: Vec<f64> = x.as_slice().iter().map(|c| c / n).collect();
        let scale = u.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let threshold = SIGN_ZERO_REL * scale;
        let lead = u.iter().find(|c| c.abs() > threshold).copied().unwrap_or(0.0);
        if lead < 0.0 {
            for c in &mut u {
                *c = -*c;
            }
        }
        Vector::new(u)
    }

    /// Scale attached to a canonical direction (1 unless overridden).
    pub fn scale_for(&self, canonical_dir: &Vector) -> f64 {
        for o in &self.overrides {
            if o.direction.dim() == canonical_dir.dim()
                && angular_distance_units(o.direction.as_slice(), canonical_dir.as_slice()) <= OVERRIDE_MATCH_TOL
            {
                return o.scale;
            }
        }
        1.0
    }

    /// Canonical representative together with its scale.
    pub fn canonical_with_scale(&self, x: &Vector) -> Result<(Vector, f64)> {
        let dir = self.canonical_direction(x)?;
        let s = self.scale_for(&dir);
        Ok((dir.scale(s), s))
    }

    /// The unique representative of `x`'s projective class.
    ///
    /// Idempotent, and invariant under `x -> t x` for every nonzero `t`.
    pub fn canonical_representative(&self, x: &Vector) -> Result<Vector> {
        Ok(self.canonical_with_scale(x)?.0)
    }

    /// Discretize the symmetrized representative set with angular gap at most
    /// `mesh`. Dimension 2 uses a uniform angle grid; dimension 3 a spiral
    /// lattice; higher dimensions a Kronecker sequence pushed through the
    /// normal quantile. Every emitted point comes paired with its negation,
    /// and the +/- standard basis directions are always included.
    pub fn discretize(&self, mesh: f64, dim: usize) -> Result<SymmetrizedSample> {
        if !(mesh.is_finite() && mesh > 0.0) {
            return Err(Error::InvalidMesh(format!("mesh must be positive, got {mesh}")));
        }
        if dim < 2 {
            return Err(Error::UnsupportedDim(dim));
        }
        if let Some(d) = self.base_norm.expected_dim() {
            check_dims(d, dim)?;
        }

        let mut dirs: Vec<Vec<f64>> = Vec::new();
        match dim {
            2 => {
                let half = (std::f64::consts::PI / mesh).ceil().max(2.0) as usize;
                for k in 0..half {
                    let theta = std::f64::consts::PI * (k as f64) / (half as f64);
                    dirs.push(vec![theta.cos(), theta.sin()]);
                }
            }
            3 => {
                let n = fibonacci_count(mesh)?;
                let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
                for k in 0..n {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden_angle * k as f64;
                    dirs.push(vec![r * phi.cos(), r * phi.sin(), z]);
                }
            }
            _ => {
                let n = kronecker_count(mesh, dim)?;
                let alphas = kronecker_alphas(dim);
                let mut t = vec![0.0f64; dim];
                for _ in 0..n {
                    let mut g = Vec::with_capacity(dim);
                    let mut norm_sq = 0.0;
                    for (tj, aj) in t.iter_mut().zip(&alphas) {
                        *tj = (*tj + aj).fract();
                        let q = normal_quantile(tj.clamp(1e-12, 1.0 - 1e-12));
                        norm_sq += q * q;
                        g.push(q);
                    }
                    if norm_sq.sqrt() > 1e-9 {
                        let inv = 1.0 / norm_sq.sqrt();
                        for c in &mut g {
                            *c *= inv;
                        }
                        dirs.push(g);
                    }
                }
            }
        }
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            dirs.push(e);
        }

        let mut points = Vec::with_capacity(2 * dirs.len());
        for d in dirs {
            let dv = Vector::new(d)?;
            let canon = self.canonical_direction(&dv)?;
            let s = self.scale_for(&canon);
            let n = self.base_norm.eval(&dv)?;
            let p = dv.scale(s / n);
            let neg = p.scale(-1.0);
            points.push(p);
            points.push(neg);
        }

        Ok(SymmetrizedSample { spec: self.clone(), points, mesh })
    }
}

fn fibonacci_count(mesh: f64) -> Result<usize> {
    // Empirically the spiral's covering radius is below 2.6/sqrt(n).
    let n = ((2.6 / mesh).powi(2)).ceil();
    if n > 2.0e7 {
        return Err(Error::InvalidMesh(format!("mesh {mesh} needs {n} points in dimension 3")));
    }
    Ok((n as usize).max(16))
}

fn kronecker_count(mesh: f64, dim: usize) -> Result<usize> {
    let n = (3.0 / mesh).powi(dim as i32 - 1).ceil();
    if n > 2.0e7 {
        return Err(Error::InvalidMesh(format!("mesh {mesh} needs {n} points in dimension {dim}")));
    }
    Ok((n as usize).max(64))
}

/// Kronecker direction from the generalized golden ratio: the real root of
/// x^(d+1) = x + 1.
fn kronecker_alphas(dim: usize) -> Vec<f64> {
    let d = dim as f64;
    let mut phi = 1.5f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d + 1.0));
    }
    (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect()
}

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; relative error well below 1e-9).
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let plow = 0.02425;
    let x = if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // One Halley step against erfc for extra digits.
    let e = 0.5 * erfc_approx(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

fn erfc_approx(x: f64) -> f64 {
    // Numerical Recipes style rational Chebyshev fit, ~1e-7 accurate.
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Finite negation-closed discretization of the scaled representative set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetrizedSample {
    spec: AdmissibleSpec,
    points: Vec<Vector>,
    mesh: f64,
}

impl SymmetrizedSample {
    pub fn spec(&self) -> &AdmissibleSpec {
        &self.spec
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.dim())
    }
}

/// Angle between the lines spanned by `x` and `y`, in radians (in `[0, pi/2]`).
pub fn projective_angle(x: &Vector, y: &Vector) -> Result<f64> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroVector);
    }
    check_dims(x.dim(), y.dim())?;
    let nx = x.norm2();
    let ny = y.norm2();
    let u: Vec<f64> = x.as_slice().iter().map(|c| c / nx).collect();
    let v: Vec<f64> = y.as_slice().iter().map(|c| c / ny).collect();
    let mut d_minus = 0.0;
    let mut d_plus = 0.0;
    for (a, b) in u.iter().zip(&v) {
        d_minus += (a - b) * (a - b);
        d_plus += (a + b) * (a + b);
    }
    let chord = d_minus.min(d_plus).sqrt();
    Ok(2.0 * (0.5 * chord).clamp(-1.0, 1.0).asin())
}

/// True iff `y = t x` for some nonzero `t`, up to angular tolerance `tol`.
pub fn projectively_equal(x: &Vector, y: &Vector, tol: f64) -> Result<bool> {
    Ok(projective_angle(x, y)? <= tol)
}

/// Plain (non-projective) angular distance between two directions.
fn angular_distance_units(u: &[f64], v: &[f64]) -> f64 {
    let nu = crate::spaces::l2(u);
    let nv = crate::spaces::l2(v);
    if nu == 0.0 || nv == 0.0 {
        return std::f64::consts::PI;
    }
    let mut chord_sq = 0.0;
    for (a, b) in u.iter().zip(v) {
        let d = a / nu - b / nv;
        chord_sq += d * d;
    }
    2.0 * (0.5 * chord_sq.sqrt()).clamp(-1.0, 1.0).asin()
}
