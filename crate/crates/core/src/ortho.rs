//! Vector-level orthogonality in a normed space.
//!
//! Two independent routes are provided and cross-checked elsewhere:
//! the definitional route minimizes `||x + t y||` along the line (a convex
//! one-dimensional problem), and the supporting-functional route tests
//! whether some norm-one functional peaks at `x` and kills `y`. The general
//! orthogonality-space predicate layers per-direction representative scaling
//! on top of the definitional route.
//!
//! All functions are pure; random probing uses per-index seeded substreams,
//! so concurrent callers see identical results in any evaluation order.

use crate::admissible::AdmissibleSpec;
use crate::search::golden_min;
use crate::spaces::{check_dims, dual_norm, Functional, NormSpec, Vector};
use crate::tol::{GuardBand, TriState, Verdict};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Restriction of the line parameter in one-dimensional minimizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineDomain {
    Full,
    NonNeg,
    NonPos,
}

/// Result of minimizing `t -> ||x + t y||` over a domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineMinimum {
    pub lambda: f64,
    pub value: f64,
}

/// Minimize the convex map `t -> ||x + t y||` over the domain.
///
/// Outside `|t| <= 2||x||/||y||` the value already exceeds `||x||`, so the
/// search bracket is that interval intersected with the domain; a global
/// minimizer always survives golden-section on a convex function.
pub fn minimize_along_line(
    x: &Vector,
    y: &Vector,
    norm: &NormSpec,
    domain: LineDomain,
) -> Result<LineMinimum> {
    check_dims(x.dim(), y.dim())?;
    let ny = norm.eval(y)?;
    if ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let nx = norm.eval(x)?;
    minimize_scalar_line(nx, ny, domain, |t| {
        let probe: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| a + t * b)
            .collect();
        norm.eval_slice(&probe)
    })
}

pub(crate) fn minimize_scalar_line(
    value_at_zero: f64,
    direction_scale: f64,
    domain: LineDomain,
    eval: impl Fn(f64) -> f64,
) -> Result<LineMinimum> {
    let bound = 2.0 * value_at_zero / direction_scale;
    let (a, b) = match domain {
        LineDomain::Full => (-bound, bound),
        LineDomain::NonNeg => (0.0, bound),
        LineDomain::NonPos => (-bound, 0.0),
    };
    if bound == 0.0 {
        return Ok(LineMinimum { lambda: 0.0, value: eval(0.0) });
    }
    let x_tol = 1e-12 * bound.max(1e-300);
    let (lambda, value) = golden_min(a, b, 200, x_tol, eval);
    Ok(LineMinimum { lambda, value })
}

/// Definitional orthogonality: `||x|| <= ||x + t y||` for every scalar `t`.
///
/// The margin is the normalized drop `(||x|| - min_t ||x + t y||) / ||x||`;
/// zero inputs are orthogonal by convention.
pub fn bj_orthogonal(x: &Vector, y: &Vector, norm: &NormSpec, band: GuardBand) -> Result<TriState> {
    check_dims(x.dim(), y.dim())?;
    if x.is_zero() || y.is_zero() {
        return Ok(TriState::orthogonal(0.0));
    }
    let nx = norm.eval(x)?;
    let min = minimize_along_line(x, y, norm, LineDomain::Full)?;
    let margin = ((nx - min.value) / nx).max(0.0);
    Ok(band.classify(margin))
}

/// One-sided memberships: drops of `||x + t y||` over `t >= 0` and `t <= 0`.
///
/// A verdict of `Orthogonal` on a side means membership holds there (the
/// norm never dips below `||x||` on that half-line).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeMembership {
    pub in_plus: TriState,
    pub in_minus: TriState,
}

impl ConeMembership {
    pub fn both_hold(&self) -> bool {
        self.in_plus.is_orthogonal() && self.in_minus.is_orthogonal()
    }
}

pub fn cone_membership(x: &Vector, y: &Vector, norm: &NormSpec, band: GuardBand) -> Result<ConeMembership> {
    check_dims(x.dim(), y.dim())?;
    if x.is_zero() || y.is_zero() {
        return Ok(ConeMembership {
            in_plus: TriState::orthogonal(0.0),
            in_minus: TriState::orthogonal(0.0),
        });
    }
    let nx = norm.eval(x)?;
    let plus = minimize_along_line(x, y, norm, LineDomain::NonNeg)?;
    let minus = minimize_along_line(x, y, norm, LineDomain::NonPos)?;
    Ok(ConeMembership {
        in_plus: band.classify(((nx - plus.value) / nx).max(0.0)),
        in_minus: band.classify(((nx - minus.value) / nx).max(0.0)),
    })
}

/// The set of norming functionals at a point: everything of dual norm one
/// that attains the norm at `x`, represented by its extreme points.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet {
    extremes: Vec<Functional>,
}

/// Shape of a support set, derived from its extreme-point count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportKind {
    UniquePoint,
    Segment,
    Face,
}

impl SupportSet {
    pub fn extremes(&self) -> &[Functional] {
        &self.extremes
    }

    pub fn kind(&self) -> SupportKind {
        match self.extremes.len() {
            0 | 1 => SupportKind::UniquePoint,
            2 => SupportKind::Segment,
            _ => SupportKind::Face,
        }
    }

    /// Range of `f(y)` over the (convex) set: extremes suffice.
    pub fn pairing_range(&self, y: &Vector) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for f in &self.extremes {
            let v = f.apply(y)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }
}

/// Extreme points of the supporting face at `x`.
///
/// Closed forms: the duality map for smooth `lp`, active coordinates for
/// `l1`/`linf`, sign-adjusted active generators for polyhedral norms.
/// Weighted norms are not covered and report `UnsupportedNorm`.
pub fn supporting_functionals(x: &Vector, norm: &NormSpec) -> Result<SupportSet> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let nx = norm.eval(x)?;
    let coords = x.as_slice();
    let extremes: Vec<Functional> = match norm {
        NormSpec::Euclidean => vec![Functional::new(coords.iter().map(|c| c / nx).collect())?],
        NormSpec::Lp { p } if *p == 2.0 => {
            vec![Functional::new(coords.iter().map(|c| c / nx).collect())?]
        }
        NormSpec::Lp { p } if *p == 1.0 => {
            // f_i = sign(x_i) where x_i != 0, and any of +/-1 elsewhere.
            let active: Vec<Option<f64>> = coords
                .iter()
                .map(|c| {
                    if c.abs() > 1e-14 * nx {
                        Some(c.signum())
                    } else {
                        None
                    }
                })
                .collect();
            let free: Vec<usize> = active
                .iter()
                .enumerate()
                .filter_map(|(i, a)| a.is_none().then_some(i))
                .collect();
            let mut out = Vec::with_capacity(1 << free.len());
            for mask in 0..(1usize << free.len()) {
                let mut f: Vec<f64> = active.iter().map(|a| a.unwrap_or(0.0)).collect();
                for (bit, &i) in free.iter().enumerate() {
                    f[i] = if mask & (1 << bit) != 0 { 1.0 } else { -1.0 };
                }
                out.push(Functional::new(f)?);
            }
            out
        }
        NormSpec::Lp { p } if p.is_infinite() => {
            // One extreme per coordinate attaining the max.
            let mut out = Vec::new();
            for (i, c) in coords.iter().enumerate() {
                if c.abs() >= nx - 1e-9 * nx {
                    let mut f = vec![0.0; coords.len()];
                    f[i] = c.signum();
                    out.push(Functional::new(f)?);
                }
            }
            out
        }
        NormSpec::Lp { p } if *p > 1.0 => {
            // Duality map: f_i = sign(x_i) |x_i|^(p-1) / ||x||^(p-1).
            let f: Vec<f64> = coords
                .iter()
                .map(|c| c.signum() * (c.abs() / nx).powf(p - 1.0))
                .collect();
            vec![Functional::new(f)?]
        }
        NormSpec::Polyhedral { generators } => {
            let mut out = Vec::new();
            for g in generators {
                let v = g.pairing(coords);
                if v.abs() >= nx - 1e-9 * nx.max(1.0) {
                    out.push(g.scale(v.signum()));
                }
            }
            out
        }
        _ => return Err(Error::UnsupportedNorm),
    };
    // Drop near-duplicate extremes so the kind classification is stable.
    let mut dedup: Vec<Functional> = Vec::new();
    for f in extremes {
        let dup = dedup.iter().any(|g| {
            f.as_slice()
                .iter()
                .zip(g.as_slice())
                .all(|(a, b)| (a - b).abs() <= 1e-9)
        });
        if !dup {
            dedup.push(f);
        }
    }
    if dedup.is_empty() {
        return Err(Error::InvalidSpec("no supporting functional found".into()));
    }
    Ok(SupportSet { extremes: dedup })
}

/// Functional-route orthogonality: some norming functional at `x` kills `y`,
/// i.e. zero lies in the pairing range of the support set.
///
/// The margin is the distance of zero to that range, normalized by `||y||`.
/// Pairing margins scale differently from definitional drops (quadratically
/// for smooth norms), so callers should classify them with
/// [`GuardBand::SUPPORT`].
pub fn james_orthogonal(x: &Vector, y: &Vector, norm: &NormSpec, band: GuardBand) -> Result<TriState> {
    check_dims(x.dim(), y.dim())?;
    if x.is_zero() || y.is_zero() {
        return Ok(TriState::orthogonal(0.0));
    }
    let support = supporting_functionals(x, norm)?;
    let (lo, hi) = support.pairing_range(y)?;
    let ny = norm.eval(y)?;
    let dist = if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    };
    Ok(band.classify(dist / ny))
}

/// A point is smooth when its supporting face degenerates to one functional.
pub fn is_smooth_point(x: &Vector, norm: &NormSpec) -> Result<bool> {
    let support = supporting_functionals(x, norm)?;
    let exts = support.extremes();
    let first = &exts[0];
    Ok(exts.iter().all(|f| {
        f.as_slice()
            .iter()
            .zip(first.as_slice())
            .all(|(a, b)| (a - b).abs() <= 1e-9)
    }))
}

/// Outcome of the right-additivity probe.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome {
    Pass { triples_tested: usize },
    Counterexample { x: Vector, y: Vector, z: Vector },
}

/// Search for a failure of right additivity: `x _|_ y` and `x _|_ z` but not
/// `x _|_ (y + z)`.
///
/// Construction of candidate triples: draw `x` and two raw vectors, then
/// orthogonalize each raw vector against `x` using distinct extreme
/// functionals where the support face has them (that is where additivity can
/// break). The deterministic triple `(1,1),(1,0),(0,1)` is probed first in
/// dimension 2. Every candidate is re-validated with the definitional test
/// before it counts. Substreams are keyed by `seed` and the triple index, so
/// the search is reproducible and order-insensitive.
pub fn right_additivity_probe(
    norm: &NormSpec,
    dim: usize,
    count: usize,
    seed: u64,
    band: GuardBand,
) -> Result<ProbeOutcome> {
    if dim < 2 {
        return Err(Error::UnsupportedDim(dim));
    }
    enum TripleOutcome {
        Skipped,
        Additive,
        Failure,
    }
    let consider = |x: &Vector, y: &Vector, z: &Vector| -> Result<TripleOutcome> {
        let xy = bj_orthogonal(x, y, norm, band)?;
        let xz = bj_orthogonal(x, z, norm, band)?;
        if !(xy.is_orthogonal() && xz.is_orthogonal()) {
            return Ok(TripleOutcome::Skipped);
        }
        let sum = y.add(z)?;
        let xs = bj_orthogonal(x, &sum, norm, band)?;
        if xs.is_not_orthogonal() {
            return Ok(TripleOutcome::Failure);
        }
        Ok(TripleOutcome::Additive)
    };

    let mut tested = 0usize;
    if dim == 2 {
        let x = Vector::from_slice(&[1.0, 1.0])?;
        let y = Vector::from_slice(&[1.0, 0.0])?;
        let z = Vector::from_slice(&[0.0, 1.0])?;
        match consider(&x, &y, &z)? {
            TripleOutcome::Failure => return Ok(ProbeOutcome::Counterexample { x, y, z }),
            TripleOutcome::Additive => tested += 1,
            TripleOutcome::Skipped => {}
        }
    }

    let attempts_cap = count.saturating_mul(50).max(count);
    for index in 0..attempts_cap {
        if tested >= count {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let x = draw_probe_point(&mut rng, dim)?;
        let v1 = draw_nonzero(&mut rng, dim)?;
        let v2 = draw_nonzero(&mut rng, dim)?;
        let Some((y, z)) = orthogonal_pair_against(&x, &v1, &v2, norm)? else {
            continue;
        };
        match consider(&x, &y, &z)? {
            TripleOutcome::Failure => return Ok(ProbeOutcome::Counterexample { x, y, z }),
            TripleOutcome::Additive => tested += 1,
            TripleOutcome::Skipped => {}
        }
    }
    Ok(ProbeOutcome::Pass { triples_tested: tested })
}

fn draw_nonzero(rng: &mut ChaCha8Rng, dim: usize) -> Result<Vector> {
    loop {
        let coords: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let v = Vector::new(coords)?;
        if v.norm2() >= 1e-6 {
            return Ok(v);
        }
    }
}

/// Draw a point that hits non-smooth loci with positive probability: one
/// third plain, one third with zeroed coordinates (faces of the l1 ball),
/// one third with tied top magnitudes (faces of the sup-norm ball). Generic
/// draws almost surely miss all of these.
pub(crate) fn draw_probe_point(rng: &mut ChaCha8Rng, dim: usize) -> Result<Vector> {
    loop {
        let mut coords: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        match rng.random_range(0..3u8) {
            1 => {
                let keep = rng.random_range(0..dim);
                for (i, c) in coords.iter_mut().enumerate() {
                    if i != keep && rng.random_bool(0.6) {
                        *c = 0.0;
                    }
                }
            }
            2 => {
                let m = coords.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(0.2);
                let i = rng.random_range(0..dim);
                let mut j = rng.random_range(0..dim);
                while j == i {
                    j = rng.random_range(0..dim);
                }
                let si = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let sj = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                coords[i] = m * si;
                coords[j] = m * sj;
            }
            _ => {}
        }
        let v = Vector::new(coords)?;
        if v.norm2() >= 1e-6 {
            return Ok(v);
        }
    }
}

/// Build `y`, `z` orthogonal to `x` from raw directions, preferring distinct
/// extreme functionals of the support face.
pub(crate) fn orthogonal_pair_against(
    x: &Vector,
    v1: &Vector,
    v2: &Vector,
    norm: &NormSpec,
) -> Result<Option<(Vector, Vector)>> {
    match supporting_functionals(x, norm) {
        Ok(support) => {
            let exts = support.extremes();
            let f = &exts[0];
            let g = exts.last().unwrap_or(f);
            let nx = norm.eval(x)?;
            let y = v1.axpy(-f.apply(v1)? / nx, x)?;
            let z = v2.axpy(-g.apply(v2)? / nx, x)?;
            if y.norm2() < 1e-9 || z.norm2() < 1e-9 {
                return Ok(None);
            }
            Ok(Some((y, z)))
        }
        Err(Error::UnsupportedNorm) => {
            let y = orthogonalize_by_line_search(x, v1, norm)?;
            let z = orthogonalize_by_line_search(x, v2, norm)?;
            Ok(y.zip(z))
        }
        Err(e) => Err(e),
    }
}

/// Produce a direction orthogonal to `x` out of the raw direction `v`.
///
/// Uses a supporting functional where one is available (pairing residual at
/// rounding scale) and falls back to bisection on the line minimizer, which
/// only localizes the boundary to about the square root of machine epsilon.
pub(crate) fn make_orthogonal_direction(x: &Vector, v: &Vector, norm: &NormSpec) -> Result<Option<Vector>> {
    match supporting_functionals(x, norm) {
        Ok(support) => {
            let f = &support.extremes()[0];
            let nx = norm.eval(x)?;
            let w = v.axpy(-f.apply(v)? / nx, x)?;
            if w.norm2() < 1e-9 {
                Ok(None)
            } else {
                Ok(Some(w))
            }
        }
        Err(Error::UnsupportedNorm) => orthogonalize_by_line_search(x, v, norm),
        Err(e) => Err(e),
    }
}

/// Find `t` with `x _|_ (v - t x)` by bisecting on the sign of the line
/// minimizer; works for any valid norm.
pub(crate) fn orthogonalize_by_line_search(x: &Vector, v: &Vector, norm: &NormSpec) -> Result<Option<Vector>> {
    let nx = norm.eval(x)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let minimizer_sign = |t: f64| -> Result<f64> {
        let w = v.axpy(-t, x)?;
        if w.norm2() < 1e-12 {
            return Ok(0.0);
        }
        Ok(minimize_along_line(x, &w, norm, LineDomain::Full)?.lambda)
    };
    let mut lo = -1.0;
    let mut hi = 1.0;
    let scale = norm.eval(v)? / nx;
    for _ in 0..60 {
        if minimizer_sign(lo * scale.max(1.0))? <= 0.0 {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..60 {
        if minimizer_sign(hi * scale.max(1.0))? >= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    let s = scale.max(1.0);
    let (mut a, mut b) = (lo * s, hi * s);
    let (fa, fb) = (minimizer_sign(a)?, minimizer_sign(b)?);
    if fa > 0.0 || fb < 0.0 {
        return Ok(None);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = minimizer_sign(m)?;
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fm < 0.0 {
            a = m;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-14 * s.max(1.0) {
            break;
        }
    }
    let t = 0.5 * (a + b);
    let w = v.axpy(-t, x)?;
    if w.norm2() < 1e-9 {
        return Ok(None);
    }
    Ok(Some(w))
}

/// Functional families over which the general orthogonality predicate is
/// defined; currently the unit sphere of the dual space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalFamily {
    UnitDualSphere,
}

/// An orthogonality space: a norm (inducing the topology), a functional
/// family, and a representative-per-direction rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoSpaceSpec {
    pub norm: NormSpec,
    #[serde(default = "default_family")]
    pub family: FunctionalFamily,
    pub admissible: AdmissibleSpec,
}

fn default_family() -> FunctionalFamily {
    FunctionalFamily::UnitDualSphere
}

impl OrthoSpaceSpec {
    /// Unit-sphere representatives over `norm`, dual-sphere family.
    pub fn standard(norm: NormSpec) -> Self {
        let admissible = AdmissibleSpec::unit_sphere(norm.clone());
        OrthoSpaceSpec { norm, family: FunctionalFamily::UnitDualSphere, admissible }
    }
}

/// General orthogonality-space predicate.
///
/// Zero inputs are orthogonal by convention. For nonzero inputs the
/// representative of `x`'s class is computed; a class scaled below one can
/// never attain the family supremum, so the verdict is `NotOrthogonal` with
/// margin `1 - scale`. Unscaled classes reduce to the definitional test.
pub fn ortho_space_orthogonal(
    x: &Vector,
    y: &Vector,
    space: &OrthoSpaceSpec,
    band: GuardBand,
) -> Result<TriState> {
    check_dims(x.dim(), y.dim())?;
    if x.is_zero() || y.is_zero() {
        return Ok(TriState::orthogonal(0.0));
    }
    let (_, scale) = space.admissible.canonical_with_scale(x)?;
    let deficit = 1.0 - scale;
    let classified = band.classify(deficit);
    match classified.verdict {
        Verdict::Orthogonal => bj_orthogonal(x, y, &space.norm, band),
        _ => Ok(TriState { verdict: classified.verdict, margin: deficit }),
    }
}

/// Support-correctness check used by tests: each extreme attains the norm at
/// `x` and has dual norm one. Returns the worst absolute deviation.
pub fn support_set_defect(x: &Vector, norm: &NormSpec) -> Result<f64> {
    let nx = norm.eval(x)?;
    let support = supporting_functionals(x, norm)?;
    let mut worst = 0.0f64;
    for f in support.extremes() {
        worst = worst.max((f.apply(x)? - nx).abs() / nx.max(1.0));
        worst = worst.max((dual_norm(f, norm)? - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BAND: GuardBand = GuardBand::VECTOR;
    const JBAND: GuardBand = GuardBand::SUPPORT;

    fn v(coords: &[f64]) -> Vector {
        Vector::from_slice(coords).unwrap()
    }

    #[test]
    fn line_minimum_examples() {
        // Orthogonal axes: minimizer at zero.
        let m = minimize_along_line(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &NormSpec::l2(), LineDomain::Full).unwrap();
        assert!(m.lambda.abs() < 1e-5);
        assert!((m.value - 1.0).abs() < 1e-10);

        // Analytic minimum of ||(1,0) + t(1,1)||_2 at t = -1/2.
        let m = minimize_along_line(&v(&[1.0, 0.0]), &v(&[1.0, 1.0]), &NormSpec::l2(), LineDomain::Full).unwrap();
        assert!((m.lambda + 0.5).abs() < 1e-5);
        assert!((m.value - 0.5f64.sqrt()).abs() < 1e-10);

        // Brute-force grid oracle agrees.
        let mut grid_best = f64::INFINITY;
        let mut t = -2.0;
        while t <= 2.0 {
            let val = NormSpec::l2().eval(&v(&[1.0 + t, t])).unwrap();
            grid_best = grid_best.min(val);
            t += 1e-4;
        }
        assert!((m.value - grid_best).abs() < 1e-7);

        // Plateau on the non-negative side for linf.
        let m = minimize_along_line(&v(&[1.0, 1.0]), &v(&[1.0, 0.0]), &NormSpec::linf(), LineDomain::NonNeg).unwrap();
        assert!(m.lambda.abs() < 1e-9);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_minimization_rejects_zero_direction() {
        let err = minimize_along_line(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]), &NormSpec::l2(), LineDomain::Full);
        assert!(matches!(err, Err(Error::ZeroVector)));
    }

    #[test]
    fn bj_examples() {
        let r = bj_orthogonal(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &NormSpec::l1(), BAND).unwrap();
        assert!(r.is_orthogonal());

        let r = bj_orthogonal(&v(&[1.0, 0.0]), &v(&[1.0, 1.0]), &NormSpec::l2(), BAND).unwrap();
        assert!(r.is_not_orthogonal());
        assert!((r.margin - (1.0 - 0.5f64.sqrt())).abs() < 1e-9);

        let r = bj_orthogonal(&v(&[1.0, 1.0]), &v(&[1.0, -1.0]), &NormSpec::linf(), BAND).unwrap();
        assert!(r.is_orthogonal());
    }

    #[test]
    fn bj_zero_conventions() {
        let zero = v(&[0.0, 0.0]);
        let any = v(&[3.0, -1.0]);
        assert!(bj_orthogonal(&zero, &any, &NormSpec::l2(), BAND).unwrap().is_orthogonal());
        assert!(bj_orthogonal(&any, &zero, &NormSpec::l2(), BAND).unwrap().is_orthogonal());
    }

    #[test]
    fn self_orthogonality_fails_for_nonzero() {
        let r = bj_orthogonal(&v(&[1.0, 2.0]), &v(&[1.0, 2.0]), &NormSpec::l2(), BAND).unwrap();
        assert!(r.is_not_orthogonal());
        assert!((r.margin - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cone_membership_examples() {
        let m = cone_membership(&v(&[1.0, 0.0]), &v(&[1.0, 0.0]), &NormSpec::l2(), BAND).unwrap();
        assert!(m.in_plus.is_orthogonal());
        assert!(m.in_minus.is_not_orthogonal());

        let m = cone_membership(&v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), &NormSpec::l2(), BAND).unwrap();
        assert!(m.in_plus.is_not_orthogonal());
        assert!(m.in_minus.is_orthogonal());

        let m = cone_membership(&v(&[1.0, 1.0]), &v(&[1.0, -1.0]), &NormSpec::linf(), BAND).unwrap();
        assert!(m.both_hold());
    }

    #[test]
    fn support_set_examples() {
        let s = supporting_functionals(&v(&[0.6, 0.8]), &NormSpec::l2()).unwrap();
        assert_eq!(s.kind(), SupportKind::UniquePoint);
        assert!((s.extremes()[0].as_slice()[0] - 0.6).abs() < 1e-12);
        assert!((s.extremes()[0].as_slice()[1] - 0.8).abs() < 1e-12);

        let s = supporting_functionals(&v(&[1.0, 1.0]), &NormSpec::linf()).unwrap();
        assert_eq!(s.kind(), SupportKind::Segment);
        let mut exts: Vec<Vec<f64>> = s.extremes().iter().map(|f| f.as_slice().to_vec()).collect();
        exts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(exts, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let s = supporting_functionals(&v(&[1.0, 0.0]), &NormSpec::l1()).unwrap();
        assert_eq!(s.kind(), SupportKind::Segment);
        let mut exts: Vec<Vec<f64>> = s.extremes().iter().map(|f| f.as_slice().to_vec()).collect();
        exts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(exts, vec![vec![1.0, -1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn support_sets_are_norming() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let norms = [
            NormSpec::l1(),
            NormSpec::l2(),
            NormSpec::linf(),
            NormSpec::lp(1.5),
            NormSpec::lp(3.0),
            NormSpec::Euclidean,
        ];
        for dim in [2usize, 3] {
            for norm in &norms {
                for _ in 0..50 {
                    let coords: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
                    let x = Vector::new(coords).unwrap();
                    if x.norm2() < 1e-3 {
                        continue;
                    }
                    let defect = support_set_defect(&x, norm).unwrap();
                    assert!(defect <= 1e-9, "support defect {defect} for {norm:?} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn james_examples() {
        let r = james_orthogonal(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &NormSpec::l2(), JBAND).unwrap();
        assert!(r.is_orthogonal());

        let r = james_orthogonal(&v(&[1.0, 1.0]), &v(&[1.0, 0.0]), &NormSpec::linf(), JBAND).unwrap();
        assert!(r.is_orthogonal());

        let r = james_orthogonal(&v(&[1.0, 0.0]), &v(&[1.0, 1.0]), &NormSpec::l2(), JBAND).unwrap();
        assert!(r.is_not_orthogonal());
    }

    #[test]
    fn smoothness_examples() {
        assert!(is_smooth_point(&v(&[0.3, -0.4]), &NormSpec::l2()).unwrap());
        assert!(!is_smooth_point(&v(&[1.0, 1.0]), &NormSpec::linf()).unwrap());
        assert!(is_smooth_point(&v(&[1.0, 0.5]), &NormSpec::linf()).unwrap());
    }

    #[test]
    fn probe_finds_linf_counterexample_with_seeded_triple() {
        let out = right_additivity_probe(&NormSpec::linf(), 2, 10, 1, BAND).unwrap();
        match out {
            ProbeOutcome::Counterexample { x, y, z } => {
                assert_eq!(x.as_slice(), &[1.0, 1.0]);
                assert_eq!(y.as_slice(), &[1.0, 0.0]);
                assert_eq!(z.as_slice(), &[0.0, 1.0]);
            }
            ProbeOutcome::Pass { .. } => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn probe_passes_on_euclidean() {
        let out = right_additivity_probe(&NormSpec::l2(), 3, 300, 2, BAND).unwrap();
        assert!(matches!(out, ProbeOutcome::Pass { triples_tested } if triples_tested >= 300));
    }

    #[test]
    fn probe_finds_l1_counterexample_and_fixture_is_stable() {
        let out = right_additivity_probe(&NormSpec::l1(), 2, 1000, 3, BAND).unwrap();
        assert!(matches!(out, ProbeOutcome::Counterexample { .. }));

        // Pinned regression triple: x=(1,0), y=(1,2), z=(1,-2). Both y and z
        // satisfy |w1| <= |w2| (orthogonal to x in l1) but their sum (2,0)
        // does not.
        let x = v(&[1.0, 0.0]);
        let y = v(&[1.0, 2.0]);
        let z = v(&[1.0, -2.0]);
        assert!(bj_orthogonal(&x, &y, &NormSpec::l1(), BAND).unwrap().is_orthogonal());
        assert!(bj_orthogonal(&x, &z, &NormSpec::l1(), BAND).unwrap().is_orthogonal());
        let sum = y.add(&z).unwrap();
        assert!(bj_orthogonal(&x, &sum, &NormSpec::l1(), BAND).unwrap().is_not_orthogonal());
    }

    #[test]
    fn probe_supports_weighted_norms_via_line_search() {
        let norm = NormSpec::WeightedLp { p: 2.0, weights: vec![1.0, 2.0] };
        let out = right_additivity_probe(&norm, 2, 50, 4, BAND).unwrap();
        assert!(matches!(out, ProbeOutcome::Pass { .. }));
    }

    #[test]
    fn ortho_space_examples() {
        let plain = OrthoSpaceSpec::standard(NormSpec::l2());
        let r = ortho_space_orthogonal(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &plain, BAND).unwrap();
        assert!(r.is_orthogonal());

        let scaled = OrthoSpaceSpec {
            norm: NormSpec::l2(),
            family: FunctionalFamily::UnitDualSphere,
            admissible: AdmissibleSpec::with_override(NormSpec::l2(), v(&[1.0, 0.0]), 0.5).unwrap(),
        };
        // Scaled class: the space predicate refuses even though the
        // definitional test accepts.
        let bj = bj_orthogonal(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &NormSpec::l2(), BAND).unwrap();
        assert!(bj.is_orthogonal());
        let r = ortho_space_orthogonal(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &scaled, BAND).unwrap();
        assert!(r.is_not_orthogonal());
        assert!((r.margin - 0.5).abs() < 1e-12);

        // x in an unscaled class delegates to the definitional test.
        let r = ortho_space_orthogonal(&v(&[0.0, 1.0]), &v(&[1.0, 0.0]), &scaled, BAND).unwrap();
        assert!(r.is_orthogonal());
    }

    #[test]
    fn route_agreement_on_seeded_pairs() {
        use rand::{Rng, SeedableRng};
        let norms = [NormSpec::l1(), NormSpec::l2(), NormSpec::linf(), NormSpec::lp(3.0)];
        for (ni, norm) in norms.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + ni as u64);
            let mut checked = 0;
            while checked < 500 {
                let dim = if rng.random_bool(0.5) { 2 } else { 3 };
                let x = draw_nonzero(&mut rng, dim).unwrap();
                let y = if rng.random_bool(0.5) {
                    let raw = draw_nonzero(&mut rng, dim).unwrap();
                    match orthogonal_pair_against(&x, &raw, &raw, norm).unwrap() {
                        Some((w, _)) => w,
                        None => continue,
                    }
                } else {
                    draw_nonzero(&mut rng, dim).unwrap()
                };
                let a = bj_orthogonal(&x, &y, norm, BAND).unwrap();
                let b = james_orthogonal(&x, &y, norm, JBAND).unwrap();
                if !a.is_indeterminate() && !b.is_indeterminate() {
                    assert_eq!(a.verdict, b.verdict, "routes split on {norm:?} x={x:?} y={y:?}");
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn cone_decomposition_matches_bj() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let norms = [NormSpec::l1(), NormSpec::l2(), NormSpec::linf()];
        for _ in 0..300 {
            let dim = if rng.random_bool(0.5) { 2 } else { 3 };
            let norm = &norms[rng.random_range(0..norms.len())];
            let x = draw_nonzero(&mut rng, dim).unwrap();
            let y = if rng.random_bool(0.5) {
                match orthogonalize_by_line_search(&x, &draw_nonzero(&mut rng, dim).unwrap(), norm).unwrap() {
                    Some(w) => w,
                    None => continue,
                }
            } else {
                draw_nonzero(&mut rng, dim).unwrap()
            };
            let whole = bj_orthogonal(&x, &y, norm, BAND).unwrap();
            let cones = cone_membership(&x, &y, norm, BAND).unwrap();
            if whole.is_indeterminate()
                || cones.in_plus.is_indeterminate()
                || cones.in_minus.is_indeterminate()
            {
                continue;
            }
            assert_eq!(whole.is_orthogonal(), cones.both_hold(), "x={x:?} y={y:?} {norm:?}");
        }
    }

    #[test]
    fn verdicts_are_scale_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let x = draw_nonzero(&mut rng, 3).unwrap();
            let y = draw_nonzero(&mut rng, 3).unwrap();
            let t: f64 = rng.random_range(0.01..10.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            let s: f64 = rng.random_range(0.01..10.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            let a = bj_orthogonal(&x, &y, &NormSpec::l2(), BAND).unwrap();
            let b = bj_orthogonal(&x.scale(t), &y.scale(s), &NormSpec::l2(), BAND).unwrap();
            if !a.is_indeterminate() && !b.is_indeterminate() {
                assert_eq!(a.verdict, b.verdict);
            }
        }
    }
}
