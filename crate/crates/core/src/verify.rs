//! Seeded cross-validation harness.
//!
//! Each check id pins one relationship between independent computation
//! routes (definitional line minimization, supporting functionals,
//! representative scaling, attainment-set witnesses, spectral projection)
//! and tallies agreement over deterministically generated instances.
//! Indeterminate verdicts never count as disagreements: they are tallied
//! separately and every disagreement record carries enough data to replay
//! the instance in isolation.

use crate::admissible::{AdmissibleSpec, SymmetrizedSample};
use crate::operators::{
    bhatia_semrl_orthogonal, minimize_induced_along, op_orthogonal_characterization,
    op_orthogonal_definition, sain_orthogonal_with_mesh, seminorm_cone_membership,
    witness_functional, WitnessSide,
};
use crate::ortho::{
    bj_orthogonal, is_smooth_point, james_orthogonal, make_orthogonal_direction,
    orthogonal_pair_against, ortho_space_orthogonal, right_additivity_probe, FunctionalFamily,
    OrthoSpaceSpec, ProbeOutcome,
};
use crate::spaces::{Matrix, NormSpec, SemiNormFamily, SemiNormSpec, Vector};
use crate::tol::{GuardBand, TriState, Verdict};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::{Duration, Instant};

/// Identifiers of the pinned cross-checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "T2_1_equivalence")]
    T2_1Equivalence,
    #[serde(rename = "T2_2_strict_inclusion")]
    T2_2StrictInclusion,
    #[serde(rename = "T2_6_right_additivity")]
    T2_6RightAdditivity,
    #[serde(rename = "C2_7_smoothness")]
    C2_7Smoothness,
    #[serde(rename = "T3_1_bhatia_semrl")]
    T3_1BhatiaSemrl,
    #[serde(rename = "T3_2_sain")]
    T3_2Sain,
    #[serde(rename = "T3_5_cone_equivalence")]
    T3_5ConeEquivalence,
    #[serde(rename = "T3_7_characterization")]
    T3_7Characterization,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::T2_1Equivalence,
        TheoremId::T2_2StrictInclusion,
        TheoremId::T2_6RightAdditivity,
        TheoremId::C2_7Smoothness,
        TheoremId::T3_1BhatiaSemrl,
        TheoremId::T3_2Sain,
        TheoremId::T3_5ConeEquivalence,
        TheoremId::T3_7Characterization,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::T2_1Equivalence => "T2_1_equivalence",
            TheoremId::T2_2StrictInclusion => "T2_2_strict_inclusion",
            TheoremId::T2_6RightAdditivity => "T2_6_right_additivity",
            TheoremId::C2_7Smoothness => "C2_7_smoothness",
            TheoremId::T3_1BhatiaSemrl => "T3_1_bhatia_semrl",
            TheoremId::T3_2Sain => "T3_2_sain",
            TheoremId::T3_5ConeEquivalence => "T3_5_cone_equivalence",
            TheoremId::T3_7Characterization => "T3_7_characterization",
        }
    }

    /// Parse a full name or a short prefix such as `T3_7`.
    pub fn parse(text: &str) -> Result<TheoremId> {
        let lower = text.to_ascii_lowercase();
        for id in TheoremId::ALL {
            let name = id.name().to_ascii_lowercase();
            if name == lower {
                return Ok(id);
            }
            let short: String = name.splitn(3, '_').take(2).collect::<Vec<_>>().join("_");
            if short == lower {
                return Ok(id);
            }
        }
        Err(Error::InvalidSpec(format!("unknown theorem id: {text}")))
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Check configuration; unset fields fall back to per-check defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_x: Option<NormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_y: Option<NormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<SemiNormFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub override_direction: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub override_scale: Option<f64>,
}

impl CheckConfig {
    pub fn for_theorem(theorem: TheoremId) -> CheckConfig {
        let base = CheckConfig {
            dim: 2,
            norm: None,
            norm_x: None,
            norm_y: None,
            family: None,
            mesh: None,
            override_direction: None,
            override_scale: None,
        };
        match theorem {
            TheoremId::T2_1Equivalence => CheckConfig { norm: Some(NormSpec::l2()), ..base },
            TheoremId::T2_2StrictInclusion => CheckConfig {
                norm: Some(NormSpec::l2()),
                override_direction: Some(Vector::from_slice(&[1.0, 0.0]).expect("static")),
                override_scale: Some(0.5),
                ..base
            },
            TheoremId::T2_6RightAdditivity => CheckConfig { norm: Some(NormSpec::linf()), ..base },
            TheoremId::C2_7Smoothness => CheckConfig { norm: Some(NormSpec::l2()), ..base },
            TheoremId::T3_1BhatiaSemrl => CheckConfig { mesh: Some(0.01), ..base },
            TheoremId::T3_2Sain => CheckConfig {
                norm_x: Some(NormSpec::linf()),
                norm_y: Some(NormSpec::linf()),
                mesh: Some(0.005),
                ..base
            },
            TheoremId::T3_5ConeEquivalence => base,
            TheoremId::T3_7Characterization => CheckConfig {
                family: Some(
                    SemiNormFamily::new(vec![SemiNormSpec::coord_abs(0), SemiNormSpec::coord_abs(1)])
                        .expect("static"),
                ),
                mesh: Some(0.005),
                ..base
            },
        }
    }
}

/// One recorded route conflict, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: u64,
    pub instance: String,
    pub verdicts: Vec<RouteVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteVerdict {
    pub route: String,
    pub verdict: Verdict,
    pub margin: f64,
}

/// Tally of one seeded run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgreementReport {
    pub theorem: TheoremId,
    pub total: u64,
    pub agree: u64,
    pub disagree: u64,
    pub indeterminate: u64,
    pub disagreements: Vec<Disagreement>,
    pub seed: u64,
    pub wall_time: Duration,
}

impl AgreementReport {
    pub fn passed(&self) -> bool {
        self.disagree == 0
    }

    pub fn indeterminate_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.indeterminate as f64 / self.total as f64
        }
    }

    /// Equality up to wall time; used by the reproducibility checks.
    pub fn same_outcome(&self, other: &AgreementReport) -> bool {
        self.theorem == other.theorem
            && self.total == other.total
            && self.agree == other.agree
            && self.disagree == other.disagree
            && self.indeterminate == other.indeterminate
            && self.disagreements == other.disagreements
            && self.seed == other.seed
    }

    pub fn csv_header() -> &'static str {
        "theorem,config_hash,total,agree,disagree,indeterminate,seed,millis"
    }

    pub fn csv_line(&self, config: &CheckConfig) -> String {
        format!(
            "{},{:016x},{},{},{},{},{},{}",
            self.theorem.name(),
            config_hash(config),
            self.total,
            self.agree,
            self.disagree,
            self.indeterminate,
            self.seed,
            self.wall_time.as_millis()
        )
    }
}

/// FNV-1a over the canonical JSON encoding; stable across runs and builds.
pub fn config_hash(config: &CheckConfig) -> u64 {
    let text = serde_json::to_string(config).unwrap_or_default();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

/// Raw instance kinds drawable by the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    VectorPair,
    OperatorPair,
    Triple,
}

/// A generated (or derived) test instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instance {
    VectorPair { x: Vector, y: Vector },
    OperatorPair { t: Matrix, a: Matrix },
    Triple { x: Vector, y: Vector, z: Vector },
}

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let coords: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let v = Vector::new(coords).expect("dim >= 2");
        if v.norm2() >= 1e-6 {
            return v;
        }
    }
}

fn draw_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::new(rows, cols, (0..rows * cols).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .expect("bounded entries")
}

/// Deterministic raw instance: entries uniform in `[-1, 1]`, vectors
/// redrawn while their Euclidean norm is below `1e-6`. The same
/// `(seed, index)` always yields the same instance, and distinct indices use
/// independent substreams.
pub fn gen_instance(kind: InstanceKind, dim: usize, seed: u64, index: u64) -> Instance {
    let mut rng = stream_rng(seed, index);
    match kind {
        InstanceKind::VectorPair => {
            let x = draw_vector(&mut rng, dim);
            let y = draw_vector(&mut rng, dim);
            Instance::VectorPair { x, y }
        }
        InstanceKind::OperatorPair => {
            let t = draw_matrix(&mut rng, dim, dim);
            let a = draw_matrix(&mut rng, dim, dim);
            Instance::OperatorPair { t, a }
        }
        InstanceKind::Triple => {
            let x = draw_vector(&mut rng, dim);
            let y = draw_vector(&mut rng, dim);
            let z = draw_vector(&mut rng, dim);
            Instance::Triple { x, y, z }
        }
    }
}

/// Shift `t` along `a` onto the orthogonality boundary: replace `t` by the
/// refined line minimizer `t + s* a`, so the manufactured pair is orthogonal
/// to roughly the evaluation accuracy.
fn orthogonalize_operator_pair(
    t: &Matrix,
    a: &Matrix,
    family: &SemiNormFamily,
    sample: &SymmetrizedSample,
) -> Result<Option<Matrix>> {
    let (s_star, min_val) = minimize_induced_along(t, a, family, sample)?;
    if min_val < 1e-6 {
        return Ok(None);
    }
    Ok(Some(t.add_scaled(s_star, a)?))
}

// ---------------------------------------------------------------------------
// Check context and evaluation
// ---------------------------------------------------------------------------

/// Pre-built state for a run: norms, families, samples, bands.
pub struct CheckContext {
    pub theorem: TheoremId,
    pub config: CheckConfig,
    pub vector_band: GuardBand,
    pub support_band: GuardBand,
    pub operator_band: GuardBand,
    norm: NormSpec,
    space: Option<OrthoSpaceSpec>,
    family: Option<SemiNormFamily>,
    sample: Option<SymmetrizedSample>,
    norm_x: NormSpec,
    norm_y: NormSpec,
    mesh: f64,
}

impl CheckContext {
    pub fn new(theorem: TheoremId, config: &CheckConfig) -> Result<CheckContext> {
        if config.dim < 2 {
            return Err(Error::UnsupportedDim(config.dim));
        }
        let norm = config.norm.clone().unwrap_or_else(NormSpec::l2);
        let norm_x = config.norm_x.clone().unwrap_or_else(NormSpec::l2);
        let norm_y = config.norm_y.clone().unwrap_or_else(NormSpec::l2);
        let mesh = config.mesh.unwrap_or_else(|| crate::operators::default_mesh(config.dim));

        let space = match theorem {
            TheoremId::T2_1Equivalence | TheoremId::T2_2StrictInclusion => {
                let admissible = match (&config.override_direction, config.override_scale) {
                    (Some(dir), Some(scale)) => {
                        AdmissibleSpec::with_override(norm.clone(), dir.clone(), scale)?
                    }
                    (None, None) => AdmissibleSpec::unit_sphere(norm.clone()),
                    _ => {
                        return Err(Error::InvalidSpec(
                            "override direction and scale must be given together".into(),
                        ))
                    }
                };
                Some(OrthoSpaceSpec {
                    norm: norm.clone(),
                    family: FunctionalFamily::UnitDualSphere,
                    admissible,
                })
            }
            _ => None,
        };

        let family = match theorem {
            TheoremId::T3_7Characterization => Some(match &config.family {
                Some(f) => f.clone(),
                None => SemiNormFamily::new(vec![
                    SemiNormSpec::coord_abs(0),
                    SemiNormSpec::coord_abs(1),
                ])?,
            }),
            TheoremId::T3_1BhatiaSemrl => {
                Some(SemiNormFamily::single(SemiNormSpec::Norm(NormSpec::l2()))?)
            }
            TheoremId::T3_2Sain => Some(SemiNormFamily::single(SemiNormSpec::Norm(norm_y.clone()))?),
            _ => None,
        };

        let sample = match theorem {
            TheoremId::T3_1BhatiaSemrl | TheoremId::T3_7Characterization => Some(
                AdmissibleSpec::unit_sphere(NormSpec::l2()).discretize(mesh, config.dim)?,
            ),
            TheoremId::T3_2Sain => {
                Some(AdmissibleSpec::unit_sphere(norm_x.clone()).discretize(mesh, config.dim)?)
            }
            _ => None,
        };

        Ok(CheckContext {
            theorem,
            config: config.clone(),
            vector_band: GuardBand::VECTOR,
            support_band: GuardBand::SUPPORT,
            operator_band: GuardBand::OPERATOR,
            norm,
            space,
            family,
            sample,
            norm_x,
            norm_y,
            mesh,
        })
    }

    /// Derive the instance tested at `index`. Half of the vector or operator
    /// pairs are shifted onto the orthogonality boundary so both verdict
    /// branches are exercised; raw draws come from [`gen_instance`].
    pub fn build_instance(&self, seed: u64, index: u64) -> Result<Instance> {
        let dim = self.config.dim;
        match self.theorem {
            TheoremId::T2_1Equivalence => {
                let raw = gen_instance(InstanceKind::VectorPair, dim, seed, index);
                let Instance::VectorPair { x, y } = raw else { unreachable!() };
                if index % 2 == 1 {
                    if let Some(w) = make_orthogonal_direction(&x, &y, &self.norm)? {
                        return Ok(Instance::VectorPair { x, y: w });
                    }
                }
                Ok(Instance::VectorPair { x, y })
            }
            TheoremId::T2_2StrictInclusion => {
                let raw = gen_instance(InstanceKind::VectorPair, dim, seed, index);
                let Instance::VectorPair { x, y } = raw else { unreachable!() };
                // Cycle through: scaled-class x with orthogonal y, generic x
                // with orthogonal y, fully random.
                let mut rng = stream_rng(seed ^ 0x5ca1ed, index);
                let x = if index.is_multiple_of(3) {
                    let dir = self
                        .config
                        .override_direction
                        .clone()
                        .unwrap_or(Vector::from_slice(&[1.0, 0.0])?);
                    let t: f64 = rng.random_range(0.1..3.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
                    dir.scale(t)
                } else {
                    x
                };
                let y = if index % 3 != 2 {
                    make_orthogonal_direction(&x, &y, &self.norm)?.unwrap_or(y)
                } else {
                    y
                };
                Ok(Instance::VectorPair { x, y })
            }
            TheoremId::T2_6RightAdditivity | TheoremId::C2_7Smoothness => {
                let raw = gen_instance(InstanceKind::Triple, dim, seed, index);
                let Instance::Triple { y, z, .. } = raw else { unreachable!() };
                // Right additivity only bites at non-smooth points, which
                // generic draws almost surely miss; pattern the base point.
                let mut rng = stream_rng(seed ^ 0x7b0b3, index);
                let x = crate::ortho::draw_probe_point(&mut rng, dim)?;
                Ok(Instance::Triple { x, y, z })
            }
            TheoremId::T3_5ConeEquivalence => {
                Ok(gen_instance(InstanceKind::VectorPair, dim, seed, index))
            }
            TheoremId::T3_1BhatiaSemrl | TheoremId::T3_2Sain | TheoremId::T3_7Characterization => {
                let raw = gen_instance(InstanceKind::OperatorPair, dim, seed, index);
                let Instance::OperatorPair { t, a } = raw else { unreachable!() };
                if index % 2 == 1 {
                    let family = self.family.as_ref().expect("operator checks carry a family");
                    let sample = self.sample.as_ref().expect("operator checks carry a sample");
                    if let Some(shifted) = orthogonalize_operator_pair(&t, &a, family, sample)? {
                        return Ok(Instance::OperatorPair { t: shifted, a });
                    }
                }
                Ok(Instance::OperatorPair { t, a })
            }
        }
    }

    /// Evaluate every route of this check on one instance.
    pub fn evaluate(&self, instance: &Instance) -> Result<Vec<RouteVerdict>> {
        match (self.theorem, instance) {
            (TheoremId::T2_1Equivalence, Instance::VectorPair { x, y }) => {
                let space = self.space.as_ref().expect("context built with space");
                let a = ortho_space_orthogonal(x, y, space, self.vector_band)?;
                let b = james_orthogonal(x, y, &self.norm, self.support_band)?;
                Ok(vec![
                    route("ortho_space", a),
                    route("supporting_functional", b),
                ])
            }
            (TheoremId::T2_2StrictInclusion, Instance::VectorPair { x, y }) => {
                let space = self.space.as_ref().expect("context built with space");
                let scaled = ortho_space_orthogonal(x, y, space, self.vector_band)?;
                let plain = bj_orthogonal(x, y, &self.norm, self.vector_band)?;
                Ok(vec![route("ortho_space_scaled", scaled), route("birkhoff_james", plain)])
            }
            (TheoremId::T2_6RightAdditivity, Instance::Triple { x, y, z })
            | (TheoremId::C2_7Smoothness, Instance::Triple { x, y, z }) => {
                self.evaluate_additivity_triple(x, y, z)
            }
            (TheoremId::T3_5ConeEquivalence, Instance::VectorPair { x, y }) => {
                self.evaluate_cone_equivalence(x, y)
            }
            (TheoremId::T3_1BhatiaSemrl, Instance::OperatorPair { t, a }) => {
                let family = self.family.as_ref().expect("family");
                let sample = self.sample.as_ref().expect("sample");
                let spectral = bhatia_semrl_orthogonal(t, a, self.operator_band)?;
                let definition = op_orthogonal_definition(t, a, family, sample, self.operator_band)?;
                let sain =
                    sain_orthogonal_with_mesh(t, a, &NormSpec::l2(), &NormSpec::l2(), self.mesh, self.operator_band)?;
                Ok(vec![
                    route("spectral_attainment", spectral),
                    route("definition", definition),
                    route("attainment_witness", sain),
                ])
            }
            (TheoremId::T3_2Sain, Instance::OperatorPair { t, a }) => {
                let family = self.family.as_ref().expect("family");
                let sample = self.sample.as_ref().expect("sample");
                let witness =
                    sain_orthogonal_with_mesh(t, a, &self.norm_x, &self.norm_y, self.mesh, self.operator_band)?;
                let definition = op_orthogonal_definition(t, a, family, sample, self.operator_band)?;
                Ok(vec![route("attainment_witness", witness), route("definition", definition)])
            }
            (TheoremId::T3_7Characterization, Instance::OperatorPair { t, a }) => {
                let family = self.family.as_ref().expect("family");
                let sample = self.sample.as_ref().expect("sample");
                let ch = op_orthogonal_characterization(t, a, family, sample, self.operator_band)?;
                let definition = op_orthogonal_definition(t, a, family, sample, self.operator_band)?;
                Ok(vec![route("characterization", ch.state), route("definition", definition)])
            }
            _ => Err(Error::InvalidSpec("instance kind does not match the check".into())),
        }
    }

    fn evaluate_additivity_triple(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vec<RouteVerdict>> {
        // Build an orthogonal pair out of the raw directions, routing them
        // through distinct extreme functionals where the support face has
        // them; skip (tally as indeterminate) when construction fails.
        let Some((yo, zo)) = orthogonal_pair_against(x, y, z, &self.norm)? else {
            return Ok(vec![route("skipped", TriState { verdict: Verdict::Indeterminate, margin: 0.0 })]);
        };
        let xy = bj_orthogonal(x, &yo, &self.norm, self.vector_band)?;
        let xz = bj_orthogonal(x, &zo, &self.norm, self.vector_band)?;
        if !(xy.is_orthogonal() && xz.is_orthogonal()) {
            return Ok(vec![route("skipped", TriState { verdict: Verdict::Indeterminate, margin: 0.0 })]);
        }
        let sum = yo.add(&zo)?;
        let additive = bj_orthogonal(x, &sum, &self.norm, self.vector_band)?;
        let smooth = is_smooth_point(x, &self.norm)?;
        Ok(vec![
            route("additivity", additive),
            route(
                "smoothness",
                TriState {
                    verdict: if smooth { Verdict::Orthogonal } else { Verdict::NotOrthogonal },
                    margin: if smooth { 0.0 } else { 1.0 },
                },
            ),
        ])
    }

    fn evaluate_cone_equivalence(&self, u: &Vector, v: &Vector) -> Result<Vec<RouteVerdict>> {
        let pool: [SemiNormSpec; 5] = [
            SemiNormSpec::Norm(NormSpec::l2()),
            SemiNormSpec::Norm(NormSpec::l1()),
            SemiNormSpec::Norm(NormSpec::linf()),
            SemiNormSpec::Norm(NormSpec::lp(3.0)),
            SemiNormSpec::coord_abs(0),
        ];
        // Pick the member by a stable function of the instance.
        let pick = (u.as_slice()[0].abs() * 9973.0) as usize % pool.len();
        let p = &pool[pick];
        let pu = p.eval(u)?;
        if pu < 1e-6 {
            return Ok(vec![route("skipped", TriState { verdict: Verdict::Indeterminate, margin: 0.0 })]);
        }
        let membership = seminorm_cone_membership(u, v, p, self.vector_band)?;
        let wplus = witness_functional(u, v, p, pick, WitnessSide::Oplus)?;
        let wminus = witness_functional(u, v, p, pick, WitnessSide::Ominus)?;

        // Pairings near zero are the witness route's own indeterminate zone.
        let pairing_window = 3e-3;
        let pv = p.eval(v)?.max(1e-300);
        let to_state = |found: &Option<crate::operators::WitnessFunctional>| -> TriState {
            match found {
                Some(w) => {
                    let fv = w.functional.pairing(v.as_slice()) / pv;
                    if fv.abs() < pairing_window && !w.certified {
                        TriState { verdict: Verdict::Indeterminate, margin: fv }
                    } else {
                        TriState { verdict: Verdict::Orthogonal, margin: 0.0 }
                    }
                }
                None => TriState { verdict: Verdict::NotOrthogonal, margin: 1.0 },
            }
        };
        // Boundary guard: a barely-signed pairing cannot certify absence
        // either, so report indeterminate when the best pairing is tiny.
        let boundary = |side: WitnessSide, found: &Option<crate::operators::WitnessFunctional>| -> TriState {
            if found.is_none() {
                if let Ok(support_like) = best_pairing(u, v, p, side) {
                    if support_like.abs() < pairing_window {
                        return TriState { verdict: Verdict::Indeterminate, margin: support_like };
                    }
                }
                TriState { verdict: Verdict::NotOrthogonal, margin: 1.0 }
            } else {
                to_state(found)
            }
        };

        let plus_pair = agreement_pair(membership.in_plus, boundary(WitnessSide::Oplus, &wplus));
        let minus_pair = agreement_pair(membership.in_minus, boundary(WitnessSide::Ominus, &wminus));
        Ok(vec![
            route("inequality_plus", plus_pair.0),
            route("witness_plus", plus_pair.1),
            route("inequality_minus", minus_pair.0),
            route("witness_minus", minus_pair.1),
        ])
    }
}

/// Best achievable signed pairing (normalized) for a side; used only to
/// widen the witness route's indeterminate zone at the boundary.
fn best_pairing(u: &Vector, v: &Vector, p: &SemiNormSpec, side: WitnessSide) -> Result<f64> {
    let pv = p.eval(v)?.max(1e-300);
    let candidates = match p {
        SemiNormSpec::Norm(norm) => crate::ortho::supporting_functionals(u, norm)?
            .extremes()
            .to_vec(),
        SemiNormSpec::CoordinateAbs { index } => {
            let mut f = vec![0.0; u.dim()];
            f[*index] = u.get(*index).signum();
            vec![crate::spaces::Functional::new(f)?]
        }
        SemiNormSpec::LinearImage { .. } => return Err(Error::UnsupportedSeminorm),
    };
    let mut best = f64::NEG_INFINITY;
    for f in &candidates {
        let fv = f.apply(v)? / pv;
        let score = match side {
            WitnessSide::Oplus => fv,
            WitnessSide::Ominus => -fv,
        };
        best = best.max(score);
    }
    Ok(best)
}

fn agreement_pair(a: TriState, b: TriState) -> (TriState, TriState) {
    (a, b)
}

fn route(name: &str, state: TriState) -> RouteVerdict {
    RouteVerdict { route: name.to_string(), verdict: state.verdict, margin: state.margin }
}

// ---------------------------------------------------------------------------
// Tally
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tally {
    Agree,
    Disagree,
    Indeterminate,
}

fn classify_outcome(theorem: TheoremId, verdicts: &[RouteVerdict]) -> Tally {
    match theorem {
        TheoremId::T2_2StrictInclusion => {
            // One-sided implication: scaled-space orthogonality must imply
            // the definitional one; indeterminates are inconclusive.
            let scaled = verdicts[0].verdict;
            let plain = verdicts[1].verdict;
            if scaled == Verdict::Indeterminate || plain == Verdict::Indeterminate {
                Tally::Indeterminate
            } else if scaled == Verdict::Orthogonal && plain == Verdict::NotOrthogonal {
                Tally::Disagree
            } else {
                Tally::Agree
            }
        }
        TheoremId::T3_5ConeEquivalence => {
            // Four verdicts: (inequality, witness) per side.
            let mut any_indet = false;
            for pair in verdicts.chunks(2) {
                if pair.len() < 2 {
                    continue;
                }
                let (a, b) = (pair[0].verdict, pair[1].verdict);
                if a == Verdict::Indeterminate || b == Verdict::Indeterminate {
                    any_indet = true;
                } else if a != b {
                    return Tally::Disagree;
                }
            }
            if any_indet {
                Tally::Indeterminate
            } else {
                Tally::Agree
            }
        }
        _ => {
            let definitive: Vec<Verdict> = verdicts
                .iter()
                .map(|r| r.verdict)
                .filter(|v| *v != Verdict::Indeterminate)
                .collect();
            if definitive.len() < 2 {
                return Tally::Indeterminate;
            }
            if definitive.windows(2).all(|w| w[0] == w[1]) {
                Tally::Agree
            } else {
                Tally::Disagree
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// Run one check: `count` deterministic instances, two (or more) routes
/// each, tallied into an [`AgreementReport`]. Identical inputs give
/// identical reports apart from the wall time.
pub fn run_check(theorem: TheoremId, config: &CheckConfig, count: u64, seed: u64) -> Result<AgreementReport> {
    if count == 0 {
        return Err(Error::InvalidSpec("count must be at least 1".into()));
    }
    let started = Instant::now();
    let ctx = CheckContext::new(theorem, config)?;
    let mut report = AgreementReport {
        theorem,
        total: 0,
        agree: 0,
        disagree: 0,
        indeterminate: 0,
        disagreements: Vec::new(),
        seed,
        wall_time: Duration::ZERO,
    };

    let mut counterexample_seen = false;
    for index in 0..count {
        let instance = ctx.build_instance(seed, index)?;
        let verdicts = ctx.evaluate(&instance)?;
        report.total += 1;
        let tally = match theorem {
            TheoremId::T2_6RightAdditivity | TheoremId::C2_7Smoothness => {
                classify_additivity(&verdicts, &mut counterexample_seen)
            }
            _ => classify_outcome(theorem, &verdicts),
        };
        match tally {
            Tally::Agree => report.agree += 1,
            Tally::Indeterminate => report.indeterminate += 1,
            Tally::Disagree => {
                report.disagree += 1;
                report.disagreements.push(Disagreement {
                    index,
                    instance: serde_json::to_string(&instance)
                        .map_err(|e| Error::InvalidSpec(e.to_string()))?,
                    verdicts,
                });
            }
        }
    }

    // Non-smooth spaces must exhibit an additivity failure somewhere.
    if matches!(theorem, TheoremId::T2_6RightAdditivity | TheoremId::C2_7Smoothness) {
        let smooth = space_is_smooth(&ctx)?;
        if !smooth && !counterexample_seen && report.agree > 0 {
            report.agree -= 1;
            report.disagree += 1;
            report.disagreements.push(Disagreement {
                index: count,
                instance: "{\"note\":\"no additivity failure observed in a non-smooth space\"}".into(),
                verdicts: Vec::new(),
            });
        }
    }

    report.wall_time = started.elapsed();
    debug_assert_eq!(report.total, report.agree + report.disagree + report.indeterminate);
    Ok(report)
}

fn classify_additivity(verdicts: &[RouteVerdict], counterexample_seen: &mut bool) -> Tally {
    if verdicts.len() < 2 {
        return Tally::Indeterminate;
    }
    let additive = verdicts[0].verdict;
    let smooth = verdicts[1].verdict == Verdict::Orthogonal;
    match additive {
        Verdict::Indeterminate => Tally::Indeterminate,
        Verdict::Orthogonal => Tally::Agree,
        Verdict::NotOrthogonal => {
            if smooth {
                // A smooth point produced a right-additivity failure.
                Tally::Disagree
            } else {
                *counterexample_seen = true;
                Tally::Agree
            }
        }
    }
}

fn space_is_smooth(ctx: &CheckContext) -> Result<bool> {
    // Probe patterned points too: non-smooth loci have measure zero.
    let mut rng = stream_rng(0xd00d, 0);
    for _ in 0..60 {
        let x = crate::ortho::draw_probe_point(&mut rng, ctx.config.dim)?;
        match is_smooth_point(&x, &ctx.norm) {
            Ok(true) => {}
            Ok(false) => return Ok(false),
            Err(Error::UnsupportedNorm) => return Ok(true),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Replay one recorded disagreement and return the fresh verdicts.
pub fn replay_disagreement(
    theorem: TheoremId,
    config: &CheckConfig,
    record: &Disagreement,
) -> Result<Vec<RouteVerdict>> {
    let ctx = CheckContext::new(theorem, config)?;
    let instance: Instance =
        serde_json::from_str(&record.instance).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    ctx.evaluate(&instance)
}

// ---------------------------------------------------------------------------
// Pinned fixtures
// ---------------------------------------------------------------------------

/// Outcome of the pinned constructive fixtures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureReport {
    pub scaled_class_fixture: bool,
    pub additivity_fixture: bool,
    pub euclidean_control: bool,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.scaled_class_fixture && self.additivity_fixture && self.euclidean_control
    }
}

/// Re-run the two constructive counterexamples and the smooth control.
///
/// 1. With the class of `(1,0)` scaled to one half in the Euclidean plane,
///    the pair `((1,0), (0,1))` is definitionally orthogonal but not
///    orthogonal in the scaled space.
/// 2. In the max norm on the plane, `x=(1,1)` is orthogonal to `y=(1,0)` and
///    to `z=(0,1)` but not to `y+z=x`.
/// 3. The same triple in the Euclidean norm keeps additivity.
pub fn reproduce_counterexamples() -> Result<FixtureReport> {
    let band = GuardBand::VECTOR;

    let x = Vector::from_slice(&[1.0, 0.0])?;
    let y = Vector::from_slice(&[0.0, 1.0])?;
    let scaled_space = OrthoSpaceSpec {
        norm: NormSpec::l2(),
        family: FunctionalFamily::UnitDualSphere,
        admissible: AdmissibleSpec::with_override(NormSpec::l2(), x.clone(), 0.5)?,
    };
    let plain = bj_orthogonal(&x, &y, &NormSpec::l2(), band)?;
    let scaled = ortho_space_orthogonal(&x, &y, &scaled_space, band)?;
    let scaled_class_fixture = plain.is_orthogonal() && scaled.is_not_orthogonal();

    let additivity_fixture = match right_additivity_probe(&NormSpec::linf(), 2, 8, 0, band)? {
        ProbeOutcome::Counterexample { x, y, z } => {
            x.as_slice() == [1.0, 1.0] && y.as_slice() == [1.0, 0.0] && z.as_slice() == [0.0, 1.0]
        }
        ProbeOutcome::Pass { .. } => false,
    };

    let cx = Vector::from_slice(&[1.0, 1.0])?;
    let cy = Vector::from_slice(&[1.0, -1.0])?;
    let cz = Vector::from_slice(&[-1.0, 1.0])?;
    let c1 = bj_orthogonal(&cx, &cy, &NormSpec::l2(), band)?;
    let c2 = bj_orthogonal(&cx, &cz, &NormSpec::l2(), band)?;
    let csum = cy.add(&cz)?;
    let c3 = bj_orthogonal(&cx, &csum, &NormSpec::l2(), band)?;
    let euclidean_control = c1.is_orthogonal() && c2.is_orthogonal() && c3.is_orthogonal();

    Ok(FixtureReport { scaled_class_fixture, additivity_fixture, euclidean_control })
}
