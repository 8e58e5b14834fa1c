//! Command-line front end: parses space and operator configurations,
//! dispatches orthogonality checks, and emits reports.
//!
//! Exit codes: 0 orthogonal/pass, 1 not-orthogonal/fail, 2 indeterminate,
//! 3 usage or configuration error. `ORTHO_TOL_LO` / `ORTHO_TOL_HI` override
//! the guard band for the invoked command (decimal strings).

use bjortho::admissible::AdmissibleSpec;
use bjortho::operators::{
    bhatia_semrl_orthogonal, default_mesh, induced_seminorm, op_orthogonal_characterization,
    op_orthogonal_definition, sain_orthogonal_with_mesh, spectral_operator_norm,
};
use bjortho::ortho::{is_smooth_point, ortho_space_orthogonal, FunctionalFamily, OrthoSpaceSpec};
use bjortho::spaces::{Matrix, NormSpec, SemiNormFamily, SemiNormSpec, Vector};
use bjortho::verify::{
    reproduce_counterexamples, run_check, AgreementReport, CheckConfig, FixtureReport, TheoremId,
};
use bjortho::{GuardBand, Verdict};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bjortho", version, about = "Birkhoff-James orthogonality toolkit")]
struct Cli {
    /// Write the machine-readable report as JSON to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide orthogonality of two vectors in a configured space.
    Check {
        /// Left vector as a JSON array, e.g. "[1,0]".
        #[arg(long)]
        x: String,
        /// Right vector as a JSON array.
        #[arg(long)]
        y: String,
        /// Space config file: a norm spec, or {"norm": .., "admissible": ..}.
        #[arg(long)]
        space: PathBuf,
    },
    /// Decide operator orthogonality along one or all routes.
    OpCheck {
        /// Operator T as a JSON matrix file {"rows", "cols", "data"}.
        #[arg(long)]
        t: PathBuf,
        /// Operator A as a JSON matrix file.
        #[arg(long)]
        a: PathBuf,
        /// Semi-norm family file (single spec or array); default Euclidean.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Domain norm file (unit sphere to sample); default Euclidean.
        #[arg(long)]
        norm_x: Option<PathBuf>,
        /// Codomain norm file for the single-norm witness route.
        #[arg(long)]
        norm_y: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Route::All)]
        route: Route,
        /// Angular sampling gap; default depends on the dimension.
        #[arg(long)]
        mesh: Option<f64>,
    },
    /// Induced operator semi-norm with its attainment summary.
    OpNorm {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        norm_x: Option<PathBuf>,
        #[arg(long)]
        mesh: Option<f64>,
        /// Skip local refinement of the sampled maximum.
        #[arg(long)]
        no_refine: bool,
    },
    /// Report whether a point is smooth for a norm (exit 0 smooth, 1 not).
    Smoothness {
        #[arg(long)]
        x: String,
        #[arg(long)]
        norm: PathBuf,
    },
    /// Run a seeded cross-validation check (exit 0 iff no disagreements).
    Verify {
        /// Check id, e.g. T3_7 or T2_1_equivalence.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        seed: u64,
        /// Optional JSON config overriding the check's defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Append a one-line CSV summary to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-run the pinned constructive fixtures (exit 0 iff all hold).
    Fixtures,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Definition,
    Characterization,
    BhatiaSemrl,
    Sain,
    All,
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
enum Report {
    Check {
        verdict: Verdict,
        margin: f64,
    },
    OpCheck {
        routes: Vec<RouteLine>,
        consensus: Verdict,
        disagreement: bool,
    },
    OpNorm {
        p: f64,
        tol_band: f64,
        attainment_count: usize,
        attained_indices: Vec<usize>,
        spectral: Option<f64>,
    },
    Smoothness {
        smooth: bool,
    },
    Verify {
        config: Box<CheckConfig>,
        report: Box<AgreementReport>,
    },
    Fixtures {
        report: FixtureReport,
    },
}

#[derive(Serialize, Deserialize)]
struct RouteLine {
    route: String,
    verdict: Verdict,
    margin: f64,
}

/// Human-readable summary; the same renderer runs on reports re-read from
/// disk, so the JSON output round-trips to identical text.
fn render(report: &Report) -> String {
    match report {
        Report::Check { verdict, margin } => format!("verdict: {verdict} (margin {margin:.3e})"),
        Report::OpCheck { routes, consensus, disagreement } => {
            let mut line = String::new();
            for r in routes {
                line.push_str(&format!("{}: {} (margin {:.3e}); ", r.route, r.verdict, r.margin));
            }
            if *disagreement {
                line.push_str("routes disagree");
            } else {
                line.push_str(&format!("consensus: {consensus}"));
            }
            line
        }
        Report::OpNorm { p, tol_band, attainment_count, attained_indices, spectral } => {
            let mut line = format!(
                "P = {p:.12} (band {tol_band:.3e}), attainment points: {attainment_count}, indices: {attained_indices:?}"
            );
            if let Some(s) = spectral {
                line.push_str(&format!(", spectral: {s:.12}"));
            }
            line
        }
        Report::Smoothness { smooth } => {
            format!("smooth: {}", if *smooth { "yes" } else { "no" })
        }
        Report::Verify { config, report } => format!(
            "{}: total={} agree={} disagree={} indeterminate={} seed={} ({} ms) config_hash={:016x}",
            report.theorem,
            report.total,
            report.agree,
            report.disagree,
            report.indeterminate,
            report.seed,
            report.wall_time.as_millis(),
            bjortho::verify::config_hash(config),
        ),
        Report::Fixtures { report } => format!(
            "scaled-class fixture: {}; additivity fixture: {}; euclidean control: {}",
            report.scaled_class_fixture, report.additivity_fixture, report.euclidean_control
        ),
    }
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

struct UsageError(String);

type CmdResult<T> = Result<T, UsageError>;

impl From<bjortho::Error> for UsageError {
    fn from(e: bjortho::Error) -> Self {
        UsageError(e.to_string())
    }
}

fn read_file(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CmdResult<T> {
    serde_json::from_str(text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_vector(text: &str) -> CmdResult<Vector> {
    serde_json::from_str(text).map_err(|e| UsageError(format!("vector {text:?}: {e}")))
}

fn load_matrix(path: &Path) -> CmdResult<Matrix> {
    parse_json(path, &read_file(path)?)
}

fn load_norm(path: &Path) -> CmdResult<NormSpec> {
    let norm: NormSpec = parse_json(path, &read_file(path)?)?;
    if !norm.is_valid_norm() {
        return Err(UsageError(format!("{}: spec is not a valid norm", path.display())));
    }
    Ok(norm)
}

/// Family file: either a single semi-norm spec or an array of them.
fn load_family(path: &Path) -> CmdResult<SemiNormFamily> {
    let text = read_file(path)?;
    let value: serde_json::Value = parse_json(path, &text)?;
    let members: Vec<SemiNormSpec> = if value.is_array() {
        serde_json::from_value(value).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
    } else {
        vec![serde_json::from_value(value).map_err(|e| UsageError(format!("{}: {e}", path.display())))?]
    };
    SemiNormFamily::new(members).map_err(UsageError::from)
}

#[derive(Deserialize)]
struct SpaceFile {
    norm: NormSpec,
    #[serde(default)]
    admissible: Option<AdmissibleSpec>,
}

/// Space file: either `{"norm": .., "admissible": ..}` or a bare norm spec.
fn load_space(path: &Path) -> CmdResult<OrthoSpaceSpec> {
    let text = read_file(path)?;
    let value: serde_json::Value = parse_json(path, &text)?;
    let (norm, admissible) = if value.get("norm").is_some() {
        let f: SpaceFile =
            serde_json::from_value(value).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        (f.norm, f.admissible)
    } else {
        let norm: NormSpec =
            serde_json::from_value(value).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        (norm, None)
    };
    if !norm.is_valid_norm() {
        return Err(UsageError(format!("{}: space norm is not a valid norm", path.display())));
    }
    let admissible = admissible.unwrap_or_else(|| AdmissibleSpec::unit_sphere(norm.clone()));
    Ok(OrthoSpaceSpec { norm, family: FunctionalFamily::UnitDualSphere, admissible })
}

fn band_from_env(default: GuardBand) -> CmdResult<GuardBand> {
    let read = |name: &str| -> CmdResult<Option<f64>> {
        match std::env::var(name) {
            Ok(text) => text
                .trim()
                .parse::<f64>()
                .map(Some)
                .map_err(|e| UsageError(format!("{name}={text:?}: {e}"))),
            Err(_) => Ok(None),
        }
    };
    let lo = read("ORTHO_TOL_LO")?.unwrap_or(default.tol_lo);
    let hi = read("ORTHO_TOL_HI")?.unwrap_or(default.tol_hi);
    GuardBand::new(lo, hi).map_err(UsageError::from)
}

// ---------------------------------------------------------------------------
// Command execution
// ---------------------------------------------------------------------------

fn verdict_exit(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Orthogonal => 0,
        Verdict::NotOrthogonal => 1,
        Verdict::Indeterminate => 2,
    }
}

fn emit(report: &Report, json: &Option<PathBuf>) -> CmdResult<()> {
    println!("{}", render(report));
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(report)
            .map_err(|e| UsageError(format!("serializing report: {e}")))?;
        fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_command(cli: Cli) -> CmdResult<u8> {
    match cli.command {
        Command::Check { x, y, space } => {
            let x = load_vector(&x)?;
            let y = load_vector(&y)?;
            let space = load_space(&space)?;
            let band = band_from_env(GuardBand::VECTOR)?;
            let state = ortho_space_orthogonal(&x, &y, &space, band)?;
            let report = Report::Check { verdict: state.verdict, margin: state.margin };
            emit(&report, &cli.json)?;
            Ok(verdict_exit(state.verdict))
        }
        Command::OpCheck { t, a, family, norm_x, norm_y, route, mesh } => {
            let t = load_matrix(&t)?;
            let a = load_matrix(&a)?;
            let norm_x = norm_x.map(|p| load_norm(&p)).transpose()?.unwrap_or_else(NormSpec::l2);
            let norm_y = norm_y.map(|p| load_norm(&p)).transpose()?;
            let family = match family {
                Some(path) => load_family(&path)?,
                None => SemiNormFamily::single(SemiNormSpec::Norm(NormSpec::Euclidean))?,
            };
            let mesh = mesh.unwrap_or_else(|| default_mesh(t.cols()));
            let band = band_from_env(GuardBand::OPERATOR)?;
            let sample = AdmissibleSpec::unit_sphere(norm_x.clone()).discretize(mesh, t.cols())?;

            let mut routes: Vec<RouteLine> = Vec::new();
            let push = |name: &str, state: bjortho::TriState, routes: &mut Vec<RouteLine>| {
                routes.push(RouteLine { route: name.into(), verdict: state.verdict, margin: state.margin });
            };
            if matches!(route, Route::Definition | Route::All) {
                push("definition", op_orthogonal_definition(&t, &a, &family, &sample, band)?, &mut routes);
            }
            if matches!(route, Route::Characterization | Route::All) {
                let out = op_orthogonal_characterization(&t, &a, &family, &sample, band)?;
                push("characterization", out.state, &mut routes);
            }
            let euclidean_family = family.len() == 1
                && matches!(family.member(0), SemiNormSpec::Norm(n) if *n == NormSpec::Euclidean || *n == NormSpec::l2());
            if matches!(route, Route::BhatiaSemrl) || (matches!(route, Route::All) && t.rows() == t.cols() && euclidean_family) {
                push("bhatia_semrl", bhatia_semrl_orthogonal(&t, &a, band)?, &mut routes);
            }
            if matches!(route, Route::Sain) || (matches!(route, Route::All) && norm_y.is_some()) {
                let ny = norm_y.clone().unwrap_or_else(NormSpec::l2);
                push("sain", sain_orthogonal_with_mesh(&t, &a, &norm_x, &ny, mesh, band)?, &mut routes);
            }
            if routes.is_empty() {
                return Err(UsageError("no applicable route for this configuration".into()));
            }

            let definitive: Vec<Verdict> = routes
                .iter()
                .map(|r| r.verdict)
                .filter(|v| *v != Verdict::Indeterminate)
                .collect();
            let disagreement = definitive.windows(2).any(|w| w[0] != w[1]);
            let consensus = if disagreement {
                Verdict::NotOrthogonal
            } else {
                definitive.first().copied().unwrap_or(Verdict::Indeterminate)
            };
            let report = Report::OpCheck { routes, consensus, disagreement };
            emit(&report, &cli.json)?;
            if disagreement {
                Ok(1)
            } else {
                Ok(verdict_exit(consensus))
            }
        }
        Command::OpNorm { t, family, norm_x, mesh, no_refine } => {
            let t = load_matrix(&t)?;
            let family = load_family(&family)?;
            let norm_x = norm_x.map(|p| load_norm(&p)).transpose()?.unwrap_or_else(NormSpec::l2);
            let mesh = mesh.unwrap_or_else(|| default_mesh(t.cols()));
            let sample = AdmissibleSpec::unit_sphere(norm_x).discretize(mesh, t.cols())?;
            let result = induced_seminorm(&t, &family, &sample, !no_refine)?;
            let euclidean_family = family.len() == 1
                && matches!(family.member(0), SemiNormSpec::Norm(n) if *n == NormSpec::Euclidean || *n == NormSpec::l2());
            let spectral = if euclidean_family { Some(spectral_operator_norm(&t)?) } else { None };
            let report = Report::OpNorm {
                p: result.p,
                tol_band: result.tol_band,
                attainment_count: result.attainment.len(),
                attained_indices: result.attained_indices(),
                spectral,
            };
            emit(&report, &cli.json)?;
            Ok(0)
        }
        Command::Smoothness { x, norm } => {
            let x = load_vector(&x)?;
            let norm = load_norm(&norm)?;
            let smooth = is_smooth_point(&x, &norm)?;
            let report = Report::Smoothness { smooth };
            emit(&report, &cli.json)?;
            Ok(if smooth { 0 } else { 1 })
        }
        Command::Verify { theorem, count, seed, config, csv } => {
            let theorem = TheoremId::parse(&theorem)?;
            let config = match config {
                Some(path) => parse_json(&path, &read_file(&path)?)?,
                None => CheckConfig::for_theorem(theorem),
            };
            let report = run_check(theorem, &config, count, seed)?;
            let passed = report.passed();
            if let Some(path) = csv {
                let mut text = String::new();
                let fresh = !path.exists() || fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
                if fresh {
                    text.push_str(AgreementReport::csv_header());
                    text.push('\n');
                }
                text.push_str(&report.csv_line(&config));
                text.push('\n');
                let existing = fs::read_to_string(&path).unwrap_or_default();
                fs::write(&path, existing + &text)
                    .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            }
            let out = Report::Verify { config: Box::new(config), report: Box::new(report) };
            emit(&out, &cli.json)?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::Fixtures => {
            let report = reproduce_counterexamples()?;
            let passed = report.passed();
            emit(&Report::Fixtures { report }, &cli.json)?;
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(0);
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run_command(cli) {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}
