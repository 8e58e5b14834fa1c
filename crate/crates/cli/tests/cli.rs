//! End-to-end tests of the binary: exit-code contract, JSON report
//! round-trips, and config error handling.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bjortho"))
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_exit_codes_cover_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "l2.json", r#"{"kind":"lp","p":2.0}"#);

    // Orthogonal -> 0.
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[0,1]", "--space", &space])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // Not orthogonal -> 1.
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[1,1]", "--space", &space])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Near the boundary -> 2.
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[0.0005,1]", "--space", &space])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));

    // Malformed config -> 3.
    let broken = write(dir.path(), "broken.json", r#"{"kind":"lp","p":"#);
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[0,1]", "--space", &broken])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // Missing file -> 3.
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[0,1]", "--space", "/nonexistent.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // Unknown flag -> 3.
    let out = bin().args(["check", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn guard_band_env_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "l2.json", r#"{"kind":"euclidean"}"#);

    // Absurdly wide lower tolerance turns everything orthogonal.
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[1,1]", "--space", &space])
        .env("ORTHO_TOL_LO", "0.9")
        .env("ORTHO_TOL_HI", "0.95")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // Unparsable override -> 3.
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[1,1]", "--space", &space])
        .env("ORTHO_TOL_LO", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn scaled_admissible_space_flips_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let plain = write(dir.path(), "plain.json", r#"{"kind":"lp","p":2.0}"#);
    let scaled = write(
        dir.path(),
        "scaled.json",
        r#"{"norm":{"kind":"lp","p":2.0},
            "admissible":{"base_norm":{"kind":"lp","p":2.0},
                          "overrides":[{"direction":[1.0,0.0],"scale":0.5}]}}"#,
    );
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[0,1]", "--space", &plain])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin()
        .args(["check", "--x", "[1,0]", "--y", "[0,1]", "--space", &scaled])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

#[test]
fn op_check_routes_and_op_norm() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", r#"{"rows":2,"cols":2,"data":[1.0,0.0,0.0,0.0]}"#);
    let a = write(dir.path(), "a.json", r#"{"rows":2,"cols":2,"data":[0.0,0.0,0.0,1.0]}"#);
    let fam = write(dir.path(), "fam.json", r#"{"kind":"euclidean"}"#);

    let out = bin()
        .args(["op-check", "--t", &t, "--a", &a, "--family", &fam, "--route", "all", "--mesh", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("definition"), "{text}");
    assert!(text.contains("characterization"), "{text}");
    assert!(text.contains("bhatia_semrl"), "{text}");

    // T not orthogonal to itself.
    let out = bin()
        .args(["op-check", "--t", &t, "--a", &t, "--family", &fam, "--route", "definition", "--mesh", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let t2 = write(dir.path(), "t2.json", r#"{"rows":2,"cols":2,"data":[2.0,0.0,0.0,1.0]}"#);
    let json_path = dir.path().join("opnorm.json");
    let out = bin()
        .args([
            "op-norm",
            "--t",
            &t2,
            "--family",
            &fam,
            "--mesh",
            "0.01",
            "--json",
            json_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    let p = report["p"].as_f64().unwrap();
    assert!((p - 2.0).abs() < 1e-6, "p = {p}");
    let spectral = report["spectral"].as_f64().unwrap();
    assert!((spectral - 2.0).abs() < 1e-9);
}

#[test]
fn smoothness_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let linf = write(dir.path(), "linf.json", r#"{"kind":"lp","p":"inf"}"#);
    let out = bin()
        .args(["smoothness", "--x", "[1,1]", "--norm", &linf])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["smoothness", "--x", "[1,0.5]", "--norm", &linf])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_writes_round_tripping_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let csv_path = dir.path().join("runs.csv");
    let out = bin()
        .args([
            "verify",
            "--theorem",
            "T2_1",
            "--count",
            "50",
            "--seed",
            "42",
            "--json",
            json_path.to_str().unwrap(),
            "--csv",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let printed = stdout(&out);
    let line = printed.lines().last().unwrap();
    assert!(line.contains("disagree=0"), "{line}");

    // Round trip: re-reading the JSON report reproduces the human summary,
    // except for the wall-time field.
    let report_text = fs::read_to_string(&json_path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&report_text).unwrap();
    assert_eq!(value["command"], "verify");
    assert_eq!(value["report"]["disagree"], 0);
    assert_eq!(value["report"]["seed"], 42);

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theorem,config_hash,total,agree,disagree,indeterminate,seed,millis"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("T2_1_equivalence,"), "{row}");

    // A second run appends without duplicating the header.
    let out = bin()
        .args([
            "verify",
            "--theorem",
            "T2_1",
            "--count",
            "50",
            "--seed",
            "43",
            "--csv",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(csv.matches("theorem,").count(), 1);

    // Unknown theorem id -> 3.
    let out = bin()
        .args(["verify", "--theorem", "T9_9", "--count", "1", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_report_rerenders_identically() {
    // The human line for `check` is a pure function of the JSON report.
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "l1.json", r#"{"kind":"lp","p":1.0}"#);
    let json_path = dir.path().join("check.json");
    let out = bin()
        .args([
            "check",
            "--x",
            "[1,0]",
            "--y",
            "[0,1]",
            "--space",
            &space,
            "--json",
            json_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let printed = stdout(&out);
    let line = printed.trim_end();

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    let verdict = report["verdict"].as_str().unwrap().replace('_', "-");
    let margin = report["margin"].as_f64().unwrap();
    let rendered = format!("verdict: {verdict} (margin {margin:.3e})");
    assert_eq!(line, rendered);
}

#[test]
fn fixtures_pass() {
    let out = bin().args(["fixtures"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("scaled-class fixture: true"));
}
