//! End-to-end runs of the `conelab` binary.

use std::path::Path;
use std::process::Command;

use conelab::cli::{validate_report, SummaryDocument, COLUMNS};

const GOLDEN_CONFIG: &str = "\
[run]
seed = 7

[schur-two-five]
command = schur
n = 2
q = 5
range = 12

[schur-three-three]
command = schur
n = 3
q = 3
range = 12

[weighted]
command = weighted-bessel
n = 3
q = 4
scale = 2
";

fn conelab(dir: &Path, config: &str, extra: &[&str]) -> (i32, String, String) {
    let path = dir.join("experiments.ini");
    std::fs::write(&path, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_conelab"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("CONELAB_WORKERS")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/schur_weighted.csv")
}

#[test]
fn golden_report_still_validates() {
    let rows = validate_report(&golden_path()).unwrap();
    assert!(rows.iter().any(|r| r.flag_list() == ["divergent"]));
}

#[test]
fn run_reproduces_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = conelab(dir.path(), GOLDEN_CONFIG, &["--workers", "2"]);
    assert_eq!(code, 0, "{stdout}{stderr}");
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("PASS")).count(),
        3,
        "{stdout}"
    );
    let produced = std::fs::read_to_string(dir.path().join("out/report.csv")).unwrap();
    if std::env::var_os("CONELAB_BLESS").is_some() {
        std::fs::write(golden_path(), &produced).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).unwrap();
    assert_eq!(produced, golden);

    let summary: SummaryDocument = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary.seed, 7);
    assert!(summary.pass);
    let names: Vec<&str> = summary
        .experiments
        .iter()
        .map(|s| s.experiment.as_str())
        .collect();
    assert_eq!(names, ["schur-two-five", "schur-three-three", "weighted"]);
}

#[test]
fn empty_config_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = conelab(dir.path(), "[run]\nseed = 1\n", &[]);
    assert_eq!(code, 0, "{stderr}");
    let csv = std::fs::read_to_string(dir.path().join("out/report.csv")).unwrap();
    assert_eq!(csv, format!("{}\n", COLUMNS.join(",")));
}

#[test]
fn failed_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        "[near]\ncommand = dyadic-sweep\nn = 3\nq = 4\nR = 2^-5..2^-1\nexpected_slope = 2\n";
    let (code, stdout, _) = conelab(dir.path(), config, &[]);
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("FAIL near"), "{stdout}");
    assert!(validate_report(&dir.path().join("out/report.csv")).is_ok());
}

#[test]
fn non_dyadic_radius_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[far]\ncommand = dyadic-sweep\nn = 3\nq = 4\nR = 3\n";
    let (code, _, stderr) = conelab(dir.path(), config, &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("R must be dyadic"), "{stderr}");
    assert!(stderr.contains("line 5"), "{stderr}");
}

#[test]
fn strict_mode_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[s]\ncommand = schur\nn = 3\nq = 4\ncolour = blue\n";
    let (code, _, stderr) = conelab(dir.path(), config, &[]);
    assert_eq!(code, 0);
    assert!(stderr.contains("warning"), "{stderr}");
    let (code, _, stderr) = conelab(dir.path(), config, &["--strict"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("colour"), "{stderr}");
}

#[test]
fn zero_workers_and_missing_config_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = conelab(dir.path(), "[run]\nseed = 1\n", &["--workers", "0"]);
    assert_eq!(code, 2);
    let out = Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(["--config", "/nonexistent/conelab.ini"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/conelab.ini"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = conelab(dir.path(), "[run]\nseed = 1\n", &["--seed", "99"]);
    assert_eq!(code, 0);
    let summary: SummaryDocument = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary.seed, 99);
    assert_eq!(summary.schema_version, 1);
}
