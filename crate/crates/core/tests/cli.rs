use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn polycert(args: &[&str], config: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_polycert"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("POLYCERT_DEGREE_CAP")
        .status()
        .unwrap()
        .code()
        .unwrap()
}

fn write_config(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn approx_writes_outputs_deterministically() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(
        polycert(&["approx", "--csv"], &fixture("approx.json"), &a),
        0
    );
    assert_eq!(polycert(&["approx"], &fixture("approx.json"), &b), 0);
    let first = fs::read(a.join("polynomial.json")).unwrap();
    assert_eq!(first, fs::read(b.join("polynomial.json")).unwrap());
    let report = json(&a.join("report.json"));
    assert_eq!(report["passed"], true);
    assert!(report["sampled_error"].as_f64().unwrap() <= 1e-3);
    let csv = fs::read_to_string(a.join("errors.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("x_1,x_2,value_error,d(1,0)_error,d(0,1)_error,d(1,1)_error")
    );
    assert_eq!(lines.count(), 64 * 64);
    assert!(!b.join("errors.csv").exists());
}

#[test]
fn grid_flag_sets_verification_density() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        polycert(
            &["weighted", "--grid", "16", "--csv"],
            &fixture("weighted.json"),
            dir.path()
        ),
        0
    );
    assert_eq!(json(&dir.path().join("report.json"))["verify_density"], 16);
    assert_eq!(
        fs::read_to_string(dir.path().join("errors.csv"))
            .unwrap()
            .lines()
            .count(),
        16 * 16 + 1
    );
}

#[test]
fn config_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        polycert(
            &["approx"],
            &write_config(&dir, "bad.json", "{\"schema_version\": 1,"),
            &out
        ),
        1
    );
    assert_eq!(
        polycert(&["approx"], &write_config(&dir, "empty.json", "{}"), &out),
        1
    );
    assert_eq!(
        polycert(&["approx"], &dir.path().join("missing.json"), &out),
        1
    );
    let bad_expr =
        r#"{"schema_version": 1, "expression": "exp(x3)", "dimension": 2, "epsilon": 0.1}"#;
    assert_eq!(
        polycert(
            &["approx"],
            &write_config(&dir, "expr.json", bad_expr),
            &out
        ),
        1
    );
    let version = r#"{"schema_version": 7, "expression": "x1", "dimension": 1, "epsilon": 0.1}"#;
    assert_eq!(
        polycert(
            &["weighted"],
            &write_config(&dir, "version.json", version),
            &out
        ),
        1
    );
    assert!(!out.join("polynomial.json").exists());
    let status = Command::new(env!("CARGO_BIN_EXE_polycert"))
        .arg("approx")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let help = Command::new(env!("CARGO_BIN_EXE_polycert"))
        .arg("--help")
        .output()
        .unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn unreachable_tolerance_exits_2() {
    let dir = TempDir::new().unwrap();
    let tiny = r#"{"schema_version": 1, "expression": "exp(x1)*sin(x2)", "dimension": 2, "epsilon": 1e-15}"#;
    assert_eq!(
        polycert(
            &["approx"],
            &write_config(&dir, "tiny.json", tiny),
            dir.path()
        ),
        2
    );
}

#[test]
fn degree_cap_env_overrides_config() {
    let dir = TempDir::new().unwrap();
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_polycert"))
            .args(["approx", "--config"])
            .arg(fixture("approx.json"))
            .arg("--out")
            .arg(dir.path())
            .env("POLYCERT_DEGREE_CAP", cap)
            .status()
            .unwrap()
            .code()
    };
    assert_eq!(run("8"), Some(2));
    assert_eq!(run("eight"), Some(1));
}

#[test]
fn lyapunov_transfer_and_hypothesis_failure() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        polycert(
            &["lyapunov", "--csv"],
            &fixture("lyapunov.json"),
            dir.path()
        ),
        0
    );
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(
        report["certificate"]["inequalities"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
    assert!(dir.path().join("polynomial.json").exists());

    let unstable = fs::read_to_string(fixture("lyapunov.json"))
        .unwrap()
        .replace("[\"-x1\", \"-x2\"]", "[\"x1\", \"x2\"]");
    assert!(unstable.contains("[\"x1\", \"x2\"]"));
    let out = dir.path().join("unstable");
    assert_eq!(
        polycert(
            &["lyapunov"],
            &write_config(&dir, "unstable.json", &unstable),
            &out
        ),
        3
    );
}

#[test]
fn sos_certificates() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        polycert(&["check-sos"], &fixture("sos-valid.json"), dir.path()),
        0
    );
    assert_eq!(json(&dir.path().join("report.json"))["holds"], true);
    assert_eq!(
        polycert(&["check-sos"], &fixture("sos-tampered.json"), dir.path()),
        4
    );
    assert_eq!(json(&dir.path().join("report.json"))["holds"], false);
    let smooth = fs::read_to_string(fixture("sos-valid.json"))
        .unwrap()
        .replace("\"-x1\"", "\"-sin(x1)\"");
    assert_eq!(
        polycert(
            &["check-sos"],
            &write_config(&dir, "smooth.json", &smooth),
            dir.path()
        ),
        1
    );
}
