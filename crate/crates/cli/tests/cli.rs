//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

use homfinsler::spacefile::SpaceFile;
use homfinsler_core::catalog::Fixture;

const BROKEN_JACOBI: &str = r#"format = "homfinsler-space/1"
name = "broken"
structure = [[0, 1, 1, 1.0], [0, 2, 2, 1.0], [1, 2, 0, 1.0]]
gram = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

[dims]
h = 0
m1 = 2
m2 = 1

[norm]
family = "quartic-mean"
params = [1.0]
"#;

fn run(args: &[&str], path: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_homfinsler"));
    cmd.arg(args[0]);
    if let Some(p) = path {
        cmd.arg(p);
    }
    cmd.args(&args[1..]).output().unwrap()
}

fn export(dir: &Path, fixture: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{fixture}.toml"));
    let out = Command::new(env!("CARGO_BIN_EXE_homfinsler")).args(["export", fixture, "-o"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    path
}

#[test]
fn exported_example_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(dir.path(), "euclidean-diag-so2");
    let out = run(&["validate"], Some(&path));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn broken_jacobi_exits_one_and_names_triple() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, BROKEN_JACOBI).unwrap();
    let out = run(&["validate", "--json"], Some(&path));
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let jacobi = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "jacobi").unwrap();
    assert_eq!(jacobi["verdict"], "fail");
    assert_eq!(jacobi["witness"], serde_json::json!([0, 1, 2]));
}

#[test]
fn non_positive_definite_gram_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(dir.path(), "abelian");
    let text = std::fs::read_to_string(&path).unwrap().replacen("[1.0, 0.0, 0.0, 0.0]", "[-1.0, 0.0, 0.0, 0.0]", 1);
    std::fs::write(&path, text).unwrap();
    let out = run(&["validate"], Some(&path));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("gram positive definite"));
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "format = \"homfinsler-space/1\"\nname = \"x\"\nbogus = 1\n").unwrap();
    let out = run(&["nr"], Some(&path));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn flag_sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(dir.path(), "s3xs3");
    let a = run(&["flag", "--sweep", "100", "--seed", "7"], Some(&path));
    let b = run(&["flag", "--sweep", "100", "--seed", "7"], Some(&path));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["flag", "--sweep", "100", "--seed", "8"], Some(&path));
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn nr_on_example_is_positive() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(dir.path(), "euclidean-diag-so2");
    let out = run(&["nr", "--json"], Some(&path));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["structural", "latifi", "spray"] {
        assert_eq!(report["verdicts"][key], true, "{key}");
    }
}

#[test]
fn audit_equiv_negative_control() {
    let out = run(&["audit-equiv", "fixture:su2-negative", "--json", "--samples", "64"], None);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["weakly isotropic S", "vanishing S", "isotropic E", "vanishing E"] {
        assert_eq!(report["verdicts"][key], false, "{key}");
    }
}

#[test]
fn explicit_flag_with_negative_components() {
    let out = run(&["flag", "fixture:s3xs3", "--y", "-1,0,0,0,0,1", "--v", "0,1,0,-1,0,0", "--json"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn export_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for fixture in Fixture::ALL {
        let path = export(dir.path(), fixture.name());
        let loaded = SpaceFile::read(&path).unwrap().load().unwrap();
        assert_eq!(loaded.data.lie.canonical_triples(), fixture.data().lie.canonical_triples());
        assert_eq!(loaded.data.ip.gram(), fixture.data().ip.gram());
    }
}
