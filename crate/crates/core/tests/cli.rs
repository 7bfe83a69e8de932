//! End-to-end tests of the command-line driver.

use std::path::Path;
use std::process::{Command, Output};

use quatsurf::io::read_obj;

fn quatsurf(args: &[&str], config: Option<&str>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quatsurf"));
    cmd.args(args).arg("--out").arg(out).env_remove("QUATSURF_THREADS");
    let dir = tempfile::tempdir().unwrap();
    if let Some(text) = config {
        let path = dir.path().join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CYLINDER: &str = r#"{
  "surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 12, "ny": 16}},
  "derived": ["parallel"],
  "pipeline": [{"op": "rho", "rho": [-1.5, 0.4], "section": {"source": "cylinder_oracle", "which": "one_plus"}}],
  "sweep": {"window": {"re_min": -4, "re_max": 0, "im_min": -0.5, "im_max": 0.5, "n_re": 5, "n_im": 2}},
  "output": {"stem": "cyl", "ply": true}
}"#;

#[test]
fn surface_writes_meshes_and_diagnostics() {
    let out = tempfile::tempdir().unwrap();
    let o = quatsurf(&["surface", "--verbose"], Some(CYLINDER), out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["cyl.obj", "cyl.ply", "cyl_parallel.obj", "cyl_parallel.ply", "diagnostics.json"] {
        assert!(out.path().join(name).exists(), "{name} missing");
        assert!(stderr(&o).contains(name), "verbose output does not list {name}");
    }
    let (verts, faces) = read_obj(&out.path().join("cyl.obj")).unwrap();
    assert_eq!(verts.len(), 12 * 16);
    // Closed in y: 11 × 16 quads.
    assert_eq!(faces.len(), 11 * 16);
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("diagnostics.json")).unwrap()).unwrap();
    assert!(diag["conformality"].as_f64().unwrap() < 1e-12);
    assert_eq!(diag["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn darboux_and_sweep_outputs() {
    let out = tempfile::tempdir().unwrap();
    let o = quatsurf(&["darboux"], Some(CYLINDER), out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.path().join("cyl_0_rho.obj").exists());
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("diagnostics.json")).unwrap()).unwrap();
    let step = &diag["steps"][0];
    assert_eq!(step["op"], "rho");
    assert!(step["diagnostics"]["residuals"]["cmc"].as_f64().unwrap() < 1e-8);

    let o = quatsurf(&["sweep"], Some(CYLINDER), out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re_rho,im_rho,re_h1,im_h1,re_h2,im_h2,resonance_flag"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        for cmd in ["surface", "darboux", "sweep"] {
            let o = quatsurf(&[cmd, "--threads", threads], Some(CYLINDER), dir.path());
            assert!(o.status.success(), "{}", stderr(&o));
        }
    }
    for name in ["cyl.obj", "cyl.ply", "cyl_0_rho.obj", "diagnostics.json", "sweep.csv"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let out = tempfile::tempdir().unwrap();
    let config = r#"{"surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 8, "ny": 8}},
        "sweep": {"window": {"re_min": -1, "re_max": 1, "im_min": 0, "im_max": 0, "n_re": 0, "n_im": 3}}}"#;
    let o = quatsurf(&["sweep"], Some(config), out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read_to_string(out.path().join("sweep.csv")).unwrap(),
        "re_rho,im_rho,re_h1,im_h1,re_h2,im_h2,resonance_flag\n"
    );
}

#[test]
fn invariants_without_config_pass() {
    let out = tempfile::tempdir().unwrap();
    let o = quatsurf(&["invariants"], None, out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("invariants.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 7);
}

#[test]
fn corrupted_dual_is_reported_not_fatal() {
    let out = tempfile::tempdir().unwrap();
    let config = r#"{"surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 8, "ny": 8}},
        "invariants": {"corrupt_dual": true}}"#;
    let o = quatsurf(&["invariants"], Some(config), out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("invariants.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    let flat = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "flatness_order").unwrap();
    assert_eq!(flat["passed"], false);
}

#[test]
fn configuration_errors_exit_with_2() {
    let out = tempfile::tempdir().unwrap();
    let cases = [
        ("surface", None),
        ("surface", Some("{not json")),
        ("surface", Some(r#"{"surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 8, "ny": 8}}, "colour": 1}"#)),
        ("darboux", Some(r#"{"surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 8, "ny": 8}}}"#)),
        ("sweep", Some(r#"{"surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 8, "ny": 8}}}"#)),
        ("surface", Some(r#"{"surface": {"type": "revolution", "profile": {"p": "x", "q": "2"}, "grid": {"x_min": 0, "x_max": 1, "nx": 8, "ny": 8}}}"#)),
    ];
    for (cmd, config) in cases {
        let o = quatsurf(&[cmd], config, out.path());
        assert_eq!(o.status.code(), Some(2), "{cmd} {config:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error ["), "{}", stderr(&o));
    }
    let o = quatsurf(&["surface", "--threads", "0"], Some(CYLINDER), out.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    let out = tempfile::tempdir().unwrap();
    let sphere = r#"{"surface": {"type": "revolution", "profile": {"p": "tanh(x)", "q": "sech(x)"},
        "grid": {"x_min": -1, "x_max": 1, "nx": 16, "ny": 16}}, "dual_gauge": "parallel_cmc", "derived": ["dual"]}"#;
    let o = quatsurf(&["surface"], Some(sphere), out.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("RoundSphere"), "{}", stderr(&o));
}

#[test]
fn thread_count_from_environment() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_quatsurf"))
        .args(["invariants", "--out"])
        .arg(out.path())
        .env("QUATSURF_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
