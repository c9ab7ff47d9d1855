use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn neumann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neumann")).args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn geometry_of_disk_reports_equality() {
    let tmp = tempfile::tempdir().unwrap();
    let out = neumann(&["geometry", s(&fixtures().join("suite/disk.json")), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(0));
    let g = json(&tmp.path().join("geometry.json"));
    let neu = g["lambda_inf_neumann"].as_f64().unwrap();
    let dir = g["lambda_inf_dirichlet"].as_f64().unwrap();
    assert!((neu - 1.0).abs() < 1e-12 && (dir - 1.0).abs() < 1e-12);
}

#[test]
fn missing_spec_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = neumann(&["geometry", s(&tmp.path().join("nope.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain spec not found"));
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(neumann(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    let spec = fixtures().join("interval.json");
    std::fs::write(&cfg, serde_json::json!({ "domain_path": spec, "h": -0.1 }).to_string()).unwrap();
    let out = neumann(&["sweep", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`h`"));
}

#[test]
fn scan_skips_malformed_specs() {
    let suite = tempfile::tempdir().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures().join("suite/square.json"), suite.path().join("a.json")).unwrap();
    std::fs::write(suite.path().join("b.json"), r#"{"kind": "disk"}"#).unwrap();
    std::fs::write(suite.path().join("notes.txt"), "ignored").unwrap();
    let out = neumann(&["inequality-scan", s(suite.path()), "--out", s(out_dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning:") && err.contains("b.json") && err.contains("`center`"), "{err}");
    let csv = std::fs::read_to_string(out_dir.path().join("scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("a,convex-polygon,"));
}

#[test]
fn empty_suite_writes_header_only() {
    let suite = tempfile::tempdir().unwrap();
    let out = neumann(&["inequality-scan", s(suite.path()), "--out", s(suite.path())]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(suite.path().join("scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("name,kind,diam,"));
}

#[test]
fn missing_suite_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = neumann(&["inequality-scan", s(&tmp.path().join("absent"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_exponent_sweep_flags_extrapolation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    let spec = fixtures().join("interval.json");
    let cfg_text = serde_json::json!({ "domain_path": spec, "h": 1.0 / 64.0, "p_schedule": [2.0], "output_dir": "res" });
    std::fs::write(&cfg, cfg_text.to_string()).unwrap();
    let out = neumann(&["sweep", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // `output_dir` is relative to the config file.
    let res = tmp.path().join("res");
    let sweep = json(&res.join("sweep.json"));
    assert_eq!(sweep["results"].as_array().unwrap().len(), 1);
    assert_eq!(sweep["extrapolation"]["flagged"], true);
    assert_eq!(sweep["lambda_inf_estimate"], sweep["results"][0]["lambda_p"]);
    for f in ["plotdata.csv", "field_p2.csv", "trace_p2.log", "verdicts.json", "properties.json"] {
        assert!(res.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn overrides_take_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    let spec = fixtures().join("suite/square.json");
    let cfg_text = serde_json::json!({ "domain_path": spec, "h": 0.5, "p_schedule": [2.0, 4.0, 8.0], "seed": 1 });
    std::fs::write(&cfg, cfg_text.to_string()).unwrap();
    let res = tmp.path().join("o");
    let out = neumann(&["sweep", "--config", s(&cfg), "--out", s(&res), "--seed", "9", "--h", "0.25", "--p-max", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = json(&res.join("sweep.json"));
    assert_eq!(sweep["h"], 0.25);
    assert_eq!(sweep["p_schedule"], serde_json::json!([2.0, 4.0]));
    assert_eq!(sweep["solver"]["seed"], 9);
    assert!(!res.join("field_p8.csv").exists());
}

#[test]
fn remark_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = neumann(&["verify-remark", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&tmp.path().join("remark.json"));
    assert_eq!(r["pass"], true);
    assert_eq!(r["entries"].as_array().unwrap().len(), 3);
}
