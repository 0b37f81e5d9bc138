use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn majorana(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorana"))
        .args(args)
        .env_remove("MAJ_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write_state(dir: &Path, name: &str, coeffs: &[[f64; 2]]) -> String {
    let path = dir.join(name);
    let body = serde_json::json!({ "n": coeffs.len() - 1, "coeffs": coeffs });
    fs::write(&path, body.to_string()).unwrap();
    path.display().to_string()
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn analyze_ghz_has_polar_cpps() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = write_state(dir.path(), "ghz3.json", &[[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]]);
    let r = json_of(&majorana(&["analyze", &f, "--format", "json"]));
    assert!((num(&r["e_g"]) - 1.0).abs() < 1e-10);
    let pts = r["cpps"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    let mut thetas: Vec<f64> = pts.iter().map(|p| num(&p["theta"])).collect();
    thetas.sort_by(f64::total_cmp);
    assert!(thetas[0].abs() < 1e-9 && (thetas[1] - std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn analyze_dicke_reports_ring() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = vec![[0.0, 0.0]; 7];
    c[3] = [1.0, 0.0];
    let f = write_state(dir.path(), "dicke_6_3.json", &c);
    let r = json_of(&majorana(&["analyze", &f, "--format", "json"]));
    assert_eq!(r["cpps"]["kind"], "ring");
    assert!((num(&r["cpps"]["theta"]) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn analyze_product_state() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_state(dir.path(), "s0.json", &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]);
    let r = json_of(&majorana(&["analyze", &f, "--format", "json"]));
    assert!(num(&r["e_g"]).abs() < 1e-12);
    let pts = r["cpps"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert!(num(&pts[0]["theta"]).abs() < 1e-12);
}

#[test]
fn analyze_writes_grid_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = majorana(&["analyze", "--name", "tetrahedron", "--grid", "11x20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let grid = fs::read_to_string(out.join("g2_grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 11 * 20);
    assert_eq!(grid.lines().next(), Some("theta,phi,g2"));
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for entry in fs::read_dir(&out).unwrap() {
        let p = entry.unwrap().path();
        assert!(listed.contains(&p.to_str().unwrap()), "{} not in manifest", p.display());
    }
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, "{ not json").unwrap();
    assert_eq!(majorana(&["analyze", f.to_str().unwrap()]).status.code(), Some(2));
    let zero = write_state(dir.path(), "zero.json", &[[0.0, 0.0], [0.0, 0.0]]);
    assert_eq!(majorana(&["analyze", &zero]).status.code(), Some(2));
    assert_eq!(majorana(&["analyze", "/nonexistent/state.json"]).status.code(), Some(2));
    assert_eq!(majorana(&["maximize", "--n", "1"]).status.code(), Some(2));
    assert_eq!(majorana(&["maximize", "--n", "40"]).status.code(), Some(2));
    assert_eq!(majorana(&["classical", "foo", "--n", "3"]).status.code(), Some(2));
    assert_eq!(majorana(&["analyze", "--grid", "3y4", "--name", "bell"]).status.code(), Some(2));
}

#[test]
fn maximize_small_cases() {
    let r = majorana(&["maximize", "--n", "4"]);
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("E_G = 1.584962501"));
    let r = json_of(&majorana(&["maximize", "--n", "9", "--format", "json"]));
    assert!((num(&r["e_g"]) - 2.553960277).abs() < 1e-6);
}

#[test]
fn maximize_twelve_real() {
    let r = json_of(&majorana(&["maximize", "--n", "12", "--ansatz", "real", "--format", "json"]));
    assert!((num(&r["e_g"]) - 3.117).abs() < 1e-3);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (d, t) in [(&a, "1"), (&b, "2")] {
        let o = majorana(&["maximize", "--n", "5", "--seed", "7", "--threads", t, "--out", d.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["result.json", "state.json", "majorana_points.csv", "cpps.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_majorana"))
        .args(["classical", "thomson", "--n", "5", "--out", dir.path().to_str().unwrap()])
        .env("MAJ_SEED", "1234")
        .output()
        .unwrap();
    assert!(o.status.success());
    let m: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 1234);
    let bad = Command::new(env!("CARGO_BIN_EXE_majorana"))
        .args(["classical", "thomson", "--n", "5"])
        .env("MAJ_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn classical_examples() {
    let r = json_of(&majorana(&["classical", "toth", "--n", "4", "--format", "json"]));
    assert!((num(&r["toth_cost"]) - (8.0f64 / 3.0).sqrt()).abs() < 1e-6);
    let r = json_of(&majorana(&["classical", "thomson", "--n", "2", "--format", "json"]));
    assert!((num(&r["thomson_cost"]) - 0.5).abs() < 1e-12);
    let r = json_of(&majorana(&["classical", "thomson", "--n", "12", "--as-state", "--format", "json"]));
    assert!((num(&r["e_g"]) - (243.0f64 / 28.0).log2()).abs() < 1e-6);
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn bounds_table() {
    let o = majorana(&["bounds", "--n-max", "12"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,toth_eg,thomson_eg,dicke_lower,upper"));
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 11);
    let four = &rows[2];
    assert_eq!(four[0], 4.0);
    assert!((four[1] - 3f64.log2()).abs() < 1e-6 && (four[2] - 3f64.log2()).abs() < 1e-6);
    for r in &rows {
        assert!(r[2] >= r[1] - 1e-6, "row {r:?}");
    }
    let o = majorana(&["bounds", "--n-max", "2"]);
    let rows = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert!((rows[0][4] - 3f64.log2()).abs() < 1e-10);
}
