use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use wassval::valctl::Report;

fn valctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valctl"))
        .args(args)
        .env("WASSVAL_LOG", "error")
        .output()
        .expect("run valctl")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn calc(args: &[&str]) -> Value {
    let mut full = vec!["calc"];
    full.extend_from_slice(args);
    let out = valctl(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("calc prints JSON")
}

fn error_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    v["error"]["code"].as_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn calc_sample_sizes() {
    assert_eq!(calc(&["n-chernoff", "--eps", "0.1", "--delta", "0.05"])["n"], 185);
    assert_eq!(calc(&["n-worstcase", "--eps", "0.01", "--delta", "0.01"])["n"], 459);
    let k = 1.0f64;
    let delta = (2.0 * k / std::f64::consts::E).to_string();
    assert_eq!(calc(&["n-wass", "--eps", "1", "--delta", &delta, "--c", "0.03125"])["n"], 1);
}

#[test]
fn calc_closed_forms() {
    assert_eq!(calc(&["beta-w2", "--alpha", "2", "--beta", "2"])["w2"], 0.0);
    let v = calc(&["prajna", "--x0", "0.85", "0.95", "--xT", "0.55", "0.65", "--p", "0.5", "2", "--T", "4"]);
    assert_eq!(v["witness"], 1.21);
    assert_eq!(v["verdict"], "invalidated");
    let v = calc(&["w2-gauss", "--m1", "0", "--cov1", "1", "--m2", "0", "--cov2", "4"]);
    assert!((v["w2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = calc(&["scalar-gap", "--a1", "-1", "--c1", "1", "--a2", "-2", "--c2", "1", "--m20", "1", "--t", &2f64.ln().to_string()]);
    assert!((v["w2"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn calc_lti_bounds_dominate_gap() {
    let v = calc(&[
        "lti-bounds", "--a", "0.5", "0.2", "0", "0.3", "--a-hat", "0.4", "0", "0.1", "0.6", "--p0", "1", "0.2", "0.2", "2",
        "--k-max", "8",
    ]);
    let rows = v["bounds"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for r in rows {
        let w2 = r["w2"].as_f64().unwrap();
        assert!(r["sharper"].as_f64().unwrap() >= w2 - 1e-12);
    }
}

#[test]
fn calc_lp_and_quantile_agree_on_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "w,x1\n0.5,0.0\n0.5,1.0\n");
    let b = write(dir.path(), "b.csv", "w,x1\n1.0,3.0\n");
    let plan = dir.path().join("plan.csv");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let lp = calc(&["w2-lp", "--source", a, "--target", b, "--plan", plan.to_str().unwrap()]);
    let q = calc(&["w2-1d", "--source", a, "--target", b]);
    let want = (0.5f64 * 9.0 + 0.5 * 4.0).sqrt();
    assert!((lp["w2"].as_f64().unwrap() - want).abs() < 1e-12);
    assert!((q["w2"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(std::fs::read_to_string(plan).unwrap(), "i,j,mass\n0,0,0.5\n1,0,0.5\n");
}

#[test]
fn calc_rejects_bad_input() {
    let out = valctl(&["calc", "n-chernoff", "--eps", "1.5", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    error_code(&out);
    let out = valctl(&["calc", "w2-lp", "--source", "/nonexistent.csv", "--target", "/nonexistent.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn self_validation_succeeds_with_unit_prvc() {
    let dir = tempfile::tempdir().unwrap();
    let out = valctl(&[
        "validate",
        "--config",
        config("self_validation.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    let prvc = report.certificate(wassval::certificates::CertificateKind::Prvc).unwrap();
    assert_eq!(prvc.n, 38);
    assert!(prvc.values().iter().all(|v| *v == 1.0));
    assert!(dir.path().join("prvc.json").exists());
    assert!(dir.path().join("series").join("draw0000.csv").exists());
}

#[test]
fn validate_is_deterministic_for_a_seed() {
    let run = |seed: &str| {
        let out = valctl(&["validate", "--config", config("self_validation.json").to_str().unwrap(), "--seed", seed]);
        assert!(out.status.success());
        let r: Report = serde_json::from_slice(&out.stdout).unwrap();
        r.canonical_json().unwrap()
    };
    assert_eq!(run("7"), run("7"));
}

#[test]
fn invalidation_exits_with_two() {
    let out = valctl(&["validate", "--config", config("prajna_cubic.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r.invalidated());
}

#[test]
fn config_errors_exit_with_one_and_a_code() {
    let dir = tempfile::tempdir().unwrap();
    let base: Value = serde_json::from_str(&std::fs::read_to_string(config("self_validation.json")).unwrap()).unwrap();

    let mut short = base.clone();
    short["tolerance"]["gammas"] = serde_json::json!([1.0, 1.0]);
    let p = write(dir.path(), "short.json", &short.to_string());
    let out = valctl(&["validate", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "TOL_LEN");

    let mut unknown = base.clone();
    unknown["bogus"] = Value::Bool(true);
    let p = write(dir.path(), "unknown.json", &unknown.to_string());
    let out = valctl(&["validate", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "SCHEMA");

    let mut model = base;
    model["model"]["id"] = Value::String("nope".into());
    let p = write(dir.path(), "model.json", &model.to_string());
    let out = valctl(&["validate", "--config", p.to_str().unwrap()]);
    assert_eq!(error_code(&out), "UNKNOWN_MODEL");
}

#[test]
fn plotdata_writes_lti_bound_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = valctl(&[
        "validate",
        "--config",
        config("lti_demo.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let plots = dir.path().join("plots");
    let out = valctl(&[
        "plotdata",
        "--config",
        dir.path().join("report.json").to_str().unwrap(),
        "--out",
        plots.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(plots.join("w2_and_bound_vs_k.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,w2,bound,omega_bound"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (w2, bound): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        assert!(bound >= w2 - 1e-12, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 21);
    assert!(plots.join("pwvc_vs_k.csv").exists());
}

#[test]
fn plotdata_without_series_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = valctl(&["validate", "--config", config("self_validation.json").to_str().unwrap()]);
    let mut r: Report = serde_json::from_slice(&out.stdout).unwrap();
    r.series.clear();
    r.certificates.clear();
    r.lti = None;
    let p = write(dir.path(), "empty.json", &serde_json::to_string(&r).unwrap());
    let out = valctl(&["plotdata", "--config", p.to_str().unwrap(), "--out", dir.path().join("p").to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["files"].as_array().unwrap().len(), 0);
    assert_eq!(v["warnings"][0]["code"], "NOSERIES");
}
