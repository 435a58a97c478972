use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cattaneo_lab::acceptance::run_acceptance_suite;
use cattaneo_lab::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cattaneo"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cattaneo-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn spectrum_writes_all_artifacts() {
    let d = scratch("spectrum");
    let o = run(&["spectrum"], &d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["bounds"]["beta"].as_f64().unwrap() > 0.0);
    for f in ["spectrum.csv", "spectrum.json", "spectrum.gp"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["physical"]["tau"], 1.0);
    let csv = std::fs::read_to_string(d.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("r,lambda1,lambda2,re_lambda3,im_lambda3"));
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn csv_bytes_deterministic() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for d in [&a, &b] {
        assert!(run(&["nonlinear", "--n", "8", "--t-final", "0.5", "--dt", "0.05"], d).status.success());
        assert!(run(&["verify-expansions"], d).status.success());
    }
    for f in ["nonlinear.csv", "nonlinear.snap", "expansions.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn flags_override_file() {
    let d = scratch("override");
    let cfg = d.join("c.toml");
    std::fs::write(&cfg, "[physical]\ntau = 4.0\n[grid]\nlow_radii = [0.04, 0.02, 0.01]\n").unwrap();
    let o = bin().args(["verify-expansions", "--config"]).arg(&cfg).args(["--tau", "0.5", "--out"]).arg(&d).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("expansions.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["physical"]["tau"], 0.5);
}

#[test]
fn malformed_config_names_key() {
    let d = scratch("bad");
    let cfg = d.join("bad.toml");
    std::fs::write(&cfg, "[time]\ndtt = 0.1\n").unwrap();
    let o = bin().args(["spectrum", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dtt"));
    let o = run(&["spectrum", "--gamma", "0.5"], &d);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("physical.gamma"));
}

#[test]
fn green_methods_agree() {
    let d = scratch("green");
    let o = run(&["green", "--xi", "0.05,0.02,0", "--time", "3"], &d);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["methods"].as_array().unwrap().len(), 3);
    assert!(v["explicit_vs_expm_max_abs"].as_f64().unwrap() < 1e-9);
}

#[test]
fn fit_reads_series() {
    let d = scratch("fit");
    let csv = d.join("s.csv");
    let mut text = String::from("t,y\n");
    for i in 0..20 {
        let t = 10f64.powf(1.0 + 3.0 * i as f64 / 19.0);
        text.push_str(&format!("{t},{}\n", (1.0 + t).powf(-0.75)));
    }
    std::fs::write(&csv, text).unwrap();
    let o = bin().arg("fit").arg(&csv).args(["--column", "y", "--window", "10,1e4"]).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((json(&o)["slope"].as_f64().unwrap() + 0.75).abs() < 1e-12);
    let o = bin().arg("fit").arg(&csv).args(["--column", "z"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn accept_subset_exit_status() {
    let d = scratch("accept");
    let o = run(&["accept", "--only", "1,6,10"], &d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 3);
    assert_eq!(v["all_passed"], true);
    // thresholds that cannot be met make the suite fail, not crash
    let o = run(&["accept", "--only", "9", "--n", "8", "--t-final", "0.2", "--amplitude", "0"], &d);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn expansions_hold_for_other_tau() {
    let mut cfg = ExperimentConfig::default();
    cfg.physical.tau = 0.5;
    let rep = run_acceptance_suite(&cfg, &[1, 2, 6, 10], 1);
    for c in &rep.criteria {
        assert!(c.numeric_pass, "{}", c.line());
    }
}
