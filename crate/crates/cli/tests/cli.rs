use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracmusielak::anchors;
use tempfile::TempDir;

const MODEL: &str = r#"{
  "schema_version": 1,
  "phi": {"family": "power", "p": 2.0},
  "psi": {"family": "linear"},
  "alpha": 0.9,
  "beta": 1.0,
  "T": 1.0,
  "N": 129,
  "h": {"family": "power"},
  "mu": 6.0,
  "seed": 1,
  "verify": {"trials": 10}
}"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path
}

fn fracmus(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = write_config(dir, config);
    Command::new(env!("CARGO_BIN_EXE_fracmus"))
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn verify_default_config_passes_with_known_anchors() {
    let dir = TempDir::new().unwrap();
    let o = fracmus(dir.path(), MODEL, &["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "verify.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("name,anchor,lhs,rhs,margin,outcome,note"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(anchors::ALL.contains(&cols[1]), "{line}");
        assert_ne!(cols[5], "fail", "{line}");
        rows += 1;
    }
    // Convexity gate, 8 checks per trial, composition, ψ-condition.
    assert_eq!(rows, 1 + 8 * 10 + 2);
    assert!(dir.path().join("out/psi_condition.csv").exists());
}

#[test]
fn verify_is_deterministic_and_seeded() {
    let dir = TempDir::new().unwrap();
    fracmus(dir.path(), MODEL, &["verify"]);
    let first = read(dir.path(), "verify.csv");
    fracmus(dir.path(), MODEL, &["verify"]);
    assert_eq!(first, read(dir.path(), "verify.csv"));
    fracmus(dir.path(), MODEL, &["--seed", "99", "verify"]);
    assert_ne!(first, read(dir.path(), "verify.csv"));
}

#[test]
fn invalid_configs_exit_2() {
    let dir = TempDir::new().unwrap();
    for bad in [
        MODEL.replace("\"alpha\": 0.9", "\"alpha\": 1.5"),
        MODEL.replace("\"N\": 129", "\"N\": 2"),
        MODEL.replace("\"schema_version\": 1", "\"schema_version\": 2"),
        "{ not json".to_string(),
    ] {
        let o = fracmus(dir.path(), &bad, &["verify"]);
        assert_eq!(code(&o), 2, "{bad}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_fracmus")).arg("verify").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn psi_condition_only_is_informational() {
    let dir = TempDir::new().unwrap();
    let cfg = MODEL.replace("{\"trials\": 10}", "{\"checks\": [\"psi_condition\"]}");
    let o = fracmus(dir.path(), &cfg, &["verify"]);
    assert_eq!(code(&o), 0);
    let csv = read(dir.path(), "verify.csv");
    assert!(csv.lines().any(|l| l.starts_with("psi_condition,psi-condition,") && l.contains(",info,")));
    let map = read(dir.path(), "psi_condition.csv");
    assert_eq!(map.lines().count(), 1 + 127);
}

#[test]
fn strict_convexity_modes() {
    let dir = TempDir::new().unwrap();
    let cfg = MODEL
        .replace("\"p\": 2.0", "\"p\": 1.5")
        .replace("{\"trials\": 10}", "{\"checks\": [\"psi_condition\"]}");
    let warn = fracmus(dir.path(), &cfg, &["verify"]);
    assert_eq!(code(&warn), 0);
    assert!(String::from_utf8_lossy(&warn.stderr).contains("warning"));
    let fail = fracmus(dir.path(), &cfg, &["--strict-convexity", "fail", "verify"]);
    assert_eq!(code(&fail), 2);
}

#[test]
fn solve_model_problem() {
    let dir = TempDir::new().unwrap();
    let o = fracmus(dir.path(), MODEL, &["solve"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("converged=true"));
    let sol = read(dir.path(), "solution.csv");
    assert_eq!(sol.lines().count(), 1 + 129);
    assert!(sol.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,0.0000000000000000e0"));
    let diag = read(dir.path(), "diagnostics.csv");
    assert!(diag.starts_with("iteration,path_max_energy,residual_norm"));
    let last: Vec<&str> = diag.lines().last().unwrap().split(',').collect();
    assert!(last[2].parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn solve_failure_exit_codes() {
    let dir = TempDir::new().unwrap();
    let zero = MODEL.replace("{\"family\": \"power\"}", "{\"family\": \"zero\"}");
    assert_eq!(code(&fracmus(dir.path(), &zero, &["solve"])), 3);
    let linear = MODEL.replace("{\"family\": \"power\"}", "{\"family\": \"linear\"}");
    assert_eq!(code(&fracmus(dir.path(), &linear, &["solve"])), 3);
    let budget = MODEL.replace("\"seed\": 1,", "\"seed\": 1, \"solver\": {\"budget\": 1},");
    assert_eq!(code(&fracmus(dir.path(), &budget, &["solve"])), 4);
    let no_h = MODEL.replace("\"h\": {\"family\": \"power\"},", "");
    assert_eq!(code(&fracmus(dir.path(), &no_h, &["solve"])), 2);
}

#[test]
fn study_reports_orders() {
    let dir = TempDir::new().unwrap();
    let cfg = MODEL
        .replace("\"alpha\": 0.9", "\"alpha\": 0.5")
        .replace("\"beta\": 1.0", "\"beta\": 0.5")
        .replace("\"seed\": 1,", "\"seed\": 1, \"study\": {\"n_min\": 65, \"n_max\": 1025},");
    let o = fracmus(dir.path(), &cfg, &["study"]);
    assert_eq!(code(&o), 0);
    let csv = read(dir.path(), "study.csv");
    assert!(csv.starts_with("case,N,error,order\n"));
    for line in csv.lines().filter(|l| l.contains(" zero,")) {
        assert_eq!(line.split(',').nth(2), Some("0.0000000000000000e0"));
    }
    let text = stdout(&o);
    let order = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(label)).unwrap();
        line.split("fitted_order=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!(order("power_rule alpha=0.5 k=2") >= 1.5);
    assert!(order("ftc sin") >= 0.8);
}

fn write_samples(dir: &Path, n: usize, f: impl Fn(f64) -> f64) -> PathBuf {
    let mut text = String::from("t,u\n");
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        text.push_str(&format!("{t:.17e},{:.17e}\n", f(t)));
    }
    let path = dir.join("input.csv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn norm_of_constant_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let input = write_samples(dir.path(), 33, |_| 1.0);
    let o = fracmus(dir.path(), MODEL, &["norm", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("luxemburg_norm="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.5f64.sqrt()).abs() < 1e-8);
}

#[test]
fn fracop_integral_of_constant() {
    // I^{1/2} 1 = t^{1/2} / Γ(3/2) = 2 sqrt(t / π).
    let dir = TempDir::new().unwrap();
    let cfg = MODEL.replace("\"alpha\": 0.9", "\"alpha\": 0.5");
    let input = write_samples(dir.path(), 17, |_| 1.0);
    let o = fracmus(dir.path(), &cfg, &["fracop", "--op", "integral-left", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = read(dir.path(), "fracop.csv");
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - 2.0 * (v[0] / std::f64::consts::PI).sqrt()).abs() < 1e-12, "{line}");
    }
    let bad = write_samples(dir.path(), 2, |_| 1.0);
    let o = fracmus(dir.path(), &cfg, &["fracop", "--op", "hilfer-left", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}
