use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mixinglab::slnreduce::DiagonalSplit;
use mixinglab::torus::CSV_HEADER;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mixinglab"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(name)
}

fn run(command: &str, cfg: &Path, out: Option<&Path>) -> Output {
    let mut c = bin();
    c.args([command, "--config"]).arg(cfg);
    if let Some(out) = out {
        c.arg("--out").arg(out);
    }
    c.output().unwrap()
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn bound_prints_inverse_root_120() {
    let out = run("bound", &config("configs/bound.toml"), None);
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 120f64.powf(-0.5)).abs() < 1e-12);
    assert_eq!(format!("{v:.12}"), "0.091287092918");
}

#[test]
fn bound_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bound.json");
    let out = run("bound", &config("configs/bound_balanced.toml"), Some(&path));
    assert!(out.status.success());
    let report = json(&std::fs::read(&path).unwrap());
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["applicable"], true);
    let printed: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert_eq!(report["value"].as_f64().unwrap(), printed);
}

#[test]
fn decay_csv_has_ten_calibrated_rows() {
    let out = run("decay", &config("tests/fixtures/decay_small.toml"), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,powers,sigma1_list,q_used,R_factor,rhs_bound,exact_re,exact_im,exact_abs,mc_est_re,mc_est_im,mc_stderr,ratio"
    );
    assert_eq!(CSV_HEADER.join(","), text.lines().next().unwrap());
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10);
    for (n, row) in rows.iter().enumerate() {
        let n = n as i64 + 1;
        assert_eq!(row.len(), 13);
        assert_eq!(row[1], format!("{n};{}", 2 * n));
        let ratio: f64 = row[12].parse().unwrap();
        assert!(ratio <= 1.0, "n = {n}: ratio {ratio}");
        assert_ne!(row[9], "NA");
    }
}

#[test]
fn correlate_emits_single_report() {
    let out = run("correlate", &config("tests/fixtures/correlate_small.toml"), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out.stdout);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["k"], 1);
    assert_eq!(r["powers"], serde_json::json!([3]));
    assert_eq!(r["functions"].as_array().unwrap().len(), 2);
    assert!(r["mc_seed"].is_u64());
}

#[test]
fn reduce_emits_split() {
    let out = run("reduce", &config("configs/reduce.toml"), None);
    assert!(out.status.success());
    let split: DiagonalSplit = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(split.product().unwrap(), split.input);
    assert!(split.parity_compensation.is_some());
}

#[test]
fn calibrate_reports_verdict() {
    let out = run("calibrate", &config("tests/fixtures/calibrate_small.toml"), None);
    assert!(out.status.success());
    let r = json(&out.stdout);
    assert_eq!(r["valid"], true);
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[1]["q_used"], "1/3");
}

#[test]
fn verify_small_suite_passes() {
    let out = run("verify", &config("tests/fixtures/verify_small.toml"), None);
    assert!(out.status.success());
    let r = json(&out.stdout);
    assert_eq!(r["passed"], true);
    assert_eq!(r["seed"], 11);
    assert_eq!(r["suites"].as_array().unwrap().len(), 6);
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[bound]\nform = \"sl2_standard\"\na_vals = [2.0]\n").unwrap();
    let out = run("bound", &path, None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("a_vals"));

    std::fs::write(&path, "[bound]\nform = \"cutoff\"\n").unwrap();
    let out = run("bound", &path, None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("bound.a_values"));
}

#[test]
fn inapplicable_bound_is_flagged_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.toml");
    std::fs::write(&path, "[bound]\na_values = [2.0, 2.5]\nc_prime = 3.0\n").unwrap();
    let out = run("bound", &path, None);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("not applicable"));
}

#[test]
fn missing_config_file_fails() {
    let out = run("verify", Path::new("/nonexistent/cfg.toml"), None);
    assert_eq!(out.status.code(), Some(1));
}
