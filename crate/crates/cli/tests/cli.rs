use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsq")).args(args).output().expect("gsq runs")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn small_n_is_a_config_error() {
    let o = gsq(&["xi-specific", "--n-atoms", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N <= 3"));
    assert_eq!(gsq(&["sweep-n", "--n-list", "3,8"]).status.code(), Some(2));
    assert_eq!(gsq(&["xi-specific", "--gamma", "1.5"]).status.code(), Some(2));
}

#[test]
fn bad_flags_and_files_are_config_errors() {
    assert_eq!(gsq(&["xi-specific", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(gsq(&["husimi", "--n-atoms", "4", "--theta-points", "8"]).status.code(), Some(2));
    assert_eq!(gsq(&["xi-specific", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"n_atom": 8}"#).unwrap();
    assert_eq!(gsq(&["xi-specific", "--config", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn vanishing_witness_exits_singular_with_inf_row() {
    let o = gsq(&["xi-specific", "--n-atoms", "8", "--chi-prime", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let (h, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let k = h.iter().position(|c| c == "xi").unwrap();
    assert_eq!(rows[0][k], "inf");
}

#[test]
fn coherent_state_is_never_squeezed() {
    let out = stdout(&gsq(&[
        "sweep-chi", "--n-atoms", "12", "--gamma", "1", "--chi-prime-min", "1e-3", "--chi-prime-max", "5e-2",
        "--chi-prime-points", "7",
    ]));
    let (h, rows) = csv_rows(&out);
    assert_eq!(h, ["chi_prime", "chi", "numerator", "denominator", "xi", "xi_db", "singular"]);
    assert_eq!(rows.len(), 7);
    assert!(col(&h, &rows, "xi").iter().all(|&x| x >= 0.999));
}

#[test]
fn single_point_sweep_matches_xi_specific() {
    let sweep = stdout(&gsq(&[
        "sweep-chi", "--n-atoms", "10", "--chi-prime-min", "2e-2", "--chi-prime-max", "2e-2", "--chi-prime-points",
        "1",
    ]));
    let specific = stdout(&gsq(&["xi-specific", "--n-atoms", "10", "--chi-prime", "2e-2"]));
    let (h1, r1) = csv_rows(&sweep);
    let (h2, r2) = csv_rows(&specific);
    assert_eq!(col(&h1, &r1, "xi"), col(&h2, &r2, "xi"));
    assert_eq!(col(&h1, &r1, "numerator"), col(&h2, &r2, "numerator"));
}

#[test]
fn runs_are_bit_identical() {
    let args = ["sweep-gamma", "--n-atoms", "10", "--chi-prime", "2e-2", "--gamma-step", "0.1"];
    let a = stdout(&gsq(&args));
    let b = stdout(&gsq(&args));
    assert_eq!(a, b);
    let (h, rows) = csv_rows(&a);
    assert_eq!(rows.len(), 11);
    let xi = col(&h, &rows, "xi");
    assert!(xi.iter().all(|x| x.is_finite()));
    assert!(xi[0] >= 1.0 && xi[10] >= 1.0, "endpoints {} {}", xi[0], xi[10]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cfg.json");
    std::fs::write(&p, r#"{"n_atoms": 8, "chi_prime": 0.02, "format": "json"}"#).unwrap();
    let path = p.to_str().unwrap();
    let v: Value = serde_json::from_str(&stdout(&gsq(&["xi-specific", "--config", path]))).unwrap();
    assert_eq!(v["config"]["n_atoms"], 8);
    assert_eq!(v["rows"][0]["n_atoms"], 8);
    let v: Value =
        serde_json::from_str(&stdout(&gsq(&["xi-specific", "--config", path, "--n-atoms", "10"]))).unwrap();
    assert_eq!(v["config"]["n_atoms"], 10);
    assert_eq!(v["config"]["chi_prime"], 0.02);
}

#[test]
fn json_report_reruns_from_embedded_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let o = gsq(&[
        "xi-resource", "--n-atoms", "8", "--chi-prime-points", "9", "--format", "json", "--out",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(a["schema"], "gsq-report/1");
    assert_eq!(a["command"], "xi-resource");
    assert!(a["details"]["benchmark"]["min_variance"].is_number());
    let b: Value =
        serde_json::from_str(&stdout(&gsq(&["xi-resource", "--config", first.to_str().unwrap()])))
            .unwrap();
    assert_eq!(a["rows"], b["rows"]);
    // a report for one command cannot drive another
    assert_eq!(gsq(&["xi-specific", "--config", first.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn singular_json_values_are_null() {
    let o = gsq(&["xi-specific", "--n-atoms", "8", "--chi-prime", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["rows"][0]["xi"].is_null());
    assert_eq!(v["rows"][0]["singular"], true);
}

#[test]
fn prepare_reports_optimal_gamma() {
    let out = stdout(&gsq(&["xi-prepare", "--n-atoms", "10", "--chi-prime", "2e-2"]));
    let (h, rows) = csv_rows(&out);
    let g = col(&h, &rows, "gamma")[0];
    let xi = col(&h, &rows, "xi")[0];
    assert!((0.0..=1.0).contains(&g));
    let specific = stdout(&gsq(&["xi-specific", "--n-atoms", "10", "--chi-prime", "2e-2", "--gamma", "0.5"]));
    let (h2, r2) = csv_rows(&specific);
    assert!(xi <= col(&h2, &r2, "xi")[0] + 1e-12);
}

#[test]
fn sweep_n_ends_with_oscillator_row() {
    let out = stdout(&gsq(&["sweep-n", "--n-list", "4,6", "--chi-points", "9"]));
    let (h, rows) = csv_rows(&out);
    assert_eq!(h, ["n_atoms", "xi", "xi_db", "chi_prime_opt", "chi_opt", "numerator", "denominator"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][0], "inf");
    let xi = col(&h, &rows, "xi");
    assert!(xi[0] <= xi[1] && xi[1] <= xi[2]);
}

#[test]
fn husimi_grid_is_normalized_and_peaks_south() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.json");
    let o = gsq(&[
        "husimi", "--n-atoms", "6", "--state", "south", "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    let norm = v["details"]["normalization"].as_f64().unwrap();
    assert!((norm - 1.0).abs() < 1e-3, "{norm}");
    assert!(v["details"]["peak_theta"].as_f64().unwrap() > 3.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 128 * 256);
    assert_eq!(v["columns"], serde_json::json!(["theta", "phi", "q", "u", "v"]));
}

#[test]
fn shipped_recipes_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = gsq_cli::config::FileConfig::load(&path).unwrap();
        assert!(cfg.command.is_some(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}
