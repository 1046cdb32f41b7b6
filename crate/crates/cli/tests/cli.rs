use std::path::Path;
use std::process::{Command, Output};

use qcap_core::capacity::{mf_closed_form, mf_q2_closed, Bound, Protocol};
use qcap_core::TransducerParams;

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn design(dir: &Path, kind: &str, n: usize) -> String {
    let path = dir.join(format!("{kind}{n}.json"));
    let path_str = path.to_str().unwrap().to_string();
    let o = qcap(&["design", kind, "--stages", &n.to_string(), "--out", &path_str]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path_str
}

#[test]
fn design_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = design(dir.path(), "mf", 5);
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: TransducerParams = serde_json::from_str(&text).unwrap();
    let direct = qcap_core::maximally_flat_params(5, 1.0, 0.0).unwrap().params;
    assert_eq!(parsed, direct);

    let o = qcap(&["design", "uniform", "--stages", "2"]);
    let uni: TransducerParams = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(uni.kappa_a, 2.0);
    assert_eq!(uni.couplings, vec![1.0, 1.0, 1.0]);
}

#[test]
fn invalid_stage_count_is_usage_error() {
    assert_eq!(qcap(&["design", "mf", "--stages", "-1"]).status.code(), Some(2));
    assert_eq!(qcap(&["validate", "--stages-max", "1"]).status.code(), Some(2));
}

#[test]
fn capacity_of_zero_stage_design() {
    let dir = tempfile::tempdir().unwrap();
    let path = design(dir.path(), "mf", 0);
    let o = qcap(&["capacity", "--params", &path, "--protocol", "two-way", "--bound", "pure"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "numeric-quadrature");
    assert_eq!(v["protocol"], "two-way");
    assert_eq!(v["bound"], "pure");
    let value = v["value"].as_f64().unwrap();
    assert!((value / mf_q2_closed(0) - 1.0).abs() < 1e-6);
}

#[test]
fn capacity_thermal_lower_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = design(dir.path(), "mf", 4);
    let o = qcap(&["capacity", "--params", &path, "--protocol", "one-way", "--bound", "thermal-lower", "--nbar", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let closed = mf_closed_form(4, Protocol::OneWay, Bound::ThermalLower, 1.0).unwrap().unwrap();
    assert!((v["value"].as_f64().unwrap() / closed - 1.0).abs() < 1e-5);
}

#[test]
fn missing_or_malformed_params_file() {
    let o = qcap(&["capacity", "--params", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n_stages\": 0}").unwrap();
    let o = qcap(&["capacity", "--params", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn non_convergence_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = design(dir.path(), "mf", 3);
    let o = qcap(&[
        "capacity",
        "--params",
        &path,
        "--protocol",
        "two-way",
        "--rel-tol",
        "1e-15",
        "--abs-tol",
        "1e-300",
        "--max-intervals",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn spectrum_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = design(dir.path(), "mf", 1);
    let o = qcap(&["spectrum", "--params", &path, "--points", "11"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "omega,efficiency");
    assert_eq!(lines.len(), 12);
    let mid: Vec<f64> = lines[6].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(mid, vec![0.0, 1.0]);
}

#[test]
fn sweep_mf_pure_is_increasing() {
    let o = qcap(&["sweep", "--family", "mf", "--n-min", "0", "--n-max", "8", "--protocol", "one-way"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,Q,abs_error,closed_form"));
    let q: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(q.len(), 9);
    assert!(q.windows(2).all(|w| w[1] > w[0]));
    assert!(q[8] < 4.0 * 3f64.sqrt() * std::f64::consts::PI / std::f64::consts::LN_2);
}

#[test]
fn sweep_thermal_bounds_bracket() {
    let run = |bound: &str| -> Vec<f64> {
        let o = qcap(&[
            "sweep",
            "--family",
            "mf",
            "--n-max",
            "8",
            "--protocol",
            "two-way",
            "--bound",
            bound,
            "--nbar",
            "10",
        ]);
        stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
    };
    let lower = run("thermal-lower");
    let upper = run("thermal-upper");
    let gaps: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| u - l).collect();
    assert!(gaps.iter().all(|g| *g > 0.0));
    assert!(gaps[8] < gaps[0]);
}

#[test]
fn single_row_sweep() {
    let o = qcap(&["sweep", "--family", "uniform", "--n-min", "0", "--n-max", "0"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn butterworth_netlist() {
    let o = qcap(&["butterworth", "--order", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 3);
    assert_eq!(v["C"][0].as_f64().unwrap(), 2.0);
    let o = qcap(&["butterworth", "--stages", "4", "--verify"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_mismatch"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["convention"], "series-inductor-first");
}

#[test]
fn optimize_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("samples.csv");
    let args = [
        "optimize",
        "--stages",
        "0",
        "--objective",
        "q1",
        "--axis",
        "kappa_a:1:3:5",
        "--axis",
        "kappa_b:1:3:5",
        "--fix",
        "delta=0",
        "--refine",
        "1",
        "--samples-csv",
        csv.to_str().unwrap(),
    ];
    let a = qcap(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let first_csv = std::fs::read_to_string(&csv).unwrap();
    let b = qcap(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first_csv, std::fs::read_to_string(&csv).unwrap());
    assert!(first_csv.starts_with("kappa_a,kappa_b,Q\n"));
    assert_eq!(first_csv.lines().count(), 1 + 2 * 25);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["best_point"]["kappa_a"], 2.0);
    assert_eq!(v["best_point"]["delta"], 0.0);
}

#[test]
fn optimize_rejects_bad_axes() {
    assert_eq!(qcap(&["optimize", "--stages", "0", "--axis", "kappa_a:1:3"]).status.code(), Some(2));
    assert_eq!(qcap(&["optimize", "--stages", "0", "--axis", "g_b:0.1:1:3"]).status.code(), Some(2));
    assert_eq!(qcap(&["optimize", "--stages", "3"]).status.code(), Some(2));
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let o = qcap(&["validate", "--stages-max", "2", "--no-search"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["failed"], 0);

    let o = qcap(&["validate", "--stages-max", "2", "--no-search", "--kappa-scale", "1.01"]);
    assert_eq!(o.status.code(), Some(5));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed_nilpotency = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"].as_str().unwrap().starts_with("nilpotency") && c["passed"] == false);
    assert!(failed_nilpotency);
}

#[test]
fn thread_cap_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_qcap"))
        .args(["sweep", "--family", "mf", "--n-max", "2"])
        .env("QCAP_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_qcap"))
        .args(["sweep", "--family", "mf", "--n-max", "2"])
        .env("QCAP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
