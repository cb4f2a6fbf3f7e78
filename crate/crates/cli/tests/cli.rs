use std::collections::HashSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cantor-frame"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cantor-frame-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn matrix_symmetric_is_diagonal() {
    let out = run(&["matrix", "--p", "1/2", "--m", "2", "--which", "km-closed"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("provenance=closed-form"));
    assert!(header.contains("depth=2"));
    assert_eq!(lines.next(), Some("row,col,value"));
    let rows: Vec<(usize, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    let diag = [1.75, 0.75, 0.25, 0.25];
    for (i, j, v) in rows {
        assert_eq!(i, j);
        assert!((v - diag[i]).abs() < 1e-15);
    }
}

#[test]
fn matrix_headers_echo_provenance() {
    for (which, tag) in [("km-gram", "gram-oracle"), ("km-filtration", "filtration")] {
        let out = run(&["matrix", "--p", "0.3", "--m", "3", "--which", which]);
        assert!(stdout(&out).lines().next().unwrap().contains(&format!("provenance={tag}")));
    }
}

#[test]
fn size_caps_exit_3() {
    assert_eq!(run(&["matrix", "--p", "0.3", "--m", "9", "--which", "km-gram"]).status.code(), Some(3));
    assert_eq!(run(&["matrix", "--p", "0.3", "--m", "11"]).status.code(), Some(3));
    assert_eq!(run(&["topeig", "--p", "0.3", "--M", "13"]).status.code(), Some(3));
    assert_eq!(run(&["moments", "--p", "1/3", "--n", "33", "--mode", "rational"]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["matrix", "--p", "1.5", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["matrix", "--p", "0.3", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--grid", "0.1:0.5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--grid", "0.0:0.5:0.1"]).status.code(), Some(2));
    assert_eq!(run(&["topeig", "--p", "0.3", "--M", "3"]).status.code(), Some(2));
}

#[test]
fn shallow_truncation_bracket_exit_5() {
    let out = run(&["topeig", "--p", "0.2", "--M", "6"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--M"));
}

#[test]
fn spectrum_symmetric_small() {
    let v = json(&["spectrum", "--p", "1/2", "--m", "2"]);
    let eig = floats(&v["eigenvalues"]);
    let want = [0.25, 0.25, 0.75, 1.75];
    for (g, w) in eig.iter().zip(want) {
        assert!((g - w).abs() < 1e-12);
    }
    assert!((v["trace"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let clusters = v["clusters"].as_array().unwrap();
    assert_eq!(clusters[0]["multiplicity"], 2);
    assert!(v["tail_bound"].as_f64().is_some());
}

#[test]
fn spectrum_trace_is_level_count() {
    for (p, m) in [("0.3", 5usize), ("2/7", 7), ("0.9", 3)] {
        let v = json(&["spectrum", "--p", p, "--m", &m.to_string()]);
        assert!((v["trace"].as_f64().unwrap() - (m + 1) as f64).abs() < 1e-10);
    }
}

#[test]
fn spectrum_schatten_field() {
    // closed-form oracle: 2 - 2^{-m} once and 2^{-(n-1)}(1 - 2^{-(m-n+1)}) with multiplicity 2^{n-1}
    let m = 8;
    let mut oracle = (2.0 - 0.5f64.powi(m)).powi(2);
    for n in 1..=m {
        let v = 0.5f64.powi(n - 1) * (1.0 - 0.5f64.powi(m - n + 1));
        oracle += (1u64 << (n - 1)) as f64 * v * v;
    }
    let v = json(&["spectrum", "--p", "1/2", "--m", "8", "--r", "2"]);
    let got = v["schatten"]["partial_sum"].as_f64().unwrap();
    assert!((got - oracle).abs() < 1e-10);
    assert_eq!(v["frobenius_sq"].as_f64().unwrap(), got);
    assert!(got < 6.0);
}

#[test]
fn moments_rational_and_float() {
    let v = json(&["moments", "--p", "1/2", "--n", "3", "--mode", "rational"]);
    assert_eq!(v["mu"], serde_json::json!(["1", "2", "4", "8"]));
    assert_eq!(v["p"], "1/2");
    assert_eq!(v["mode"], "rational");
    let v = json(&["moments", "--p", "1/3", "--n", "2"]);
    let mu = floats(&v["mu"]);
    for (g, w) in mu.iter().zip([1.0, 2.25, 5.25]) {
        assert!((g - w).abs() < 1e-12);
    }
    for p in ["0.2", "3/5", "0.97"] {
        assert_eq!(floats(&json(&["moments", "--p", p, "--n", "5"])["mu"])[0], 1.0);
    }
    let out = run(&["moments", "--p", "0.5", "--n", "3", "--mode", "rational"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn topeig_symmetric() {
    let v = json(&["topeig", "--p", "1/2", "--M", "20"]);
    assert!((v["lambda_scalar"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(v["simple"], true);
    for key in ["p", "lambda_scalar", "lambda_direct", "tolerance", "simple"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn topeig_asymmetric_agrees() {
    let v = json(&["topeig", "--p", "0.3", "--M", "12"]);
    assert_eq!(v["agree"], true);
    let scalar = v["lambda_scalar"].as_f64().unwrap();
    let tol = v["tolerance"].as_f64().unwrap();
    // 2x2 compression bound at p = 0.3
    let (p, q) = (0.3f64, 0.7f64);
    let a = 1.0 / (2.0 * p * q);
    let b = (2.0 * p - 1.0) * (p * q).sqrt() / (2.0 * p * q);
    let lower = 0.5 * (a + 1.0) + (0.25 * (a - 1.0).powi(2) + b * b).sqrt();
    assert!(scalar >= lower - tol);
}

#[test]
fn selfcheck_default_passes() {
    let out = run(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    let refs: HashSet<&str> = text.lines().map(|l| l.split("  ").next().unwrap().trim()).collect();
    assert!(refs.len() >= 10);
    assert!(text.lines().all(|l| l.contains(" PASS ")));
}

#[test]
fn selfcheck_perturbation_is_caught() {
    let out = run(&["selfcheck", "--M", "8", "--perturb"]);
    assert_eq!(out.status.code(), Some(1));
    let failing: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| l.contains(" FAIL "))
        .map(|l| l.split("  ").next().unwrap().trim().to_string())
        .collect();
    assert_eq!(failing, vec!["Prop 4.3".to_string()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Prop 4.3"));
}

fn sweep_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_rows_and_symmetry() {
    let out = run(&["sweep", "--grid", "0.3:0.7:0.1", "--M", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "p,lambda_direct,lambda_scalar,lower_bound,mu1,mu2,mu3,tail_bound"
    );
    let rows = sweep_rows(&text);
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    for r in &rows {
        assert!(r[3] <= r[2] + r[7]);
    }
    let half = rows.iter().find(|r| r[0] == 0.5).unwrap();
    assert!((half[2] - 2.0).abs() < 1e-8);
    assert_eq!(&half[4..7], &[2.0, 4.0, 8.0]);
    for (a, b) in [(0, 4), (1, 3)] {
        assert!((rows[a][1] - rows[b][1]).abs() < 1e-9);
        assert!((rows[a][2] - rows[b][2]).abs() < 1e-9);
    }
}

#[test]
fn deterministic_and_thread_independent() {
    let first = scratch("sweep1.csv");
    let second = scratch("sweep2.csv");
    let status = bin()
        .args(["sweep", "--grid", "0.3:0.7:0.1", "--M", "6", "--output"])
        .arg(&first)
        .env("CANTOR_FRAME_THREADS", "1")
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .args(["sweep", "--grid", "0.3:0.7:0.1", "--M", "6", "--output"])
        .arg(&second)
        .env("CANTOR_FRAME_THREADS", "3")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    let a = run(&["spectrum", "--p", "0.35", "--m", "5"]);
    let b = run(&["spectrum", "--p", "0.35", "--m", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let bad = bin()
        .args(["sweep", "--grid", "0.2:0.4:0.1", "--M", "6"])
        .env("CANTOR_FRAME_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn failed_runs_leave_no_file() {
    let path = scratch("never.json");
    let _ = std::fs::remove_file(&path);
    let out = bin()
        .args(["topeig", "--p", "0.3", "--M", "13", "--output"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!path.exists());
    let leftovers = std::fs::read_dir(path.parent().unwrap())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
        .count();
    assert_eq!(leftovers, 0);

    let good = scratch("moments.json");
    let status = bin()
        .args(["moments", "--p", "2/5", "--n", "4", "--mode", "rational", "--output"])
        .arg(&good)
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(&good).unwrap()).unwrap();
    assert_eq!(v["mu"].as_array().unwrap().len(), 5);
}
