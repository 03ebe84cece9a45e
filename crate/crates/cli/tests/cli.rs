use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitdist")).args(args).env_remove("UDF_PRECISION_BITS").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--field", "gaussian", "--prime", "5", "--k", "2", "--R", "2", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["measured_points"], 13);
    assert_eq!(r["measured_unit_pairs"], 16);
    assert_eq!(r["translation_bound"], 20);
    for f in ["pointset.csv", "pointset.json", "report.json", "scatter.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("pointset.csv")).unwrap();
    assert!(csv.starts_with("index,re,im,c0,c1\n"));
    assert_eq!(csv.lines().count(), 14);

    let c = run(&["count", "--input", path(&dir.path().join("pointset.csv")), "--method", "exact", "--field", "gaussian", "--oracle"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(json(&c)["census"]["unit_pairs"], 16);
}

#[test]
fn generate_class_group_and_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--field", "qsqrt-5", "--prime", "3", "--k", "2", "--R", "2", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let units: Vec<String> = json(&out)["units"].as_array().unwrap().iter().map(|u| u["display"].as_str().unwrap().to_string()).collect();
    assert!(units.contains(&"(-1 + 4√-5)/9".to_string()), "{units:?}");

    let out = run(&["generate", "--field", "gaussian", "--prime", "5", "--k", "0", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let w = json(&out)["warnings"].to_string();
    assert!(w.contains("no nontrivial units"), "{w}");

    let out = run(&["generate", "--field", "gaussian", "--R", "1", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["generate", "--field", "gaussian", "--R", "1", "--allow-small-r", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = run(&["generate", "--field", "qi-sqrt5", "--prime", "29", "--k", "1", "--translates", "3", "--out", path(d.path())]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["pointset.csv", "pointset.json", "report.json", "scatter.svg"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let x = run(&["exponent", "--T", "3", "--p", "13"]);
    let y = run(&["exponent", "--T", "3", "--p", "13"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn count_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("square.csv");
    std::fs::write(&sq, "re,im\n0,0\n1,0\n1,1\n0,1\n").unwrap();
    let out = run(&["count", "--input", path(&sq), "--eps", "1e-9", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["census"]["unit_pairs"], 4);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "re,im\n0,0\n1,zero\n").unwrap();
    let out = run(&["count", "--input", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(&["count", "--input", path(&sq), "--eps", "0.5"]);
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn grid_baseline_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("grid.csv");
    let out = run(&["grid", "--n", "2500", "--out", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let g = json(&out);
    assert_eq!(g["measured_by"], "hashed");
    assert_eq!(g["measured_pairs"], g["predicted_pairs"]);
    let out = run(&["count", "--input", path(&f), "--oracle", "--oracle-subsets", "5", "--oracle-size", "500", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["census"]["unit_pairs"], g["measured_pairs"]);

    let out = run(&["grid", "--n", "1000000"]);
    assert_eq!(out.status.code(), Some(0));
    let g = json(&out);
    assert_eq!(g["measured_by"], "lattice");
    assert_eq!(g["measured_pairs"], g["predicted_pairs"]);
}

#[test]
fn ledger_commands() {
    let out = run(&["exponent", "--T", "", "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["k"], "45");
    assert_eq!(j["u"], "23/2");

    let out = run(&["gs-check", "--T", "5,13,17,29,37"]);
    let j = json(&out);
    assert_eq!((j["d"].as_u64(), j["r_bound"].as_u64(), j["gs_satisfied"].as_bool()), (Some(5), Some(5), Some(true)));
    let out = run(&["gs-check", "--T", "3,5,7,11,13,17", "--S", "103"]);
    assert_eq!(out.status.code(), Some(8));

    let out = run(&["find-split-primes", "--T", "", "--count", "2", "--require-1-mod-4"]);
    assert_eq!(json(&out)["primes"], serde_json::json!([5, 13]));
    let out = run(&["r2", "--alpha", "25"]);
    assert_eq!(json(&out)["r2"], 12);
    // 4 (d_1 - d_3): 5 -> 8, 3 -> 0
    let out = run(&["r2", "--alpha", "5"]);
    assert_eq!(json(&out)["r2"], 8);
    let out = run(&["r2", "--alpha", "3"]);
    assert_eq!(json(&out)["r2"], 0);
    let out = run(&["grid", "--n", "25"]);
    let j = json(&out);
    assert_eq!((j["m"].as_u64(), j["measured_pairs"].as_u64()), (Some(5), Some(48)));
}

#[test]
fn precision_range() {
    let out = Command::new(env!("CARGO_BIN_EXE_unitdist"))
        .args(["exponent", "--T", "3", "--p", "13"])
        .env("UDF_PRECISION_BITS", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_unitdist"))
        .args(["exponent", "--T", "3", "--p", "13"])
        .env("UDF_PRECISION_BITS", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["precision_bits"], 64);
}
