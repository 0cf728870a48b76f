use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use xges::graph::io::from_json;
use xges::metrics::shd;
use xges::simulate::TruthJson;

fn xges(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xges")).current_dir(dir).args(args).output().unwrap()
}

fn simulate(dir: &Path, prefix: &str, d: &str, rho: &str, n: &str, seed: &str) {
    let out = xges(dir, &["simulate", "--d", d, "--rho", rho, "--n", n, "--seed", seed, "--out-prefix", prefix]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_then_fit_recovers_the_truth() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p, "sim", "15", "2", "100000", "0");
    let out = xges(
        p,
        &[
            "fit", "--input", "sim.csv", "--method", "xges", "--alpha", "2", "--output", "g.json", "--stats",
            "s.json", "--truth", "sim.truth.json", "--trace", "t.jsonl",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g = from_json(&fs::read_to_string(p.join("g.json")).unwrap()).unwrap();
    let truth: TruthJson = serde_json::from_str(&fs::read_to_string(p.join("sim.truth.json")).unwrap()).unwrap();
    let truth_cpdag = xges::Pdag::try_from(truth.cpdag).unwrap();
    assert_eq!(shd(&g, &truth_cpdag).unwrap(), 0);

    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("s.json")).unwrap()).unwrap();
    assert_eq!(stats["method"], "xges");
    assert_eq!(stats["eval"]["shd"], 0);
    let steps = fs::read_to_string(p.join("t.jsonl")).unwrap().lines().count() as u64;
    assert_eq!(Some(steps), stats["operators_applied"].as_u64());
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p, "a", "20", "3", "500", "7");
    simulate(p, "b", "20", "3", "500", "7");
    assert_eq!(fs::read(p.join("a.csv")).unwrap(), fs::read(p.join("b.csv")).unwrap());
    assert_eq!(fs::read(p.join("a.truth.json")).unwrap(), fs::read(p.join("b.truth.json")).unwrap());
}

#[test]
fn fit_is_deterministic_and_text_output_works() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p, "sim", "8", "2", "1000", "3");
    for name in ["a.txt", "b.txt"] {
        let out = xges(p, &["fit", "--input", "sim.csv", "--method", "ges-r", "--output", name]);
        assert!(out.status.success());
    }
    let a = fs::read_to_string(p.join("a.txt")).unwrap();
    assert_eq!(a, fs::read_to_string(p.join("b.txt")).unwrap());
    assert!(xges::graph::io::from_text(&a).is_ok());
}

#[test]
fn usage_and_data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p, "sim", "4", "1", "100", "0");
    let out = xges(p, &["fit", "--input", "sim.csv", "--method", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = xges(p, &["simulate", "--d", "5", "--rho", "-1", "--n", "10", "--out-prefix", "x"]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(xges(p, &["fit", "--input", "missing.csv"]).status.code(), Some(2));

    fs::write(p.join("nan.csv"), "a,b\n1,2\nNaN,3\n").unwrap();
    assert_eq!(xges(p, &["fit", "--input", "nan.csv"]).status.code(), Some(2));

    fs::write(p.join("ragged.csv"), "1,2\n3\n").unwrap();
    assert_eq!(xges(p, &["fit", "--input", "ragged.csv"]).status.code(), Some(2));
}

#[test]
fn benchmark_rows_and_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = xges(
        p,
        &["benchmark", "--d", "5,6", "--rho", "1", "--n", "300", "--seeds", "0..3", "--methods", "ges,xges", "--output", "b.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(p.join("b.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("method,d,rho,n,alpha,seed,shd"));
    assert_eq!(lines.count(), 2 * 3 * 2);

    fs::write(p.join("grid.json"), r#"{"seeds": []}"#).unwrap();
    let out = xges(p, &["benchmark", "--grid", "grid.json", "--output", "e.csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(p.join("e.csv")).unwrap().lines().count(), 1);
}

#[test]
fn benchmark_records_failed_cells() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = xges(p, &["benchmark", "--d", "0,3", "--n", "100", "--methods", "xges", "--output", "f.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = fs::read_to_string(p.join("f.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn oracle_command() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p, "sim", "4", "1.5", "2000", "2");
    let out = xges(p, &["oracle", "--input", "sim.csv", "--output", "o.json"]);
    assert!(out.status.success());
    let o = from_json(&fs::read_to_string(p.join("o.json")).unwrap()).unwrap();
    assert_eq!(o.d(), 4);
}
