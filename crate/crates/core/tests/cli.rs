use std::process::Command;

use serde_json::Value;

use stepfact::cli::{main_with_args, parse_args, Command as Sub, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use stepfact::interpolation::half_index_k;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("stepfact").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--output", "json"]);
    let (code, out, err) = run(&full);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "stepfact/1");
    v
}

#[test]
fn parse_builds_a_config() {
    let c = parse_args(["stepfact", "eval", "--form", "delta", "--a", "1", "--b", "1", "--x", "4"]).unwrap();
    assert!(matches!(c.command, Sub::Eval { x: 4, .. }));
    assert!(parse_args(["stepfact", "eval", "--form", "delta", "--a", "1"]).is_err());
}

#[test]
fn eval_delta_four() {
    let (code, out, _) = run(&["eval", "--form", "delta", "--a", "1", "--b", "1", "--x", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("value=105.0000000000"), "{out}");
    assert_eq!(run_json(&["eval", "--form", "gamma", "--a", "1", "--b", "1", "--x", "10"])["value"], 3628800.0);
}

#[test]
fn eval_reports_overflow_as_null() {
    let v = run_json(&["eval", "--form", "gamma", "--a", "1", "--b", "1", "--x", "200"]);
    assert!(v["value"].is_null());
    assert!(v["log_value"].as_f64().unwrap() > 700.0);
}

#[test]
fn k_routes() {
    let v = run_json(&["k", "--a", "1", "--b", "1", "--routes", "all"]);
    let k = half_index_k(1.0_f64, 1.0).unwrap();
    assert_eq!(v["k"].as_f64().unwrap().to_bits(), k.consensus.to_bits());
    assert!((v["k"].as_f64().unwrap() - 0.7978845608).abs() < 1e-10);
    for route in ["quadrature", "product", "em"] {
        assert!(v["routes"][route].is_number(), "{route}");
    }
    let v = run_json(&["k", "--a", "1", "--b", "1", "--routes", "product"]);
    assert_eq!(v["routes"].as_object().unwrap().len(), 1);
}

#[test]
fn constants_text() {
    let (code, out, _) = run(&["constants", "--a", "1", "--b", "1"]);
    assert_eq!(code, EXIT_OK);
    for line in ["A=2.5066282746", "B=2.3316439816", "C=1.7724538509"] {
        assert!(out.lines().any(|l| l == line), "{line} in {out}");
    }
}

#[test]
fn integrate_variants() {
    let (code, out, _) = run(&["integrate", "--p", "1", "--m", "1", "--n", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("value=1.5707963268"));
    let v = run_json(&["integrate", "--pq", "--a", "2", "--b", "1"]);
    assert!((v["P"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!((v["Q"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(run(&["integrate", "--p", "1", "--pq", "--a", "1", "--b", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["integrate", "--p", "1"]).0, EXIT_USAGE);
}

#[test]
fn interpolate_half_index() {
    let v = run_json(&["interpolate", "--form", "delta", "--a", "1", "--b", "1", "--x", "2.5"]);
    let expected = 8.0 * (2.0 / std::f64::consts::PI).sqrt();
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-11);
}

#[test]
fn bernoulli_table_csv() {
    let (code, out, _) = run(&["table", "bernoulli", "--max", "12"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,numerator,denominator,fraction");
    assert_eq!(lines.len(), 14);
    assert_eq!(lines[3], "2,1,6,1/6");
    assert_eq!(lines[13], "12,-691,2730,-691/2730");
    assert_eq!(run(&["table", "bernoulli", "--max", "13"]).0, EXIT_USAGE);
}

#[test]
fn csv_numbers_round_trip() {
    let (_, out, _) = run(&["integrate", "--pq", "--a", "1", "--b", "1", "--output", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
    let v = run_json(&["integrate", "--pq", "--a", "1", "--b", "1"]);
    for (h, x) in header.iter().zip(&row) {
        assert_eq!(v[*h].as_f64().unwrap().to_bits(), x.to_bits(), "{h}");
    }
}

#[test]
fn usage_errors() {
    let (code, _, err) = run(&["eval", "--form", "delta", "--a", "one", "--b", "1", "--x", "4"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--a"), "{err}");
    assert_eq!(run(&["eval", "--form", "delta", "--a", "1", "--x", "4"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["constants", "--a", "0", "--b", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["interpolate", "--form", "theta", "--a", "1", "--b", "1", "--x", "-1"]).0, EXIT_USAGE);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Usage"));
}

#[test]
fn verify_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let (code, out, _) = run(&["verify", "--grid", "2", "--json", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("suite=grid2\npass="), "{out}");
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file["summary"]["fail"], 0);
    let (_, csv, _) = run(&["verify", "--grid", "2", "--output", "csv"]);
    assert_eq!(csv.lines().count() as u64, 1 + file["summary"]["pass"].as_u64().unwrap());
}

#[test]
fn identical_invocations_identical_output() {
    let args = ["verify", "--grid", "2", "--output", "json"];
    assert_eq!(run(&args).1, run(&args).1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.txt");
    let (code, out, _) = run(&["k", "--a", "2", "--b", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("k=1.2533141373"));
}

#[test]
fn tolerance_environment_variable() {
    let bin = env!("CARGO_BIN_EXE_stepfact");
    let status = |tol: &str| {
        Command::new(bin)
            .args(["integrate", "--p", "1", "--m", "1", "--n", "2"])
            .env("STEPFACT_TOL", tol)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status("1e-6"), Some(EXIT_OK));
    assert_eq!(status("1e-16"), Some(EXIT_USAGE));
    assert_eq!(status("abc"), Some(EXIT_USAGE));
    let out = Command::new(bin)
        .args(["integrate", "--p", "1", "--m", "1", "--n", "2", "--tol", "1e-6"])
        .env("STEPFACT_TOL", "1e-16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
}

#[test]
fn computation_failures_exit_one() {
    // a tolerance below the quadrature floor turns the reduction report into a failure
    let (code, _, err) = run(&["verify", "--grid", "1", "--lo", "1", "--hi", "1", "--tol", "1e-15"]);
    assert_eq!(code, EXIT_FAILURE, "{err}");
}
