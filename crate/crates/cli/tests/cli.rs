//! End-to-end checks of the binary: exit-status contract, determinism, and
//! the JSON surfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gl2flat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("gl2flat-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn zero_fixture_residuals_pass() {
    let out = run(&["residuals", "--fixture", "zero", "--expect-zero"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("max |residual| = 0"));
}

#[test]
fn injected_failure_fixture_violates_the_exit_contract() {
    let out = run(&[
        "residuals",
        "--fixture",
        r#"{"name":"b_of_x3","coeffs":[0,1,0,0]}"#,
        "--point",
        "0,0,0,0",
        "--expect-zero",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("TOLERANCE VIOLATED"));
}

#[test]
fn characteristic_covector_is_flagged() {
    let out = run(&["symbol", "--values", "0,0,0,0", "--xi", "1,0,0,0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("characteristic covector"));
    let generic = run(&["symbol", "--values", "0,0,0,0", "--xi", "1,0.5,-0.3,2"]);
    assert!(!stdout(&generic).contains("characteristic covector"));
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    let args = [
        "residuals",
        "--fixture",
        r#"{"name":"a_of_x0","coeffs":[0.3,-0.8,0.5,0.2]}"#,
        "--points",
        "7",
        "--seed",
        "3",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let other_seed = run(&[
        "residuals",
        "--fixture",
        r#"{"name":"a_of_x0","coeffs":[0.3,-0.8,0.5,0.2]}"#,
        "--points",
        "7",
        "--seed",
        "4",
    ]);
    assert_ne!(first.stdout, other_seed.stdout);
}

#[test]
fn spencer_accepts_a_jet_bundle() {
    let bundle = r#"{
        "h": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
        "dh": [
            [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]
        ],
        "g_basis": [[[0,1,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]]
    }"#;
    let out = run(&["spencer", "--input", bundle, "--expect-zero", "--connection"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("torsion-free            yes"));
}

#[test]
fn taylor_solve_emits_the_layer_table() {
    let seed_path = temp_path("seed.json");
    std::fs::write(
        &seed_path,
        r#"{"values":[0,0,0,0],"gradients":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let series_path = temp_path("series.json");
    let out = run(&[
        "taylor-solve",
        "--order",
        "3",
        "--seed-file",
        &format!("@{}", seed_path.display()),
        "--out",
        series_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("verified residual through order 2"));
    let series: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&series_path).unwrap()).unwrap();
    assert_eq!(series["order"], 3);
    std::fs::remove_file(seed_path).ok();
    std::fs::remove_file(series_path).ok();
}

#[test]
fn lax_check_passes_on_exact_fixtures() {
    let out = run(&[
        "lax-check",
        "--fixture",
        r#"{"name":"a_of_x0","coeffs":[0,0,1,0]}"#,
        "--points",
        "8",
        "--expect-zero",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn surface_trace_reports_small_discrepancy() {
    let out = run(&[
        "surface-trace",
        "--fixture",
        "zero",
        "--start",
        "0,0,0,0,0.3",
        "--times",
        "0.2,0.2",
        "--step",
        "0.01",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("discrepancy"));
}

#[test]
fn fixture_subcommand_normalises_names() {
    let out = run(&["fixture", "--spec", "zero", "--point", "0,0,0,0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(r#"{"name":"zero"}"#));
}

#[test]
fn malformed_json_is_a_usage_error() {
    let out = run(&["residuals", "--jet", "{not json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("parsing"));
}

#[test]
fn jet_without_hessians_is_fine_for_first_order_operations() {
    let jet = r#"{
        "base_point": [0,0,0,0],
        "a": {"value": 0.2, "grad": [0.1,0,0,0]},
        "b": {"value": 0.0, "grad": [0,0,0,0]},
        "c": {"value": 0.0, "grad": [0,0,0,0]},
        "d": {"value": 0.0, "grad": [0,0,0,0]}
    }"#;
    let out = run(&["residuals", "--jet", jet]);
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["bridge", "--jet", jet]);
    assert!(out.status.success());
}
