//! End-to-end runs of the `zsgame` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const COURNOT: &str = r#"{
    "game": {"family": "cournot", "params": {"demand_intercept": 10, "b": 0.5, "c": [1, 2, 3]}},
    "subsidy": {"vertex": 4, "f_bounds": [0, 8]}
}"#;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zsgame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with(config: &str, args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, config).unwrap();
    let mut all = vec!["--config", path.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"))
}

#[test]
fn solve_prints_closed_form_equilibrium() {
    let cfg = configs_dir().join("cournot_asymmetric.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "solve"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(3.33333, 2.66667, 2.00000)"), "{text}");
    assert!(text.contains("equilibrium f = 4.00000"), "{text}");
}

#[test]
fn json_report_round_trips_byte_identically() {
    let cfg = configs_dir().join("cournot_asymmetric.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "--format", "json", "solve"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let value = stdout_json(&out);
    let mut again = serde_json::to_string_pretty(&value).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    assert_eq!(value["command"], "solve");
    assert_eq!(value["inputs"]["game"]["family"], "cournot");
    assert_eq!(value["seed"], 0);
    let x: Vec<f64> = serde_json::from_value(value["equilibrium"]["x"].clone()).unwrap();
    for (got, want) in x.iter().zip([10.0 / 3.0, 8.0 / 3.0, 2.0]) {
        assert!((got - want).abs() <= 1e-6);
    }
}

#[test]
fn csv_has_one_row_per_player() {
    let cfg = configs_dir().join("cournot_symmetric.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "--format", "csv", "solve"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("player,"));
}

#[test]
fn verify_passes_at_solved_point() {
    let out = run_with(COURNOT, &["--format", "json", "verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let value = stdout_json(&out);
    assert_eq!(value["passed"], true);
    assert_eq!(value["theorem1_passed"], true);
    assert_eq!(value["theorem2_passed"], true);
}

#[test]
fn verify_rejects_non_equilibrium_candidate() {
    let symmetric = configs_dir().join("cournot_symmetric.json");
    let out = run(&[
        "--config",
        symmetric.to_str().unwrap(),
        "verify",
        "--candidate",
        "0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let record = stderr_json(&out);
    assert_eq!(record["error"], "not_a_nash");
    let gaps: Vec<f64> = serde_json::from_value(record["details"]["deviation_gaps"].clone()).unwrap();
    // Best response to zero rivals is 4.5 with profit 20.25.
    for g in gaps {
        assert!((g - 20.25).abs() <= 1e-6, "{g}");
    }
}

#[test]
fn verify_accepts_closed_form_candidate() {
    let out = run_with(
        COURNOT,
        &["verify", "--candidate", "3.3333333333333335,2.6666666666666665,2"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_b_is_a_config_error_naming_the_field() {
    let out = run_with(&COURNOT.replace("0.5", "1.5"), &["solve"]);
    assert_eq!(out.status.code(), Some(2));
    let record = stderr_json(&out);
    assert_eq!(record["field"], "game.params.b");
    assert_eq!(record["exit_code"], 2);
}

#[test]
fn unknown_key_is_a_config_error() {
    let out = run_with(&COURNOT.replace("\"vertex\"", "\"vertx\": 1, \"vertex\""), &["solve"]);
    assert_eq!(out.status.code(), Some(2));
    let record = stderr_json(&out);
    assert!(record["message"].as_str().unwrap().contains("vertx"));
}

#[test]
fn malformed_json_is_a_config_error() {
    let out = run_with("{ \"game\": ", &["solve"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = run(&["--config", "/nonexistent/run.json", "solve"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn iteration_cap_gives_non_convergence() {
    let cfg = COURNOT.replace("\"subsidy\"", "\"solver\": {\"max_iter\": 1}, \"subsidy\"");
    let out = run_with(&cfg, &["solve"]);
    assert_eq!(out.status.code(), Some(3));
    let record = stderr_json(&out);
    assert_eq!(record["error"], "non_convergence");
    assert_eq!(record["details"]["iterations"], 1);
    assert!(record["details"]["last"].is_array());
}

#[test]
fn oracle_compares_grid_and_continuous() {
    let cfg = configs_dir().join("single_concave.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "oracle",
        "--resolution",
        "101",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value = stdout_json(&out);
    assert_eq!(value["weak_duality"], true);
    let row = &value["players"][0];
    assert!(row["maximin_discrepancy"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn oracle_refuses_oversized_grid() {
    let cfg = configs_dir().join("cournot_asymmetric.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "oracle", "--resolution", "600"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["field"], "resolution");
}

#[test]
fn seed_flag_overrides_config() {
    let symmetric = configs_dir().join("cournot_symmetric.json");
    let out = run(&[
        "--config",
        symmetric.to_str().unwrap(),
        "--seed",
        "17",
        "--format",
        "json",
        "solve",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value = stdout_json(&out);
    assert_eq!(value["seed"], 17);
    assert_eq!(value["multi_start"]["agree"], true);
}
