use std::process::{Command, Output};

use serde_json::Value;

fn chsh_zn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chsh-zn"))
        .args(args)
        .env_remove("CHSH_ZN_SEED")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = chsh_zn(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn result<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"] == name)
        .unwrap_or_else(|| panic!("no result named {name}"))
}

#[test]
fn strategy_value_n3() {
    let r = report(&["strategy", "value", "--n", "3", "--via", "both"]);
    assert_eq!(r["passed"], true);
    let v = result(&r, "value_direct")["value"].as_f64().unwrap();
    assert!((v - 5.0 / 6.0).abs() < 1e-12);
    assert_eq!(result(&r, "value_bias")["criterion"], 4);
}

#[test]
fn classical_value_inconsistent_system() {
    let r = report(&["game", "classical", "--n", "5", "--m1", "0", "--m2", "1"]);
    assert_eq!(result(&r, "classical_value")["value"].as_f64(), Some(0.75));
}

#[test]
fn classical_value_consistent_system() {
    let r = report(&["game", "classical", "--n", "4", "--m1", "2", "--m2", "2"]);
    assert_eq!(result(&r, "classical_value")["value"].as_f64(), Some(1.0));
}

#[test]
fn glued_witness() {
    let r = report(&["bcs", "glued", "--witness"]);
    let get = |n: &str| result(&r, n)["value"].as_f64().unwrap();
    assert!((get("witness_trace_re") - 4.0).abs() < 1e-9);
    assert!((get("witness_inner_product_re") - 0.5).abs() < 1e-9);
    assert!(get("witness_anticommutator_norm") < 1e-9);
}

#[test]
fn glued_check_rejects_literal_mapping() {
    let r = report(&["bcs", "glued"]);
    assert_eq!(result(&r, "literal_mapping_fails_glue")["passed"], true);
    assert_eq!(result(&r, "E_value")["passed"], true);
    assert_eq!(result(&r, "F_value")["passed"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(chsh_zn(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(chsh_zn(&["strategy", "value"]).status.code(), Some(2));
    assert_eq!(chsh_zn(&["strategy", "value", "--n", "1"]).status.code(), Some(2));
    assert_eq!(chsh_zn(&["relations", "check", "--n", "4"]).status.code(), Some(2));
    assert_eq!(chsh_zn(&["bcs", "magic-square", "--witness"]).status.code(), Some(2));
}

#[test]
fn identical_runs_match_apart_from_wall_time() {
    let args = ["sos", "verify", "--cert", "g3", "--trials", "10", "--seed", "7"];
    let mut a = report(&args);
    let mut b = report(&args);
    a.as_object_mut().unwrap().remove("wall_time");
    b.as_object_mut().unwrap().remove("wall_time");
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_chsh-zn"))
        .args(["relations", "check"])
        .env("CHSH_ZN_SEED", "99")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["seed"], 99);
}

#[test]
fn npa_export_writes_readable_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g3.dat-s");
    let r = report(&["npa", "export", "--n", "3", "--level", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(r["passed"], true);
    assert_eq!(result(&r, "sdpa_round_trip")["value"].as_f64(), Some(1.0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.trim() == "1 = nBLOCK"));
}

#[test]
fn entropy_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("entropy.csv");
    let r = report(&["strategy", "entropy", "--n-max", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(r["data"]["csvSchemaVersion"], 1);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,value,entropy_ratio"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn group_order_n4() {
    let r = report(&["group", "enumerate", "--n", "4"]);
    assert_eq!(result(&r, "alice_order")["value"].as_f64(), Some(128.0));
    assert_eq!(result(&r, "bob_order")["value"].as_f64(), Some(128.0));
}

#[test]
fn bias_spectrum_reports_multiplicity() {
    let r = report(&["bias", "spectrum", "--n", "5"]);
    assert_eq!(r["data"]["method"], "dense");
    assert_eq!(r["data"]["multiplicity"], 1);
}
