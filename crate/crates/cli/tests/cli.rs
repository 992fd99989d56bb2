use std::process::{Command, Output};

use serde_json::Value;

fn ratioset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratioset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = ratioset(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn theta_value_and_certificate() {
    let v = json(&["theta", "-n", "6", "-b", "11"]);
    assert_eq!(v["value"], 3);
    assert!(v.get("certificate").is_none());
    let v = json(&["theta", "-n", "6", "-b", "11", "--certificate"]);
    assert_eq!(v["certificate"].as_array().unwrap().len(), 3);
}

#[test]
fn dense_subcommands() {
    let v = json(&["dense", "powersum", "-m", "7", "-n", "4", "-p", "2"]);
    assert_eq!(v["status"], "NotDense");
    let v = json(&["dense", "powersum", "-m", "8", "-n", "4", "-p", "2"]);
    assert_eq!(v["status"], "Dense");
    let v = json(&["dense", "s2", "-n", "3", "-p", "3"]);
    assert_eq!(v["status"], "Dense");
    let v = json(&["dense", "poly", "--poly", "[1,0,1]", "-p", "13"]);
    assert_eq!(v["status"], "Dense");
    let v = json(&[
        "dense",
        "poly",
        "--poly",
        "(X+1)^6(X+2)^10(X+3)^15",
        "-p",
        "5",
    ]);
    assert_eq!(v["status"], "Unknown");
    let v = json(&["dense", "poly", "--poly", "(X-3)^2", "-p", "7"]);
    assert_eq!(v["status"], "NotDense");
}

#[test]
fn closure_subcommands() {
    assert_eq!(
        json(&["closure", "ratio", "-m", "7", "-n", "4", "--value", "15"])["member"],
        false
    );
    assert_eq!(
        json(&["closure", "ratio", "-m", "8", "-n", "4", "--value", "15"])["member"],
        true
    );
    assert_eq!(
        json(&["closure", "member", "-m", "1", "-n", "4", "--value", "16"])["member"],
        true
    );
}

#[test]
fn witnesses_and_oracle() {
    let v = json(&[
        "witness", "poly", "--poly", "(X)(X-1)", "--roots", "0,1", "-r", "5", "-u", "10", "-p", "5",
    ]);
    assert!(v["exponent"].as_i64().unwrap() > 10);
    assert!(v["x1"].is_string());
    let v = json(&[
        "witness", "powersum", "-m", "2", "-n", "3", "-p", "3", "-r", "3", "-u", "5",
    ]);
    assert_eq!(v["a"].as_array().unwrap().len(), 2);
    let v = json(&["oracle", "theta", "-n", "6", "-b", "11", "--gmax", "5"]);
    assert_eq!(v["value"], 3);
    let v = json(&[
        "oracle",
        "spectrum",
        "--poly",
        "(X+1)^6(X+2)^10(X+3)^15",
        "-p",
        "7",
        "--xmax",
        "500",
        "--modulus",
        "6",
    ]);
    assert!(!v["differences"]
        .as_array()
        .unwrap()
        .contains(&Value::from(1)));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "witness",
        "poly",
        "--poly",
        "(X-1)^2(X+1)^3",
        "--roots",
        "0,1",
        "-r",
        "49",
        "-u",
        "8",
        "-p",
        "7",
    ];
    assert_eq!(ratioset(&args).stdout, ratioset(&args).stdout);
}

#[test]
fn human_output() {
    let out = ratioset(&["--human", "theta", "-n", "6", "-b", "11"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "theta(6, 11) = 3"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(ratioset(&["theta", "-n", "6"]).status.code(), Some(1));
    assert_eq!(
        ratioset(&["dense", "powersum", "-m", "2", "-n", "4", "-p", "9"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ratioset(&["theta", "-n", "2", "-b", "100000000"])
            .status
            .code(),
        Some(2)
    );
    let out = ratioset(&[
        "witness",
        "poly",
        "--poly",
        "(X)(X-1)",
        "--roots",
        "0,1",
        "-r",
        "2/7",
        "-u",
        "40",
        "-p",
        "3",
        "--precision",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
    assert_eq!(ratioset(&["--help"]).status.code(), Some(0));
    assert_eq!(ratioset(&["--version"]).status.code(), Some(0));
}
