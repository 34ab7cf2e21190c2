use std::process::{Command, Output};

use serde_json::Value;

fn rosen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rosen"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs a command expected to succeed and parses its JSON.
fn ok(args: &[&str]) -> Value {
    let out = rosen(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(args: &[&str]) -> (i32, Value) {
    let out = rosen(args);
    let doc = serde_json::from_slice(&out.stdout).expect("stdout is JSON even on error");
    (out.status.code().expect("exit code"), doc)
}

#[test]
fn eval_modular_example() {
    let v = ok(&["eval", "q=3 [0,-1,0,-2,0,-3]", "--json"]);
    let conv: Vec<&str> = v["outputs"]["convergents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(conv, ["0", "1", "0", "1/3", "0", "1/6"]);
    assert_eq!(v["outputs"]["value"]["exact"], "1/6");
}

#[test]
fn eval_sqrt_two() {
    let a = ok(&["eval", "q=4 [1]", "--json"]);
    assert_eq!(a["outputs"]["value"]["radical"], "sqrt(2)");
    assert!(a["outputs"]["value"]["decimal"]
        .as_str()
        .unwrap()
        .starts_with("1.414213562"));
    assert_eq!(a["outputs"]["value"]["precision_bits"], 64);
    let b = ok(&["eval", "q=4 [2,1,1]", "--json"]);
    assert_eq!(a["outputs"]["value"], b["outputs"]["value"]);
}

#[test]
fn expand_examples() {
    let v = ok(&["expand", "q=3", "5/7", "--json"]);
    assert_eq!(
        v["outputs"]["expansion"]["coeffs"],
        serde_json::json!([1, 3, -2])
    );
    assert_eq!(v["outputs"]["length"], 3);
    assert_eq!(v["outputs"]["oracle_distance"], 3);
    let v = ok(&["expand", "q=4", "[2,1,1]", "--json"]);
    assert_eq!(v["outputs"]["expansion"]["coeffs"], serde_json::json!([1]));
    let v = ok(&["expand", "--q", "5", "0", "--json"]);
    assert_eq!(v["outputs"]["expansion"]["coeffs"], serde_json::json!([0]));
}

#[test]
fn check_reports_pattern() {
    let v = ok(&["check", "q=4 [3,1,2,1]", "--json"]);
    assert_eq!(v["outputs"]["geodesic"], false);
    assert_eq!(v["outputs"]["reason"], "pattern (1,2,1) at index 2");
    let v = ok(&["check", "q=4 [5,-2,3]", "--oracle", "--json"]);
    assert_eq!(v["outputs"]["geodesic"], true);
    assert_eq!(v["outputs"]["cross_check"]["agrees"], true);
    let v = ok(&["check", "q=3 [1,3,-2]", "--json"]);
    assert_eq!(v["outputs"]["via_oracle"], true);
}

#[test]
fn reduce_and_enumerate() {
    let v = ok(&["reduce", "q=4 [2,1,1]", "--oracle", "--json"]);
    assert_eq!(v["outputs"]["reduced"]["coeffs"], serde_json::json!([1]));
    assert_eq!(v["outputs"]["value_preserved"], true);
    assert_eq!(v["outputs"]["cross_check"]["agrees"], true);
    let v = ok(&["enumerate", "q=5", "[0,3]", "--oracle", "--json"]);
    assert_eq!(v["outputs"]["count"], 1);
    assert_eq!(v["outputs"]["bound"], "5");
    assert_eq!(v["outputs"]["d_chain"], 3);
    assert_eq!(v["outputs"]["cross_check"]["agrees"], true);
}

#[test]
fn chain_and_distance() {
    let v = ok(&["chain", "q=5", "[0,3]", "--json"]);
    assert_eq!(v["outputs"]["d_chain"], 3);
    assert_eq!(v["outputs"]["faces"].as_array().unwrap().len(), 3);
    assert_eq!(v["outputs"]["bridges"].as_array().unwrap().len(), 2);
    let v = ok(&["distance", "q=3", "inf", "5/7", "--json"]);
    assert_eq!(v["outputs"]["distance"], 3);
    assert_eq!(v["outputs"]["agrees"], true);
}

#[test]
fn limit_of_periodic_expansion() {
    let v = ok(&["limit", "q=4 [2;(2)]", "--tol", "1e-9", "--json"]);
    let out = &v["outputs"];
    assert_eq!(out["converged"], true);
    assert!(out["terms"].as_u64().unwrap() <= 30);
    let est: f64 = out["interval"]["estimate"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((est - (1.0 + 2f64.sqrt())).abs() < 1e-9);
    let v = ok(&["limit", "q=inf [;(1)]", "--tol", "1e-4", "--json"]);
    assert_eq!(v["outputs"]["converged"], true);
    assert!(v["outputs"]["repeated_convergent"].is_null());
}

#[test]
fn exact_strings_round_trip() {
    let v = ok(&["eval", "q=7 [2,-1,3]", "--json"]);
    let exact = v["outputs"]["value"]["exact"].as_str().unwrap();
    let again = ok(&["expand", "q=7", exact, "--json"]);
    assert_eq!(again["inputs"]["target"]["exact"], exact);
    assert_eq!(
        again["inputs"]["target"]["coeffs"],
        v["outputs"]["value"]["coeffs"]
    );
}

#[test]
fn exit_codes() {
    let (code, doc) = exit_code(&["eval", "q=5 [1,,2]"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "parse");
    assert!(doc["error"]["message"]
        .as_str()
        .unwrap()
        .contains("position 7"));
    let (code, _) = exit_code(&["eval", "[1,2]"]);
    assert_eq!(code, 2);
    let (code, doc) = exit_code(&["expand", "q=4", "inf"]);
    assert_eq!(code, 3);
    assert_eq!(doc["error"]["kind"], "domain");
    let (code, _) = exit_code(&["expand", "q=4", "1"]);
    assert_eq!(code, 3);
    let (code, _) = exit_code(&["chain", "q=inf", "[2,2]"]);
    assert_eq!(code, 3);
}

#[test]
fn stdout_is_json_only() {
    let out = rosen(&["eval", "q=4 [1]"]);
    assert!(serde_json::from_slice::<Value>(&out.stdout).is_ok());
    assert!(!out.stderr.is_empty());
    let quiet = rosen(&["eval", "q=4 [1]", "--json"]);
    assert!(quiet.stderr.is_empty());
}

#[test]
fn render_svg() {
    let dir = tempfile::tempdir().unwrap();
    let edge = dir.path().join("edge.svg");
    ok(&[
        "render",
        "q=4 [0]",
        "--svg",
        edge.to_str().unwrap(),
        "--json",
    ]);
    let text = std::fs::read_to_string(&edge).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches(r#"class="vertex""#).count(), 2);

    let fig = dir.path().join("chain.svg");
    let v = ok(&[
        "render",
        "q=5 [0,3]",
        "--chain",
        "--svg",
        fig.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(v["outputs"]["faces"], 3);
    let text = std::fs::read_to_string(&fig).unwrap();
    assert_eq!(text.matches(r#"class="face""#).count(), 3);

    let (code, _) = exit_code(&["render", "q=4 [1]"]);
    assert_eq!(code, 3);
}
