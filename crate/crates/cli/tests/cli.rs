use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn dmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmp")).args(args).arg("--allow-small-p").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn refine_args() -> Vec<&'static str> {
    vec!["refine", "--y", "3/8,0", "--tau", "5/8", "--phi", "1,2,1", "--x", "1/2,0", "--s", "1/2", "--seed", "7"]
}

#[test]
fn worked_iwahori_record() {
    let out = dmp(&refine_args());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let rec = &v["record"];
    assert_eq!(rec["c"], "5^0");
    assert_eq!(rec["provenance"]["a_terms"].as_array().unwrap().len(), 4);
    assert_eq!(rec["provenance"]["count_c"], 0);
    assert!(rec["terms"].as_array().unwrap().is_empty());
    for check in v["measure_checks"].as_array().unwrap() {
        assert_eq!(check["holds"], true);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = dmp(&refine_args());
    let b = dmp(&refine_args());
    assert_eq!(a.stdout, b.stdout);
    let a = dmp(&["lift", "--x", "1/2,0", "--s", "1/2", "--phi", "1,2,1", "--seed", "3"]);
    let b = dmp(&["lift", "--x", "1/2,0", "--s", "1/2", "--phi", "1,2,1", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn synthesize_then_solve_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.json");
    let vector = dir.path().join("v.json");
    let text = r#"{"coefficients":[{"orbit":[1,1],"value":"-3/7"},{"orbit":[2],"value":"11/2"}],
                  "normalization":"","lambda_c":1,"k":2}"#;
    std::fs::write(&coeffs, text).unwrap();
    let out = dmp(&["synthesize", "--input", coeffs.to_str().unwrap(), "--output", vector.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = dmp(&["solve", "--input", vector.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let got: Vec<(Value, Value)> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["orbit"].clone(), e["value"].clone()))
        .collect();
    assert_eq!(
        got,
        vec![(serde_json::json!([1, 1]), Value::from("-3/7")), (serde_json::json!([2]), Value::from("11/2"))]
    );
}

#[test]
fn multiplicity_vector_is_ingested() {
    let dir = tempfile::tempdir().unwrap();
    let matrix_out = dmp(&["measure"]);
    assert!(matrix_out.status.success());
    let cm = json(&matrix_out)["coefficient_matrix"].clone();
    let probes = cm["probes"].as_array().unwrap();
    let entries: Vec<Value> = probes.iter().zip([3u64, 1]).map(|(p, m)| serde_json::json!([p, m])).collect();
    let mv = serde_json::json!({ "r": "0/1", "entries": entries, "source": "test" });
    let path = dir.path().join("mv.json");
    std::fs::write(&path, mv.to_string()).unwrap();
    let matrix = dir.path().join("cm.json");
    std::fs::write(&matrix, cm.to_string()).unwrap();
    let out = dmp(&["solve", "--input", path.to_str().unwrap(), "--matrix", matrix.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    // the regular coefficient is the Iwahori multiplicity over its density
    let m11: num_rational::BigRational = cm["m"][1][1].as_str().unwrap().parse().unwrap();
    let expected = num_rational::BigRational::from_integer(1.into()) / m11;
    assert_eq!(v["coefficients"][1]["value"], Value::from(format!("{}/{}", expected.numer(), expected.denom())));
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON error")
}

#[test]
fn exit_codes_and_error_objects() {
    let out = dmp(&["--q", "4", "measure"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_of(&out);
    assert_eq!(e["kind"], "validation");
    assert_eq!(e["module"], "apartment");
    assert_eq!(e["operation"], "group_config");

    let out = dmp(&["--n", "4", "--K", "1", "measure"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["module"], "measures");

    let out = dmp(&["refine", "--y", "0,0", "--tau", "1", "--x", "3/4,0", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["module"], "refine");

    let out = dmp(&["--m", "3", "lattice", "--x", "1/4,0", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": 2, "q": 7, "K": 1}"#).unwrap();
    let out = dmp(&["--config", cfg.to_str().unwrap(), "measure"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["table"]["k"], 1);
    assert_eq!(v["table"]["pairs"][0]["phi"]["q"], 7);
    let out = dmp(&["--config", cfg.to_str().unwrap(), "--q", "5", "measure"]);
    assert_eq!(json(&out)["table"]["pairs"][0]["phi"]["q"], 5);
    assert!(!Path::new(&dir.path().join("missing.json")).exists());
    let out = dmp(&["--config", dir.path().join("missing.json").to_str().unwrap(), "measure"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_defaults_pass() {
    let out = dmp(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 9);
}
