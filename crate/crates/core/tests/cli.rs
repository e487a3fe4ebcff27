use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_two-tower")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn pell_and_classdata() {
    let v = json(&["pell", "66"]);
    assert_eq!((v["x_num"].as_str(), v["y_num"].as_str(), v["norm"].as_i64()), (Some("65"), Some("8"), Some(1)));
    let v = json(&["classdata", "-66"]);
    assert_eq!(v["h_wide"], 8);
    let v = json(&["classdata", "66"]);
    assert_eq!((v["h_wide"].as_u64(), v["h_narrow"].as_u64()), (Some(2), Some(4)));
}

#[test]
fn symbols() {
    assert_eq!(json(&["jacobi", "3", "19"])["symbol"], -1);
    assert_eq!(json(&["jacobi", "-1", "7"])["symbol"], -1);
    assert_eq!(json(&["quartic2", "73"])["symbol"], 1);
}

#[test]
fn decompose_and_indices() {
    let v = json(&["decompose", "--case", "2q1q2", "--q1", "3", "--q2", "11"]);
    assert_eq!(v["witnesses"]["y1"], "8");
    assert_eq!(v["witnesses"]["y2"], "1");
    assert_eq!(json(&["qindex", "--gens", "3,11"])["q_index"], "4");
    assert_eq!(json(&["qindex", "--gens", "-1,3,11"])["q_index"], "8");
    assert_eq!(json(&["kuroda", "--gens", "-1,3,11", "--q", "8"])["h2"], "1");
    assert_eq!(json(&["hasse", "--gens", "-3,11,2", "--n0", "2"])["q"], 1);
}

#[test]
fn iwasawa_and_tower() {
    let v = json(&["splitting", "3", "2"]);
    assert_eq!((v["count_full"].as_u64(), v["count_real"].as_u64()), (Some(2), Some(1)));
    assert_eq!(json(&["kida", "--pair", "3,11"])["lambda_minus"], 1);
    let v = json(&["predict", "--d", "33", "--n", "1"]);
    assert_eq!(v["cl2_type"], serde_json::json!(["2", "4"]));
    assert_eq!(v["cl2_provenance"], "cited structure theorem");
    let v = json(&["pi", "73"]);
    assert_eq!(v["gaussian"]["rendered"], "3 ± 8i");
    assert_eq!(v["selection"], "undetermined");
}

#[test]
fn table_is_default() {
    let out = run(&["predict", "--d", "33", "--n", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("cl2_type") && l.ends_with("[2, 8]")), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["predict", "--d", "41", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "--case", "q1q2", "--q1", "3", "--q2", "19"]).status.code(), Some(2));
    assert_eq!(run(&["hasse", "--gens", "-1,3", "--n0", "5"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--lemma", "nope", "--bound", "10"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--lemma", "splitting", "--bound", "100"]).status.code(), Some(0));
}

#[test]
fn scan_json_and_cache_file() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("classes.jsonl");
    let cache_arg = cache.to_str().unwrap();
    let args = ["scan", "--lemma", "quad_table", "--bound", "60", "--jobs", "2", "--cache", cache_arg];
    let mut cold = json(&args);
    assert_eq!(cold["failures"], serde_json::json!([]));
    let lines = std::fs::read_to_string(&cache).unwrap().lines().count();
    assert!(lines > 10, "{lines} cache lines");
    let mut warm = json(&args);
    cold["wall_time"] = Value::Null;
    warm["wall_time"] = Value::Null;
    assert_eq!(cold, warm);

    std::fs::write(&cache, "{\"format\":\"two-tower-class-cache\",\"version\":0}\n").unwrap();
    assert_eq!(run(&args[..]).status.code(), Some(2));
}
