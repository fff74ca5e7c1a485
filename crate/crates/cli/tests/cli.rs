use std::process::{Command, Output};

use serde_json::Value;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toda-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn single_cell_csv() {
    let out = forge(&["dim-table", "--specs", "c:3", "--n", "4", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["spec,k,n,dim_oracle,dim_formula,raw,agree", "c:3,3,4,8,8,8,true"]);
}

#[test]
fn claims_carry_their_source() {
    let out = forge(&["dim-table", "--specs", "d:2,e7", "--n", "1..6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["pass"], true);
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for row in rows {
        assert_eq!(row["dim_oracle"]["source"], "oracle");
        assert_eq!(row["dim_formula"]["source"], "formula");
    }
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert_eq!(keys.last().unwrap().as_str(), "wall_time");
}

#[test]
fn integrality_far_out() {
    let out = forge(&["dim-table", "--specs", "e8", "--n", "1..200", "--check", "integrality"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["cells"], 200);
}

#[test]
fn dual_check_skips_infinite_specs() {
    let out = forge(&["dim-table", "--specs", "u1,c:2..3,e6", "--n", "1..8", "--check", "dual"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["skipped"], serde_json::json!(["u1"]));
    assert_eq!(r["results"]["cells"], 24);
}

#[test]
fn group_orders() {
    let e6 = json(&forge(&["group-info", "e6"]));
    let mut cards: Vec<u64> = e6["results"]["class_cardinalities"]["value"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    cards.sort_unstable();
    assert_eq!(cards, [1, 1, 4, 4, 4, 4, 6]);
    assert_eq!(json(&forge(&["group-info", "e7"]))["results"]["order"]["value"], 48);
    let c5 = json(&forge(&["group-info", "c:5", "--n", "2"]));
    assert_eq!(c5["results"]["class_cardinalities"]["value"], serde_json::json!([1, 1, 1, 1, 1]));
}

#[test]
fn infinite_group_info_is_a_usage_error() {
    assert_eq!(forge(&["group-info", "o2"]).status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(forge(&["dim-table", "--n", "5..2"]).status.code(), Some(1));
    assert_eq!(forge(&["dim-table", "--specs", "q:3"]).status.code(), Some(1));
    assert_eq!(forge(&["verify", "wronskian", "--out", "csv"]).status.code(), Some(1));
    assert_eq!(forge(&["--tol-rank", "-1", "group-info", "e6"]).status.code(), Some(1));
    assert_eq!(forge(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn failing_threshold_exits_two() {
    // a 1e-9 residual bound cannot be met at h = 0.05
    let out = forge(&["verify", "toda", "--n", "1", "--h", "0.05", "--max-res", "1e-9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn pair_files_and_unimodularity() {
    let dir = std::env::temp_dir().join(format!("toda-forge-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"{"v0": ["1"], "v1": ["0", "1"]}"#).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"v0": ["1"], "v1": ["0", "2"]}"#).unwrap();
    let out = forge(&["verify", "toda", "--pair", good.to_str().unwrap(), "--n", "3", "--h", "0.02"]);
    assert_eq!(out.status.code(), Some(0));
    let ladder = &json(&out)["results"]["suites"][0]["details"]["runs"][0]["ladder"];
    let ratio = ladder[1]["ratio"]["value"].as_f64().unwrap();
    assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    let out = forge(&["verify", "plucker", "--pair", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sample_delta_shapes() {
    let full = json(&forge(&["sample-delta", "--spec", "full", "--n", "4"]));
    assert_eq!(full["pass"], true);
    assert!(full["results"]["distance_to_identity"]["value"].as_f64().unwrap() < 1e-12);
    let u1 = json(&forge(&["sample-delta", "--spec", "u1", "--n", "3", "--seed", "5"]));
    assert_eq!(u1["results"]["structure"]["pattern"]["kind"], "diagonal");
    assert_eq!(u1["results"]["structure"]["holds"], true);
    let c4 = json(&forge(&["sample-delta", "--spec", "c:4", "--n", "3"]));
    assert_eq!(c4["results"]["structure"]["pattern"]["modulus"], 2);
    assert_eq!(c4["pass"], true);
}

#[test]
fn report_goes_to_a_file() {
    let path = std::env::temp_dir().join(format!("toda-forge-{}.json", std::process::id()));
    let out = forge(&["verify", "cholesky", "--trials", "5", "--pattern-trials", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "verify cholesky");
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_toda-forge"))
            .env("TODA_FORGE_THREADS", threads)
            .args(["dim-table", "--specs", "c:1..4,o2", "--n", "1..10"])
            .output()
            .unwrap();
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("wall_time");
        v
    };
    assert_eq!(run("1"), run("3"));
    let out = Command::new(env!("CARGO_BIN_EXE_toda-forge"))
        .env("TODA_FORGE_THREADS", "zero")
        .args(["group-info", "e6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
