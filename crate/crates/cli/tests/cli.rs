use std::fs;
use std::path::Path;

use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn cdga() -> Command {
    Command::cargo_bin("cdga").unwrap()
}

fn emit(name: &str) -> String {
    let out = cdga().args(["examples", "emit", name]).output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn run_json(args: &[&str], stdin: &str) -> (i32, Value) {
    let out = cdga().args(args).write_stdin(stdin).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn emitted_v2_checks_clean() {
    cdga().args(["check", "-"]).write_stdin(emit("v2")).assert().code(0).stdout(predicate::str::contains("\"clean\": true"));
}

#[test]
fn cp2_homology_dims() {
    let (code, v) = run_json(&["homology", "-"], &emit("cp2-sum7"));
    assert_eq!(code, 0);
    assert_eq!(v["dims"], serde_json::json!([1, 0, 7, 0, 1]));
}

#[test]
fn lambda_model_homology() {
    let (code, v) = run_json(&["model", "-"], &emit("lambda-abc"));
    assert_eq!(code, 0);
    assert_eq!(v["homologyDims"], serde_json::json!([1, 0, 1, 0, 0, 1, 0, 1]));
    assert_eq!(v["verified"], Value::Bool(true));
}

#[test]
fn examples_list_names_the_corpus() {
    let (code, v) = run_json(&["examples", "list"], "");
    assert_eq!(code, 0);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["v1", "v2", "lambda-abc", "cp2-sum7", "exterior-3-5-7-9-11", "acyclic-wz"] {
        assert!(names.contains(&n), "{n}");
    }
}

#[test]
fn emit_round_trips_through_check() {
    for name in ["v1", "v2", "lambda-abc", "cp2-sum7", "exterior-3-5-7-9-11", "acyclic-wz"] {
        let (code, v) = run_json(&["check", "-"], &emit(name));
        assert_eq!(code, 0, "{name}: {v}");
    }
}

#[test]
fn middle_degree_obstruction_exit_code() {
    let (code, v) = run_json(&["hodge", "--middle-only", "-"], &emit("obstruction-n2"));
    assert_eq!(code, 2);
    assert_eq!(v["feasible"], Value::Bool(false));
    assert_eq!(v["certificateVerified"], Value::Bool(true));
    let (code, v) = run_json(&["hodge", "--middle-only", "-"], &emit("v2"));
    assert_eq!(code, 0);
    assert_eq!(v["feasible"], Value::Bool(true));
}

#[test]
fn malformed_input_is_reported_as_json() {
    let (code, v) = run_json(&["check", "-"], "{\"schema\": \"cdga/1\", \"name\": 3");
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "malformed-input");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 1"));
    let (code, v) = run_json(&["homology", "-"], "{\"schema\": \"cdga/2\", \"name\": \"x\", \"field\": \"Q\"}");
    assert_eq!(code, 3);
    assert!(v["error"]["message"].as_str().unwrap().contains("schema"));
}

#[test]
fn unknown_label_names_its_location() {
    let mut doc: Value = serde_json::from_str(&emit("v2")).unwrap();
    doc["product"].as_array_mut().unwrap().push(serde_json::json!(["k", "q", "v", "1"]));
    let (code, v) = run_json(&["check", "-"], &doc.to_string());
    assert_eq!(code, 3);
    assert!(v["error"]["message"].as_str().unwrap().contains("product["), "{v}");
}

#[test]
fn broken_axiom_fails_check_with_exit_one() {
    let mut doc: Value = serde_json::from_str(&emit("v2")).unwrap();
    for e in doc["product"].as_array_mut().unwrap() {
        if e[0] == "k" && e[1] == "w" {
            e[3] = Value::String("2".into());
        }
    }
    let (code, v) = run_json(&["check", "-"], &doc.to_string());
    assert_eq!(code, 1);
    assert_eq!(v["clean"], Value::Bool(false));
}

#[test]
fn missing_orientation_is_a_precondition_failure() {
    let (code, v) = run_json(&["hodge", "-"], &emit("acyclic-wz"));
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "precondition");
}

#[test]
fn characteristic_two_is_rejected() {
    let (code, v) = run_json(&["--field", "Fp:2", "check", "-"], &emit("v2"));
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "characteristic-two");
}

#[test]
fn prime_field_override() {
    let (code, v) = run_json(&["--field", "Fp:7", "check", "-"], &emit("v2"));
    assert_eq!(code, 0);
    assert_eq!(v["field"], "Fp:7");
}

#[test]
fn truncation_override_rebuilds_the_free_algebra() {
    let (_, short) = run_json(&["--trunc", "7", "check", "-"], &emit("lambda-abc"));
    let (_, long) = run_json(&["--trunc", "12", "check", "-"], &emit("lambda-abc"));
    assert_eq!(short["dims"].as_array().unwrap().len(), 8);
    assert_eq!(long["dims"].as_array().unwrap().len(), 13);
}

#[test]
fn extension_is_obstructed_in_degree_two() {
    let (code, v) = run_json(&["extend", "-"], &emit("obstruction-n2"));
    assert_eq!(code, 2);
    assert!(v["obstruction"].is_object());
}

#[test]
fn extension_of_twisted_pair() {
    let (code, v) = run_json(&["extend", "-"], &emit("v2-twisted-pair"));
    assert_eq!(code, 0);
    assert_eq!(v["entry"], "middle-level");
    assert_eq!(v["adjoined"][0]["w"], "w4_1");
    assert_eq!(v["certificate"]["retractionAfterInclusionIsIdentity"], Value::Bool(true));
}

#[test]
fn route_small_on_non_hodge_input_is_an_obstruction() {
    let (code, _) = run_json(&["model", "--route", "small", "-"], &emit("v2-twisted-pair"));
    assert_eq!(code, 2);
}

#[test]
fn small_subalgebra_with_trees() {
    let (code, v) = run_json(&["small", "--cap", "7", "--trees", "-"], &emit("v2"));
    assert_eq!(code, 0);
    assert_eq!(v["trees"]["spanMatchesClosure"], Value::Bool(true));
    assert_eq!(v["trees"]["degreeBoundViolations"], 0);
    assert_eq!(v["small"]["dims"], serde_json::json!([1, 0, 1, 1, 1, 1, 0, 1]));
}

#[test]
fn homotopy_report_passes() {
    let (code, v) = run_json(&["homotopy", "-"], &emit("lambda-abc"));
    assert_eq!(code, 0);
    assert_eq!(v["report"]["commRel"], Value::Bool(true));
}

#[test]
fn quotient_flags_quasi_isomorphism() {
    let (_, v) = run_json(&["quotient", "-"], &emit("lambda-abc"));
    assert_eq!(v["quasiIso"], Value::Bool(true));
    assert_eq!(v["algebra"]["degrees"].as_array().unwrap().len(), 8);
    let (_, v) = run_json(&["quotient", "-"], &emit("v2-twisted-pair"));
    assert_eq!(v["quasiIso"], Value::Bool(false));
}

/// Every document and map produced by `model` passes `check` and `verify-map` on replay.
#[test]
fn model_output_replays_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["v2", "lambda-abc", "cp2-sum7", "v2-twisted-pair"] {
        let input = emit(name);
        let (code, v) = run_json(&["model", "-"], &input);
        assert_eq!(code, 0, "{name}");
        let a = dir.path().join(format!("{name}.json"));
        fs::write(&a, &input).unwrap();
        let inter = write(dir.path(), &format!("{name}-s.json"), &v["intermediate"]);
        let model = write(dir.path(), &format!("{name}-m.json"), &v["model"]);
        for doc in [&inter, &model] {
            cdga().args(["check", doc]).assert().code(0);
        }
        let by_name = |n: &str| {
            if n == name {
                a.to_string_lossy().into_owned()
            } else if n == v["intermediate"]["name"] {
                inter.clone()
            } else {
                model.clone()
            }
        };
        for (k, leg) in v["legs"].as_array().unwrap().iter().enumerate() {
            let map = write(dir.path(), &format!("{name}-leg{k}.json"), &leg["map"]);
            let src = by_name(leg["source"].as_str().unwrap());
            let tgt = by_name(leg["target"].as_str().unwrap());
            cdga().args(["verify-map", &src, &tgt, &map]).assert().code(0);
        }
    }
}

#[test]
fn scaled_map_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (_, v) = run_json(&["model", "-"], &emit("v2"));
    let a = write(dir.path(), "v2.json", &serde_json::from_str(&emit("v2")).unwrap());
    let s = write(dir.path(), "s.json", &v["intermediate"]);
    let mut leg = v["legs"][0]["map"].clone();
    for e in leg["entries"].as_array_mut().unwrap() {
        if e[0] == "v" {
            e[2] = Value::String("2".into());
        }
    }
    let map = write(dir.path(), "map.json", &leg);
    let (code, out) = {
        let o = cdga().args(["verify-map", &s, &a, &map]).output().unwrap();
        (o.status.code().unwrap(), serde_json::from_slice::<Value>(&o.stdout).unwrap())
    };
    assert_eq!(code, 1);
    assert_eq!(out["report"]["orientationCompatible"], Value::Bool(false));
}

#[test]
fn batch_mode_isolates_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.json"), emit("v2")).unwrap();
    fs::write(dir.path().join("b.json"), emit("obstruction-n2")).unwrap();
    fs::write(dir.path().join("c.json"), "not json").unwrap();
    fs::write(dir.path().join("ignored.txt"), "x").unwrap();
    let out = cdga().args(["hodge", "--batch", &dir.path().to_string_lossy()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let codes: Vec<i64> = v["results"].as_array().unwrap().iter().map(|r| r["exitCode"].as_i64().unwrap()).collect();
    assert_eq!(codes, vec![0, 2, 3]);
}

#[test]
fn usage_errors_are_json() {
    let (code, v) = run_json(&["frobnicate"], "");
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, _) = run_json(&["examples", "emit", "nope"], "");
    assert_ne!(code, 0);
}
