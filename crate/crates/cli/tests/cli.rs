use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubetight")).args(args).output().unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cube_distance() {
    let cube = fixture("cube3.json");
    let v = json_out(&["cube", "dist", "--metric", "linf", "-i", cube.to_str().unwrap(), "--from", "000", "--to", "111"]);
    assert_eq!(v, json!({"dist": 1}));
    let v = json_out(&["cube", "dist", "-i", cube.to_str().unwrap(), "--from", "000", "--to", "111"]);
    assert_eq!(v, json!({"dist": 3}));
}

#[test]
fn sageev_roundtrip() {
    let v = json_out(&["sageev", "roundtrip", "-i", fixture("ws.json").to_str().unwrap()]);
    assert_eq!(v["isomorphic"], json!(true));
    assert_eq!(v["wall_bijection"].as_object().unwrap().len(), 3);
}

#[test]
fn segment_cells() {
    let v = json_out(&["tightspan", "cells", "-i", fixture("two_points.json").to_str().unwrap()]);
    assert_eq!(v["zero_cells"], json!([[0, 5], [5, 0]]));
    assert_eq!(v["coarse_gap"], json!(0));
}

#[test]
fn fractional_values_carry_decimals() {
    let v = json_out(&["tightspan", "center", "-i", fixture("two_points.json").to_str().unwrap(), "--points", "x", "y"]);
    assert_eq!(v["center"], json!(["5/2", "5/2"]));
    assert_eq!(v["center_decimal"], json!(["2.500000000000000", "2.500000000000000"]));
}

#[test]
fn invalid_input_is_a_structured_error() {
    let out = run(&["cube", "dist", "-i", fixture("cube3.json").to_str().unwrap(), "--from", "000", "--to", "999"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["kind"].is_string());
    assert!(err["error"]["message"].is_string());
    assert!(out.stdout.is_empty());
}
