//! End-to-end tests of the binary: output schemas, exit codes, and the
//! factorization cache.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use excycle::{verify_cycle, DigitWord, Instance};

fn excycle_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_excycle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_out(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = excycle_cmd(&full);
    let value: Value =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json: {e}\n{out:?}"));
    (value, out.status.code().unwrap())
}

fn parse_u128(v: &Value) -> u128 {
    v.as_str().unwrap().parse().unwrap()
}

/// Reparses a cycle object and re-verifies it against the library.
fn verify_cycle_json(g: u128, m: u128, cycle: &Value) -> bool {
    let inst = Instance::new(g, m).unwrap();
    let points: Vec<u128> = cycle["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(parse_u128)
        .collect();
    let word = DigitWord::parse(cycle["digits"].as_str().unwrap()).unwrap();
    verify_cycle(&inst, &points, &word)
}

#[test]
fn cycles_json_roundtrip() {
    let (v, code) = json_out(&["cycles", "--g", "6", "--m", "55987"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "incomplete");
    assert_eq!(v["order"], "7");
    let cycles = v["cycles"].as_array().unwrap();
    assert_eq!(cycles[0]["length"], "7");
    assert_eq!(
        cycles[0]["points"].as_array().unwrap()[0].as_str().unwrap(),
        "311"
    );
    for c in cycles {
        assert!(verify_cycle_json(6, 55987, c));
        assert_eq!(c["length_equals_order"], true);
    }
    assert!(v["timing_ms"].is_string());
}

#[test]
fn cycles_big_refine() {
    let (v, code) = json_out(&["cycles", "--g", "12", "--m", "810554586205"]);
    assert_eq!(code, 0);
    let cycles = v["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0]["length"], "12");
    assert!(verify_cycle_json(12, 810554586205, &cycles[0]));
}

#[test]
fn cycles_complete_exits_one() {
    let out = excycle_cmd(&["cycles", "--g", "4", "--m", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("complete"));
}

#[test]
fn scan_algorithm_agrees() {
    let (refine, _) = json_out(&["cycles", "--g", "4", "--m", "85"]);
    let (scan, _) = json_out(&["cycles", "--g", "4", "--m", "85", "--algo", "scan"]);
    assert_eq!(refine["cycles"], scan["cycles"]);
}

#[test]
fn scan_ceiling_exits_resource() {
    let out = excycle_cmd(&[
        "cycles", "--g", "4", "--m", "1000001", "--algo", "scan", "--scan-ceiling", "1000",
    ]);
    assert_eq!(out.status.code(), Some(69));
}

#[test]
fn usage_errors_exit_64() {
    // odd scale
    let out = excycle_cmd(&["cycles", "--g", "5", "--m", "3"]);
    assert_eq!(out.status.code(), Some(64));
    // even m
    let out = excycle_cmd(&["classify", "--g", "4", "--m", "6"]);
    assert_eq!(out.status.code(), Some(64));
    // unknown flag
    let out = excycle_cmd(&["cycles", "--g", "4", "--m", "5", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    // bad digit word
    let out = excycle_cmd(&["construct", "--g", "4", "--digits", "00a"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn classify_reports_witness_divisor() {
    let (v, code) = json_out(&["classify", "--g", "4", "--m", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "incomplete");
    assert_eq!(v["primitive"], false);
    assert_eq!(v["witness_divisor"], "3");

    let (v, code) = json_out(&["classify", "--g", "22", "--m", "118778947"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "complete");
}

#[test]
fn certify_lists_rules() {
    let (v, code) = json_out(&["certify", "--g", "4", "--m", "5"]);
    assert_eq!(code, 0);
    let certs = v["certificates"].as_array().unwrap();
    assert!(certs.iter().any(|c| c["verdict"] == "complete"));

    let (v, code) = json_out(&["certify", "--g", "6", "--m", "55987"]);
    assert_eq!(code, 1);
    assert!(v["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn order_command() {
    let (v, code) = json_out(&["order", "--g", "16", "--m", "361"]);
    assert_eq!(code, 0);
    assert_eq!(v["order"], "171");
    assert_eq!(v["iota"], Value::Null);
    let (v, _) = json_out(&["order", "--g", "16", "--m", "19"]);
    assert_eq!(v["order"], "9");
    assert_eq!(v["iota"], "1");
}

#[test]
fn primitives_exact_list() {
    let (v, code) = json_out(&["primitives", "--g", "4", "--max", "6000"]);
    assert_eq!(code, 0);
    let ms: Vec<u128> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| parse_u128(&r["m"]))
        .collect();
    assert_eq!(ms, vec![3, 85, 341, 455, 1285, 4369, 5461]);
    for r in v["records"].as_array().unwrap() {
        let m = parse_u128(&r["m"]);
        for c in r["cycles"].as_array().unwrap() {
            assert!(verify_cycle_json(4, m, c));
        }
    }
}

#[test]
fn construct_command() {
    let (v, code) = json_out(&["construct", "--g", "16", "--digits", "1110"]);
    assert_eq!(code, 0);
    assert_eq!(v["m"], "21845");
    assert!(verify_cycle_json(16, 21845, &v["cycle"]));
}

#[test]
fn sweep_command() {
    let (v, code) = json_out(&["sweep", "--g", "6", "--n", "8", "--known", "5"]);
    assert_eq!(code, 0);
    let ms: Vec<u128> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| parse_u128(&r["m"]))
        .collect();
    assert_eq!(ms, vec![335923]);
}

#[test]
fn repunit_command() {
    let (v, code) = json_out(&["repunit", "--g", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"][0]["m"], "9331");
    assert_eq!(v["records"][0]["order"], "6");
}

#[test]
fn conjecture_command() {
    let (v, code) = json_out(&["conjecture", "--g", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "verified");
    assert_eq!(v["value"], "85");
    // not applicable when g - 1 is composite
    let out = excycle_cmd(&["conjecture", "--g", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quotient_command() {
    let (v, code) = json_out(&["quotient", "--g", "6", "--q", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["m"], "55987");
    assert_eq!(v["order"], "7");
    // hypothesis q > g-1 enforced
    let out = excycle_cmd(&["quotient", "--g", "22", "--q", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

fn strip_timing(v: &mut Value) {
    if let Value::Object(map) = v {
        map.remove("timing_ms");
    }
}

#[test]
fn cache_is_transparent_and_tolerant() {
    let dir = std::env::temp_dir().join(format!("excycle-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path: PathBuf = dir.join("factors.jsonl");
    // seed with one corrupt line and one wrong-product line
    std::fs::write(
        &path,
        "not json at all\n{\"value\":\"9332\",\"factorization\":[[\"7\",1],[\"31\",1],[\"43\",1]]}\n",
    )
    .unwrap();
    let cache = path.to_str().unwrap();

    let (mut cold, code) = json_out(&["order", "--g", "6", "--m", "9331", "--cache", cache]);
    assert_eq!(code, 0);
    let (mut warm, code) = json_out(&["order", "--g", "6", "--m", "9331", "--cache", cache]);
    assert_eq!(code, 0);
    strip_timing(&mut cold);
    strip_timing(&mut warm);
    assert_eq!(cold, warm, "warm cache must not change results");

    // the cache now holds a valid entry for 9331
    let contents = std::fs::read_to_string(&path).unwrap();
    assert!(contents.lines().any(|l| l.contains("\"9331\"")));

    let (v, _) = json_out(&["order", "--g", "6", "--m", "9331", "--cache", cache]);
    assert_eq!(v["modulus_factorization"][0][0], "7");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_and_text_formats() {
    let out = excycle_cmd(&["cycles", "--g", "4", "--m", "85", "--format", "csv"]);
    let csv = String::from_utf8_lossy(&out.stdout);
    assert!(csv.starts_with("g,m,index,length,gcd,digits,points"));
    assert!(csv.contains("4,85,1,4,1,1110,\"7 23 27 28\""));

    let out = excycle_cmd(&["classify", "--g", "4", "--m", "85"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("incomplete, primitive"));
}
