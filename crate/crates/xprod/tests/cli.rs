use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(system: &str, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_xprod"))
        .arg("--system")
        .arg(data(system))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn report(system: &str, args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(system, args);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("xprod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn system_check_examples() {
    let r = report("z3.json", &["system-check"]);
    assert_eq!(r["result"]["free"], true);
    assert_eq!(r["result"]["minimal"], true);
    assert_eq!(r["result"]["orbit_count"], 1);
    let r = report("double_swap.json", &["system-check"]);
    assert_eq!(r["result"]["free"], true);
    assert_eq!(r["result"]["minimal"], false);
    assert_eq!(r["result"]["orbit_count"], 2);
    let (code, _, stderr) = run("malformed_table.json", &["system-check"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("inverse"), "{stderr}");
}

#[test]
fn missing_system_is_an_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_xprod")).arg("system-check").output().unwrap();
    assert_ne!(out.status.code(), Some(0));
    let (code, _, stderr) = run("does_not_exist.json", &["system-check"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("failed to read"));
}

#[test]
fn compare_examples() {
    let r = report("z3.json", &["compare", "--a", "chi:0", "--b", "chi:1,2", "--witness", "--oracle", "--semigroup"]);
    assert_eq!(r["result"]["subequivalent"], true);
    assert_eq!(r["result"]["cuntz"], true);
    assert_eq!(r["result"]["d_tau"][0]["a_total"], "1/3");
    assert_eq!(r["result"]["d_tau"][0]["b_total"], "2/3");
    assert!(r["certificates"]["witness"]["rows"].is_array());

    let r = report("z3.json", &["compare", "--a", "chi:0,1", "--b", "chi:2", "--oracle"]);
    assert_eq!(r["result"]["subequivalent"], false);
    assert_eq!(r["result"]["cuntz"], false);

    let r = report("z3.json", &["compare", "--a", "chi:0|fn:1=1/2", "--b", "chi:0|fn:1=1/2", "--witness"]);
    assert_eq!(r["result"]["subequivalent"], true);
    let rows = r["certificates"]["witness"]["rows"].as_array().unwrap();
    assert_eq!(rows[0][0]["shift"], "0");
    assert_eq!(rows[1][0]["target"], 1);
}

#[test]
fn bad_specs_exit_nonzero() {
    let (code, _, stderr) = run("z3.json", &["compare", "--a", "chi:9", "--b", "chi:1"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("unknown label"), "{stderr}");
    let (code, _, _) = run("z3.json", &["compare", "--a", "fn:0=-1", "--b", "chi:1"]);
    assert_ne!(code, 0);
}

#[test]
fn witness_round_trip_and_extract() {
    let r = report("z3.json", &["witness", "roundtrip", "--a", "fn:0=1", "--b", "chi:1,2", "--epsilon", "1/2", "--suite"]);
    assert_eq!(r["result"]["pass"], true);
    assert_eq!(r["result"]["suite"]["consistent"], true);

    let out = tmp("compiled.json");
    let out_s = out.to_string_lossy().into_owned();
    let w = data("z3_witness.json").to_string_lossy().into_owned();
    let r = report(
        "z3.json",
        &["witness", "compile", "--a", "chi:0", "--b", "chi:1", "--epsilon", "1/2", "--witness", &w, "--json", &out_s],
    );
    assert_eq!(r["result"]["identity"], true);
    assert_eq!(r["result"]["delta"], "1/2");
    let t = tmp("t.json");
    std::fs::write(&t, r["certificates"]["compiled"]["t"].to_string()).unwrap();
    let ts = t.to_string_lossy().into_owned();
    let args = ["witness", "extract", "--a", "chi:0", "--b", "chi:1", "--epsilon", "1/2", "--delta", "1/2", "--t", &ts];
    assert_eq!(report("z3.json", &args)["result"]["valid"], true);

    // corrupt t by moving its coefficient to the wrong group element
    let bad = r["certificates"]["compiled"]["t"].to_string().replace("[\"1\",[[\"1\"", "[\"2\",[[\"1\"");
    std::fs::write(&t, bad).unwrap();
    let (code, _, stderr) = run("z3.json", &args);
    assert_ne!(code, 0);
    assert!(stderr.contains("precondition"), "{stderr}");
}

#[test]
fn compile_with_large_epsilon_is_zero() {
    let r = report("z3.json", &["witness", "compile", "--a", "fn:0=1/2", "--b", "chi:1", "--epsilon", "1"]);
    assert_eq!(r["result"]["compiled"], true);
    assert_eq!(r["result"]["zero"], true);
}

#[test]
fn castle_commands() {
    let r = report("z2.json", &["castle", "validate"]);
    assert_eq!(r["result"]["valid"], true);

    let d = data("z2_castle_data.json").to_string_lossy().into_owned();
    let r = report("z2.json", &["castle", "build-ozm", "--data", &d]);
    for key in ["completely_positive", "contractive", "order_zero", "normalizer_preserving"] {
        assert_eq!(r["result"][key], true, "{key}");
    }
    let ozm = tmp("ozm.json");
    std::fs::write(&ozm, r["certificates"]["ozm"].to_string()).unwrap();
    let r = report("z2.json", &["castle", "decompose", "--ozm", &ozm.to_string_lossy()]);
    assert_eq!(r["result"]["round_trip"], true);
    assert_eq!(r["certificates"]["data"]["towers"][0]["weight"][0][1], "1/2");

    let r = report("z3.json", &["castle", "tzs", "--identity", "--epsilon", "1/10", "--family", "unit", "--h", "chi:0"]);
    assert_eq!(r["result"]["pass"], true);
}

#[test]
fn non_normalizer_map_is_rejected() {
    let ozm = tmp("bad_ozm.json");
    let half = r#"[["0",[["0","1/2"]]],["1",[["0","1/2"]]]]"#;
    std::fs::write(&ozm, format!(r#"{{"n":2,"images":[[{half},{half}],[{half},{half}]]}}"#)).unwrap();
    let (code, _, stderr) = run("z2.json", &["castle", "decompose", "--ozm", &ozm.to_string_lossy()]);
    assert_ne!(code, 0);
    assert!(stderr.contains("normalizer"), "{stderr}");
}

#[test]
fn semigroup_examples() {
    let r = report("trivial_point.json", &["semigroup", "--max-n", "2"]);
    assert_eq!(r["result"]["class_count"], 3);
    let order = r["result"]["order"].as_array().unwrap();
    // a chain: every pair is comparable
    for (i, row) in order.iter().enumerate() {
        for (j, cell) in row.as_array().unwrap().iter().enumerate() {
            assert!(cell == true || order[j][i] == true);
        }
    }
    let r = report("z2.json", &["semigroup", "--max-n", "1"]);
    let classes = r["result"]["classes"].as_array().unwrap();
    assert!(classes.iter().any(|c| c == &serde_json::json!([["0"]])));
    assert!(!classes.iter().any(|c| c == &serde_json::json!([["1"]])));
    let r = report("z2.json", &["semigroup", "--max-n", "0"]);
    assert_eq!(r["result"]["class_count"], 0);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["castle", "tzs", "--identity", "--epsilon", "1/10", "--family", "unit", "--family", "u:1", "--h", "chi:0"];
    let (_, first, _) = run("z3.json", &args);
    let (_, second, _) = run("z3.json", &args);
    assert_eq!(first, second);
    let (_, timed, _) = run("z3.json", &[&args[..], &["--timing"]].concat());
    assert!(timed.contains("runtime_ms"));
    assert!(!first.contains("runtime_ms"));
}
