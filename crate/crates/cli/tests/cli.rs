use std::process::{Command, Output};

use serde_json::Value;

fn sensilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sensilab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_set_profile() {
    let out = sensilab(&["analyze-set", "1,2,3@8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["max_block_length"], 3);
    assert_eq!(v["ip_witnesses"][1], serde_json::json!([1, 1]));
    assert_eq!(v["set"], "1,2,3@8");
}

#[test]
fn analyze_set_with_zero_convention() {
    let out = sensilab(&["analyze-set", "1,2,3@8", "--convention", "with-zero"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["diff_convention"], "with-zero");
    assert_eq!(v["max_diff_length"], 0);
}

#[test]
fn malformed_set_is_position_annotated() {
    let out = sensilab(&["analyze-set", "1,2,x@8"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("position 4"), "{err}");
    assert!(err.contains("    ^"), "{err}");
}

#[test]
fn diverge_identical_points() {
    let out = sensilab(&["diverge", "rotation:0.5", "0", "0", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exceeds"], "@1000");
    assert_eq!(v["ambiguity_count"], 0);
    assert_eq!(v["delta"]["exact"], false);
    assert!(stderr(&out).contains("rounded"));
}

#[test]
fn diverge_needs_delta() {
    let out = sensilab(&["diverge", "rotation:0.5", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diverge_morse_backward_window() {
    let out = sensilab(&["diverge", "morse", "flip(omega)", "eta", "--delta", "1/2", "-n", "10", "--back", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exceeds"], "5,6,7,8,9,10,11,12,13,14@15");
    assert_eq!(v["index_offset"], -5);
}

#[test]
fn malformed_system_literal() {
    let out = sensilab(&["diverge", "skew:2:0.3q", "0/0", "0/0", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position 10"));
    let out = sensilab(&["orbit", "torus:3", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sensilab(&["orbit", "skew:2:0.1", "0.1/0.2/0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_symbolic_point() {
    let out = sensilab(&["orbit", "morse", "flip(omegq)", "-n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('^'));
}

#[test]
fn orbit_csv_and_json() {
    let out = sensilab(&["orbit", "morse", "omega", "-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,symbol,word_0_15"));
    assert_eq!(text.lines().nth(1), Some("0,0,0110100110010110"));

    let out = sensilab(&["orbit", "rotation:0.25", "0", "-n", "5", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["rows"][4]["x"], "0.00000000000000000");
    assert_eq!(v["rows"][1]["x_raw"], "0x4000000000000000");
}

#[test]
fn orbit_precision_flag() {
    let out = sensilab(&["orbit", "rotation:sqrt2-1", "0", "-n", "2", "--precision", "32"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0x6a09e667"), "{text}");
    let out = sensilab(&["orbit", "rotation:0.5", "0", "--precision", "48"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sense_rotation_is_empty_and_skew_is_not() {
    let out = sensilab(&["sense", "rotation:sqrt2-1", "ball:0.3:1/64", "--delta", "1/32", "-n", "500"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["set"], "@500");

    let out = sensilab(&["sense", "skew:2:sqrt2-1", "ball:0/0:1/128", "--delta", "1/4", "-n", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["cardinality"].as_u64().unwrap() > 0);
    assert_eq!(v["samples"], 65);
}

#[test]
fn sense_morse_cylinder() {
    let out = sensilab(&["sense", "morse", "cyl:1:011", "--delta", "1/2", "-n", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let out = sensilab(&["sense", "morse", "cyl:1:0112", "--delta", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rp_search_found_and_absent() {
    let out = sensilab(&["rp-search", "skew:2:sqrt2-1", "0.2/0.1", "0.2/0.6", "--delta", "1/16", "--bound", "512"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "found");

    let out = sensilab(&["rp-search", "skew:2:sqrt2-1", "0/0", "0.25/0", "--delta", "1/32", "--bound", "64", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "absent-budget");
}

#[test]
fn verify_single_experiment() {
    let out = sensilab(&["verify", "morse-strong-ft"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["report_version"], 1);
    assert!(v["runtime_ms"].is_null());
}

#[test]
fn verify_params_and_errors() {
    let out = sensilab(&["verify", "families-oracle", "--param", "universe=6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["universe"], "6");

    let out = sensilab(&["verify", "families-oracle", "--param", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sensilab(&["verify", "families-oracle", "--param", "novalue"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sensilab(&["verify", "no-such-experiment"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_inconclusive_exit_code() {
    let out = sensilab(&["verify", "skew-ft-sensitive", "--param", "window=50", "--param", "block_target=1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "inconclusive");
}

#[test]
fn verify_csv_matches_json() {
    let args = ["verify", "gillis", "--param", "trials=5", "--seed", "9"];
    let js = json(&sensilab(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv = String::from_utf8(sensilab(&csv_args).stdout).unwrap();
    for o in js["observations"].as_array().unwrap() {
        let label = o["label"].as_str().unwrap();
        let value = o["value"].as_str().unwrap();
        let quoted = if value.contains([',', '"']) {
            format!("\"{}\"", value.replace('"', "\"\""))
        } else {
            value.to_string()
        };
        assert!(csv.lines().any(|l| l == format!("{label},{quoted}")), "{label}");
    }
}

#[test]
fn timing_fills_runtime() {
    let out = sensilab(&["verify", "families-oracle", "--param", "universe=4", "--timing"]);
    assert!(json(&out)["runtime_ms"].is_u64());
    assert!(stderr(&out).contains("ms"));
}

#[test]
fn unknown_flags_are_errors() {
    let out = sensilab(&["list", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sensilab(&["analyze-set", "1@2", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_names_every_experiment() {
    let out = sensilab(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<_> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap().to_string()).collect();
    for n in ["morse-strong-ft", "rotation-equicontinuous", "skew-ft-sensitive", "skew-example-522", "families-oracle", "gillis"] {
        assert!(names.contains(&n.to_string()), "{n}");
    }
}

#[test]
fn out_writes_file_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = sensilab(&["verify", "families-oracle", "--param", "universe=5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["name"], "families-oracle");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn help_lists_system_literals() {
    let out = sensilab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("skew:<d>:<alpha>"));
}

#[test]
fn verify_all_is_byte_identical_across_runs() {
    let a = sensilab(&["verify", "all", "--seed", "0"]);
    let b = sensilab(&["verify", "all", "--seed", "0"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a).as_array().unwrap().len(), 6);
}
