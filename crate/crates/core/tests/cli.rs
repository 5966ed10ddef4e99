use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euler-hall"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn result(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    assert_eq!(v["tool"], "euler-hall");
    assert!(v["version"].is_string());
    v["result"].clone()
}

#[test]
fn analyze_hall_pair() {
    let out = run(&["analyze", fixture("hall_pair.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["verdict"], "not_subordinate");
    assert_eq!(r["matching"], json!([1, 2]));
    assert_eq!(r["euler_class"], "x1*x2");
    assert_eq!(r["euler_nonzero"], true);
    assert_eq!(r["witness"], Value::Null);
    assert_eq!(r["violation"], Value::Null);
}

#[test]
fn analyze_doubled_singleton() {
    let out = run(&[
        "analyze",
        fixture("doubled_singleton.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["verdict"], "subordinate");
    assert_eq!(r["witness"], 1);
    assert_eq!(r["hall"], false);
    assert_eq!(r["matching"], Value::Null);
    assert_eq!(r["violation"], json!([1, 2]));
    assert_eq!(r["euler_class"], "0");
}

#[test]
fn analyze_empty_family() {
    let out = run(&["analyze", fixture("empty.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["euler_class"], "1");
    assert_eq!(r["hall"], true);
    assert_eq!(r["verdict"], "not_subordinate");
    assert_eq!(r["matching"], json!([]));
}

#[test]
fn analyze_undecided() {
    let out = run(&["analyze", fixture("undecided.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result(&out)["verdict"], "undecided");
}

#[test]
fn analyze_text_output() {
    let out = run(&[
        "analyze",
        "--text",
        fixture("doubled_singleton.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: subordinate (witness 1)"));
    assert!(text.contains("violation: sets 1, 2"));
}

#[test]
fn malformed_input_names_field() {
    let out = run(&["analyze", fixture("bad_atom.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sets[1][1]"));
    assert!(out.stdout.is_empty());
}

#[test]
fn analyze_rejects_trivial_lines() {
    let out = run(&["analyze", fixture("with_trivial.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn euler_accepts_trivial_lines() {
    let out = run(&["euler", fixture("with_trivial.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["euler_class"], "0");
    assert_eq!(r["is_zero"], true);

    let out = run(&[
        "euler",
        "--text",
        fixture("hall_pair.json").to_str().unwrap(),
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "x1*x2\n");
}

#[test]
fn sweep_small() {
    let out = run(&["sweep", "--max-m", "2", "--max-atom", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["families"], 56);
    assert_eq!(r["mismatches"], 0);

    let out = run(&["sweep", "--max-m", "1", "--max-atom", "1", "--jobs", "2"]);
    assert_eq!(result(&out)["families"], 1);
}

#[test]
fn sweep_caps_are_input_errors() {
    assert_eq!(
        run(&["sweep", "--max-m", "5", "--max-atom", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["sweep", "--max-m", "2", "--max-atom", "6"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["sweep", "--max-m", "5", "--max-atom", "2", "--m-limit", "5"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn dynamics_reports() {
    let out = run(&["dynamics", "--window", "2", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["generation_sizes"], json!([1, 5, 25, 125]));
    assert_eq!(r["labeling"]["membership"]["passed"], true);
    assert_eq!(r["labeling"]["injectivity"]["passed"], true);
    assert_eq!(r["labeling"]["level"]["passed"], true);
    assert_eq!(r["prefix_sdr"]["size"], 156);
    assert_eq!(r["prefix_sdr"]["hall_confirmed"], true);
    assert_eq!(r["gamma_one_closed_form"], true);
    assert_eq!(r["index_window"], json!([-2, 2]));
    assert_eq!(r["labels"][1], json!([12, 5, 2, 3, 8]));

    let out = run(&["dynamics", "--window", "1", "--depth", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result(&out)["generation_sizes"], json!([1]));

    assert_eq!(
        run(&["dynamics", "--window", "5", "--depth", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["dynamics", "--window", "0", "--depth", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn dynamics_at_cli_caps() {
    // Atom ids here exceed 64 bits.
    let out = run(&["dynamics", "--window", "4", "--depth", "5", "--jobs", "4"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = result(&out);
    assert_eq!(r["generation_sizes"], json!([1, 9, 81, 729, 6561, 59049]));
    assert_eq!(r["passed"], true);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result(&out)["passed"], true);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        run(&["--json", "--text", "selftest"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["analyze", "FIXTURE"],
        vec!["sweep", "--max-m", "3", "--max-atom", "3", "--jobs", "3"],
        vec!["dynamics", "--window", "3", "--depth", "2", "--jobs", "2"],
        vec!["selftest"],
    ] {
        let path = fixture("hall_pair.json");
        let args: Vec<&str> = args
            .iter()
            .map(|a| {
                if *a == "FIXTURE" {
                    path.to_str().unwrap()
                } else {
                    a
                }
            })
            .collect();
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}
