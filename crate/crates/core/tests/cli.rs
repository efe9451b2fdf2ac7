mod common;

use std::process::Command;

fn run(args: &[&str]) -> (i32, serde_json::Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_strictify"))
        .args(args)
        .current_dir(common::fixture(""))
        .output()
        .expect("binary runs");
    let report = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    (out.status.code().expect("exit code"), report)
}

#[test]
fn check_category() {
    assert_eq!(run(&["check-category", "interval.json"]).0, 0);
    assert_eq!(run(&["check-category", "z2.json"]).0, 0);
    let (code, report) = run(&["check-category", "bad_interval.json"]);
    assert_eq!(code, 1);
    assert_eq!(report["verdict"], "fail");
    assert_eq!(run(&["check-category", "malformed.json"]).0, 2);
    assert_eq!(run(&["check-category", "missing.json"]).0, 2);
}

#[test]
fn check_csystem() {
    assert_eq!(run(&["check-csystem", "unit", "--bound", "3"]).0, 0);
    assert_eq!(run(&["check-csystem", "point", "--bound", "2"]).0, 0);
    let (code, report) = run(&["check-csystem", "onetype", "--bound", "2", "--mutant", "q-last"]);
    assert_eq!(code, 1);
    assert_eq!(report["verdict"], "fail");
    assert_eq!(run(&["check-csystem", "nosuch", "--bound", "2"]).0, 2);
}

#[test]
fn image() {
    assert_eq!(run(&["image", "unit", "--ambient", "unit_patch.json", "--bound", "3"]).0, 0);
    assert_eq!(run(&["image", "onetype", "--ambient", "onetype_patch.json", "--bound", "2"]).0, 0);
    assert_eq!(run(&["image", "unit", "--ambient", "disconnected_patch.json", "--bound", "2"]).0, 1);
}

#[test]
fn kan() {
    let (code, report) = run(&["kan", "kan_toy.json", "--truncation", "1"]);
    assert_eq!(code, 0);
    assert_eq!(report["values"]["0"].as_array().unwrap().len(), 3);
    assert!(report["values"]["1"].as_array().unwrap().is_empty());
}

#[test]
fn verify_theorem() {
    for job in ["unit_job.json", "onetype_job.json", "point_job.json"] {
        let (code, report) = run(&["verify-theorem", job]);
        assert_eq!((code, report["verdict"].as_str()), (0, Some("pass")), "{job}");
    }
    let (code, report) = run(&["verify-theorem", "disconnected_job.json"]);
    assert_eq!(code, 1);
    assert_eq!(report["theorem"]["verdict"], "skipped");
    assert_eq!(report["theorem"]["witness"]["object"], "d");
    assert_eq!(run(&["verify-theorem", "collapse_job.json"]).0, 1);
}
