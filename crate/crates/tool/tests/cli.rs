use std::fs;
use std::path::PathBuf;
use std::process::Command;

use pirarray_tool::cli::{run, EXIT_MISMATCH, EXIT_OK, EXIT_PARAM};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn golden_text(name: &str) -> String {
    fs::read_to_string(golden(name)).unwrap()
}

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pirarray").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn table_text_matches_golden() {
    let (code, out, _) = run_args(&["table", "--max-t", "13"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, golden_text("table.txt"));
    let row5 = out.lines().find(|l| l.trim_start().starts_with("5 ")).unwrap();
    assert_eq!(row5.split_whitespace().nth(1), Some("8/11"));
}

#[test]
fn table_csv_matches_golden() {
    let (code, out, _) = run_args(&["table", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, golden_text("table.csv"));
    assert!(out.contains("\n3,2,79,129,0.61240\n"));
}

#[test]
fn bounds_matches_golden() {
    let (code, out, _) = run_args(&["bounds", "--s", "5/2", "--t", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, golden_text("bounds_5_2_t2.txt"));
    assert!(out.contains("7/10"));
    assert!(out.contains("29/45"));
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("c.pir");
    let plan_path = dir.path().join("c.plan");
    let (code, _, _) = run_args(&[
        "construct",
        "--family",
        "c1",
        "--t",
        "2",
        "--d",
        "2",
        "--out",
        code_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fs::read_to_string(&code_path).unwrap(), golden_text("c1_t2_d2.pir"));
    let (code, out, _) = run_args(&[
        "verify",
        "--in",
        code_path.to_str().unwrap(),
        "--mode",
        "pairs",
        "--plan-out",
        plan_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().next(), Some("k=7 m=10 rate=7/10"));
    assert_eq!(out, golden_text("verify_c1_t2_d2.txt"));
    assert_eq!(fs::read_to_string(&plan_path).unwrap(), golden_text("c1_t2_d2.plan"));
}

#[test]
fn expect_k_sets_exit_code() {
    let path = golden("c1_t2_d2.pir");
    let path = path.to_str().unwrap();
    assert_eq!(run_args(&["verify", "--in", path, "--expect-k", "7"]).0, EXIT_OK);
    assert_eq!(run_args(&["verify", "--in", path, "--expect-k", "8"]).0, EXIT_MISMATCH);
    assert_eq!(
        run_args(&["verify", "--in", path, "--mode", "exhaustive", "--expect-k", "7"]).0,
        EXIT_OK
    );
}

#[test]
fn plan_checking() {
    let code = golden("c1_t2_d2.pir");
    let plan = golden("c1_t2_d2.plan");
    let (exit, out, _) = run_args(&[
        "verify",
        "--in",
        code.to_str().unwrap(),
        "--plan-in",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(exit, EXIT_OK);
    assert!(out.contains("plan valid"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.plan");
    fs::write(&bad, "PIRPLAN v1\npart 1: {1};{1,2}\n").unwrap();
    let (exit, out, _) = run_args(&[
        "verify",
        "--in",
        code.to_str().unwrap(),
        "--plan-in",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(exit, EXIT_MISMATCH);
    assert!(out.contains("plan invalid"));
}

#[test]
fn simulate_matches_golden() {
    let path = golden("c1_t2_d2.pir");
    let (code, out, _) = run_args(&[
        "simulate",
        "--in",
        path.to_str().unwrap(),
        "--seed",
        "42",
        "--part",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, golden_text("simulate_c1_seed42_part3.jsonl"));
    let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(last["event"], "verdict");
    assert_eq!(last["surviving_sets"], 7);
    assert_eq!(last["agreement"], true);
}

#[test]
fn simulate_sweep() {
    let path = golden("c1_t2_d2.pir");
    let (code, out, _) = run_args(&[
        "simulate",
        "--in",
        path.to_str().unwrap(),
        "--seed",
        "3",
        "--trials",
        "10",
        "--failures",
        "2",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.starts_with("trials=10 failures=2 min_surviving=5 guarantee=held"),
        "{out}"
    );
}

#[test]
fn parameter_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["bounds", "--s", "2.5", "--t", "2"],
        &["bounds", "--s", "1", "--t", "2"],
        &["construct", "--family", "c2", "--t", "4"],
        &["construct", "--family", "c1", "--t", "2"],
        &["construct", "--family", "c1", "--t", "5", "--d", "5", "--cap", "10"],
        &[
            "construct",
            "--family",
            "integer-s",
            "--s",
            "3",
            "--t",
            "2",
            "--xi",
            "1,1,1",
        ],
        &["verify", "--in", "/nonexistent/file.pir"],
        &["table", "--max-s", "1"],
        &["frobnicate"],
        &["verify", "--bogus"],
    ];
    for args in cases {
        let (code, _, err) = run_args(args);
        assert_eq!(code, EXIT_PARAM, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn cap_message_names_the_count() {
    let (_, _, err) = run_args(&["construct", "--family", "c1", "--t", "5", "--d", "5", "--cap", "10"]);
    assert!(err.contains("462"), "{err}");
}

#[test]
fn rate_for_integer_s() {
    let (code, out, _) = run_args(&["rate", "--s", "3", "--t", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("m=129 per_type=45,60,24"));
    assert!(out.contains("rate=79/129 (0.61240)"));
}

#[test]
fn binary_runs_and_exits() {
    let bin = env!("CARGO_BIN_EXE_pirarray");
    let out = Command::new(bin).args(["table", "--max-t", "13"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden_text("table.txt"));
    let out = Command::new(bin)
        .args(["bounds", "--s", "0.5", "--t", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let path = golden("c1_t2_d2.pir");
    let out = Command::new(bin)
        .args(["verify", "--in", path.to_str().unwrap(), "--expect-k", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
