//! End-to-end tests of the `ncl` binary: spec'd example verdicts, exit
//! codes, determinism, and the agreement of the normalization-based
//! checker with the brute-force oracle.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ncl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncl"))
        .args(args)
        .output()
        .expect("failed to run ncl")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("ncl-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_verdicts_and_exit_codes() {
    let out = ncl(&["check", "--logic", "builtin:lukasiewicz:3", "imp(x1,x1)"]);
    assert_eq!(stdout(&out), "valid\n");
    assert_eq!(code(&out), 0);

    let out = ncl(&["check", "--logic", "builtin:godel:3", "or(x1,not(x1))"]);
    assert_eq!(stdout(&out), "invalid\n");
    assert_eq!(code(&out), 1);
}

#[test]
fn normalize_full_stage() {
    let out = ncl(&["normalize", "--n", "2", "--stage", "full", "q(x2,x1,e1)"]);
    assert_eq!(stdout(&out), "q(x1, e1, q(x2, e2, e1))\n");
    assert_eq!(code(&out), 0);

    // the hnf stage leaves an already-head-normal term alone
    let out = ncl(&["normalize", "--n", "2", "--stage", "hnf", "q(x2,x1,e1)"]);
    assert_eq!(stdout(&out), "q(x2, x1, e1)\n");

    // traced output ends in the same normal form
    let out = ncl(&["normalize", "--n", "2", "--trace", "q(x2,x1,e1)"]);
    assert!(stdout(&out).ends_with("q(x1, e1, q(x2, e2, e1))\n"));
}

#[test]
fn equiv_verdicts() {
    let out = ncl(&["equiv", "--n", "2", "q(x1,e1,e2)", "x1"]);
    assert_eq!(stdout(&out), "equivalent\n");
    assert_eq!(code(&out), 0);

    let out = ncl(&["equiv", "--n", "2", "q(x1,e2,e1)", "x1"]);
    assert_eq!(stdout(&out), "inequivalent\n");
    assert_eq!(code(&out), 1);
}

#[test]
fn translate_prints_pure_term() {
    let out = ncl(&["translate", "--logic", "builtin:cl:2", "not(x1)"]);
    assert_eq!(stdout(&out), "q(x1, e2, e1)\n");
    assert_eq!(code(&out), 0);
}

#[test]
fn mdd_writes_dot() {
    let out = ncl(&["mdd", "--n", "2", "q(x2,x1,e1)"]);
    assert!(stdout(&out).starts_with("digraph G {"));
    assert_eq!(code(&out), 0);

    let path = std::env::temp_dir().join(format!("ncl-cli-test-{}.dot", std::process::id()));
    let out = ncl(&["mdd", "--n", "2", "q(x2,x1,e1)", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("digraph G {"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(code(&ncl(&["nosuchcommand"])), 2);
    assert_eq!(code(&ncl(&["normalize", "--n", "2", "q(x1,e1"])), 2);
    assert_eq!(code(&ncl(&["check", "--logic", "builtin:nosuch:3", "x1"])), 2);
    assert_eq!(code(&ncl(&["check", "--logic", "builtin:cl:3", "x1"])), 2);
    assert_eq!(code(&ncl(&["normalize", "--n", "1", "x1"])), 2);
}

#[test]
fn checker_agrees_with_oracle() {
    let formulas = [
        "imp(x1,x1)",
        "imp(x1,imp(x2,x1))",
        "or(x1,not(x1))",
        "not(not(x1))",
        "imp(not(not(x1)),x1)",
        "and(x1,imp(x1,x2))",
        "imp(imp(imp(x1,x2),x1),x1)",
    ];
    for logic in ["builtin:lukasiewicz:3", "builtin:godel:3", "builtin:lukasiewicz:4"] {
        for phi in formulas {
            let check = ncl(&["check", "--logic", logic, phi]);
            let oracle = ncl(&["oracle", "--logic", logic, phi]);
            assert_eq!(
                stdout(&check),
                stdout(&oracle),
                "disagreement on {phi} in {logic}"
            );
            assert_eq!(code(&check), code(&oracle));
        }
    }
}

#[test]
fn logic_files_are_accepted() {
    let path = temp_file(
        "logic",
        "logic tiny\nn 2\ndesignated 2\nconnective not 1\ntable 2 1\n",
    );
    let out = ncl(&[
        "check",
        "--logic",
        path.to_str().unwrap(),
        "not(not(q(x1,e2,e2)))",
    ]);
    assert_eq!(stdout(&out), "valid\n");
    assert_eq!(code(&out), 0);
    std::fs::remove_file(&path).ok();
}

#[test]
fn algebra_verify_suite() {
    let path = temp_file("algebra", "algebra three-squared\nn 3\npointwise-power 2\n");
    let out = ncl(&["algebra", "verify", path.to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("axioms: ok"));
    assert!(text.contains("centrality: ok"));
    assert!(text.contains("representation: ok"));
    assert_eq!(code(&out), 0);
    std::fs::remove_file(&path).ok();
}

#[test]
fn power_verify_suite() {
    let out = ncl(&["power", "verify", "--semiring", "builtin:z4", "--e-size", "2"]);
    let text = stdout(&out);
    assert!(text.contains("semiring axioms: ok"));
    assert!(text.contains("complemented core: ok (2 elements, 1 atoms)"));
    assert!(text.contains("centrality cross-validation: ok (16 vectors)"));
    assert!(text.contains("central vectors match the core: ok"));
    assert!(text.contains("boolean power: ok"));
    assert_eq!(code(&out), 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["mdd", "--n", "3", "q(x1,q(x2,e1,e2,e3),x2,e3)"];
    let first = stdout(&ncl(&args));
    let second = stdout(&ncl(&args));
    assert_eq!(first, second);
    assert!(!first.is_empty());
}
