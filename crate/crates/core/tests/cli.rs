// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

fn golden(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../golden")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ctv(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ctv").chain(args.iter().copied());
    let code = ctv::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn golden_verifies() {
    let (code, out, _) = ctv(&["verify", &golden("compress8x8.goal")]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with(": Verified"), "{out}");
}

#[test]
fn missing_hypothesis_is_named() {
    let (code, out, _) = ctv(&["verify", &golden("compress8x8-nohyp.goal")]);
    assert_eq!(code, 1);
    assert!(out.contains("missing: (integerp pp3)"), "{out}");
    assert!(out.contains("(hyps (integerp pp0)"), "{out}");
}

#[test]
fn shifted_carry_is_not_equal() {
    let (code, out, _) = ctv(&["verify", &golden("bad-shift.goal")]);
    assert_eq!(code, 1);
    assert!(
        out.contains("NotEqual") && out.contains("lhs residual") && out.contains("rhs residual"),
        "{out}"
    );
}

#[test]
fn worst_verdict_wins_across_files() {
    let (code, out, _) = ctv(&[
        "verify",
        "--jobs",
        "3",
        &golden("compress8x8.goal"),
        &golden("bad-shift.goal"),
        &golden("compress8x8-nohyp.goal"),
    ]);
    assert_eq!(code, 1);
    // reports keep the command-line order
    let first = out.find("compress8x8.goal").unwrap();
    let second = out.find("bad-shift.goal").unwrap();
    assert!(first < second, "{out}");
}

#[test]
fn gen_reproduces_golden() {
    let (code, out, _) = ctv(&["gen", "--width", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out, fs::read_to_string(golden("compress8x8.goal")).unwrap());
}

#[test]
fn gen_writes_file_and_diagram_stays_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("d.goal");
    let p = path.to_str().unwrap();
    let (code, out, _) = ctv(&["gen", "--width", "6", "--tree", "dadda", "--out", p, "--diagram"]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with(';')), "{out}");
    assert_eq!(ctv(&["verify", p]).0, 0);

    let (code, out, _) = ctv(&[
        "gen",
        "--width",
        "5",
        "--tree",
        "wallace",
        "--tight-widths",
        "--diagram",
    ]);
    assert_eq!(code, 0);
    fs::write(&path, out).unwrap();
    assert_eq!(ctv(&["verify", p]).0, 0);
}

#[test]
fn sim_golden_random() {
    let (code, out, _) = ctv(&["sim", &golden("compress8x8.goal"), "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "Equivalent (1024 cases)");
}

#[test]
fn sim_finds_shifted_carry() {
    let (code, out, _) = ctv(&[
        "sim",
        &golden("bad-shift.goal"),
        "--mode",
        "exhaustive",
        "--var-width",
        "4",
    ]);
    assert_eq!(code, 1);
    assert!(out.starts_with("Counterexample"), "{out}");
    assert!(out.contains("lhs = ") && out.contains("rhs = "), "{out}");
}

#[test]
fn sim_random_needs_seed() {
    let (code, _, err) = ctv(&["sim", &golden("compress8x8.goal")]);
    assert_eq!(code, 2);
    assert!(err.contains("seed"), "{err}");
}

#[test]
fn explain_lists_expansion() {
    let (code, out, _) = ctv(&["explain", &golden("compress8x8.goal")]);
    assert_eq!(code, 0);
    assert!(out.contains("2 addends x 16 bits = 32 items"), "{out}");
    assert!(out.contains("    (:bit l4pp0 0)@0 (:bit l4pp1 0)@0"), "{out}");
    assert!(out.contains("add3"));
    assert!(out.trim_end().ends_with("Verified"), "{out}");
}

#[test]
fn trace_is_json_lines_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let (code, _, _) = ctv(&["verify", "--trace", path.to_str().unwrap(), &golden("compress8x8.goal")]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&path).unwrap();
    let recs: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs[0]["type"], "header");
    assert_eq!(recs[0]["goal"], "compress-lemma-8x8");
    let bound = recs[0]["size_bound"].as_u64().unwrap();
    assert_eq!(bound, 8 * 16);
    let steps: Vec<_> = recs.iter().filter(|r| r["type"] == "step").collect();
    assert!(!steps.is_empty());
    for s in &steps {
        assert!(s["size_before"].as_u64().unwrap() <= bound);
        assert!(s["size_after"].as_u64().unwrap() <= bound);
    }
    assert_eq!(recs.iter().filter(|r| r["type"] == "final").count(), 2);
    assert_eq!(recs.last().unwrap()["verdict"], "verified");
}

#[test]
fn check_steps_reports_no_failures() {
    let (code, out, _) = ctv(&["verify", "--check-steps", "--envs", "10", &golden("compress8x8.goal")]);
    assert_eq!(code, 0);
    assert!(out.contains(", 0 failures"), "{out}");
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(ctv(&[]).0, 2);
    assert_eq!(ctv(&["verify"]).0, 2);
    assert_eq!(ctv(&["gen", "--width", "1"]).0, 2);
    assert_eq!(ctv(&["gen", "--width", "8", "--tree", "booth"]).0, 2);
    let (code, _, err) = ctv(&["verify", "/nonexistent/x.goal"]);
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/x.goal"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.goal");
    fs::write(&bad, "(goal (name g) (lhs (bits x '3 '0)").unwrap();
    let (code, _, err) = ctv(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.goal:"), "{err}");
}

#[test]
fn unexpanded_call_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.goal");
    let text = fs::read_to_string(golden("compress8x8.goal"))
        .unwrap()
        .replace("(expand (compress))", "");
    fs::write(&path, text).unwrap();
    let (code, out, err) = ctv(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{out}{err}");
    assert!(err.contains("Aborted"), "{err}");
}

#[test]
fn extra_defs_are_loaded() {
    let dir = tempfile::tempdir().unwrap();
    let defs = dir.path().join("defs.lisp");
    let goal = dir.path().join("g.goal");
    let text = fs::read_to_string(golden("bad-shift.goal")).unwrap();
    let (def, rest) = text.split_at(text.find("(goal").unwrap());
    fs::write(&defs, def).unwrap();
    fs::write(&goal, rest).unwrap();
    let (code, _, _) = ctv(&["verify", "--defs", defs.to_str().unwrap(), goal.to_str().unwrap()]);
    assert_eq!(code, 1);
    // the same define twice is refused
    let (code, _, err) = ctv(&["verify", "--defs", defs.to_str().unwrap(), &golden("bad-shift.goal")]);
    assert_eq!(code, 2);
    assert!(err.contains("defined twice"), "{err}");
}
