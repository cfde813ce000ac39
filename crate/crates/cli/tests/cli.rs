//! Black-box tests of the binary: flags, output shape, exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wildsets"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary exits")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("no signal")
}

#[test]
fn rank_reports_key_value_lines() {
    let out = run(&["rank", "--dim", "2", "--mode", "based", "--term", "(E 2)"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("rank: 2\n"), "got: {text}");
    assert!(text.contains("death: 2\n"));
    assert!(text.contains("bp-death: 2\n"));
    assert!(text.contains("stabilizer: empty\n"));
}

#[test]
fn rank_of_a_point_is_one() {
    let out = run(&["rank", "--dim", "1", "--mode", "based", "--term", "pt"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("rank: 1\n"));
}

#[test]
fn rank_of_the_wild_circle_wedge_is_three() {
    let term = "(swedge (const (realize (S 1))))";
    let out = run(&["rank", "--dim", "1", "--mode", "based", "--term", term]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("rank: 3\n"));
}

#[test]
fn rank_reads_the_term_from_stdin() {
    let out = run_stdin(&["rank", "--dim", "1", "--mode", "free", "--term"], "");
    // an empty value for --term is an input error, not a crash
    assert_eq!(code(&out), 1);

    let out = run_stdin(&["rank", "--dim", "1", "--mode", "free"], "(PW 1)\n");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("rank: 0\n"));
    assert!(text.contains("death: never\n"));
    assert!(text.contains("stabilizer: (PW 1)\n"));
}

#[test]
fn rule_gap_exits_two_and_names_the_certificate() {
    let out = run(&[
        "rank",
        "--dim",
        "1",
        "--mode",
        "free",
        "--term",
        "(swedge (const (E 1)))",
    ]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("peano-eq"), "got: {err}");
    assert!(err.contains("(swedge (const (E 1)))"));
}

#[test]
fn bad_term_syntax_exits_one() {
    let out = run(&["rank", "--dim", "1", "--mode", "based", "--term", "(E"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn bad_flags_exit_one() {
    let out = run(&["rank", "--dimension", "1"]);
    assert_eq!(code(&out), 1);
    let out = run(&["rank", "--dim", "1", "--mode", "sideways", "--term", "pt"]);
    assert_eq!(code(&out), 1);
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn trace_prints_one_line_per_sampled_stage() {
    let out = run(&[
        "trace",
        "--dim",
        "1",
        "--mode",
        "based",
        "--term",
        "(E 1)",
        "--through",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "stage 0: (E 1)\nstage 1: pt\nstage 2: empty\nstage 3: empty\n"
    );
}

#[test]
fn trace_at_stage_zero_prints_the_normalized_term() {
    let out = run(&[
        "trace",
        "--dim",
        "1",
        "--mode",
        "based",
        "--term",
        "(disj (E 1) empty)",
        "--through",
        "0",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "stage 0: (E 1)\n");
}

#[test]
fn trace_of_the_omega_witness_dies_exactly_at_omega() {
    let out = run(&[
        "trace",
        "--dim",
        "1",
        "--mode",
        "based",
        "--term",
        "(swedge (family w whisker-witness))",
        "--through",
        "w",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12, "stages 0..=10 and w: {text}");
    for line in &lines[..11] {
        assert!(
            !line.ends_with(": empty"),
            "finite stage died early: {line}"
        );
    }
    assert_eq!(lines[11], "stage w: empty");
}

#[test]
fn trace_samples_limit_milestones_below_the_bound() {
    let out = run(&[
        "trace",
        "--dim",
        "1",
        "--mode",
        "based",
        "--term",
        "(swedge (family w*2 whisker-witness))",
        "--through",
        "w*2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("\nstage w:"), "milestone w missing: {text}");
    assert!(
        text.contains("\nstage w+1:"),
        "sample above w missing: {text}"
    );
    assert!(text.ends_with("stage w*2: empty\n"));
}

#[test]
fn witness_prints_term_and_passes_verification() {
    let out = run(&["witness", "--dim", "2", "--mode", "based", "--ordinal", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "(E 2)\n");

    let out = run(&[
        "witness",
        "--dim",
        "1",
        "--mode",
        "free",
        "--ordinal",
        "0",
        "--verify",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("(PW 1)\n"));
    assert!(text.contains("verify: PASS (rank 0)\n"));
    assert!(text.contains("successor-clause: n/a\n"));

    let out = run(&[
        "witness",
        "--dim",
        "1",
        "--mode",
        "based",
        "--ordinal",
        "w^2+3",
        "--verify",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("verify: PASS (rank w^2+3)\n"), "got: {text}");
    assert!(text.contains("successor-clause: PASS\n"));
}

#[test]
fn based_witness_of_rank_zero_is_an_input_error() {
    let out = run(&["witness", "--dim", "1", "--mode", "based", "--ordinal", "0"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn verify_paper_all_rows_pass() {
    let out = run(&["verify-paper"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.lines().count() >= 60);
    assert!(text.lines().all(|l| l.starts_with("row ")));
    assert!(text.lines().all(|l| l.ends_with(": PASS")), "got: {text}");
}

#[test]
fn cb_rank_matches_the_closed_form() {
    for (ord, want) in [("w", "2"), ("w^(w)", "w+1"), ("0", "1"), ("w^2*4", "3")] {
        let out = run(&["cb", "--rank", ord]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), format!("{want}\n"), "for {ord}");
    }
}

#[test]
fn cb_derivative_prints_the_derived_tree() {
    let out = run(&["cb", "--derivative", "(node (const leaf))"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "leaf\n");

    let out = run(&["cb", "--derivative", "leaf"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "empty\n");

    let out = run(&["cb", "--derivative", "(node (family w))"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "(node (family w))\n");
}

#[test]
fn cb_requires_exactly_one_operation() {
    let out = run(&["cb"]);
    assert_eq!(code(&out), 1);
    let out = run(&["cb", "--rank", "w", "--derivative", "leaf"]);
    assert_eq!(code(&out), 1);
    let out = run(&["cb", "--rank", "not an ordinal"]);
    assert_eq!(code(&out), 1);
    let out = run(&["cb", "--derivative", "(node"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fmt_accepts_exactly_the_canonical_spelling() {
    let out = run(&["fmt", "--term", "(E 1)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "(E 1)\n");

    // same term, non-canonical whitespace: reprinted but flagged
    let out = run(&["fmt", "--term", "( E   1 )"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "(E 1)\n");

    let out = run_stdin(&["fmt"], "(attach (E 1) (const (E 1)))\n");
    assert_eq!(code(&out), 0);

    let out = run(&["fmt", "--term", "(E"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "");
}
