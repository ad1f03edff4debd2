use std::io::Write;
use std::process::{Command, Output, Stdio};

fn corpus(name: &str) -> String {
    format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn recx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recx")).args(args).output().expect("binary runs")
}

fn recx_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_recx"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_prints_value_and_cost() {
    let o = recx_stdin(&["run", "--strategy", "cbv", "-"], "(app (lam (x nat) (add x x)) (num 21))");
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("value: (num 42)"), "{out}");
    assert!(out.contains("cost: 1"), "{out}");
}

#[test]
fn run_reports_exhausted_fuel() {
    let o = recx(&["run", "--fuel", "500", &corpus("omega.pcf")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("out of fuel"));
}

#[test]
fn trace_goes_to_stderr() {
    let o = recx_stdin(&["run", "--trace", "-"], "(app (lam (x nat) x) (num 1))");
    assert_eq!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
    assert!(!stdout(&o).contains("app"), "trace leaked to stdout");
}

#[test]
fn check_bound_emits_one_json_line() {
    let o = recx(&["check-bound", "--strategy", "cbv", &corpus("exp.pcf"), "--samples", "1,2,4,8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["verdict"], "HOLDS");
    assert_eq!(v["strategy"], "cbv");
    for key in ["id", "observed_cost", "bound_cost", "fuel"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn check_bound_on_divergence_is_trivial() {
    let o = recx(&["check-bound", "--fuel", "1000", &corpus("omega.pcf")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "HOLDS_TRIVIALLY_∞");
    assert_eq!(v["bound_cost"], "inf");
}

#[test]
fn extract_and_simplify() {
    let raw = stdout(&recx(&["extract", "--strategy", "cbv", &corpus("exp.pcf")]));
    let simp = stdout(&recx(&["extract", "--strategy", "cbv", "--simplify", &corpus("exp.pcf")]));
    assert!(raw.starts_with("(pair czero (fix"));
    assert!(simp.len() < raw.len());
    let eta = recx(&["extract", "--simplify=eta", &corpus("exp.pcf")]);
    assert_eq!(eta.status.code(), Some(0));
}

#[test]
fn emit_cbpv_matches_subcommand() {
    let a = stdout(&recx(&["emit-cbpv", &corpus("sum.pcf")]));
    let b = stdout(&recx(&["run", "--emit", "cbpv", &corpus("sum.pcf")]));
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

#[test]
fn eval_recurrence_of_exp() {
    // The potential over-approximates: `mod` is bounded, not computed.
    let o = recx(&["eval-recurrence", &corpus("exp.pcf"), "0", "1", "2", "4"]);
    assert_eq!(stdout(&o), "0: <0, 1>\n1: <3, 2>\n2: <6, 8>\n4: <9, 128>\n");
}

#[test]
fn eval_recurrence_of_pcfc_file() {
    let o = recx(&["eval-recurrence", &corpus("mergesort-recurrence.pcfc"), "--samples", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn diff_cost_agrees_on_corpus() {
    for f in ["exp.pcf", "mergesort.pcf", "cbn-duplication.pcf", "big-numerals.pcf"] {
        let o = recx(&["diff-cost", &corpus(f)]);
        assert_eq!(o.status.code(), Some(0), "{f}");
        assert!(stdout(&o).contains("equal: true"), "{f}");
    }
}

#[test]
fn suite_passes_on_a_small_batch() {
    let o = recx(&["suite", "--count", "5", "--fuel", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_ne!(v["verdict"], "VIOLATION");
    }
}

#[test]
fn gen_is_deterministic_and_parseable() {
    let a = stdout(&recx(&["gen", "--seed", "3", "--count", "4"]));
    let b = stdout(&recx(&["gen", "--seed", "3", "--count", "4"]));
    assert_eq!(a, b);
    for line in a.lines() {
        let o = recx_stdin(&["run", "--strategy", "cbv", "--fuel", "1000", "-"], line);
        assert_eq!(o.status.code(), Some(0), "{line}");
    }
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(recx(&["run", "no-such-file.pcf"]).status.code(), Some(2));
    let parse = recx_stdin(&["run", "-"], "(app (num 1)");
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("1:"));
    assert_eq!(recx_stdin(&["run", "-"], "(app (num 1) (num 2))").status.code(), Some(2));
    assert_eq!(recx_stdin(&["run", "--strategy", "cbn", "-"], "(rec (f n nat nat) n)").status.code(), Some(2));
}

#[test]
fn bad_flags_are_rejected() {
    assert_eq!(recx(&["run", "--strategy", "cbx", &corpus("sum.pcf")]).status.code(), Some(2));
}
