use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.calc"))
}

fn stepcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stepcalc"))
        .args(args)
        .env_remove("STEPCALC_SERVER")
        .env_remove("STEPCALC_STORAGE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_prints_the_trace() {
    let f = fixture("cherries");
    let o = stepcalc(&["run", f.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("  W = 12 cherry/min = 3 cherry/min + 9 cherry/min\n"));
    assert!(out.ends_with("Answer: T = 6 min\n"));

    let o = stepcalc(&["run", f.to_str().unwrap(), "--set", "A=12 min"]);
    assert!(stdout(&o).ends_with("Answer: T = 24/5 min\n"));
}

#[test]
fn solve_prints_the_formula() {
    let f = fixture("cherries");
    let o = stepcalc(&["solve", f.to_str().unwrap(), "--let", "A", "--let", "B", "--let", "C"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("Answer: A*B/(A + B) min\n"));
    assert!(out.contains("Eliminated: C\n"));
}

#[test]
fn check_reports_and_sets_status() {
    let f = fixture("cherries");
    let o = stepcalc(&["check", f.to_str().unwrap(), "--trials", "25", "--seed", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("C: independent"));
    assert!(out.contains("agreement: 25/25 agreed"));

    // Every draw is infeasible, so none agree.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.calc");
    std::fs::write(&path, "data a = 2 min\nT := a/(a - a - a)\nreturn T\n").unwrap();
    let o = stepcalc(&["check", path.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("FAIL\n"));
}

#[test]
fn fmt_is_stable_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.calc");
    std::fs::write(&path, "data A=24 min;data B = 8 min\nT:=A*B/(A+B)\nreturn T").unwrap();
    let o = stepcalc(&["fmt", path.to_str().unwrap()]);
    assert!(o.status.success());
    let first = stdout(&o);
    assert_eq!(first, "data A = 24 min\ndata B = 8 min\nT := A*B/(A + B)\nreturn T\n");

    let o = stepcalc(&["fmt", "--write", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
}

#[test]
fn errors_exit_with_two() {
    let f = fixture("raft");
    let o = stepcalc(&["run", f.to_str().unwrap(), "--set", "a=4 day"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("division by zero"), "{err}");

    let o = stepcalc(&["run", "/nonexistent.calc"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn talks_to_an_external_server() {
    let mut server = Command::new(env!("CARGO_BIN_EXE_stepcalc"))
        .args(["serve", "--port", "0"])
        .env_remove("STEPCALC_STORAGE")
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    std::io::BufRead::read_line(
        &mut std::io::BufReader::new(server.stderr.take().unwrap()),
        &mut line,
    )
    .unwrap();
    let url = line
        .split_whitespace()
        .find(|w| w.starts_with("http://"))
        .unwrap()
        .trim_end_matches(',')
        .to_string();

    let f = fixture("taps");
    let o = stepcalc(&["--server", &url, "solve", f.to_str().unwrap(), "--let", "a", "--let", "b"]);
    server.kill().unwrap();
    server.wait().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("Answer: a*b/(a + b) min\n"));
}
