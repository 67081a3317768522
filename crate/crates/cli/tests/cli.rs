use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn qreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qreal")).args(args).env_remove("QREAL_TOL").output().unwrap()
}

fn run(args: &[&str], file: &str) -> Output {
    let path = fixture(file);
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    qreal(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn example_passes_everything() {
    let o = run(&["check", "--all"], "example.qsde");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("H = (0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2"));
    assert!(text.contains("overall PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn flipped_b_fails_the_match() {
    let o = run(&["check", "--all", "--json"], "broken.qsde");
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["overall"], false);
    let failing: Vec<&str> = v["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["condition_id"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"PR-B-match"));
    let b = v["conditions"].as_array().unwrap().iter().find(|c| c["condition_id"] == "PR-B-match").unwrap();
    assert_eq!(b["residual_norm"], 4.0);
    assert_eq!(b["witness"][0]["entry"], "(1,1)");
}

#[test]
fn missing_file_and_bad_input_exit_two() {
    let o = qreal(&["check", "/nonexistent/model.qsde"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qsde");
    std::fs::write(&path, "modes: 2\nchannels: 1\nA[1] = a3\n").unwrap();
    let o = qreal(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 8"), "{}", stderr(&o));
}

#[test]
fn json_is_byte_stable_and_agrees_with_text() {
    let a = run(&["check", "--json"], "broken.qsde");
    let b = run(&["check", "--json"], "broken.qsde");
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&run(&["check"], "broken.qsde"));
    for c in json(&a)["conditions"].as_array().unwrap() {
        let verdict = if c["pass"] == true { "PASS" } else { "FAIL" };
        let id = c["condition_id"].as_str().unwrap();
        assert!(text.lines().any(|l| l.trim_start().starts_with(&format!("{verdict}  {id} "))), "{id}");
    }
}

#[test]
fn selected_checks_only() {
    let o = run(&["check", "--checks", "class,preserve", "--json"], "example.qsde");
    assert_eq!(o.status.code(), Some(0));
    for c in json(&o)["conditions"].as_array().unwrap() {
        let id = c["condition_id"].as_str().unwrap();
        assert!(id.starts_with("CLASS-") || id.starts_with("PRES-"), "{id}");
    }
    let o = run(&["check", "--checks", "realize"], "example.qsde");
    let text = stdout(&o);
    assert!(text.contains("L[3] = (2+0i)*a1'"));
    assert!(text.contains("nbar = 4"));
    assert_eq!(run(&["check", "--checks", "realize", "--all"], "example.qsde").status.code(), Some(2));
}

#[test]
fn extract_prints_hamiltonian_and_coupling() {
    let o = run(&["extract", "--json"], "example.qsde");
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["nbar"], 4);
    assert_eq!(v["hbar"], "(0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2");
    assert_eq!(v["hbar_self_adjoint"], true);
    assert_eq!(v["lbar"], serde_json::json!(["(2+0i)*a1", "(2+0i)*a2", "(2+0i)*a1'", "(2+0i)*a2'"]));
}

#[test]
fn extract_requires_realizability_unless_forced() {
    let o = run(&["extract"], "broken.qsde");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--force"));
    assert!(stdout(&o).is_empty());
    let o = run(&["extract", "--force"], "broken.qsde");
    assert!(stderr(&o).contains("warning: model is not physically realizable"));
    assert!(stdout(&o).contains("H self-adjoint: yes"));
}

#[test]
fn extract_rejects_zero_drift() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.qsde");
    std::fs::write(&path, "modes: 1\nchannels: 1\nA[1] = 0\nB = [[0]]\nC[1] = 0\n").unwrap();
    let o = qreal(&["extract", "--force", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n-bar is undefined"), "{}", stderr(&o));
}

#[test]
fn tolerance_and_float_mode() {
    let path = fixture("example.qsde");
    let o = Command::new(env!("CARGO_BIN_EXE_qreal"))
        .args(["check", "--float", path.to_str().unwrap()])
        .env("QREAL_TOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_qreal"))
        .args(["check", path.to_str().unwrap()])
        .env("QREAL_TOL", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["check", "--exact", "--float"], "example.qsde").status.code(), Some(2));
}

#[test]
fn oracle_confirms_symbolic_verdicts() {
    let o = run(&["check", "--oracle", "--fock-n", "6", "--guard", "4", "--json"], "broken.qsde");
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let conds = v["conditions"].as_array().unwrap();
    let oracle: Vec<&Value> = conds.iter().filter(|c| c["condition_id"].as_str().unwrap().starts_with("ORACLE-")).collect();
    assert!(oracle.len() >= 10);
    assert!(oracle.iter().all(|c| c["pass"] == true));

    let o = run(&["oracle", "--json"], "example.qsde");
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["truncation"], 6);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["max_deviation"].as_f64().unwrap() <= 1e-9));
    assert_eq!(run(&["oracle"], "broken.qsde").status.code(), Some(1));
    assert_eq!(run(&["oracle", "--fock-n", "2", "--guard", "1"], "example.qsde").status.code(), Some(2));
    assert_eq!(run(&["check", "--guard", "2"], "example.qsde").status.code(), Some(2));
}

#[test]
fn audit_is_reported_separately() {
    let o = run(&["check", "--audit", "--json"], "example.qsde");
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let ids: Vec<&str> = v["audit"].as_array().unwrap().iter().map(|c| c["condition_id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"AUDIT-drift-identity-ungraded"));
}

#[test]
fn render_round_trips() {
    let first = stdout(&run(&["render"], "example.qsde"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("again.qsde");
    std::fs::write(&path, &first).unwrap();
    let second = stdout(&qreal(&["render", path.to_str().unwrap()]));
    assert_eq!(first, second);
    assert_eq!(qreal(&["check", path.to_str().unwrap()]).status.code(), Some(0));
}
