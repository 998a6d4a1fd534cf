mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pda-workbench"))
        .args(args)
        .env_remove("PDA_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn pda_text(body: &str) -> String {
    pda_workbench::pda::text::write_pda(&common::parse_body(body))
}

#[test]
fn construct_then_verify() {
    let built = run(&["construct", "partition", "--q", "3", "--m", "2"], None);
    assert!(built.status.success());
    let text = stdout(&built);
    assert!(text.starts_with("PDA 9 9\n"));
    let checked = run(&["verify"], Some(&text));
    assert_eq!(checked.status.code(), Some(0));
    assert!(stdout(&checked).contains("(9,9,3,18)"));
}

#[test]
fn construct_json_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mn.pda");
    let o = run(
        &["construct", "mn", "--k", "4", "--t", "2", "--format", "json", "-o", path.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "pda-workbench/1");
    assert_eq!(v["params"]["symbols"], 4);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), v["pda"].as_str().unwrap());
}

#[test]
fn missing_parameter_is_a_usage_error() {
    let o = run(&["construct", "grouping", "--m", "5", "--a", "2", "--b", "1"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["construct", "bipartite", "--m", "3", "--a", "2", "--b", "1"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bogus"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_violations() {
    let broken = "PDA 2 2\n1 *\n* 2\n";
    let o = run(&["verify", "--format", "json"], Some(broken));
    assert_eq!(o.status.code(), Some(0));
    let broken = "PDA 2 2\n1 1\n* *\n";
    let o = run(&["verify", "--format", "json"], Some(broken));
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["axiom"], "C3a");
    let o = run(&["verify"], Some("PDA 2 2\n1 *\n"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bound_certificate_json() {
    let o = run(&["bound", "--format", "json"], Some(&pda_text(common::SIX_USERS_11)));
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 11);
    assert_eq!(v["rate_bound"]["num"], 11);
    assert_eq!(v["rate_bound"]["den"], 4);
    assert_eq!(v["witness"], serde_json::json!([1, 5, 2, 6, 3, 4]));
    assert_eq!(v["exact"], true);
    assert_eq!(v["optimality_certified"], true);
}

#[test]
fn bound_methods() {
    let input = pda_text(common::SIX_USERS_11);
    let o = run(&["bound", "--order", "1,5,2,6,3,4"], Some(&input));
    assert!(stdout(&o).contains("value: 11"));
    let o = run(&["bound", "--method", "brute"], Some(&input));
    assert!(stdout(&o).contains("method: exact"));
    let o = run(&["bound", "--method", "greedy"], Some(&input));
    assert!(o.status.success());
    let o = run(&["bound", "--order", "1,1,2"], Some(&input));
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bound", "--method", "nope"], Some(&input));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bound_by_family_ordering() {
    let grid = stdout(&run(&["construct", "bipartite", "--m", "5", "--a", "2", "--b", "1"], None));
    let o = run(&["bound", "--method", "ordered:bipartite"], Some(&grid));
    assert!(o.status.success());
    assert!(stdout(&o).contains("value: 10"));
    assert!(stdout(&o).contains("optimality certified"));
    let grid = stdout(&run(&["construct", "partition", "--q", "3", "--m", "2"], None));
    let o = run(&["bound", "--method", "ordered:partition"], Some(&grid));
    assert!(stdout(&o).contains("value: 15"));
    let o = run(&["bound", "--method", "ordered:bipartite"], Some(&grid));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bound_budget_exit_code() {
    let grid = stdout(&run(&["construct", "partition", "--q", "3", "--m", "3"], None));
    let o = run(&["bound", "--node-budget", "5"], Some(&grid));
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("exact: false"));
}

#[test]
fn search_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.plc");
    let o = run(&["search", "--k", "4", "--f", "6", "--z", "3", "-o", path.to_str().unwrap()], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("best_value: 4"));
    let witness = std::fs::read_to_string(&path).unwrap();
    let o = run(&["fill", "--format", "json"], Some(&witness));
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["symbols"], 4);
    assert_eq!(v["optimal"], true);
    let o = run(&["search", "--k", "3", "--f", "5", "--z", "2", "--budget", "3"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn simulate_single_demand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let o = run(
        &["simulate", "--demand", "1,2,3,4,5,6", "--transcript", path.to_str().unwrap(), "--seed", "3"],
        Some(&pda_text(common::SMALL_6_4)),
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("signal 1: W[1,3] ^ W[2,2] ^ W[4,1]"));
    assert!(text.contains("signal 4: W[4,4] ^ W[5,3] ^ W[6,2]"));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(t["schema"], "pda-workbench/1");
    assert_eq!(t["demand"], serde_json::json!([1, 2, 3, 4, 5, 6]));
    assert_eq!(t["signals"][0]["terms"][0], serde_json::json!({ "user": 1, "row": 3 }));
    assert_eq!(t["signals"][0]["payload_hex"].as_str().unwrap().len(), 128);
}

#[test]
fn simulate_sweep_and_failure() {
    let grid = stdout(&run(&["construct", "mn", "--k", "4", "--t", "2"], None));
    let o = run(&["simulate", "--files", "6", "--sweep", "--format", "json"], Some(&grid));
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["demands_checked"], 1296);
    assert_eq!(v["all_decoded"], true);
    let o = run(&["simulate"], Some("PDA 2 2\n1 1\n* *\n"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn table_csv() {
    let o = run(&["table", "--q-list", "2,3", "--m-min", "1", "--m-max", "3"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,m,s_pda,s_derived,s_exact,mu,formula_ratio"));
    assert!(text.contains("3,2,18,15,17,"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn formulas_pass() {
    let o = run(&["formulas"], None);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["search", "--k", "3", "--f", "5", "--z", "2", "--format", "json"];
    let a = run(&[&args[..], &["--threads", "1"]].concat(), None);
    let b = run(&[&args[..], &["--threads", "4"]].concat(), None);
    assert_eq!(stdout(&a), stdout(&b));
}
