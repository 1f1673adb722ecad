use std::io::Write;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_mutant");

fn example(name: &str) -> String {
    format!("{}/data/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_triangle() {
    let o = run(&["classify", "--diagram", &example("tri-221.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "B3");
}

#[test]
fn count_pentagon_clusters() {
    let o = run(&["clusters", "--type", "A2", "--count"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn mutate_matrix() {
    let o = run(&["mutate", "--matrix", &example("a3.json"), "--at", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"], serde_json::json!([[0, -1, 1], [1, 0, -1], [-1, 1, 0]]));
}

#[test]
fn mutate_from_stdin() {
    let mut child = Command::new(BIN).args(["mutate", "--matrix", "-", "--at", "1,1"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(br#"{"rows":[[0,2],[-1,0]]}"#).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"], serde_json::json!([[0, 2], [-1, 0]]));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "loops", "--type", "A3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("{4, 5}"));
    let o = run(&["verify", "plucker", "--type", "C", "--n", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failure"], serde_json::Value::Null);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["mutate", "--matrix", &example("a3.json"), "--at", "9"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--matrix", "/nonexistent.json"]).status.code(), Some(1));
    let dir = std::env::temp_dir().join(format!("mutant-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"rows":[[0,1],[1,0]]}"#).unwrap();
    let o = run(&["classify", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let cases: [&[&str]; 4] = [
        &["exchange-graph", "--type", "D4"],
        &["variables", "--matrix", &example("a3.json")],
        &["clusters", "--type", "B3", "--format", "json"],
        &["verify", "denominators", "--format", "json"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
