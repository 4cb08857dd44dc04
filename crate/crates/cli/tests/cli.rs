use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlcover")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("nlcover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn info_on_k3() {
    let v = json(&["info", "--lattice", "K3"]);
    assert_eq!(v["signature"], serde_json::json!([3, 19]));
    assert_eq!(v["det"], -1);
    assert_eq!(v["length"], 0);
}

#[test]
fn info_from_a_gram_file() {
    let path = temp("a2.json", r#"{"label": "A2", "gram": [[2, -1], [-1, 2]]}"#);
    let v = json(&["info", "--lattice", path.to_str().unwrap()]);
    assert_eq!(v["det"], 3);
    assert_eq!(v["discriminant_form"]["orders"], serde_json::json!([3]));
    assert_eq!(v["discriminant_form"]["q"][0], "2/3");
}

#[test]
fn automorphisms_of_a2() {
    let v = json(&["aut", "--lattice", "A2"]);
    assert_eq!(v["order"], 12);
    assert_eq!(v["stable_order"], 6);
}

#[test]
fn covering_plan() {
    let v = json(&["plan-cover", "--lattice", "U^2+<-2>", "--N", "32"]);
    assert_eq!(v["p"], 5);
    assert_eq!(v["bound"], 39);
    assert_eq!(v["constant"], 16);
    assert_eq!(v["sublattice_count"], 781);
    assert_eq!(v["all_very_stable"], true);
    let m = json(&["plan-cover", "--lattice", "U^2+<-2>", "--N", "32", "--target", "M"]);
    assert_eq!(m["constant"], 32);
}

#[test]
fn lines_agree_with_enumeration() {
    let v = json(&["lines", "--lattice", "U+<-2>", "--p", "5"]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["line_counts"]["total"], 31);
}

#[test]
fn gluing_to_k3() {
    let v = json(&["glue-k3", "--lattice", "U+<-2>", "--complement", "U+<2>+E8minus^2"]);
    assert_eq!(v["signature"], serde_json::json!([3, 19]));
    assert_eq!(v["det"], -1);
}

#[test]
fn refusal_exits_two() {
    let out = run(&["plan-cover", "--lattice", "A2", "--N", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err.get("refusal").is_some(), "{err}");
}

#[test]
fn invalid_input_exits_one() {
    assert_eq!(run(&["info", "--lattice", "Q7"]).status.code(), Some(1));
    let path = temp("bad.json", "{\"gram\": [[2, 1], [1");
    let out = run(&["info", "--lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1 column"), "{err}");
    let odd = temp("odd.json", r#"{"gram": [[1, 0], [0, 2]]}"#);
    assert_eq!(run(&["info", "--lattice", odd.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn human_output_and_out_file() {
    let out = run(&["--human", "info", "--lattice", "U"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("det") && !text.trim_start().starts_with('{'), "{text}");
    let path = std::env::temp_dir().join(format!("nlcover-cli-out-{}.json", std::process::id()));
    let out = run(&["--out", path.to_str().unwrap(), "info", "--lattice", "U"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["det"], -1);
    std::fs::remove_file(path).ok();
}
