use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rentdiv_cli::examples::{APPENDIX_EXAMPLE, TWO_ROOMS};
use serde_json::Value;

fn rentdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rentdiv")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write file");
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

#[test]
fn solve_reproduces_leximin_rents() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ex.json", APPENDIX_EXAMPLE);
    let out = rentdiv(&["solve", s(&input), "--objective", "leximin"]);
    assert_eq!(out.status.code(), Some(0));
    let result = json(&out);
    assert_eq!(result["status"], "solved");
    let rents: Vec<&str> = ["1", "2", "3", "4"].iter().map(|r| result["rents"][r]["exact"].as_str().unwrap()).collect();
    assert_eq!(rents, ["0", "2", "0", "2"]);
    assert_eq!(result["objective_value"][0]["exact"], "0");
}

#[test]
fn infeasible_bounds_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "pinned.json",
        r#"{"valuations": [["10", "2"], ["4", "6"]], "total_rent": "8",
            "lower_bounds": ["0", "3"], "upper_bounds": ["0", "8"]}"#,
    );
    let out = rentdiv(&["solve", s(&input)]);
    assert_eq!(out.status.code(), Some(2));
    let result = json(&out);
    assert_eq!(result["certificate"]["kind"], "EnvyPathViolation");
    assert_eq!(result["status"], "infeasible");

    // the certificate re-validates from the file alone
    let saved = write(dir.path(), "pinned.result.json", std::str::from_utf8(&out.stdout).unwrap());
    let verified = rentdiv(&["verify", s(&input), s(&saved)]);
    assert_eq!(verified.status.code(), Some(0), "{}", String::from_utf8_lossy(&verified.stdout));
}

#[test]
fn parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"valuations\": [[");
    let out = rentdiv(&["solve", s(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));

    let float = write(dir.path(), "float.json", r#"{"valuations": [[0.5]], "total_rent": "1"}"#);
    assert_eq!(rentdiv(&["solve", s(&float)]).status.code(), Some(1));

    assert_eq!(rentdiv(&["solve", "/nonexistent/file.json"]).status.code(), Some(1));
}

#[test]
fn verify_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ex.json", APPENDIX_EXAMPLE);
    let solved = rentdiv(&["solve", s(&input), "--objective", "leximin"]);
    let text = String::from_utf8(solved.stdout).unwrap();
    let result = write(dir.path(), "ex.result.json", &text);
    let out = rentdiv(&["verify", s(&input), s(&result)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);

    let mut tampered: Value = serde_json::from_str(&text).unwrap();
    tampered["rents"]["2"]["exact"] = Value::String("3".into());
    let bad = write(dir.path(), "bad.json", &tampered.to_string());
    let out = rentdiv(&["verify", s(&input), s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    let report = json(&out);
    assert_eq!(report["checks"]["total"], false);

    let mut swapped: Value = serde_json::from_str(&text).unwrap();
    swapped["assignment"]["1"] = Value::String("3".into());
    swapped["assignment"]["3"] = Value::String("1".into());
    swapped.as_object_mut().unwrap().remove("utilities");
    let swapped = write(dir.path(), "swapped.json", &swapped.to_string());
    let out = rentdiv(&["verify", s(&input), s(&swapped)]);
    let report = json(&out);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["checks"]["envy_free"], true);
    assert_eq!(report["checks"]["canonical_assignment"], false);
}

#[test]
fn oracle_answers() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.json", TWO_ROOMS);
    let out = rentdiv(&["oracle", s(&two), "--objective", "maximin"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["objective_value"]["exact"], "4");

    let ex = write(dir.path(), "ex.json", APPENDIX_EXAMPLE);
    let out = rentdiv(&["oracle", s(&ex), "--objective", "minspread"]);
    let result = json(&out);
    assert_eq!(result["objective_value"]["exact"], "19");
    let rents: Vec<&str> = ["1", "2", "3", "4"].iter().map(|r| result["rents"][r]["exact"].as_str().unwrap()).collect();
    assert_eq!(rents, ["1", "0", "1", "2"]);

    let nine: Vec<Vec<&str>> = vec![vec!["1"; 9]; 9];
    let big = write(dir.path(), "nine.json", &serde_json::json!({"valuations": nine, "total_rent": "9"}).to_string());
    assert_eq!(rentdiv(&["oracle", s(&big)]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ex.json", APPENDIX_EXAMPLE);
    let first = rentdiv(&["solve", s(&input), "--objective", "minspread", "--trace"]);
    let second = rentdiv(&["solve", s(&input), "--objective", "minspread", "--trace"]);
    assert_eq!(first.stdout, second.stdout);
    assert!(!json(&first)["trace"].as_array().unwrap().is_empty());
}

#[test]
fn batch_mode_solves_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", APPENDIX_EXAMPLE);
    write(dir.path(), "b.json", TWO_ROOMS);
    write(dir.path(), "notes.txt", "ignored");
    let out = rentdiv(&["solve", "--input-dir", s(dir.path()), "--objective", "maximin"]);
    assert_eq!(out.status.code(), Some(0));
    let result = json(&out);
    assert_eq!(result.as_object().unwrap().len(), 2);
    assert_eq!(result["b.json"]["objective_value"]["exact"], "4");
}

#[test]
fn report_prints_names_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.json", TWO_ROOMS);
    let out = rentdiv(&["report", s(&two), "--objective", "maximin", "--dot"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ann"));
    assert!(text.contains("digraph envy"));
}
