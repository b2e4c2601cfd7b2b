use std::fs;

use clap::Parser;
use strnim_cli::{run, Cli, ExitCode};

fn exec_with_input(args: &[&str], input: &str) -> (ExitCode, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("strnim").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(cli, input.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn exec(args: &[&str]) -> (ExitCode, String, String) {
    exec_with_input(args, "")
}

#[test]
fn classify_text() {
    let (code, out, _) = exec(&["classify", "abccaacb"]);
    assert_eq!(code, ExitCode::Ok);
    assert!(out.contains("verdict:  P"));
    assert!(out.contains("grundy:   0"));
    assert!(out.contains("family comp_palindrome: P"));
}

#[test]
fn classify_json() {
    let (code, out, _) = exec(&["--format", "json", "classify", "aaba"]);
    assert_eq!(code, ExitCode::Ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "N");
    assert_eq!(v["certificate"], serde_json::json!({"run": 1, "count": 2}));
    assert_eq!(v["rle"], "a^2b^1a^1");
}

#[test]
fn grundy_and_next() {
    assert_eq!(exec(&["grundy", "a^5"]).1.trim(), "5");
    let (_, out, _) = exec(&["next", "abbccb"]);
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("(3,2) -> abbb"));
    let (_, out, _) = exec(&["next", "a"]);
    assert_eq!(out.trim(), "(1,1) -> ε");
}

#[test]
fn moves_marks_winning() {
    let (_, out, _) = exec(&["moves", "aaba"]);
    let winning: Vec<&str> = out.lines().filter(|l| l.ends_with("winning")).collect();
    assert_eq!(winning, ["(1,2) -> ba [P g=0]  winning"]);
}

#[test]
fn parse_errors_exit_2() {
    let (code, _, err) = exec(&["classify", "a^0b"]);
    assert_eq!(code, ExitCode::Usage);
    assert!(err.contains("zero exponent"));
    assert_eq!(exec(&["classify", "a b"]).0, ExitCode::Usage);
    assert_eq!(exec(&["verify", "nonsense"]).0, ExitCode::Usage);
}

#[test]
fn budget_exhaustion_exit_3() {
    let (code, _, err) = exec(&["--budget", "5", "grundy", "abcabcabcab"]);
    assert_eq!(code, ExitCode::Budget);
    assert!(err.contains("budget"));
}

#[test]
fn no_period_exit_4() {
    let (code, _, _) = exec(&["aba", "-j", "6", "--period", "--search-bound", "8"]);
    assert_eq!(code, ExitCode::NoPeriod);
}

#[test]
fn table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let (code, _, _) = exec(&[
        "table",
        "--alphabet",
        "ab",
        "--max-len",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, ExitCode::Ok);
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "position,length,grundy,verdict");
    assert_eq!(lines[1], ",0,0,P");
    assert_eq!(lines.len(), 1 + 15);
    assert!(lines.contains(&"ab,2,0,P"));
    assert!(lines.contains(&"aab,3,3,N"));

    let (_, canon, _) = exec(&[
        "table",
        "--alphabet",
        "ab",
        "--max-len",
        "3",
        "--canonical-only",
        "--workers",
        "2",
    ]);
    assert!(canon.lines().count() < lines.len());
    assert!(!canon.contains("\nb,"));
}

#[test]
fn aba_check_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lose.csv");
    let json = dir.path().join("period.json");
    let (code, out, _) = exec(&[
        "aba",
        "-j",
        "2",
        "--max-i",
        "5",
        "--check-paper",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, ExitCode::Ok, "{out}");
    assert!(out.starts_with("Lose(2) = [2,1,0,4,3,6]"));
    assert!(out.contains("period:    2"));
    assert!(out.contains("matches published L(2)"));
    assert!(fs::read_to_string(csv).unwrap().starts_with("i,lose\n0,2\n1,1\n"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["period"], 2);
    assert_eq!(exec(&["aba", "-j", "7", "--check-paper"]).0, ExitCode::Usage);
    assert_eq!(exec(&["aba", "-j", "0"]).0, ExitCode::Usage);
}

#[test]
fn verify_single_suite_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let (code, out, _) = exec(&[
        "verify",
        "alternating",
        "--max-len",
        "6",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, ExitCode::Ok);
    assert!(out.starts_with("alternating"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.txt");
    let c = cache.to_str().unwrap();
    assert_eq!(exec(&["--cache", c, "grundy", "abcab"]).0, ExitCode::Ok);
    let first = fs::read_to_string(&cache).unwrap();
    assert!(first.starts_with("STRNIMCACHE 1\n"));
    assert_eq!(exec(&["--cache", c, "grundy", "abcab"]).0, ExitCode::Ok);
    assert_eq!(fs::read_to_string(&cache).unwrap(), first);

    fs::write(&cache, "STRNIMCACHE 2\n").unwrap();
    let (code, _, err) = exec(&["--cache", c, "grundy", "ab"]);
    assert_eq!(code, ExitCode::Usage);
    assert!(err.contains("version"), "{err}");
}

#[test]
fn play_session_writes_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.json");
    let (code, out, _) = exec_with_input(&["play", "ba", "--transcript", path.to_str().unwrap()], "1 1\n");
    assert_eq!(code, ExitCode::Ok);
    assert!(out.contains("engine plays (1,1) -> ε"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["winner"], "engine");
    assert_eq!(v["turns"].as_array().unwrap().len(), 2);
}
