use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tomo_core::format::{from_json, parse_ascii, TilingFile};
use tomo_core::{BarSpec, Shape};

const T15X10: &str = r#"{"shape":"torus","a":15,"b":10,"h":2,"v":3,
  "m":[2,2,2,2,2,2,2,2,2,2,2,2,2,2,2],"n":[3,3,3,3,3,3,3,3,3,3]}"#;
const COUNTEREXAMPLE: &str =
    r#"{"shape":"rectangle","a":7,"b":8,"h":2,"v":2,"m":[2,1,2,2,1,2,4],"n":[3,3,1,0,2,2,1,2]}"#;
const SQUARE: &str = r#"{"shape":"rectangle","a":4,"b":4,"h":2,"v":2,"m":[1,1,1,1],"n":[1,1,1,1]}"#;
const HISTOGRAM: &str = r#"{"shape":"rectangle","a":3,"b":3,"h":1,"v":2,"m":[1,0,0],"n":[1,1,2],
  "cells":[[0,0],[0,1],[1,1],[0,2],[1,2],[2,2]],"class":"histogram"}"#;

fn tomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomo")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn solve_then_check(instance: &str) {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "instance.json", instance);
    let out = tomo(&["solve", arg(&inst)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let tiling = write(&dir, "tiling.json", &stdout(&out));
    let checked = tomo(&["check", arg(&inst), arg(&tiling)]);
    assert_eq!(checked.status.code(), Some(0));
    assert!(stdout(&checked).ends_with("VALID\n"));
}

#[test]
fn torus_15x10_is_solved_and_checked() {
    solve_then_check(T15X10);
}

#[test]
fn histogram_and_block_uniform_are_solved_and_checked() {
    solve_then_check(HISTOGRAM);
    solve_then_check(SQUARE);
}

#[test]
fn counterexample_passes_both_conditions_but_is_unsolvable() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "right.json", COUNTEREXAMPLE);
    let out = tomo(&["separate", arg(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("condition1: PASS, condition2: PASS"));
    let out = tomo(&["solve", arg(&inst)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "UNSOLVABLE\n");
}

#[test]
fn dimension_mismatch_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "bad.json",
        r#"{"shape":"rectangle","a":3,"b":2,"h":1,"v":1,"m":[1,1],"n":[1,1]}"#,
    );
    let out = tomo(&["solve", arg(&inst)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`m`"));

    let garbled = write(&dir, "garbled.json", "{\"shape\":");
    assert_eq!(tomo(&["solve", arg(&garbled)]).status.code(), Some(2));
    assert_eq!(tomo(&["solve", "/nonexistent/instance.json"]).status.code(), Some(2));
}

#[test]
fn exhausted_budget_reports_unknown() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "right.json", COUNTEREXAMPLE);
    let out = tomo(&["solve", arg(&inst), "--cell-budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out), "UNKNOWN (budget)\n");
}

#[test]
fn ascii_render_reparses_to_the_same_bars() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "instance.json", T15X10);
    let tiling_text = stdout(&tomo(&["solve", arg(&inst)]));
    let tiling = from_json::<TilingFile>(&tiling_text).unwrap().to_tiling().unwrap();
    let path = write(&dir, "tiling.json", &tiling_text);
    let out = tomo(&["render", arg(&path), "--format", "ascii"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed = parse_ascii(&stdout(&out), Shape::Torus, BarSpec::new(2, 3).unwrap()).unwrap();
    assert_eq!(parsed.canonical_bars(), tiling.canonical_bars());

    let svg = stdout(&tomo(&["render", arg(&path), "--format", "svg"]));
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn every_enumerated_tiling_is_accepted_by_check() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [("square.json", SQUARE), ("histogram.json", HISTOGRAM)] {
        let inst = write(&dir, name, text);
        let out = tomo(&["enumerate", arg(&inst), "--limit", "50"]);
        assert_eq!(out.status.code(), Some(0));
        let all: Vec<TilingFile> = from_json(&stdout(&out)).unwrap();
        assert!(!all.is_empty());
        for (k, t) in all.iter().enumerate() {
            let path = write(&dir, &format!("t{k}.json"), &tomo_core::format::to_json(t));
            assert_eq!(tomo(&["check", arg(&inst), arg(&path)]).status.code(), Some(0));
        }
    }
}

#[test]
fn check_rejects_a_tiling_for_another_instance() {
    let dir = TempDir::new().unwrap();
    let square = write(&dir, "square.json", SQUARE);
    let tiling = write(&dir, "tiling.json", &stdout(&tomo(&["solve", arg(&square)])));
    let other = write(
        &dir,
        "other.json",
        r#"{"shape":"rectangle","a":4,"b":4,"h":2,"v":2,"m":[2,2,0,0],"n":[0,0,2,2]}"#,
    );
    let out = tomo(&["check", arg(&other), arg(&tiling)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).ends_with("INVALID\n"));
}

#[test]
fn uniform_subcommand_matches_the_characterization() {
    assert_eq!(tomo(&["uniform", "15", "10", "2", "3", "2", "3"]).status.code(), Some(0));
    let out = tomo(&["uniform", "--shape", "rectangle", "15", "10", "2", "3", "2", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "UNSOLVABLE\n");
    assert_eq!(tomo(&["uniform", "0", "10", "2", "3", "2", "3"]).status.code(), Some(2));
}

#[test]
fn bundled_gadget_verifies_and_reduction_round_trips_through_solve() {
    let out = tomo(&["gadget", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("status: ok"));

    let dir = TempDir::new().unwrap();
    let gadget = write(&dir, "gadget.json", &stdout(&tomo(&["gadget"])));
    assert_eq!(tomo(&["gadget", "--verify", arg(&gadget)]).status.code(), Some(0));
    let tampered = fs::read_to_string(&gadget).unwrap().replacen("\"block_w\": 7", "\"block_w\": 8", 1);
    let tampered = write(&dir, "tampered.json", &tampered);
    assert_eq!(tomo(&["gadget", "--verify", arg(&tampered)]).status.code(), Some(2));

    // A single red cell.
    let three = write(
        &dir,
        "three.json",
        r#"{"a":1,"b":1,"m":{"colorless":[0],"red":[1],"blue":[0],"green":[0]},
            "n":{"colorless":[0],"red":[1],"blue":[0],"green":[0]}}"#,
    );
    let out = tomo(&["reduce", arg(&three)]);
    assert_eq!(out.status.code(), Some(0));
    let reduced = write(&dir, "reduced.json", &stdout(&out));
    let solved = tomo(&["solve", arg(&reduced)]);
    assert_eq!(solved.status.code(), Some(0));
    let tiling = write(&dir, "tiling.json", &stdout(&solved));
    assert_eq!(tomo(&["check", arg(&reduced), arg(&tiling)]).status.code(), Some(0));

    let bad = write(&dir, "bad3.json", r#"{"a":1,"b":1,"m":{"colorless":[0,0],"red":[1],"blue":[0],"green":[0]},
            "n":{"colorless":[0],"red":[1],"blue":[0],"green":[0]}}"#);
    let out = tomo(&["reduce", arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m.colorless"));
}

#[test]
fn bench_prints_a_table() {
    let out = tomo(&["bench", "--max-a", "250", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().contains("ns/cell"));
    assert!(text.lines().nth(1).unwrap().trim_start().starts_with("250"));
}
