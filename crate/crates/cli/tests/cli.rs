use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EUCLID: &str = "while x >= 1 do if x >= y then x := x - y; break else y := y - x; continue fi od";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spl-pcsp")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, content).unwrap();
    path
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn cfg_summary_for_euclid() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "euclid.prog", EUCLID);
    let out = run(&["cfg", arg(&prog)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("decomposition: ⊛(∥(⊳(A_ε,A_break),⊳(A_ε,A_continue)))"), "{text}");
    assert!(text.contains("vertices: 10\nedges: 9\n"), "{text}");

    let out = run(&["cfg", arg(&prog), "--json"]);
    let cfg = stdout_json(&out);
    assert_eq!(cfg["edges"].as_array().unwrap().len(), 9);
}

#[test]
fn parse_round_trips_through_canonical_text() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "euclid.prog", EUCLID);
    let first = run(&["parse", arg(&prog)]);
    assert_eq!(first.status.code(), Some(0));
    let again = write(&dir, "again.prog", std::str::from_utf8(&first.stdout).unwrap());
    assert_eq!(run(&["parse", arg(&again)]).stdout, first.stdout);
}

#[test]
fn solve_with_oracle_check() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "euclid.prog", EUCLID);
    let uniform = write(&dir, "uniform.json", r#"{"domain": 3, "edge_costs": {"model": "mismatch"}}"#);
    let out = run(&["solve", arg(&prog), "--instance", arg(&uniform), "--oracle-check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["min_cost"], 0);

    let pinned = write(
        &dir,
        "pinned.json",
        r#"{"domain": 2, "edge_costs": {"model": "mismatch"}, "allowed": {"entry": [0], "exit": [1]}}"#,
    );
    let result = dir.path().join("result.json");
    let out = run(&["solve", arg(&prog), "--instance", arg(&pinned), "--oracle-check", "--out", arg(&result)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let sol: Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(sol["min_cost"], 2);
    assert_eq!(sol["assignment"]["6"], 0);
    assert_eq!(sol["assignment"]["7"], 1);
}

#[test]
fn infeasible_instance_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "euclid.prog", EUCLID);
    let inst = write(
        &dir,
        "hard.json",
        r#"{"domain": 2, "edge_costs": {"model": "mismatch", "weight": "inf"}, "allowed": {"entry": [0], "exit": [1]}}"#,
    );
    let out = run(&["solve", arg(&prog), "--instance", arg(&inst)]);
    assert_eq!(out.status.code(), Some(2));
    let sol = stdout_json(&out);
    assert_eq!(sol["min_cost"], "inf");
    assert!(sol["assignment"].is_null());
}

#[test]
fn input_errors_exit_with_one_and_open_programs_are_reported() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.prog", "while x do skip");
    let out = run(&["parse", arg(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let open = write(&dir, "open.prog", "break");
    let out = run(&["cfg", arg(&open)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("closed: false"));
    assert_eq!(run(&["parse", "/nonexistent/file.prog"]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let prog = write(&dir, "euclid.prog", EUCLID);
    let inst = write(&dir, "bad.json", r#"{"domain": 2, "edge_costs": {"model": "mismatch"}, "allowed": {"99": [0]}}"#);
    assert_eq!(run(&["solve", arg(&prog), "--instance", arg(&inst)]).status.code(), Some(1));
}

#[test]
fn bank_selection_beats_ad_hoc_placement() {
    let dir = TempDir::new().unwrap();
    let prog = write(&dir, "bank.prog", "skip; a := x0; if p then skip; b := x1 else skip; c := x1 fi");
    let out = run(&["bank", arg(&prog), "--banks", "2", "--preassign", "1=0", "--preassign", "5=1", "--preassign", "7=1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let sol = stdout_json(&out);
    assert_eq!(sol["min_cost"], 2);
    assert_eq!(sol["ad_hoc_cost"], 3);
    assert_eq!(sol["unknown"], 2);
}

#[test]
fn coloring_of_the_small_example() {
    let dir = TempDir::new().unwrap();
    let graph = write(
        &dir,
        "graph.json",
        r#"{"vertices": ["a", "b", "c", "d"], "edges": [["a", "b"], ["a", "c"], ["b", "d"], ["c", "b"]]}"#,
    );
    let two = stdout_json(&run(&["coloring", arg(&graph), "--colors", "2"]));
    assert_eq!(two["min_cost"], 1);
    assert_eq!(two["coloring"].as_object().unwrap().len(), 4);
    let three = stdout_json(&run(&["coloring", arg(&graph), "--colors", "3"]));
    assert_eq!(three["min_cost"], 0);
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--seed", "42", "--size", "30"]);
    let b = run(&["gen", "--seed", "42", "--size", "30"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["gen", "--seed", "43", "--size", "30"]).stdout);
}

#[test]
fn bench_writes_one_row_per_trial() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = run(&["bench", "--sizes", "100,200", "--domain", "2", "--trials", "20", "--csv", arg(&csv), "--with-oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    const HEADER: [&str; 8] = spl_pcsp::bench::CSV_HEADER;
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER.join(",").as_str()));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.split(',').count() == HEADER.len()));
}
