//! End-to-end runs of the `kavy` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kavy::certify::check_invariant;
use kavy::family::{gen_counter, gen_counter_hitting};
use kavy::state::{Clause, LatchLit};

fn kavy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kavy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_counter(dir: &Path) -> String {
    let path = dir.join("counter.aag");
    fs::write(&path, gen_counter(8, 64, 66).unwrap().to_aag()).unwrap();
    path.to_str().unwrap().to_string()
}

/// Reads back an invariant file: one clause per line like `(!l0 | l3)`.
fn parse_invariant(text: &str) -> Vec<Clause> {
    text.lines()
        .filter(|l| !l.starts_with('c'))
        .map(|l| {
            let lits = l
                .trim_matches(|c| c == '(' || c == ')')
                .split(" | ")
                .map(|t| {
                    let (pos, name) = match t.strip_prefix('!') {
                        Some(rest) => (false, rest),
                        None => (true, t),
                    };
                    LatchLit::new(name[1..].parse().unwrap(), pos)
                })
                .collect();
            Clause::new(lits).unwrap()
        })
        .collect()
}

#[test]
fn counter_is_safe_with_certified_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_counter(dir.path());
    let o = kavy(&["check", &path, "--engine", "kavy", "--certify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("0"));
    assert!(out.contains("c certified"));
    let inv = parse_invariant(&fs::read_to_string(dir.path().join("counter.inv")).unwrap());
    assert!(check_invariant(&inv, &gen_counter(8, 64, 66).unwrap()));
}

#[test]
fn bmc_prints_a_four_frame_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad3counter.aag");
    fs::write(&path, gen_counter_hitting(8, 64, 3).unwrap().to_aag()).unwrap();
    let o = kavy(&[
        "check",
        path.to_str().unwrap(),
        "--engine",
        "bmc",
        "--witness",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "1");
    // the circuit has no inputs, so every frame line is empty
    assert_eq!(lines.len(), 1 + 4);
    let w = kavy::check::Witness::from_text(&out).unwrap();
    assert!(kavy::certify::check_witness(&w, &gen_counter_hitting(8, 64, 3).unwrap()).unwrap());
}

#[test]
fn every_engine_answers_on_the_counter() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_counter(dir.path());
    for (engine, code, first) in [
        ("kavy", 0, "0"),
        ("vanilla", 0, "0"),
        ("pdr", 0, "0"),
        ("kind", 0, "0"),
        ("bmc", 2, "2"),
    ] {
        let o = kavy(&[
            "check",
            &path,
            "--engine",
            engine,
            "--max-frames",
            "8",
            "--certify",
        ]);
        assert_eq!(o.status.code(), Some(code), "{engine}");
        assert_eq!(stdout(&o).lines().next(), Some(first), "{engine}");
    }
    let o = kavy(&[
        "check",
        &path,
        "--sel",
        "bottomup",
        "--no-indgen",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn stats_csv_has_a_versioned_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_counter(dir.path());
    let csv = dir.path().join("stats.csv");
    let o = kavy(&["check", &path, "--stats-csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(kavy::experiment::STATS_SCHEMA));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("iteration,frames,sel_i,sel_k"));
    assert!(lines.count() >= 1);
}

#[test]
fn usage_and_input_errors_exit_one() {
    let o = kavy(&["check", "/nonexistent/file.aag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.aag");
    fs::write(&bad, "aag 1 0 1 0\n").unwrap();
    let o = kavy(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));

    let o = kavy(&[
        "experiment",
        "--family",
        "shift",
        "--range",
        "1..2",
        "--engines",
        "",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn multi_property_files_need_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.aag");
    // latch stuck at 0; bad 0: the latch, bad 1: its negation
    fs::write(&path, "aag 1 0 1 0 0 2\n2 2\n2\n3\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(kavy(&["check", p]).status.code(), Some(1));
    assert_eq!(
        stdout(&kavy(&["check", p, "--property", "0"]))
            .lines()
            .next(),
        Some("0")
    );
    assert_eq!(
        stdout(&kavy(&["check", p, "--property", "1"]))
            .lines()
            .next(),
        Some("1")
    );
}

#[test]
fn bench_then_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shift");
    let o = kavy(&[
        "bench",
        "--family",
        "shift",
        "--range",
        "1..4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let manifest = fs::read_to_string(out.join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 2 + 4);
    let o = kavy(&[
        "check",
        out.join("shift_4.aag").to_str().unwrap(),
        "--engine",
        "kind",
    ]);
    assert_eq!(stdout(&o).lines().next(), Some("0"));

    let csv = dir.path().join("rows.csv");
    let o = kavy(&[
        "experiment",
        "--family",
        "random:4:12",
        "--range",
        "0..9",
        "--engines",
        "kavy,pdr,kind",
        "--max-frames",
        "20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        o.stderr.is_empty(),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 2 + 30);
}
