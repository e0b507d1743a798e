use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use posg_core::fixtures::{G1, G2, G3};

fn posg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posg")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_a_verifiable_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = file(dir.path(), "g1.posg", G1);
    let strat = dir.path().join("g1.strategy");
    let o = posg(&["solve", "--input", s(&g1), "--mode", "almost-sure", "--emit-strategy", s(&strat), "--stats"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("WINNING\n"));
    assert!(out.lines().skip(1).all(|l| l.split_once('=').is_some()));
    let v = posg(&["verify", "--input", s(&g1), "--strategy", s(&strat)]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains("mecs=1\nodd_ec_reachable=false\n"));
}

#[test]
fn losing_game_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = file(dir.path(), "g2.posg", G2);
    let o = posg(&["solve", "--input", s(&g2), "--mode", "positive"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "NOT-WINNING\n");
}

#[test]
fn errors_and_capacity_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = file(dir.path(), "bad.posg", "posg\naction a\nstate u kind=p9 obs=o prio=0\n");
    let o = posg(&["solve", "--input", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let g1 = file(dir.path(), "g1.posg", G1);
    assert_eq!(code(&posg(&["solve", "--input", s(&g1), "--det-cap", "1"])), 3);
    assert_eq!(code(&posg(&["solve", "--input", "/nonexistent.posg"])), 2);
}

#[test]
fn verify_refutes_the_wrong_action() {
    let dir = tempfile::tempdir().unwrap();
    let g3 = file(dir.path(), "g3.posg", G3);
    let b = file(dir.path(), "b.strategy", "strategy\nmemory m\ninit m\nnext m b\nupd m oU m\nupd m oV m\nupd m oW m\n");
    let o = posg(&["verify", "--input", s(&g3), "--strategy", s(&b)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).ends_with("REFUTED\n"));
}

#[test]
fn reduce_reports_gadget_counts() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = file(dir.path(), "g1.posg", G1);
    let out = dir.path().join("g1.tpg");
    let o = posg(&["reduce", "--input", s(&g1), "--output", s(&out)]);
    assert_eq!(code(&o), 0);
    // u and v are copied; w (priority 1) becomes a five-state gadget.
    assert!(stdout(&o).contains("states=7\n"));
    assert!(stdout(&o).contains("gadget_states=5\n"));
    let tpg = std::fs::read_to_string(&out).unwrap();
    assert!(tpg.starts_with("tpg\nperiod 4\n"));
    let dot = posg(&["export-dot", "--input", s(&out)]);
    assert_eq!(code(&dot), 0);
    assert!(stdout(&dot).contains("\"w@h1\" [label=\"w@h1:1\", shape=ellipse];"));
}

#[test]
fn generation_is_seeded() {
    let a = posg(&["gen", "--states", "12", "--obs", "4", "--seed", "9"]);
    let b = posg(&["gen", "--states", "12", "--obs", "4", "--seed", "9"]);
    let c = posg(&["gen", "--states", "12", "--obs", "4", "--seed", "10"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(code(&posg(&["gen", "--states", "2"])), 2);
}

#[test]
fn batch_lists_every_file_in_order() {
    let dir = tempfile::tempdir().unwrap();
    file(dir.path(), "a.posg", G1);
    file(dir.path(), "b.posg", G2);
    file(dir.path(), "c.posg", G3);
    file(dir.path(), "notes.txt", "ignored");
    let o = posg(&["solve", "--batch", s(dir.path())]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "a.posg WINNING\nb.posg NOT-WINNING\nc.posg WINNING\n");
}

#[test]
fn parity_and_automaton_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let pg = file(dir.path(), "g.pg", "pg\nnode x owner=even prio=0\nnode y owner=odd prio=1\nstart x\nsucc x y\nsucc y x\nsucc y y\n");
    let o = posg(&["pg", "solve", "--input", s(&pg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "even: \nodd: x y\nstrategy y y\n");

    let npw = file(
        dir.path(),
        "inf_b.npw",
        "npw\nletter a\nletter b\nstate qa prio=1\nstate qb prio=0\ninit qa\ntrans qa a qa\ntrans qa b qb\ntrans qb a qa\ntrans qb b qb\n",
    );
    assert_eq!(code(&posg(&["omega", "check", "--input", s(&npw), "--stem", "a", "--cycle", "a,b"])), 0);
    let o = posg(&["omega", "check", "--input", s(&npw), "--stem", "b b", "--cycle", "a"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "REJECT\n");
    let d = posg(&["omega", "determinize", "--input", s(&npw)]);
    assert_eq!(code(&d), 0);
    assert!(stdout(&d).starts_with("dpw\n"));
}
