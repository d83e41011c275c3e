//! End-to-end runs of the `plsforge` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use plsforge::games_core::{is_local_optimum, EdgeWeightedGraph};
use plsforge::io::{self, GraphFile};
use plsforge::weight::int;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plsforge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TRIANGLE: &str = "%plsforge v1 graph sha256:-\nnmc 3 3\nv 0 1\nv 1 2\nv 2 3\ne 0 1\ne 1 2\ne 0 2\n";
const K3_MC: &str = "%plsforge v1 graph sha256:-\nmc 3 2\nv 0\nv 1\nv 2\ne 0 1 2\ne 1 2 3\n";

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_nmc_reaches_local_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "t.graph", TRIANGLE);
    let out = dir.path().join("t.cut");
    let o = run(&["solve-nmc", s(&g), "--seed", "4", "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("local_optimum: true"));
    let cut = io::parse_cut(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cut.len(), 3);
}

#[test]
fn tsv_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "t.graph", TRIANGLE);
    let o = run(&["--format", "tsv", "solve-nmc", s(&g)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.split('\t').count() == 2), "{text}");
    assert!(text.contains("converged\ttrue"));
}

#[test]
fn bridgegaps_verifies_and_rejects_bad_eps() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "t.graph", TRIANGLE);
    let o = run(&["bridgegaps", s(&g), "--eps", "1/2", "--schedule", "max-gain"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verified: true"));
    assert!(stdout(&o).contains("within_bound: true"));
    let o = run(&["bridgegaps", s(&g), "--eps", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn mc2sp_reduce_dynamics_mapback() {
    let dir = tempfile::tempdir().unwrap();
    let src = put(dir.path(), "k3.graph", K3_MC);
    let game = dir.path().join("k3.game");
    let roles = dir.path().join("k3.roles");
    let o = run(&["reduce", "mc2sp", s(&src), "-o", s(&game), "--roles", s(&roles)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("players: 9"));

    let prof = dir.path().join("end.profile");
    let o = run(&["dynamics", s(&game), "--seed", "3", "-o", s(&prof)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("converged: true"));

    let cut_path = dir.path().join("back.cut");
    let o = run(&["mapback", "mc2sp", s(&roles), s(&prof), "-o", s(&cut_path)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cut = io::parse_cut(&std::fs::read_to_string(&cut_path).unwrap()).unwrap();
    let h = EdgeWeightedGraph::new(3, vec![(0, 1, int(2)), (1, 2, int(3))]).unwrap();
    assert!(is_local_optimum(&h, &cut).unwrap());

    // the wrong reduction kind for a roles file is an error
    let o = run(&["mapback", "nmc2multi", s(&roles), s(&prof)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_modes() {
    let dir = tempfile::tempdir().unwrap();
    let src = put(dir.path(), "k2.graph", "%plsforge v1 graph sha256:-\nmc 2 1\nv 0\nv 1\ne 0 1 3\n");
    let rep = dir.path().join("r.report");
    let o = run(&["verify", "mc2sp", s(&src), "--mode", "exhaustive", "--report", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("success: true"));
    let r = io::parse_report(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(r.checked > 0 && r.counterexamples.is_empty());

    let tri = put(dir.path(), "t.graph", TRIANGLE);
    let o = run(&["verify", "nmc2multi", s(&tri), "--mode", "dynamics", "--runs", "3", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn reduce_nmc2multi_writes_a_game() {
    let dir = tempfile::tempdir().unwrap();
    let src = put(dir.path(), "t.graph", TRIANGLE);
    let game = dir.path().join("t.game");
    let o = run(&["reduce", "nmc2multi", s(&src), "-o", s(&game)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let g = io::parse_game(&std::fs::read_to_string(&game).unwrap()).unwrap();
    assert!(g.num_players() > 3);
}

#[test]
fn oracle_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "t.graph", TRIANGLE);
    let o = run(&["oracle", "local-optima", s(&g)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("count: "));
    let GraphFile::Nmc(h) = io::parse_graph(TRIANGLE).unwrap() else { panic!() };
    let want = plsforge::oracle::brute_local_optima(&h).unwrap().len();
    assert!(stdout(&o).contains(&format!("count: {want}")));
}

#[test]
fn gadget_check_exit_codes() {
    let o = run(&["gadget-check", "super_comparison", "--scale", "6"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    // the leverage lemma does not hold for the chain weights, reported as a failed check
    let o = run(&["gadget-check", "leverage", "--scale", "6"]);
    assert_eq!(code(&o), 1);
    let o = run(&["gadget-check", "no_such_lemma", "--scale", "6"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_input_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = put(dir.path(), "bad.graph", "%plsforge v1 graph sha256:-\nnmc 2 1\nv 0 1\nv 1 1\ne 0 x\n");
    let o = run(&["solve-nmc", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
    let wrong_kind = put(dir.path(), "c.graph", "%plsforge v1 cut sha256:-\n01\n");
    assert_eq!(code(&run(&["solve-nmc", s(&wrong_kind)])), 2);
    let tampered = io::wrap(io::Kind::Graph, "", "nmc 1 0\nv 0 1\n").replace("v 0 1", "v 0 2");
    let t = put(dir.path(), "x.graph", &tampered);
    assert_eq!(code(&run(&["solve-nmc", s(&t)])), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["solve-nmc"])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&["solve-nmc", "x", "--no-such-flag"])), 2);
    assert_eq!(code(&run(&["solve-nmc", "/nonexistent/file"])), 2);
}

#[test]
fn reduce_cf2nmc_reports_size() {
    let dir = tempfile::tempdir().unwrap();
    let net = put(dir.path(), "not.net", "%plsforge v1 netlist sha256:-\ncircuit 1 1\ng 1 NOR x1 x1\noutputs g1\n");
    let out = dir.path().join("not.graph");
    let roles = dir.path().join("not.roles");
    let o = run(&["reduce", "cf2nmc", s(&net), "-o", s(&out), "--roles", s(&roles)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("vertices: 305921"), "{}", stdout(&o));
    let o = run(&["reduce", "cf2nmc", s(&net), "-o", s(&out), "--scale", "2"]);
    assert_eq!(code(&o), 2);
}
