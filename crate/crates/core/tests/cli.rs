use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use vdlab::graph::parse_dimacs;
use vdlab::instances;
use vdlab::Coloring;

fn vdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdlab")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vdlab-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_writes_parseable_dimacs() {
    let out = vdlab(&["gen", "g2:3"]);
    assert!(out.status.success());
    let g = parse_dimacs(&String::from_utf8(out.stdout).unwrap(), true).unwrap();
    assert_eq!(g, instances::forest_g2(3).unwrap());
}

#[test]
fn solve_writes_coloring_and_trajectory() {
    let dir = scratch("solve");
    let graph = dir.join("ring.col");
    assert!(vdlab(&["gen", "ring:11", "-o", graph.to_str().unwrap()]).status.success());
    let col = dir.join("ring.sol");
    let traj = dir.join("ring.csv");
    let out = vdlab(&[
        "solve",
        graph.to_str().unwrap(),
        "-k",
        "3",
        "--seed",
        "4",
        "--coloring",
        col.to_str().unwrap(),
        "--trajectory",
        traj.to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["status"], "feasible");
    assert_eq!(v["best_conflicts"], 0);

    let g = instances::ring(11).unwrap();
    let s = Coloring::parse_lines(&fs::read_to_string(&col).unwrap(), 11, 3).unwrap();
    assert!(g.edges().all(|(u, w)| s.colour(u) != s.colour(w)));

    let text = fs::read_to_string(&traj).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,conflicts,moved_vertex,new_colour,delta"));
    assert_eq!(lines.count() as u64, v["steps_taken"].as_u64().unwrap());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn batch_is_reproducible() {
    let dir = scratch("batch");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let args = |p: &PathBuf| {
        vdlab(&["batch", "rand:60:3:seed2", "-k", "4", "-t", "12", "--seed", "5", "-o", p.to_str().unwrap()])
    };
    let sa = json(&args(&a));
    let sb = json(&args(&b));
    assert_eq!(sa, sb);
    assert_eq!(sa["trials"], 12);
    let strip = |p: &PathBuf| vdlab::experiments::strip_column(&fs::read_to_string(p).unwrap(), "wall_time_ms");
    assert_eq!(strip(&a), strip(&b));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn dsatur_and_exact_on_g1() {
    let dir = scratch("g1");
    let graph = dir.join("g1.col");
    assert!(vdlab(&["gen", "g1", "-o", graph.to_str().unwrap()]).status.success());
    let g = graph.to_str().unwrap();
    assert_eq!(json(&vdlab(&["dsatur", g]))["colours_used"], 4);
    let e = json(&vdlab(&["dsatur", g, "--enumerate"]));
    assert_eq!(e["min_colours"], 4);
    assert_eq!(json(&vdlab(&["exact", g]))["chromatic"], 3);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_input_exits_with_error() {
    let dir = scratch("bad");
    let graph = dir.join("bad.col");
    fs::write(&graph, "p edge 3 1\ne 1 4\n").unwrap();
    let out = vdlab(&["solve", graph.to_str().unwrap(), "-k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(vdlab(&["gen", "ring:2"]).status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}
