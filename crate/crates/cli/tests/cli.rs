use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regfn::compo::random::{identity_relation, input_letters};
use regfn::compo::{serialize, Term};
use regfn::machines::{fixtures, graph_automaton, MachineFile, Mode, MooreMachine};
use serde_json::Value;
use tempfile::TempDir;

fn regfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regfn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_machine(p: &Path, m: &MachineFile) {
    std::fs::write(p, m.to_json().to_string()).unwrap();
}

#[test]
fn cascade_then_verify() {
    let dir = TempDir::new().unwrap();
    let (m, t) = (path(&dir, "parity.json"), path(&dir, "term.json"));
    assert!(regfn(&["fixtures", "--name", "parity", "-o", s(&m)]).status.success());
    let out = regfn(&["decompose", s(&m), "-o", s(&t), "--stage", "cascade"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = regfn(&["verify", s(&t), s(&m), "--max-len", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], "equal");
    let out = regfn(&["eval", s(&t), "0,1,1"]);
    assert_eq!(json(&out)["output"], "e,e,o");
}

#[test]
fn generators_verify_with_jobs() {
    let dir = TempDir::new().unwrap();
    let (m, t) = (path(&dir, "last.json"), path(&dir, "term.json"));
    assert!(regfn(&["fixtures", "--name", "last", "-o", s(&m)]).status.success());
    assert!(regfn(&["decompose", s(&m), "-o", s(&t), "--stage", "generators"])
        .status
        .success());
    let one = regfn(&["verify", s(&t), s(&m), "--max-len", "5"]);
    let three = regfn(&["verify", s(&t), s(&m), "--max-len", "5", "--jobs", "3"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn identity_eval() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "id.json");
    std::fs::write(&t, serialize(&Term::identity(input_letters(2)))).unwrap();
    let out = regfn(&["eval", s(&t), "a,b"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["output"], "a,b");
}

#[test]
fn mutated_target_gives_counterexample() {
    let dir = TempDir::new().unwrap();
    let (m, t, bad) = (
        path(&dir, "parity.json"),
        path(&dir, "term.json"),
        path(&dir, "bad.json"),
    );
    assert!(regfn(&["fixtures", "--name", "parity", "-o", s(&m)]).status.success());
    assert!(regfn(&["decompose", s(&m), "-o", s(&t), "--stage", "cascade"])
        .status
        .success());
    let p = fixtures::parity();
    let mut delta = p.delta_table().to_vec();
    delta[1] = delta[0];
    let flipped = MooreMachine::transparent_from_tables(p.input().clone(), p.states().clone(), 0, delta).unwrap();
    write_machine(&bad, &MachineFile::Moore(flipped));
    let out = regfn(&["verify", s(&t), s(&bad), "--max-len", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"], "counterexample");
    assert_ne!(v["term"], v["target"]);
}

#[test]
fn runs_in_each_mode() {
    let dir = TempDir::new().unwrap();
    let m = path(&dir, "parity.json");
    assert!(regfn(&["fixtures", "--name", "parity", "-o", s(&m)]).status.success());
    assert_eq!(json(&regfn(&["run", s(&m), "0,1,1"]))["output"], "e,e,o,e");
    assert_eq!(json(&regfn(&["run", s(&m), "0,1,1", "--trunc"]))["output"], "e,e,o");
    assert_eq!(json(&regfn(&["run", s(&m), "0,1,1", "--rest"]))["output"], "e,o,e");
    assert_eq!(json(&regfn(&["run", s(&m), ""]))["output"], "e");
    let r = path(&dir, "rbit.json");
    assert!(regfn(&["fixtures", "--name", "rbit", "-o", s(&r)]).status.success());
    assert!(regfn(&["run", s(&r), "-,1,0"]).status.success());
}

#[test]
fn full_pipeline_and_functionality() {
    let dir = TempDir::new().unwrap();
    let (rel, t) = (path(&dir, "id.json"), path(&dir, "term.json"));
    write_machine(
        &rel,
        &MachineFile::Relation(identity_relation(&input_letters(2)).unwrap()),
    );
    let out = regfn(&["check-functional", s(&rel), "--max-len", "4"]);
    assert_eq!(json(&out)["functional"], true);
    let out = regfn(&["decompose", s(&rel), "-o", s(&t), "--stage", "full"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let leaves = json(&out)["leaves"].as_object().unwrap().clone();
    assert!(!leaves.contains_key("moore_trunc") && !leaves.contains_key("rasn_trunc"));
    assert_eq!(
        regfn(&["verify", s(&t), s(&rel), "--max-len", "4"]).status.code(),
        Some(0)
    );
    let g = path(&dir, "graph.json");
    write_machine(
        &g,
        &MachineFile::Relation(graph_automaton(&fixtures::last(), Mode::Trunc).unwrap()),
    );
    assert_eq!(
        json(&regfn(&["check-functional", s(&g), "--max-len", "4"]))["functional"],
        true
    );
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let junk = path(&dir, "junk.json");
    std::fs::write(&junk, "{\"kind\":").unwrap();
    for args in [
        vec!["run", s(&junk), "a"],
        vec!["eval", "/nonexistent/term.json", "a"],
        vec!["fixtures", "--name", "nosuch"],
        vec!["verify", s(&junk)],
        vec!["decompose", s(&junk), "--stage", "sideways"],
    ] {
        let out = regfn(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let m = path(&dir, "parity.json");
    assert!(regfn(&["fixtures", "--name", "parity", "-o", s(&m)]).status.success());
    assert_eq!(regfn(&["decompose", s(&m), "--stage", "full"]).status.code(), Some(2));
}

#[test]
fn factorial_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_regfn"))
        .args(["fixtures", "--name", "asn:3"])
        .env("REGFN_CAP_FACTORIAL", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(regfn(&["fixtures", "--name", "asn:3"]).status.success());
}

#[test]
fn output_is_deterministic() {
    let a = regfn(&["random", "--states", "3", "--alphabet", "2", "--seed", "9"]);
    let b = regfn(&["random", "--states", "3", "--alphabet", "2", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let m = MachineFile::parse(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!(m.kind(), "moore");
    let pretty = regfn(&["random", "--states", "3", "--alphabet", "2", "--seed", "9", "--pretty"]);
    assert_eq!(json(&pretty), json(&a));
}
