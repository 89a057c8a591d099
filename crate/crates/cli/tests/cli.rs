use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn treepack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treepack"))
        .args(args)
        .env_remove("TREEPACK_SEED")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn pack_bypass_on_doubled_c5_succeeds_and_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let g = fixture("doubled_c5.json");
    let out = treepack(&["pack-bypass", p(&g), "--u", "0", "--v", "1", "--a", "2", "--b", "4", "--k", "2", "-o", p(&cert)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["verification"]["ok"], true);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["trees"].as_array().unwrap().len(), 2);
    assert_eq!(c["pair"], serde_json::json!([0, 1]));
    assert_eq!(c["forbidden"], 1);

    let again = treepack(&["verify", p(&g), p(&cert)]);
    assert_eq!(again.status.code(), Some(0));
    // A full run report is accepted as well.
    let rep = dir.path().join("report.json");
    std::fs::write(&rep, &out.stdout).unwrap();
    assert_eq!(treepack(&["verify", p(&g), p(&rep), p(&cert), "--jobs", "2"]).status.code(), Some(0));
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let g = fixture("doubled_c5.json");
    let out = treepack(&["pack", p(&g), "--k", "2", "--without", "0", "-o", p(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let shared = c["trees"][0][0].clone();
    c["trees"][1].as_array_mut().unwrap().push(shared);
    std::fs::write(&cert, serde_json::to_string(&c).unwrap()).unwrap();
    let out = treepack(&["verify", p(&g), p(&cert)]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "verification_failed");
    let msg = r["verification"]["violations"][0].as_str().unwrap();
    assert!(msg.contains("shared"), "{msg}");
}

#[test]
fn malformed_input_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"edges\": [ {\"ends\": [0, 1] ").unwrap();
    assert_eq!(treepack(&["connectivity", p(&bad)]).status.code(), Some(3));
    let looped = dir.path().join("loop.dot");
    std::fs::write(&looped, "graph { a -- b; b -- b }").unwrap();
    let out = treepack(&["connectivity", p(&looped)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["status"], "format_error");
    assert_eq!(treepack(&["connectivity", p(&dir.path().join("missing.json"))]).status.code(), Some(3));
}

#[test]
fn precondition_violations_exit_with_2() {
    let g = fixture("doubled_c5.json");
    // Doubled C5 is 4-edge-connected, three trees need 6.
    let out = treepack(&["pack-bypass", p(&g), "--u", "0", "--v", "1", "--a", "2", "--b", "4", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["status"], "precondition");
    assert_eq!(treepack(&["pack", p(&g), "--k", "2", "--without", "99"]).status.code(), Some(2));
    assert_eq!(treepack(&["pack", p(&g)]).status.code(), Some(2), "missing argument is a usage error");
}

#[test]
fn dot_output_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let json = dir.path().join("g.json");
    assert_eq!(treepack(&["gen", "named", "doubled_C4", "--format", "dot", "-o", p(&dot)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches("0 -- 1").count(), 2);
    let out = treepack(&["connectivity", p(&dot), "-o", p(&json)]);
    assert_eq!(report(&out)["outputs"]["edge_connectivity"], 4);
}

#[test]
fn reports_are_deterministic() {
    let run = || treepack(&["gen", "random", "--n", "12", "--k", "2", "--seed", "5"]).stdout;
    assert_eq!(run(), run());
    let env = Command::new(env!("CARGO_BIN_EXE_treepack"))
        .args(["gen", "random", "--n", "12", "--k", "2"])
        .env("TREEPACK_SEED", "5")
        .output()
        .unwrap();
    let a = report(&env);
    let b: Value = serde_json::from_slice(&run()).unwrap();
    assert_eq!(a["outputs"], b["outputs"]);
}

#[test]
fn hamilton_and_uncross_and_catlin_verify() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("doubled_c5.json");
    let dot = dir.path().join("line.dot");
    let cert = dir.path().join("ham.json");
    let out = treepack(&["hamilton", p(&g), "--emit-dot", p(&dot), "-o", p(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&dot).unwrap().matches("color=red").count(), 10);
    assert_eq!(treepack(&["verify", p(&g), p(&cert)]).status.code(), Some(0));

    let gadget = dir.path().join("gadget.json");
    treepack(&["gen", "named", "crossgadget8", "-o", p(&gadget)]);
    let out = treepack(&["uncross", p(&gadget), "--x", "0", "--targets", "3,5,7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outputs"]["output_compatible"], true);

    let out = treepack(&["catlin", p(&g), "--k", "2", "--remove", "0,5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn layered_run_emits_an_audited_trace() {
    for mode in ["two-tree", "one-tree"] {
        let out = treepack(&["layered", "run", "--m", "4", "--levels", "4", "--mode", mode]);
        assert_eq!(out.status.code(), Some(0));
        let r = report(&out);
        assert_eq!(r["outputs"]["levels"].as_array().unwrap().len(), 4);
        assert_eq!(r["outputs"]["audit"]["violations"], serde_json::json!([]));
    }
    let out = treepack(&["layered", "run", "--family", "grid"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_at_reports_exact_connectivity() {
    let out = treepack(&["gen", "at", "--k", "2", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["outputs"]["edge_connectivity"], 2);
    assert!(!r["outputs"]["structure"]["copies"].as_array().unwrap().is_empty());
}
