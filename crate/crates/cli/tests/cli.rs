use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_hyperdeck")).args(args).output().expect("binary runs");
    let v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (out.status.code().unwrap_or(-1), v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn sum_principal_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.hm", "2 3\n100010001\n");
    let (code, v) = run(&["sum", "--in", &a, "--k", "2", "--mode", "principal"]);
    assert_eq!(code, 0);
    let entries: Vec<&str> = v["result"]["entries"].as_array().unwrap().iter().map(|e| e.as_str().unwrap()).collect();
    assert_eq!(entries, ["3", "0", "0", "3"]);
    let (_, basis) = run(&["sum", "--in", &a, "--k", "2", "--mode", "principal", "--method", "basis"]);
    assert_eq!(basis["result"], v["result"]);
}

#[test]
fn kappa_small_line() {
    let (code, v) = run(&["kappa", "--n", "3", "--d", "1", "--mode", "deck"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["kappa"], 2);
}

#[test]
fn malformed_input_is_an_error_object() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.hm", "2 3\n10x\n");
    let (code, v) = run(&["deck", "--in", &a, "--k", "2"]);
    assert_ne!(code, 0);
    assert_eq!(v["error"]["code"], "PARSE");
    let (code, v) = run(&["collide", "--n", "3", "--d", "1", "--k", "5"]);
    assert_ne!(code, 0);
    assert_eq!(v["error"]["code"], "K_OUT_OF_RANGE");
}

#[test]
fn planar_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let pts: String = (1..=20).flat_map(|x| [(x, (x * 7) % 20 + 1), (x, (x * 3) % 20 + 1)]).map(|(a, b)| format!("{a} {b}\n")).collect();
    let h = write(dir.path(), "h.pts", &pts);
    let out = dir.path().join("p.json").to_string_lossy().into_owned();
    let (code, built) = run(&["construct", "--in", &h, "--n", "20", "--d", "2", "--out", &out]);
    assert_eq!(code, 0);
    assert_eq!(built["result"]["verdict"]["status"], "CERTIFIED");
    for peak in [out.as_str(), &write(dir.path(), "r.json", &built.to_string())] {
        let (code, v) = run(&["verify", "--peak", peak, "--in", &h, "--n", "20"]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["verdict"], built["result"]["verdict"]);
    }
    let (_, again) = run(&["construct", "--in", &h, "--n", "20", "--d", "2"]);
    let (first, second) = (strip_timings(built), strip_timings(again));
    assert_eq!(first["result"], second["result"]);
    assert_eq!(first["outcomes"], second["outcomes"]);
}

#[test]
fn dimension_mismatch_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.pts", "1 2 3\n");
    let (code, v) = run(&["construct", "--in", &h, "--n", "5", "--d", "2"]);
    assert_ne!(code, 0);
    assert_eq!(v["error"]["code"], "INVALID");
}
