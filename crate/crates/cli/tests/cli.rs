use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdm")).args(args).output().expect("run qdm")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let p = path(dir, name);
    let mut args = vec!["gen", "-o", s(&p)];
    args.extend_from_slice(extra);
    let out = qdm(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn gen_counts_and_determinism() {
    let dir = TempDir::new().unwrap();
    let args = ["--dim", "2", "--states", "4", "--maps", "2", "--effects", "4", "--seed", "7"];
    let a = gen(&dir, "a.json", &args);
    let b = gen(&dir, "b.json", &args);
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&text).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    assert_eq!(v["maps"].as_array().unwrap().len(), 2);
    assert_eq!(v["effects"].as_array().unwrap().len(), 4);
}

#[test]
fn gen_pi_qpt_matches_pi_set() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "p.json", &["--pi-qpt", "--dim", "3"]);
    let model: Value = serde_json::from_str(&std::fs::read_to_string(m).unwrap()).unwrap();
    let set = json(&qdm(&["pi-set", "--dim", "3", "--qpt"]));
    let states = model["states"].as_array().unwrap();
    let projs = set["projections"].as_array().unwrap();
    assert_eq!(states.len(), 9);
    assert_eq!(projs.len(), 9);
    for (st, p) in states.iter().zip(projs) {
        assert_eq!(st["label"], p["label"]);
        assert_eq!(st["re"], p["re"]);
    }
}

#[test]
fn gen_rejects_bad_args() {
    assert_eq!(code(&qdm(&["gen", "--dim", "0"])), 2);
    assert_eq!(code(&qdm(&["gen"])), 2);
    assert_eq!(code(&qdm(&["frobnicate"])), 2);
}

#[test]
fn check_full_rank_is_not_unique() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "1"]);
    let out = qdm(&["check", s(&m)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["physical"], true);
    assert_eq!(v["uniqueness"]["status"], "not_unique");
    assert!(v["uniqueness"]["counterexample"].is_object());
}

#[test]
fn check_projection_model_is_unique() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "p.json", &["--dim", "2", "--pi"]);
    let v = json(&qdm(&["check", s(&m)]));
    assert_eq!(v["uniqueness"]["status"], "unique_by_projections");
}

#[test]
fn check_nonphysical_exits_one() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "1"]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    v["states"][0]["re"][0][0] = Value::from(2.0);
    std::fs::write(&m, v.to_string()).unwrap();
    let out = qdm(&["check", s(&m)]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["physical"], false);
}

#[test]
fn check_rejects_unknown_fields() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "1"]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    v["colour"] = Value::from("blue");
    std::fs::write(&m, v.to_string()).unwrap();
    assert_eq!(code(&qdm(&["check", s(&m)])), 2);
}

#[test]
fn prob_csv_and_cap() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--states", "3", "--effects", "3", "--seed", "2"]);
    let out = qdm(&["prob", s(&m), "-n", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,seq,k,p");
    // 3 states x (1 + 2) sequences x 3 effects
    assert_eq!(lines.len(), 1 + 27);
    assert_eq!(text, String::from_utf8(qdm(&["prob", s(&m), "-n", "1"]).stdout).unwrap());

    let sampled = String::from_utf8(qdm(&["prob", s(&m), "-n", "0", "--shots", "50", "--seed", "4"]).stdout).unwrap();
    assert_eq!(sampled.lines().next().unwrap(), "i,seq,k,p,shots");

    assert_eq!(code(&qdm(&["prob", s(&m), "-n", "3", "--cap", "10"])), 2);
}

#[test]
fn prob_json() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "2"]);
    let out = qdm(&["prob", s(&m), "-n", "0", "--json"]);
    assert_eq!(code(&out), 0);
    json(&out);
}

#[test]
fn equiv_counterexample_unitary_and_unrelated() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["--dim", "2", "--seed", "1"]);
    let ce = path(&dir, "ce.json");
    assert_eq!(code(&qdm(&["counterexample", s(&a), "-o", s(&ce)])), 0);
    let out = qdm(&["equiv", s(&a), s(&ce)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["gauge_class"], "other");

    let rot = path(&dir, "rot.json");
    assert_eq!(code(&qdm(&["gauge", s(&a), "--unitary-seed", "5", "-o", s(&rot)])), 0);
    let v = json(&qdm(&["equiv", s(&a), s(&rot)]));
    assert_eq!(v["gauge_class"], "unitary");

    let tr = path(&dir, "tr.json");
    assert_eq!(code(&qdm(&["gauge", s(&a), "--antiunitary-seed", "5", "-o", s(&tr)])), 0);
    let v = json(&qdm(&["equiv", s(&a), s(&tr)]));
    assert_eq!(v["gauge_class"], "antiunitary");

    let b = gen(&dir, "b.json", &["--dim", "2", "--seed", "9"]);
    let out = qdm(&["equiv", s(&a), s(&b)]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["equal"], false);
}

#[test]
fn counterexample_outside_window_is_invalid() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["--dim", "2", "--seed", "1", "--pure-first-state"]);
    assert_eq!(code(&qdm(&["counterexample", s(&a), "--f", "1.01"])), 2);
}

#[test]
fn gauge_describe() {
    let v = json(&qdm(&["gauge", "--dim", "2", "--depolarizing", "1.2"]));
    assert_eq!(v["class"], "other");
    assert_eq!(v["hptp"]["pass"], true);
    let v = json(&qdm(&["gauge", "--dim", "3", "--transpose"]));
    assert_eq!(v["class"], "antiunitary");
    assert_eq!(code(&qdm(&["gauge", "--dim", "2", "--depolarizing", "0"])), 2);
}

#[test]
fn gst_exact_round_trip_and_prior() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "3"]);
    let out = qdm(&["gst", "--model", s(&m), "--prior", s(&m)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let fixed = path(&dir, "fixed.json");
    std::fs::write(&fixed, serde_json::to_string(&v["model"]).unwrap()).unwrap();
    let eq = json(&qdm(&["equiv", s(&m), s(&fixed)]));
    assert_eq!(eq["equal"], true);
    assert_eq!(eq["gauge_class"], "unitary");
    assert!(v["gauge"].is_object());
}

#[test]
fn gst_from_sampled_dataset() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--pi-qpt", "--seed", "3"]);
    let ds = path(&dir, "ds.json");
    assert_eq!(code(&qdm(&["sample", s(&m), "--shots", "2000", "--seed", "1", "-o", s(&ds)])), 0);
    let again = path(&dir, "ds2.json");
    qdm(&["sample", s(&m), "--shots", "2000", "--seed", "1", "-o", s(&again)]);
    assert_eq!(std::fs::read(&ds).unwrap(), std::fs::read(&again).unwrap());
    let out = qdm(&["gst", "--dataset", s(&ds)]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["condition_number"].as_f64().unwrap() < 100.0);
}

#[test]
fn gst_degenerate_fiducials_exit_three() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "3"]);
    let out = qdm(&["gst", "--model", s(&m), "--fid-states", "0,0,1,2", "--fid-effects", "0,1,2,3"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn tolerance_flags_validated() {
    let dir = TempDir::new().unwrap();
    let m = gen(&dir, "m.json", &["--dim", "2", "--seed", "1"]);
    assert_eq!(code(&qdm(&["check", s(&m), "--tol-psd", "-1"])), 2);
    assert_eq!(code(&qdm(&["check", s(&m), "--tol-psd", "1e-6", "--strict"])), 0);
}
