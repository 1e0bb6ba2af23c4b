use std::fs;
use std::process::{Command, Output};

fn pst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pst")).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn snapped_gamma_warns_but_succeeds() {
    let out = pst(&["synth", "trex", "--n", "8", "--r", "4", "--gamma", "150"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("snapped"));
}

#[test]
fn parity_mismatch_is_invalid_input() {
    let out = pst(&["synth", "trex", "--n", "8", "--r", "3", "--gamma", "150"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_invalid_input() {
    assert_eq!(pst(&["synth", "krawtchouk", "--bogus"]).status.code(), Some(2));
}

#[test]
fn malformed_chain_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"format_version\": 1,\n  \"n\": oops\n}\n").unwrap();
    let out = pst(&["check", "--chain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"));
}

#[test]
fn spectrum_check_reports_transfer_time() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, r#"{"values":[-307,-205,-103,-1,1,103,205,307]}"#).unwrap();
    let out = pst(&["check", "--spectrum", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["base_gap"], 2.0);
    assert!((v["t0"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn resample_exhaustion_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weak.json");
    let couplings = vec!["1e-6"; 40].join(",");
    let diagonal = vec!["0"; 41].join(",");
    fs::write(
        &path,
        format!(r#"{{"format_version":1,"n":41,"couplings":[{couplings}],"diagonal":[{diagonal}]}}"#),
    )
    .unwrap();
    let out = pst(&[
        "perturb", "--chain", path.to_str().unwrap(), "--deltas", "1", "--samples", "4", "--t0", "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn written_chain_round_trips_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let p = path.to_str().unwrap();
    assert!(pst(&["synth", "krawtchouk", "--n", "9", "--out", p]).status.success());
    let out = pst(&["check", "--chain", p]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pst"], true);
}
