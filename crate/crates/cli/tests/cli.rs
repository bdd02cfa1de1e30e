use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wdp-sim"))
}

fn scenario(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("link.scn");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const SMALL: &str = "\
# short multipath sweep
mapping = wdp
channel = multipath:default
snr_grid = 0:4:2
max_bits = 40000
";

#[test]
fn csi_dump_writes_one_row_per_subcarrier_and_observer() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario(dir.path(), SMALL);
    let out = run(&["csi-dump", "--scenario", scn.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2 * 64 + 1);
    assert_eq!(lines[0], "subcarrier,observer,amp,phase,re,im");
}

#[test]
fn ber_sweep_is_worker_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario(dir.path(), SMALL);
    let sweep = |workers: &str, name: &str| {
        let path = dir.path().join(name);
        let out = run(&[
            "ber-sweep",
            "--scenario",
            scn.to_str().unwrap(),
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let one = sweep("1", "a.csv");
    assert_eq!(one, sweep("8", "b.csv"));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("scenario_id,snr_db,bits,errors,ber,ci_halfwidth\nlink,0,"));
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario(dir.path(), "mapping = wdp\nbogus_key = 3\n");
    let out = run(&["validate", "--scenario", scn.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
}

#[test]
fn unreadable_scenario_is_a_runtime_error() {
    let out = run(&["validate", "--scenario", "/nonexistent/link.scn"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_invocations_are_usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--scenario", "x", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn overrides_and_flags_apply_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario(dir.path(), SMALL);
    let out = run(&[
        "validate",
        "--scenario",
        scn.to_str().unwrap(),
        "--set",
        "alpha=0.9",
        "--set",
        "seed=3",
        "--seed",
        "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "alpha = 0.9"), "{text}");
    assert!(text.lines().any(|l| l == "seed = 5"), "{text}");

    let bad = run(&["validate", "--scenario", scn.to_str().unwrap(), "--set", "alpha=1.5"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_output() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario(dir.path(), SMALL);
    let out = run(&[
        "security-sweep",
        "--scenario",
        scn.to_str().unwrap(),
        "--format",
        "json",
        "--set",
        "alphas=1,0.9",
        "--set",
        "snr_grid=4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<&str> = value
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["scenario_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["link/alpha=1", "link/alpha=0.9"]);
}
