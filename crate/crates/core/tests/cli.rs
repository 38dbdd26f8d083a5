//! The `rmrw` binary: exit codes, flag precedence and artifact manifests.

use std::path::Path;
use std::process::Command;

use rmrw::experiments::Manifest;
use rmrw::io::{manifest_reference, read_json};

fn rmrw(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rmrw"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

fn manifest(dir: &Path) -> Manifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(rmrw(&[]).status.code(), Some(2));
    assert_eq!(rmrw(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(rmrw(&["sample", "--steps", "many"]).status.code(), Some(2));
    assert_eq!(rmrw(&["sample", "--algorithm", "hmc"]).status.code(), Some(2));
    assert_eq!(rmrw(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(rmrw(&["sample", "--out", &out, "--beta", "-1"]).status.code(), Some(2));
    assert_eq!(rmrw(&["validate-theory", "--out", &out, "--suites", "bogus"]).status.code(), Some(2));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "stepz = 10\n").unwrap();
    let r = rmrw(&["sample", "--out", &out, "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("stepz"));
}

#[test]
fn failed_assertion_exits_1() {
    // Far too short a chain to separate the modes.
    let dir = tempfile::tempdir().unwrap();
    let r = rmrw(&["figure1", "--out", &out_arg(dir.path()), "--steps", "50"]);
    assert_eq!(r.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL ")));
    assert!(stdout.lines().last().unwrap().starts_with("FAILED figure1"));
}

#[test]
fn sample_passes_and_lists_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let r = rmrw(&["sample", "--out", &out_arg(dir.path()), "--steps", "500", "--seed", "3"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let m = manifest(dir.path());
    assert_eq!(m.experiment, "sample");
    assert_eq!(m.seed, 3);
    assert_eq!(m.config["steps"], 500);
    assert!(dir.path().join("run.log").exists());
    for name in &m.artifacts {
        let path = dir.path().join(name);
        assert!(path.exists(), "{name} listed but missing");
        if name.ends_with(".json") {
            let j = read_json::<serde_json::Value>(&path).unwrap();
            assert_eq!(j.manifest_hash, m.manifest_hash, "{name}");
        } else {
            assert_eq!(manifest_reference(&path).unwrap().as_deref(), Some(m.manifest_hash.as_str()), "{name}");
        }
    }
    assert!(m.artifacts.iter().any(|a| a == "trace.csv"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "steps = 300\nbeta = 2.0\nseed = 9\n").unwrap();
    let out = dir.path().join("run");
    let r = rmrw(&[
        "sample",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "4",
        "--out",
        &out_arg(&out),
    ]);
    assert_eq!(r.status.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m.config["steps"], 300);
    assert_eq!(m.config["beta"], 4.0);
    assert_eq!(m.seed, 9);
}

#[test]
fn generated_data_feeds_sample() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    let r = rmrw(&["generate-data", "--out", &out_arg(&data_dir), "--d", "3", "--n", "64", "--gamma", "0.1"]);
    assert_eq!(r.status.code(), Some(0));
    let data = data_dir.join("data.csv");
    let run = dir.path().join("run");
    let r = rmrw(&[
        "sample",
        "--d",
        "3",
        "--data",
        data.to_str().unwrap(),
        "--steps",
        "200",
        "--algorithm",
        "mrw",
        "--out",
        &out_arg(&run),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = read_json::<serde_json::Value>(&run.join("summary.json")).unwrap().body;
    assert_eq!(summary["n"], 64);
    assert_eq!(summary["reflection_rate"], 0.0);
}

#[test]
fn same_seed_same_bytes_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (p, jobs) in [(&a, "1"), (&b, "2")] {
        let r = rmrw(&["validate-theory", "--suites", "derivatives,tails", "--jobs", jobs, "--out", &out_arg(p)]);
        assert_eq!(r.status.code(), Some(0));
    }
    let m = manifest(&a);
    for name in &m.artifacts {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(std::fs::read(a.join("manifest.json")).unwrap(), std::fs::read(b.join("manifest.json")).unwrap());
}
