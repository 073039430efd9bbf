use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn ldmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldmc")).args(args).output().unwrap()
}

fn beam() -> String {
    config_path("beam.json").to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_shipped_config() {
    let out = ldmc(&["validate", "--config", &beam()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid (5 nodes, 4 elements, 8 hinges)"));
}

#[test]
fn validate_lists_problems() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(beam()).unwrap()).unwrap();
    v["sections"][0]["height"] = (-1.0).into();
    v["random_variables"].as_object_mut().unwrap().remove("load");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = ldmc(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sections[0].height") && err.contains("random_variables.load"), "{err}");
}

#[test]
fn zero_simulations_is_a_usage_error() {
    let out = ldmc(&["run", "--config", &beam(), "--simulations", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_arguments_are_usage_errors() {
    for args in [
        vec!["run", "--config", &beam(), "--workers", "0"],
        vec!["run", "--config", &beam(), "--corrosion", "salt"],
        vec!["run", "--config", &beam(), "--years", "0"],
        vec!["run"],
    ] {
        assert_eq!(ldmc(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn missing_config_fails_cleanly() {
    let out = ldmc(&["run", "--config", "does/not/exist.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn run_writes_all_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_ldmc"))
        .args(["run", "--config", &beam(), "--simulations", "6", "--seed", "4", "--corrosion", "chloride"])
        .args(["--workers", "2", "--output-dir", out_dir.to_str().unwrap()])
        .env("LDMC_LOG", "info")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrote results"));

    let global = std::fs::read_to_string(out_dir.join("pf_global.csv")).unwrap();
    let lines: Vec<&str> = global.lines().collect();
    assert_eq!(lines[0], "year,pf,stderr");
    assert_eq!(lines.len(), 51);
    let mut last = 0.0;
    for (k, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0].parse::<usize>().unwrap(), k + 1);
        let pf: f64 = cols[1].parse().unwrap();
        assert!(pf >= last);
        last = pf;
    }
    for h in 1..=8 {
        assert!(out_dir.join(format!("pf_hinge_{h}.csv")).exists());
    }

    let map: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("failure_map.json")).unwrap()).unwrap();
    let map = map.as_object().unwrap();
    assert_eq!(map.len(), 8);
    assert_eq!(map["3"]["node"], 2);
    assert_eq!(map["3"]["element"], 2);

    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("campaign_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["n_sims"], 6);
    assert_eq!(meta["seed"], 4);
    assert_eq!(meta["workers"], 2);
    assert_eq!(meta["corrosion"], "chloride");
}
