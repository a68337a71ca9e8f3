//! End-to-end subcommand tests against the example configs: exit codes,
//! emitted files, and the manifest's checksum round-trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(subcommand: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsemb"))
        .arg(subcommand)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn check_potential_verdict_drives_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(
        "check-potential",
        &repo_config("check_power.json"),
        &dir.path().join("power"),
        &[],
    );
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));

    let failed = run(
        "check-potential",
        &repo_config("check_oscillating.json"),
        &dir.path().join("osc"),
        &[],
    );
    assert_eq!(failed.status.code(), Some(1));
    let line = String::from_utf8_lossy(&failed.stdout);
    assert!(line.contains("GrowsUnbounded"), "{line}");
    // the report is still written
    assert!(dir.path().join("osc/check-gradv.json").exists());
}

#[test]
fn unknown_potential_kind_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"command":"check-potential","grid":{"dimension":2,"radius":4.0,"nodes_per_axis":33},"potential":{"kind":"quartic"}}"#,
    )
    .unwrap();
    let out = run("check-potential", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let line = String::from_utf8_lossy(&out.stdout);
    assert!(line.contains("config-error"), "{line}");
}

#[test]
fn command_mismatch_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        "solve",
        &repo_config("check_power.json"),
        &dir.path().join("out"),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn manifest_hash_revalidates_against_stored_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run(
        "verify-embedding",
        &repo_config("verify_embedding.json"),
        &out_dir,
        &[],
    );
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    let stored = std::fs::read(out_dir.join("config.json")).unwrap();
    assert_eq!(
        manifest["config_hash"].as_str().unwrap(),
        sha256_hex(&stored)
    );
    // every listed file exists with the recorded checksum
    for entry in manifest["files"].as_array().unwrap() {
        let name = entry["name"].as_str().unwrap();
        let bytes = std::fs::read(out_dir.join(name)).unwrap();
        assert_eq!(entry["sha256"].as_str().unwrap(), sha256_hex(&bytes), "{name}");
        assert_eq!(entry["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
}

#[test]
fn vnon_counterexample_emits_monotone_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run(
        "counterexample",
        &repo_config("counterexample_vnon.json"),
        &out_dir,
        &[],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(out_dir.join("certification.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lv_col = header.iter().position(|&h| h == "lv_tau").unwrap();
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(lv_col).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 5);
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    assert!(out_dir.join("lv-tau-vs-n.dat").exists());
    assert!(out_dir.join("weak-null.json").exists());
}

#[test]
fn solve_writes_solution_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run("solve", &repo_config("solve_h3.json"), &out_dir, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let solution: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("solution.json")).unwrap()).unwrap();
    assert!(solution["lambda"].as_f64().unwrap() > 0.0);
    assert!(solution["converged"].as_bool().unwrap());
    assert_eq!(solution["concentration_label"], "concentration");
    for file in ["solution.csv", "trace.csv", "concentration.json", "i-vs-iter.dat"] {
        assert!(out_dir.join(file).exists(), "{file} missing");
    }
    // solution.csv has x,y,u columns and a positive peak
    let csv = std::fs::read_to_string(out_dir.join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,y,u\n"));
    let peak = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(peak > 0.0);
}

#[test]
fn out_dir_falls_back_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-config");
    let cfg_path = dir.path().join("cfg.json");
    let cfg = format!(
        r#"{{"command":"check-potential","out_dir":"{}","grid":{{"dimension":1,"radius":4.0,"nodes_per_axis":33}},"potential":{{"kind":"power","alpha":2.0}},"checks":{{"run":["cstar"]}}}}"#,
        target.display()
    );
    std::fs::write(&cfg_path, cfg).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wsemb"))
        .args(["check-potential", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(target.join("check-cstar.json").exists());
}

#[test]
fn refine_emits_second_report_set() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run(
        "check-potential",
        &repo_config("check_power.json"),
        &out_dir,
        &["--refine"],
    );
    assert!(out.status.success());
    assert!(out_dir.join("check-gradv.json").exists());
    assert!(out_dir.join("check-gradv.refined.json").exists());
}
