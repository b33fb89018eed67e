use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rcm::campaign::{output_files, read_trials_csv, OutputFormat};

fn rcm() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rcm"));
    cmd.env_remove("RCM_SEED");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("sweep.json");
    fs::write(&p, body).unwrap();
    p
}

const SWEEP: &str = r#"{"model": {"kind": "unit_disk"}, "rho_list": [200, 400], "b_list": [0],
    "metric": "torus", "trials": 6, "master_seed": 42, "theory": false}"#;

#[test]
fn simulate_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SWEEP);
    let out_dir = dir.path().join("out");
    let out = run(rcm().arg("simulate").arg(&cfg).arg("--output").arg(&out_dir));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files = output_files(&out_dir, OutputFormat::Csv);
    let rows = read_trials_csv(fs::File::open(&files.trials).unwrap()).unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(fs::read_to_string(&files.summary).unwrap().lines().count(), 3);
}

#[test]
fn reruns_are_byte_identical_and_seed_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SWEEP);
    let go = |name: &str, workers: &str, seed: Option<&str>| {
        let out_dir = dir.path().join(name);
        let mut cmd = rcm();
        cmd.args(["--workers", workers, "simulate"]).arg(&cfg).arg("--output").arg(&out_dir);
        if let Some(s) = seed {
            cmd.env("RCM_SEED", s);
        }
        assert!(run(&mut cmd).status.success());
        fs::read(output_files(&out_dir, OutputFormat::Csv).trials).unwrap()
    };
    let a = go("a", "1", None);
    assert_eq!(a, go("b", "3", None));
    assert_eq!(a, go("c", "1", Some("42")));
    assert_ne!(a, go("d", "1", Some("43")));

    let bad = run(rcm().arg("simulate").arg(&cfg).env("RCM_SEED", "not-a-seed"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn couple_adds_the_boundary_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SWEEP);
    let out_dir = dir.path().join("out");
    let out = run(rcm().arg("couple").arg(&cfg).args(["--format", "json", "--output"]).arg(&out_dir));
    assert!(out.status.success());
    let text = fs::read_to_string(output_files(&out_dir, OutputFormat::Json).trials).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    for row in rows.as_array().unwrap() {
        assert_eq!(row["metric"], "coupled");
        let t = row["isolated_torus"].as_u64().unwrap();
        let e = row["isolated_boundary"].as_u64().unwrap();
        assert_eq!(row["isolated"].as_u64().unwrap(), t + e);
    }
}

#[test]
fn theory_prints_text_json_and_csv() {
    let out = run(rcm().args(["theory", "--model", "unit_disk", "--rho", "1000", "--b", "-1"]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("expected_isolated 2.71828182"), "{text}");
    assert!(text.contains("b1"));

    let out = run(rcm().args([
        "theory", "--model", "gaussian", "--rho", "2000", "--b", "0", "--metric", "square", "--format", "json",
    ]));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["model"], "gaussian");
    assert!(v["report"]["boundary_excess"].as_f64().unwrap() > 0.0);

    let out = run(rcm().args(["theory", "--model", "unit_disk", "--rho", "1e4", "--b", "0", "--format", "csv"]));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), values.len());
    let b1: f64 = values[header.iter().position(|h| *h == "b1").unwrap()].parse().unwrap();
    assert!((b1 - 0.02815).abs() < 1e-4);
}

#[test]
fn validate_model_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"kind": "log_normal", "sigma_db": 4, "eta": 2}, "rho_list": [1000], "b_list": [0],
            "metric": "square", "trials": 1, "master_seed": 1}"#,
    );
    let out = run(rcm().arg("validate-model").arg(&cfg));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("model passes validation"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let cfg = write_config(dir.path(), r#"{"model": {"kind": "unit_disk"}, "trials": 3}"#);
    assert_eq!(run(rcm().arg("simulate").arg(&cfg)).status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        r#"{"model": {"kind": "log_normal", "sigma_db": -1, "eta": 2}, "rho_list": [100], "b_list": [0],
            "metric": "torus", "trials": 1, "master_seed": 1}"#,
    );
    assert_eq!(run(rcm().arg("validate-model").arg(&cfg)).status.code(), Some(3));
    assert_eq!(run(rcm().arg("simulate").arg(&cfg)).status.code(), Some(3));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(rcm().arg("simulate").arg(&missing)).status.code(), Some(4));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(dir.path(), SWEEP);
    let out = run(rcm().arg("simulate").arg(&cfg).arg("--output").arg(blocker.join("sub")));
    assert_eq!(out.status.code(), Some(4));
}
