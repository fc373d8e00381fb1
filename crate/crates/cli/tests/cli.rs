use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_teamdiff"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: Option<&Path>) -> Output {
    let mut c = bin();
    c.args(args).arg("--config").arg(cfg);
    if let Some(o) = out {
        c.arg("--out").arg(o);
    }
    c.output().unwrap()
}

const SMALL: &str = r#"{"game": {"kind": "quadratic"},
    "topology": {"teams": [{"kind": "ring", "size": 3}, {"kind": "full", "size": 2}],
                 "cross_links": [{"from": [1, 0], "to": [2, 1]}, {"from": [2, 0], "to": [1, 2]}]},
    "engine": {"mc_runs": 2, "horizon": 400}}"#;

#[test]
fn unknown_subcommand_exits_1() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn divergence_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &SMALL.replace(r#""mc_runs": 2"#, r#""mu": 10.0, "mc_runs": 1"#));
    let out = run(&["run-quadratic"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("out/summary.json").exists());
}

#[test]
fn missing_links_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"topology": {"teams": [{"kind": "ring", "size": 3}, {"kind": "ring", "size": 3}], "cross_links": []}}"#,
    );
    let out = run(&["verify-graph"], &cfg, None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("connectivity"));
    let out = run(&["run-quadratic"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    // a regular file where the output directory should go
    let blocker = write(dir.path(), "blocker", "");
    let out = run(&["run-quadratic"], &cfg, Some(&blocker.join("out")));
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_config_file_is_io_error() {
    let out = run(&["verify-graph"], Path::new("/nonexistent/teamdiff.json"), None);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_field_is_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"engine": {"mu": 0.01, "horizn": 5}}"#);
    let out = run(&["run-quadratic"], &cfg, Some(&dir.path().join("out")));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("horizn") && err.contains("engine"), "{err}");
}

#[test]
fn run_writes_complete_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out_dir = dir.path().join("out");
    let out = run(&["run-quadratic"], &cfg, Some(&out_dir));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap();
    assert!(header.starts_with("run_id,iter,mu"));
    assert!(header.contains("nash_error"));
    // 2 runs, iterations 0, 10, ..., 400
    assert_eq!(lines.count(), 2 * 41);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "run-quadratic");
    assert!(summary["per_team"]["1"]["lambda2"].is_number());
    assert!(summary["seeds"]["master_seed"].is_number());
    assert!(summary["config"]["engine"]["mu"].is_number());
    let leftovers: Vec<_> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 2, "{leftovers:?}");
}

#[test]
fn sweep_writes_one_csv_for_all_step_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["sweep-mu", "--mus", "0.02,0.01", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.code().is_some_and(|c| c == 0 || c == 1), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["points"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains(",2e-2,")) && csv.lines().any(|l| l.contains(",1e-2,")));
}

#[test]
fn sweep_rejects_non_halving_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out = bin()
        .args(["sweep-mu", "--mus", "0.02,0.007", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
