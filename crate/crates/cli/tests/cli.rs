//! End-to-end checks of the command-line surface against the bundled
//! example configurations.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oband-gn"))
}

fn workspace_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn small_config() -> String {
    workspace_file("configs/demo_oband_5ch.json").display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn validate_accepts_bundled_configs() {
    for cfg in ["configs/demo_oband_5ch.json", "configs/demo_oband_161ch.json"] {
        let out = run(&["validate", &workspace_file(cfg).display().to_string()]);
        assert!(out.status.success(), "{cfg}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.starts_with("ok:"), "stdout: {text}");
    }
}

#[test]
fn validate_rejects_broken_config_with_exit_1() {
    let dir = std::env::temp_dir().join("oband-gn-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ \"fibre\": {} ").unwrap();
    let out = run(&["validate", &bad.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "diagnostic should be line-anchored: {err}");
}

#[test]
fn estimate_runs_are_byte_identical() {
    let cfg = small_config();
    let a = run(&["estimate", &cfg]);
    let b = run(&["estimate", &cfg, "--threads", "1"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical across runs");
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.starts_with("# schema=oband-gn/estimate.v1"));
    // Header comment + column header + 5 channels.
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn estimate_json_format_and_out_file() {
    let cfg = small_config();
    let dir = std::env::temp_dir().join("oband-gn-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("estimate.json");
    let out = run(&[
        "estimate",
        &cfg,
        "--format",
        "json",
        "--out",
        &out_path.display().to_string(),
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(parsed["schema"], "oband-gn/estimate.v1");
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn fit_emits_one_row_per_channel() {
    let out = run(&["fit", &small_config()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("# schema=oband-gn/fits.v1"));
    assert_eq!(text.lines().count(), 7);
    for line in text.lines().skip(2) {
        let fallback = line.split(',').last().unwrap();
        assert_eq!(fallback, "false", "no fit should fall back: {line}");
    }
}

#[test]
fn compare_reports_stats_and_deltas() {
    let out = run(&["compare", &small_config(), "--channels", "0,2,4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("mean_abs_db="));
    assert_eq!(text.lines().count(), 3 + 3);
}

#[test]
fn oracle_respects_cell_budget_with_exit_3() {
    let dir = std::env::temp_dir().join("oband-gn-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("tiny_budget.json");
    let mut config: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(workspace_file("configs/demo_oband_5ch.json")).unwrap(),
    )
    .unwrap();
    config["engine"]["oracle"]["cell_budget"] = serde_json::json!(100);
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let out = run(&["oracle", &cfg_path.display().to_string(), "--channels", "2"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn oracle_emits_rows() {
    let out = run(&["oracle", &small_config(), "--channels", "1,3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 2 + 2);
}

#[test]
fn sweep_requires_values() {
    let out = run(&["sweep", &small_config(), "--axis", "spans", "--values", ""]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_spans_with_comparison_summary() {
    let out = run(&[
        "sweep",
        &small_config(),
        "--axis",
        "spans",
        "--values",
        "1,2",
        "--compare-channels",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("axis_value,mean_abs_db,max_abs_db"));
    let summary_rows: Vec<&str> = text
        .lines()
        .skip(2)
        .take_while(|l| !l.is_empty())
        .collect();
    assert_eq!(summary_rows.len(), 2, "one summary row per span value: {text}");
}

#[test]
fn error_json_flag_emits_machine_readable_failure() {
    let out = run(&["estimate", "/nonexistent/config.json", "--error-json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["exit_code"], 1);
    assert!(err["error"].as_str().unwrap().contains("config"));
}
