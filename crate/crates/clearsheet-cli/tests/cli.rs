//! End-to-end checks of the `clearsheet` binary: exit codes, batch
//! ordering, flag handling, and report output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../clearsheet/tests/fixtures")
        .join(format!("{stem}.xlsx"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clearsheet")).args(args).output().expect("binary runs")
}

fn audit(stems: &[&str], flags: &[&str]) -> Output {
    let mut args = vec!["audit".to_string()];
    for stem in stems {
        let path =
            if stem.contains('.') { PathBuf::from(stem) } else { fixture(stem) };
        args.push(path.to_string_lossy().into_owned());
    }
    args.extend(flags.iter().map(|f| f.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn transparent_workbook_exits_zero() {
    let out = audit(&["inputs_grid"], &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("TRANSPARENT (0 steps from transparency)"), "{text}");
    assert!(text.contains("sha256 "), "{text}");
}

#[test]
fn opaque_cells_exit_one_with_error_findings() {
    let out = audit(&["bare_literal"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("OPAQUE (finite subtotal 0 steps)"), "{text}");
    assert!(text.contains("opaque cells:"), "{text}");
    assert!(text.contains("error L1"), "bare literal must surface an L1 finding: {text}");
}

#[test]
fn threshold_breaches_exit_two() {
    let out = audit(&["lookup_help"], &["--fail-threshold", "-1"]);
    assert_eq!(out.status.code(), Some(2), "-2 is below a -1 floor");
    let out = audit(&["lookup_help"], &["--fail-threshold", "-2"]);
    assert_eq!(out.status.code(), Some(0), "-2 meets a -2 floor");
}

#[test]
fn positive_threshold_is_rejected_up_front() {
    let out = audit(&["lookup_help"], &["--fail-threshold", "5"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("must be <= 0"), "{}", stderr(&out));
}

#[test]
fn unreadable_file_exits_three_and_does_not_sink_the_batch() {
    let out = audit(&["inputs_grid", "no_such_book.xlsx", "inputs_grid"], &[]);
    assert_eq!(out.status.code(), Some(3), "a load failure dominates the batch");
    assert!(stderr(&out).contains("no_such_book.xlsx"), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(
        text.matches("TRANSPARENT").count(),
        2,
        "the readable inputs must still be audited: {text}"
    );
}

#[test]
fn structured_batches_keep_input_order() {
    let a = fixture("tables_import");
    let b = fixture("inputs_grid");
    let out = run(&[
        "audit",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let reports = reports.as_array().expect("a batch renders as an array");
    assert_eq!(reports.len(), 2);
    assert!(reports[0]["input"].as_str().unwrap().ends_with("tables_import.xlsx"));
    assert!(reports[1]["input"].as_str().unwrap().ends_with("inputs_grid.xlsx"));
    assert_eq!(reports[0]["model"]["total"], serde_json::json!(-1));
    assert_eq!(reports[1]["model"]["total"], serde_json::json!(0));
}

#[test]
fn single_structured_report_is_one_object() {
    let out = audit(&["lookup_help"], &["--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert!(report.is_object());
    assert_eq!(report["schema"], serde_json::json!("1"));
    assert_eq!(report["model"]["total"], serde_json::json!(-2));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = audit(&["inputs_grid"], &["--format", "structured", "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty(), "report goes to the file, not stdout");
    let body = std::fs::read_to_string(&dest).unwrap();
    let report: serde_json::Value = serde_json::from_str(&body).expect("valid JSON");
    assert_eq!(report["model"]["total"], serde_json::json!(0));
}

#[test]
fn strict_labels_flag_flips_format_only_units() {
    let out = audit(&["strict_formats"], &[]);
    assert_eq!(out.status.code(), Some(0), "a money format counts as a unit by default");
    let out = audit(&["strict_formats"], &["--strict-labels"]);
    assert_eq!(out.status.code(), Some(1), "strict labels must reject format-only units");
}

#[test]
fn vicinity_flag_resizes_the_window() {
    let out = audit(&["area_nav_far"], &["--format", "structured"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["model"]["total"], serde_json::json!(-2));

    let out = audit(&["area_nav_far"], &["--vicinity", "500x20", "--format", "structured"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["model"]["total"], serde_json::json!(-1), "no navigation step needed");
}

#[test]
fn config_file_keys_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("audit.conf");
    std::fs::write(&cfg, "# audit settings\nstrict-labels = true\n").unwrap();
    let out = audit(&["strict_formats"], &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ast_subcommand_prints_the_tree() {
    let out = run(&["ast", "SUM(A1:A2)*2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("BinaryOp *"), "{text}");
    assert!(text.contains("FuncCall SUM"), "{text}");
    assert!(text.contains("RangeRef A1:A2"), "{text}");
}

#[test]
fn ast_subcommand_rejects_broken_formulas() {
    let out = run(&["ast", "SUM(("]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn text_reports_only_differ_in_timing_across_runs() {
    let strip = |s: String| -> String {
        s.lines().filter(|l| !l.starts_with("elapsed_ms:")).collect::<Vec<_>>().join("\n")
    };
    let first = strip(stdout(&audit(&["scenario_selector", "error_unguarded"], &[])));
    let second = strip(stdout(&audit(&["scenario_selector", "error_unguarded"], &[])));
    assert_eq!(first, second);
}
