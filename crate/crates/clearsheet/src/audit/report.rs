//! Report assembly and the two emitters (plain text, structured JSON).
//!
//! The structured schema is versioned and documented in docs/report-schema.md.
//! Everything in a report is deterministic except `timing_ms`, which is the
//! last field (and, in text form, the last line) precisely so it can be
//! stripped when comparing runs.

use serde::Serialize;

use crate::score::Score;
use crate::scorer::{ModelScore, PerCellScore};
use crate::workbook::ConnectionKind;

use super::lint::{Finding, Severity};

/// Bumped whenever a field is added, removed, or renamed.
pub const REPORT_SCHEMA: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema: &'static str,
    pub tool: String,
    /// The input path exactly as given on the command line.
    pub input: String,
    /// SHA-256 of the raw file bytes.
    pub digest_sha256: String,
    pub model: ModelScore,
    pub findings: Vec<Finding>,
    pub timing_ms: u64,
}

pub fn tool_version() -> String {
    format!("clearsheet {}", env!("CARGO_PKG_VERSION"))
}

pub fn emit_structured(report: &AuditReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn summary_line(model: &ModelScore) -> String {
    match model.total {
        Score::Finite(0) => "TRANSPARENT (0 steps from transparency)".to_string(),
        Score::Finite(n) => format!("{n} steps from transparency"),
        Score::Opaque => format!("OPAQUE (finite subtotal {} steps)", model.finite_subtotal),
    }
}

fn connection_name(kind: ConnectionKind) -> &'static str {
    match kind {
        ConnectionKind::MsQuery => "ms-query",
        ConnectionKind::PowerQuery => "power-query",
        ConnectionKind::Other => "external",
    }
}

fn severity_name(s: Severity) -> &'static str {
    match s {
        Severity::Error => "error",
        Severity::Warn => "warn",
        Severity::Info => "info",
    }
}

/// Cells grouped by sheet, preserving model order.
fn by_sheet(cells: &[PerCellScore]) -> Vec<(&str, Vec<&PerCellScore>)> {
    let mut groups: Vec<(&str, Vec<&PerCellScore>)> = Vec::new();
    for cell in cells {
        match groups.last_mut() {
            Some((sheet, members)) if *sheet == cell.cell.sheet => members.push(cell),
            _ => groups.push((&cell.cell.sheet, vec![cell])),
        }
    }
    groups
}

pub fn emit_text(report: &AuditReport) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let _ = writeln!(out, "== {} ==", report.input);
    let _ = writeln!(out, "sha256 {}", report.digest_sha256);
    let _ = writeln!(out, "{}", summary_line(&report.model));

    if !report.model.opaque_cells.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "opaque cells:");
        for oc in &report.model.opaque_cells {
            let _ = writeln!(out, "  {}  {}", oc.cell, oc.reason);
        }
    }

    for (sheet, cells) in by_sheet(&report.model.cells) {
        let _ = writeln!(out);
        let _ = writeln!(out, "sheet {sheet}:");
        let width = cells
            .iter()
            .map(|c| c.cell.to_string().len())
            .max()
            .unwrap_or(4)
            .max("cell".len());
        let _ = writeln!(
            out,
            "  {:<width$}  {:>7}  {:>7}  {:>7}  steps",
            "cell", "surface", "source", "total"
        );
        for cell in cells {
            let notes: Vec<String> = cell.items.iter().map(|i| i.description.clone()).collect();
            let _ = writeln!(
                out,
                "  {:<width$}  {:>7}  {:>7}  {:>7}  {}",
                cell.cell.to_string(),
                cell.surface.to_string(),
                cell.source.to_string(),
                cell.total.to_string(),
                notes.join("; ")
            );
        }
    }

    if !report.model.tables.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "tables:");
        for t in &report.model.tables {
            let _ = writeln!(
                out,
                "  {}  {} connection  {}",
                t.table,
                connection_name(t.connection),
                t.cost
            );
        }
    }

    if !report.findings.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "findings:");
        for f in &report.findings {
            let loc = f
                .cell
                .as_ref()
                .map(|c| c.to_string())
                .or_else(|| f.table.clone())
                .unwrap_or_else(|| "-".to_string());
            let _ = writeln!(
                out,
                "  {:<5} {}  {}: {}",
                severity_name(f.severity),
                f.rule,
                loc,
                f.message
            );
            let _ = writeln!(out, "        fix: {}", f.recommendation);
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "elapsed_ms: {}", report.timing_ms);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::lint::lint;
    use crate::scorer::{ScoreConfig, Scorer};
    use crate::workbook::{CellValue, WorkbookBuilder, WorkbookModel};

    fn report_for(wb: &WorkbookModel, timing_ms: u64) -> AuditReport {
        let scorer = Scorer::new(wb, ScoreConfig::default());
        let model = scorer.model();
        let findings = lint(&scorer, &model);
        AuditReport {
            schema: REPORT_SCHEMA,
            tool: tool_version(),
            input: "book.xlsx".to_string(),
            digest_sha256: "0".repeat(64),
            model,
            findings,
            timing_ms,
        }
    }

    fn transparent_workbook() -> WorkbookModel {
        let mut b = WorkbookBuilder::new();
        b.sheet("S")
            .text("A1", "Rent")
            .number("B1", 800.0)
            .format("B1", "$#,##0");
        b.build()
    }

    #[test]
    fn summary_strings_match_the_contract() {
        let text = emit_text(&report_for(&transparent_workbook(), 1));
        assert!(text.contains("TRANSPARENT (0 steps from transparency)"), "{text}");

        let mut b = WorkbookBuilder::new();
        b.sheet("S")
            .text("A1", "Rent")
            .number("B1", 800.0)
            .format("B1", "$#,##0")
            .text("A2", "Annual")
            .formula("B2", "=B1*MPY", CellValue::Number(9600.0))
            .format("B2", "$#,##0");
        b.defined_name("MPY", None, crate::workbook::NameTarget::Constant("12".into()));
        let text = emit_text(&report_for(&b.build(), 1));
        assert!(text.contains("-2 steps from transparency"), "{text}");

        let mut b = WorkbookBuilder::new();
        b.sheet("S").formula("B1", "=A11 * 12", CellValue::Number(0.0));
        let text = emit_text(&report_for(&b.build(), 1));
        assert!(text.contains("OPAQUE (finite subtotal"), "{text}");
    }

    #[test]
    fn opaque_cells_are_listed_before_the_sheet_tables() {
        let mut b = WorkbookBuilder::new();
        b.sheet("S").formula("B1", "=A11 * 12", CellValue::Number(0.0));
        let text = emit_text(&report_for(&b.build(), 1));
        let opaque_at = text.find("opaque cells:").expect("opaque section");
        let sheet_at = text.find("sheet S:").expect("sheet section");
        assert!(opaque_at < sheet_at, "{text}");
    }

    #[test]
    fn reports_are_identical_up_to_timing() {
        let wb = transparent_workbook();
        let strip = |s: &str| {
            s.lines()
                .filter(|l| !l.contains("timing_ms") && !l.starts_with("elapsed_ms:"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let (a, b) = (report_for(&wb, 3), report_for(&wb, 99));
        assert_eq!(strip(&emit_structured(&a)), strip(&emit_structured(&b)));
        assert_eq!(strip(&emit_text(&a)), strip(&emit_text(&b)));
        assert_ne!(emit_structured(&a), emit_structured(&b));
    }

    #[test]
    fn structured_reports_parse_back_with_timing_last() {
        let out = emit_structured(&report_for(&transparent_workbook(), 7));
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["schema"], "1");
        assert_eq!(value["model"]["total"], 0);
        let last_field_line = out.lines().rev().nth(1).unwrap();
        assert!(last_field_line.contains("\"timing_ms\": 7"), "{last_field_line}");
    }
}
