//! The audit pipeline: load workbooks, score them, lint them, report.
//!
//! One call per batch; each file gets its own outcome so a workbook that
//! fails to load never aborts the rest. Exit codes: 0 scored and at or above
//! the failure threshold, 1 any opaque cell, 2 finite score below the
//! threshold, 3 load failure. Across a batch the numerically largest code
//! wins.

pub mod config;
pub mod lint;
pub mod report;

pub use config::{AuditConfig, ConfigError, OutputFormat};
pub use lint::{lint, Finding, Severity};
pub use report::{emit_structured, emit_text, tool_version, AuditReport, REPORT_SCHEMA};

use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::catalog::{load_catalog, FunctionCatalog};
use crate::labeling::LexiconSet;
use crate::scorer::Scorer;
use crate::workbook::{load_workbook, LoadOptions};

/// A defect in the audit configuration itself, as opposed to one input file.
#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("cannot load function catalog: {0}")]
    Catalog(String),
    #[error("cannot load lexicons from {path}: {source}")]
    Lexicons {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug)]
pub struct AuditOutcome {
    pub path: PathBuf,
    pub report: Result<AuditReport, String>,
}

/// Audits each file in order. Output order always equals input order.
pub fn run_audit(paths: &[PathBuf], cfg: &AuditConfig) -> Result<Vec<AuditOutcome>, SetupError> {
    let catalog = match &cfg.catalog_path {
        Some(p) => load_catalog(p).map_err(|e| SetupError::Catalog(e.to_string()))?,
        None => FunctionCatalog::default(),
    };
    let lexicons = match &cfg.lexicon_dir {
        Some(p) => LexiconSet::from_dir(p).map_err(|e| SetupError::Lexicons {
            path: p.display().to_string(),
            source: e,
        })?,
        None => LexiconSet::builtin(),
    };

    Ok(paths
        .iter()
        .map(|path| AuditOutcome {
            path: path.clone(),
            report: audit_one(path, cfg, &catalog, &lexicons),
        })
        .collect())
}

fn audit_one(
    path: &Path,
    cfg: &AuditConfig,
    catalog: &FunctionCatalog,
    lexicons: &LexiconSet,
) -> Result<AuditReport, String> {
    let started = Instant::now();
    let bytes =
        std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let digest = hex_digest(&bytes);
    let wb = load_workbook(path, LoadOptions::default()).map_err(|e| e.to_string())?;
    let scorer =
        Scorer::with_catalog_and_lexicons(&wb, cfg.score.clone(), catalog.clone(), lexicons.clone());
    let model = scorer.model();
    let findings = lint(&scorer, &model);
    Ok(AuditReport {
        schema: REPORT_SCHEMA,
        tool: tool_version(),
        input: path.display().to_string(),
        digest_sha256: digest,
        model,
        findings,
        timing_ms: started.elapsed().as_millis() as u64,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write;
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Exit code for one outcome.
fn outcome_code(outcome: &AuditOutcome, fail_threshold: Option<i64>) -> i32 {
    let Ok(report) = &outcome.report else { return 3 };
    if !report.model.opaque_cells.is_empty() {
        return 1;
    }
    match (fail_threshold, report.model.total.finite()) {
        (Some(threshold), Some(total)) if total < threshold => 2,
        _ => 0,
    }
}

/// Worst exit code across the batch (numerically largest).
pub fn exit_code(outcomes: &[AuditOutcome], fail_threshold: Option<i64>) -> i32 {
    outcomes
        .iter()
        .map(|o| outcome_code(o, fail_threshold))
        .max()
        .unwrap_or(0)
}
