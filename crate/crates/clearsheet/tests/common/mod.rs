//! Shared helper for integration suites: parses the `.ledger` oracle files
//! in `tests/fixtures/` and replays them against `model_score`.
//!
//! Ledger grammar, one entry per line:
//!
//! ```text
//! # comment
//! config vicinity=500x20          apply before scoring
//! total = -2                      model total (or `opaque`)
//! finite_subtotal = -2
//! cell S!B1 = -2                  per-cell total
//! cell S!B1 = opaque bare-literal per-cell total plus reason kind
//! table Imported = -1             table charge
//! ```
//!
//! Any model cell a ledger does not list must score exactly zero, and the
//! model's table list must match the ledger's table lines one for one.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clearsheet::audit::AuditConfig;
use clearsheet::scorer::{ModelScore, ScoreConfig, Scorer};
use clearsheet::workbook::{
    load_workbook, AreaRef, CellAddress, CellValue, LoadOptions, NameTarget, WorkbookBuilder,
};

#[derive(Debug, PartialEq)]
pub enum Want {
    Steps(i64),
    Opaque(Option<String>),
}

#[derive(Debug, Default)]
pub struct Ledger {
    pub config: Vec<(String, String)>,
    pub total: Option<Want>,
    pub finite_subtotal: Option<i64>,
    pub cells: BTreeMap<String, Want>,
    pub tables: BTreeMap<String, i64>,
}

fn parse_want(text: &str) -> Result<Want, String> {
    if let Some(rest) = text.strip_prefix("opaque") {
        let reason = rest.trim();
        return Ok(Want::Opaque((!reason.is_empty()).then(|| reason.to_string())));
    }
    text.parse::<i64>().map(Want::Steps).map_err(|_| format!("bad score {text:?}"))
}

pub fn parse_ledger(path: &Path) -> Result<Ledger, String> {
    let body = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut ledger = Ledger::default();
    for (idx, raw) in body.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| format!("{}:{}: {msg}", path.display(), idx + 1);
        if let Some(rest) = line.strip_prefix("config ") {
            let (key, value) =
                rest.split_once('=').ok_or_else(|| at("config needs key=value".into()))?;
            ledger.config.push((key.trim().to_string(), value.trim().to_string()));
            continue;
        }
        let (lhs, rhs) =
            line.split_once('=').ok_or_else(|| at("expected `what = score`".into()))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if lhs == "total" {
            ledger.total = Some(parse_want(rhs).map_err(&at)?);
        } else if lhs == "finite_subtotal" {
            ledger.finite_subtotal =
                Some(rhs.parse::<i64>().map_err(|_| at(format!("bad subtotal {rhs:?}")))?);
        } else if let Some(addr) = lhs.strip_prefix("cell ") {
            ledger.cells.insert(addr.trim().to_string(), parse_want(rhs).map_err(&at)?);
        } else if let Some(name) = lhs.strip_prefix("table ") {
            let cost = rhs.parse::<i64>().map_err(|_| at(format!("bad table cost {rhs:?}")))?;
            ledger.tables.insert(name.trim().to_string(), cost);
        } else {
            return Err(at(format!("unrecognized entry {lhs:?}")));
        }
    }
    if ledger.total.is_none() || ledger.finite_subtotal.is_none() {
        return Err(format!("{}: total and finite_subtotal are required", path.display()));
    }
    Ok(ledger)
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn reason_kind(reason: &clearsheet::scorer::OpaqueReason) -> String {
    serde_json::to_value(reason).unwrap()["kind"].as_str().unwrap().to_string()
}

fn check_fixture(stem: &str, model: &ModelScore, ledger: &Ledger, errs: &mut Vec<String>) {
    let mut err = |msg: String| errs.push(format!("{stem}: {msg}"));

    match ledger.total.as_ref().unwrap() {
        Want::Steps(n) => {
            if model.total.finite() != Some(*n) {
                err(format!("total is {}, ledger says {n}", model.total));
            }
        }
        Want::Opaque(_) => {
            if model.total.finite().is_some() {
                err(format!("total is {}, ledger says opaque", model.total));
            }
        }
    }
    let want_subtotal = ledger.finite_subtotal.unwrap();
    if model.finite_subtotal != want_subtotal {
        err(format!("finite_subtotal is {}, ledger says {want_subtotal}", model.finite_subtotal));
    }

    let reasons: BTreeMap<String, String> = model
        .opaque_cells
        .iter()
        .map(|oc| (oc.cell.to_string(), reason_kind(&oc.reason)))
        .collect();

    let mut seen = BTreeMap::new();
    for cell in &model.cells {
        let addr = cell.cell.to_string();
        seen.insert(addr.clone(), ());
        match ledger.cells.get(&addr) {
            Some(Want::Steps(n)) => {
                if cell.total.finite() != Some(*n) {
                    err(format!("{addr} scored {}, ledger says {n}", cell.total));
                }
            }
            Some(Want::Opaque(want_reason)) => {
                if cell.total.finite().is_some() {
                    err(format!("{addr} scored {}, ledger says opaque", cell.total));
                } else if let Some(want) = want_reason {
                    match reasons.get(&addr) {
                        Some(kind) if kind == want => {}
                        Some(kind) => {
                            err(format!("{addr} is opaque for {kind}, ledger says {want}"))
                        }
                        None => err(format!("{addr} is opaque but missing from opaque_cells")),
                    }
                }
            }
            None => {
                if cell.total.finite() != Some(0) {
                    err(format!("{addr} scored {} but the ledger does not list it", cell.total));
                }
            }
        }
    }
    for addr in ledger.cells.keys() {
        if !seen.contains_key(addr) {
            err(format!("ledger lists {addr} but the model does not score it"));
        }
    }

    let got_tables: BTreeMap<String, Option<i64>> =
        model.tables.iter().map(|t| (t.table.clone(), t.cost.finite())).collect();
    for (name, cost) in &ledger.tables {
        match got_tables.get(name) {
            Some(Some(got)) if got == cost => {}
            Some(got) => err(format!("table {name} costs {got:?}, ledger says {cost}")),
            None => err(format!("ledger lists table {name} but the model does not charge it")),
        }
    }
    for name in got_tables.keys() {
        if !ledger.tables.contains_key(name) {
            err(format!("model charges table {name} but the ledger does not list it"));
        }
    }
}

/// Replays every `.ledger` in the fixture corpus. Returns how many were
/// checked and every mismatch found.
pub fn verify_ledger_corpus() -> (usize, Vec<String>) {
    let dir = fixtures_dir();
    let mut errs = Vec::new();
    let mut checked = 0usize;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("ledger") {
            continue;
        }
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let ledger = match parse_ledger(&path) {
            Ok(l) => l,
            Err(e) => {
                errs.push(e);
                continue;
            }
        };
        let book = path.with_extension("xlsx");
        let wb = match load_workbook(&book, LoadOptions::default()) {
            Ok(wb) => wb,
            Err(e) => {
                errs.push(format!("{stem}: cannot load {}: {e}", book.display()));
                continue;
            }
        };
        let mut cfg = AuditConfig::default();
        for (key, value) in &ledger.config {
            if let Err(e) = cfg.set(key, value) {
                errs.push(format!("{stem}: bad config {key}={value}: {e}"));
            }
        }
        let model = Scorer::new(&wb, cfg.score.clone()).model();
        check_fixture(&stem, &model, &ledger, &mut errs);
        checked += 1;
    }
    (checked, errs)
}

#[derive(Debug, Clone, Copy)]
pub enum LabelStyle {
    MoneyFormat,
    TrailingUnit,
    Comment,
}

pub const LABEL_STYLES: [LabelStyle; 3] =
    [LabelStyle::MoneyFormat, LabelStyle::TrailingUnit, LabelStyle::Comment];

/// One formula cell reading a single defined name; the name's target and
/// its labels sit together at `target_row`, so relocating the row moves
/// the whole block.
pub fn named_target_model(
    target_row: u32,
    target_col: u32,
    style: LabelStyle,
    hidden: bool,
) -> ModelScore {
    let mut b = WorkbookBuilder::new();
    let t = CellAddress::new("S", target_row, target_col);
    let mut sheet = b
        .sheet("S")
        .text("A1", "Total")
        .formula("B1", "=Tgt", CellValue::Number(5.0))
        .format("B1", "$#,##0")
        .number(&t.a1(), 5.0);
    match style {
        LabelStyle::MoneyFormat => {
            sheet = sheet
                .text(&CellAddress::new("S", target_row, target_col - 1).a1(), "Fuel Cost")
                .format(&t.a1(), "$#,##0");
        }
        LabelStyle::TrailingUnit => {
            sheet = sheet
                .text(&CellAddress::new("S", target_row, target_col - 1).a1(), "Fuel Cost")
                .text(&CellAddress::new("S", target_row, target_col + 1).a1(), "USD");
        }
        LabelStyle::Comment => {
            sheet = sheet.comment(&t.a1(), "Fuel Cost in USD");
        }
    }
    if hidden {
        sheet = sheet.hide_row(target_row);
    }
    drop(sheet);
    b.defined_name(
        "Tgt",
        None,
        NameTarget::Area(AreaRef::new(
            "S".to_string(),
            target_row,
            target_col,
            target_row,
            target_col,
        )),
    );
    Scorer::new(&b.build(), ScoreConfig::default()).model()
}

pub fn cell_total(model: &ModelScore, addr: &CellAddress) -> i64 {
    let cell = model.cells.iter().find(|c| &c.cell == addr).expect("scored cell");
    cell.total.finite().expect("finite cell score")
}

pub fn cell_surface(model: &ModelScore, addr: &CellAddress) -> i64 {
    let cell = model.cells.iter().find(|c| &c.cell == addr).expect("scored cell");
    cell.surface.finite().expect("finite surface score")
}
