//! Lint rules: turn a scored model into actionable findings.
//!
//! Every opaque cell yields at least one error-severity finding; warnings and
//! info findings point out step costs and modeling habits that are legal but
//! avoidable. Rules:
//!
//! - L1 in-formula literals (bare ones are errors, help-priced ones warnings)
//! - L2 unconstrained indirect references
//! - L3 unhandled error values
//! - L4 hidden or sealed content
//! - L5 daisy chains (a formula that merely forwards a remote cell)
//! - L6 insufficient labeling
//! - L7 labels that freeze panes would keep visible
//! - L8 A1-style references inside tables where structured ones would do
//! - L9 circular references
//! - L10 references that do not resolve

use std::collections::BTreeSet;

use serde::Serialize;

use crate::formula::{parse_formula, Expr};
use crate::labeling::{co_visible, off_vicinity_label};
use crate::scorer::resolve::cell_area;
use crate::scorer::{ItemKind, ModelScore, OpaqueReason, PerCellScore, ScoreItem, Scorer};
use crate::workbook::address::{AreaRef, CellAddress};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Error,
    Warn,
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub rule: &'static str,
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellAddress>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    pub message: String,
    pub recommendation: &'static str,
}

fn recommendation(rule: &str) -> &'static str {
    match rule {
        "L1" => "Use appropriately named references instead of literals in formulas.",
        "L2" => "Seek alternatives to indirect references; constrain selectors or use named areas.",
        "L3" => "Fix cells reporting errors that are not appropriately handled.",
        "L4" => "Keep content an inspector needs visible; avoid hidden and sealed sheets.",
        "L5" => "Reference remote cells directly instead of daisy-chaining through local copies.",
        "L6" => "Label every value with a subject and its unit, format, or question.",
        "L7" => "Use freeze panes to keep row and column labels visible while scrolling.",
        "L8" => "Use structured references when practical inside tables.",
        "L9" => "Break circular references; they make every participant inscrutable.",
        _ => "Fix references to locations that do not exist.",
    }
}

fn rule_for_reason(reason: &OpaqueReason) -> &'static str {
    match reason {
        OpaqueReason::BareLiteral { .. } | OpaqueReason::InsufficientParameterLabel { .. } => "L1",
        OpaqueReason::UnconstrainedIndirect { .. } => "L2",
        OpaqueReason::UnhandledError { .. } => "L3",
        OpaqueReason::VeryHiddenSheet { .. } | OpaqueReason::ProtectedSheet { .. } => "L4",
        OpaqueReason::InsufficientLabels { .. } => "L6",
        OpaqueReason::CircularReference { .. } => "L9",
        OpaqueReason::UnresolvedReference { .. }
        | OpaqueReason::UnparseableFormula { .. }
        | OpaqueReason::OpaqueSource { .. } => "L10",
    }
}

/// Lints one scored model. Findings come out in model order (cells first,
/// each cell's issues in breakdown order), deduplicated exactly.
pub fn lint(scorer: &Scorer<'_>, model: &ModelScore) -> Vec<Finding> {
    let mut out: Vec<Finding> = Vec::new();
    let mut seen: BTreeSet<(String, String, String)> = BTreeSet::new();

    let mut push = |out: &mut Vec<Finding>, f: Finding| {
        let key = (
            f.rule.to_string(),
            f.cell.as_ref().map(|c| c.to_string()).unwrap_or_default(),
            f.message.clone(),
        );
        if seen.insert(key) {
            out.push(f);
        }
    };

    for cell in &model.cells {
        for item in &cell.items {
            match item.kind {
                ItemKind::Opacity => {
                    if let Some(f) = opacity_finding(scorer, cell, item) {
                        push(&mut out, f);
                    }
                }
                ItemKind::FunctionHelp => {
                    push(
                        &mut out,
                        Finding {
                            rule: "L1",
                            severity: Severity::Warn,
                            cell: Some(cell.cell.clone()),
                            table: None,
                            message: format!(
                                "an in-formula literal is only labeled in function help ({})",
                                item.description
                            ),
                            recommendation: recommendation("L1"),
                        },
                    );
                }
                ItemKind::Reveal => {
                    push(
                        &mut out,
                        Finding {
                            rule: "L4",
                            severity: Severity::Warn,
                            cell: Some(cell.cell.clone()),
                            table: None,
                            message: format!("hidden content costs reveal steps: {}", item.description),
                            recommendation: recommendation("L4"),
                        },
                    );
                }
                _ => {}
            }
        }

        if let Some(f) = daisy_chain_finding(scorer, &cell.cell) {
            push(&mut out, f);
        }
        if let Some(f) = freeze_pane_finding(scorer, cell) {
            push(&mut out, f);
        }
        if let Some(f) = structured_opportunity_finding(scorer, &cell.cell) {
            push(&mut out, f);
        }
    }

    out
}

fn opacity_finding(scorer: &Scorer<'_>, cell: &PerCellScore, item: &ScoreItem) -> Option<Finding> {
    let reason = item.reason.as_ref()?;
    if let OpaqueReason::OpaqueSource { cell: target } = reason {
        // Charge the finding under the root cause at the referencing cell.
        let root = scorer
            .surface_items(target)
            .into_iter()
            .find_map(|i| i.reason);
        let rule = root.as_ref().map(rule_for_reason).unwrap_or("L10");
        return Some(Finding {
            rule,
            severity: Severity::Error,
            cell: Some(cell.cell.clone()),
            table: None,
            message: item.description.clone(),
            recommendation: recommendation(rule),
        });
    }
    let rule = rule_for_reason(reason);
    Some(Finding {
        rule,
        severity: Severity::Error,
        cell: Some(cell.cell.clone()),
        table: None,
        message: item.description.clone(),
        recommendation: recommendation(rule),
    })
}

/// A formula that is exactly one bare reference to a cell out of sight: the
/// value has been daisy-chained instead of referenced where it is used.
fn daisy_chain_finding(scorer: &Scorer<'_>, addr: &CellAddress) -> Option<Finding> {
    let wb = scorer.workbook();
    let formula = wb.cell(addr)?.formula.as_ref()?;
    let ast = parse_formula(formula).ok()?;
    let mut node = &ast.root;
    while let Expr::Paren { inner } = node {
        node = inner;
    }
    let Expr::CellRef { cell, .. } = node else { return None };
    let area = cell_area(wb, &addr.sheet, cell).ok()?;
    let target = area.top_left();
    let remote = target.sheet.to_lowercase() != addr.sheet.to_lowercase()
        || !co_visible(wb, &[addr.clone(), target.clone()], &scorer.config().vicinity);
    if !remote {
        return None;
    }
    Some(Finding {
        rule: "L5",
        severity: Severity::Warn,
        cell: Some(addr.clone()),
        table: None,
        message: format!("formula only forwards the remote cell {target}"),
        recommendation: recommendation("L5"),
    })
}

/// An insufficiently labeled cell whose label exists straight left or up but
/// off screen: freezing panes would supply it everywhere.
fn freeze_pane_finding(scorer: &Scorer<'_>, cell: &PerCellScore) -> Option<Finding> {
    let lacks_labels = cell.items.iter().any(|i| {
        matches!(i.reason, Some(OpaqueReason::InsufficientLabels { .. }))
            && i.cell.as_ref() == Some(&cell.cell)
    });
    if !lacks_labels {
        return None;
    }
    let label = off_vicinity_label(
        scorer.workbook(),
        &cell.cell,
        &scorer.config().vicinity,
        scorer.lexicon(),
    )?;
    Some(Finding {
        rule: "L7",
        severity: Severity::Warn,
        cell: Some(cell.cell.clone()),
        table: None,
        message: format!("the label at {label} scrolls out of view before this cell is reached"),
        recommendation: recommendation("L7"),
    })
}

/// An A1-style reference into a table, written inside that table's own data
/// area, where a structured reference would carry its labels along.
fn structured_opportunity_finding(scorer: &Scorer<'_>, addr: &CellAddress) -> Option<Finding> {
    let wb = scorer.workbook();
    let table = wb.table_at(addr)?;
    if !table.data_area().contains(addr) {
        return None;
    }
    let formula = wb.cell(addr)?.formula.as_ref()?;
    let ast = parse_formula(formula).ok()?;
    for op in crate::formula::operands(&ast) {
        let area = match op.expr {
            Expr::CellRef { cell, .. } => cell_area(wb, &addr.sheet, cell).ok(),
            Expr::RangeRef { range, .. } => {
                crate::scorer::resolve::range_area(wb, &addr.sheet, range).ok()
            }
            _ => None,
        };
        let Some(area) = area else { continue };
        if areas_intersect(&area, &table.area) {
            return Some(Finding {
                rule: "L8",
                severity: Severity::Info,
                cell: Some(addr.clone()),
                table: Some(table.name.clone()),
                message: format!(
                    "in-table formula references {area} by address instead of by column name"
                ),
                recommendation: recommendation("L8"),
            });
        }
    }
    None
}

fn areas_intersect(a: &AreaRef, b: &AreaRef) -> bool {
    a.sheet.to_lowercase() == b.sheet.to_lowercase()
        && a.row1 <= b.row2
        && b.row1 <= a.row2
        && a.col1 <= b.col2
        && b.col1 <= a.col2
}
