//! Resolves formula reference operands to concrete workbook areas, and runs
//! the static constraint analysis for indirect-class function calls.

use std::collections::BTreeSet;
use std::fmt;

use crate::catalog::FunctionCatalog;
use crate::formula::{
    parse_formula, CellRef, Expr, LitValue, RangeRef, SheetRef, Span, StructuredRef, TableRegion,
    UnOp, INDIRECT_FUNCTIONS,
};
use crate::workbook::address::{parse_a1, MAX_COL, MAX_ROW};
use crate::workbook::{AreaRef, CellAddress, NameTarget, TableModel, WorkbookModel};

/// Why a reference operand has no concrete target cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefIssue {
    ExternalBook(String),
    UnknownSheet(String),
    UnknownName(String),
    UnknownTable(String),
    UnknownColumn { table: String, column: String },
    OutsideTable,
    NoTotalsRow(String),
}

impl fmt::Display for RefIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefIssue::ExternalBook(b) => write!(f, "external workbook [{b}]"),
            RefIssue::UnknownSheet(s) => write!(f, "unknown sheet {s}"),
            RefIssue::UnknownName(n) => write!(f, "unknown defined name {n}"),
            RefIssue::UnknownTable(t) => write!(f, "unknown table {t}"),
            RefIssue::UnknownColumn { table, column } => {
                write!(f, "table {table} has no column {column}")
            }
            RefIssue::OutsideTable => write!(f, "row-relative reference outside any table"),
            RefIssue::NoTotalsRow(t) => write!(f, "table {t} has no totals row"),
        }
    }
}

fn qualifier_sheet(
    wb: &WorkbookModel,
    host_sheet: &str,
    s: &Option<SheetRef>,
) -> Result<String, RefIssue> {
    let name = match s {
        None => host_sheet,
        Some(SheetRef { book: Some(b), .. }) => return Err(RefIssue::ExternalBook(b.clone())),
        Some(SheetRef { book: None, name }) => name,
    };
    match wb.sheet(name) {
        Some(sheet) => Ok(sheet.name.clone()),
        None => Err(RefIssue::UnknownSheet(name.to_string())),
    }
}

pub fn cell_area(wb: &WorkbookModel, host_sheet: &str, c: &CellRef) -> Result<AreaRef, RefIssue> {
    let sheet = qualifier_sheet(wb, host_sheet, &c.sheet)?;
    Ok(AreaRef::new(sheet, c.row, c.col, c.row, c.col))
}

pub fn range_area(wb: &WorkbookModel, host_sheet: &str, r: &RangeRef) -> Result<AreaRef, RefIssue> {
    let sheet = qualifier_sheet(wb, host_sheet, &r.sheet)?;
    let row1 = r.start.row.unwrap_or(1);
    let row2 = r.end.row.unwrap_or(MAX_ROW);
    let col1 = r.start.col.unwrap_or(1);
    let col2 = r.end.col.unwrap_or(MAX_COL);
    Ok(AreaRef::new(sheet, row1, col1, row2, col2))
}

/// What a defined-name operand stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedKind {
    /// The name points at cells.
    Areas(Vec<AreaRef>),
    /// The value lives in the name's definition, not in any cell.
    Constant,
    /// Expression-valued name; the areas are its resolvable reference leaves.
    Expression(Vec<AreaRef>),
}

pub fn resolve_name(
    wb: &WorkbookModel,
    host_sheet: &str,
    qualifier: &Option<SheetRef>,
    name: &str,
) -> Result<NamedKind, RefIssue> {
    if let Some(SheetRef { book: Some(b), .. }) = qualifier {
        return Err(RefIssue::ExternalBook(b.clone()));
    }
    let scope = qualifier.as_ref().map(|s| s.name.as_str()).unwrap_or(host_sheet);
    let Some(dn) = wb.defined_name(name, scope) else {
        return Err(RefIssue::UnknownName(name.to_string()));
    };
    match &dn.target {
        NameTarget::Area(a) => {
            if wb.sheet(&a.sheet).is_none() {
                return Err(RefIssue::UnknownSheet(a.sheet.clone()));
            }
            Ok(NamedKind::Areas(vec![a.clone()]))
        }
        NameTarget::Constant(_) => Ok(NamedKind::Constant),
        NameTarget::Formula(text) => {
            let mut areas = Vec::new();
            let mut visited = BTreeSet::new();
            visited.insert(dn.name.to_ascii_uppercase());
            expression_areas(wb, host_sheet, text, &mut areas, &mut visited, 0);
            Ok(NamedKind::Expression(areas))
        }
    }
}

/// Collects the reference leaves of a refers-to expression. Leaves that do
/// not resolve are skipped: the scorer still prices the definition lookup,
/// and linting reports what it cannot follow.
fn expression_areas(
    wb: &WorkbookModel,
    host_sheet: &str,
    text: &str,
    out: &mut Vec<AreaRef>,
    visited: &mut BTreeSet<String>,
    depth: u32,
) {
    if depth > 4 {
        return;
    }
    let Ok(ast) = parse_formula(&format!("={text}")) else { return };
    let mut stack = vec![&ast.root];
    while let Some(e) = stack.pop() {
        match e {
            Expr::CellRef { cell, .. } => {
                if let Ok(a) = cell_area(wb, host_sheet, cell) {
                    out.push(a);
                }
            }
            Expr::RangeRef { range, .. } => {
                if let Ok(a) = range_area(wb, host_sheet, range) {
                    out.push(a);
                }
            }
            Expr::NamedRef { sheet, name, .. } => {
                if !visited.insert(name.to_ascii_uppercase()) {
                    continue;
                }
                let scope = sheet.as_ref().map(|s| s.name.as_str()).unwrap_or(host_sheet);
                if let Some(dn) = wb.defined_name(name, scope) {
                    match &dn.target {
                        NameTarget::Area(a) => out.push(a.clone()),
                        NameTarget::Constant(_) => {}
                        NameTarget::Formula(t) => {
                            expression_areas(wb, host_sheet, t, out, visited, depth + 1)
                        }
                    }
                }
            }
            Expr::StructuredRef { sref, .. } => {
                // No host cell inside a name definition; only table-qualified
                // forms can resolve.
                if sref.table.is_some() {
                    let ghost = CellAddress::new(host_sheet, 1, 1);
                    if let Ok(st) = structured_target(wb, &ghost, sref) {
                        out.extend(st.areas);
                    }
                }
            }
            Expr::FuncCall { args, .. } => stack.extend(args.iter()),
            Expr::BinaryOp { lhs, rhs, .. } => {
                stack.push(lhs);
                stack.push(rhs);
            }
            Expr::UnaryOp { operand, .. } | Expr::PercentOp { operand } => stack.push(operand),
            Expr::Paren { inner } => stack.push(inner),
            Expr::Literal { .. } => {}
        }
    }
}

/// A structured reference resolved to cells plus its labeling cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredTarget {
    pub table: String,
    pub areas: Vec<AreaRef>,
    /// Header (and unit-row) cells for the referenced columns.
    pub label_cells: Vec<CellAddress>,
}

pub fn structured_target(
    wb: &WorkbookModel,
    host: &CellAddress,
    sref: &StructuredRef,
) -> Result<StructuredTarget, RefIssue> {
    let table: &TableModel = match &sref.table {
        Some(name) => wb.table(name).ok_or_else(|| RefIssue::UnknownTable(name.clone()))?,
        None => wb.table_at(host).ok_or(RefIssue::OutsideTable)?,
    };
    let (col1, col2) = match &sref.column {
        Some(col) => {
            let c = table.column_index(col).ok_or_else(|| RefIssue::UnknownColumn {
                table: table.name.clone(),
                column: col.clone(),
            })?;
            (c, c)
        }
        None => (table.area.col1, table.area.col2),
    };
    let sheet = table.area.sheet.clone();
    let data = table.data_area();
    let area = match sref.region {
        TableRegion::Data => AreaRef::new(sheet, data.row1, col1, data.row2, col2),
        TableRegion::ThisRow => {
            let inside = host.sheet.eq_ignore_ascii_case(&data.sheet)
                && (data.row1..=data.row2).contains(&host.row);
            if !inside {
                return Err(RefIssue::OutsideTable);
            }
            AreaRef::new(sheet, host.row, col1, host.row, col2)
        }
        TableRegion::Headers => {
            let h = table.header_row_index();
            AreaRef::new(sheet, h, col1, h, col2)
        }
        TableRegion::Totals => {
            if table.totals_rows == 0 {
                return Err(RefIssue::NoTotalsRow(table.name.clone()));
            }
            let row1 = table.area.row2 - table.totals_rows + 1;
            AreaRef::new(sheet, row1, col1, table.area.row2, col2)
        }
        TableRegion::All => AreaRef::new(sheet, table.area.row1, col1, table.area.row2, col2),
    };
    let mut label_cells = Vec::new();
    for c in col1..=col2 {
        label_cells.push(CellAddress::new(&table.area.sheet, table.header_row_index(), c));
        if let Some(u) = table.uom_row {
            label_cells.push(CellAddress::new(&table.area.sheet, u, c));
        }
    }
    Ok(StructuredTarget { table: table.name.clone(), areas: vec![area], label_cells })
}

/// Occupied addresses inside an area, in row-major order.
pub fn occupied_in_area(wb: &WorkbookModel, area: &AreaRef) -> Vec<CellAddress> {
    let Some(sheet) = wb.sheet(&area.sheet) else { return Vec::new() };
    sheet
        .cells
        .range((area.row1, 0)..=(area.row2, u32::MAX))
        .filter(|((_, c), cell)| *c >= area.col1 && *c <= area.col2 && cell.is_occupied())
        .map(|((r, c), _)| CellAddress::new(&sheet.name, *r, *c))
        .collect()
}

fn is_indirect_call(name: &str, catalog: &FunctionCatalog) -> bool {
    catalog.is_indirect_class(name) || INDIRECT_FUNCTIONS.contains(&name)
}

/// One candidate target area of a constrained indirect-class call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub area: AreaRef,
    /// False when the area is already a reference leaf of the formula and so
    /// is priced by the ordinary operand rules.
    pub computed: bool,
    pub derivation: String,
}

/// Verdict for one indirect-class call: `None` = evidence incomplete.
#[derive(Debug, Clone)]
pub struct IndirectOutcome {
    pub name: String,
    pub span: Span,
    pub candidates: Option<Vec<Candidate>>,
}

/// Analyzes every indirect-class call in the formula, outermost first.
/// Calls consumed while deriving an enclosing call's constraint (the range
/// argument chain) are not reported separately.
pub fn analyze_indirect(
    wb: &WorkbookModel,
    host: &CellAddress,
    root: &Expr,
    catalog: &FunctionCatalog,
) -> Vec<IndirectOutcome> {
    let mut out = Vec::new();
    let mut consumed: BTreeSet<(usize, usize)> = BTreeSet::new();
    walk_indirect(wb, host, root, catalog, &mut out, &mut consumed);
    out
}

fn walk_indirect(
    wb: &WorkbookModel,
    host: &CellAddress,
    expr: &Expr,
    catalog: &FunctionCatalog,
    out: &mut Vec<IndirectOutcome>,
    consumed: &mut BTreeSet<(usize, usize)>,
) {
    if let Expr::FuncCall { name, span, .. } = expr {
        if is_indirect_call(name, catalog) && !consumed.contains(&(span.start, span.end)) {
            let mut used = Vec::new();
            let candidates = constrained_areas(wb, host, expr, catalog, &mut used);
            if candidates.is_some() {
                consumed.extend(used.iter().map(|s| (s.start, s.end)));
            }
            out.push(IndirectOutcome { name: name.clone(), span: *span, candidates });
        }
    }
    match expr {
        Expr::FuncCall { args, .. } => {
            for a in args {
                walk_indirect(wb, host, a, catalog, out, consumed);
            }
        }
        Expr::BinaryOp { lhs, rhs, .. } => {
            walk_indirect(wb, host, lhs, catalog, out, consumed);
            walk_indirect(wb, host, rhs, catalog, out, consumed);
        }
        Expr::UnaryOp { operand, .. } | Expr::PercentOp { operand } => {
            walk_indirect(wb, host, operand, catalog, out, consumed)
        }
        Expr::Paren { inner } => walk_indirect(wb, host, inner, catalog, out, consumed),
        _ => {}
    }
}

/// Candidate target areas when the call's constraint evidence is complete.
fn constrained_areas(
    wb: &WorkbookModel,
    host: &CellAddress,
    call: &Expr,
    catalog: &FunctionCatalog,
    used: &mut Vec<Span>,
) -> Option<Vec<Candidate>> {
    let Expr::FuncCall { name, args, .. } = call else { return None };
    match name.as_str() {
        "VLOOKUP" | "HLOOKUP" => range_position(wb, host, args.get(1)?, catalog, used),
        "INDEX" => range_position(wb, host, args.first()?, catalog, used),
        "LOOKUP" => {
            let mut cands = range_position(wb, host, args.get(1)?, catalog, used)?;
            if let Some(result_vector) = args.get(2) {
                if !matches!(result_vector, Expr::Literal { value: LitValue::Missing, .. }) {
                    cands.extend(range_position(wb, host, result_vector, catalog, used)?);
                }
            }
            Some(cands)
        }
        "XLOOKUP" => {
            let mut cands = range_position(wb, host, args.get(1)?, catalog, used)?;
            cands.extend(range_position(wb, host, args.get(2)?, catalog, used)?);
            Some(cands)
        }
        "OFFSET" => offset_candidates(wb, host, args, catalog, used),
        "INDIRECT" => indirect_candidates(wb, host, args, catalog, used),
        _ => None,
    }
}

/// Resolves a range-position argument: a reference leaf, or a nested
/// constrained indirect-class call.
fn range_position(
    wb: &WorkbookModel,
    host: &CellAddress,
    arg: &Expr,
    catalog: &FunctionCatalog,
    used: &mut Vec<Span>,
) -> Option<Vec<Candidate>> {
    let leaf = |area: AreaRef| {
        Some(vec![Candidate { area, computed: false, derivation: String::new() }])
    };
    match unwrap_parens(arg) {
        Expr::CellRef { cell, .. } => leaf(cell_area(wb, &host.sheet, cell).ok()?),
        Expr::RangeRef { range, .. } => leaf(range_area(wb, &host.sheet, range).ok()?),
        Expr::StructuredRef { sref, .. } => {
            let st = structured_target(wb, host, sref).ok()?;
            Some(
                st.areas
                    .into_iter()
                    .map(|area| Candidate { area, computed: false, derivation: String::new() })
                    .collect(),
            )
        }
        Expr::NamedRef { sheet, name, .. } => {
            match resolve_name(wb, &host.sheet, sheet, name).ok()? {
                NamedKind::Areas(areas) => Some(
                    areas
                        .into_iter()
                        .map(|area| Candidate { area, computed: false, derivation: String::new() })
                        .collect(),
                ),
                _ => None,
            }
        }
        call @ Expr::FuncCall { name, span, .. } if is_indirect_call(name, catalog) => {
            let cands = constrained_areas(wb, host, call, catalog, used)?;
            used.push(*span);
            Some(cands)
        }
        _ => None,
    }
}

fn literal_number(e: &Expr) -> Option<f64> {
    match unwrap_parens(e) {
        Expr::Literal { value: LitValue::Number(n), .. } => Some(*n),
        Expr::UnaryOp { op, operand } => {
            let n = literal_number(operand)?;
            Some(if *op == UnOp::Neg { -n } else { n })
        }
        _ => None,
    }
}

/// OFFSET is constrained when the anchor resolves and every offset and size
/// argument is a literal: the target is then one computable rectangle.
fn offset_candidates(
    wb: &WorkbookModel,
    host: &CellAddress,
    args: &[Expr],
    catalog: &FunctionCatalog,
    used: &mut Vec<Span>,
) -> Option<Vec<Candidate>> {
    let anchors = range_position(wb, host, args.first()?, catalog, used)?;
    let rows = literal_number(args.get(1)?)? as i64;
    let cols = literal_number(args.get(2)?)? as i64;
    let size = |idx: usize| -> Option<Option<i64>> {
        match args.get(idx) {
            None | Some(Expr::Literal { value: LitValue::Missing, .. }) => Some(None),
            Some(e) => literal_number(e).map(|n| Some(n as i64)),
        }
    };
    let height = size(3)?;
    let width = size(4)?;
    let mut out = Vec::new();
    for anchor in anchors {
        let base = &anchor.area;
        let h = height.unwrap_or(i64::from(base.height()));
        let w = width.unwrap_or(i64::from(base.width()));
        if h < 1 || w < 1 {
            return None;
        }
        let row1 = i64::from(base.row1) + rows;
        let col1 = i64::from(base.col1) + cols;
        let row2 = row1 + h - 1;
        let col2 = col1 + w - 1;
        if row1 < 1 || col1 < 1 || row2 > i64::from(MAX_ROW) || col2 > i64::from(MAX_COL) {
            return None;
        }
        out.push(Candidate {
            area: AreaRef::new(
                base.sheet.clone(),
                row1 as u32,
                col1 as u32,
                row2 as u32,
                col2 as u32,
            ),
            computed: true,
            derivation: format!("OFFSET from {base}"),
        });
    }
    Some(out)
}

/// INDIRECT is constrained when its text argument is enumerable: a literal,
/// a validation-list input cell, or a computed single cell whose stored text
/// names an area.
fn indirect_candidates(
    wb: &WorkbookModel,
    host: &CellAddress,
    args: &[Expr],
    catalog: &FunctionCatalog,
    used: &mut Vec<Span>,
) -> Option<Vec<Candidate>> {
    match unwrap_parens(args.first()?) {
        Expr::Literal { value: LitValue::Text(t), .. } => {
            let area = reference_text_area(wb, &host.sheet, t)?;
            Some(vec![Candidate {
                area,
                computed: true,
                derivation: format!("INDIRECT(\"{t}\")"),
            }])
        }
        Expr::CellRef { cell, .. } => {
            let sel = cell_area(wb, &host.sheet, cell).ok()?.top_left();
            selector_candidates(wb, &sel)
        }
        Expr::NamedRef { sheet, name, .. } => {
            match resolve_name(wb, &host.sheet, sheet, name).ok()? {
                NamedKind::Areas(areas) if areas.len() == 1 => {
                    let sel = areas[0].as_single_cell()?;
                    selector_candidates(wb, &sel)
                }
                _ => None,
            }
        }
        call @ Expr::FuncCall { name, span, .. } if is_indirect_call(name, catalog) => {
            let inner = constrained_areas(wb, host, call, catalog, used)?;
            let mut out = Vec::new();
            for cand in &inner {
                let sel = cand.area.as_single_cell()?;
                let text = wb.cell(&sel)?.value.display_text();
                let area = reference_text_area(wb, &host.sheet, &text)?;
                out.push(Candidate {
                    area,
                    computed: true,
                    derivation: format!("INDIRECT of \"{text}\" read from {sel}"),
                });
            }
            used.push(*span);
            Some(out)
        }
        _ => None,
    }
}

/// Candidate areas for a selector cell: each validation-list option must name
/// an area for the constraint to be complete.
fn selector_candidates(wb: &WorkbookModel, sel: &CellAddress) -> Option<Vec<Candidate>> {
    let list = wb.cell(sel)?.validation_list.as_ref()?;
    if list.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    for option in list {
        let area = reference_text_area(wb, &sel.sheet, option)?;
        out.push(Candidate {
            area,
            computed: true,
            derivation: format!("validation option \"{option}\" on {sel}"),
        });
    }
    Some(out)
}

/// Resolves reference text the way INDIRECT would: a defined name, a table
/// name (its data region), or area text, defaulting to the host sheet.
pub fn reference_text_area(wb: &WorkbookModel, host_sheet: &str, t: &str) -> Option<AreaRef> {
    let t = t.trim();
    if t.is_empty() {
        return None;
    }
    if let Some(dn) = wb.defined_name(t, host_sheet) {
        return match &dn.target {
            NameTarget::Area(a) => wb.sheet(&a.sheet).map(|_| a.clone()),
            _ => None,
        };
    }
    if let Some(table) = wb.table(t) {
        return Some(table.data_area());
    }
    let area = if t.contains('!') {
        AreaRef::parse(t)?
    } else {
        match t.split_once(':') {
            Some((a, b)) => {
                let (c1, r1) = parse_a1(a)?;
                let (c2, r2) = parse_a1(b)?;
                AreaRef::new(host_sheet, r1, c1, r2, c2)
            }
            None => {
                let (c, r) = parse_a1(t)?;
                AreaRef::new(host_sheet, r, c, r, c)
            }
        }
    };
    wb.sheet(&area.sheet).map(|_| area)
}

fn unwrap_parens(expr: &Expr) -> &Expr {
    match expr {
        Expr::Paren { inner } => unwrap_parens(inner),
        other => other,
    }
}
