//! Value-type classification, label discovery, and co-visibility.
//!
//! Every occupied cell gets exactly one [`ValueType`]. For value cells,
//! [`resolve_labels`] hunts for labeling parts (subject, unit, format,
//! question) in the cell's surroundings: table headers and unit rows,
//! nearby label text, defined names, the cell's own number format, then
//! priced channels (comments, validation messages, documentation pages).
//! [`sufficiency`] grades the result against the requirements of the
//! cell's value type.

pub mod lexicon;
pub mod numfmt;

use std::collections::BTreeSet;

use serde::Serialize;

pub use lexicon::LexiconSet;

use crate::workbook::{CellAddress, CellValue, Sheet, TableModel, WorkbookModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueType {
    Quantity,
    DateTimeDuration,
    Flag,
    Identity,
    Attribute,
    LabelText,
    Error,
    Empty,
}

impl ValueType {
    pub fn is_value(self) -> bool {
        !matches!(self, ValueType::LabelText | ValueType::Empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartKind {
    /// Subject / type-kind: what the value is about.
    Subject,
    Unit,
    Format,
    Question,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "at")]
pub enum PartLocation {
    SameCellFormat,
    VicinityCell(CellAddress),
    Comment,
    ValidationMessage,
    DefinedName,
    DocumentationCell(CellAddress),
    FunctionTooltip,
    FunctionHelp,
}

impl PartLocation {
    /// Access actions separating the inspector from this label.
    pub fn minimum_steps(&self) -> u32 {
        match self {
            PartLocation::SameCellFormat
            | PartLocation::VicinityCell(_)
            | PartLocation::DefinedName
            | PartLocation::FunctionTooltip => 0,
            PartLocation::Comment
            | PartLocation::ValidationMessage
            | PartLocation::DocumentationCell(_)
            | PartLocation::FunctionHelp => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelPart {
    pub kind: PartKind,
    pub text: String,
    pub location: PartLocation,
    pub steps: u32,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LabelResolution {
    pub parts: Vec<LabelPart>,
    pub missing: BTreeSet<PartKind>,
}

impl LabelResolution {
    pub fn has_kind(&self, kind: PartKind) -> bool {
        self.parts.iter().any(|p| p.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VicinityConfig {
    pub rows_visible: u32,
    pub cols_visible: u32,
    pub honor_frozen_panes: bool,
}

impl Default for VicinityConfig {
    fn default() -> Self {
        VicinityConfig { rows_visible: 40, cols_visible: 20, honor_frozen_panes: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sufficiency {
    Sufficient,
    Insufficient(BTreeSet<PartKind>),
}

/// Label parts a value type requires to stand on its own.
pub fn required_parts(vt: ValueType) -> &'static [PartKind] {
    match vt {
        ValueType::Quantity => &[PartKind::Subject, PartKind::Unit],
        ValueType::DateTimeDuration => &[PartKind::Subject, PartKind::Format],
        ValueType::Flag => &[PartKind::Question],
        ValueType::Identity | ValueType::Attribute => &[PartKind::Subject],
        // Errors are never label-sufficient; the scorer owns that case.
        ValueType::Error | ValueType::LabelText | ValueType::Empty => &[],
    }
}

pub fn sufficiency(vt: ValueType, res: &LabelResolution) -> Sufficiency {
    if vt == ValueType::Error {
        return Sufficiency::Insufficient(BTreeSet::new());
    }
    let missing: BTreeSet<PartKind> = required_parts(vt)
        .iter()
        .copied()
        .filter(|k| !res.has_kind(*k))
        .collect();
    if missing.is_empty() {
        Sufficiency::Sufficient
    } else {
        Sufficiency::Insufficient(missing)
    }
}

/// True when the given cells can be on screen together: same sheet, and the
/// bounding box of the non-frozen members fits in the configured window.
/// Cells in frozen rows/columns are pinned on screen and drop out of the box.
pub fn co_visible(wb: &WorkbookModel, cells: &[CellAddress], cfg: &VicinityConfig) -> bool {
    let mut iter = cells.iter();
    let Some(first) = iter.next() else { return true };
    if iter.any(|c| c.sheet != first.sheet) {
        return false;
    }
    let Some(sheet) = wb.sheet(&first.sheet) else { return false };

    let mut bbox: Option<(u32, u32, u32, u32)> = None;
    for c in cells {
        if cfg.honor_frozen_panes && is_frozen(sheet, c.row, c.col) {
            continue;
        }
        bbox = Some(match bbox {
            None => (c.row, c.col, c.row, c.col),
            Some((r1, c1, r2, c2)) => {
                (r1.min(c.row), c1.min(c.col), r2.max(c.row), c2.max(c.col))
            }
        });
    }
    match bbox {
        None => true,
        Some((r1, c1, r2, c2)) => {
            r2 - r1 + 1 <= cfg.rows_visible && c2 - c1 + 1 <= cfg.cols_visible
        }
    }
}

fn is_frozen(sheet: &Sheet, row: u32, col: u32) -> bool {
    row <= sheet.frozen_rows || col <= sheet.frozen_cols
}

/// Classifies the value stored at `addr`.
pub fn classify_value_type(wb: &WorkbookModel, addr: &CellAddress, lex: &LexiconSet) -> ValueType {
    let Some(sheet) = wb.sheet(&addr.sheet) else { return ValueType::Empty };
    let Some(cell) = sheet.cell(addr.row, addr.col) else { return ValueType::Empty };
    if !cell.is_occupied() {
        return ValueType::Empty;
    }

    match &cell.value {
        CellValue::Error(_) => return ValueType::Error,
        CellValue::Bool(_) => return ValueType::Flag,
        CellValue::Text(t) => {
            let trimmed = t.trim();
            if ["true", "false", "yes", "no"].contains(&trimmed.to_ascii_lowercase().as_str()) {
                return ValueType::Flag;
            }
            return classify_text(wb, sheet, addr, trimmed, lex);
        }
        CellValue::Number(n) => {
            if (*n == 0.0 || *n == 1.0) && numfmt::flag_shaped_format(&cell.number_format) {
                return ValueType::Flag;
            }
            if numfmt::has_date_tokens(&cell.number_format) {
                return ValueType::DateTimeDuration;
            }
            return classify_numeric(wb, sheet, addr, lex);
        }
        CellValue::Empty => {}
    }

    // Occupied with no cached value: a formula whose result was not stored.
    // Formulas overwhelmingly produce numbers; classify like one.
    if numfmt::has_date_tokens(&cell.number_format) {
        ValueType::DateTimeDuration
    } else {
        classify_numeric(wb, sheet, addr, lex)
    }
}

fn classify_numeric(
    wb: &WorkbookModel,
    sheet: &Sheet,
    addr: &CellAddress,
    lex: &LexiconSet,
) -> ValueType {
    if let Some(header) = column_header_text(wb, sheet, addr) {
        if lex.is_identity_header(&header) {
            return ValueType::Identity;
        }
    }
    ValueType::Quantity
}

fn classify_text(
    wb: &WorkbookModel,
    sheet: &Sheet,
    addr: &CellAddress,
    text: &str,
    lex: &LexiconSet,
) -> ValueType {
    if table_header_or_uom_cell(wb, addr).is_some() {
        return ValueType::LabelText;
    }
    if let Some(table) = table_data_membership(wb, addr) {
        // Inside a table body, text is data, never a label.
        if is_code_like(text) {
            return ValueType::Identity;
        }
        if let Some(name) = table_column_name(table, addr.col) {
            if lex.is_identity_header(&name) {
                return ValueType::Identity;
            }
        }
        return ValueType::Attribute;
    }
    if is_code_like(text) {
        return ValueType::Identity;
    }
    if let Some(header) = column_header_text(wb, sheet, addr) {
        if lex.is_identity_header(&header) {
            return ValueType::Identity;
        }
    }
    if lex.is_unit(text) || numfmt::format_shaped_text(text) || text.ends_with(':') {
        return ValueType::LabelText;
    }
    let right_occupied = sheet
        .cell(addr.row, addr.col + 1)
        .map(|c| c.is_occupied())
        .unwrap_or(false);
    // A column header may sit well above its data, so look down the whole
    // column rather than only at the adjacent cell.
    let below_occupied = sheet
        .cells
        .range((addr.row + 1, 0)..)
        .any(|((_, c), cell)| *c == addr.col && cell.is_occupied());
    if right_occupied || below_occupied {
        return ValueType::LabelText;
    }
    ValueType::Attribute
}

/// Code-shaped text: one token mixing digits with letters or separators,
/// or digits with a leading zero. "A-1001" and "00423" qualify; "1001"
/// alone does not (it needs an identity header to be read as an id).
fn is_code_like(text: &str) -> bool {
    let t = text.trim();
    if t.len() < 2 || t.len() > 24 || t.contains(char::is_whitespace) {
        return false;
    }
    if !t.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '/' | '.')) {
        return false;
    }
    let has_digit = t.chars().any(|c| c.is_ascii_digit());
    let has_letter = t.chars().any(|c| c.is_ascii_alphabetic());
    let has_separator = t.chars().any(|c| matches!(c, '-' | '_' | '/'));
    has_digit && (has_letter || has_separator || t.starts_with('0'))
}

pub fn is_label_cell(wb: &WorkbookModel, addr: &CellAddress, lex: &LexiconSet) -> bool {
    classify_value_type(wb, addr, lex) == ValueType::LabelText
}

/// The table whose header or unit row contains `addr`, if any.
fn table_header_or_uom_cell<'a>(
    wb: &'a WorkbookModel,
    addr: &CellAddress,
) -> Option<&'a TableModel> {
    wb.tables.iter().find(|t| {
        t.area.sheet.eq_ignore_ascii_case(&addr.sheet)
            && addr.col >= t.area.col1
            && addr.col <= t.area.col2
            && (addr.row == t.header_row_index() || t.uom_row == Some(addr.row))
    })
}

/// The table whose body (data rows, totals included) contains `addr`.
fn table_data_membership<'a>(
    wb: &'a WorkbookModel,
    addr: &CellAddress,
) -> Option<&'a TableModel> {
    wb.tables.iter().find(|t| {
        t.area.sheet.eq_ignore_ascii_case(&addr.sheet)
            && addr.col >= t.area.col1
            && addr.col <= t.area.col2
            && addr.row > t.header_row_index()
            && addr.row <= t.area.row2
    })
}

fn table_column_name(table: &TableModel, col: u32) -> Option<String> {
    let idx = col.checked_sub(table.area.col1)? as usize;
    table.header_row.get(idx).cloned()
}

/// Header text governing `addr`'s column: the table column name when the
/// cell is table data, else the nearest text cell straight up (within the
/// default window or the frozen rows).
fn column_header_text(wb: &WorkbookModel, sheet: &Sheet, addr: &CellAddress) -> Option<String> {
    if let Some(table) = table_data_membership(wb, addr) {
        return table_column_name(table, addr.col);
    }
    let cfg = VicinityConfig::default();
    let lowest = addr.row.saturating_sub(cfg.rows_visible).max(1);
    for row in (lowest..addr.row).rev().chain((1..=sheet.frozen_rows.min(addr.row - 1)).rev()) {
        if let Some(cell) = sheet.cell(row, addr.col) {
            if let Some(text) = cell.value.as_text() {
                if !text.trim().is_empty() {
                    return Some(text.to_string());
                }
            }
            if cell.is_occupied() {
                return None;
            }
        }
    }
    None
}

/// Finds labeling for the value cell at `addr`.
///
/// Zero-step sources are searched first: the enclosing table's column header
/// and unit row, the nearest label text leftward and upward, a trailing unit
/// or format cell to the right, defined names covering the cell, and the
/// cell's own number format (unless `strict_formats`). Each candidate cell
/// must be co-visible with `addr` under `cfg`. Priced channels follow: the
/// cell's comment and validation message, and documentation-page rows keyed
/// by the cell's address or covering name, each at one step.
pub fn resolve_labels(
    wb: &WorkbookModel,
    addr: &CellAddress,
    cfg: &VicinityConfig,
    lex: &LexiconSet,
    strict_formats: bool,
) -> LabelResolution {
    let mut res = LabelResolution::default();
    let vt = classify_value_type(wb, addr, lex);
    if !vt.is_value() {
        return res;
    }
    let Some(sheet) = wb.sheet(&addr.sheet) else { return res };
    let cell = sheet.cell(addr.row, addr.col);

    // Table column header and unit row. Header text replaces the column
    // letters while scrolled inside a table, so it is visible from any row.
    if let Some(table) = table_data_membership(wb, addr) {
        let header_addr = CellAddress::new(&addr.sheet, table.header_row_index(), addr.col);
        if let Some(name) = table_column_name(table, addr.col) {
            if !name.trim().is_empty() {
                push_cell_parts(&mut res, &name, PartLocation::VicinityCell(header_addr), vt, lex);
            }
        }
        if let Some(uom_row) = table.uom_row {
            let uom_addr = CellAddress::new(&addr.sheet, uom_row, addr.col);
            if let Some(text) = sheet.cell(uom_row, addr.col).and_then(|c| c.value.as_text()) {
                if !text.trim().is_empty()
                    && co_visible(wb, &[addr.clone(), uom_addr.clone()], cfg)
                {
                    push_cell_parts(&mut res, text, PartLocation::VicinityCell(uom_addr), vt, lex);
                }
            }
        }
    }

    // Nearest label text leftward and upward, then a unit/format to the right.
    if let Some((label_addr, text)) = nearest_label(wb, sheet, addr, cfg, lex, Direction::Left) {
        push_cell_parts(&mut res, &text, PartLocation::VicinityCell(label_addr), vt, lex);
    }
    if let Some((label_addr, text)) = nearest_label(wb, sheet, addr, cfg, lex, Direction::Up) {
        push_cell_parts(&mut res, &text, PartLocation::VicinityCell(label_addr), vt, lex);
    }
    if let Some((unit_addr, text)) = trailing_unit(wb, sheet, addr, cfg, lex) {
        push_cell_parts(&mut res, &text, PartLocation::VicinityCell(unit_addr), vt, lex);
    }

    for name in wb.names_covering(addr) {
        res.parts.push(LabelPart {
            kind: PartKind::Subject,
            text: name.name.clone(),
            location: PartLocation::DefinedName,
            steps: 0,
        });
        if vt == ValueType::Flag && lex.is_interrogative(&name.name.replace('_', " ")) {
            res.parts.push(LabelPart {
                kind: PartKind::Question,
                text: name.name.clone(),
                location: PartLocation::DefinedName,
                steps: 0,
            });
        }
    }

    if !strict_formats {
        if let Some(cell) = cell {
            for candidate in numfmt::unit_candidates(&cell.number_format) {
                let symbolic = candidate.chars().count() == 1;
                if symbolic || lex.is_unit(&candidate) {
                    res.parts.push(LabelPart {
                        kind: PartKind::Unit,
                        text: candidate,
                        location: PartLocation::SameCellFormat,
                        steps: 0,
                    });
                    break;
                }
            }
            if numfmt::has_date_tokens(&cell.number_format) {
                res.parts.push(LabelPart {
                    kind: PartKind::Format,
                    text: cell.number_format.clone(),
                    location: PartLocation::SameCellFormat,
                    steps: 0,
                });
            }
        }
    }

    if let Some(cell) = cell {
        if let Some(comment) = &cell.comment {
            push_annotation_parts(&mut res, comment, PartLocation::Comment, lex);
        }
        if let Some(message) = &cell.validation_message {
            push_annotation_parts(&mut res, message, PartLocation::ValidationMessage, lex);
        }
    }

    if let Some((doc_addr, text)) = documentation_row(wb, addr, lex) {
        push_annotation_parts(&mut res, &text, PartLocation::DocumentationCell(doc_addr), lex);
    }

    res.missing = required_parts(vt)
        .iter()
        .copied()
        .filter(|k| !res.has_kind(*k))
        .collect();
    res
}

/// A label that exists straight left or up but fails the co-visibility test;
/// freezing its row/column would bring it into every window.
pub fn off_vicinity_label(
    wb: &WorkbookModel,
    addr: &CellAddress,
    cfg: &VicinityConfig,
    lex: &LexiconSet,
) -> Option<CellAddress> {
    let sheet = wb.sheet(&addr.sheet)?;
    // Upward, unbounded.
    let up = sheet
        .cells
        .range(..(addr.row, addr.col))
        .rev()
        .filter(|((r, c), _)| *c == addr.col && *r < addr.row)
        .map(|((r, c), _)| CellAddress::new(&addr.sheet, *r, *c))
        .find(|a| is_label_cell(wb, a, lex));
    if let Some(a) = up {
        if !co_visible(wb, &[addr.clone(), a.clone()], cfg) {
            return Some(a);
        }
    }
    let left = sheet
        .cells
        .range((addr.row, 1)..(addr.row, addr.col))
        .rev()
        .map(|((r, c), _)| CellAddress::new(&addr.sheet, *r, *c))
        .find(|a| is_label_cell(wb, a, lex));
    if let Some(a) = left {
        if !co_visible(wb, &[addr.clone(), a.clone()], cfg) {
            return Some(a);
        }
    }
    None
}

enum Direction {
    Left,
    Up,
}

/// Nearest label-text cell in the given direction that is co-visible with
/// `addr`: the in-window stretch is scanned nearest-first, then the frozen
/// band (always visible).
fn nearest_label(
    wb: &WorkbookModel,
    sheet: &Sheet,
    addr: &CellAddress,
    cfg: &VicinityConfig,
    lex: &LexiconSet,
    dir: Direction,
) -> Option<(CellAddress, String)> {
    let candidates: Vec<(u32, u32)> = match dir {
        Direction::Left => {
            let lowest = addr.col.saturating_sub(cfg.cols_visible).max(1);
            let frozen = sheet.frozen_cols.min(addr.col.saturating_sub(1));
            (lowest..addr.col)
                .rev()
                .chain((1..=frozen).rev().filter(|c| *c < lowest))
                .map(|c| (addr.row, c))
                .collect()
        }
        Direction::Up => {
            let lowest = addr.row.saturating_sub(cfg.rows_visible).max(1);
            let frozen = sheet.frozen_rows.min(addr.row.saturating_sub(1));
            (lowest..addr.row)
                .rev()
                .chain((1..=frozen).rev().filter(|r| *r < lowest))
                .map(|r| (r, addr.col))
                .collect()
        }
    };
    for (row, col) in candidates {
        let Some(cell) = sheet.cell(row, col) else { continue };
        if !cell.is_occupied() {
            continue;
        }
        let cand = CellAddress::new(&addr.sheet, row, col);
        if !is_label_cell(wb, &cand, lex) {
            continue;
        }
        if !co_visible(wb, &[addr.clone(), cand.clone()], cfg) {
            return None;
        }
        let text = cell.value.as_text().unwrap_or_default().trim().to_string();
        return Some((cand, text));
    }
    None
}

/// First occupied cell to the right, accepted only when it carries a unit
/// word or format-shaped text (a trailing "USD" / "mm/dd/yyyy" column).
fn trailing_unit(
    wb: &WorkbookModel,
    sheet: &Sheet,
    addr: &CellAddress,
    cfg: &VicinityConfig,
    lex: &LexiconSet,
) -> Option<(CellAddress, String)> {
    let limit = addr.col.saturating_add(cfg.cols_visible).min(crate::workbook::address::MAX_COL);
    for col in addr.col + 1..=limit {
        let Some(cell) = sheet.cell(addr.row, col) else { continue };
        if !cell.is_occupied() {
            continue;
        }
        let text = cell.value.as_text()?.trim().to_string();
        if !lex.is_unit(&text) && !numfmt::format_shaped_text(&text) {
            return None;
        }
        let cand = CellAddress::new(&addr.sheet, addr.row, col);
        if !co_visible(wb, &[addr.clone(), cand.clone()], cfg) {
            return None;
        }
        return Some((cand, text));
    }
    None
}

/// Turns one nearby label cell's text into parts.
fn push_cell_parts(
    res: &mut LabelResolution,
    text: &str,
    location: PartLocation,
    vt: ValueType,
    lex: &LexiconSet,
) {
    let text = text.trim().trim_end_matches(':').trim();
    if text.is_empty() {
        return;
    }
    let kind = if text.ends_with('?') {
        PartKind::Question
    } else if lex.is_unit(text) {
        PartKind::Unit
    } else if numfmt::format_shaped_text(text) {
        PartKind::Format
    } else {
        PartKind::Subject
    };
    res.parts.push(LabelPart {
        kind,
        text: text.to_string(),
        location: location.clone(),
        steps: location.minimum_steps(),
    });
    // A subject like "Due" doubles as the question of a flag.
    if kind == PartKind::Subject && vt == ValueType::Flag && lex.is_interrogative(text) {
        res.parts.push(LabelPart {
            kind: PartKind::Question,
            text: text.to_string(),
            location: location.clone(),
            steps: location.minimum_steps(),
        });
    }
    if kind == PartKind::Question {
        // The question names the subject too.
        res.parts.push(LabelPart {
            kind: PartKind::Subject,
            text: text.to_string(),
            location: location.clone(),
            steps: location.minimum_steps(),
        });
    }
}

/// Parses annotation prose (comment, validation message, documentation row)
/// into parts: the whole text is a subject, plus any unit words, format
/// tokens, or a question mark found inside.
fn push_annotation_parts(
    res: &mut LabelResolution,
    text: &str,
    location: PartLocation,
    lex: &LexiconSet,
) {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return;
    }
    let steps = location.minimum_steps();
    res.parts.push(LabelPart {
        kind: PartKind::Subject,
        text: trimmed.to_string(),
        location: location.clone(),
        steps,
    });
    for token in trimmed.split(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | ',' | ';'))
    {
        let token = token.trim_matches(|c: char| matches!(c, '.' | ':'));
        if token.is_empty() {
            continue;
        }
        if lex.is_unit(token) && !res.parts.iter().any(|p| p.kind == PartKind::Unit && p.location == location) {
            res.parts.push(LabelPart {
                kind: PartKind::Unit,
                text: token.to_string(),
                location: location.clone(),
                steps,
            });
        } else if numfmt::format_shaped_text(token)
            && !res.parts.iter().any(|p| p.kind == PartKind::Format && p.location == location)
        {
            res.parts.push(LabelPart {
                kind: PartKind::Format,
                text: token.to_string(),
                location: location.clone(),
                steps,
            });
        }
    }
    if trimmed.contains('?') {
        res.parts.push(LabelPart {
            kind: PartKind::Question,
            text: trimmed.to_string(),
            location,
            steps,
        });
    }
}

/// Scans documentation sheets for a row keyed by this cell's address
/// ("B1" or "Sheet1!B1") or a covering defined name; returns the first
/// descriptive text to the right of the key.
fn documentation_row(
    wb: &WorkbookModel,
    addr: &CellAddress,
    lex: &LexiconSet,
) -> Option<(CellAddress, String)> {
    let mut keys: Vec<String> = vec![addr.a1().to_ascii_lowercase(), addr.to_string().to_ascii_lowercase()];
    for name in wb.names_covering(addr) {
        keys.push(name.name.to_ascii_lowercase());
    }
    for sheet in &wb.sheets {
        if !lex.is_doc_sheet(&sheet.name) {
            continue;
        }
        let mut current_row = 0;
        let mut key_matched = false;
        for (&(row, col), cell) in &sheet.cells {
            if row != current_row {
                current_row = row;
                key_matched = false;
            }
            let Some(text) = cell.value.as_text() else { continue };
            let text = text.trim();
            if text.is_empty() {
                continue;
            }
            if key_matched {
                return Some((CellAddress::new(&sheet.name, row, col), text.to_string()));
            }
            if keys.contains(&text.to_ascii_lowercase()) {
                key_matched = true;
            }
        }
    }
    None
}
