//! The scoring engine.
//!
//! Scores count the inspection actions (steps) separating a reader from every
//! value and label a cell depends on. Zero means everything is visible at a
//! glance; each required click, navigation, or dialog costs a step; anything
//! that cannot be reached by inspection at all makes the score opaque.
//!
//! Three levels build on each other: [`Scorer::surface`] prices a single
//! cell's own value and labels, [`Scorer::source`] prices everything the
//! cell's formula draws in, and [`Scorer::cell`] sums the two. Above those,
//! [`Scorer::chain`] folds in transitive precedents and [`Scorer::model`]
//! totals a whole workbook.

pub(crate) mod resolve;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::catalog::{FunctionCatalog, ParamGrade};
use crate::formula::{operands, parse_formula};
use crate::formula::{BinOp, Expr, FormulaAst, LitValue, OperandKind, SourceOperand, Span};
use crate::labeling::{
    classify_value_type, co_visible, is_label_cell, required_parts, resolve_labels, sufficiency,
    LabelPart, LabelResolution, LexiconSet, PartKind, PartLocation, Sufficiency, ValueType,
    VicinityConfig,
};
use crate::score::Score;
use crate::workbook::address::{col_to_letters, AreaRef, CellAddress};
use crate::workbook::{Concealment, ConnectionKind, WorkbookModel};

use resolve::{
    analyze_indirect, cell_area, occupied_in_area, range_area, resolve_name, structured_target,
    NamedKind,
};

pub use resolve::reference_text_area;

/// Step prices for each class of inspection action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepCosts {
    /// Clicking into the formula bar to read a formula's parts.
    pub formula_inspection: u32,
    /// Jumping to a reference that cannot share the screen with the formula.
    pub navigation: u32,
    /// Opening a function's help page for an argument label.
    pub function_help: u32,
    /// Opening a comment, validation message, or documentation row.
    pub annotation_access: u32,
    /// Unhiding a row, column, or sheet.
    pub reveal_hidden: u32,
    /// Opening a data connection's definition.
    pub connection_definition: u32,
}

impl Default for StepCosts {
    fn default() -> Self {
        StepCosts {
            formula_inspection: 1,
            navigation: 1,
            function_help: 1,
            annotation_access: 1,
            reveal_hidden: 2,
            connection_definition: 1,
        }
    }
}

/// How chain scores treat a precedent reached along several paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMode {
    /// Each transitive precedent is counted once (default).
    #[default]
    Set,
    /// A shared precedent is charged once per path reaching it.
    PerPath,
}

/// Everything the scorer can be tuned with.
#[derive(Debug, Clone, Default)]
pub struct ScoreConfig {
    pub costs: StepCosts,
    pub vicinity: VicinityConfig,
    /// Require an explicit unit token in number formats instead of accepting
    /// any currency/percent style format as a unit label.
    pub strict_formats: bool,
    pub chain_mode: ChainMode,
}

/// Why a score is opaque rather than a finite step count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OpaqueReason {
    VeryHiddenSheet { sheet: String },
    ProtectedSheet { sheet: String },
    InsufficientLabels { missing: Vec<PartKind> },
    BareLiteral { text: String },
    InsufficientParameterLabel { function: String, argument: String },
    UnconstrainedIndirect { function: String },
    UnhandledError { code: String },
    UnresolvedReference { detail: String },
    CircularReference { cycle: Vec<CellAddress> },
    UnparseableFormula { detail: String },
    OpaqueSource { cell: CellAddress },
}

impl fmt::Display for OpaqueReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpaqueReason::VeryHiddenSheet { sheet } => {
                write!(f, "sheet {sheet} is very hidden and cannot be shown from the grid")
            }
            OpaqueReason::ProtectedSheet { sheet } => {
                write!(f, "sheet {sheet} is protected and no password is disclosed")
            }
            OpaqueReason::InsufficientLabels { missing } => {
                if missing.is_empty() {
                    write!(f, "value has no sufficient labeling channel")
                } else {
                    let names: Vec<&str> = missing.iter().map(|k| part_label(*k)).collect();
                    write!(f, "required labels missing: {}", names.join(", "))
                }
            }
            OpaqueReason::BareLiteral { text } => {
                write!(f, "literal {text} has no label")
            }
            OpaqueReason::InsufficientParameterLabel { function, argument } => {
                write!(f, "{function} argument {argument} is not labeled by its tooltip or help")
            }
            OpaqueReason::UnconstrainedIndirect { function } => {
                write!(f, "{function} target cannot be determined without evaluating the model")
            }
            OpaqueReason::UnhandledError { code } => {
                write!(f, "error value {code} is not handled by every dependent")
            }
            OpaqueReason::UnresolvedReference { detail } => f.write_str(detail),
            OpaqueReason::CircularReference { cycle } => {
                let names: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
                write!(f, "circular reference: {}", names.join(" -> "))
            }
            OpaqueReason::UnparseableFormula { detail } => {
                write!(f, "formula could not be parsed: {detail}")
            }
            OpaqueReason::OpaqueSource { cell } => {
                write!(f, "source cell {cell} is opaque")
            }
        }
    }
}

fn part_label(kind: PartKind) -> &'static str {
    match kind {
        PartKind::Subject => "subject",
        PartKind::Unit => "unit",
        PartKind::Format => "format",
        PartKind::Question => "question",
    }
}

/// What class of inspection action a score item charges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItemKind {
    FormulaInspection,
    NameNavigation,
    AreaNavigation,
    FunctionHelp,
    LabelAccess,
    Reveal,
    ConnectionDefinition,
    Opacity,
}

/// One priced inspection action (or opacity verdict) inside a breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreItem {
    pub kind: ItemKind,
    pub description: String,
    pub cost: Score,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellAddress>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<OpaqueReason>,
    /// Dedup key: items sharing a physical action (one comment, one unhide)
    /// are charged once per formula. Not part of the report payload.
    #[serde(skip)]
    pub(crate) access: Option<String>,
}

fn step_item(kind: ItemKind, description: String, steps: u32) -> ScoreItem {
    ScoreItem {
        kind,
        description,
        cost: Score::steps(steps),
        span: None,
        cell: None,
        reason: None,
        access: None,
    }
}

fn opacity_item(reason: OpaqueReason) -> ScoreItem {
    ScoreItem {
        kind: ItemKind::Opacity,
        description: reason.to_string(),
        cost: Score::Opaque,
        span: None,
        cell: None,
        reason: Some(reason),
        access: None,
    }
}

/// A list of items whose costs sum to a level's score.
#[derive(Debug, Clone, Default)]
struct Assessment {
    items: Vec<ScoreItem>,
}

impl Assessment {
    fn score(&self) -> Score {
        self.items.iter().map(|i| i.cost).sum()
    }
}

/// Surface, source, and total for one cell, with every priced item.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreBreakdown {
    pub surface: Score,
    pub source: Score,
    pub total: Score,
    pub items: Vec<ScoreItem>,
}

/// One scored cell inside a model report.
#[derive(Debug, Clone, Serialize)]
pub struct PerCellScore {
    pub cell: CellAddress,
    pub surface: Score,
    pub source: Score,
    pub total: Score,
    pub items: Vec<ScoreItem>,
}

/// Step charge for a connection-backed table.
#[derive(Debug, Clone, Serialize)]
pub struct TableItem {
    pub table: String,
    pub connection: ConnectionKind,
    pub cost: Score,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpaqueCell {
    pub cell: CellAddress,
    pub reason: OpaqueReason,
}

/// Whole-workbook score: every occupied non-label cell plus table charges.
#[derive(Debug, Clone, Serialize)]
pub struct ModelScore {
    pub total: Score,
    pub cells: Vec<PerCellScore>,
    pub tables: Vec<TableItem>,
    pub opaque_cells: Vec<OpaqueCell>,
    /// Sum of the finite components only, preserved even when `total` is
    /// opaque so partially opaque models can still be compared.
    pub finite_subtotal: i64,
}

/// Chain score for a cell and its transitive precedents.
#[derive(Debug, Clone, Serialize)]
pub struct ChainScore {
    pub score: Score,
    pub members: Vec<CellAddress>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<CellAddress>>,
}

/// Scoring engine bound to one workbook. Caches surface assessments, error
/// handling verdicts, precedent sets, and cycle detection across calls, so
/// model-level scoring stays linear in the number of formulas.
pub struct Scorer<'a> {
    wb: &'a WorkbookModel,
    cfg: ScoreConfig,
    lex: LexiconSet,
    catalog: FunctionCatalog,
    surface_memo: RefCell<BTreeMap<CellAddress, Assessment>>,
    handled_memo: RefCell<BTreeMap<CellAddress, bool>>,
    precedent_memo: RefCell<BTreeMap<CellAddress, Vec<CellAddress>>>,
    cycle_memo: RefCell<Option<BTreeMap<CellAddress, Vec<CellAddress>>>>,
}

impl<'a> Scorer<'a> {
    pub fn new(wb: &'a WorkbookModel, cfg: ScoreConfig) -> Self {
        Scorer::with_catalog(wb, cfg, FunctionCatalog::default())
    }

    pub fn with_catalog(wb: &'a WorkbookModel, cfg: ScoreConfig, catalog: FunctionCatalog) -> Self {
        Scorer::with_catalog_and_lexicons(wb, cfg, catalog, LexiconSet::default())
    }

    pub fn with_catalog_and_lexicons(
        wb: &'a WorkbookModel,
        cfg: ScoreConfig,
        catalog: FunctionCatalog,
        lex: LexiconSet,
    ) -> Self {
        Scorer {
            wb,
            cfg,
            lex,
            catalog,
            surface_memo: RefCell::new(BTreeMap::new()),
            handled_memo: RefCell::new(BTreeMap::new()),
            precedent_memo: RefCell::new(BTreeMap::new()),
            cycle_memo: RefCell::new(None),
        }
    }

    pub fn config(&self) -> &ScoreConfig {
        &self.cfg
    }

    pub fn workbook(&self) -> &WorkbookModel {
        self.wb
    }

    pub fn lexicon(&self) -> &LexiconSet {
        &self.lex
    }

    pub(crate) fn surface_items(&self, addr: &CellAddress) -> Vec<ScoreItem> {
        self.surface_assessment(addr).items
    }

    /// Surface level: the cell's own value and labels.
    pub fn surface(&self, addr: &CellAddress) -> Score {
        self.surface_assessment(addr).score()
    }

    /// Source level: everything the cell's formula draws in.
    pub fn source(&self, addr: &CellAddress) -> Score {
        self.source_assessment(addr).score()
    }

    /// Surface plus source, with every priced item. A cell participating in
    /// a reference cycle is opaque regardless of its other items.
    pub fn cell(&self, addr: &CellAddress) -> ScoreBreakdown {
        let surface = self.surface_assessment(addr);
        let mut source = self.source_assessment(addr);
        if let Some(cycle) = self.cycle_of(addr) {
            let mut it = opacity_item(OpaqueReason::CircularReference { cycle });
            it.cell = Some(addr.clone());
            source.items.push(it);
        }
        let surface_score = surface.score();
        let source_score = source.score();
        let mut items = surface.items;
        items.extend(source.items);
        ScoreBreakdown {
            surface: surface_score,
            source: source_score,
            total: surface_score + source_score,
            items,
        }
    }

    /// True when at least one dependent formula references `addr` and every
    /// dependent that does wraps the reference in an error-handling function's
    /// guarded argument.
    pub fn downstream_error_handled(&self, addr: &CellAddress) -> bool {
        if let Some(&h) = self.handled_memo.borrow().get(addr) {
            return h;
        }
        let h = self.compute_handled(addr);
        self.handled_memo.borrow_mut().insert(addr.clone(), h);
        h
    }

    /// The cell plus its transitive precedents. Under set semantics each
    /// member is charged once; per-path mode recounts shared precedents along
    /// every path. Any cycle in reach makes the chain opaque.
    pub fn chain(&self, addr: &CellAddress) -> ChainScore {
        let mut members: BTreeSet<CellAddress> = BTreeSet::new();
        let mut queue = vec![addr.clone()];
        while let Some(a) = queue.pop() {
            if !members.insert(a.clone()) {
                continue;
            }
            for p in self.precedents(&a) {
                if !members.contains(&p) {
                    queue.push(p);
                }
            }
        }

        let mut cycle_members: BTreeSet<CellAddress> = BTreeSet::new();
        for m in &members {
            if let Some(cycle) = self.cycle_of(m) {
                cycle_members.extend(cycle);
            }
        }
        let member_list: Vec<CellAddress> = members.iter().cloned().collect();
        if !cycle_members.is_empty() {
            return ChainScore {
                score: Score::Opaque,
                members: member_list,
                cycle: Some(cycle_members.into_iter().collect()),
            };
        }

        let score = match self.cfg.chain_mode {
            ChainMode::Set => members.iter().map(|m| self.cell(m).total).sum(),
            ChainMode::PerPath => {
                let mut memo: BTreeMap<CellAddress, Score> = BTreeMap::new();
                self.per_path_score(addr, &mut memo)
            }
        };
        ChainScore { score, members: member_list, cycle: None }
    }

    /// Every occupied non-label cell, plus one connection charge per
    /// connection-backed table.
    pub fn model(&self) -> ModelScore {
        let mut cells = Vec::new();
        let mut opaque_cells = Vec::new();
        let mut total = Score::ZERO;
        let mut finite_subtotal: i64 = 0;

        for addr in self.wb.occupied_cells() {
            if is_label_cell(self.wb, &addr, &self.lex) {
                continue;
            }
            let b = self.cell(&addr);
            total = total + b.total;
            if let Some(n) = b.total.finite() {
                finite_subtotal += n;
            } else {
                let reason = b
                    .items
                    .iter()
                    .find_map(|i| i.reason.clone())
                    .unwrap_or(OpaqueReason::UnresolvedReference {
                        detail: "opaque with no recorded reason".into(),
                    });
                opaque_cells.push(OpaqueCell { cell: addr.clone(), reason });
            }
            cells.push(PerCellScore {
                cell: addr,
                surface: b.surface,
                source: b.source,
                total: b.total,
                items: b.items,
            });
        }

        let mut tables = Vec::new();
        for t in &self.wb.tables {
            if let Some(conn) = &t.connection {
                let cost = Score::steps(self.cfg.costs.connection_definition);
                total = total + cost;
                finite_subtotal += cost.finite().unwrap_or(0);
                tables.push(TableItem {
                    table: t.name.clone(),
                    connection: conn.kind.clone(),
                    cost,
                });
            }
        }

        ModelScore { total, cells, tables, opaque_cells, finite_subtotal }
    }

    /// Direct precedents: every occupied cell in the areas the formula
    /// references, including areas computed from constrained indirect calls.
    pub fn precedents(&self, addr: &CellAddress) -> Vec<CellAddress> {
        if let Some(p) = self.precedent_memo.borrow().get(addr) {
            return p.clone();
        }
        let p = self.compute_precedents(addr);
        self.precedent_memo.borrow_mut().insert(addr.clone(), p.clone());
        p
    }

    fn compute_precedents(&self, addr: &CellAddress) -> Vec<CellAddress> {
        let Some(cell) = self.wb.cell(addr) else { return Vec::new() };
        let Some(formula) = &cell.formula else { return Vec::new() };
        let Ok(ast) = parse_formula(formula) else { return Vec::new() };

        let mut areas: Vec<AreaRef> = Vec::new();
        for op in operands(&ast) {
            areas.extend(self.operand_areas(addr, &op));
        }
        for outcome in analyze_indirect(self.wb, addr, &ast.root, &self.catalog) {
            if let Some(cands) = outcome.candidates {
                for c in cands {
                    if c.computed {
                        areas.push(c.area);
                    }
                }
            }
        }

        let mut out: BTreeSet<CellAddress> = BTreeSet::new();
        for area in &areas {
            out.extend(occupied_in_area(self.wb, area));
        }
        out.into_iter().collect()
    }

    /// The areas one operand points at, ignoring resolution failures.
    fn operand_areas(&self, host: &CellAddress, op: &SourceOperand<'_>) -> Vec<AreaRef> {
        match op.kind {
            OperandKind::Literal => Vec::new(),
            OperandKind::CellArea => match op.expr {
                Expr::CellRef { cell, .. } => {
                    cell_area(self.wb, &host.sheet, cell).into_iter().collect()
                }
                Expr::RangeRef { range, .. } => {
                    range_area(self.wb, &host.sheet, range).into_iter().collect()
                }
                _ => Vec::new(),
            },
            OperandKind::Named => match op.expr {
                Expr::NamedRef { sheet, name, .. } => {
                    match resolve_name(self.wb, &host.sheet, sheet, name) {
                        Ok(NamedKind::Areas(a)) | Ok(NamedKind::Expression(a)) => a,
                        _ => Vec::new(),
                    }
                }
                _ => Vec::new(),
            },
            OperandKind::Structured => match op.expr {
                Expr::StructuredRef { sref, .. } => {
                    match structured_target(self.wb, host, sref) {
                        Ok(t) => t.areas,
                        Err(_) => Vec::new(),
                    }
                }
                _ => Vec::new(),
            },
        }
    }

    fn per_path_score(&self, addr: &CellAddress, memo: &mut BTreeMap<CellAddress, Score>) -> Score {
        if let Some(&s) = memo.get(addr) {
            return s;
        }
        let mut total = self.cell(addr).total;
        for p in self.precedents(addr) {
            total = total + self.per_path_score(&p, memo);
        }
        memo.insert(addr.clone(), total);
        total
    }

    // ---- surface ----------------------------------------------------------

    fn surface_assessment(&self, addr: &CellAddress) -> Assessment {
        if let Some(a) = self.surface_memo.borrow().get(addr) {
            return a.clone();
        }
        let a = self.compute_surface(addr);
        self.surface_memo.borrow_mut().insert(addr.clone(), a.clone());
        a
    }

    fn compute_surface(&self, addr: &CellAddress) -> Assessment {
        let mut items: Vec<ScoreItem> = Vec::new();
        let costs = self.cfg.costs;

        let vis = match self.wb.visibility(addr) {
            Ok(v) => v,
            Err(e) => {
                let mut it = opacity_item(OpaqueReason::UnresolvedReference { detail: e.to_string() });
                it.cell = Some(addr.clone());
                return Assessment { items: vec![it] };
            }
        };

        if vis.state == Concealment::VeryHiddenSheet {
            let mut it = opacity_item(OpaqueReason::VeryHiddenSheet { sheet: addr.sheet.clone() });
            it.cell = Some(addr.clone());
            return Assessment { items: vec![it] };
        }
        if vis.protected && !vis.password_disclosed {
            let mut it = opacity_item(OpaqueReason::ProtectedSheet { sheet: addr.sheet.clone() });
            it.cell = Some(addr.clone());
            return Assessment { items: vec![it] };
        }
        match vis.state {
            Concealment::HiddenRow => {
                let mut it = step_item(
                    ItemKind::Reveal,
                    format!("unhide row {} of {}", addr.row, addr.sheet),
                    costs.reveal_hidden,
                );
                it.cell = Some(addr.clone());
                it.access = Some(format!("reveal-row {} {}", addr.sheet.to_lowercase(), addr.row));
                items.push(it);
            }
            Concealment::HiddenColumn => {
                let letters = col_to_letters(addr.col);
                let mut it = step_item(
                    ItemKind::Reveal,
                    format!("unhide column {} of {}", letters, addr.sheet),
                    costs.reveal_hidden,
                );
                it.cell = Some(addr.clone());
                it.access = Some(format!("reveal-col {} {}", addr.sheet.to_lowercase(), addr.col));
                items.push(it);
            }
            Concealment::HiddenSheet => {
                let mut it = step_item(
                    ItemKind::Reveal,
                    format!("unhide sheet {}", addr.sheet),
                    costs.reveal_hidden,
                );
                it.cell = Some(addr.clone());
                it.access = Some(format!("reveal-sheet {}", addr.sheet.to_lowercase()));
                items.push(it);
            }
            _ => {}
        }

        let vt = classify_value_type(self.wb, addr, &self.lex);

        // Error values sidestep labeling: a handled error costs nothing more,
        // an unhandled one is opaque from every direction.
        if vt == ValueType::Error {
            if self.downstream_error_handled(addr) {
                return Assessment { items };
            }
            let code = self
                .wb
                .cell(addr)
                .and_then(|c| c.value.as_error().map(str::to_string))
                .unwrap_or_else(|| "#ERROR".into());
            let mut it = opacity_item(OpaqueReason::UnhandledError { code });
            it.cell = Some(addr.clone());
            items.push(it);
            return Assessment { items };
        }

        if !vt.is_value() {
            // Labels and empty cells only ever cost their reveal steps.
            return Assessment { items };
        }

        let res = resolve_labels(self.wb, addr, &self.cfg.vicinity, &self.lex, self.cfg.strict_formats);
        match sufficiency(vt, &res) {
            Sufficiency::Insufficient(missing) => {
                let mut it = opacity_item(OpaqueReason::InsufficientLabels {
                    missing: missing.into_iter().collect(),
                });
                it.cell = Some(addr.clone());
                items.push(it);
            }
            Sufficiency::Sufficient => {
                items.extend(self.label_charges(addr, vt, &res));
            }
        }
        Assessment { items }
    }

    /// Charges for the label parts actually needed. Free channels win; priced
    /// channels sharing one physical action (one comment) are charged once.
    fn label_charges(&self, addr: &CellAddress, vt: ValueType, res: &LabelResolution) -> Vec<ScoreItem> {
        let mut items = Vec::new();
        let mut used: BTreeSet<String> = BTreeSet::new();
        for kind in required_parts(vt) {
            let mut best: Option<(u32, u32, usize)> = None;
            for (i, part) in res.parts.iter().enumerate() {
                if part.kind != *kind {
                    continue;
                }
                let new_access = match label_access_key(addr, &part.location) {
                    Some(k) if used.contains(&k) => 0,
                    Some(_) => 1,
                    None => 0,
                };
                let cand = (part.steps, new_access, i);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                }
            }
            let Some((steps, _, idx)) = best else { continue };
            if steps == 0 {
                continue;
            }
            let part = &res.parts[idx];
            let Some(key) = label_access_key(addr, &part.location) else { continue };
            if !used.insert(key.clone()) {
                continue;
            }
            let cost = match part.location {
                PartLocation::FunctionHelp => self.cfg.costs.function_help,
                _ => self.cfg.costs.annotation_access,
            };
            let mut it = step_item(ItemKind::LabelAccess, describe_label_access(addr, part), cost);
            it.cell = Some(addr.clone());
            it.access = Some(key);
            items.push(it);
        }
        items
    }

    fn compute_handled(&self, addr: &CellAddress) -> bool {
        let mut any_dependent = false;
        for sheet in &self.wb.sheets {
            for (&(row, col), cell) in &sheet.cells {
                let Some(formula) = &cell.formula else { continue };
                let host = CellAddress::new(&sheet.name, row, col);
                if host == *addr {
                    continue;
                }
                let Ok(ast) = parse_formula(formula) else { continue };
                for op in operands(&ast) {
                    let covers = self
                        .operand_areas(&host, &op)
                        .iter()
                        .any(|a| a.contains(addr));
                    if !covers {
                        continue;
                    }
                    any_dependent = true;
                    let guarded = op
                        .enclosing
                        .iter()
                        .any(|ctx| self.catalog.is_error_handling(&ctx.name) && ctx.arg == 0);
                    if !guarded {
                        return false;
                    }
                }
            }
        }
        any_dependent
    }

    // ---- source -----------------------------------------------------------

    fn source_assessment(&self, addr: &CellAddress) -> Assessment {
        let Some(cell) = self.wb.cell(addr) else { return Assessment::default() };
        let Some(formula) = &cell.formula else { return Assessment::default() };
        let ast = match parse_formula(formula) {
            Ok(ast) => ast,
            Err(e) => {
                let mut it = opacity_item(OpaqueReason::UnparseableFormula { detail: e.to_string() });
                it.cell = Some(addr.clone());
                return Assessment { items: vec![it] };
            }
        };
        self.score_formula(addr, &ast)
    }

    fn score_formula(&self, host: &CellAddress, ast: &FormulaAst) -> Assessment {
        let costs = self.cfg.costs;
        let mut items: Vec<ScoreItem> = Vec::new();
        let ops = operands(ast);

        // A formula made solely of literals under arithmetic, in a cell
        // covered by a defined name, is labeled by that name: the literals
        // cost nothing and there is nothing hidden to expand.
        let literal_exempt = literals_under_arithmetic(&ast.root)
            && !self.wb.names_covering(host).is_empty();

        // Expanding the formula bar once exposes every in-formula value, so
        // the first cell-style reference or in-function literal costs one
        // shared step. Named and structured references read as labels and do
        // not trigger it.
        let needs_inspection = !literal_exempt
            && ops.iter().any(|op| match op.kind {
                OperandKind::CellArea => true,
                OperandKind::Literal => op.context.is_some(),
                _ => false,
            });
        if needs_inspection {
            let mut it = step_item(
                ItemKind::FormulaInspection,
                "inspect the formula in the formula bar".into(),
                costs.formula_inspection,
            );
            it.cell = Some(host.clone());
            items.push(it);
        }

        // Formula-wide dedup state: navigation per name / per area, physical
        // access actions (comments, unhides) shared across targets.
        let mut nav_names: BTreeSet<String> = BTreeSet::new();
        let mut nav_areas: BTreeSet<String> = BTreeSet::new();
        let mut accesses: BTreeSet<String> = BTreeSet::new();

        for op in &ops {
            match op.kind {
                OperandKind::Literal => {
                    self.score_literal(host, ast, op, literal_exempt, &mut items);
                }
                OperandKind::CellArea => {
                    let resolved = match op.expr {
                        Expr::CellRef { cell, .. } => cell_area(self.wb, &host.sheet, cell),
                        Expr::RangeRef { range, .. } => range_area(self.wb, &host.sheet, range),
                        _ => continue,
                    };
                    match resolved {
                        Ok(area) => self.charge_area(
                            host,
                            &area,
                            snippet(&ast.text, op.span),
                            Some(op.span),
                            &[],
                            &mut nav_areas,
                            &mut accesses,
                            &mut items,
                        ),
                        Err(issue) => {
                            let mut it = opacity_item(OpaqueReason::UnresolvedReference {
                                detail: issue.to_string(),
                            });
                            it.span = Some(op.span);
                            it.cell = Some(host.clone());
                            items.push(it);
                        }
                    }
                }
                OperandKind::Named => {
                    self.score_named(host, op, &mut nav_names, &mut nav_areas, &mut accesses, &mut items);
                }
                OperandKind::Structured => {
                    let Expr::StructuredRef { sref, .. } = op.expr else { continue };
                    match structured_target(self.wb, host, sref) {
                        Ok(target) => {
                            for area in &target.areas {
                                self.charge_area(
                                    host,
                                    area,
                                    snippet(&ast.text, op.span),
                                    Some(op.span),
                                    &target.label_cells,
                                    &mut nav_areas,
                                    &mut accesses,
                                    &mut items,
                                );
                            }
                        }
                        Err(issue) => {
                            let mut it = opacity_item(OpaqueReason::UnresolvedReference {
                                detail: issue.to_string(),
                            });
                            it.span = Some(op.span);
                            it.cell = Some(host.clone());
                            items.push(it);
                        }
                    }
                }
            }
        }

        // Indirect-class calls: a constrained call prices its computed
        // candidate areas like ordinary references; an unconstrained one is
        // opaque because no amount of inspection reveals its target.
        for outcome in analyze_indirect(self.wb, host, &ast.root, &self.catalog) {
            match outcome.candidates {
                None => {
                    let mut it = opacity_item(OpaqueReason::UnconstrainedIndirect {
                        function: outcome.name.clone(),
                    });
                    it.span = Some(outcome.span);
                    it.cell = Some(host.clone());
                    items.push(it);
                }
                Some(cands) => {
                    for c in cands {
                        if !c.computed {
                            continue;
                        }
                        self.charge_area(
                            host,
                            &c.area,
                            &format!("{} ({})", c.area, c.derivation),
                            Some(outcome.span),
                            &[],
                            &mut nav_areas,
                            &mut accesses,
                            &mut items,
                        );
                    }
                }
            }
        }

        Assessment { items }
    }

    fn score_literal(
        &self,
        host: &CellAddress,
        ast: &FormulaAst,
        op: &SourceOperand<'_>,
        literal_exempt: bool,
        items: &mut Vec<ScoreItem>,
    ) {
        let text = snippet(&ast.text, op.span).to_string();
        match &op.context {
            None => {
                if literal_exempt {
                    return;
                }
                let mut it = opacity_item(OpaqueReason::BareLiteral { text });
                it.span = Some(op.span);
                it.cell = Some(host.clone());
                items.push(it);
            }
            Some(ctx) => match self.catalog.parameter_grade(&ctx.name, ctx.arg) {
                ParamGrade::TooltipSufficient => {}
                ParamGrade::HelpSufficient => {
                    let argument = self.argument_label(&ctx.name, ctx.arg);
                    let mut it = step_item(
                        ItemKind::FunctionHelp,
                        format!("open help for {} to read what {} means", ctx.name, argument),
                        self.cfg.costs.function_help,
                    );
                    it.span = Some(op.span);
                    it.cell = Some(host.clone());
                    items.push(it);
                }
                ParamGrade::Insufficient => {
                    let argument = self.argument_label(&ctx.name, ctx.arg);
                    let mut it = opacity_item(OpaqueReason::InsufficientParameterLabel {
                        function: ctx.name.clone(),
                        argument,
                    });
                    it.span = Some(op.span);
                    it.cell = Some(host.clone());
                    items.push(it);
                }
            },
        }
    }

    fn argument_label(&self, function: &str, arg: usize) -> String {
        self.catalog
            .parameter_name(function, arg)
            .map(str::to_string)
            .unwrap_or_else(|| format!("argument {}", arg + 1))
    }

    fn score_named(
        &self,
        host: &CellAddress,
        op: &SourceOperand<'_>,
        nav_names: &mut BTreeSet<String>,
        nav_areas: &mut BTreeSet<String>,
        accesses: &mut BTreeSet<String>,
        items: &mut Vec<ScoreItem>,
    ) {
        let Expr::NamedRef { sheet, name, .. } = op.expr else { return };
        match resolve_name(self.wb, &host.sheet, sheet, name) {
            Err(issue) => {
                let mut it = opacity_item(OpaqueReason::UnresolvedReference {
                    detail: issue.to_string(),
                });
                it.span = Some(op.span);
                it.cell = Some(host.clone());
                items.push(it);
            }
            Ok(NamedKind::Constant) => {
                // The name is the label; the value lives only in the name's
                // definition, one dialog away.
                if nav_names.insert(name.to_uppercase()) {
                    let mut it = step_item(
                        ItemKind::NameNavigation,
                        format!("open the definition of named constant {name}"),
                        self.cfg.costs.navigation,
                    );
                    it.span = Some(op.span);
                    it.cell = Some(host.clone());
                    items.push(it);
                }
            }
            Ok(NamedKind::Areas(areas)) => {
                if nav_names.insert(name.to_uppercase()) {
                    let mut probe: Vec<CellAddress> = vec![host.clone()];
                    for a in &areas {
                        probe.push(a.top_left());
                        probe.push(CellAddress::new(&a.sheet, a.row2, a.col2));
                    }
                    if !co_visible(self.wb, &probe, &self.cfg.vicinity) {
                        let mut it = step_item(
                            ItemKind::NameNavigation,
                            format!("navigate to {name}"),
                            self.cfg.costs.navigation,
                        );
                        it.span = Some(op.span);
                        it.cell = Some(host.clone());
                        items.push(it);
                    }
                }
                for a in &areas {
                    for target in occupied_in_area(self.wb, a) {
                        self.charge_target_surface(&target, accesses, items);
                    }
                }
            }
            Ok(NamedKind::Expression(areas)) => {
                // An expression-valued name always needs its definition read,
                // and the cells that definition touches are priced like any
                // other reference.
                if nav_names.insert(name.to_uppercase()) {
                    let mut it = step_item(
                        ItemKind::NameNavigation,
                        format!("open the definition of {name}"),
                        self.cfg.costs.navigation,
                    );
                    it.span = Some(op.span);
                    it.cell = Some(host.clone());
                    items.push(it);
                }
                for a in &areas {
                    self.charge_area(
                        host,
                        a,
                        &format!("{} (via {})", a, name),
                        Some(op.span),
                        &[],
                        nav_areas,
                        accesses,
                        items,
                    );
                }
            }
        }
    }

    /// The shared pricing pattern for an area-shaped reference: one
    /// navigation step when the area cannot share the screen with the
    /// formula, plus the surface of every occupied target cell.
    #[allow(clippy::too_many_arguments)]
    fn charge_area(
        &self,
        host: &CellAddress,
        area: &AreaRef,
        origin: &str,
        span: Option<Span>,
        covis_extra: &[CellAddress],
        nav_areas: &mut BTreeSet<String>,
        accesses: &mut BTreeSet<String>,
        items: &mut Vec<ScoreItem>,
    ) {
        if nav_areas.insert(area.to_string()) {
            let mut probe: Vec<CellAddress> = vec![
                host.clone(),
                area.top_left(),
                CellAddress::new(&area.sheet, area.row2, area.col2),
            ];
            probe.extend_from_slice(covis_extra);
            if !co_visible(self.wb, &probe, &self.cfg.vicinity) {
                let mut it = step_item(
                    ItemKind::AreaNavigation,
                    format!("navigate to {origin}"),
                    self.cfg.costs.navigation,
                );
                it.span = span;
                it.cell = Some(host.clone());
                items.push(it);
            }
        }
        for target in occupied_in_area(self.wb, area) {
            self.charge_target_surface(&target, accesses, items);
        }
    }

    /// Folds one target cell's surface into the formula being scored. Items
    /// sharing a physical action already paid for are dropped; an opaque
    /// target makes the formula opaque.
    fn charge_target_surface(
        &self,
        target: &CellAddress,
        accesses: &mut BTreeSet<String>,
        items: &mut Vec<ScoreItem>,
    ) {
        let assess = self.surface_assessment(target);
        for it in assess.items {
            if it.cost.is_opaque() {
                items.push(ScoreItem {
                    kind: ItemKind::Opacity,
                    description: format!("source cell {target} is opaque: {}", it.description),
                    cost: Score::Opaque,
                    span: None,
                    cell: Some(target.clone()),
                    reason: Some(OpaqueReason::OpaqueSource { cell: target.clone() }),
                    access: None,
                });
                continue;
            }
            if let Some(key) = &it.access {
                if !accesses.insert(key.clone()) {
                    continue;
                }
            }
            items.push(it);
        }
    }

    // ---- cycles -----------------------------------------------------------

    fn cycle_of(&self, addr: &CellAddress) -> Option<Vec<CellAddress>> {
        self.ensure_cycles();
        self.cycle_memo.borrow().as_ref().unwrap().get(addr).cloned()
    }

    fn ensure_cycles(&self) {
        if self.cycle_memo.borrow().is_some() {
            return;
        }
        let map = self.build_cycles();
        *self.cycle_memo.borrow_mut() = Some(map);
    }

    fn build_cycles(&self) -> BTreeMap<CellAddress, Vec<CellAddress>> {
        use petgraph::algo::tarjan_scc;
        use petgraph::graph::{DiGraph, NodeIndex};

        let mut graph: DiGraph<CellAddress, ()> = DiGraph::new();
        let mut index: BTreeMap<CellAddress, NodeIndex> = BTreeMap::new();
        for sheet in &self.wb.sheets {
            for (&(row, col), cell) in &sheet.cells {
                if cell.formula.is_some() {
                    let addr = CellAddress::new(&sheet.name, row, col);
                    let node = graph.add_node(addr.clone());
                    index.insert(addr, node);
                }
            }
        }
        let formula_cells: Vec<CellAddress> = index.keys().cloned().collect();
        for addr in &formula_cells {
            for p in self.precedents(addr) {
                if let Some(&target) = index.get(&p) {
                    graph.add_edge(index[addr], target, ());
                }
            }
        }

        let mut map = BTreeMap::new();
        for scc in tarjan_scc(&graph) {
            let cyclic = scc.len() > 1
                || (scc.len() == 1 && graph.contains_edge(scc[0], scc[0]));
            if !cyclic {
                continue;
            }
            let mut members: Vec<CellAddress> = scc.iter().map(|n| graph[*n].clone()).collect();
            members.sort();
            for m in &members {
                map.insert(m.clone(), members.clone());
            }
        }
        map
    }
}

// ---- free functions matching the module contract ---------------------------

/// Surface score of one cell: its own value and labels.
pub fn surface_score(wb: &WorkbookModel, addr: &CellAddress, cfg: &ScoreConfig) -> Score {
    Scorer::new(wb, cfg.clone()).surface(addr)
}

/// Source score of one cell's formula under the given catalog.
pub fn source_score(
    wb: &WorkbookModel,
    addr: &CellAddress,
    cfg: &ScoreConfig,
    catalog: &FunctionCatalog,
) -> Score {
    Scorer::with_catalog(wb, cfg.clone(), catalog.clone()).source(addr)
}

/// Surface plus source for one cell.
pub fn cell_score(wb: &WorkbookModel, addr: &CellAddress, cfg: &ScoreConfig) -> Score {
    Scorer::new(wb, cfg.clone()).cell(addr).total
}

/// True when every dependent that references `addr` guards it with an
/// error-handling function (and at least one dependent exists).
pub fn downstream_error_handled(wb: &WorkbookModel, addr: &CellAddress) -> bool {
    Scorer::new(wb, ScoreConfig::default()).downstream_error_handled(addr)
}

/// Chain score of a cell and its transitive precedents.
pub fn chain_score(wb: &WorkbookModel, addr: &CellAddress, cfg: &ScoreConfig) -> ChainScore {
    Scorer::new(wb, cfg.clone()).chain(addr)
}

/// Whole-model score over every occupied non-label cell.
pub fn model_score(wb: &WorkbookModel, cfg: &ScoreConfig) -> ModelScore {
    Scorer::new(wb, cfg.clone()).model()
}

// ---- helpers ---------------------------------------------------------------

fn snippet(text: &str, span: Span) -> &str {
    text.get(span.start..span.end).unwrap_or("")
}

/// True when the expression tree is nothing but literals under arithmetic.
fn literals_under_arithmetic(expr: &Expr) -> bool {
    match expr {
        Expr::Literal { value, .. } => !matches!(value, LitValue::Error(_) | LitValue::Missing),
        Expr::UnaryOp { operand, .. } | Expr::PercentOp { operand } => {
            literals_under_arithmetic(operand)
        }
        Expr::Paren { inner } => literals_under_arithmetic(inner),
        Expr::BinaryOp { op, lhs, rhs } => {
            matches!(op, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Pow)
                && literals_under_arithmetic(lhs)
                && literals_under_arithmetic(rhs)
        }
        _ => false,
    }
}

/// The physical action a priced label channel requires; labels sharing the
/// action (two parts in one comment) cost one step together.
fn label_access_key(addr: &CellAddress, loc: &PartLocation) -> Option<String> {
    match loc {
        PartLocation::Comment => Some(format!("comment {addr}")),
        PartLocation::ValidationMessage => Some(format!("validation {addr}")),
        PartLocation::DocumentationCell(d) => Some(format!("doc {d}")),
        // Help is charged per distinct use, never shared.
        PartLocation::FunctionHelp => Some(format!("help {addr}")),
        _ => None,
    }
}

fn describe_label_access(addr: &CellAddress, part: &LabelPart) -> String {
    match &part.location {
        PartLocation::Comment => format!("read the comment on {addr}"),
        PartLocation::ValidationMessage => format!("read the validation message on {addr}"),
        PartLocation::DocumentationCell(d) => format!("read the documentation at {d}"),
        PartLocation::FunctionHelp => format!("open function help for {addr}"),
        other => format!("read the {} label for {addr}", part_label_location(other)),
    }
}

fn part_label_location(loc: &PartLocation) -> &'static str {
    match loc {
        PartLocation::SameCellFormat => "number format",
        PartLocation::VicinityCell(_) => "vicinity",
        PartLocation::DefinedName => "defined name",
        PartLocation::FunctionTooltip => "tooltip",
        PartLocation::Comment => "comment",
        PartLocation::ValidationMessage => "validation message",
        PartLocation::DocumentationCell(_) => "documentation",
        PartLocation::FunctionHelp => "help",
    }
}
