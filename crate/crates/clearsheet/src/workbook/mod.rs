//! Immutable in-memory model of a workbook: sheets, cells, defined names,
//! tables, validations, connections, and visibility. Everything downstream
//! (labeling, scoring, linting) reads this model and never mutates it.

pub mod address;
pub mod builder;
mod xlsx;

pub use address::{AreaRef, CellAddress};
pub use builder::WorkbookBuilder;
pub use xlsx::load_workbook;

use std::collections::{BTreeMap, BTreeSet};

/// The six error codes a cell can display.
pub const ERROR_CODES: [&str; 6] = ["#DIV/0!", "#N/A", "#REF!", "#NAME?", "#VALUE!", "#NUM!"];

#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Number(f64),
    Text(String),
    Bool(bool),
    /// Error code text such as "#DIV/0!".
    Error(String),
    Empty,
}

impl CellValue {
    pub fn is_empty(&self) -> bool {
        matches!(self, CellValue::Empty) || matches!(self, CellValue::Text(t) if t.is_empty())
    }

    pub fn as_error(&self) -> Option<&str> {
        match self {
            CellValue::Error(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            CellValue::Text(t) => Some(t),
            _ => None,
        }
    }

    /// Display-style text used when a cell feeds a validation list.
    pub fn display_text(&self) -> String {
        match self {
            CellValue::Number(n) => n.to_string(),
            CellValue::Text(t) => t.clone(),
            CellValue::Bool(b) => (if *b { "TRUE" } else { "FALSE" }).to_string(),
            CellValue::Error(e) => e.clone(),
            CellValue::Empty => String::new(),
        }
    }
}

/// One stored cell. `formula` always begins with "=".
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub value: CellValue,
    pub formula: Option<String>,
    pub number_format: String,
    pub comment: Option<String>,
    pub validation_message: Option<String>,
    pub validation_list: Option<Vec<String>>,
}

impl Default for Cell {
    fn default() -> Self {
        Cell {
            value: CellValue::Empty,
            formula: None,
            number_format: "General".to_string(),
            comment: None,
            validation_message: None,
            validation_list: None,
        }
    }
}

impl Cell {
    pub fn is_occupied(&self) -> bool {
        self.formula.is_some() || !self.value.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SheetState {
    Visible,
    Hidden,
    VeryHidden,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sheet {
    pub name: String,
    pub state: SheetState,
    /// Sheet protection is recorded only when it carries a password;
    /// passwordless protection can be lifted by any inspector.
    pub password_protected: bool,
    pub frozen_rows: u32,
    pub frozen_cols: u32,
    pub hidden_rows: BTreeSet<u32>,
    pub hidden_cols: BTreeSet<u32>,
    pub cells: BTreeMap<(u32, u32), Cell>,
}

impl Default for SheetState {
    fn default() -> Self {
        SheetState::Visible
    }
}

impl Sheet {
    pub fn cell(&self, row: u32, col: u32) -> Option<&Cell> {
        self.cells.get(&(row, col))
    }

    /// Smallest rectangle holding every occupied cell.
    pub fn used_bounds(&self) -> Option<(u32, u32, u32, u32)> {
        let mut bounds: Option<(u32, u32, u32, u32)> = None;
        for (&(row, col), cell) in &self.cells {
            if !cell.is_occupied() {
                continue;
            }
            bounds = Some(match bounds {
                None => (row, col, row, col),
                Some((r1, c1, r2, c2)) => (r1.min(row), c1.min(col), r2.max(row), c2.max(col)),
            });
        }
        bounds
    }
}

/// What a defined name points at.
#[derive(Debug, Clone, PartialEq)]
pub enum NameTarget {
    Area(AreaRef),
    /// A literal constant, e.g. "12" or "\"USD\"".
    Constant(String),
    /// Any other refers-to text (function-bearing expressions etc.).
    Formula(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinedName {
    pub name: String,
    /// None = workbook scope; Some(sheet) = local to that sheet.
    pub scope: Option<String>,
    pub target: NameTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionKind {
    MsQuery,
    PowerQuery,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataConnection {
    pub kind: ConnectionKind,
    pub definition: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableModel {
    pub name: String,
    /// Full table range including the header row.
    pub area: AreaRef,
    pub header_row: Vec<String>,
    /// Row directly above the header row, when it holds only unit labels.
    pub uom_row: Option<u32>,
    pub totals_rows: u32,
    pub connection: Option<DataConnection>,
}

impl TableModel {
    pub fn header_row_index(&self) -> u32 {
        self.area.row1
    }

    /// Data region (between header and totals rows).
    pub fn data_area(&self) -> AreaRef {
        let row1 = (self.area.row1 + 1).min(self.area.row2);
        let row2 = self.area.row2.saturating_sub(self.totals_rows).max(row1);
        AreaRef::new(self.area.sheet.clone(), row1, self.area.col1, row2, self.area.col2)
    }

    /// 1-based offset of a column name within the table, case-insensitive.
    pub fn column_index(&self, column: &str) -> Option<u32> {
        self.header_row
            .iter()
            .position(|h| h.eq_ignore_ascii_case(column))
            .map(|i| self.area.col1 + i as u32)
    }
}

/// Per-cell visibility, with sheet state dominating row/column state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisibilityState {
    pub state: Concealment,
    pub protected: bool,
    pub password_disclosed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Concealment {
    Visible,
    HiddenRow,
    HiddenColumn,
    HiddenSheet,
    VeryHiddenSheet,
}

#[derive(Debug, thiserror::Error)]
pub enum WorkbookError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not an OOXML spreadsheet: {detail}")]
    NotOoxml { path: String, detail: String },
    #[error("malformed archive member {member}: {detail}")]
    MalformedPart { member: String, detail: String },
    #[error("address out of range: {0}")]
    AddressOutOfRange(String),
    #[error("unknown table: {0}")]
    UnknownTable(String),
}

/// Load-time options; `passwords_disclosed` records whether the inspector
/// holds the sheet-protection passwords, and flows into VisibilityState.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub passwords_disclosed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WorkbookModel {
    /// Sheets in workbook tab order.
    pub sheets: Vec<Sheet>,
    pub defined_names: Vec<DefinedName>,
    pub tables: Vec<TableModel>,
    pub passwords_disclosed: bool,
}

impl WorkbookModel {
    pub fn sheet(&self, name: &str) -> Option<&Sheet> {
        self.sheets.iter().find(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn cell(&self, addr: &CellAddress) -> Option<&Cell> {
        self.sheet(&addr.sheet)?.cell(addr.row, addr.col)
    }

    pub fn is_occupied(&self, addr: &CellAddress) -> bool {
        self.cell(addr).is_some_and(Cell::is_occupied)
    }

    /// Every occupied address, in sheet order then row-major order.
    pub fn occupied_cells(&self) -> Vec<CellAddress> {
        let mut out = Vec::new();
        for sheet in &self.sheets {
            for (&(row, col), cell) in &sheet.cells {
                if cell.is_occupied() {
                    out.push(CellAddress::new(sheet.name.clone(), row, col));
                }
            }
        }
        out
    }

    /// Most restrictive visibility applying to the address.
    pub fn visibility(&self, addr: &CellAddress) -> Result<VisibilityState, WorkbookError> {
        let sheet = self
            .sheet(&addr.sheet)
            .ok_or_else(|| WorkbookError::AddressOutOfRange(addr.to_string()))?;
        if addr.row < 1 || addr.row > address::MAX_ROW || addr.col < 1 || addr.col > address::MAX_COL
        {
            return Err(WorkbookError::AddressOutOfRange(addr.to_string()));
        }
        let state = match sheet.state {
            SheetState::VeryHidden => Concealment::VeryHiddenSheet,
            SheetState::Hidden => Concealment::HiddenSheet,
            SheetState::Visible => {
                if sheet.hidden_rows.contains(&addr.row) {
                    Concealment::HiddenRow
                } else if sheet.hidden_cols.contains(&addr.col) {
                    Concealment::HiddenColumn
                } else {
                    Concealment::Visible
                }
            }
        };
        Ok(VisibilityState {
            state,
            protected: sheet.password_protected,
            password_disclosed: self.passwords_disclosed,
        })
    }

    pub fn table(&self, name: &str) -> Option<&TableModel> {
        self.tables.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }

    /// Table whose area contains the address, if any.
    pub fn table_at(&self, addr: &CellAddress) -> Option<&TableModel> {
        self.tables.iter().find(|t| t.area.contains(addr))
    }

    pub fn connection_for_table(
        &self,
        table: &str,
    ) -> Result<Option<&DataConnection>, WorkbookError> {
        self.table(table)
            .map(|t| t.connection.as_ref())
            .ok_or_else(|| WorkbookError::UnknownTable(table.to_string()))
    }

    /// Resolves a defined name for a formula on `host_sheet`: a name scoped
    /// to that sheet wins over a workbook-scoped name. Case-insensitive.
    pub fn defined_name(&self, name: &str, host_sheet: &str) -> Option<&DefinedName> {
        self.defined_names
            .iter()
            .find(|d| {
                d.name.eq_ignore_ascii_case(name)
                    && d.scope.as_deref().is_some_and(|s| s.eq_ignore_ascii_case(host_sheet))
            })
            .or_else(|| {
                self.defined_names
                    .iter()
                    .find(|d| d.name.eq_ignore_ascii_case(name) && d.scope.is_none())
            })
    }

    /// Defined names whose area target covers the address.
    pub fn names_covering(&self, addr: &CellAddress) -> Vec<&DefinedName> {
        self.defined_names
            .iter()
            .filter(|d| matches!(&d.target, NameTarget::Area(a) if a.contains(addr)))
            .collect()
    }
}
