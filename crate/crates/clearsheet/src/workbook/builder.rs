//! Programmatic construction of workbook models, used by tests and by the
//! XLSX loader's assembly stage.

use std::collections::BTreeMap;

use super::address::parse_a1;
use super::{
    AreaRef, Cell, CellValue, DataConnection, DefinedName, NameTarget, Sheet, SheetState,
    TableModel, WorkbookModel,
};

#[derive(Debug, Default)]
pub struct WorkbookBuilder {
    sheets: Vec<Sheet>,
    defined_names: Vec<DefinedName>,
    tables: Vec<PendingTable>,
    passwords_disclosed: bool,
}

#[derive(Debug)]
struct PendingTable {
    name: String,
    area: AreaRef,
    totals_rows: u32,
    connection: Option<DataConnection>,
}

impl WorkbookBuilder {
    pub fn new() -> WorkbookBuilder {
        WorkbookBuilder::default()
    }

    /// Opens (or creates) a sheet; sheets keep insertion order.
    pub fn sheet(&mut self, name: &str) -> SheetHandle<'_> {
        let idx = match self.sheets.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                self.sheets.push(Sheet { name: name.to_string(), ..Sheet::default() });
                self.sheets.len() - 1
            }
        };
        SheetHandle { sheet: &mut self.sheets[idx] }
    }

    pub fn defined_name(
        &mut self,
        name: &str,
        scope: Option<&str>,
        target: NameTarget,
    ) -> &mut Self {
        self.defined_names.push(DefinedName {
            name: name.to_string(),
            scope: scope.map(str::to_string),
            target,
        });
        self
    }

    pub fn table(&mut self, name: &str, area: &str, totals_rows: Option<u32>) -> &mut Self {
        self.tables.push(PendingTable {
            name: name.to_string(),
            area: AreaRef::parse(area).expect("table area"),
            totals_rows: totals_rows.unwrap_or(0),
            connection: None,
        });
        self
    }

    pub fn table_with_connection(
        &mut self,
        name: &str,
        area: &str,
        connection: DataConnection,
    ) -> &mut Self {
        self.tables.push(PendingTable {
            name: name.to_string(),
            area: AreaRef::parse(area).expect("table area"),
            totals_rows: 0,
            connection: Some(connection),
        });
        self
    }

    pub fn passwords_disclosed(&mut self, disclosed: bool) -> &mut Self {
        self.passwords_disclosed = disclosed;
        self
    }

    /// Finalizes the model: table header texts and unit rows are read off
    /// the sheet cells at this point.
    pub fn build(self) -> WorkbookModel {
        let tables = self
            .tables
            .into_iter()
            .map(|t| {
                let sheet = self.sheets.iter().find(|s| s.name == t.area.sheet);
                let header_row = header_texts(sheet, &t.area);
                let uom_row = sheet.and_then(|s| detect_uom_row(s, &t.area));
                TableModel {
                    name: t.name,
                    area: t.area,
                    header_row,
                    uom_row,
                    totals_rows: t.totals_rows,
                    connection: t.connection,
                }
            })
            .collect();
        WorkbookModel {
            sheets: self.sheets,
            defined_names: self.defined_names,
            tables,
            passwords_disclosed: self.passwords_disclosed,
        }
    }
}

fn header_texts(sheet: Option<&Sheet>, area: &AreaRef) -> Vec<String> {
    (area.col1..=area.col2)
        .map(|col| {
            sheet
                .and_then(|s| s.cell(area.row1, col))
                .and_then(|c| c.value.as_text())
                .unwrap_or_default()
                .to_string()
        })
        .collect()
}

/// The row immediately above a table's header row counts as its unit row
/// when every cell across the table's width holds text.
pub(super) fn detect_uom_row(sheet: &Sheet, area: &AreaRef) -> Option<u32> {
    if area.row1 <= 1 {
        return None;
    }
    let row = area.row1 - 1;
    let all_text = (area.col1..=area.col2).all(|col| {
        sheet
            .cell(row, col)
            .is_some_and(|c| c.value.as_text().is_some_and(|t| !t.is_empty()))
    });
    all_text.then_some(row)
}

pub struct SheetHandle<'a> {
    sheet: &'a mut Sheet,
}

impl SheetHandle<'_> {
    fn cell_mut(&mut self, a1: &str) -> &mut Cell {
        let (col, row) = parse_a1(a1).expect("cell address");
        self.sheet.cells.entry((row, col)).or_default()
    }

    pub fn number(mut self, a1: &str, value: f64) -> Self {
        self.cell_mut(a1).value = CellValue::Number(value);
        self
    }

    pub fn text(mut self, a1: &str, value: &str) -> Self {
        self.cell_mut(a1).value = CellValue::Text(value.to_string());
        self
    }

    pub fn boolean(mut self, a1: &str, value: bool) -> Self {
        self.cell_mut(a1).value = CellValue::Bool(value);
        self
    }

    pub fn error(mut self, a1: &str, code: &str) -> Self {
        self.cell_mut(a1).value = CellValue::Error(code.to_string());
        self
    }

    /// Formula text must begin with "="; `cached` is the stored result.
    pub fn formula(mut self, a1: &str, text: &str, cached: CellValue) -> Self {
        assert!(text.starts_with('='), "formula must start with '='");
        let cell = self.cell_mut(a1);
        cell.formula = Some(text.to_string());
        cell.value = cached;
        self
    }

    pub fn format(mut self, a1: &str, code: &str) -> Self {
        self.cell_mut(a1).number_format = code.to_string();
        self
    }

    pub fn comment(mut self, a1: &str, text: &str) -> Self {
        self.cell_mut(a1).comment = Some(text.to_string());
        self
    }

    pub fn validation_message(mut self, a1: &str, message: &str) -> Self {
        self.cell_mut(a1).validation_message = Some(message.to_string());
        self
    }

    pub fn validation_list(mut self, a1: &str, allowed: &[&str]) -> Self {
        self.cell_mut(a1).validation_list =
            Some(allowed.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn freeze(self, rows: u32, cols: u32) -> Self {
        self.sheet.frozen_rows = rows;
        self.sheet.frozen_cols = cols;
        self
    }

    pub fn hide_row(self, row: u32) -> Self {
        self.sheet.hidden_rows.insert(row);
        self
    }

    pub fn hide_col(self, col: u32) -> Self {
        self.sheet.hidden_cols.insert(col);
        self
    }

    pub fn state(self, state: SheetState) -> Self {
        self.sheet.state = state;
        self
    }

    pub fn password_protected(self) -> Self {
        self.sheet.password_protected = true;
        self
    }

    /// Raw cell map access for loader assembly.
    pub fn cells_mut(&mut self) -> &mut BTreeMap<(u32, u32), Cell> {
        &mut self.sheet.cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uom_row_detection() {
        let mut b = WorkbookBuilder::new();
        b.sheet("S")
            .text("A1", "USD")
            .text("B1", "Count")
            .text("A2", "Amount")
            .text("B2", "Qty")
            .number("A3", 10.0)
            .number("B3", 2.0);
        b.table("WithUnits", "S!A2:B3", None);
        let wb = b.build();
        let t = wb.table("WithUnits").unwrap();
        assert_eq!(t.uom_row, Some(1));
        assert_eq!(t.header_row, vec!["Amount", "Qty"]);
        assert_eq!(t.data_area(), AreaRef::parse("S!A3:B3").unwrap());
    }

    #[test]
    fn no_uom_row_when_gap_or_numbers_above() {
        let mut b = WorkbookBuilder::new();
        b.sheet("S")
            .number("A1", 9.0)
            .text("B1", "Count")
            .text("A2", "Amount")
            .text("B2", "Qty")
            .number("A3", 10.0);
        b.table("T", "S!A2:B3", None);
        let wb = b.build();
        assert_eq!(wb.table("T").unwrap().uom_row, None);
    }

    #[test]
    fn header_at_sheet_top_cannot_have_uom_row() {
        let mut b = WorkbookBuilder::new();
        b.sheet("S").text("A1", "H").number("A2", 1.0);
        b.table("T", "S!A1:A2", None);
        assert_eq!(b.build().table("T").unwrap().uom_row, None);
    }

    #[test]
    fn column_index_is_case_insensitive() {
        let mut b = WorkbookBuilder::new();
        b.sheet("S").text("A1", "EBIT").text("B1", "Tax").number("A2", 1.0).number("B2", 2.0);
        b.table("Fin", "S!A1:B2", None);
        let wb = b.build();
        let t = wb.table("Fin").unwrap();
        assert_eq!(t.column_index("tax"), Some(2));
        assert_eq!(t.column_index("none"), None);
    }
}
