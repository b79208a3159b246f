//! Round-trip coverage for the XLSX loader: author a package with
//! `xlsx-author`, load it back, and check the model piece by piece.

use clearsheet::workbook::{
    load_workbook, CellAddress, CellValue, Concealment, ConnectionKind, LoadOptions, NameTarget,
    SheetState, WorkbookError, WorkbookModel,
};
use xlsx_author::{QueryBacking, SheetVisibility, ValidationSpec, Value, XlsxAuthor};

fn load(author: &XlsxAuthor) -> WorkbookModel {
    load_with(author, LoadOptions::default())
}

fn load_with(author: &XlsxAuthor, options: LoadOptions) -> WorkbookModel {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("book.xlsx");
    author.save(&path).unwrap();
    load_workbook(&path, options).unwrap()
}

fn addr(s: &str) -> CellAddress {
    CellAddress::parse(s).unwrap()
}

#[test]
fn values_formats_and_formulas_round_trip() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Sheet1");
        sheet.number(1, 1, 42.5);
        sheet.text(2, 1, "Revenue");
        sheet.inline_text(3, 1, "inline note");
        sheet.boolean(4, 1, true);
        sheet.error(5, 1, "#DIV/0!");
        sheet.formula(1, 2, "A1*2", Value::Number(85.0));
        sheet.number(1, 3, 1500.0);
        sheet.format_code(1, 3, "$#,##0.00");
        sheet.number(2, 3, 45000.0);
        sheet.format_builtin(2, 3, 14);
    }
    let wb = load(&author);
    let s = wb.sheet("Sheet1").unwrap();

    assert_eq!(s.cell(1, 1).unwrap().value, CellValue::Number(42.5));
    assert_eq!(s.cell(2, 1).unwrap().value, CellValue::Text("Revenue".into()));
    assert_eq!(s.cell(3, 1).unwrap().value, CellValue::Text("inline note".into()));
    assert_eq!(s.cell(4, 1).unwrap().value, CellValue::Bool(true));
    assert_eq!(s.cell(5, 1).unwrap().value, CellValue::Error("#DIV/0!".into()));

    let b1 = s.cell(1, 2).unwrap();
    assert_eq!(b1.formula.as_deref(), Some("=A1*2"));
    assert_eq!(b1.value, CellValue::Number(85.0));

    assert_eq!(s.cell(1, 3).unwrap().number_format, "$#,##0.00");
    assert_eq!(s.cell(2, 3).unwrap().number_format, "mm/dd/yyyy");
    assert_eq!(s.cell(1, 1).unwrap().number_format, "General");
}

#[test]
fn shared_formulas_translate_per_member() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Sheet1");
        sheet.number(2, 1, 1.0);
        sheet.number(3, 1, 2.0);
        sheet.number(4, 1, 3.0);
        sheet.shared_formula_host(2, 2, "A2*12", 0, "B2:B4", Value::Number(12.0));
        sheet.shared_formula_member(3, 2, 0, Value::Number(24.0));
        sheet.shared_formula_member(4, 2, 0, Value::Number(36.0));
        sheet.shared_formula_host(2, 3, "$A$2+B2", 1, "C2:C3", Value::Number(13.0));
        sheet.shared_formula_member(3, 3, 1, Value::Number(26.0));
    }
    let wb = load(&author);
    let s = wb.sheet("Sheet1").unwrap();

    assert_eq!(s.cell(2, 2).unwrap().formula.as_deref(), Some("=A2*12"));
    assert_eq!(s.cell(3, 2).unwrap().formula.as_deref(), Some("=A3*12"));
    assert_eq!(s.cell(4, 2).unwrap().formula.as_deref(), Some("=A4*12"));
    assert_eq!(s.cell(3, 2).unwrap().value, CellValue::Number(24.0));
    assert_eq!(s.cell(2, 3).unwrap().formula.as_deref(), Some("=$A$2+B2"));
    assert_eq!(s.cell(3, 3).unwrap().formula.as_deref(), Some("=$A$2+B3"));
}

#[test]
fn array_formula_covers_every_cell_in_its_range() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Sheet1");
        sheet.number(1, 1, 10.0);
        sheet.number(2, 1, 20.0);
        sheet.array_formula(1, 4, "A1:A2*2", "D1:D2", Value::Number(20.0));
        sheet.number(2, 4, 40.0);
    }
    let wb = load(&author);
    let s = wb.sheet("Sheet1").unwrap();
    assert_eq!(s.cell(1, 4).unwrap().formula.as_deref(), Some("=A1:A2*2"));
    assert_eq!(s.cell(2, 4).unwrap().formula.as_deref(), Some("=A1:A2*2"));
    assert_eq!(s.cell(2, 4).unwrap().value, CellValue::Number(40.0));
}

#[test]
fn visibility_freeze_and_protection_round_trip() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Main");
        sheet.number(5, 2, 1.0);
        sheet.number(6, 3, 2.0);
        sheet.freeze(1, 2);
        sheet.hide_row(5);
        sheet.hide_col(3);
    }
    author.sheet("Backing").visibility(SheetVisibility::Hidden).number(1, 1, 9.0);
    author.sheet("Engine").visibility(SheetVisibility::VeryHidden).number(1, 1, 8.0);
    author.sheet("Locked").protect_with_password().number(1, 1, 7.0);

    let wb = load(&author);
    let main = wb.sheet("Main").unwrap();
    assert_eq!((main.frozen_rows, main.frozen_cols), (1, 2));
    assert!(main.hidden_rows.contains(&5));
    assert!(main.hidden_cols.contains(&3));
    assert_eq!(wb.sheet("Backing").unwrap().state, SheetState::Hidden);
    assert_eq!(wb.sheet("Engine").unwrap().state, SheetState::VeryHidden);
    assert!(wb.sheet("Locked").unwrap().password_protected);

    assert_eq!(wb.visibility(&addr("Main!B5")).unwrap().state, Concealment::HiddenRow);
    assert_eq!(wb.visibility(&addr("Main!C6")).unwrap().state, Concealment::HiddenColumn);
    assert_eq!(wb.visibility(&addr("Backing!A1")).unwrap().state, Concealment::HiddenSheet);
    assert_eq!(wb.visibility(&addr("Engine!A1")).unwrap().state, Concealment::VeryHiddenSheet);

    let locked = wb.visibility(&addr("Locked!A1")).unwrap();
    assert!(locked.protected && !locked.password_disclosed);

    let wb2 = load_with(&author, LoadOptions { passwords_disclosed: true });
    assert!(wb2.visibility(&addr("Locked!A1")).unwrap().password_disclosed);
}

#[test]
fn validations_and_comments_round_trip() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Inputs");
        sheet.text(1, 3, "Scenario");
        sheet.text(2, 3, "Alpha");
        sheet.validation(ValidationSpec {
            sqref: "C2".into(),
            list: Some(vec!["Alpha".into(), "Beta".into()]),
            list_range: None,
            prompt_title: Some("Scenario".into()),
            prompt: Some("Choose a scenario".into()),
        });
        sheet.text(2, 4, "Green");
        sheet.validation(ValidationSpec {
            sqref: "D2".into(),
            list: None,
            list_range: Some("Lists!$A$1:$A$3".into()),
            prompt_title: None,
            prompt: None,
        });
        sheet.comment(1, 3, "Selector for the model run");
    }
    {
        let lists = author.sheet("Lists");
        lists.text(1, 1, "Red");
        lists.text(2, 1, "Green");
        lists.text(3, 1, "Blue");
    }
    let wb = load(&author);
    let inputs = wb.sheet("Inputs").unwrap();

    let c2 = inputs.cell(2, 3).unwrap();
    assert_eq!(c2.validation_list.as_deref(), Some(&["Alpha".to_string(), "Beta".to_string()][..]));
    assert_eq!(c2.validation_message.as_deref(), Some("Choose a scenario"));

    let d2 = inputs.cell(2, 4).unwrap();
    assert_eq!(
        d2.validation_list.as_deref(),
        Some(&["Red".to_string(), "Green".to_string(), "Blue".to_string()][..])
    );

    assert_eq!(inputs.cell(1, 3).unwrap().comment.as_deref(), Some("Selector for the model run"));
}

#[test]
fn tables_uom_rows_and_connections_round_trip() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Data");
        // Unit row directly above the header row.
        sheet.text(1, 1, "Each");
        sheet.text(1, 2, "USD");
        sheet.text(2, 1, "Item");
        sheet.text(2, 2, "Price");
        sheet.text(3, 1, "Widget");
        sheet.number(3, 2, 9.5);
        sheet.table("Inventory", "A2:B3", &["Item", "Price"], 0);

        sheet.text(10, 1, "Account");
        sheet.text(10, 2, "Balance");
        sheet.text(11, 1, "1001");
        sheet.number(11, 2, 250.0);
        sheet.query_table(
            "Imported",
            "A10:B11",
            &["Account", "Balance"],
            QueryBacking {
                connection_string: "Provider=Microsoft.Mashup.OleDb.1;Data Source=$Workbook$".into(),
                command_text: "SELECT * FROM [Query1]".into(),
            },
        );
    }
    let wb = load(&author);

    let inv = wb.table("Inventory").unwrap();
    assert_eq!(inv.header_row, vec!["Item", "Price"]);
    assert_eq!(inv.header_row_index(), 2);
    assert_eq!(inv.uom_row, Some(1));
    assert!(inv.connection.is_none());
    assert_eq!(wb.table_at(&addr("Data!B3")).map(|t| t.name.as_str()), Some("Inventory"));

    let imported = wb.table("Imported").unwrap();
    assert_eq!(imported.uom_row, None);
    let conn = imported.connection.as_ref().unwrap();
    assert_eq!(conn.kind, ConnectionKind::PowerQuery);
    assert_eq!(conn.definition, "SELECT * FROM [Query1]");
    assert_eq!(
        wb.connection_for_table("Imported").unwrap().map(|c| c.kind),
        Some(ConnectionKind::PowerQuery)
    );
}

#[test]
fn ms_query_connection_kind() {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("Data");
        sheet.text(1, 1, "Region");
        sheet.text(2, 1, "West");
        sheet.query_table(
            "Extract",
            "A1:A2",
            &["Region"],
            QueryBacking {
                connection_string: "DSN=SalesWarehouse;UID=reader".into(),
                command_text: "SELECT Region FROM Sales".into(),
            },
        );
    }
    let wb = load(&author);
    let conn = wb.table("Extract").unwrap().connection.as_ref().unwrap();
    assert_eq!(conn.kind, ConnectionKind::MsQuery);
}

#[test]
fn defined_names_round_trip() {
    let mut author = XlsxAuthor::new();
    author.sheet("Sheet1").number(1, 2, 250000.0).number(2, 2, 0.0575);
    author.defined_name("Loan_Amount", "Sheet1!$B$1");
    author.defined_name_scoped("Rate", "Sheet1!$B$2", "Sheet1");
    author.defined_name("MPP", "12");
    author.defined_name("Annualized", "Sheet1!$B$1*12");

    let wb = load(&author);

    match &wb.defined_name("Loan_Amount", "Sheet1").unwrap().target {
        NameTarget::Area(a) => assert_eq!(a.top_left().a1(), "B1"),
        other => panic!("expected area target, got {other:?}"),
    }
    let rate = wb.defined_name("Rate", "Sheet1").unwrap();
    assert_eq!(rate.scope.as_deref(), Some("Sheet1"));
    assert!(matches!(&wb.defined_name("MPP", "Sheet1").unwrap().target, NameTarget::Constant(c) if c == "12"));
    assert!(matches!(&wb.defined_name("Annualized", "Sheet1").unwrap().target, NameTarget::Formula(_)));

    let covering = wb.names_covering(&addr("Sheet1!B1"));
    assert!(covering.iter().any(|n| n.name == "Loan_Amount"));
}

#[test]
fn occupied_cells_follow_sheet_then_row_major_order() {
    let mut author = XlsxAuthor::new();
    author.sheet("Second");
    {
        let sheet = author.sheet("First");
        sheet.number(2, 1, 1.0);
        sheet.number(1, 2, 2.0);
        sheet.number(1, 1, 3.0);
    }
    author.sheet("Second").number(1, 1, 4.0);

    let wb = load(&author);
    assert_eq!(wb.sheets[0].name, "Second");
    let order: Vec<String> = wb.occupied_cells().iter().map(|a| a.to_string()).collect();
    assert_eq!(order, vec!["Second!A1", "First!A1", "First!B1", "First!A2"]);
}

#[test]
fn non_xlsx_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();

    let not_zip = dir.path().join("notes.txt");
    std::fs::write(&not_zip, "just text").unwrap();
    assert!(matches!(
        load_workbook(&not_zip, LoadOptions::default()),
        Err(WorkbookError::NotOoxml { .. })
    ));

    let missing = dir.path().join("absent.xlsx");
    assert!(matches!(
        load_workbook(&missing, LoadOptions::default()),
        Err(WorkbookError::Io { .. })
    ));

    // A zip without xl/workbook.xml is not a workbook.
    let stray = dir.path().join("stray.xlsx");
    {
        let file = std::fs::File::create(&stray).unwrap();
        let mut zip = zip::ZipWriter::new(file);
        let opts = zip::write::SimpleFileOptions::default();
        zip.start_file("hello.txt", opts).unwrap();
        std::io::Write::write_all(&mut zip, b"hi").unwrap();
        zip.finish().unwrap();
    }
    assert!(matches!(
        load_workbook(&stray, LoadOptions::default()),
        Err(WorkbookError::NotOoxml { .. })
    ));
}

/// A package written by another producer: rich-text shared strings and a
/// built-in (id-only) number format.
#[test]
fn foreign_package_with_rich_text_and_builtin_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("foreign.xlsx");
    {
        let file = std::fs::File::create(&path).unwrap();
        let mut zip = zip::ZipWriter::new(file);
        let opts = zip::write::SimpleFileOptions::default();
        let mut put = |name: &str, body: &str| {
            zip.start_file(name, opts).unwrap();
            std::io::Write::write_all(&mut zip, body.as_bytes()).unwrap();
        };
        put(
            "[Content_Types].xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">
<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>
<Default Extension="xml" ContentType="application/xml"/>
<Override PartName="/xl/workbook.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>
<Override PartName="/xl/worksheets/sheet1.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>
<Override PartName="/xl/sharedStrings.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sharedStrings+xml"/>
<Override PartName="/xl/styles.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.styles+xml"/>
</Types>"#,
        );
        put(
            "_rels/.rels",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>
</Relationships>"#,
        );
        put(
            "xl/workbook.xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<workbook xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships">
<sheets><sheet name="Report" sheetId="1" r:id="rId1"/></sheets>
</workbook>"#,
        );
        put(
            "xl/_rels/workbook.xml.rels",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" Target="worksheets/sheet1.xml"/>
</Relationships>"#,
        );
        put(
            "xl/sharedStrings.xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<sst xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" count="1" uniqueCount="1">
<si><r><rPr><b val="1"/></rPr><t>Net </t></r><r><t>Income</t></r></si>
</sst>"#,
        );
        put(
            "xl/styles.xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<styleSheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">
<cellXfs count="2"><xf numFmtId="0" fontId="0" fillId="0" borderId="0"/><xf numFmtId="9" fontId="0" fillId="0" borderId="0" applyNumberFormat="1"/></cellXfs>
</styleSheet>"#,
        );
        put(
            "xl/worksheets/sheet1.xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<worksheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">
<sheetData>
<row r="1"><c r="A1" t="s"><v>0</v></c><c r="B1" s="1"><v>0.125</v></c></row>
</sheetData>
</worksheet>"#,
        );
        zip.finish().unwrap();
    }
    let wb = load_workbook(&path, LoadOptions::default()).unwrap();
    let s = wb.sheet("Report").unwrap();
    assert_eq!(s.cell(1, 1).unwrap().value, CellValue::Text("Net Income".into()));
    assert_eq!(s.cell(1, 2).unwrap().number_format, "0%");
}
