//! Deterministic XLSX fixtures for the scorer's oracle ledgers and the
//! CLI integration tests. Every builder returns an [`XlsxAuthor`] so tests
//! can write bytes to wherever they need them; `fixgen` persists the whole
//! set under `crates/clearsheet/tests/fixtures/`.
//!
//! The expected scores live next to each generated workbook in a
//! hand-written `.ledger` file. Keep the two in sync: a builder change
//! invalidates its ledger.

use xlsx_author::{QueryBacking, SheetVisibility, ValidationSpec, Value, XlsxAuthor};

const MONEY: &str = "$#,##0";
const DATE: &str = "mm/dd/yyyy";

fn list_validation(sqref: &str, options: &[&str]) -> ValidationSpec {
    ValidationSpec {
        sqref: sqref.to_string(),
        list: Some(options.iter().map(|s| s.to_string()).collect()),
        list_range: None,
        prompt_title: None,
        prompt: None,
    }
}

/// Fully labeled input grid: subject column, value column, unit/format
/// column. Transparent throughout.
pub fn inputs_grid() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("Inputs");
    sheet.text(1, 1, "Label").text(1, 2, "Value").text(1, 3, "UOM-Format");
    sheet.text(2, 1, "Model Start").number(2, 2, 42736.0).format_code(2, 2, DATE);
    sheet.text(2, 3, "mm/dd/yyyy");
    sheet.text(3, 1, "Model Duration").number(3, 2, 3.0).text(3, 3, "Months");
    sheet.text(4, 1, "Initial Investment").number(4, 2, 100000.0).format_code(4, 2, "#,##0");
    sheet.text(4, 3, "USD");
    author
}

/// VLOOKUP whose final argument is only documented in function help:
/// one inspection step plus one help step.
pub fn lookup_help() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Initial Investment");
    sheet
        .formula(1, 2, "VLOOKUP(A1, A3:B5, 2, FALSE)", Value::Number(100000.0))
        .format_code(1, 2, "#,##0 \"USD\"");
    sheet.text(3, 1, "Model Start").number(3, 2, 42736.0).format_code(3, 2, DATE);
    sheet.text(4, 1, "Model Duration").number(4, 2, 3.0).text(4, 3, "Months");
    sheet.text(5, 1, "Initial Investment").number(5, 2, 100000.0).format_code(5, 2, "#,##0 \"USD\"");
    author
}

fn loan_workbook(header_row: u32) -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let r = header_row;
    {
        let sheet = author.sheet("S");
        sheet.text(1, 1, "Monthly Payment");
        sheet
            .formula(1, 2, "PMT(Rate/MPP, Periods, Loan_Amount)", Value::Number(-2326.0))
            .format_code(1, 2, MONEY);
        sheet.text(r, 1, "Label").text(r, 2, "Value").text(r, 3, "UOM-Format");
        sheet.text(r + 1, 1, "Rate").number(r + 1, 2, 0.05).format_code(r + 1, 2, "0.00%");
        sheet.text(r + 1, 3, "APR");
        sheet.text(r + 2, 1, "Periods").number(r + 2, 2, 48.0).text(r + 2, 3, "Months");
        sheet.text(r + 3, 1, "MPP").number(r + 3, 2, 12.0).text(r + 3, 3, "Months Per Year");
        sheet.text(r + 4, 1, "Loan Amount").number(r + 4, 2, 100000.0);
        sheet.format_code(r + 4, 2, "#,##0 \"USD\"").text(r + 4, 3, "USD");
    }
    author.defined_name("Rate", &format!("S!$B${}", r + 1));
    author.defined_name("Periods", &format!("S!$B${}", r + 2));
    author.defined_name("MPP", &format!("S!$B${}", r + 3));
    author.defined_name("Loan_Amount", &format!("S!$B${}", r + 4));
    author
}

/// Named inputs a few rows below the payment formula; everything shares a
/// window, so names cost nothing.
pub fn pmt_near() -> XlsxAuthor {
    loan_workbook(3)
}

/// Same loan model with the inputs at row 200: four name navigations.
pub fn pmt_far() -> XlsxAuthor {
    loan_workbook(200)
}

/// Table column math by column name over a unit row: transparent.
pub fn structured_income() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "USD").text(1, 2, "USD").text(1, 3, "USD");
    sheet.text(2, 1, "EBIT").text(2, 2, "Tax").text(2, 3, "Net Income");
    sheet.number(3, 1, 1000.0).number(3, 2, -300.0);
    sheet.formula(3, 3, "[@EBIT]+[@Tax]", Value::Number(700.0));
    sheet.number(4, 1, 2000.0).number(4, 2, -600.0);
    sheet.formula(4, 3, "[@EBIT]+[@Tax]", Value::Number(1400.0));
    sheet.table("Income", "A2:C4", &["EBIT", "Tax", "Net Income"], 0);
    author
}

/// Unlabeled magic number multiplied into an unlabeled cell. Opaque twice.
pub fn bare_literal() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.number(11, 1, 500000.0);
    sheet.formula(1, 2, "A11 * 12", Value::Number(6000000.0));
    author
}

fn error_model() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Revenue").number(1, 2, 1000.0).format_code(1, 2, MONEY);
    sheet.text(2, 1, "Staff").number(2, 2, 0.0).text(2, 3, "People");
    sheet.text(3, 1, "Revenue Per Head");
    sheet.formula(3, 2, "B1/B2", Value::Error("#DIV/0!".into()));
    sheet.text(4, 1, "Safe Revenue Per Head");
    sheet.formula(4, 2, "IFERROR(B3, 0)", Value::Number(0.0)).format_code(4, 2, MONEY);
    author
}

/// A `#DIV/0!` whose only dependent wraps it in IFERROR: still finite.
pub fn error_guarded() -> XlsxAuthor {
    error_model()
}

/// The same error cell gains an unguarded dependent, which poisons the
/// error cell and everything downstream of it.
pub fn error_unguarded() -> XlsxAuthor {
    let mut author = error_model();
    let sheet = author.sheet("S");
    sheet.text(5, 1, "Doubled Revenue Per Head");
    sheet.formula(5, 2, "B3*2", Value::Number(0.0)).format_code(5, 2, MONEY);
    author
}

fn indirect_model() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("S");
        sheet.text(1, 1, "Region").text(1, 2, "East");
        sheet.text(2, 1, "Total");
        sheet.formula(2, 2, "SUM(INDIRECT(B1))", Value::Number(10.0)).format_code(2, 2, MONEY);
        sheet.text(1, 4, "East Sales");
        sheet.number(2, 4, 10.0).format_code(2, 4, MONEY);
    }
    author
}

/// INDIRECT over a free-text selector: nothing bounds the target.
pub fn indirect_free() -> XlsxAuthor {
    let mut author = indirect_model();
    author.defined_name("East", "S!$D$1:$D$2");
    author
}

/// The selector cell gains a validation list, so every reachable target
/// is enumerable and the reference stays finite.
pub fn indirect_constrained() -> XlsxAuthor {
    let mut author = indirect_model();
    author.defined_name("East", "S!$D$2");
    author.sheet("S").validation(list_validation("B1", &["East"]));
    author
}

fn scenario_table(author: &mut XlsxAuthor, name: &str, header_row: u32, start: f64, invest: f64) {
    let r = header_row;
    let sheet = author.sheet("Model");
    sheet.text(r, 1, "Label").text(r, 2, "Value").text(r, 3, "UOM-Format");
    sheet.text(r + 1, 1, "Model Start").number(r + 1, 2, start).format_code(r + 1, 2, DATE);
    sheet.text(r + 1, 3, "mm/dd/yyyy");
    sheet.text(r + 2, 1, "Model Duration").number(r + 2, 2, 3.0).text(r + 2, 3, "Months");
    sheet.text(r + 3, 1, "Initial Investment").number(r + 3, 2, invest);
    sheet.format_code(r + 3, 2, "#,##0").text(r + 3, 3, "USD");
    let area = format!("A{}:C{}", r, r + 3);
    author.sheet("Model").table(name, &area, &["Label", "Value", "UOM-Format"], 0);
}

/// Two scenario tables and a selector: VLOOKUP over
/// INDIRECT(OFFSET([#Headers],...)) resolving through a validated table
/// name. Computed but constrained, so every lookup stays finite.
pub fn scenario_selector() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    author.sheet("Model").text(3, 1, "Scenario 1");
    scenario_table(&mut author, "tblScenario1", 5, 42736.0, 100000.0);
    author.sheet("Model").text(11, 1, "Scenario 2");
    scenario_table(&mut author, "tblScenario2", 13, 42887.0, 75000.0);
    let pick = "VLOOKUP([@Label],INDIRECT(OFFSET([#Headers],1,1,1,1)),2,FALSE)";
    {
        let sheet = author.sheet("Model");
        sheet.text(19, 1, "Label").text(19, 2, "Value").text(19, 3, "UOM-Format");
        sheet.text(20, 1, "Scenario").text(20, 2, "tblScenario1");
        sheet.validation(list_validation("B20", &["tblScenario1", "tblScenario2"]));
        sheet.text(21, 1, "Model Start");
        sheet.formula(21, 2, pick, Value::Number(42736.0)).format_code(21, 2, DATE);
        sheet.text(21, 3, "mm/dd/yyyy");
        sheet.text(22, 1, "Model Duration");
        sheet.formula(22, 2, pick, Value::Number(3.0)).text(22, 3, "Months");
        sheet.text(23, 1, "Initial Investment");
        sheet.formula(23, 2, pick, Value::Number(100000.0)).format_code(23, 2, "#,##0");
        sheet.text(23, 3, "USD");
        sheet.table("tblSelected", "A19:C23", &["Label", "Value", "UOM-Format"], 0);
    }
    author
}

/// PMT fed with raw literals; `nper` has no sufficient help text, so the
/// cell goes opaque even though the result itself is labeled.
pub fn literal_params() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Monthly Payment");
    sheet.formula(1, 2, "PMT(0.004, 48, 100000)", Value::Number(-2326.0)).format_code(1, 2, MONEY);
    author
}

/// A named constant in a formula: inspecting the name costs one step.
pub fn named_constant() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("S");
        sheet.text(1, 1, "Annual Total");
        sheet.formula(1, 2, "Monthly_Total*MPY", Value::Number(1200.0)).format_code(1, 2, MONEY);
        sheet.text(2, 1, "Monthly Total").number(2, 2, 100.0).format_code(2, 2, MONEY);
    }
    author.defined_name("Monthly_Total", "S!$B$2");
    author.defined_name("MPY", "12");
    author
}

/// A precedent on a hidden row: unhiding costs reveal steps on the source
/// cell and on everything that reads it.
pub fn hidden_row() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Rent With Fees");
    sheet.formula(1, 2, "B5+B5", Value::Number(1600.0)).format_code(1, 2, MONEY);
    sheet.text(5, 1, "Base Rent").number(5, 2, 800.0).format_code(5, 2, MONEY);
    sheet.hide_row(5);
    author
}

/// A reference into a very-hidden sheet. The UI offers no path there, so
/// the source is out of reach entirely.
pub fn very_hidden() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("S");
        sheet.text(1, 1, "Total");
        sheet.formula(1, 2, "Hidden!B1", Value::Number(5.0)).format_code(1, 2, MONEY);
    }
    {
        let sheet = author.sheet("Hidden");
        sheet.text(1, 1, "Base").number(1, 2, 5.0).format_code(1, 2, MONEY);
        sheet.visibility(SheetVisibility::VeryHidden);
    }
    author
}

/// A password-protected sheet audited without the password.
pub fn protected() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("P");
    sheet.text(1, 1, "Total").number(1, 2, 5.0).format_code(1, 2, MONEY);
    sheet.protect_with_password();
    author
}

/// A bare number labeled only through its cell comment.
pub fn comment_label() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.number(1, 2, 0.05).comment(1, 2, "Interest Rate in APR");
    author
}

/// Two cells that reference each other, plus a bystander reading one of
/// them. The cycle members go opaque; the bystander stays finite.
pub fn cycle_pair() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Alpha");
    sheet.formula(1, 2, "B2", Value::Number(0.0)).format_code(1, 2, MONEY);
    sheet.text(2, 1, "Beta");
    sheet.formula(2, 2, "B1", Value::Number(0.0)).format_code(2, 2, MONEY);
    sheet.text(3, 1, "Gamma");
    sheet.formula(3, 2, "B1", Value::Number(0.0)).format_code(3, 2, MONEY);
    author
}

/// A comment-labeled base value mirrored twice, then summed.
pub fn chain_shared() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.number(1, 2, 10.0).comment(1, 2, "Base Price in USD");
    sheet.text(2, 1, "Mirror");
    sheet.formula(2, 2, "B1", Value::Number(10.0)).format_code(2, 2, "$#,##0.00");
    sheet.text(3, 1, "Copy");
    sheet.formula(3, 2, "B1", Value::Number(10.0)).format_code(3, 2, "$#,##0.00");
    sheet.text(4, 1, "Total");
    sheet.formula(4, 2, "SUM(B2:B3)", Value::Number(20.0)).format_code(4, 2, "$#,##0.00");
    author
}

/// A Power Query backed table: one step to open the query definition.
pub fn tables_import() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Part").text(1, 2, "Price");
    sheet.text(2, 1, "Widget").number(2, 2, 9.5).format_code(2, 2, "$#,##0.00");
    sheet.text(3, 1, "Gadget").number(3, 2, 12.0).format_code(3, 2, "$#,##0.00");
    sheet.query_table(
        "Imported",
        "A1:B3",
        &["Part", "Price"],
        QueryBacking {
            connection_string: "Provider=Microsoft.Mashup.OleDb.1;Data Source=$Workbook$".into(),
            command_text: "let Source = Csv.Document(File.Contents(\"parts.csv\")) in Source".into(),
        },
    );
    author
}

/// An MS Query (ODBC) backed table with identity, date, and money columns.
pub fn data_import() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Account #").text(1, 2, "Posted").text(1, 3, "Debit");
    sheet.number(2, 1, 510.0).number(2, 2, 42764.0).format_code(2, 2, DATE);
    sheet.number(2, 3, 8838.0).format_code(2, 3, MONEY);
    sheet.number(3, 1, 511.0).number(3, 2, 42765.0).format_code(3, 2, DATE);
    sheet.number(3, 3, 120.0).format_code(3, 3, MONEY);
    sheet.query_table(
        "Ledger",
        "A1:C3",
        &["Account #", "Posted", "Debit"],
        QueryBacking {
            connection_string: "DSN=LedgerDB;UID=report;".into(),
            command_text: "SELECT account, posted, debit FROM ledger".into(),
        },
    );
    author
}

/// A cell that only forwards a value from another sheet.
pub fn daisy_remote() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    {
        let sheet = author.sheet("S");
        sheet.text(1, 1, "Price");
        sheet.formula(1, 2, "Data!B7", Value::Number(12.0)).format_code(1, 2, MONEY);
    }
    {
        let sheet = author.sheet("Data");
        sheet.text(7, 1, "Price").number(7, 2, 12.0).format_code(7, 2, MONEY);
    }
    author
}

fn tall_column(frozen: bool) -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 2, "Price");
    sheet.number(300, 2, 12.0).format_code(300, 2, MONEY);
    if frozen {
        sheet.freeze(1, 0);
    }
    author
}

/// A column header 300 rows above its data with no frozen panes: the
/// subject scrolls away and the value goes opaque.
pub fn freeze_off() -> XlsxAuthor {
    tall_column(false)
}

/// The same column with row 1 frozen: the header is always on screen.
pub fn freeze_on() -> XlsxAuthor {
    tall_column(true)
}

/// A value whose only label lives on a documentation sheet, keyed by the
/// cell address.
pub fn doc_sheet() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    author.sheet("S").number(1, 2, 0.05);
    author.sheet("Notes").text(1, 1, "S!B1").text(1, 2, "Discount Rate in APR");
    author
}

/// A SUM over a well-labeled area far below the formula.
pub fn area_nav_far() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Total Sales");
    sheet.formula(1, 2, "SUM(D300:D301)", Value::Number(12.0)).format_code(1, 2, MONEY);
    sheet.text(299, 4, "Region Sales");
    sheet.number(300, 4, 5.0).format_code(300, 4, MONEY);
    sheet.number(301, 4, 7.0).format_code(301, 4, MONEY);
    author
}

/// Same bytes as [`area_nav_far`]; its ledger widens the vicinity until
/// the area is co-visible and the navigation step disappears.
pub fn area_nav_wide() -> XlsxAuthor {
    area_nav_far()
}

/// A shared formula host plus a member cell that the loader expands.
pub fn shared_formula() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Subtotal").text(1, 2, "Fees").text(1, 3, "Total");
    sheet.number(2, 1, 100.0).format_code(2, 1, MONEY);
    sheet.number(2, 2, 5.0).format_code(2, 2, MONEY);
    sheet.shared_formula_host(2, 3, "A2+B2", 0, "C2:C3", Value::Number(105.0));
    sheet.format_code(2, 3, MONEY);
    sheet.number(3, 1, 200.0).format_code(3, 1, MONEY);
    sheet.number(3, 2, 7.0).format_code(3, 2, MONEY);
    sheet.shared_formula_member(3, 3, 0, Value::Number(207.0));
    sheet.format_code(3, 3, MONEY);
    author
}

/// A formula the parser rejects: the source side cannot be audited.
pub fn parse_fail() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Broken");
    sheet.formula(1, 2, "XYZ(((", Value::Number(0.0)).format_code(1, 2, MONEY);
    author
}

/// A money cell labeled only through its number format; the ledger runs
/// it under strict labels, where formats stop counting as units.
pub fn strict_formats() -> XlsxAuthor {
    let mut author = XlsxAuthor::new();
    let sheet = author.sheet("S");
    sheet.text(1, 1, "Rent").number(1, 2, 800.0).format_code(1, 2, MONEY);
    author
}

/// Every fixture, paired with the stem used for its `.xlsx` and `.ledger`
/// files.
pub fn all() -> Vec<(&'static str, XlsxAuthor)> {
    vec![
        ("inputs_grid", inputs_grid()),
        ("lookup_help", lookup_help()),
        ("pmt_near", pmt_near()),
        ("pmt_far", pmt_far()),
        ("structured_income", structured_income()),
        ("bare_literal", bare_literal()),
        ("error_guarded", error_guarded()),
        ("error_unguarded", error_unguarded()),
        ("indirect_free", indirect_free()),
        ("indirect_constrained", indirect_constrained()),
        ("scenario_selector", scenario_selector()),
        ("literal_params", literal_params()),
        ("named_constant", named_constant()),
        ("hidden_row", hidden_row()),
        ("very_hidden", very_hidden()),
        ("protected", protected()),
        ("comment_label", comment_label()),
        ("cycle_pair", cycle_pair()),
        ("chain_shared", chain_shared()),
        ("tables_import", tables_import()),
        ("data_import", data_import()),
        ("daisy_remote", daisy_remote()),
        ("freeze_off", freeze_off()),
        ("freeze_on", freeze_on()),
        ("doc_sheet", doc_sheet()),
        ("area_nav_far", area_nav_far()),
        ("area_nav_wide", area_nav_wide()),
        ("shared_formula", shared_formula()),
        ("parse_fail", parse_fail()),
        ("strict_formats", strict_formats()),
    ]
}

/// Writes every fixture into `dir` as `<stem>.xlsx`.
pub fn write_all(dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (stem, author) in all() {
        author.save(&dir.join(format!("{stem}.xlsx")))?;
    }
    Ok(())
}
