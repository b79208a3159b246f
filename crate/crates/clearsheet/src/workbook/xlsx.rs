//! XLSX (OOXML SpreadsheetML) reader.
//!
//! Reads the zip container with `zip` and each XML part with `roxmltree`,
//! assembling the immutable workbook model. Handles shared strings (plain
//! and rich-text runs), inline strings, number formats (built-in ids and
//! custom codes), shared and array formulas (expanded per covered cell),
//! frozen panes, hidden rows/columns/sheets, sheet protection, data
//! validations (inline and range-sourced lists), comments, tables with
//! unit rows, and query-table connections.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use roxmltree::{Document, Node};
use zip::ZipArchive;

use super::address::{parse_a1, AreaRef, MAX_COL, MAX_ROW};
use super::builder::detect_uom_row;
use super::{
    CellValue, ConnectionKind, DataConnection, DefinedName, LoadOptions, NameTarget, Sheet,
    SheetState, TableModel, WorkbookError, WorkbookModel,
};
use crate::formula::{self, translate_formula, Expr, LitValue};

pub fn load_workbook(path: &Path, options: LoadOptions) -> Result<WorkbookModel, WorkbookError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path)
        .map_err(|source| WorkbookError::Io { path: display.clone(), source })?;
    let mut zip = ZipArchive::new(std::io::BufReader::new(file))
        .map_err(|e| WorkbookError::NotOoxml { path: display.clone(), detail: e.to_string() })?;

    let workbook_xml = read_member(&mut zip, "xl/workbook.xml").map_err(|_| {
        WorkbookError::NotOoxml { path: display.clone(), detail: "missing xl/workbook.xml".into() }
    })?;
    let wb_rels = read_member(&mut zip, "xl/_rels/workbook.xml.rels")
        .map(|xml| parse_rels(&xml, "xl/_rels/workbook.xml.rels"))
        .unwrap_or_else(|_| Ok(Vec::new()))?;

    let shared_strings = match read_member(&mut zip, "xl/sharedStrings.xml") {
        Ok(xml) => parse_shared_strings(&xml)?,
        Err(_) => Vec::new(),
    };
    let style_formats = match read_member(&mut zip, "xl/styles.xml") {
        Ok(xml) => parse_styles(&xml)?,
        Err(_) => Vec::new(),
    };
    let connections = match read_member(&mut zip, "xl/connections.xml") {
        Ok(xml) => parse_connections(&xml)?,
        Err(_) => BTreeMap::new(),
    };

    let wb_doc = Document::parse(&workbook_xml)
        .map_err(|e| malformed("xl/workbook.xml", &e.to_string()))?;

    // Sheet list in tab order.
    let mut sheet_entries: Vec<(String, SheetState, Option<String>)> = Vec::new();
    for node in descendants_named(&wb_doc, "sheet") {
        let name = node.attribute("name").unwrap_or("").to_string();
        if name.is_empty() {
            return Err(malformed("xl/workbook.xml", "sheet without a name"));
        }
        let state = match node.attribute("state") {
            Some("hidden") => SheetState::Hidden,
            Some("veryHidden") => SheetState::VeryHidden,
            _ => SheetState::Visible,
        };
        let rid = node
            .attributes()
            .find(|a| a.name() == "id")
            .map(|a| a.value().to_string());
        sheet_entries.push((name, state, rid));
    }
    if sheet_entries.is_empty() {
        return Err(malformed("xl/workbook.xml", "no sheets declared"));
    }

    let mut sheets = Vec::new();
    let mut pending_list_ranges: Vec<(usize, String, Vec<(u32, u32)>)> = Vec::new();
    let mut pending_tables: Vec<(usize, String)> = Vec::new();

    for (index, (name, state, rid)) in sheet_entries.iter().enumerate() {
        let target = rid
            .as_ref()
            .and_then(|rid| wb_rels.iter().find(|r| &r.id == rid))
            .map(|r| join_path("xl", &r.target))
            .unwrap_or_else(|| format!("xl/worksheets/sheet{}.xml", index + 1));
        let xml = read_member(&mut zip, &target)
            .map_err(|_| malformed(&target, "worksheet part missing"))?;
        let rels_path = rels_path_for(&target);
        let sheet_rels = match read_member(&mut zip, &rels_path) {
            Ok(rxml) => parse_rels(&rxml, &rels_path)?,
            Err(_) => Vec::new(),
        };

        let mut sheet = Sheet { name: name.clone(), state: *state, ..Sheet::default() };
        let parsed = parse_worksheet(&xml, &target, &shared_strings, &style_formats, &mut sheet)?;

        for (sqref_cells, range_text) in parsed.pending_list_ranges {
            pending_list_ranges.push((index, range_text, sqref_cells));
        }

        // Comments come from a related part.
        for rel in &sheet_rels {
            if rel.rtype.ends_with("/comments") {
                let part = join_path(parent_dir(&target), &rel.target);
                if let Ok(cxml) = read_member(&mut zip, &part) {
                    for (a1, text) in parse_comments(&cxml, &part)? {
                        if let Some((col, row)) = parse_a1(&a1) {
                            sheet.cells.entry((row, col)).or_default().comment = Some(text);
                        }
                    }
                }
            }
        }
        for rid in &parsed.table_rids {
            if let Some(rel) = sheet_rels.iter().find(|r| &r.id == rid) {
                pending_tables.push((index, join_path(parent_dir(&target), &rel.target)));
            }
        }
        sheets.push(sheet);
    }

    // Range-sourced validation lists need every sheet loaded first.
    let interim = WorkbookModel {
        sheets,
        defined_names: Vec::new(),
        tables: Vec::new(),
        passwords_disclosed: options.passwords_disclosed,
    };
    let mut resolved_lists: Vec<(usize, Vec<(u32, u32)>, Vec<String>)> = Vec::new();
    for (sheet_idx, range_text, cells) in &pending_list_ranges {
        let host_sheet = interim.sheets[*sheet_idx].name.clone();
        if let Some(area) = parse_area_text(&range_text.replace('$', ""), &host_sheet) {
            let mut values = Vec::new();
            for addr in area.cells() {
                if let Some(cell) = interim.cell(&addr) {
                    if !cell.value.is_empty() {
                        values.push(cell.value.display_text());
                    }
                }
            }
            resolved_lists.push((*sheet_idx, cells.clone(), values));
        }
    }
    let mut wb = interim;
    for (sheet_idx, cells, values) in resolved_lists {
        for (row, col) in cells {
            wb.sheets[sheet_idx].cells.entry((row, col)).or_default().validation_list =
                Some(values.clone());
        }
    }

    // Tables, their query backings, and unit rows.
    for (sheet_idx, table_part) in pending_tables {
        let xml = read_member(&mut zip, &table_part)
            .map_err(|_| malformed(&table_part, "table part missing"))?;
        let doc =
            Document::parse(&xml).map_err(|e| malformed(&table_part, &e.to_string()))?;
        let root = doc.root_element();
        let name = root
            .attribute("displayName")
            .or_else(|| root.attribute("name"))
            .unwrap_or("")
            .to_string();
        let area_text = root.attribute("ref").unwrap_or("");
        let sheet_name = wb.sheets[sheet_idx].name.clone();
        let area = parse_area_text(area_text, &sheet_name)
            .ok_or_else(|| malformed(&table_part, "bad table ref"))?;
        let totals_rows = root
            .attribute("totalsRowCount")
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        let header_row: Vec<String> = descendants_named(&doc, "tableColumn")
            .filter_map(|n| n.attribute("name").map(str::to_string))
            .collect();
        let is_query = root.attribute("tableType") == Some("queryTable");

        let mut connection = None;
        if is_query {
            let trels_path = rels_path_for(&table_part);
            if let Ok(rxml) = read_member(&mut zip, &trels_path) {
                for rel in parse_rels(&rxml, &trels_path)? {
                    if rel.rtype.ends_with("/queryTable") {
                        let qpart = join_path(parent_dir(&table_part), &rel.target);
                        if let Ok(qxml) = read_member(&mut zip, &qpart) {
                            let qdoc = Document::parse(&qxml)
                                .map_err(|e| malformed(&qpart, &e.to_string()))?;
                            if let Some(cid) = qdoc
                                .root_element()
                                .attribute("connectionId")
                                .and_then(|v| v.parse::<u32>().ok())
                            {
                                connection = connections.get(&cid).cloned();
                            }
                        }
                    }
                }
            }
        }

        let uom_row = detect_uom_row(&wb.sheets[sheet_idx], &area);
        wb.tables.push(TableModel {
            name,
            area,
            header_row,
            uom_row,
            totals_rows,
            connection,
        });
    }

    wb.defined_names = parse_defined_names(&wb_doc, &sheet_entries);
    Ok(wb)
}

fn malformed(member: &str, detail: &str) -> WorkbookError {
    WorkbookError::MalformedPart { member: member.to_string(), detail: detail.to_string() }
}

fn read_member<R: Read + std::io::Seek>(
    zip: &mut ZipArchive<R>,
    name: &str,
) -> Result<String, WorkbookError> {
    let mut file = zip
        .by_name(name)
        .map_err(|e| malformed(name, &e.to_string()))?;
    let mut content = String::new();
    file.read_to_string(&mut content)
        .map_err(|e| malformed(name, &e.to_string()))?;
    Ok(content)
}

struct Rel {
    id: String,
    rtype: String,
    target: String,
}

fn parse_rels(xml: &str, member: &str) -> Result<Vec<Rel>, WorkbookError> {
    let doc = Document::parse(xml).map_err(|e| malformed(member, &e.to_string()))?;
    Ok(descendants_named(&doc, "Relationship")
        .map(|n| Rel {
            id: n.attribute("Id").unwrap_or("").to_string(),
            rtype: n.attribute("Type").unwrap_or("").to_string(),
            target: n.attribute("Target").unwrap_or("").to_string(),
        })
        .collect())
}

fn descendants_named<'a>(
    doc: &'a Document<'a>,
    name: &'a str,
) -> impl Iterator<Item = Node<'a, 'a>> {
    doc.descendants().filter(move |n| n.is_element() && n.tag_name().name() == name)
}

fn parent_dir(part: &str) -> &str {
    part.rsplit_once('/').map(|(d, _)| d).unwrap_or("")
}

fn rels_path_for(part: &str) -> String {
    match part.rsplit_once('/') {
        Some((dir, file)) => format!("{dir}/_rels/{file}.rels"),
        None => format!("_rels/{part}.rels"),
    }
}

/// Resolves a relationship target against the referring part's directory.
fn join_path(base_dir: &str, target: &str) -> String {
    let mut segments: Vec<&str> = if target.starts_with('/') {
        Vec::new()
    } else {
        base_dir.split('/').filter(|s| !s.is_empty()).collect()
    };
    for seg in target.trim_start_matches('/').split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                segments.pop();
            }
            s => segments.push(s),
        }
    }
    segments.join("/")
}

fn parse_shared_strings(xml: &str) -> Result<Vec<String>, WorkbookError> {
    let doc = Document::parse(xml)
        .map_err(|e| malformed("xl/sharedStrings.xml", &e.to_string()))?;
    let mut out = Vec::new();
    for si in descendants_named(&doc, "si") {
        out.push(rich_text(si));
    }
    Ok(out)
}

/// Concatenates the `t` runs under a node, skipping phonetic guides.
fn rich_text(node: Node<'_, '_>) -> String {
    let mut text = String::new();
    for t in node.descendants().filter(|n| n.is_element() && n.tag_name().name() == "t") {
        let phonetic = t.ancestors().any(|a| a.tag_name().name() == "rPh");
        if !phonetic {
            text.push_str(t.text().unwrap_or(""));
        }
    }
    text
}

/// cellXfs index → number format code.
fn parse_styles(xml: &str) -> Result<Vec<String>, WorkbookError> {
    let doc = Document::parse(xml).map_err(|e| malformed("xl/styles.xml", &e.to_string()))?;
    let mut custom: BTreeMap<u32, String> = BTreeMap::new();
    for fmt in descendants_named(&doc, "numFmt") {
        if let (Some(id), Some(code)) = (
            fmt.attribute("numFmtId").and_then(|v| v.parse().ok()),
            fmt.attribute("formatCode"),
        ) {
            custom.insert(id, code.to_string());
        }
    }
    let mut xfs = Vec::new();
    if let Some(cell_xfs) = doc
        .descendants()
        .find(|n| n.is_element() && n.tag_name().name() == "cellXfs")
    {
        for xf in cell_xfs.children().filter(|n| n.is_element() && n.tag_name().name() == "xf") {
            let id: u32 = xf.attribute("numFmtId").and_then(|v| v.parse().ok()).unwrap_or(0);
            let code = custom
                .get(&id)
                .cloned()
                .or_else(|| builtin_format(id).map(str::to_string))
                .unwrap_or_else(|| "General".to_string());
            xfs.push(code);
        }
    }
    Ok(xfs)
}

/// ECMA-376 built-in number format codes (the commonly used subset).
fn builtin_format(id: u32) -> Option<&'static str> {
    Some(match id {
        0 => "General",
        1 => "0",
        2 => "0.00",
        3 => "#,##0",
        4 => "#,##0.00",
        5 => "$#,##0_);($#,##0)",
        6 => "$#,##0_);[Red]($#,##0)",
        7 => "$#,##0.00_);($#,##0.00)",
        8 => "$#,##0.00_);[Red]($#,##0.00)",
        9 => "0%",
        10 => "0.00%",
        11 => "0.00E+00",
        12 => "# ?/?",
        13 => "# ??/??",
        14 => "mm/dd/yyyy",
        15 => "d-mmm-yy",
        16 => "d-mmm",
        17 => "mmm-yy",
        18 => "h:mm AM/PM",
        19 => "h:mm:ss AM/PM",
        20 => "h:mm",
        21 => "h:mm:ss",
        22 => "m/d/yy h:mm",
        37 => "#,##0_);(#,##0)",
        38 => "#,##0_);[Red](#,##0)",
        39 => "#,##0.00_);(#,##0.00)",
        40 => "#,##0.00_);[Red](#,##0.00)",
        44 => "_(\"$\"* #,##0.00_);_(\"$\"* (#,##0.00);_(\"$\"* \"-\"??_);_(@_)",
        45 => "mm:ss",
        46 => "[h]:mm:ss",
        47 => "mmss.0",
        48 => "##0.0E+0",
        49 => "@",
        _ => return None,
    })
}

fn parse_connections(xml: &str) -> Result<BTreeMap<u32, DataConnection>, WorkbookError> {
    let doc =
        Document::parse(xml).map_err(|e| malformed("xl/connections.xml", &e.to_string()))?;
    let mut out = BTreeMap::new();
    for conn in descendants_named(&doc, "connection") {
        let Some(id) = conn.attribute("id").and_then(|v| v.parse::<u32>().ok()) else {
            continue;
        };
        let db_pr = conn
            .children()
            .find(|n| n.is_element() && n.tag_name().name() == "dbPr");
        let (kind, definition) = match db_pr {
            Some(db) => {
                let conn_str = db.attribute("connection").unwrap_or("");
                let command = db.attribute("command").unwrap_or("");
                let kind = if conn_str.to_ascii_lowercase().contains("mashup") {
                    ConnectionKind::PowerQuery
                } else {
                    ConnectionKind::MsQuery
                };
                let definition = if command.is_empty() { conn_str } else { command };
                (kind, definition.to_string())
            }
            None => (ConnectionKind::Other, conn.attribute("name").unwrap_or("").to_string()),
        };
        out.insert(id, DataConnection { kind, definition });
    }
    Ok(out)
}

fn parse_comments(xml: &str, member: &str) -> Result<Vec<(String, String)>, WorkbookError> {
    let doc = Document::parse(xml).map_err(|e| malformed(member, &e.to_string()))?;
    Ok(descendants_named(&doc, "comment")
        .filter_map(|c| {
            let a1 = c.attribute("ref")?.to_string();
            let text = c
                .children()
                .find(|n| n.is_element() && n.tag_name().name() == "text")
                .map(rich_text)
                .unwrap_or_default();
            Some((a1, text))
        })
        .collect())
}

struct ParsedSheet {
    table_rids: Vec<String>,
    /// (cells covered by the sqref, formula1 range text).
    pending_list_ranges: Vec<(Vec<(u32, u32)>, String)>,
}

fn parse_worksheet(
    xml: &str,
    member: &str,
    shared_strings: &[String],
    style_formats: &[String],
    sheet: &mut Sheet,
) -> Result<ParsedSheet, WorkbookError> {
    let doc = Document::parse(xml).map_err(|e| malformed(member, &e.to_string()))?;

    if let Some(pane) = doc.descendants().find(|n| {
        n.is_element()
            && n.tag_name().name() == "pane"
            && matches!(n.attribute("state"), Some("frozen") | Some("frozenSplit"))
    }) {
        sheet.frozen_rows = pane.attribute("ySplit").and_then(|v| v.parse().ok()).unwrap_or(0);
        sheet.frozen_cols = pane.attribute("xSplit").and_then(|v| v.parse().ok()).unwrap_or(0);
    }

    for col in descendants_named(&doc, "col") {
        if !truthy(col.attribute("hidden")) {
            continue;
        }
        let min: u32 = col.attribute("min").and_then(|v| v.parse().ok()).unwrap_or(0);
        let max: u32 = col.attribute("max").and_then(|v| v.parse().ok()).unwrap_or(0);
        for c in min.max(1)..=max.min(MAX_COL) {
            sheet.hidden_cols.insert(c);
        }
    }

    if let Some(prot) = doc
        .descendants()
        .find(|n| n.is_element() && n.tag_name().name() == "sheetProtection")
    {
        let has_password = prot.attribute("password").is_some()
            || prot.attribute("hashValue").is_some()
            || prot.attribute("algorithmName").is_some();
        sheet.password_protected = has_password;
    }

    // Shared/array formula bookkeeping for post-pass expansion.
    let mut shared_hosts: BTreeMap<u32, (u32, u32, String)> = BTreeMap::new();
    let mut shared_members: Vec<(u32, u32, u32)> = Vec::new();
    let mut array_areas: Vec<(AreaRef, String)> = Vec::new();

    for row_node in descendants_named(&doc, "row") {
        let Some(row): Option<u32> = row_node.attribute("r").and_then(|v| v.parse().ok()) else {
            return Err(malformed(member, "row without an index"));
        };
        if row == 0 || row > MAX_ROW {
            return Err(malformed(member, "row index out of range"));
        }
        if truthy(row_node.attribute("hidden")) {
            sheet.hidden_rows.insert(row);
        }
        for c in row_node.children().filter(|n| n.is_element() && n.tag_name().name() == "c") {
            let Some((col, cell_row)) = c.attribute("r").and_then(parse_a1) else {
                return Err(malformed(member, "cell without a valid address"));
            };
            let _ = cell_row;
            let style_idx: usize = c.attribute("s").and_then(|v| v.parse().ok()).unwrap_or(0);
            let number_format = style_formats
                .get(style_idx)
                .cloned()
                .unwrap_or_else(|| "General".to_string());
            let cell_type = c.attribute("t").unwrap_or("n");
            let v_text = c
                .children()
                .find(|n| n.is_element() && n.tag_name().name() == "v")
                .and_then(|n| n.text())
                .unwrap_or("");
            let is_node = c
                .children()
                .find(|n| n.is_element() && n.tag_name().name() == "is");

            let value = match cell_type {
                "s" => {
                    let idx: usize = v_text
                        .parse()
                        .map_err(|_| malformed(member, "bad shared string index"))?;
                    let text = shared_strings
                        .get(idx)
                        .ok_or_else(|| malformed(member, "shared string index out of range"))?;
                    CellValue::Text(text.clone())
                }
                "inlineStr" => {
                    CellValue::Text(is_node.map(rich_text).unwrap_or_default())
                }
                "str" => CellValue::Text(v_text.to_string()),
                "b" => CellValue::Bool(v_text == "1" || v_text.eq_ignore_ascii_case("true")),
                "e" => CellValue::Error(v_text.to_string()),
                _ => {
                    if v_text.is_empty() {
                        CellValue::Empty
                    } else {
                        CellValue::Number(
                            v_text
                                .parse()
                                .map_err(|_| malformed(member, "bad numeric value"))?,
                        )
                    }
                }
            };
            let value = match value {
                CellValue::Text(t) if t.is_empty() => CellValue::Empty,
                other => other,
            };

            let mut formula = None;
            if let Some(f) = c
                .children()
                .find(|n| n.is_element() && n.tag_name().name() == "f")
            {
                let text = f.text().unwrap_or("");
                match f.attribute("t") {
                    Some("shared") => {
                        let si: u32 = f
                            .attribute("si")
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| malformed(member, "shared formula without si"))?;
                        if text.is_empty() {
                            shared_members.push((row, col, si));
                        } else {
                            shared_hosts.insert(si, (row, col, text.to_string()));
                            formula = Some(format!("={text}"));
                        }
                    }
                    Some("array") => {
                        let area_text = f.attribute("ref").unwrap_or("");
                        if let Some(area) = parse_area_text(area_text, &sheet.name) {
                            array_areas.push((area, text.to_string()));
                        }
                        formula = Some(format!("={text}"));
                    }
                    _ => {
                        if !text.is_empty() {
                            formula = Some(format!("={text}"));
                        }
                    }
                }
            }

            let entry = sheet.cells.entry((row, col)).or_default();
            entry.value = value;
            entry.formula = formula.or(entry.formula.take());
            entry.number_format = number_format;
        }
    }

    for (row, col, si) in shared_members {
        if let Some((host_row, host_col, text)) = shared_hosts.get(&si) {
            let translated = translate_formula(
                text,
                i64::from(row) - i64::from(*host_row),
                i64::from(col) - i64::from(*host_col),
            );
            sheet.cells.entry((row, col)).or_default().formula = Some(format!("={translated}"));
        }
    }
    for (area, text) in array_areas {
        for addr in area.cells() {
            let entry = sheet.cells.entry((addr.row, addr.col)).or_default();
            if entry.formula.is_none() {
                entry.formula = Some(format!("={text}"));
            }
        }
    }

    let mut pending_list_ranges = Vec::new();
    for dv in descendants_named(&doc, "dataValidation") {
        let sqref = dv.attribute("sqref").unwrap_or("");
        let mut covered: Vec<(u32, u32)> = Vec::new();
        for part in sqref.split_whitespace() {
            if let Some(area) = parse_area_text(part, &sheet.name) {
                for addr in area.cells() {
                    covered.push((addr.row, addr.col));
                }
            }
        }
        if covered.is_empty() {
            continue;
        }
        let prompt = dv.attribute("prompt").map(str::to_string);
        let formula1 = dv
            .children()
            .find(|n| n.is_element() && n.tag_name().name() == "formula1")
            .and_then(|n| n.text())
            .unwrap_or("")
            .trim()
            .to_string();
        let is_list = dv.attribute("type") == Some("list");

        for &(row, col) in &covered {
            let entry = sheet.cells.entry((row, col)).or_default();
            if let Some(p) = &prompt {
                entry.validation_message = Some(p.clone());
            }
        }
        if is_list && !formula1.is_empty() {
            if let Some(inner) = formula1.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
                let items: Vec<String> =
                    inner.split(',').map(|s| s.trim().to_string()).collect();
                for &(row, col) in &covered {
                    sheet.cells.entry((row, col)).or_default().validation_list =
                        Some(items.clone());
                }
            } else {
                pending_list_ranges.push((covered.clone(), formula1.clone()));
            }
        }
    }

    let table_rids = descendants_named(&doc, "tablePart")
        .filter_map(|n| {
            n.attributes()
                .find(|a| a.name() == "id")
                .map(|a| a.value().to_string())
        })
        .collect();

    Ok(ParsedSheet { table_rids, pending_list_ranges })
}

fn truthy(attr: Option<&str>) -> bool {
    matches!(attr, Some("1") | Some("true"))
}

/// Parses "A1:B5" or "Sheet2!A1:B5" (absolute markers allowed) into an area;
/// `host_sheet` fills in when no sheet is given.
fn parse_area_text(text: &str, host_sheet: &str) -> Option<AreaRef> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if text.contains('!') {
        return AreaRef::parse(text);
    }
    AreaRef::parse(&format!("{}!{}", super::address::quote_sheet(host_sheet), text))
        .or_else(|| AreaRef::parse(&format!("'{host_sheet}'!{text}")))
}

/// Classifies defined names into area, constant, or formula targets by
/// parsing the refers-to text with the formula parser.
fn parse_defined_names(
    wb_doc: &Document<'_>,
    sheet_entries: &[(String, SheetState, Option<String>)],
) -> Vec<DefinedName> {
    let mut out = Vec::new();
    for node in wb_doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "definedName")
    {
        let Some(name) = node.attribute("name") else { continue };
        if name.starts_with("_xlnm.") {
            continue;
        }
        let refers_to = node.text().unwrap_or("").trim().to_string();
        if refers_to.is_empty() {
            continue;
        }
        let scope = node
            .attribute("localSheetId")
            .and_then(|v| v.parse::<usize>().ok())
            .and_then(|i| sheet_entries.get(i))
            .map(|(n, _, _)| n.clone());
        out.push(DefinedName {
            name: name.to_string(),
            scope,
            target: classify_name_target(&refers_to),
        });
    }
    out
}

fn classify_name_target(refers_to: &str) -> NameTarget {
    match formula::parse_formula(&format!("={refers_to}")) {
        Ok(ast) => match &ast.root {
            Expr::CellRef { cell, .. } => match &cell.sheet {
                Some(sheet) if sheet.book.is_none() => NameTarget::Area(AreaRef::new(
                    sheet.name.clone(),
                    cell.row,
                    cell.col,
                    cell.row,
                    cell.col,
                )),
                _ => NameTarget::Formula(refers_to.to_string()),
            },
            Expr::RangeRef { range, .. } => match (&range.sheet, corners(range)) {
                (Some(sheet), Some((r1, c1, r2, c2))) if sheet.book.is_none() => {
                    NameTarget::Area(AreaRef::new(sheet.name.clone(), r1, c1, r2, c2))
                }
                _ => NameTarget::Formula(refers_to.to_string()),
            },
            Expr::Literal { value, .. } => match value {
                LitValue::Number(_) | LitValue::Text(_) | LitValue::Bool(_) => {
                    NameTarget::Constant(refers_to.to_string())
                }
                _ => NameTarget::Formula(refers_to.to_string()),
            },
            _ => NameTarget::Formula(refers_to.to_string()),
        },
        Err(_) => NameTarget::Formula(refers_to.to_string()),
    }
}

fn corners(range: &crate::formula::RangeRef) -> Option<(u32, u32, u32, u32)> {
    Some((
        range.start.row?,
        range.start.col?,
        range.end.row?,
        range.end.col?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_joining() {
        assert_eq!(join_path("xl", "worksheets/sheet1.xml"), "xl/worksheets/sheet1.xml");
        assert_eq!(join_path("xl/worksheets", "../tables/table1.xml"), "xl/tables/table1.xml");
        assert_eq!(join_path("xl/tables", "../queryTables/queryTable1.xml"), "xl/queryTables/queryTable1.xml");
        assert_eq!(join_path("xl", "/xl/styles.xml"), "xl/styles.xml");
        assert_eq!(rels_path_for("xl/worksheets/sheet2.xml"), "xl/worksheets/_rels/sheet2.xml.rels");
    }

    #[test]
    fn name_target_classification() {
        match classify_name_target("Sheet1!$B$1") {
            NameTarget::Area(a) => assert_eq!(a, AreaRef::parse("Sheet1!B1").unwrap()),
            other => panic!("{other:?}"),
        }
        match classify_name_target("'My Sheet'!$A$1:$B$2") {
            NameTarget::Area(a) => assert_eq!(a, AreaRef::parse("'My Sheet'!A1:B2").unwrap()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(classify_name_target("12"), NameTarget::Constant(_)));
        assert!(matches!(classify_name_target("\"USD\""), NameTarget::Constant(_)));
        assert!(matches!(classify_name_target("Sheet1!$B$1*12"), NameTarget::Formula(_)));
        assert!(matches!(classify_name_target("OFFSET(Sheet1!$A$1,1,1)"), NameTarget::Formula(_)));
    }
}
