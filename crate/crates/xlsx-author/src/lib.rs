//! Small deterministic XLSX writer for test fixtures.
//!
//! Produces minimal but well-formed SpreadsheetML packages: worksheets with
//! values, formulas (plain, shared, array), number formats, frozen panes,
//! hidden rows/columns/sheets, sheet protection, data validations, comments,
//! tables (optionally backed by a query-table connection), and defined
//! names. Output is byte-stable: entries are stored uncompressed with fixed
//! timestamps and all collections iterate in a fixed order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Seek, Write};
use std::path::Path;

use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipWriter};

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Value {
    #[default]
    None,
    Number(f64),
    /// Stored via the shared-strings part.
    Text(String),
    /// Stored as an inline string on the cell.
    InlineText(String),
    Bool(bool),
    /// Error code such as "#DIV/0!".
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    /// Formula text without the leading "=".
    Plain(String),
    /// Host cell of a shared formula group: carries the text and the range.
    SharedHost { text: String, si: u32, area: String },
    /// Member cell of a shared formula group: text omitted in the file.
    SharedMember { si: u32 },
    Array { text: String, area: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Fmt {
    #[default]
    General,
    /// Custom format code, written to the styles part.
    Code(String),
    /// Built-in format id (e.g. 14 for m/d/yyyy); no code in the file.
    Builtin(u32),
}

#[derive(Debug, Clone, Default)]
struct CellSpec {
    value: Value,
    formula: Option<Formula>,
    fmt: Fmt,
}

#[derive(Debug, Clone)]
pub struct ValidationSpec {
    /// Space-separated cell/range list, e.g. "C1" or "C1:C3 D5".
    pub sqref: String,
    /// Inline list entries; mutually exclusive with `list_range`.
    pub list: Option<Vec<String>>,
    /// Range reference text for a list source, e.g. "Lists!$A$1:$A$3".
    pub list_range: Option<String>,
    pub prompt_title: Option<String>,
    pub prompt: Option<String>,
}

#[derive(Debug, Clone)]
pub struct QueryBacking {
    /// OLE DB / ODBC connection string; "Microsoft.Mashup" marks Power Query.
    pub connection_string: String,
    pub command_text: String,
}

#[derive(Debug, Clone)]
struct TableSpec {
    name: String,
    area: String,
    columns: Vec<String>,
    totals_rows: u32,
    query: Option<QueryBacking>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SheetVisibility {
    #[default]
    Visible,
    Hidden,
    VeryHidden,
}

#[derive(Debug, Default)]
pub struct SheetAuthor {
    name: String,
    visibility: SheetVisibility,
    protect_with_password: bool,
    frozen_rows: u32,
    frozen_cols: u32,
    hidden_rows: Vec<u32>,
    hidden_cols: Vec<u32>,
    cells: BTreeMap<(u32, u32), CellSpec>,
    validations: Vec<ValidationSpec>,
    comments: Vec<(u32, u32, String)>,
    tables: Vec<TableSpec>,
}

impl SheetAuthor {
    fn cell_mut(&mut self, row: u32, col: u32) -> &mut CellSpec {
        self.cells.entry((row, col)).or_default()
    }

    pub fn number(&mut self, row: u32, col: u32, v: f64) -> &mut Self {
        self.cell_mut(row, col).value = Value::Number(v);
        self
    }

    pub fn text(&mut self, row: u32, col: u32, v: &str) -> &mut Self {
        self.cell_mut(row, col).value = Value::Text(v.to_string());
        self
    }

    pub fn inline_text(&mut self, row: u32, col: u32, v: &str) -> &mut Self {
        self.cell_mut(row, col).value = Value::InlineText(v.to_string());
        self
    }

    pub fn boolean(&mut self, row: u32, col: u32, v: bool) -> &mut Self {
        self.cell_mut(row, col).value = Value::Bool(v);
        self
    }

    pub fn error(&mut self, row: u32, col: u32, code: &str) -> &mut Self {
        self.cell_mut(row, col).value = Value::Error(code.to_string());
        self
    }

    /// Plain formula; pass text without "=". `cached` is the stored result.
    pub fn formula(&mut self, row: u32, col: u32, text: &str, cached: Value) -> &mut Self {
        let cell = self.cell_mut(row, col);
        cell.formula = Some(Formula::Plain(text.to_string()));
        cell.value = cached;
        self
    }

    pub fn shared_formula_host(
        &mut self,
        row: u32,
        col: u32,
        text: &str,
        si: u32,
        area: &str,
        cached: Value,
    ) -> &mut Self {
        let cell = self.cell_mut(row, col);
        cell.formula =
            Some(Formula::SharedHost { text: text.to_string(), si, area: area.to_string() });
        cell.value = cached;
        self
    }

    pub fn shared_formula_member(&mut self, row: u32, col: u32, si: u32, cached: Value) -> &mut Self {
        let cell = self.cell_mut(row, col);
        cell.formula = Some(Formula::SharedMember { si });
        cell.value = cached;
        self
    }

    pub fn array_formula(
        &mut self,
        row: u32,
        col: u32,
        text: &str,
        area: &str,
        cached: Value,
    ) -> &mut Self {
        let cell = self.cell_mut(row, col);
        cell.formula = Some(Formula::Array { text: text.to_string(), area: area.to_string() });
        cell.value = cached;
        self
    }

    pub fn format_code(&mut self, row: u32, col: u32, code: &str) -> &mut Self {
        self.cell_mut(row, col).fmt = Fmt::Code(code.to_string());
        self
    }

    pub fn format_builtin(&mut self, row: u32, col: u32, id: u32) -> &mut Self {
        self.cell_mut(row, col).fmt = Fmt::Builtin(id);
        self
    }

    pub fn freeze(&mut self, rows: u32, cols: u32) -> &mut Self {
        self.frozen_rows = rows;
        self.frozen_cols = cols;
        self
    }

    pub fn hide_row(&mut self, row: u32) -> &mut Self {
        self.hidden_rows.push(row);
        self
    }

    pub fn hide_col(&mut self, col: u32) -> &mut Self {
        self.hidden_cols.push(col);
        self
    }

    pub fn visibility(&mut self, v: SheetVisibility) -> &mut Self {
        self.visibility = v;
        self
    }

    pub fn protect_with_password(&mut self) -> &mut Self {
        self.protect_with_password = true;
        self
    }

    pub fn validation(&mut self, spec: ValidationSpec) -> &mut Self {
        self.validations.push(spec);
        self
    }

    pub fn comment(&mut self, row: u32, col: u32, text: &str) -> &mut Self {
        self.comments.push((row, col, text.to_string()));
        self
    }

    /// Table over `area` ("A1:B3", header row included). Column names must
    /// match the header-row cell texts.
    pub fn table(&mut self, name: &str, area: &str, columns: &[&str], totals_rows: u32) -> &mut Self {
        self.tables.push(TableSpec {
            name: name.to_string(),
            area: area.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            totals_rows,
            query: None,
        });
        self
    }

    pub fn query_table(
        &mut self,
        name: &str,
        area: &str,
        columns: &[&str],
        query: QueryBacking,
    ) -> &mut Self {
        self.tables.push(TableSpec {
            name: name.to_string(),
            area: area.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            totals_rows: 0,
            query: Some(query),
        });
        self
    }
}

#[derive(Debug, Default)]
pub struct XlsxAuthor {
    sheets: Vec<SheetAuthor>,
    /// (name, refers-to text, scope sheet index).
    defined_names: Vec<(String, String, Option<usize>)>,
}

impl XlsxAuthor {
    pub fn new() -> XlsxAuthor {
        XlsxAuthor::default()
    }

    pub fn sheet(&mut self, name: &str) -> &mut SheetAuthor {
        if let Some(i) = self.sheets.iter().position(|s| s.name == name) {
            return &mut self.sheets[i];
        }
        self.sheets.push(SheetAuthor { name: name.to_string(), ..SheetAuthor::default() });
        self.sheets.last_mut().unwrap()
    }

    /// `refers_to` is raw text: "Sheet1!$B$1", "0.05", or "\"USD\"".
    pub fn defined_name(&mut self, name: &str, refers_to: &str) -> &mut Self {
        self.defined_names.push((name.to_string(), refers_to.to_string(), None));
        self
    }

    pub fn defined_name_scoped(&mut self, name: &str, refers_to: &str, sheet: &str) -> &mut Self {
        let idx = self.sheets.iter().position(|s| s.name == sheet);
        self.defined_names.push((name.to_string(), refers_to.to_string(), idx));
        self
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let file = std::fs::File::create(path)?;
        self.write(file)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = std::io::Cursor::new(Vec::new());
        self.write(&mut buf).expect("in-memory write");
        buf.into_inner()
    }

    pub fn write<W: Write + Seek>(&self, writer: W) -> std::io::Result<()> {
        Package::build(self).write(writer)
    }
}

/// All parts of the package, assembled before zipping.
struct Package {
    parts: Vec<(String, String)>,
}

impl Package {
    fn write<W: Write + Seek>(&self, writer: W) -> std::io::Result<()> {
        let mut zip = ZipWriter::new(writer);
        let opts = SimpleFileOptions::default()
            .compression_method(CompressionMethod::Stored)
            .last_modified_time(zip::DateTime::default());
        for (name, content) in &self.parts {
            zip.start_file(name.as_str(), opts)?;
            zip.write_all(content.as_bytes())?;
        }
        zip.finish()?;
        Ok(())
    }

    fn build(author: &XlsxAuthor) -> Package {
        let mut parts: Vec<(String, String)> = Vec::new();
        let mut shared = SharedStrings::default();
        let mut styles = Styles::default();

        // Stable global ids across the package.
        let mut table_id = 0u32;
        let mut query_id = 0u32;
        let mut comment_part = 0u32;

        struct SheetOut {
            xml: String,
            rels: Vec<(String, String, String)>, // (rid, type, target)
            has_rels: bool,
        }

        let mut connections: Vec<(u32, String, QueryBacking)> = Vec::new();
        let mut sheet_outs = Vec::new();
        let mut extra_parts: Vec<(String, String)> = Vec::new();

        for sheet in &author.sheets {
            let mut rels: Vec<(String, String, String)> = Vec::new();
            let mut table_rids = Vec::new();

            for table in &sheet.tables {
                table_id += 1;
                let tid = table_id;
                let part_name = format!("xl/tables/table{tid}.xml");
                let mut query_field_ids = false;
                let mut table_rels = Vec::new();
                if let Some(query) = &table.query {
                    query_id += 1;
                    let qid = query_id;
                    connections.push((qid, table.name.clone(), query.clone()));
                    let qpart = format!("xl/queryTables/queryTable{qid}.xml");
                    extra_parts.push((
                        qpart.clone(),
                        format!(
                            "{}<queryTable xmlns=\"{SS}\" name=\"{}\" connectionId=\"{qid}\" autoFormatId=\"16\" applyNumberFormats=\"0\" applyBorderFormats=\"0\" applyFontFormats=\"0\" applyPatternFormats=\"0\" applyAlignmentFormats=\"0\" applyWidthHeightFormats=\"0\"/>",
                            XML_DECL,
                            esc(&table.name)
                        ),
                    ));
                    table_rels.push((
                        "rId1".to_string(),
                        format!("{REL_NS}/queryTable"),
                        format!("../queryTables/queryTable{qid}.xml"),
                    ));
                    query_field_ids = true;
                }
                extra_parts.push((part_name, table_xml(table, tid, query_field_ids)));
                if !table_rels.is_empty() {
                    extra_parts.push((
                        format!("xl/tables/_rels/table{tid}.xml.rels"),
                        rels_xml(&table_rels),
                    ));
                }
                let rid = format!("rId{}", rels.len() + 1);
                rels.push((
                    rid.clone(),
                    format!("{REL_NS}/table"),
                    format!("../tables/table{tid}.xml"),
                ));
                table_rids.push(rid);
            }

            let comments_rid = if sheet.comments.is_empty() {
                None
            } else {
                comment_part += 1;
                let part = format!("xl/comments{comment_part}.xml");
                extra_parts.push((part.clone(), comments_xml(&sheet.comments)));
                let rid = format!("rId{}", rels.len() + 1);
                rels.push((
                    rid.clone(),
                    format!("{REL_NS}/comments"),
                    format!("../comments{comment_part}.xml"),
                ));
                Some(rid)
            };
            let _ = comments_rid;

            let xml = sheet_xml(sheet, &mut shared, &mut styles, &table_rids);
            let has_rels = !rels.is_empty();
            sheet_outs.push(SheetOut { xml, rels, has_rels });
        }

        // [Content_Types].xml
        let mut ct = String::from(XML_DECL);
        ct.push_str("<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">");
        ct.push_str("<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>");
        ct.push_str("<Default Extension=\"xml\" ContentType=\"application/xml\"/>");
        ct.push_str("<Override PartName=\"/xl/workbook.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml\"/>");
        for i in 1..=author.sheets.len() {
            let _ = write!(
                ct,
                "<Override PartName=\"/xl/worksheets/sheet{i}.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml\"/>"
            );
        }
        ct.push_str("<Override PartName=\"/xl/styles.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.styles+xml\"/>");
        ct.push_str("<Override PartName=\"/xl/sharedStrings.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.sharedStrings+xml\"/>");
        for i in 1..=table_id {
            let _ = write!(
                ct,
                "<Override PartName=\"/xl/tables/table{i}.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.table+xml\"/>"
            );
        }
        for i in 1..=query_id {
            let _ = write!(
                ct,
                "<Override PartName=\"/xl/queryTables/queryTable{i}.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.queryTable+xml\"/>"
            );
        }
        if !connections.is_empty() {
            ct.push_str("<Override PartName=\"/xl/connections.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.connections+xml\"/>");
        }
        for i in 1..=comment_part {
            let _ = write!(
                ct,
                "<Override PartName=\"/xl/comments{i}.xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.comments+xml\"/>"
            );
        }
        ct.push_str("</Types>");
        parts.push(("[Content_Types].xml".to_string(), ct));

        parts.push((
            "_rels/.rels".to_string(),
            rels_xml(&[(
                "rId1".to_string(),
                format!("{REL_NS}/officeDocument"),
                "xl/workbook.xml".to_string(),
            )]),
        ));

        // xl/workbook.xml
        let mut wb = String::from(XML_DECL);
        let _ = write!(
            wb,
            "<workbook xmlns=\"{SS}\" xmlns:r=\"{RNS}\"><sheets>"
        );
        for (i, sheet) in author.sheets.iter().enumerate() {
            let state = match sheet.visibility {
                SheetVisibility::Visible => String::new(),
                SheetVisibility::Hidden => " state=\"hidden\"".to_string(),
                SheetVisibility::VeryHidden => " state=\"veryHidden\"".to_string(),
            };
            let _ = write!(
                wb,
                "<sheet name=\"{}\" sheetId=\"{}\"{state} r:id=\"rId{}\"/>",
                esc(&sheet.name),
                i + 1,
                i + 1
            );
        }
        wb.push_str("</sheets>");
        if !author.defined_names.is_empty() {
            wb.push_str("<definedNames>");
            for (name, refers_to, scope) in &author.defined_names {
                let local = scope
                    .map(|i| format!(" localSheetId=\"{i}\""))
                    .unwrap_or_default();
                let _ = write!(
                    wb,
                    "<definedName name=\"{}\"{local}>{}</definedName>",
                    esc(name),
                    esc(refers_to)
                );
            }
            wb.push_str("</definedNames>");
        }
        wb.push_str("</workbook>");
        parts.push(("xl/workbook.xml".to_string(), wb));

        // xl/_rels/workbook.xml.rels
        let mut wb_rels: Vec<(String, String, String)> = Vec::new();
        for i in 1..=author.sheets.len() {
            wb_rels.push((
                format!("rId{i}"),
                format!("{REL_NS}/worksheet"),
                format!("worksheets/sheet{i}.xml"),
            ));
        }
        let mut next = author.sheets.len() + 1;
        wb_rels.push((format!("rId{next}"), format!("{REL_NS}/styles"), "styles.xml".to_string()));
        next += 1;
        wb_rels.push((
            format!("rId{next}"),
            format!("{REL_NS}/sharedStrings"),
            "sharedStrings.xml".to_string(),
        ));
        next += 1;
        if !connections.is_empty() {
            wb_rels.push((
                format!("rId{next}"),
                format!("{REL_NS}/connections"),
                "connections.xml".to_string(),
            ));
        }
        parts.push(("xl/_rels/workbook.xml.rels".to_string(), rels_xml(&wb_rels)));

        for (i, out) in sheet_outs.iter().enumerate() {
            parts.push((format!("xl/worksheets/sheet{}.xml", i + 1), out.xml.clone()));
            if out.has_rels {
                parts.push((
                    format!("xl/worksheets/_rels/sheet{}.xml.rels", i + 1),
                    rels_xml(&out.rels),
                ));
            }
        }

        parts.push(("xl/styles.xml".to_string(), styles.xml()));
        parts.push(("xl/sharedStrings.xml".to_string(), shared.xml()));

        if !connections.is_empty() {
            let mut xml = String::from(XML_DECL);
            let _ = write!(xml, "<connections xmlns=\"{SS}\">");
            for (id, name, q) in &connections {
                let _ = write!(
                    xml,
                    "<connection id=\"{id}\" name=\"{}\" type=\"1\" refreshedVersion=\"6\" background=\"1\"><dbPr connection=\"{}\" command=\"{}\"/></connection>",
                    esc(name),
                    esc(&q.connection_string),
                    esc(&q.command_text)
                );
            }
            xml.push_str("</connections>");
            parts.push(("xl/connections.xml".to_string(), xml));
        }

        parts.extend(extra_parts);
        Package { parts }
    }
}

const XML_DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n";
const SS: &str = "http://schemas.openxmlformats.org/spreadsheetml/2006/main";
const RNS: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships";
const REL_NS: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships";

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

fn col_letters(mut col: u32) -> String {
    let mut out = Vec::new();
    while col > 0 {
        let rem = (col - 1) % 26;
        out.push(b'A' + rem as u8);
        col = (col - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

fn a1(row: u32, col: u32) -> String {
    format!("{}{row}", col_letters(col))
}

fn rels_xml(rels: &[(String, String, String)]) -> String {
    let mut xml = String::from(XML_DECL);
    xml.push_str("<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">");
    for (rid, rtype, target) in rels {
        let _ = write!(
            xml,
            "<Relationship Id=\"{rid}\" Type=\"{rtype}\" Target=\"{}\"/>",
            esc(target)
        );
    }
    xml.push_str("</Relationships>");
    xml
}

#[derive(Default)]
struct SharedStrings {
    items: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl SharedStrings {
    fn intern(&mut self, s: &str) -> usize {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.items.len();
        self.items.push(s.to_string());
        self.index.insert(s.to_string(), i);
        i
    }

    fn xml(&self) -> String {
        let mut xml = String::from(XML_DECL);
        let _ = write!(
            xml,
            "<sst xmlns=\"{SS}\" count=\"{}\" uniqueCount=\"{}\">",
            self.items.len(),
            self.items.len()
        );
        for item in &self.items {
            let preserve = if item.starts_with(' ') || item.ends_with(' ') {
                " xml:space=\"preserve\""
            } else {
                ""
            };
            let _ = write!(xml, "<si><t{preserve}>{}</t></si>", esc(item));
        }
        xml.push_str("</sst>");
        xml
    }
}

#[derive(Default)]
struct Styles {
    /// Distinct custom format codes, ids assigned from 164.
    custom: Vec<String>,
    /// Distinct (numFmtId) values in cellXfs order; xf 0 is General.
    xfs: Vec<u32>,
}

impl Styles {
    /// Returns the style index (s attribute) for a format.
    fn style_for(&mut self, fmt: &Fmt) -> usize {
        let numfmt_id = match fmt {
            Fmt::General => 0,
            Fmt::Builtin(id) => *id,
            Fmt::Code(code) => {
                let pos = match self.custom.iter().position(|c| c == code) {
                    Some(p) => p,
                    None => {
                        self.custom.push(code.clone());
                        self.custom.len() - 1
                    }
                };
                164 + pos as u32
            }
        };
        if self.xfs.is_empty() {
            self.xfs.push(0);
        }
        if let Some(i) = self.xfs.iter().position(|&id| id == numfmt_id) {
            return i;
        }
        self.xfs.push(numfmt_id);
        self.xfs.len() - 1
    }

    fn xml(&self) -> String {
        let mut xml = String::from(XML_DECL);
        let _ = write!(xml, "<styleSheet xmlns=\"{SS}\">");
        if !self.custom.is_empty() {
            let _ = write!(xml, "<numFmts count=\"{}\">", self.custom.len());
            for (i, code) in self.custom.iter().enumerate() {
                let _ = write!(xml, "<numFmt numFmtId=\"{}\" formatCode=\"{}\"/>", 164 + i, esc(code));
            }
            xml.push_str("</numFmts>");
        }
        xml.push_str("<fonts count=\"1\"><font><sz val=\"11\"/><name val=\"Calibri\"/></font></fonts>");
        xml.push_str("<fills count=\"2\"><fill><patternFill patternType=\"none\"/></fill><fill><patternFill patternType=\"gray125\"/></fill></fills>");
        xml.push_str("<borders count=\"1\"><border><left/><right/><top/><bottom/><diagonal/></border></borders>");
        xml.push_str("<cellStyleXfs count=\"1\"><xf numFmtId=\"0\" fontId=\"0\" fillId=\"0\" borderId=\"0\"/></cellStyleXfs>");
        let xfs = if self.xfs.is_empty() { &[0u32][..] } else { &self.xfs };
        let _ = write!(xml, "<cellXfs count=\"{}\">", xfs.len());
        for id in xfs {
            let apply = if *id == 0 { "" } else { " applyNumberFormat=\"1\"" };
            let _ = write!(
                xml,
                "<xf numFmtId=\"{id}\" fontId=\"0\" fillId=\"0\" borderId=\"0\" xfId=\"0\"{apply}/>"
            );
        }
        xml.push_str("</cellXfs>");
        xml.push_str("</styleSheet>");
        xml
    }
}

fn sheet_xml(
    sheet: &SheetAuthor,
    shared: &mut SharedStrings,
    styles: &mut Styles,
    table_rids: &[String],
) -> String {
    let mut xml = String::from(XML_DECL);
    let _ = write!(xml, "<worksheet xmlns=\"{SS}\" xmlns:r=\"{RNS}\">");

    // sheetViews with optional frozen pane.
    xml.push_str("<sheetViews><sheetView workbookViewId=\"0\">");
    if sheet.frozen_rows > 0 || sheet.frozen_cols > 0 {
        let top_left = a1(sheet.frozen_rows + 1, sheet.frozen_cols + 1);
        let pane = match (sheet.frozen_cols > 0, sheet.frozen_rows > 0) {
            (true, true) => "bottomRight",
            (true, false) => "topRight",
            _ => "bottomLeft",
        };
        let mut attrs = String::new();
        if sheet.frozen_cols > 0 {
            let _ = write!(attrs, " xSplit=\"{}\"", sheet.frozen_cols);
        }
        if sheet.frozen_rows > 0 {
            let _ = write!(attrs, " ySplit=\"{}\"", sheet.frozen_rows);
        }
        let _ = write!(
            xml,
            "<pane{attrs} topLeftCell=\"{top_left}\" activePane=\"{pane}\" state=\"frozen\"/>"
        );
    }
    xml.push_str("</sheetView></sheetViews>");

    let mut hidden_cols = sheet.hidden_cols.clone();
    hidden_cols.sort_unstable();
    hidden_cols.dedup();
    if !hidden_cols.is_empty() {
        xml.push_str("<cols>");
        for col in &hidden_cols {
            let _ = write!(xml, "<col min=\"{col}\" max=\"{col}\" width=\"9\" hidden=\"1\" customWidth=\"1\"/>");
        }
        xml.push_str("</cols>");
    }

    // sheetData grouped by row.
    xml.push_str("<sheetData>");
    let mut hidden_rows = sheet.hidden_rows.clone();
    hidden_rows.sort_unstable();
    hidden_rows.dedup();
    let mut rows: BTreeMap<u32, Vec<(u32, &CellSpec)>> = BTreeMap::new();
    for (&(row, col), cell) in &sheet.cells {
        rows.entry(row).or_default().push((col, cell));
    }
    for row in &hidden_rows {
        rows.entry(*row).or_default();
    }
    for (row, cells) in &rows {
        let hidden = if hidden_rows.contains(row) { " hidden=\"1\"" } else { "" };
        let _ = write!(xml, "<row r=\"{row}\"{hidden}>");
        for (col, cell) in cells {
            write_cell(&mut xml, *row, *col, cell, shared, styles);
        }
        xml.push_str("</row>");
    }
    xml.push_str("</sheetData>");

    if sheet.protect_with_password {
        xml.push_str("<sheetProtection password=\"C71F\" sheet=\"1\" objects=\"1\" scenarios=\"1\"/>");
    }

    if !sheet.validations.is_empty() {
        let _ = write!(xml, "<dataValidations count=\"{}\">", sheet.validations.len());
        for v in &sheet.validations {
            let vtype = if v.list.is_some() || v.list_range.is_some() {
                " type=\"list\""
            } else {
                ""
            };
            let mut attrs = String::new();
            if v.prompt.is_some() {
                attrs.push_str(" showInputMessage=\"1\"");
            }
            if let Some(title) = &v.prompt_title {
                let _ = write!(attrs, " promptTitle=\"{}\"", esc(title));
            }
            if let Some(prompt) = &v.prompt {
                let _ = write!(attrs, " prompt=\"{}\"", esc(prompt));
            }
            let _ = write!(
                xml,
                "<dataValidation{vtype} allowBlank=\"1\" showErrorMessage=\"1\"{attrs} sqref=\"{}\">",
                esc(&v.sqref)
            );
            if let Some(list) = &v.list {
                let joined = list.join(",");
                let _ = write!(xml, "<formula1>\"{}\"</formula1>", esc(&joined));
            } else if let Some(range) = &v.list_range {
                let _ = write!(xml, "<formula1>{}</formula1>", esc(range));
            }
            xml.push_str("</dataValidation>");
        }
        xml.push_str("</dataValidations>");
    }

    if !table_rids.is_empty() {
        let _ = write!(xml, "<tableParts count=\"{}\">", table_rids.len());
        for rid in table_rids {
            let _ = write!(xml, "<tablePart r:id=\"{rid}\"/>");
        }
        xml.push_str("</tableParts>");
    }

    xml.push_str("</worksheet>");
    xml
}

fn write_cell(
    xml: &mut String,
    row: u32,
    col: u32,
    cell: &CellSpec,
    shared: &mut SharedStrings,
    styles: &mut Styles,
) {
    let style = styles.style_for(&cell.fmt);
    let style_attr = if style == 0 { String::new() } else { format!(" s=\"{style}\"") };
    let type_attr = match &cell.value {
        Value::None | Value::Number(_) => "",
        Value::Text(_) => " t=\"s\"",
        Value::InlineText(_) => " t=\"inlineStr\"",
        Value::Bool(_) => " t=\"b\"",
        Value::Error(_) => " t=\"e\"",
    };
    // A formula cell's cached string result is written as t="str".
    let type_attr = match (&cell.formula, &cell.value) {
        (Some(_), Value::Text(_)) | (Some(_), Value::InlineText(_)) => " t=\"str\"",
        _ => type_attr,
    };
    let _ = write!(xml, "<c r=\"{}\"{style_attr}{type_attr}>", a1(row, col));
    match &cell.formula {
        Some(Formula::Plain(text)) => {
            let _ = write!(xml, "<f>{}</f>", esc(text));
        }
        Some(Formula::SharedHost { text, si, area }) => {
            let _ = write!(xml, "<f t=\"shared\" ref=\"{}\" si=\"{si}\">{}</f>", esc(area), esc(text));
        }
        Some(Formula::SharedMember { si }) => {
            let _ = write!(xml, "<f t=\"shared\" si=\"{si}\"/>");
        }
        Some(Formula::Array { text, area }) => {
            let _ = write!(xml, "<f t=\"array\" ref=\"{}\">{}</f>", esc(area), esc(text));
        }
        None => {}
    }
    match &cell.value {
        Value::None => {}
        Value::Number(n) => {
            let _ = write!(xml, "<v>{n}</v>");
        }
        Value::Text(t) => {
            if cell.formula.is_some() {
                let _ = write!(xml, "<v>{}</v>", esc(t));
            } else {
                let _ = write!(xml, "<v>{}</v>", shared.intern(t));
            }
        }
        Value::InlineText(t) => {
            if cell.formula.is_some() {
                let _ = write!(xml, "<v>{}</v>", esc(t));
            } else {
                let _ = write!(xml, "<is><t>{}</t></is>", esc(t));
            }
        }
        Value::Bool(b) => {
            let _ = write!(xml, "<v>{}</v>", if *b { 1 } else { 0 });
        }
        Value::Error(e) => {
            let _ = write!(xml, "<v>{}</v>", esc(e));
        }
    }
    xml.push_str("</c>");
}

fn table_xml(table: &TableSpec, id: u32, query: bool) -> String {
    let mut xml = String::from(XML_DECL);
    let table_type = if query { " tableType=\"queryTable\"" } else { "" };
    let totals = if table.totals_rows > 0 {
        format!(" totalsRowCount=\"{}\"", table.totals_rows)
    } else {
        String::new()
    };
    let _ = write!(
        xml,
        "<table xmlns=\"{SS}\" id=\"{id}\" name=\"{0}\" displayName=\"{0}\" ref=\"{1}\"{table_type}{totals} headerRowCount=\"1\">",
        esc(&table.name),
        esc(&table.area)
    );
    let _ = write!(xml, "<autoFilter ref=\"{}\"/>", esc(&table.area));
    let _ = write!(xml, "<tableColumns count=\"{}\">", table.columns.len());
    for (i, name) in table.columns.iter().enumerate() {
        let qattr = if query {
            format!(" queryTableFieldId=\"{}\"", i + 1)
        } else {
            String::new()
        };
        let _ = write!(xml, "<tableColumn id=\"{}\" name=\"{}\"{qattr}/>", i + 1, esc(name));
    }
    xml.push_str("</tableColumns>");
    xml.push_str("<tableStyleInfo name=\"TableStyleMedium2\" showFirstColumn=\"0\" showLastColumn=\"0\" showRowStripes=\"1\" showColumnStripes=\"0\"/>");
    xml.push_str("</table>");
    xml
}

fn comments_xml(comments: &[(u32, u32, String)]) -> String {
    let mut sorted: Vec<&(u32, u32, String)> = comments.iter().collect();
    sorted.sort_by_key(|(r, c, _)| (*r, *c));
    let mut xml = String::from(XML_DECL);
    let _ = write!(xml, "<comments xmlns=\"{SS}\"><authors><author>auditor</author></authors><commentList>");
    for (row, col, text) in sorted {
        let _ = write!(
            xml,
            "<comment ref=\"{}\" authorId=\"0\"><text><r><t>{}</t></r></text></comment>",
            a1(*row, *col),
            esc(text)
        );
    }
    xml.push_str("</commentList></comments>");
    xml
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Read;

    #[test]
    fn builds_a_stable_package() {
        let mut author = XlsxAuthor::new();
        author
            .sheet("Sheet1")
            .text(1, 1, "Label")
            .number(1, 2, 42.0)
            .formula(2, 2, "B1*2", Value::Number(84.0))
            .format_code(1, 2, "#,##0")
            .freeze(1, 0)
            .hide_row(5)
            .comment(1, 2, "unit: USD");
        author.defined_name("Answer", "Sheet1!$B$1");
        let a = author.to_bytes();
        let b = author.to_bytes();
        assert_eq!(a, b, "output must be byte-stable");

        let mut zip = zip::ZipArchive::new(std::io::Cursor::new(a)).unwrap();
        let names: Vec<String> = (0..zip.len()).map(|i| zip.by_index(i).unwrap().name().to_string()).collect();
        assert!(names.contains(&"xl/workbook.xml".to_string()));
        assert!(names.contains(&"xl/worksheets/sheet1.xml".to_string()));
        assert!(names.contains(&"xl/comments1.xml".to_string()));

        let mut sheet = String::new();
        zip.by_name("xl/worksheets/sheet1.xml").unwrap().read_to_string(&mut sheet).unwrap();
        assert!(sheet.contains("<f>B1*2</f>"));
        assert!(sheet.contains("state=\"frozen\""));
        assert!(sheet.contains("hidden=\"1\""));
    }

    #[test]
    fn query_table_wiring() {
        let mut author = XlsxAuthor::new();
        author.sheet("Data").text(1, 1, "Account");
        author.sheet("Data").number(2, 1, 101.0);
        author.sheet("Data").query_table(
            "Imported",
            "A1:A2",
            &["Account"],
            QueryBacking {
                connection_string: "DSN=GL;Provider=MSDASQL".to_string(),
                command_text: "SELECT Account FROM GL".to_string(),
            },
        );
        let bytes = author.to_bytes();
        let mut zip = zip::ZipArchive::new(std::io::Cursor::new(bytes)).unwrap();
        let mut conns = String::new();
        zip.by_name("xl/connections.xml").unwrap().read_to_string(&mut conns).unwrap();
        assert!(conns.contains("SELECT Account FROM GL"));
        let mut table = String::new();
        zip.by_name("xl/tables/table1.xml").unwrap().read_to_string(&mut table).unwrap();
        assert!(table.contains("tableType=\"queryTable\""));
        let mut trel = String::new();
        zip.by_name("xl/tables/_rels/table1.xml.rels").unwrap().read_to_string(&mut trel).unwrap();
        assert!(trel.contains("queryTables/queryTable1.xml"));
    }
}
