//! Formula text to AST to scoring operands.
//!
//! The parser covers ordinary A1-style formulas: literals (numbers, strings,
//! booleans, error codes, array constants), cell and range references with
//! optional sheet or external-book qualifiers, defined names, structured
//! table references, function calls, and the usual operators. Precedence,
//! tightest first: reference ranges, unary sign, percent, `^`, `*` `/`,
//! `+` `-`, `&`, comparisons. R1C1 notation and union/intersection
//! reference operators are out of scope.

mod lexer;
mod operands;
mod parser;

pub use lexer::translate_formula;
pub use operands::{
    indirect_uses, operands, Evidence, FuncContext, IndirectUse, OperandKind, SourceOperand,
};
pub use parser::parse_formula;

use std::fmt;

use serde::Serialize;

use crate::workbook::address::{col_to_letters, quote_sheet};

/// Byte span into the original formula text (the leading "=" is byte 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }
}

/// Functions whose reference target is computed at run time.
pub const INDIRECT_FUNCTIONS: [&str; 6] =
    ["INDIRECT", "OFFSET", "LOOKUP", "VLOOKUP", "HLOOKUP", "INDEX"];

#[derive(Debug, Clone, PartialEq)]
pub enum LitValue {
    Number(f64),
    Text(String),
    Bool(bool),
    /// Canonical error code text, e.g. "#DIV/0!".
    Error(String),
    /// Array constant rows; elements are scalar literals only.
    Array(Vec<Vec<LitValue>>),
    /// Omitted argument, as in `IF(A1,,2)`.
    Missing,
}

/// Sheet qualifier on a reference; `book` set for external workbooks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetRef {
    pub book: Option<String>,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRef {
    pub sheet: Option<SheetRef>,
    pub col: u32,
    pub row: u32,
    pub abs_col: bool,
    pub abs_row: bool,
}

/// One corner of a range; `col`/`row` are None for full-row/full-column ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corner {
    pub col: Option<u32>,
    pub row: Option<u32>,
    pub abs_col: bool,
    pub abs_row: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeRef {
    pub sheet: Option<SheetRef>,
    pub start: Corner,
    pub end: Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableRegion {
    Data,
    Headers,
    Totals,
    ThisRow,
    All,
}

/// Table-relative reference; `table` is None inside the host table (`[@Col]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredRef {
    pub table: Option<String>,
    pub region: TableRegion,
    pub column: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
            BinOp::Concat => "&",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal { value: LitValue, span: Span },
    CellRef { cell: CellRef, span: Span },
    RangeRef { range: RangeRef, span: Span },
    NamedRef { sheet: Option<SheetRef>, name: String, span: Span },
    StructuredRef { sref: StructuredRef, span: Span },
    FuncCall { name: String, args: Vec<Expr>, span: Span },
    BinaryOp { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    UnaryOp { op: UnOp, operand: Box<Expr> },
    PercentOp { operand: Box<Expr> },
    Paren { inner: Box<Expr> },
}

/// Parse result: the expression tree plus the original text.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaAst {
    pub root: Expr,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("formula does not begin with '='")]
    MissingEquals,
    #[error("unrecognized token at offset {pos}")]
    UnknownToken { pos: usize },
    #[error("syntax error at offset {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
}

impl FormulaAst {
    /// Whitespace-normalized formula text, with the leading "=".
    pub fn canonical_text(&self) -> String {
        let mut out = String::from("=");
        self.root.write(&mut out);
        out
    }

    /// Copy with all spans zeroed; used for structural comparison.
    pub fn strip_spans(&self) -> FormulaAst {
        FormulaAst { root: self.root.strip_spans(), text: self.text.clone() }
    }

    /// Indented tree listing for the debug printer.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.root.dump(0, &mut out);
        out
    }
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Literal { span, .. }
            | Expr::CellRef { span, .. }
            | Expr::RangeRef { span, .. }
            | Expr::NamedRef { span, .. }
            | Expr::StructuredRef { span, .. }
            | Expr::FuncCall { span, .. } => *span,
            Expr::BinaryOp { lhs, rhs, .. } => Span::new(lhs.span().start, rhs.span().end),
            Expr::UnaryOp { operand, .. } | Expr::PercentOp { operand } => operand.span(),
            Expr::Paren { inner } => inner.span(),
        }
    }

    fn strip_spans(&self) -> Expr {
        let zero = Span::default();
        match self {
            Expr::Literal { value, .. } => Expr::Literal { value: value.clone(), span: zero },
            Expr::CellRef { cell, .. } => Expr::CellRef { cell: cell.clone(), span: zero },
            Expr::RangeRef { range, .. } => Expr::RangeRef { range: range.clone(), span: zero },
            Expr::NamedRef { sheet, name, .. } => {
                Expr::NamedRef { sheet: sheet.clone(), name: name.clone(), span: zero }
            }
            Expr::StructuredRef { sref, .. } => {
                Expr::StructuredRef { sref: sref.clone(), span: zero }
            }
            Expr::FuncCall { name, args, .. } => Expr::FuncCall {
                name: name.clone(),
                args: args.iter().map(Expr::strip_spans).collect(),
                span: zero,
            },
            Expr::BinaryOp { op, lhs, rhs } => Expr::BinaryOp {
                op: *op,
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
            },
            Expr::UnaryOp { op, operand } => {
                Expr::UnaryOp { op: *op, operand: Box::new(operand.strip_spans()) }
            }
            Expr::PercentOp { operand } => {
                Expr::PercentOp { operand: Box::new(operand.strip_spans()) }
            }
            Expr::Paren { inner } => Expr::Paren { inner: Box::new(inner.strip_spans()) },
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Expr::Literal { value, .. } => write_literal(value, out),
            Expr::CellRef { cell, .. } => out.push_str(&cell.to_string()),
            Expr::RangeRef { range, .. } => out.push_str(&range.to_string()),
            Expr::NamedRef { sheet, name, .. } => {
                if let Some(s) = sheet {
                    out.push_str(&sheet_prefix(s));
                }
                out.push_str(name);
            }
            Expr::StructuredRef { sref, .. } => out.push_str(&sref.to_string()),
            Expr::FuncCall { name, args, .. } => {
                out.push_str(name);
                out.push('(');
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    if !matches!(arg, Expr::Literal { value: LitValue::Missing, .. }) {
                        arg.write(out);
                    }
                }
                out.push(')');
            }
            Expr::BinaryOp { op, lhs, rhs } => {
                lhs.write(out);
                out.push_str(op.symbol());
                rhs.write(out);
            }
            Expr::UnaryOp { op, operand } => {
                out.push(if *op == UnOp::Neg { '-' } else { '+' });
                operand.write(out);
            }
            Expr::PercentOp { operand } => {
                operand.write(out);
                out.push('%');
            }
            Expr::Paren { inner } => {
                out.push('(');
                inner.write(out);
                out.push(')');
            }
        }
    }

    fn dump(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            Expr::Literal { value, .. } => {
                let mut t = String::new();
                write_literal(value, &mut t);
                let kind = match value {
                    LitValue::Number(_) => "number",
                    LitValue::Text(_) => "text",
                    LitValue::Bool(_) => "boolean",
                    LitValue::Error(_) => "error",
                    LitValue::Array(_) => "array",
                    LitValue::Missing => "missing",
                };
                out.push_str(&format!("{pad}Literal {kind} {t}\n"));
            }
            Expr::CellRef { cell, .. } => out.push_str(&format!("{pad}CellRef {cell}\n")),
            Expr::RangeRef { range, .. } => out.push_str(&format!("{pad}RangeRef {range}\n")),
            Expr::NamedRef { sheet, name, .. } => {
                let prefix = sheet.as_ref().map(sheet_prefix).unwrap_or_default();
                out.push_str(&format!("{pad}NamedRef {prefix}{name}\n"));
            }
            Expr::StructuredRef { sref, .. } => {
                out.push_str(&format!("{pad}StructuredRef {sref}\n"))
            }
            Expr::FuncCall { name, args, .. } => {
                out.push_str(&format!("{pad}FuncCall {name}\n"));
                for a in args {
                    a.dump(depth + 1, out);
                }
            }
            Expr::BinaryOp { op, lhs, rhs } => {
                out.push_str(&format!("{pad}BinaryOp {}\n", op.symbol()));
                lhs.dump(depth + 1, out);
                rhs.dump(depth + 1, out);
            }
            Expr::UnaryOp { op, operand } => {
                out.push_str(&format!(
                    "{pad}UnaryOp {}\n",
                    if *op == UnOp::Neg { "-" } else { "+" }
                ));
                operand.dump(depth + 1, out);
            }
            Expr::PercentOp { operand } => {
                out.push_str(&format!("{pad}PercentOp %\n"));
                operand.dump(depth + 1, out);
            }
            Expr::Paren { inner } => {
                out.push_str(&format!("{pad}Paren\n"));
                inner.dump(depth + 1, out);
            }
        }
    }
}

fn write_literal(value: &LitValue, out: &mut String) {
    match value {
        LitValue::Number(n) => out.push_str(&n.to_string()),
        LitValue::Text(t) => {
            out.push('"');
            out.push_str(&t.replace('"', "\"\""));
            out.push('"');
        }
        LitValue::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        LitValue::Error(e) => out.push_str(e),
        LitValue::Array(rows) => {
            out.push('{');
            for (ri, row) in rows.iter().enumerate() {
                if ri > 0 {
                    out.push(';');
                }
                for (ci, elem) in row.iter().enumerate() {
                    if ci > 0 {
                        out.push(',');
                    }
                    write_literal(elem, out);
                }
            }
            out.push('}');
        }
        LitValue::Missing => {}
    }
}

/// "Sheet1!" / "'My Sheet'!" / "'[Book.xlsx]Sheet 1'!" prefix text.
pub(crate) fn sheet_prefix(s: &SheetRef) -> String {
    match &s.book {
        Some(book) => {
            let inner = format!("[{book}]{}", s.name);
            let plain = inner.chars().all(|c| c.is_alphanumeric() || "_.[]".contains(c));
            if plain {
                format!("{inner}!")
            } else {
                format!("'{}'!", inner.replace('\'', "''"))
            }
        }
        None => format!("{}!", quote_sheet(&s.name)),
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = &self.sheet {
            write!(f, "{}", sheet_prefix(s))?;
        }
        if self.abs_col {
            write!(f, "$")?;
        }
        write!(f, "{}", col_to_letters(self.col))?;
        if self.abs_row {
            write!(f, "$")?;
        }
        write!(f, "{}", self.row)
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(col) = self.col {
            if self.abs_col {
                write!(f, "$")?;
            }
            write!(f, "{}", col_to_letters(col))?;
        }
        if let Some(row) = self.row {
            if self.abs_row {
                write!(f, "$")?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Display for RangeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = &self.sheet {
            write!(f, "{}", sheet_prefix(s))?;
        }
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl fmt::Display for StructuredRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = &self.table {
            write!(f, "{t}")?;
        }
        let col = self.column.as_deref().map(escape_table_column);
        match (self.region, col) {
            (TableRegion::Data, None) => write!(f, "[]"),
            (TableRegion::Data, Some(c)) => write!(f, "[{c}]"),
            (TableRegion::ThisRow, None) => write!(f, "[@]"),
            (TableRegion::ThisRow, Some(c)) => write!(f, "[@{c}]"),
            (region, None) => write!(f, "[{}]", region_word(region)),
            (region, Some(c)) => write!(f, "[[{}],[{c}]]", region_word(region)),
        }
    }
}

fn region_word(region: TableRegion) -> &'static str {
    match region {
        TableRegion::Data => "#Data",
        TableRegion::Headers => "#Headers",
        TableRegion::Totals => "#Totals",
        TableRegion::ThisRow => "#This Row",
        TableRegion::All => "#All",
    }
}

fn escape_table_column(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if "[]'#@".contains(ch) {
            out.push('\'');
        }
        out.push(ch);
    }
    out
}
