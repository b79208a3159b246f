//! Parses every corpus formula, re-parses its canonical text, and checks
//! the two trees match. The corpus has to cover every expression node,
//! literal kind, operator, and table region, so a parser regression that
//! silently drops a construct fails the coverage assertion too.

use std::collections::BTreeSet;

use clearsheet::formula::{parse_formula, BinOp, Expr, LitValue, TableRegion, UnOp};

fn corpus() -> Vec<String> {
    let text = include_str!("data/formula_corpus.txt");
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn lit_tag(value: &LitValue, tags: &mut BTreeSet<&'static str>) {
    let tag = match value {
        LitValue::Number(_) => "lit-number",
        LitValue::Text(_) => "lit-text",
        LitValue::Bool(_) => "lit-bool",
        LitValue::Error(_) => "lit-error",
        LitValue::Array(rows) => {
            for row in rows {
                for element in row {
                    lit_tag(element, tags);
                }
            }
            "lit-array"
        }
        LitValue::Missing => "lit-missing",
    };
    tags.insert(tag);
}

fn visit(expr: &Expr, tags: &mut BTreeSet<&'static str>) {
    match expr {
        Expr::Literal { value, .. } => {
            tags.insert("literal");
            lit_tag(value, tags);
        }
        Expr::CellRef { cell, .. } => {
            tags.insert("cell-ref");
            if let Some(sheet) = &cell.sheet {
                tags.insert(if sheet.book.is_some() { "book-qualified" } else { "sheet-qualified" });
            }
            if cell.abs_col {
                tags.insert("abs-col");
            }
            if cell.abs_row {
                tags.insert("abs-row");
            }
        }
        Expr::RangeRef { range, .. } => {
            tags.insert("range-ref");
            if let Some(sheet) = &range.sheet {
                tags.insert(if sheet.book.is_some() { "book-qualified" } else { "sheet-qualified" });
            }
            if range.start.row.is_none() {
                tags.insert("full-column");
            }
            if range.start.col.is_none() {
                tags.insert("full-row");
            }
        }
        Expr::NamedRef { sheet, .. } => {
            tags.insert("named-ref");
            if sheet.is_some() {
                tags.insert("scoped-name");
            }
        }
        Expr::StructuredRef { sref, .. } => {
            tags.insert("structured-ref");
            tags.insert(match sref.region {
                TableRegion::Data => "region-data",
                TableRegion::Headers => "region-headers",
                TableRegion::Totals => "region-totals",
                TableRegion::ThisRow => "region-this-row",
                TableRegion::All => "region-all",
            });
            if sref.table.is_some() {
                tags.insert("table-qualified");
            }
        }
        Expr::FuncCall { args, .. } => {
            tags.insert("func-call");
            if args.is_empty() {
                tags.insert("zero-arg-call");
            }
            for arg in args {
                visit(arg, tags);
            }
        }
        Expr::BinaryOp { op, lhs, rhs } => {
            tags.insert("binary-op");
            tags.insert(match op {
                BinOp::Add => "op-add",
                BinOp::Sub => "op-sub",
                BinOp::Mul => "op-mul",
                BinOp::Div => "op-div",
                BinOp::Pow => "op-pow",
                BinOp::Concat => "op-concat",
                BinOp::Eq => "op-eq",
                BinOp::Ne => "op-ne",
                BinOp::Lt => "op-lt",
                BinOp::Le => "op-le",
                BinOp::Gt => "op-gt",
                BinOp::Ge => "op-ge",
            });
            visit(lhs, tags);
            visit(rhs, tags);
        }
        Expr::UnaryOp { op, operand } => {
            tags.insert("unary-op");
            tags.insert(match op {
                UnOp::Neg => "unary-neg",
                UnOp::Pos => "unary-pos",
            });
            visit(operand, tags);
        }
        Expr::PercentOp { operand } => {
            tags.insert("percent-op");
            visit(operand, tags);
        }
        Expr::Paren { inner } => {
            tags.insert("paren");
            visit(inner, tags);
        }
    }
}

const REQUIRED: &[&str] = &[
    "literal",
    "cell-ref",
    "range-ref",
    "named-ref",
    "structured-ref",
    "func-call",
    "binary-op",
    "unary-op",
    "percent-op",
    "paren",
    "lit-number",
    "lit-text",
    "lit-bool",
    "lit-error",
    "lit-array",
    "lit-missing",
    "op-add",
    "op-sub",
    "op-mul",
    "op-div",
    "op-pow",
    "op-concat",
    "op-eq",
    "op-ne",
    "op-lt",
    "op-le",
    "op-gt",
    "op-ge",
    "unary-neg",
    "unary-pos",
    "region-data",
    "region-headers",
    "region-totals",
    "region-this-row",
    "region-all",
    "sheet-qualified",
    "book-qualified",
    "scoped-name",
    "table-qualified",
    "abs-col",
    "abs-row",
    "full-column",
    "full-row",
    "zero-arg-call",
];

#[test]
fn every_corpus_formula_parses_and_round_trips() {
    let formulas = corpus();
    assert!(formulas.len() >= 200, "corpus has only {} formulas", formulas.len());

    let mut errs = Vec::new();
    let mut tags = BTreeSet::new();
    for formula in &formulas {
        let ast = match parse_formula(formula) {
            Ok(ast) => ast,
            Err(e) => {
                errs.push(format!("{formula}: {e}"));
                continue;
            }
        };
        visit(&ast.root, &mut tags);

        let canonical = ast.canonical_text();
        match parse_formula(&canonical) {
            Ok(second) => {
                if second.strip_spans().root != ast.strip_spans().root {
                    errs.push(format!("{formula}: canonical form {canonical} parses differently"));
                } else if second.canonical_text() != canonical {
                    errs.push(format!(
                        "{formula}: canonical text is not a fixed point ({canonical} vs {})",
                        second.canonical_text()
                    ));
                }
            }
            Err(e) => errs.push(format!("{formula}: canonical form {canonical} fails: {e}")),
        }
    }
    assert!(errs.is_empty(), "{} corpus failures:\n  {}", errs.len(), errs.join("\n  "));

    let missing: Vec<_> = REQUIRED.iter().filter(|t| !tags.contains(**t)).collect();
    assert!(missing.is_empty(), "corpus never exercises: {missing:?}");
}
