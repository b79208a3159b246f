//! Flattens an AST into scoring operands and collects indirect-reference
//! function uses with their structural constraint evidence.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Expr, FormulaAst, LitValue, Span, INDIRECT_FUNCTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperandKind {
    Literal,
    CellArea,
    Named,
    Structured,
}

/// Function argument position: name is uppercase, `arg` is 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncContext {
    pub name: String,
    pub arg: usize,
}

/// One leaf of a formula, as the scorer consumes it.
#[derive(Debug, Clone)]
pub struct SourceOperand<'a> {
    pub kind: OperandKind,
    pub expr: &'a Expr,
    pub span: Span,
    /// Innermost function argument slot, when the leaf is a direct argument
    /// (parentheses do not break directness; operators do).
    pub context: Option<FuncContext>,
    /// Every function call on the path from the root, outermost first.
    pub enclosing: Vec<FuncContext>,
}

/// Depth-first, left-to-right flattening of every literal and reference
/// leaf. `Missing` placeholders for omitted arguments are not operands.
pub fn operands(ast: &FormulaAst) -> Vec<SourceOperand<'_>> {
    let mut out = Vec::new();
    walk(&ast.root, &mut Vec::new(), None, &mut out);
    out
}

fn walk<'a>(
    expr: &'a Expr,
    enclosing: &mut Vec<FuncContext>,
    direct: Option<&FuncContext>,
    out: &mut Vec<SourceOperand<'a>>,
) {
    let leaf = |kind: OperandKind| SourceOperand {
        kind,
        expr,
        span: expr.span(),
        context: direct.cloned(),
        enclosing: enclosing.clone(),
    };
    match expr {
        Expr::Literal { value, .. } => {
            if !matches!(value, LitValue::Missing) {
                out.push(leaf(OperandKind::Literal));
            }
        }
        Expr::CellRef { .. } | Expr::RangeRef { .. } => out.push(leaf(OperandKind::CellArea)),
        Expr::NamedRef { .. } => out.push(leaf(OperandKind::Named)),
        Expr::StructuredRef { .. } => out.push(leaf(OperandKind::Structured)),
        Expr::Paren { inner } => walk(inner, enclosing, direct, out),
        Expr::UnaryOp { operand, .. } | Expr::PercentOp { operand } => {
            walk(operand, enclosing, None, out)
        }
        Expr::BinaryOp { lhs, rhs, .. } => {
            walk(lhs, enclosing, None, out);
            walk(rhs, enclosing, None, out);
        }
        Expr::FuncCall { name, args, .. } => {
            for (i, arg) in args.iter().enumerate() {
                let ctx = FuncContext { name: name.clone(), arg: i };
                enclosing.push(ctx.clone());
                walk(arg, enclosing, Some(&ctx), out);
                enclosing.pop();
            }
        }
    }
}

/// Structural evidence that an indirect-class call is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    LiteralRangeArgument,
    TableArgument,
    ValidationConstrainedInput,
    SingleCellOffset,
}

/// One call to an indirect-class function found in a formula.
#[derive(Debug, Clone)]
pub struct IndirectUse<'a> {
    pub name: String,
    pub evidence: BTreeSet<Evidence>,
    pub span: Span,
    pub call: &'a Expr,
}

impl IndirectUse<'_> {
    pub fn args(&self) -> &[Expr] {
        match self.call {
            Expr::FuncCall { args, .. } => args,
            _ => &[],
        }
    }
}

/// Lists indirect-class calls in document order with the constraint
/// evidence visible from the formula alone. Validation-list evidence is a
/// workbook fact and is added by the scorer.
pub fn indirect_uses(ast: &FormulaAst) -> Vec<IndirectUse<'_>> {
    let mut out = Vec::new();
    collect_uses(&ast.root, &mut out);
    out
}

fn collect_uses<'a>(expr: &'a Expr, out: &mut Vec<IndirectUse<'a>>) {
    if let Expr::FuncCall { name, args, span } = expr {
        if INDIRECT_FUNCTIONS.contains(&name.as_str()) {
            out.push(IndirectUse {
                name: name.clone(),
                evidence: call_evidence(name, args),
                span: *span,
                call: expr,
            });
        }
    }
    match expr {
        Expr::FuncCall { args, .. } => {
            for a in args {
                collect_uses(a, out);
            }
        }
        Expr::BinaryOp { lhs, rhs, .. } => {
            collect_uses(lhs, out);
            collect_uses(rhs, out);
        }
        Expr::UnaryOp { operand, .. } | Expr::PercentOp { operand } => collect_uses(operand, out),
        Expr::Paren { inner } => collect_uses(inner, out),
        _ => {}
    }
}

fn call_evidence(name: &str, args: &[Expr]) -> BTreeSet<Evidence> {
    let mut ev = BTreeSet::new();
    let anchored_range = |idx: usize| {
        args.get(idx).map(unwrap_parens).is_some_and(|a| {
            matches!(a, Expr::RangeRef { .. } | Expr::StructuredRef { .. })
        })
    };
    match name {
        "VLOOKUP" | "HLOOKUP" => {
            if anchored_range(1) {
                ev.insert(Evidence::LiteralRangeArgument);
            }
        }
        "LOOKUP" => {
            if anchored_range(1) {
                ev.insert(Evidence::LiteralRangeArgument);
            }
        }
        "INDEX" => {
            if anchored_range(0) {
                ev.insert(Evidence::LiteralRangeArgument);
            }
        }
        "OFFSET" => {
            match args.first().map(unwrap_parens) {
                Some(Expr::StructuredRef { .. }) => {
                    ev.insert(Evidence::TableArgument);
                }
                Some(Expr::RangeRef { .. }) | Some(Expr::CellRef { .. }) => {
                    ev.insert(Evidence::LiteralRangeArgument);
                }
                _ => {}
            }
            let literal_one = |idx: usize| {
                args.get(idx).map(unwrap_parens).is_some_and(|a| {
                    matches!(a, Expr::Literal { value: LitValue::Number(n), .. } if *n == 1.0)
                })
            };
            if literal_one(3) && literal_one(4) {
                ev.insert(Evidence::SingleCellOffset);
            }
        }
        _ => {}
    }
    ev
}

fn unwrap_parens(expr: &Expr) -> &Expr {
    match expr {
        Expr::Paren { inner } => unwrap_parens(inner),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    #[test]
    fn single_literal_has_no_context() {
        let ast = parse_formula("=1").unwrap();
        let ops = operands(&ast);
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].kind, OperandKind::Literal);
        assert!(ops[0].context.is_none());
        assert!(ops[0].enclosing.is_empty());
    }

    #[test]
    fn lookup_operands_carry_argument_slots() {
        let ast = parse_formula("=VLOOKUP(A1,A3:B5,2,FALSE)").unwrap();
        let ops = operands(&ast);
        assert_eq!(ops.len(), 4);
        assert_eq!(ops[0].kind, OperandKind::CellArea);
        assert_eq!(ops[1].kind, OperandKind::CellArea);
        let two = &ops[2];
        assert_eq!(two.kind, OperandKind::Literal);
        assert_eq!(two.context, Some(FuncContext { name: "VLOOKUP".into(), arg: 2 }));
        let flag = &ops[3];
        assert_eq!(flag.context, Some(FuncContext { name: "VLOOKUP".into(), arg: 3 }));
    }

    #[test]
    fn operators_break_directness_but_not_enclosure() {
        let ast = parse_formula("=PMT(Rate/MPP, Periods, Loan_Amount)").unwrap();
        let ops = operands(&ast);
        assert_eq!(ops.len(), 4);
        assert!(ops[0].context.is_none());
        assert!(ops[1].context.is_none());
        assert_eq!(ops[0].enclosing, vec![FuncContext { name: "PMT".into(), arg: 0 }]);
        assert_eq!(ops[2].context, Some(FuncContext { name: "PMT".into(), arg: 1 }));
        assert_eq!(ops[3].context, Some(FuncContext { name: "PMT".into(), arg: 2 }));
    }

    #[test]
    fn parens_preserve_directness() {
        let ast = parse_formula("=ROUND((2),0)").unwrap();
        let ops = operands(&ast);
        assert_eq!(ops[0].context, Some(FuncContext { name: "ROUND".into(), arg: 0 }));
    }

    #[test]
    fn bare_literal_in_arithmetic() {
        let ast = parse_formula("=A11 * 12").unwrap();
        let ops = operands(&ast);
        assert_eq!(ops.len(), 2);
        assert_eq!(ops[1].kind, OperandKind::Literal);
        assert!(ops[1].context.is_none());
    }

    #[test]
    fn missing_arguments_are_skipped() {
        let ast = parse_formula("=IF(A1,,2)").unwrap();
        let ops = operands(&ast);
        assert_eq!(ops.len(), 2);
    }

    #[test]
    fn nested_enclosure_order() {
        let ast = parse_formula("=IFERROR(SUM(A1+B1),0)").unwrap();
        let ops = operands(&ast);
        assert_eq!(
            ops[0].enclosing,
            vec![
                FuncContext { name: "IFERROR".into(), arg: 0 },
                FuncContext { name: "SUM".into(), arg: 0 },
            ]
        );
        assert!(ops[0].context.is_none());
    }

    #[test]
    fn no_indirect_uses_in_plain_sum() {
        let ast = parse_formula("=SUM(A1:A3)").unwrap();
        assert!(indirect_uses(&ast).is_empty());
    }

    #[test]
    fn vlookup_over_literal_range_is_constrained() {
        let ast = parse_formula("=VLOOKUP(A1,A3:B5,2,FALSE)").unwrap();
        let uses = indirect_uses(&ast);
        assert_eq!(uses.len(), 1);
        assert_eq!(uses[0].name, "VLOOKUP");
        assert!(uses[0].evidence.contains(&Evidence::LiteralRangeArgument));
    }

    #[test]
    fn layered_indirect_chain() {
        let ast =
            parse_formula("=VLOOKUP([@Label],INDIRECT(OFFSET([#Headers],1,1,1,1)),2,FALSE)")
                .unwrap();
        let uses = indirect_uses(&ast);
        let names: Vec<&str> = uses.iter().map(|u| u.name.as_str()).collect();
        assert_eq!(names, vec!["VLOOKUP", "INDIRECT", "OFFSET"]);
        let offset = &uses[2];
        assert!(offset.evidence.contains(&Evidence::TableArgument));
        assert!(offset.evidence.contains(&Evidence::SingleCellOffset));
        assert!(uses[0].evidence.is_empty());
        assert!(uses[1].evidence.is_empty());
    }

    #[test]
    fn unconstrained_indirect_has_no_evidence() {
        let ast = parse_formula("=INDIRECT(C1)").unwrap();
        let uses = indirect_uses(&ast);
        assert_eq!(uses.len(), 1);
        assert!(uses[0].evidence.is_empty());
    }
}
