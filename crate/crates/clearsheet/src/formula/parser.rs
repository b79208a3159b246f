//! Recursive-descent parser over the token stream.

use super::lexer::{lex, TokKind, Token};
use super::{BinOp, Expr, FormulaAst, FormulaError, LitValue, Span, UnOp};

/// Parses formula text (must begin with "=") into an AST.
pub fn parse_formula(text: &str) -> Result<FormulaAst, FormulaError> {
    let expr_text = text.strip_prefix('=').ok_or(FormulaError::MissingEquals)?;
    let tokens = lex(expr_text, 1)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let root = p.expression()?;
    if let Some(tok) = p.peek() {
        return Err(FormulaError::Syntax {
            pos: tok.span.start,
            expected: "end of formula".to_string(),
        });
    }
    Ok(FormulaAst { root, text: text.to_string() })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokKind> {
        self.peek().map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.span.start)
    }

    fn err(&self, expected: &str) -> FormulaError {
        FormulaError::Syntax { pos: self.here(), expected: expected.to_string() }
    }

    fn expression(&mut self) -> Result<Expr, FormulaError> {
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.concat()?;
        while let Some(op) = match self.peek_kind() {
            Some(TokKind::OpEq) => Some(BinOp::Eq),
            Some(TokKind::OpNe) => Some(BinOp::Ne),
            Some(TokKind::OpLt) => Some(BinOp::Lt),
            Some(TokKind::OpLe) => Some(BinOp::Le),
            Some(TokKind::OpGt) => Some(BinOp::Gt),
            Some(TokKind::OpGe) => Some(BinOp::Ge),
            _ => None,
        } {
            self.pos += 1;
            let rhs = self.concat()?;
            lhs = Expr::BinaryOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn concat(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.add_sub()?;
        while self.eat(&TokKind::Amp) {
            let rhs = self.add_sub()?;
            lhs = Expr::BinaryOp { op: BinOp::Concat, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn add_sub(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.mul_div()?;
        while let Some(op) = match self.peek_kind() {
            Some(TokKind::Plus) => Some(BinOp::Add),
            Some(TokKind::Minus) => Some(BinOp::Sub),
            _ => None,
        } {
            self.pos += 1;
            let rhs = self.mul_div()?;
            lhs = Expr::BinaryOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn mul_div(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.exponent()?;
        while let Some(op) = match self.peek_kind() {
            Some(TokKind::Star) => Some(BinOp::Mul),
            Some(TokKind::Slash) => Some(BinOp::Div),
            _ => None,
        } {
            self.pos += 1;
            let rhs = self.exponent()?;
            lhs = Expr::BinaryOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn exponent(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.postfix()?;
        while self.eat(&TokKind::Caret) {
            let rhs = self.postfix()?;
            lhs = Expr::BinaryOp { op: BinOp::Pow, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr, FormulaError> {
        let mut operand = self.prefix()?;
        while self.eat(&TokKind::Percent) {
            operand = Expr::PercentOp { operand: Box::new(operand) };
        }
        Ok(operand)
    }

    fn prefix(&mut self) -> Result<Expr, FormulaError> {
        let op = match self.peek_kind() {
            Some(TokKind::Minus) => Some(UnOp::Neg),
            Some(TokKind::Plus) => Some(UnOp::Pos),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let operand = self.prefix()?;
            return Ok(Expr::UnaryOp { op, operand: Box::new(operand) });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, FormulaError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.err("a value or reference")),
        };
        match tok.kind {
            TokKind::Number(n) => {
                self.pos += 1;
                Ok(Expr::Literal { value: LitValue::Number(n), span: tok.span })
            }
            TokKind::Str(s) => {
                self.pos += 1;
                Ok(Expr::Literal { value: LitValue::Text(s), span: tok.span })
            }
            TokKind::ErrLit(e) => {
                self.pos += 1;
                Ok(Expr::Literal { value: LitValue::Error(e), span: tok.span })
            }
            TokKind::Cell(cell) => {
                self.pos += 1;
                Ok(Expr::CellRef { cell, span: tok.span })
            }
            TokKind::Range(range) => {
                self.pos += 1;
                Ok(Expr::RangeRef { range, span: tok.span })
            }
            TokKind::Structured(sref) => {
                self.pos += 1;
                Ok(Expr::StructuredRef { sref, span: tok.span })
            }
            TokKind::SheetName { sheet, name } => {
                self.pos += 1;
                Ok(Expr::NamedRef { sheet: Some(sheet), name, span: tok.span })
            }
            TokKind::Ident(name) => {
                self.pos += 1;
                if self.peek_kind() == Some(&TokKind::LParen) {
                    return self.call(name, tok.span);
                }
                if name.eq_ignore_ascii_case("TRUE") {
                    return Ok(Expr::Literal { value: LitValue::Bool(true), span: tok.span });
                }
                if name.eq_ignore_ascii_case("FALSE") {
                    return Ok(Expr::Literal { value: LitValue::Bool(false), span: tok.span });
                }
                Ok(Expr::NamedRef { sheet: None, name, span: tok.span })
            }
            TokKind::LParen => {
                self.pos += 1;
                let inner = self.expression()?;
                if !self.eat(&TokKind::RParen) {
                    return Err(self.err("')'"));
                }
                Ok(Expr::Paren { inner: Box::new(inner) })
            }
            TokKind::LBrace => self.array(tok.span),
            _ => Err(self.err("a value or reference")),
        }
    }

    fn call(&mut self, name: String, name_span: Span) -> Result<Expr, FormulaError> {
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek_kind() != Some(&TokKind::RParen) {
            loop {
                if matches!(self.peek_kind(), Some(TokKind::Comma) | Some(TokKind::RParen)) {
                    let at = self.here();
                    args.push(Expr::Literal {
                        value: LitValue::Missing,
                        span: Span::new(at, at),
                    });
                } else {
                    args.push(self.expression()?);
                }
                if !self.eat(&TokKind::Comma) {
                    break;
                }
            }
        }
        let close = match self.peek() {
            Some(t) if t.kind == TokKind::RParen => t.span.end,
            _ => return Err(self.err("')' or ','")),
        };
        self.pos += 1;
        Ok(Expr::FuncCall {
            name: name.to_uppercase(),
            args,
            span: Span::new(name_span.start, close),
        })
    }

    fn array(&mut self, open: Span) -> Result<Expr, FormulaError> {
        self.pos += 1;
        let mut rows = vec![Vec::new()];
        loop {
            let elem = self.array_scalar()?;
            rows.last_mut().unwrap().push(elem);
            match self.peek_kind() {
                Some(TokKind::Comma) => {
                    self.pos += 1;
                }
                Some(TokKind::Semi) => {
                    self.pos += 1;
                    rows.push(Vec::new());
                }
                Some(TokKind::RBrace) => {
                    let close = self.bump().unwrap().span.end;
                    return Ok(Expr::Literal {
                        value: LitValue::Array(rows),
                        span: Span::new(open.start, close),
                    });
                }
                _ => return Err(self.err("',', ';' or '}'")),
            }
        }
    }

    fn array_scalar(&mut self) -> Result<LitValue, FormulaError> {
        let neg = self.eat(&TokKind::Minus);
        let tok = match self.bump() {
            Some(t) => t,
            None => return Err(self.err("an array element")),
        };
        match tok.kind {
            TokKind::Number(n) => Ok(LitValue::Number(if neg { -n } else { n })),
            TokKind::Str(s) if !neg => Ok(LitValue::Text(s)),
            TokKind::ErrLit(e) if !neg => Ok(LitValue::Error(e)),
            TokKind::Ident(name) if !neg && name.eq_ignore_ascii_case("TRUE") => {
                Ok(LitValue::Bool(true))
            }
            TokKind::Ident(name) if !neg && name.eq_ignore_ascii_case("FALSE") => {
                Ok(LitValue::Bool(false))
            }
            _ => Err(FormulaError::Syntax {
                pos: tok.span.start,
                expected: "a scalar array element".to_string(),
            }),
        }
    }
}
