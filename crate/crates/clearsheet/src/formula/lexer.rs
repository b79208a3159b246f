//! Tokenizer. References (cells, ranges, sheet-qualified and structured
//! forms) are lexed as single composite tokens so the parser never has to
//! reassemble them from pieces.

use crate::workbook::address::{letters_to_col, MAX_COL, MAX_ROW};

use super::{
    CellRef, Corner, FormulaError, RangeRef, SheetRef, Span, StructuredRef, TableRegion,
};

#[derive(Debug, Clone, PartialEq)]
pub(super) enum TokKind {
    Number(f64),
    Str(String),
    ErrLit(String),
    Ident(String),
    /// Sheet-qualified defined name, e.g. `Sheet1!Rate`.
    SheetName { sheet: SheetRef, name: String },
    Cell(CellRef),
    Range(RangeRef),
    Structured(StructuredRef),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Amp,
    Percent,
    OpEq,
    OpNe,
    OpLt,
    OpLe,
    OpGt,
    OpGe,
    LParen,
    RParen,
    Comma,
    LBrace,
    RBrace,
    Semi,
}

#[derive(Debug, Clone, PartialEq)]
pub(super) struct Token {
    pub kind: TokKind,
    pub span: Span,
}

const ERROR_CODES: [&str; 10] = [
    "#GETTING_DATA",
    "#DIV/0!",
    "#VALUE!",
    "#SPILL!",
    "#NAME?",
    "#NULL!",
    "#CALC!",
    "#NUM!",
    "#REF!",
    "#N/A",
];

struct Lexer<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    base: usize,
}

/// Tokenizes expression text (no leading "="); `base` offsets every span.
pub(super) fn lex(text: &str, base: usize) -> Result<Vec<Token>, FormulaError> {
    let mut lx = Lexer { text, chars: text.char_indices().collect(), i: 0, base };
    let mut out = Vec::new();
    loop {
        lx.skip_ws();
        if lx.at_end() {
            return Ok(out);
        }
        let start = lx.offset();
        let kind = lx.next_token()?;
        let end = lx.offset();
        out.push(Token { kind, span: Span::new(start + base, end + base) });
    }
}

impl<'a> Lexer<'a> {
    fn at_end(&self) -> bool {
        self.i >= self.chars.len()
    }

    fn offset(&self) -> usize {
        self.chars.get(self.i).map_or(self.text.len(), |(o, _)| *o)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.i += 1;
        }
        c
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.i += 1;
        }
    }

    fn slice(&self, from: usize, to: usize) -> &'a str {
        let a = self.chars.get(from).map_or(self.text.len(), |(o, _)| *o);
        let b = self.chars.get(to).map_or(self.text.len(), |(o, _)| *o);
        &self.text[a..b]
    }

    fn next_token(&mut self) -> Result<TokKind, FormulaError> {
        if let Some(kind) = self.try_reference() {
            return Ok(kind);
        }
        let pos = self.offset() + self.base;
        let c = self.peek().ok_or(FormulaError::UnknownToken { pos })?;
        match c {
            '"' => self.lex_string(),
            '#' => self.lex_error_code(),
            '0'..='9' | '.' => self.lex_number(),
            '+' => {
                self.i += 1;
                Ok(TokKind::Plus)
            }
            '-' => {
                self.i += 1;
                Ok(TokKind::Minus)
            }
            '*' => {
                self.i += 1;
                Ok(TokKind::Star)
            }
            '/' => {
                self.i += 1;
                Ok(TokKind::Slash)
            }
            '^' => {
                self.i += 1;
                Ok(TokKind::Caret)
            }
            '&' => {
                self.i += 1;
                Ok(TokKind::Amp)
            }
            '%' => {
                self.i += 1;
                Ok(TokKind::Percent)
            }
            '=' => {
                self.i += 1;
                Ok(TokKind::OpEq)
            }
            '<' => {
                self.i += 1;
                if self.eat('>') {
                    Ok(TokKind::OpNe)
                } else if self.eat('=') {
                    Ok(TokKind::OpLe)
                } else {
                    Ok(TokKind::OpLt)
                }
            }
            '>' => {
                self.i += 1;
                if self.eat('=') {
                    Ok(TokKind::OpGe)
                } else {
                    Ok(TokKind::OpGt)
                }
            }
            '(' => {
                self.i += 1;
                Ok(TokKind::LParen)
            }
            ')' => {
                self.i += 1;
                Ok(TokKind::RParen)
            }
            ',' => {
                self.i += 1;
                Ok(TokKind::Comma)
            }
            '{' => {
                self.i += 1;
                Ok(TokKind::LBrace)
            }
            '}' => {
                self.i += 1;
                Ok(TokKind::RBrace)
            }
            ';' => {
                self.i += 1;
                Ok(TokKind::Semi)
            }
            _ => Err(FormulaError::UnknownToken { pos }),
        }
    }

    fn lex_string(&mut self) -> Result<TokKind, FormulaError> {
        let start_pos = self.offset() + self.base;
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('"') => {
                    if self.eat('"') {
                        s.push('"');
                    } else {
                        return Ok(TokKind::Str(s));
                    }
                }
                Some(c) => s.push(c),
                None => return Err(FormulaError::UnknownToken { pos: start_pos }),
            }
        }
    }

    fn lex_error_code(&mut self) -> Result<TokKind, FormulaError> {
        let rest: String = self.chars[self.i..].iter().map(|(_, c)| *c).collect();
        let upper = rest.to_ascii_uppercase();
        for code in ERROR_CODES {
            if upper.starts_with(code) {
                self.i += code.chars().count();
                return Ok(TokKind::ErrLit(code.to_string()));
            }
        }
        Err(FormulaError::UnknownToken { pos: self.offset() + self.base })
    }

    fn lex_number(&mut self) -> Result<TokKind, FormulaError> {
        let start = self.i;
        let pos = self.offset() + self.base;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        if self.eat('.') {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.i += 1;
            }
        }
        if self.peek().is_some_and(|c| c == 'e' || c == 'E') {
            let save = self.i;
            self.i += 1;
            if self.peek().is_some_and(|c| c == '+' || c == '-') {
                self.i += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.i += 1;
                }
            } else {
                self.i = save;
            }
        }
        let text = self.slice(start, self.i);
        text.parse::<f64>()
            .map(TokKind::Number)
            .map_err(|_| FormulaError::UnknownToken { pos })
    }

    /// Attempts a composite reference token at the cursor; resets on failure.
    fn try_reference(&mut self) -> Option<TokKind> {
        let save = self.i;
        let result = self.reference_inner();
        if result.is_none() {
            self.i = save;
        }
        result
    }

    fn reference_inner(&mut self) -> Option<TokKind> {
        match self.peek()? {
            '\'' => {
                let sheet = self.quoted_sheet()?;
                self.body_after_prefix(sheet)
            }
            '[' => {
                let save = self.i;
                if let Some(sheet) = self.bare_book_sheet() {
                    if let Some(tok) = self.body_after_prefix(sheet) {
                        return Some(tok);
                    }
                }
                self.i = save;
                self.bump();
                self.structured_body(None)
            }
            '$' | '0'..='9' => self.area_body(None),
            c if is_ident_start(c) => {
                let save = self.i;
                if let Some(sheet) = self.bare_sheet() {
                    if let Some(tok) = self.body_after_prefix(sheet) {
                        return Some(tok);
                    }
                }
                self.i = save;
                if let Some(tok) = self.area_body(None) {
                    return Some(tok);
                }
                self.i = save;
                let name = self.ident()?;
                if self.peek() == Some('[') {
                    self.bump();
                    return self.structured_body(Some(name));
                }
                Some(TokKind::Ident(name))
            }
            _ => None,
        }
    }

    /// `'Sheet name'!` or `'[Book]Sheet name'!`; cursor ends after `!`.
    fn quoted_sheet(&mut self) -> Option<SheetRef> {
        self.bump();
        let mut content = String::new();
        loop {
            match self.bump()? {
                '\'' => {
                    if self.eat('\'') {
                        content.push('\'');
                    } else {
                        break;
                    }
                }
                c => content.push(c),
            }
        }
        if !self.eat('!') || content.is_empty() {
            return None;
        }
        if let Some(rest) = content.strip_prefix('[') {
            if let Some((book, name)) = rest.split_once(']') {
                return Some(SheetRef { book: Some(book.to_string()), name: name.to_string() });
            }
        }
        Some(SheetRef { book: None, name: content })
    }

    /// `Sheet1!`; cursor ends after `!`.
    fn bare_sheet(&mut self) -> Option<SheetRef> {
        let name = self.ident()?;
        self.eat('!').then_some(SheetRef { book: None, name })
    }

    /// `[Book.xlsx]Sheet1!`; cursor ends after `!`.
    fn bare_book_sheet(&mut self) -> Option<SheetRef> {
        self.bump();
        let mut book = String::new();
        loop {
            let c = self.bump()?;
            if c == ']' {
                break;
            }
            book.push(c);
        }
        if book.is_empty() {
            return None;
        }
        let name = self.ident()?;
        self.eat('!').then_some(SheetRef { book: Some(book), name })
    }

    /// After a sheet prefix: an area, or a sheet-scoped defined name.
    fn body_after_prefix(&mut self, sheet: SheetRef) -> Option<TokKind> {
        let save = self.i;
        if let Some(tok) = self.area_body(Some(sheet.clone())) {
            return Some(tok);
        }
        self.i = save;
        let name = self.ident()?;
        if self.peek() == Some('[') || self.peek() == Some('(') {
            return None;
        }
        Some(TokKind::SheetName { sheet, name })
    }

    /// Cell, cell range, full-column range, or full-row range.
    fn area_body(&mut self, sheet: Option<SheetRef>) -> Option<TokKind> {
        if let Some(first) = self.cell_part() {
            let save = self.i;
            if self.eat(':') {
                if let Some(second) = self.cell_part() {
                    if self.boundary_ok(false) {
                        return Some(TokKind::Range(RangeRef {
                            sheet,
                            start: corner_from_cell(&first),
                            end: corner_from_cell(&second),
                        }));
                    }
                }
                self.i = save;
            }
            if self.boundary_ok(true) {
                let (col, row, abs_col, abs_row) = first;
                return Some(TokKind::Cell(CellRef { sheet, col, row, abs_col, abs_row }));
            }
            return None;
        }
        if let Some(first) = self.col_part() {
            if self.eat(':') {
                if let Some(second) = self.col_part() {
                    if self.boundary_ok(false) {
                        return Some(TokKind::Range(RangeRef {
                            sheet,
                            start: Corner {
                                col: Some(first.0),
                                row: None,
                                abs_col: first.1,
                                abs_row: false,
                            },
                            end: Corner {
                                col: Some(second.0),
                                row: None,
                                abs_col: second.1,
                                abs_row: false,
                            },
                        }));
                    }
                }
            }
            return None;
        }
        if let Some(first) = self.row_part() {
            if self.eat(':') {
                if let Some(second) = self.row_part() {
                    if self.boundary_ok(false) {
                        return Some(TokKind::Range(RangeRef {
                            sheet,
                            start: Corner {
                                col: None,
                                row: Some(first.0),
                                abs_col: false,
                                abs_row: first.1,
                            },
                            end: Corner {
                                col: None,
                                row: Some(second.0),
                                abs_col: false,
                                abs_row: second.1,
                            },
                        }));
                    }
                }
            }
            return None;
        }
        None
    }

    /// The next char must not extend the reference into an identifier.
    /// `reject_call`: a following `(` means this was a function name.
    fn boundary_ok(&self, reject_call: bool) -> bool {
        match self.peek() {
            None => true,
            Some(c) if is_ident_continue(c) => false,
            Some('(') => !reject_call,
            Some('!') => false,
            _ => true,
        }
    }

    /// `$`? letters{1..3} `$`? digits, bounds-checked.
    fn cell_part(&mut self) -> Option<(u32, u32, bool, bool)> {
        let save = self.i;
        let abs_col = self.eat('$');
        let mut letters = String::new();
        while letters.len() < 3 && self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            letters.push(self.bump().unwrap());
        }
        let abs_row = self.eat('$');
        let mut digits = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            digits.push(self.bump().unwrap());
        }
        let result = (|| {
            let col = letters_to_col(&letters)?;
            let row: u32 = digits.parse().ok()?;
            (row >= 1 && row <= MAX_ROW).then_some((col, row, abs_col, abs_row))
        })();
        if result.is_none() {
            self.i = save;
        }
        result
    }

    /// `$`? letters{1..3}, for full-column ranges.
    fn col_part(&mut self) -> Option<(u32, bool)> {
        let save = self.i;
        let abs = self.eat('$');
        let mut letters = String::new();
        while letters.len() < 3 && self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            letters.push(self.bump().unwrap());
        }
        match letters_to_col(&letters) {
            Some(col) => Some((col, abs)),
            None => {
                self.i = save;
                None
            }
        }
    }

    /// `$`? digits, for full-row ranges.
    fn row_part(&mut self) -> Option<(u32, bool)> {
        let save = self.i;
        let abs = self.eat('$');
        let mut digits = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            digits.push(self.bump().unwrap());
        }
        let row: u32 = match digits.parse() {
            Ok(r) => r,
            Err(_) => {
                self.i = save;
                return None;
            }
        };
        if row >= 1 && row <= MAX_ROW {
            Some((row, abs))
        } else {
            self.i = save;
            None
        }
    }

    fn ident(&mut self) -> Option<String> {
        if !self.peek().is_some_and(is_ident_start) {
            return None;
        }
        let mut s = String::new();
        while self.peek().is_some_and(is_ident_continue) {
            s.push(self.bump().unwrap());
        }
        Some(s)
    }

    /// Bracket body of a structured reference; the opening `[` is consumed.
    fn structured_body(&mut self, table: Option<String>) -> Option<TokKind> {
        let done = |region, column| {
            Some(TokKind::Structured(StructuredRef { table, region, column }))
        };
        match self.peek()? {
            ']' => {
                self.bump();
                done(TableRegion::Data, None)
            }
            '@' => {
                self.bump();
                if self.eat(']') {
                    return done(TableRegion::ThisRow, None);
                }
                let bracketed = self.eat('[');
                let column = self.bracket_item()?;
                if !self.eat(']') {
                    return None;
                }
                if bracketed && !self.eat(']') {
                    return None;
                }
                done(TableRegion::ThisRow, Some(column))
            }
            '#' => {
                let word = self.bracket_item()?;
                if !self.eat(']') {
                    return None;
                }
                done(region_from_word(&word)?, None)
            }
            '[' => {
                let mut region = None;
                let mut column = None;
                loop {
                    if !self.eat('[') {
                        return None;
                    }
                    let item = self.bracket_item()?;
                    if !self.eat(']') {
                        return None;
                    }
                    if let Some(stripped) = item.strip_prefix('#') {
                        if region.is_some() {
                            return None;
                        }
                        region = Some(region_from_word(&format!("#{stripped}"))?);
                    } else if item.starts_with('@') {
                        return None;
                    } else {
                        if column.is_some() {
                            return None;
                        }
                        column = Some(item);
                    }
                    if self.eat(',') {
                        continue;
                    }
                    if self.eat(']') {
                        break;
                    }
                    return None;
                }
                done(region.unwrap_or(TableRegion::Data), column)
            }
            _ => {
                let column = self.bracket_item()?;
                if !self.eat(']') {
                    return None;
                }
                done(TableRegion::Data, Some(column))
            }
        }
    }

    /// Text up to an unescaped `]` or `,`; `'` escapes the next char.
    fn bracket_item(&mut self) -> Option<String> {
        let mut s = String::new();
        loop {
            match self.peek()? {
                ']' | ',' => break,
                '\'' => {
                    self.bump();
                    s.push(self.bump()?);
                }
                '[' => return None,
                c => {
                    s.push(c);
                    self.bump();
                }
            }
        }
        (!s.is_empty()).then_some(s)
    }
}

fn corner_from_cell(c: &(u32, u32, bool, bool)) -> Corner {
    Corner { col: Some(c.0), row: Some(c.1), abs_col: c.2, abs_row: c.3 }
}

fn region_from_word(word: &str) -> Option<TableRegion> {
    match word.to_ascii_lowercase().as_str() {
        "#all" => Some(TableRegion::All),
        "#data" => Some(TableRegion::Data),
        "#headers" => Some(TableRegion::Headers),
        "#totals" => Some(TableRegion::Totals),
        "#this row" => Some(TableRegion::ThisRow),
        _ => None,
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '.' || c.is_alphanumeric()
}

/// Rewrites relative cell/range references by a row/column delta, leaving all
/// other text untouched. Used to expand shared formulas to sibling cells.
/// References pushed off the sheet become `#REF!`.
pub fn translate_formula(text: &str, delta_row: i64, delta_col: i64) -> String {
    let (prefix, expr) = match text.strip_prefix('=') {
        Some(rest) => ("=", rest),
        None => ("", text),
    };
    let tokens = match lex(expr, 0) {
        Ok(t) => t,
        Err(_) => return text.to_string(),
    };
    let mut out = String::from(prefix);
    let mut copied = 0;
    for tok in &tokens {
        let replacement = match &tok.kind {
            TokKind::Cell(cell) => Some(translate_cell(cell, delta_row, delta_col)),
            TokKind::Range(range) => Some(translate_range(range, delta_row, delta_col)),
            _ => None,
        };
        if let Some(new_text) = replacement {
            out.push_str(&expr[copied..tok.span.start]);
            out.push_str(&new_text);
            copied = tok.span.end;
        }
    }
    out.push_str(&expr[copied..]);
    out
}

fn shift(value: u32, abs: bool, delta: i64, max: u32) -> Option<u32> {
    if abs || delta == 0 {
        return Some(value);
    }
    let moved = i64::from(value) + delta;
    (moved >= 1 && moved <= i64::from(max)).then_some(moved as u32)
}

fn translate_cell(cell: &CellRef, dr: i64, dc: i64) -> String {
    let row = shift(cell.row, cell.abs_row, dr, MAX_ROW);
    let col = shift(cell.col, cell.abs_col, dc, MAX_COL);
    match (row, col) {
        (Some(row), Some(col)) => CellRef { row, col, ..cell.clone() }.to_string(),
        _ => "#REF!".to_string(),
    }
}

fn translate_corner(c: &Corner, dr: i64, dc: i64) -> Option<Corner> {
    let row = match c.row {
        Some(r) => Some(shift(r, c.abs_row, dr, MAX_ROW)?),
        None => None,
    };
    let col = match c.col {
        Some(v) => Some(shift(v, c.abs_col, dc, MAX_COL)?),
        None => None,
    };
    Some(Corner { col, row, abs_col: c.abs_col, abs_row: c.abs_row })
}

fn translate_range(range: &RangeRef, dr: i64, dc: i64) -> String {
    match (translate_corner(&range.start, dr, dc), translate_corner(&range.end, dr, dc)) {
        (Some(start), Some(end)) => RangeRef { start, end, sheet: range.sheet.clone() }.to_string(),
        _ => "#REF!".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokKind> {
        lex(text, 0).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn cells_ranges_and_names() {
        assert_eq!(
            kinds("A1"),
            vec![TokKind::Cell(CellRef {
                sheet: None,
                col: 1,
                row: 1,
                abs_col: false,
                abs_row: false
            })]
        );
        match &kinds("A3:B5")[0] {
            TokKind::Range(r) => {
                assert_eq!(r.start.col, Some(1));
                assert_eq!(r.start.row, Some(3));
                assert_eq!(r.end.col, Some(2));
                assert_eq!(r.end.row, Some(5));
            }
            other => panic!("expected range, got {other:?}"),
        }
        assert_eq!(kinds("Rate"), vec![TokKind::Ident("Rate".into())]);
        assert_eq!(kinds("Loan_Amount"), vec![TokKind::Ident("Loan_Amount".into())]);
        assert_eq!(kinds("AAAA1"), vec![TokKind::Ident("AAAA1".into())]);
        assert_eq!(kinds("R1C1"), vec![TokKind::Ident("R1C1".into())]);
    }

    #[test]
    fn function_name_that_looks_like_a_cell() {
        let toks = kinds("LOG10(8)");
        assert_eq!(toks[0], TokKind::Ident("LOG10".into()));
        assert_eq!(toks[1], TokKind::LParen);
    }

    #[test]
    fn sheet_prefixes() {
        match &kinds("Sheet2!B7")[0] {
            TokKind::Cell(c) => {
                assert_eq!(c.sheet.as_ref().unwrap().name, "Sheet2");
                assert_eq!((c.col, c.row), (2, 7));
            }
            other => panic!("{other:?}"),
        }
        match &kinds("'My Sheet'!A1:C3")[0] {
            TokKind::Range(r) => assert_eq!(r.sheet.as_ref().unwrap().name, "My Sheet"),
            other => panic!("{other:?}"),
        }
        match &kinds("'[Book2.xlsx]Prices'!D4")[0] {
            TokKind::Cell(c) => {
                let s = c.sheet.as_ref().unwrap();
                assert_eq!(s.book.as_deref(), Some("Book2.xlsx"));
                assert_eq!(s.name, "Prices");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            kinds("Sheet1!Rate"),
            vec![TokKind::SheetName {
                sheet: SheetRef { book: None, name: "Sheet1".into() },
                name: "Rate".into()
            }]
        );
    }

    #[test]
    fn full_row_and_column_ranges() {
        match &kinds("A:C")[0] {
            TokKind::Range(r) => {
                assert_eq!(r.start.col, Some(1));
                assert_eq!(r.start.row, None);
                assert_eq!(r.end.col, Some(3));
            }
            other => panic!("{other:?}"),
        }
        match &kinds("2:4")[0] {
            TokKind::Range(r) => {
                assert_eq!(r.start.row, Some(2));
                assert_eq!(r.start.col, None);
                assert_eq!(r.end.row, Some(4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structured_forms() {
        let cases: Vec<(&str, Option<&str>, TableRegion, Option<&str>)> = vec![
            ("Tbl[]", Some("Tbl"), TableRegion::Data, None),
            ("Tbl[Sales]", Some("Tbl"), TableRegion::Data, Some("Sales")),
            ("Tbl[Col Name]", Some("Tbl"), TableRegion::Data, Some("Col Name")),
            ("[@EBIT]", None, TableRegion::ThisRow, Some("EBIT")),
            ("[@[Net Income]]", None, TableRegion::ThisRow, Some("Net Income")),
            ("Tbl[#Headers]", Some("Tbl"), TableRegion::Headers, None),
            ("[#Headers]", None, TableRegion::Headers, None),
            ("Tbl[[#Totals],[Sales]]", Some("Tbl"), TableRegion::Totals, Some("Sales")),
            ("Tbl[[Sales]]", Some("Tbl"), TableRegion::Data, Some("Sales")),
        ];
        for (text, table, region, column) in cases {
            match &kinds(text)[0] {
                TokKind::Structured(s) => {
                    assert_eq!(s.table.as_deref(), table, "{text}");
                    assert_eq!(s.region, region, "{text}");
                    assert_eq!(s.column.as_deref(), column, "{text}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn literals_and_operators() {
        assert_eq!(
            kinds("1+2.5e2"),
            vec![TokKind::Number(1.0), TokKind::Plus, TokKind::Number(250.0)]
        );
        assert_eq!(kinds("\"say \"\"hi\"\"\""), vec![TokKind::Str("say \"hi\"".into())]);
        assert_eq!(kinds("#DIV/0!"), vec![TokKind::ErrLit("#DIV/0!".into())]);
        assert_eq!(kinds("#n/a"), vec![TokKind::ErrLit("#N/A".into())]);
        assert_eq!(
            kinds("a<=b<>c"),
            vec![
                TokKind::Ident("a".into()),
                TokKind::OpLe,
                TokKind::Ident("b".into()),
                TokKind::OpNe,
                TokKind::Ident("c".into()),
            ]
        );
    }

    #[test]
    fn unknown_token_position() {
        let err = lex("1 ~ 2", 1).unwrap_err();
        assert_eq!(err, FormulaError::UnknownToken { pos: 3 });
    }

    #[test]
    fn translate_shifts_relative_parts_only() {
        assert_eq!(translate_formula("=A1+$B$2", 1, 0), "=A2+$B$2");
        assert_eq!(translate_formula("=SUM(A1:B2)+C$3", 2, 1), "=SUM(B3:C4)+D$3");
        assert_eq!(translate_formula("=Rate*\"A1\"", 5, 5), "=Rate*\"A1\"");
        assert_eq!(translate_formula("=Sheet2!B7", 1, 0), "=Sheet2!B8");
        assert_eq!(translate_formula("=A1", -1, 0), "=#REF!");
    }
}
