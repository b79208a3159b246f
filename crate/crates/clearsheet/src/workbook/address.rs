//! Cell and area addressing in A1 style.

use std::fmt;

use serde::{Serialize, Serializer};

/// Largest row index a worksheet can hold (1-based).
pub const MAX_ROW: u32 = 1_048_576;
/// Largest column index a worksheet can hold (1-based, XFD).
pub const MAX_COL: u32 = 16_384;

/// Absolute location of one cell: sheet name plus 1-based row/column.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellAddress {
    pub sheet: String,
    pub row: u32,
    pub col: u32,
}

impl CellAddress {
    pub fn new(sheet: impl Into<String>, row: u32, col: u32) -> CellAddress {
        CellAddress { sheet: sheet.into(), row, col }
    }

    /// Local A1 text without the sheet prefix.
    pub fn a1(&self) -> String {
        format!("{}{}", col_to_letters(self.col), self.row)
    }

    /// Parses "Sheet1!B2" or "'My Sheet'!B2"; the sheet part is required.
    pub fn parse(s: &str) -> Option<CellAddress> {
        let (sheet, rest) = split_sheet_prefix(s)?;
        let (col, row) = parse_a1(rest)?;
        Some(CellAddress { sheet, row, col })
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}!{}", quote_sheet(&self.sheet), self.a1())
    }
}

impl Serialize for CellAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Rectangular area on a single sheet, corners inclusive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AreaRef {
    pub sheet: String,
    pub row1: u32,
    pub col1: u32,
    pub row2: u32,
    pub col2: u32,
}

impl AreaRef {
    /// Normalizes corner order.
    pub fn new(sheet: impl Into<String>, row1: u32, col1: u32, row2: u32, col2: u32) -> AreaRef {
        AreaRef {
            sheet: sheet.into(),
            row1: row1.min(row2),
            col1: col1.min(col2),
            row2: row1.max(row2),
            col2: col1.max(col2),
        }
    }

    pub fn single(addr: &CellAddress) -> AreaRef {
        AreaRef::new(addr.sheet.clone(), addr.row, addr.col, addr.row, addr.col)
    }

    pub fn top_left(&self) -> CellAddress {
        CellAddress::new(self.sheet.clone(), self.row1, self.col1)
    }

    pub fn contains(&self, addr: &CellAddress) -> bool {
        addr.sheet == self.sheet
            && (self.row1..=self.row2).contains(&addr.row)
            && (self.col1..=self.col2).contains(&addr.col)
    }

    pub fn height(&self) -> u32 {
        self.row2 - self.row1 + 1
    }

    pub fn width(&self) -> u32 {
        self.col2 - self.col1 + 1
    }

    pub fn cell_count(&self) -> u64 {
        u64::from(self.height()) * u64::from(self.width())
    }

    pub fn is_single_cell(&self) -> bool {
        self.row1 == self.row2 && self.col1 == self.col2
    }

    pub fn as_single_cell(&self) -> Option<CellAddress> {
        self.is_single_cell().then(|| self.top_left())
    }

    /// Row-major iteration over every address in the area.
    pub fn cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        (self.row1..=self.row2).flat_map(move |r| {
            (self.col1..=self.col2).map(move |c| CellAddress::new(self.sheet.clone(), r, c))
        })
    }

    /// Parses "Sheet1!A3:B5" or a single-cell form "Sheet1!A3".
    pub fn parse(s: &str) -> Option<AreaRef> {
        let (sheet, rest) = split_sheet_prefix(s)?;
        match rest.split_once(':') {
            Some((a, b)) => {
                let (c1, r1) = parse_a1(a)?;
                let (c2, r2) = parse_a1(b)?;
                Some(AreaRef::new(sheet, r1, c1, r2, c2))
            }
            None => {
                let (c, r) = parse_a1(rest)?;
                Some(AreaRef::new(sheet, r, c, r, c))
            }
        }
    }
}

impl fmt::Display for AreaRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}!{}{}", quote_sheet(&self.sheet), col_to_letters(self.col1), self.row1)?;
        if !self.is_single_cell() {
            write!(f, ":{}{}", col_to_letters(self.col2), self.row2)?;
        }
        Ok(())
    }
}

impl Serialize for AreaRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// 1-based column index to letters: 1 → A, 27 → AA.
pub fn col_to_letters(mut col: u32) -> String {
    let mut out = Vec::new();
    while col > 0 {
        let rem = (col - 1) % 26;
        out.push(b'A' + rem as u8);
        col = (col - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

/// Column letters to 1-based index; None when empty, non-alphabetic, or out of range.
pub fn letters_to_col(s: &str) -> Option<u32> {
    if s.is_empty() || s.len() > 3 {
        return None;
    }
    let mut col: u32 = 0;
    for ch in s.chars() {
        if !ch.is_ascii_alphabetic() {
            return None;
        }
        col = col * 26 + (ch.to_ascii_uppercase() as u32 - 'A' as u32 + 1);
    }
    (col <= MAX_COL).then_some(col)
}

/// Parses a plain A1 token (no sheet, "$" markers allowed) into (col, row).
pub fn parse_a1(s: &str) -> Option<(u32, u32)> {
    let s = s.trim();
    let mut letters = String::new();
    let mut digits = String::new();
    let mut chars = s.chars().peekable();
    if chars.peek() == Some(&'$') {
        chars.next();
    }
    while let Some(ch) = chars.peek() {
        if ch.is_ascii_alphabetic() {
            letters.push(*ch);
            chars.next();
        } else {
            break;
        }
    }
    if chars.peek() == Some(&'$') {
        chars.next();
    }
    for ch in chars {
        if ch.is_ascii_digit() {
            digits.push(ch);
        } else {
            return None;
        }
    }
    let col = letters_to_col(&letters)?;
    let row: u32 = digits.parse().ok()?;
    (row >= 1 && row <= MAX_ROW).then_some((col, row))
}

/// Quotes a sheet name when it needs quoting in formula/display text.
pub fn quote_sheet(name: &str) -> String {
    let plain = !name.is_empty()
        && !name.chars().next().is_some_and(|c| c.is_ascii_digit())
        && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.');
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

/// Splits "Sheet1!A1" / "'My Sheet'!A1" into (sheet, rest-after-bang).
fn split_sheet_prefix(s: &str) -> Option<(String, &str)> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('\'') {
        let mut name = String::new();
        let mut chars = rest.char_indices().peekable();
        while let Some((i, ch)) = chars.next() {
            if ch == '\'' {
                if chars.peek().map(|(_, c)| *c) == Some('\'') {
                    name.push('\'');
                    chars.next();
                } else {
                    let tail = &rest[i + 1..];
                    let tail = tail.strip_prefix('!')?;
                    return Some((name, tail));
                }
            } else {
                name.push(ch);
            }
        }
        None
    } else {
        let (sheet, rest) = s.split_once('!')?;
        (!sheet.is_empty()).then(|| (sheet.to_string(), rest))
    }
}
