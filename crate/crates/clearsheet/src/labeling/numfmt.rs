//! Number-format code analysis: which label parts a cell's own format can
//! supply, and recognition of format-shaped label text like "mm/dd/yyyy".

/// True when the format code contains date/time placeholders (y, m, d, h, s)
/// outside quoted literals, bracket sections, and backslash escapes.
pub fn has_date_tokens(code: &str) -> bool {
    scan_placeholders(code).any(|c| matches!(c, 'y' | 'm' | 'd' | 'h' | 's'))
}

/// Unit text conveyed by the format itself: a currency symbol, a bracketed
/// currency section like [$USD-409], a percent sign, or a quoted literal
/// that reads as a unit word (the caller checks it against the lexicon).
pub fn unit_candidates(code: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = code.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if let Some(&next) = chars.peek() {
                    if is_currency_symbol(next) {
                        out.push(next.to_string());
                    }
                    chars.next();
                }
            }
            '"' => {
                let mut lit = String::new();
                for q in chars.by_ref() {
                    if q == '"' {
                        break;
                    }
                    lit.push(q);
                }
                let trimmed = lit.trim();
                if !trimmed.is_empty() {
                    out.push(trimmed.to_string());
                }
            }
            '[' => {
                let mut section = String::new();
                for q in chars.by_ref() {
                    if q == ']' {
                        break;
                    }
                    section.push(q);
                }
                if let Some(rest) = section.strip_prefix('$') {
                    let symbol = rest.split('-').next().unwrap_or("").trim();
                    if !symbol.is_empty() {
                        out.push(symbol.to_string());
                    }
                }
            }
            c if is_currency_symbol(c) => out.push(c.to_string()),
            '%' => out.push("%".to_string()),
            _ => {}
        }
    }
    out
}

/// True when a number format spells 0/1 as yes/no or true/false literals.
pub fn flag_shaped_format(code: &str) -> bool {
    let lower = code.to_ascii_lowercase();
    ["yes", "no", "true", "false"].iter().any(|w| lower.contains(w))
}

/// True when free-standing label text looks like a format code rather than a
/// word: "mm/dd/yyyy", "h:mm", "yyyy-mm-dd". Words like "Months" do not
/// qualify because they use letters outside the placeholder set.
pub fn format_shaped_text(text: &str) -> bool {
    let t: String = text.trim().to_ascii_lowercase().replace(' ', "");
    if t.len() < 3 {
        return false;
    }
    let mut has_placeholder = false;
    let mut has_separator = false;
    for c in t.chars() {
        match c {
            'y' | 'd' | 'h' | 's' | 'm' => has_placeholder = true,
            ':' | '/' | '-' | '.' => has_separator = true,
            'a' | 'p' | '0'..='9' => {}
            _ => return false,
        }
    }
    has_placeholder && has_separator
}

fn is_currency_symbol(c: char) -> bool {
    matches!(c, '$' | '€' | '£' | '¥' | '₹' | '₩' | '¢')
}

/// Placeholder characters outside quotes, brackets, and escapes, lowercased.
fn scan_placeholders(code: &str) -> impl Iterator<Item = char> + '_ {
    let mut chars = code.chars();
    std::iter::from_fn(move || loop {
        let c = chars.next()?;
        match c {
            '\\' => {
                chars.next();
            }
            '_' | '*' => {
                // Padding/fill: the next char is literal.
                chars.next();
            }
            '"' => {
                for q in chars.by_ref() {
                    if q == '"' {
                        break;
                    }
                }
            }
            '[' => {
                for q in chars.by_ref() {
                    if q == ']' {
                        break;
                    }
                }
            }
            c => return Some(c.to_ascii_lowercase()),
        }
    })
}
