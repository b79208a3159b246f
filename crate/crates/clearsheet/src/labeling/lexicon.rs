//! Editable word lists backing classification: unit words, identity-header
//! tokens, interrogative subjects, and documentation sheet names. Built-in
//! copies are embedded; a directory of same-named files overrides them.

use std::collections::BTreeSet;
use std::path::Path;

const UNITS: &str = include_str!("../../data/lexicons/units.txt");
const IDENTITY_HEADERS: &str = include_str!("../../data/lexicons/identity_headers.txt");
const INTERROGATIVES: &str = include_str!("../../data/lexicons/interrogatives.txt");
const DOC_SHEETS: &str = include_str!("../../data/lexicons/doc_sheets.txt");

#[derive(Debug, Clone)]
pub struct LexiconSet {
    units: BTreeSet<String>,
    identity_headers: BTreeSet<String>,
    interrogatives: BTreeSet<String>,
    doc_sheets: BTreeSet<String>,
}

fn parse_terms(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_ascii_lowercase)
        .collect()
}

impl Default for LexiconSet {
    fn default() -> Self {
        LexiconSet::builtin()
    }
}

impl LexiconSet {
    pub fn builtin() -> LexiconSet {
        LexiconSet {
            units: parse_terms(UNITS),
            identity_headers: parse_terms(IDENTITY_HEADERS),
            interrogatives: parse_terms(INTERROGATIVES),
            doc_sheets: parse_terms(DOC_SHEETS),
        }
    }

    /// Builtin lists with any same-named file in `dir` replacing its list.
    pub fn from_dir(dir: &Path) -> std::io::Result<LexiconSet> {
        let mut set = LexiconSet::builtin();
        for (file, slot) in [
            ("units.txt", &mut set.units),
            ("identity_headers.txt", &mut set.identity_headers),
            ("interrogatives.txt", &mut set.interrogatives),
            ("doc_sheets.txt", &mut set.doc_sheets),
        ] {
            let path = dir.join(file);
            if path.exists() {
                *slot = parse_terms(&std::fs::read_to_string(&path)?);
            }
        }
        Ok(set)
    }

    /// Whole-text unit match: "USD", "Months Per Year", "%".
    pub fn is_unit(&self, text: &str) -> bool {
        let t = text.trim().trim_end_matches('.').to_ascii_lowercase();
        !t.is_empty() && self.units.contains(&t)
    }

    /// Header text that names identities: contains '#', or its last word is
    /// an identity token. Matching only the last word keeps "Invoice Number"
    /// in while leaving "Number of Employees" and "Account Name" out.
    pub fn is_identity_header(&self, text: &str) -> bool {
        if text.contains('#') {
            return true;
        }
        let last = text
            .split(|c: char| !c.is_alphanumeric() && c != '.')
            .filter(|w| !w.is_empty())
            .next_back()
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        self.identity_headers.contains(&last)
            || self.identity_headers.contains(last.trim_end_matches('.'))
    }

    /// Subject word that implies a yes/no question ("Due", "Expired").
    pub fn is_interrogative(&self, text: &str) -> bool {
        contains_word(&self.interrogatives, text)
    }

    pub fn is_doc_sheet(&self, name: &str) -> bool {
        self.doc_sheets.contains(&name.trim().to_ascii_lowercase())
    }
}

/// Whole-word match; a word matches with or without its trailing dot, so
/// the token "no." matches "Account No." but plain "No" does not match it.
fn contains_word(terms: &BTreeSet<String>, text: &str) -> bool {
    text.split(|c: char| !c.is_alphanumeric() && c != '.')
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .any(|w| terms.contains(&w) || terms.contains(w.trim_end_matches('.')))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_terms_cover_the_common_cases() {
        let lex = LexiconSet::builtin();
        assert!(lex.is_unit("USD"));
        assert!(lex.is_unit("Months"));
        assert!(lex.is_unit("months per year"));
        assert!(lex.is_unit("APR"));
        assert!(lex.is_unit("%"));
        assert!(!lex.is_unit("Revenue"));

        assert!(lex.is_identity_header("Account #"));
        assert!(lex.is_identity_header("Invoice Number"));
        assert!(lex.is_identity_header("Employee ID"));
        assert!(lex.is_identity_header("Account No."));
        assert!(!lex.is_identity_header("Account Name"));
        assert!(!lex.is_identity_header("Number of Employees"));
        assert!(!lex.is_identity_header("Balance"));

        assert!(lex.is_interrogative("Due"));
        assert!(lex.is_interrogative("Payment Complete"));
        assert!(!lex.is_interrogative("Balance"));

        assert!(lex.is_doc_sheet("Documentation"));
        assert!(lex.is_doc_sheet("  ReadMe "));
        assert!(!lex.is_doc_sheet("Sheet1"));
    }

    #[test]
    fn overrides_from_directory() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("units.txt"), "widgets\n").unwrap();
        let lex = LexiconSet::from_dir(dir.path()).unwrap();
        assert!(lex.is_unit("Widgets"));
        assert!(!lex.is_unit("USD"));
        // Untouched lists keep their builtin contents.
        assert!(lex.is_identity_header("Account #"));
    }
}
