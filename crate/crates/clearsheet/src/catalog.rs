//! Function parameter catalog: how well each spreadsheet function's
//! argument labeling discloses operand meaning, plus flags for
//! error-handling and indirect-reference functions.
//!
//! The catalog is data, not code: a line-oriented file
//! (`NAME;min;max;param=grade,...;flags`) so gradings can be revised
//! without rebuilding. A default catalog is embedded; `--catalog`
//! substitutes another file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

const BUILTIN: &str = include_str!("../data/functions.catalog");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamGrade {
    /// The argument tooltip alone discloses the operand's meaning.
    TooltipSufficient,
    /// One more step (Help / arguments dialog) discloses it.
    HelpSufficient,
    /// Even Help leaves the meaning undisclosed.
    Insufficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub grade: ParamGrade,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub min_arity: usize,
    pub max_arity: usize,
    /// Ordered by argument index; variadic functions repeat the last
    /// parameter's grade up to `max_arity`.
    pub params: Vec<Param>,
    pub error_handling: bool,
    pub indirect_class: bool,
}

#[derive(Debug, Clone)]
pub struct FunctionCatalog {
    entries: BTreeMap<String, CatalogEntry>,
    /// Grade assumed for unknown functions and out-of-range arguments.
    unknown_grade: ParamGrade,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("catalog line {line}: duplicate function {name}")]
    Duplicate { line: usize, name: String },
}

impl Default for FunctionCatalog {
    fn default() -> Self {
        FunctionCatalog::builtin()
    }
}

impl FunctionCatalog {
    pub fn builtin() -> FunctionCatalog {
        parse_catalog(BUILTIN).expect("embedded catalog is well-formed")
    }

    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.get(&name.to_ascii_uppercase())
    }

    pub fn is_error_handling(&self, name: &str) -> bool {
        self.entry(name).is_some_and(|e| e.error_handling)
    }

    pub fn is_indirect_class(&self, name: &str) -> bool {
        self.entry(name).is_some_and(|e| e.indirect_class)
    }

    /// Grade of the function's argument slot. Unknown functions and
    /// arguments beyond the declared maximum get the strict default.
    pub fn parameter_grade(&self, name: &str, arg_index: usize) -> ParamGrade {
        let Some(entry) = self.entry(name) else { return self.unknown_grade };
        if arg_index >= entry.max_arity {
            return self.unknown_grade;
        }
        match entry.params.get(arg_index).or_else(|| entry.params.last()) {
            Some(p) => p.grade,
            None => self.unknown_grade,
        }
    }

    pub fn parameter_name(&self, name: &str, arg_index: usize) -> Option<&str> {
        let entry = self.entry(name)?;
        if arg_index >= entry.max_arity {
            return None;
        }
        entry
            .params
            .get(arg_index)
            .or_else(|| entry.params.last())
            .map(|p| p.name.as_str())
    }

    /// Relaxes the unknown-function default from insufficient.
    pub fn set_unknown_grade(&mut self, grade: ParamGrade) {
        self.unknown_grade = grade;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_catalog(path: &Path) -> Result<FunctionCatalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_catalog(&text)
}

pub fn parse_catalog(text: &str) -> Result<FunctionCatalog, CatalogError> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() < 4 || fields.len() > 5 {
            return Err(CatalogError::Parse {
                line: line_no,
                detail: format!("expected 4 or 5 ';'-separated fields, got {}", fields.len()),
            });
        }
        let name = fields[0].trim().to_ascii_uppercase();
        if name.is_empty() {
            return Err(CatalogError::Parse { line: line_no, detail: "empty function name".into() });
        }
        let min_arity: usize = fields[1].trim().parse().map_err(|_| CatalogError::Parse {
            line: line_no,
            detail: format!("bad min arity {:?}", fields[1]),
        })?;
        let max_arity: usize = fields[2].trim().parse().map_err(|_| CatalogError::Parse {
            line: line_no,
            detail: format!("bad max arity {:?}", fields[2]),
        })?;
        if max_arity < min_arity {
            return Err(CatalogError::Parse {
                line: line_no,
                detail: "max arity below min arity".into(),
            });
        }

        let mut params = Vec::new();
        let params_field = fields[3].trim();
        if !params_field.is_empty() {
            for spec in params_field.split(',') {
                let Some((pname, grade)) = spec.split_once('=') else {
                    return Err(CatalogError::Parse {
                        line: line_no,
                        detail: format!("parameter {spec:?} is not name=grade"),
                    });
                };
                let grade = match grade.trim() {
                    "tooltip-sufficient" => ParamGrade::TooltipSufficient,
                    "help-sufficient" => ParamGrade::HelpSufficient,
                    "insufficient" => ParamGrade::Insufficient,
                    other => {
                        return Err(CatalogError::Parse {
                            line: line_no,
                            detail: format!("unknown grade {other:?}"),
                        })
                    }
                };
                params.push(Param { name: pname.trim().to_string(), grade });
            }
        }
        if params.len() > max_arity {
            return Err(CatalogError::Parse {
                line: line_no,
                detail: "more parameters than max arity".into(),
            });
        }

        let mut error_handling = false;
        let mut indirect_class = false;
        if let Some(flags) = fields.get(4) {
            for flag in flags.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                match flag {
                    "error-handling" => error_handling = true,
                    "indirect" => indirect_class = true,
                    other => {
                        return Err(CatalogError::Parse {
                            line: line_no,
                            detail: format!("unknown flag {other:?}"),
                        })
                    }
                }
            }
        }

        let entry = CatalogEntry {
            name: name.clone(),
            min_arity,
            max_arity,
            params,
            error_handling,
            indirect_class,
        };
        if entries.insert(name.clone(), entry).is_some() {
            return Err(CatalogError::Duplicate { line: line_no, name });
        }
    }
    Ok(FunctionCatalog { entries, unknown_grade: ParamGrade::Insufficient })
}
