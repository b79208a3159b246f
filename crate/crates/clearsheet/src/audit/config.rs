//! Audit configuration: defaults, config-file parsing, and option merging.
//!
//! The config file is line oriented: one `key = value` pair per line, `#`
//! comments, blank lines ignored. Command-line flags override file values.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::scorer::{ChainMode, ScoreConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, Default)]
pub struct AuditConfig {
    pub score: ScoreConfig,
    /// Function catalog file; the built-in catalog when absent.
    pub catalog_path: Option<PathBuf>,
    /// Directory of lexicon files; the built-in lexicons when absent.
    pub lexicon_dir: Option<PathBuf>,
    /// Minimum acceptable finite model score; always <= 0 when present.
    pub fail_threshold: Option<i64>,
    pub format: OutputFormat,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

impl AuditConfig {
    pub fn load(path: &Path) -> Result<AuditConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = AuditConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let Some((key, value)) = t.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    detail: format!("expected key = value, got {t:?}"),
                });
            };
            self.set(key.trim(), value.trim())
                .map_err(|detail| ConfigError::Parse { line, detail })?;
        }
        Ok(())
    }

    /// Applies one key. Shared by the file parser and the CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "vicinity" => {
                let (rows, cols) = parse_dims(value)?;
                self.score.vicinity.rows_visible = rows;
                self.score.vicinity.cols_visible = cols;
            }
            "honor-frozen-panes" => {
                self.score.vicinity.honor_frozen_panes = parse_bool(value)?;
            }
            "strict-labels" => self.score.strict_formats = parse_bool(value)?,
            "chain-mode" => {
                self.score.chain_mode = match value {
                    "set" => ChainMode::Set,
                    "per-path" => ChainMode::PerPath,
                    other => return Err(format!("chain-mode must be set or per-path, got {other:?}")),
                };
            }
            "fail-threshold" => {
                let n: i64 = value
                    .parse()
                    .map_err(|_| format!("fail-threshold must be an integer, got {value:?}"))?;
                if n > 0 {
                    return Err("fail-threshold must be <= 0".into());
                }
                self.fail_threshold = Some(n);
            }
            "catalog" => self.catalog_path = Some(PathBuf::from(value)),
            "lexicons" => self.lexicon_dir = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "text" => OutputFormat::Text,
                    "structured" => OutputFormat::Structured,
                    other => return Err(format!("format must be text or structured, got {other:?}")),
                };
            }
            k if k.starts_with("cost.") => {
                let n: u32 = value
                    .parse()
                    .map_err(|_| format!("{k} must be a non-negative integer, got {value:?}"))?;
                let costs = &mut self.score.costs;
                match &k[5..] {
                    "formula-inspection" => costs.formula_inspection = n,
                    "navigation" => costs.navigation = n,
                    "function-help" => costs.function_help = n,
                    "annotation-access" => costs.annotation_access = n,
                    "reveal-hidden" => costs.reveal_hidden = n,
                    "connection-definition" => costs.connection_definition = n,
                    other => return Err(format!("unknown step cost {other:?}")),
                }
            }
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

/// "40x20" -> (40, 20).
pub fn parse_dims(s: &str) -> Result<(u32, u32), String> {
    let err = || format!("expected ROWSxCOLS like 40x20, got {s:?}");
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(err)?;
    let rows: u32 = r.trim().parse().map_err(|_| err())?;
    let cols: u32 = c.trim().parse().map_err(|_| err())?;
    if rows == 0 || cols == 0 {
        return Err("vicinity dimensions must be positive".into());
    }
    Ok((rows, cols))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}
