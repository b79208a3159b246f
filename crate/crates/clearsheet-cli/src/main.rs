use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clearsheet::audit::{
    emit_structured, emit_text, exit_code, run_audit, AuditConfig, AuditOutcome, OutputFormat,
};
use clearsheet::formula::parse_formula;

#[derive(Parser)]
#[command(name = "clearsheet", version)]
#[command(about = "Counts the UI steps separating spreadsheet readers from sources and labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one or more workbooks and report findings
    Audit(AuditArgs),
    /// Parse a formula and print its syntax tree
    Ast {
        /// Formula text; the leading "=" may be omitted
        formula: String,
    },
}

#[derive(Args)]
struct AuditArgs {
    /// Workbook files, reported in the given order
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Line-oriented key=value configuration file, applied before flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Function catalog file replacing the builtin one
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Directory of lexicon lists overriding same-named builtin lists
    #[arg(long)]
    lexicons: Option<PathBuf>,
    /// Accept only number formats with an explicit unit token as unit labels
    #[arg(long)]
    strict_labels: bool,
    /// Visible grid size as ROWSxCOLS, for example 40x20
    #[arg(long)]
    vicinity: Option<String>,
    /// How chain scores treat a precedent reached along several paths
    #[arg(long, value_parser = ["set", "per-path"])]
    chain_mode: Option<String>,
    /// Exit 2 when a finite model total falls below this (must be <= 0)
    #[arg(long, value_parser = parse_threshold, allow_hyphen_values = true)]
    fail_threshold: Option<i64>,
    /// Report format
    #[arg(long, value_parser = ["text", "structured"])]
    format: Option<String>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> Result<i64, String> {
    let n: i64 = s.parse().map_err(|e| format!("not an integer: {e}"))?;
    if n > 0 {
        return Err("fail threshold must be <= 0 (scores are step costs)".to_string());
    }
    Ok(n)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Audit(args) => audit_command(args),
        Command::Ast { formula } => ast_command(&formula),
    }
}

fn ast_command(formula: &str) -> ExitCode {
    let text = if formula.starts_with('=') {
        formula.to_string()
    } else {
        format!("={formula}")
    };
    match parse_formula(&text) {
        Ok(ast) => {
            println!("{}", ast.dump());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("clearsheet: cannot parse formula: {e}");
            ExitCode::from(3)
        }
    }
}

fn audit_command(args: AuditArgs) -> ExitCode {
    let cfg = match build_config(&args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("clearsheet: {msg}");
            return ExitCode::from(3);
        }
    };

    let outcomes = match run_audit(&args.files, &cfg) {
        Ok(outcomes) => outcomes,
        Err(e) => {
            eprintln!("clearsheet: {e}");
            return ExitCode::from(3);
        }
    };

    let output = match cfg.format {
        OutputFormat::Text => render_text(&outcomes),
        OutputFormat::Structured => render_structured(&outcomes),
    };

    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, &output) {
            eprintln!("clearsheet: cannot write {}: {e}", path.display());
            return ExitCode::from(3);
        }
    } else {
        print!("{output}");
    }

    for outcome in &outcomes {
        if let Err(e) = &outcome.report {
            eprintln!("clearsheet: {}: {e}", outcome.path.display());
        }
    }

    ExitCode::from(exit_code(&outcomes, cfg.fail_threshold) as u8)
}

fn build_config(args: &AuditArgs) -> Result<AuditConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => AuditConfig::load(path).map_err(|e| e.to_string())?,
        None => AuditConfig::default(),
    };
    if let Some(path) = &args.catalog {
        cfg.catalog_path = Some(path.clone());
    }
    if let Some(path) = &args.lexicons {
        cfg.lexicon_dir = Some(path.clone());
    }
    if args.strict_labels {
        cfg.score.strict_formats = true;
    }
    if let Some(dims) = &args.vicinity {
        cfg.set("vicinity", dims)?;
    }
    if let Some(mode) = &args.chain_mode {
        cfg.set("chain-mode", mode)?;
    }
    if let Some(threshold) = args.fail_threshold {
        cfg.fail_threshold = Some(threshold);
    }
    if let Some(format) = &args.format {
        cfg.set("format", format)?;
    }
    Ok(cfg)
}

fn render_text(outcomes: &[AuditOutcome]) -> String {
    let mut parts = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        match &outcome.report {
            Ok(report) => parts.push(emit_text(report)),
            Err(e) => parts.push(format!("ERROR {}: {e}\n", outcome.path.display())),
        }
    }
    parts.join("\n")
}

fn render_structured(outcomes: &[AuditOutcome]) -> String {
    let entry = |outcome: &AuditOutcome| match &outcome.report {
        Ok(report) => serde_json::to_value(report).expect("report serializes"),
        Err(e) => serde_json::json!({
            "input": outcome.path.display().to_string(),
            "error": e,
        }),
    };
    if outcomes.len() == 1 {
        match &outcomes[0].report {
            Ok(report) => emit_structured(report),
            Err(_) => {
                let mut s = serde_json::to_string_pretty(&entry(&outcomes[0])).unwrap();
                s.push('\n');
                s
            }
        }
    } else {
        let values: Vec<serde_json::Value> = outcomes.iter().map(entry).collect();
        let mut s = serde_json::to_string_pretty(&values).unwrap();
        s.push('\n');
        s
    }
}
