//! Release gate: one test per shipping requirement, so `cargo test --test
//! acceptance` prints a single pass/fail line for each. Details behind the
//! compact assertions here live in the focused suites (`oracle_ledgers`,
//! `formula_corpus`, `properties`, and the unit tests).

mod common;

use std::collections::BTreeSet;

use clearsheet::audit::{emit_structured, run_audit, AuditConfig};
use clearsheet::catalog::{FunctionCatalog, ParamGrade};
use clearsheet::formula::parse_formula;
use clearsheet::labeling::{co_visible, VicinityConfig};
use clearsheet::scorer::{ItemKind, ModelScore, PerCellScore, ScoreConfig, Scorer};
use clearsheet::workbook::{load_workbook, CellAddress, LoadOptions, WorkbookBuilder};
use clearsheet::{score_add, Score};
use common::{cell_surface, cell_total, named_target_model, LABEL_STYLES};

fn model_of(stem: &str) -> ModelScore {
    let path = common::fixtures_dir().join(format!("{stem}.xlsx"));
    let wb = load_workbook(&path, LoadOptions::default()).expect("fixture loads");
    Scorer::new(&wb, ScoreConfig::default()).model()
}

fn cell<'m>(model: &'m ModelScore, addr: &str) -> &'m PerCellScore {
    model
        .cells
        .iter()
        .find(|c| c.cell.to_string() == addr)
        .unwrap_or_else(|| panic!("{addr} is not a scored cell"))
}

fn charged_items(cell: &PerCellScore) -> Vec<(ItemKind, i64)> {
    cell.items
        .iter()
        .filter(|i| i.cost != Score::ZERO)
        .map(|i| (i.kind, i.cost.finite().unwrap_or(i64::MIN)))
        .collect()
}

#[test]
fn check_01_lookup_grid_scores_minus_two_itemized() {
    let model = model_of("lookup_help");
    let b1 = cell(&model, "S!B1");
    assert_eq!(b1.total, Score::steps(2), "B1 must sit two steps from transparency");
    let mut items = charged_items(b1);
    items.sort();
    assert_eq!(
        items,
        vec![(ItemKind::FormulaInspection, -1), (ItemKind::FunctionHelp, -1)],
        "breakdown must be one inspection plus one help lookup"
    );
    let help = b1.items.iter().find(|i| i.kind == ItemKind::FunctionHelp).unwrap();
    assert!(
        help.description.contains("range_lookup"),
        "help charge must name the range_lookup parameter, got {:?}",
        help.description
    );
}

#[test]
fn check_02_named_inputs_free_near_four_navigations_far() {
    let near = model_of("pmt_near");
    assert_eq!(near.total, Score::ZERO, "in-vicinity names must cost nothing");
    assert_eq!(cell(&near, "S!B1").total, Score::ZERO);

    let far = model_of("pmt_far");
    let b1 = cell(&far, "S!B1");
    assert_eq!(b1.total, Score::steps(4));
    let navs: Vec<_> =
        b1.items.iter().filter(|i| i.kind == ItemKind::NameNavigation).collect();
    assert_eq!(navs.len(), 4, "the -4 must decompose into four name navigations");
    assert!(navs.iter().all(|i| i.cost == Score::steps(1)), "each navigation costs one step");
}

#[test]
fn check_03_structured_references_reach_zero() {
    let model = model_of("structured_income");
    assert_eq!(model.total, Score::ZERO);
    assert_eq!(cell(&model, "S!C3").total, Score::ZERO, "net income row 3");
    assert_eq!(cell(&model, "S!C4").total, Score::ZERO, "net income row 4");
}

#[test]
fn check_04_opacity_verdicts() {
    let bare = model_of("bare_literal");
    assert_eq!(cell(&bare, "S!B1").total, Score::Opaque, "unlabeled literal formula");

    let errors = model_of("error_unguarded");
    assert_eq!(cell(&errors, "S!B3").total, Score::Opaque, "unhandled division error");

    let free = model_of("indirect_free");
    assert_eq!(cell(&free, "S!B2").total, Score::Opaque, "unconstrained INDIRECT");

    let scenario = model_of("scenario_selector");
    assert!(
        cell(&scenario, "Model!B21").total.finite().is_some(),
        "constrained VLOOKUP/INDIRECT/OFFSET lookup must stay finite"
    );
    assert!(scenario.total.finite().is_some(), "scenario workbook must stay finite");
}

#[test]
fn check_05_catalog_parameter_grades() {
    let catalog = FunctionCatalog::default();
    assert_eq!(catalog.parameter_grade("VLOOKUP", 2), ParamGrade::TooltipSufficient);
    assert_eq!(catalog.parameter_grade("VLOOKUP", 3), ParamGrade::HelpSufficient);
    assert_eq!(catalog.parameter_grade("PMT", 0), ParamGrade::HelpSufficient);
    assert_eq!(catalog.parameter_grade("PMT", 1), ParamGrade::Insufficient);
}

fn xorshift(state: &mut u64) -> u64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    x
}

fn pick(state: &mut u64, lo: u32, hi: u32) -> u32 {
    lo + (xorshift(state) % u64::from(hi - lo + 1)) as u32
}

#[test]
fn check_06_property_suite() {
    let mut domain: Vec<Score> = (0..=50).map(Score::steps).collect();
    domain.push(Score::Opaque);
    for &a in &domain {
        for &b in &domain {
            match (a.finite(), b.finite()) {
                (Some(x), Some(y)) => assert_eq!(score_add(a, b).finite(), Some(x + y)),
                _ => assert_eq!(score_add(a, b), Score::Opaque, "{a} + {b} must absorb"),
            }
        }
    }

    let wb = {
        let mut b = WorkbookBuilder::new();
        b.sheet("S");
        b.build()
    };
    let mut state = 0x5eed_cafe_f00d_beefu64;
    for _ in 0..1000 {
        let count = pick(&mut state, 1, 5) as usize;
        let addrs: Vec<CellAddress> = (0..count)
            .map(|_| CellAddress::new("S", pick(&mut state, 1, 200), pick(&mut state, 1, 30)))
            .collect();
        let cfg = VicinityConfig {
            rows_visible: pick(&mut state, 5, 100),
            cols_visible: pick(&mut state, 3, 30),
            honor_frozen_panes: true,
        };
        if co_visible(&wb, &addrs, &cfg) {
            for drop in 0..addrs.len() {
                let mut subset = addrs.clone();
                subset.remove(drop);
                assert!(co_visible(&wb, &subset, &cfg), "subset heredity failed");
            }
            let wider = VicinityConfig {
                rows_visible: cfg.rows_visible + pick(&mut state, 0, 60),
                cols_visible: cfg.cols_visible + pick(&mut state, 0, 60),
                honor_frozen_panes: true,
            };
            assert!(co_visible(&wb, &addrs, &wider), "window monotonicity failed");
        }
    }

    let b1 = CellAddress::new("S", 1, 2);
    for _ in 0..100 {
        let near_row = pick(&mut state, 2, 25);
        let far_row = pick(&mut state, 60, 400);
        let col = pick(&mut state, 2, 18);
        let style = LABEL_STYLES[pick(&mut state, 0, 2) as usize];
        let hide_far = pick(&mut state, 0, 1) == 1;

        let near = named_target_model(near_row, col, style, false);
        let far = named_target_model(far_row, col, style, hide_far);
        let label_delta = cell_surface(&far, &CellAddress::new("S", far_row, col))
            - cell_surface(&near, &CellAddress::new("S", near_row, col));
        assert_eq!(
            cell_total(&far, &b1),
            cell_total(&near, &b1) - 1 + label_delta,
            "evicting a named target must cost exactly one navigation plus label delta"
        );
    }
}

#[test]
fn check_07_fixture_ledgers_replay_exactly() {
    let (checked, errs) = common::verify_ledger_corpus();
    assert!(checked >= 30, "expected the full fixture corpus, found {checked}");
    assert!(errs.is_empty(), "ledger mismatches:\n  {}", errs.join("\n  "));
}

#[test]
fn check_08_formula_corpus_parses_and_round_trips() {
    let formulas: Vec<&str> = include_str!("data/formula_corpus.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    assert!(formulas.len() >= 200, "corpus has only {} formulas", formulas.len());

    let known: BTreeSet<&str> = formulas.iter().copied().collect();
    for required in [
        "=VLOOKUP(A1, A3:B5, 2, FALSE)",
        "=PMT(Rate/MPP, Periods, Loan_Amount)",
        "=[@EBIT]+[@Tax]",
        "=A11 * 12",
        "=VLOOKUP([@Label],INDIRECT(OFFSET([#Headers],1,1,1,1)),2,FALSE)",
        "=SUM(INDIRECT(B1))",
        "=IFERROR(B3, 0)",
    ] {
        assert!(known.contains(required), "corpus must include {required}");
    }

    for formula in formulas {
        let ast = parse_formula(formula).unwrap_or_else(|e| panic!("{formula}: {e}"));
        let canonical = ast.canonical_text();
        let second = parse_formula(&canonical)
            .unwrap_or_else(|e| panic!("{formula}: canonical {canonical}: {e}"));
        assert_eq!(
            second.strip_spans().root,
            ast.strip_spans().root,
            "{formula} changed across the round trip"
        );
        assert_eq!(second.canonical_text(), canonical, "{formula} has no canonical fixed point");
    }
}

#[test]
fn check_09_batch_reports_are_deterministic() {
    let dir = common::fixtures_dir();
    let paths: Vec<_> = ["inputs_grid", "bare_literal", "scenario_selector", "tables_import"]
        .iter()
        .map(|stem| dir.join(format!("{stem}.xlsx")))
        .collect();
    let cfg = AuditConfig::default();

    let render = || {
        let outcomes = run_audit(&paths, &cfg).expect("setup succeeds");
        outcomes
            .into_iter()
            .map(|o| emit_structured(&o.report.expect("fixture audits cleanly")))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let strip_timing = |report: &str| -> String {
        report.lines().filter(|l| !l.contains("\"timing_ms\"")).collect::<Vec<_>>().join("\n")
    };

    let first = render();
    let second = render();
    assert_eq!(
        strip_timing(&first),
        strip_timing(&second),
        "consecutive batch runs must emit byte-identical reports"
    );
}
