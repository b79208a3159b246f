//! Property suites for the score algebra, window co-visibility, and the
//! navigation charge for named references.

mod common;

use clearsheet::labeling::{co_visible, VicinityConfig};
use clearsheet::workbook::{CellAddress, WorkbookBuilder};
use clearsheet::{score_add, Score};
use common::{cell_surface, cell_total, named_target_model, LABEL_STYLES};
use proptest::prelude::*;

/// Every finite score in [-50, 0] plus Opaque.
fn score_domain() -> Vec<Score> {
    let mut out: Vec<Score> = (0..=50).map(Score::steps).collect();
    out.push(Score::Opaque);
    out
}

#[test]
fn score_add_absorbs_opaque_exhaustively() {
    let domain = score_domain();
    for &a in &domain {
        for &b in &domain {
            let sum = score_add(a, b);
            match (a.finite(), b.finite()) {
                (Some(x), Some(y)) => assert_eq!(sum.finite(), Some(x + y), "{a} + {b}"),
                _ => assert_eq!(sum, Score::Opaque, "{a} + {b} must absorb"),
            }
            assert_eq!(sum, score_add(b, a), "{a} + {b} must commute");
            assert_eq!(a + b, sum, "operator form of {a} + {b}");
        }
        assert_eq!(score_add(a, Score::ZERO), a, "{a} + 0 must be {a}");
        let folded: Score = [a, Score::ZERO, a].into_iter().sum();
        assert_eq!(folded, score_add(a, a), "Sum over [{a}, 0, {a}]");
    }
}

fn empty_sheet() -> clearsheet::workbook::WorkbookModel {
    let mut b = WorkbookBuilder::new();
    b.sheet("S");
    b.build()
}

fn vicinity(rows: u32, cols: u32) -> VicinityConfig {
    VicinityConfig { rows_visible: rows, cols_visible: cols, honor_frozen_panes: true }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1100))]

    #[test]
    fn co_visible_survives_taking_subsets(
        cells in prop::collection::vec((1..=200u32, 1..=30u32), 1..6),
        rows in 5..=100u32,
        cols in 3..=30u32,
    ) {
        let wb = empty_sheet();
        let cfg = vicinity(rows, cols);
        let addrs: Vec<CellAddress> =
            cells.iter().map(|&(r, c)| CellAddress::new("S", r, c)).collect();
        if co_visible(&wb, &addrs, &cfg) {
            for drop in 0..addrs.len() {
                let mut subset = addrs.clone();
                subset.remove(drop);
                prop_assert!(
                    co_visible(&wb, &subset, &cfg),
                    "subset without {} lost co-visibility",
                    addrs[drop],
                );
            }
        }
    }

    #[test]
    fn co_visible_is_monotone_in_the_window(
        cells in prop::collection::vec((1..=200u32, 1..=30u32), 1..6),
        rows in 5..=100u32,
        cols in 3..=30u32,
        grow_rows in 0..=60u32,
        grow_cols in 0..=60u32,
    ) {
        let wb = empty_sheet();
        let addrs: Vec<CellAddress> =
            cells.iter().map(|&(r, c)| CellAddress::new("S", r, c)).collect();
        if co_visible(&wb, &addrs, &vicinity(rows, cols)) {
            prop_assert!(
                co_visible(&wb, &addrs, &vicinity(rows + grow_rows, cols + grow_cols)),
                "a larger window hid cells a smaller one showed",
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Evicting a named target from the vicinity changes the referencing
    /// cell by exactly -1 (the new navigation) minus whatever label steps
    /// the move itself added or removed at the target.
    #[test]
    fn evicting_a_named_target_costs_exactly_one_navigation(
        near_row in 2..=25u32,
        far_row in 60..=400u32,
        target_col in 2..=18u32,
        style_pick in 0..3usize,
        hide_far in any::<bool>(),
    ) {
        let style = LABEL_STYLES[style_pick];
        let b1 = CellAddress::new("S", 1, 2);

        let near = named_target_model(near_row, target_col, style, false);
        let far = named_target_model(far_row, target_col, style, hide_far);

        let near_total = cell_total(&near, &b1);
        let far_total = cell_total(&far, &b1);
        let label_delta = cell_surface(&far, &CellAddress::new("S", far_row, target_col))
            - cell_surface(&near, &CellAddress::new("S", near_row, target_col));

        prop_assert_eq!(
            far_total,
            near_total - 1 + label_delta,
            "near {} far {} label delta {}",
            near_total,
            far_total,
            label_delta,
        );
    }
}
