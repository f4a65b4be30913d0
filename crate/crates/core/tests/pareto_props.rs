//! Property tests for the Pareto machinery against quadratic oracles.

use proptest::prelude::*;
use transit_core::journey::{pareto_labels, Label};

/// O(n^2) reference: a label survives iff nothing weakly dominates it
/// (other than duplicates, of which one representative survives).
fn quadratic_filter(labels: &[Label]) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::new();
    for &(a, n) in labels {
        let dominated = labels
            .iter()
            .any(|&(a2, n2)| (a2 <= a && n2 < n) || (a2 < a && n2 <= n));
        if !dominated && !out.contains(&(a, n)) {
            out.push((a, n));
        }
    }
    out.sort_by_key(|&(a, n)| (n, a));
    out
}

proptest! {
    #[test]
    fn pareto_labels_match_quadratic_oracle(
        raw in prop::collection::vec((0i64..200, 0usize..5), 0..40)
    ) {
        let got = pareto_labels(raw.clone());
        let want = quadratic_filter(&raw);
        prop_assert_eq!(got.clone(), want);
        // antichain: no element weakly dominates another
        for (i, &(a, n)) in got.iter().enumerate() {
            for (j, &(a2, n2)) in got.iter().enumerate() {
                if i != j {
                    prop_assert!(!(a2 <= a && n2 <= n));
                }
            }
        }
        // coverage: every input label weakly dominated by some output
        for &(a, n) in &raw {
            prop_assert!(got.iter().any(|&(a2, n2)| a2 <= a && n2 <= n));
        }
    }

    #[test]
    fn pareto_labels_idempotent(
        raw in prop::collection::vec((0i64..100, 0usize..4), 0..30)
    ) {
        let once = pareto_labels(raw);
        let twice = pareto_labels(once.clone());
        prop_assert_eq!(once, twice);
    }
}
