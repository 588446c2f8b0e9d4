//! ROC AUC via the rank statistic.

use crate::error::{Error, Result};

/// Probability that a random positive outscores a random negative, ties
/// counted half. Computed exactly from average ranks.
pub fn roc_auc(scores_pos: &[f64], scores_neg: &[f64]) -> Result<f64> {
    if scores_pos.is_empty() || scores_neg.is_empty() {
        return Err(Error::InvalidInput(
            "roc_auc needs at least one score on each side".into(),
        ));
    }
    if scores_pos
        .iter()
        .chain(scores_neg)
        .any(|s| !s.is_finite())
    {
        return Err(Error::InvalidInput("non-finite score".into()));
    }
    let mut all: Vec<(f64, bool)> = scores_pos
        .iter()
        .map(|&s| (s, true))
        .chain(scores_neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < all.len() {
        let mut end = start;
        while end < all.len() && all[end].0 == all[start].0 {
            end += 1;
        }
        // average 1-based rank of the tie group [start, end)
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        for item in &all[start..end] {
            if item.1 {
                rank_sum_pos += avg_rank;
            }
        }
        start = end;
    }
    let p = scores_pos.len() as f64;
    let n = scores_neg.len() as f64;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All-pairs comparison oracle.
    fn brute_force(pos: &[f64], neg: &[f64]) -> f64 {
        let mut wins = 0.0;
        for &p in pos {
            for &n in neg {
                if p > n {
                    wins += 1.0;
                } else if p == n {
                    wins += 0.5;
                }
            }
        }
        wins / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn perfect_separation() {
        assert_eq!(roc_auc(&[2.0, 3.0], &[0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn all_ties_is_half() {
        assert_eq!(roc_auc(&[1.0], &[1.0]).unwrap(), 0.5);
    }

    #[test]
    fn mixed_example() {
        // pairs: (3>2), (3>0), (1<2), (1>0) → 3 wins of 4
        assert_eq!(roc_auc(&[3.0, 1.0], &[2.0, 0.0]).unwrap(), 0.75);
    }

    #[test]
    fn empty_side_rejected() {
        assert!(roc_auc(&[], &[1.0]).is_err());
        assert!(roc_auc(&[1.0], &[]).is_err());
        assert!(roc_auc(&[f64::NAN], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            pos in prop::collection::vec(-50i32..50, 1..40),
            neg in prop::collection::vec(-50i32..50, 1..40),
        ) {
            // integer-valued scores exercise heavy tie handling
            let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
            let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
            let fast = roc_auc(&pos, &neg).unwrap();
            let slow = brute_force(&pos, &neg);
            prop_assert!((fast - slow).abs() <= 1e-12);
        }
    }
}
