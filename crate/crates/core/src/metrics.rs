//! Rank-based binary classification metrics with tie-aware definitions.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

fn check(labels: &[bool], scores: &[f64]) -> Result<()> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: scores.len(),
        });
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore { index });
    }
    Ok(())
}

/// Groups of equal scores in descending score order, as `(positives, negatives)` per group.
fn descending_groups(labels: &[bool], scores: &[f64]) -> Vec<(u64, u64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    let mut groups: Vec<(u64, u64)> = Vec::new();
    let mut prev: Option<f64> = None;
    for i in order {
        if prev != Some(scores[i]) {
            groups.push((0, 0));
            prev = Some(scores[i]);
        }
        let g = groups.last_mut().unwrap();
        if labels[i] {
            g.0 += 1;
        } else {
            g.1 += 1;
        }
    }
    groups
}

/// Area under the ROC curve: the probability that a random positive outranks
/// a random negative, counting ties as one half.
///
/// Computed exactly in integers as `(2·wins + ties) / (2·P·N)`, so the only
/// rounding is the final division.
pub fn auc_roc(labels: &[bool], scores: &[f64]) -> Result<f64> {
    check(labels, scores)?;
    let groups = descending_groups(labels, scores);
    let positives: u64 = groups.iter().map(|g| g.0).sum();
    let negatives: u64 = groups.iter().map(|g| g.1).sum();
    if positives == 0 || negatives == 0 {
        return Err(Error::MetricUndefined("AUC-ROC needs both classes"));
    }
    // walk from the lowest scores upward, counting negatives strictly below
    let mut below: u128 = 0;
    let mut twice_wins: u128 = 0;
    for &(p, n) in groups.iter().rev() {
        twice_wins += 2 * p as u128 * below + p as u128 * n as u128;
        below += n as u128;
    }
    Ok(twice_wins as f64 / (2 * positives as u128 * negatives as u128) as f64)
}

/// Average precision `Σ (R_k − R_{k−1}) · P_k` with one threshold per
/// distinct score.
pub fn average_precision(labels: &[bool], scores: &[f64]) -> Result<f64> {
    check(labels, scores)?;
    let groups = descending_groups(labels, scores);
    let positives: u64 = groups.iter().map(|g| g.0).sum();
    if positives == 0 {
        return Err(Error::MetricUndefined("average precision needs a positive"));
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut acc = CompensatedSum::default();
    for (p, n) in groups {
        tp += p;
        fp += n;
        if p > 0 {
            acc.add(p as f64 / positives as f64 * (tp as f64 / (tp + fp) as f64));
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        assert_eq!(auc_roc(&[true, false], &[0.9, 0.1]).unwrap(), 1.0);
        assert_eq!(auc_roc(&[true, false], &[0.1, 0.9]).unwrap(), 0.0);
        assert_eq!(
            auc_roc(&[true, false, true, false], &[0.5; 4]).unwrap(),
            0.5
        );
        assert_eq!(
            average_precision(&[true, true, false], &[0.9, 0.8, 0.1]).unwrap(),
            1.0
        );
        assert_eq!(average_precision(&[true, false], &[0.1, 0.9]).unwrap(), 0.5);
    }

    #[test]
    fn ties_form_one_threshold() {
        // one threshold containing 1 positive and 1 negative: precision 1/2
        assert_eq!(average_precision(&[true, false], &[1.0, 1.0]).unwrap(), 0.5);
        // binary scores: positives {1,0}, negatives {0,0}
        let labels = [true, true, false, false];
        let scores = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(auc_roc(&labels, &scores).unwrap(), 0.75);
        let ap = average_precision(&labels, &scores).unwrap();
        assert!((ap - (0.5 * 1.0 + 0.5 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(
            auc_roc(&[true, true], &[0.1, 0.2]),
            Err(Error::MetricUndefined("AUC-ROC needs both classes"))
        );
        assert!(average_precision(&[false], &[0.1]).is_err());
        assert_eq!(
            auc_roc(&[true, false], &[f64::NAN, 0.2]),
            Err(Error::NonFiniteScore { index: 0 })
        );
        assert!(auc_roc(&[true], &[0.1, 0.2]).is_err());
    }
}
