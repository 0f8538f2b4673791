use linkcast_core::metrics::{auc_roc, average_precision};
use proptest::prelude::*;

/// Pairwise comparison over every positive/negative pair.
fn pairwise_auc(labels: &[bool], scores: &[f64]) -> f64 {
    let mut twice = 0u64;
    let mut pairs = 0u64;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                twice += 2;
            } else if scores[i] == scores[j] {
                twice += 1;
            }
        }
    }
    twice as f64 / (2 * pairs) as f64
}

/// Sweeps every distinct threshold from high to low and accumulates
/// `(recall_k - recall_{k-1}) * precision_k`.
fn threshold_sweep_ap(labels: &[bool], scores: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let total_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    for th in thresholds {
        let predicted: Vec<bool> = scores.iter().map(|&s| s >= th).collect();
        let tp = predicted
            .iter()
            .zip(labels)
            .filter(|(&p, &l)| p && l)
            .count() as f64;
        let fp = predicted
            .iter()
            .zip(labels)
            .filter(|(&p, &l)| p && !l)
            .count() as f64;
        let recall = tp / total_pos;
        ap += (recall - prev_recall) * (tp / (tp + fp));
        prev_recall = recall;
    }
    ap
}

fn case(max: usize, binary: bool) -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
    (2..=max).prop_flat_map(move |n| {
        let scores = if binary {
            prop::collection::vec((0u8..2).prop_map(f64::from), n).boxed()
        } else {
            prop::collection::vec((0u16..50).prop_map(|v| v as f64 / 7.0), n).boxed()
        };
        (prop::collection::vec(any::<bool>(), n), scores)
    })
}

proptest! {
    #[test]
    fn auc_matches_pairwise((labels, scores) in case(200, false)) {
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        prop_assert!((auc_roc(&labels, &scores).unwrap() - pairwise_auc(&labels, &scores)).abs() < 1e-12);
    }

    #[test]
    fn ap_matches_threshold_sweep((labels, scores) in case(200, true)) {
        prop_assume!(labels.iter().any(|&l| l));
        prop_assert!((average_precision(&labels, &scores).unwrap() - threshold_sweep_ap(&labels, &scores)).abs() < 1e-12);
    }

    #[test]
    fn auc_ignores_monotone_transforms((labels, scores) in case(60, false)) {
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 11.0).collect();
        prop_assert_eq!(auc_roc(&labels, &scores).unwrap(), auc_roc(&labels, &warped).unwrap());
    }

    #[test]
    fn metrics_ignore_instance_order((labels, scores) in case(60, true), seed in any::<u64>()) {
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        let mut rng = linkcast_core::rng::seeded(seed);
        linkcast_core::rng::shuffle(&mut idx, &mut rng);
        let l2: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
        let s2: Vec<f64> = idx.iter().map(|&i| scores[i]).collect();
        prop_assert_eq!(auc_roc(&labels, &scores).unwrap(), auc_roc(&l2, &s2).unwrap());
        prop_assert_eq!(average_precision(&labels, &scores).unwrap(), average_precision(&l2, &s2).unwrap());
    }
}

/// Every labelling and every 3-level score vector up to length 6.
#[test]
fn exhaustive_small_inputs() {
    for n in 2..=6usize {
        for mask in 0u32..(1 << n) {
            let labels: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            for code in 0..3usize.pow(n as u32) {
                let scores: Vec<f64> = (0..n)
                    .map(|i| ((code / 3usize.pow(i as u32)) % 3) as f64)
                    .collect();
                let has_pos = labels.iter().any(|&l| l);
                let has_neg = labels.iter().any(|&l| !l);
                if has_pos && has_neg {
                    let a = auc_roc(&labels, &scores).unwrap();
                    assert!((a - pairwise_auc(&labels, &scores)).abs() < 1e-12);
                }
                if has_pos {
                    let ap = average_precision(&labels, &scores).unwrap();
                    assert!((ap - threshold_sweep_ap(&labels, &scores)).abs() < 1e-12);
                }
            }
        }
    }
}
