//! Entropy, mutual information and normalized mutual information over
//! categorical label sequences, in nats.
//!
//! Counting is done by sorting, so results are deterministic bit for bit and
//! do not depend on hash iteration order.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chunking::{assign_batches, assign_windows, AnchorRule, ChunkAssignment};
use crate::error::{Error, Result};
use crate::graph::{TemporalGraph, Timestamp};
use crate::numeric::CompensatedSum;

/// Sorted distinct values with their multiplicities.
fn counts<T: Ord + Clone>(labels: &[T]) -> Vec<(T, u64)> {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<(T, u64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

fn entropy_of_counts(counts: impl Iterator<Item = u64>, n: u64) -> f64 {
    let n = n as f64;
    let mut acc = CompensatedSum::default();
    for c in counts {
        let p = c as f64 / n;
        acc.add(-p * libm::log(p));
    }
    // -0.0 for a constant sequence
    acc.value().max(0.0)
}

/// Plug-in entropy `-Σ p ln p`.
pub fn entropy<T: Ord + Clone>(labels: &[T]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyLabels);
    }
    let c = counts(labels);
    Ok(entropy_of_counts(
        c.iter().map(|(_, c)| *c),
        labels.len() as u64,
    ))
}

fn check_lengths<X, Y>(x: &[X], y: &[Y]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyLabels);
    }
    Ok(())
}

/// Entropies and mutual information in one pass over the joint counts.
fn information<X: Ord + Clone, Y: Ord + Clone>(
    x: &[X],
    y: &[Y],
) -> Result<(f64, f64, f64, usize, usize)> {
    check_lengths(x, y)?;
    let n = x.len() as u64;
    let cx = counts(x);
    let cy = counts(y);
    let joint_labels: Vec<(u32, u32)> = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let i = cx
                .binary_search_by(|(v, _)| v.cmp(a))
                .unwrap_or_else(|_| unreachable!());
            let j = cy
                .binary_search_by(|(v, _)| v.cmp(b))
                .unwrap_or_else(|_| unreachable!());
            (i as u32, j as u32)
        })
        .collect();
    let joint = counts(&joint_labels);

    let h_x = entropy_of_counts(cx.iter().map(|(_, c)| *c), n);
    let h_y = entropy_of_counts(cy.iter().map(|(_, c)| *c), n);
    let nf = n as f64;
    let mut mi = CompensatedSum::default();
    for ((i, j), c_xy) in joint {
        let c_x = cx[i as usize].1 as f64;
        let c_y = cy[j as usize].1 as f64;
        let c_xy = c_xy as f64;
        mi.add(c_xy / nf * libm::log(c_xy * nf / (c_x * c_y)));
    }
    Ok((h_x, h_y, mi.value().max(0.0), cx.len(), cy.len()))
}

/// Mutual information `Σ p(x,y) ln[p(x,y) / (p(x) p(y))]`.
pub fn mutual_information<X: Ord + Clone, Y: Ord + Clone>(x: &[X], y: &[Y]) -> Result<f64> {
    information(x, y).map(|(_, _, mi, ..)| mi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmiReport {
    /// `mi / ((h_x + h_y) / 2)`; 1 when both sequences are constant, 0 when
    /// exactly one is.
    pub value: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub mi: f64,
    pub samples: usize,
    pub x_categories: usize,
    pub y_categories: usize,
}

/// Mutual information normalized by the arithmetic mean of both entropies.
pub fn nmi<X: Ord + Clone, Y: Ord + Clone>(x: &[X], y: &[Y]) -> Result<NmiReport> {
    let (h_x, h_y, mi, x_categories, y_categories) = information(x, y)?;
    let value = match (h_x == 0.0, h_y == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        (false, false) => mi / (0.5 * (h_x + h_y)),
    };
    Ok(NmiReport {
        value,
        h_x,
        h_y,
        mi,
        samples: x.len(),
        x_categories,
        y_categories,
    })
}

fn timestamps(g: &TemporalGraph) -> Vec<Timestamp> {
    g.edges().iter().map(|e| e.t).collect()
}

/// NMI between edge timestamps and batch ordinals over the whole graph.
pub fn batch_timestamp_nmi(g: &TemporalGraph, batch_size: usize) -> Result<NmiReport> {
    let a = assign_batches(g.edges(), 0..g.edge_count(), batch_size)?;
    nmi(&timestamps(g), &a.ordinals())
}

/// NMI between edge timestamps and window ordinals over the whole graph.
pub fn window_timestamp_nmi(
    g: &TemporalGraph,
    horizon: Timestamp,
    anchor: AnchorRule,
) -> Result<NmiReport> {
    let a = assign_windows(g.edges(), 0..g.edge_count(), horizon, anchor)?;
    nmi(&timestamps(g), &a.ordinals())
}

/// NMI between window and batch ordinals of the same edges. Empty windows
/// carry no edges and so contribute nothing.
pub fn window_batch_nmi(window: &ChunkAssignment, batch: &ChunkAssignment) -> Result<NmiReport> {
    if window.range() != batch.range() {
        return Err(Error::RangeMismatch);
    }
    nmi(&window.ordinals(), &batch.ordinals())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepKind {
    Batch,
    Window { anchor: AnchorRule },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub parameter: i64,
    pub report: NmiReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmiCurve {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
    /// Index into `points` of the first maximum.
    pub best: usize,
}

impl NmiCurve {
    pub fn from_points(kind: SweepKind, points: Vec<SweepPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut best = 0;
        for (i, p) in points.iter().enumerate() {
            if p.report.value > points[best].report.value {
                best = i;
            }
        }
        Ok(NmiCurve { kind, points, best })
    }

    pub fn best_point(&self) -> &SweepPoint {
        &self.points[self.best]
    }
}

/// Timestamp NMI for one batch size or horizon.
pub fn sweep_point(g: &TemporalGraph, kind: SweepKind, parameter: i64) -> Result<SweepPoint> {
    let report = match kind {
        SweepKind::Batch => {
            let size = usize::try_from(parameter).map_err(|_| Error::ZeroBatchSize)?;
            batch_timestamp_nmi(g, size)?
        }
        SweepKind::Window { anchor } => window_timestamp_nmi(g, parameter, anchor)?,
    };
    Ok(SweepPoint { parameter, report })
}

/// Timestamp NMI for every parameter of `grid`, plus the grid maximum.
pub fn nmi_sweep(g: &TemporalGraph, kind: SweepKind, grid: &[i64]) -> Result<NmiCurve> {
    let points = grid
        .iter()
        .map(|&p| sweep_point(g, kind, p))
        .collect::<Result<Vec<_>>>()?;
    NmiCurve::from_points(kind, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TemporalEdge;
    use alloc::vec;

    const X: [i64; 6] = [1, 2, 2, 4, 5, 5];
    const Y: [i64; 6] = [1, 1, 2, 2, 3, 3];
    const Z: [i64; 6] = [1, 2, 2, 3, 4, 4];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[7, 7, 7]).unwrap(), 0.0);
        assert!(close(entropy(&Y).unwrap(), libm::log(3.0), 1e-15));
        let expected = 2.0 * (libm::log(6.0) / 6.0) + 2.0 * (libm::log(3.0) / 3.0);
        assert!(close(entropy(&X).unwrap(), expected, 1e-15));
        assert!(close(entropy(&X).unwrap(), 1.3297, 1e-4));
        assert_eq!(entropy::<i64>(&[]), Err(Error::EmptyLabels));
    }

    #[test]
    fn worked_example() {
        assert!(close(mutual_information(&X, &Y).unwrap(), 0.868, 1e-3));
        assert!(close(mutual_information(&X, &Z).unwrap(), 1.330, 1e-3));
        assert!(close(mutual_information(&Y, &Z).unwrap(), 0.868, 1e-3));
        assert!(close(nmi(&X, &Y).unwrap().value, 0.715, 1e-3));
        assert!(close(nmi(&X, &Z).unwrap().value, 1.0, 1e-12));
        assert!(close(nmi(&Y, &Z).unwrap().value, 0.715, 1e-3));
    }

    #[test]
    fn self_information() {
        let mi = mutual_information(&X, &X).unwrap();
        assert!(close(mi, entropy(&X).unwrap(), 1e-15));
    }

    #[test]
    fn degenerate_rules() {
        assert_eq!(nmi(&[1, 1], &[2, 2]).unwrap().value, 1.0);
        assert_eq!(nmi(&[1, 1], &[2, 3]).unwrap().value, 0.0);
        assert_eq!(nmi(&[1, 2], &[2, 2]).unwrap().value, 0.0);
        assert_eq!(
            nmi(&[1, 2], &[1]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        );
    }

    fn example() -> TemporalGraph {
        TemporalGraph::from_edges(X.iter().map(|&t| TemporalEdge::new(0, 1, t)).collect()).unwrap()
    }

    #[test]
    fn batch_nmi_of_example() {
        let g = example();
        assert!(close(
            batch_timestamp_nmi(&g, 2).unwrap().value,
            0.715,
            1e-3
        ));
        assert_eq!(batch_timestamp_nmi(&g, 6).unwrap().value, 0.0);
        let w = assign_windows(g.edges(), 0..6, 1, AnchorRule::Zero).unwrap();
        let b = assign_batches(g.edges(), 0..6, 2).unwrap();
        assert!(close(window_batch_nmi(&w, &b).unwrap().value, 0.715, 1e-3));
        let b_short = assign_batches(g.edges(), 0..5, 2).unwrap();
        assert_eq!(window_batch_nmi(&w, &b_short), Err(Error::RangeMismatch));
    }

    #[test]
    fn unique_timestamps_batch_one() {
        let g = TemporalGraph::from_edges((0..50).map(|t| TemporalEdge::new(0, 1, t)).collect())
            .unwrap();
        assert!(close(batch_timestamp_nmi(&g, 1).unwrap().value, 1.0, 1e-12));
    }

    #[test]
    fn constant_timestamps_single_batch() {
        let g = TemporalGraph::from_edges(vec![TemporalEdge::new(0, 1, 3); 10]).unwrap();
        assert_eq!(batch_timestamp_nmi(&g, 10).unwrap().value, 1.0);
        assert_eq!(batch_timestamp_nmi(&g, 50).unwrap().value, 1.0);
    }

    #[test]
    fn sweep_reports_max() {
        let g = example();
        let curve = nmi_sweep(
            &g,
            SweepKind::Window {
                anchor: AnchorRule::Zero,
            },
            &[3, 1, 2],
        )
        .unwrap();
        assert_eq!(curve.best_point().parameter, 1);
        assert!(close(curve.best_point().report.value, 1.0, 1e-12));
        assert_eq!(nmi_sweep(&g, SweepKind::Batch, &[]), Err(Error::EmptyGrid));
    }
}
