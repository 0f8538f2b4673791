//! Temporal graph data model: timestamped edges, chronological splits and
//! summary statistics.

use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::mean_std;

/// Dense node identifier in `0..node_count`.
pub type NodeId = u32;

/// Timestamp in the dataset's native integer unit (seconds, snapshot index, ...).
pub type Timestamp = i64;

/// One timestamped interaction `(src, dst, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub t: Timestamp,
}

impl TemporalEdge {
    pub const fn new(src: NodeId, dst: NodeId, t: Timestamp) -> Self {
        TemporalEdge { src, dst, t }
    }

    #[inline]
    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.src, self.dst)
    }
}

/// A chronologically ordered, immutable sequence of temporal edges.
///
/// Edges with equal timestamps keep the order in which they were supplied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalGraph {
    node_count: usize,
    edges: Vec<TemporalEdge>,
    resolution: Timestamp,
}

impl TemporalGraph {
    /// Builds a graph, stably sorting `edges` by timestamp.
    pub fn new(
        node_count: usize,
        mut edges: Vec<TemporalEdge>,
        resolution: Timestamp,
    ) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if resolution < 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        for (index, e) in edges.iter().enumerate() {
            if e.t < 0 {
                return Err(Error::NegativeTimestamp { index, t: e.t });
            }
            for node in [e.src, e.dst] {
                if node as usize >= node_count {
                    return Err(Error::NodeOutOfRange {
                        index,
                        node,
                        node_count,
                    });
                }
            }
        }
        if !edges.windows(2).all(|w| w[0].t <= w[1].t) {
            edges.sort_by_key(|e| e.t);
        }
        Ok(TemporalGraph {
            node_count,
            edges,
            resolution,
        })
    }

    /// Builds a graph whose node count is one past the largest id used.
    pub fn from_edges(edges: Vec<TemporalEdge>) -> Result<Self> {
        let node_count = edges
            .iter()
            .map(|e| e.src.max(e.dst) as usize + 1)
            .max()
            .unwrap_or(0);
        Self::new(node_count, edges, 1)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn resolution(&self) -> Timestamp {
        self.resolution
    }

    pub fn t_min(&self) -> Timestamp {
        self.edges[0].t
    }

    pub fn t_max(&self) -> Timestamp {
        self.edges[self.edges.len() - 1].t
    }

    /// Total observed duration `t_max - t_min`.
    pub fn duration(&self) -> Timestamp {
        self.t_max() - self.t_min()
    }

    /// Index range of the edges with `lo <= t <= hi`.
    pub fn time_range(&self, lo: Timestamp, hi: Timestamp) -> Range<usize> {
        let start = self.edges.partition_point(|e| e.t < lo);
        let end = self.edges.partition_point(|e| e.t <= hi);
        start..end.max(start)
    }

    /// Returns a copy of this graph with `edges` replaced (must stay sorted).
    pub(crate) fn with_edges(&self, edges: Vec<TemporalEdge>) -> TemporalGraph {
        debug_assert!(edges.windows(2).all(|w| w[0].t <= w[1].t));
        TemporalGraph {
            node_count: self.node_count,
            edges,
            resolution: self.resolution,
        }
    }

    /// One group per distinct timestamp, in increasing time order.
    pub fn snapshot_groups(&self) -> Vec<SnapshotGroup> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=self.edges.len() {
            if i == self.edges.len() || self.edges[i].t != self.edges[start].t {
                groups.push(SnapshotGroup {
                    t: self.edges[start].t,
                    edges: start..i,
                });
                start = i;
            }
        }
        groups
    }

    /// Splits the edge sequence by count into train / validation / test.
    ///
    /// `train_end_index = floor(train_ratio·m)` and
    /// `val_end_index = floor((train_ratio+val_ratio)·m)`. A timestamp may end
    /// up on both sides of a boundary; see [`ChronologicalSplit::straddles_test_boundary`].
    pub fn chronological_split(
        &self,
        train_ratio: f64,
        val_ratio: f64,
    ) -> Result<ChronologicalSplit> {
        let valid = train_ratio.is_finite()
            && val_ratio.is_finite()
            && train_ratio > 0.0
            && val_ratio >= 0.0
            && train_ratio + val_ratio < 1.0;
        if !valid {
            return Err(Error::InvalidSplitRatios {
                train: train_ratio,
                val: val_ratio,
            });
        }
        let m = self.edges.len();
        // Tolerance absorbs products such as 0.29 * 100 = 28.999999999999996.
        let cut = |ratio: f64| libm::floor(ratio * m as f64 + 1e-9) as usize;
        let train_end = cut(train_ratio).min(m);
        let val_end = cut(train_ratio + val_ratio).clamp(train_end, m);
        if train_end == 0 {
            return Err(Error::EmptyTrain { edges: m });
        }
        Ok(ChronologicalSplit::from_indices(self, train_end, val_end))
    }

    /// Table-1 style summary of the graph.
    pub fn stats(&self) -> DatasetStats {
        let groups = self.snapshot_groups();
        let sizes: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
        let (mean, std) = mean_std(&sizes).unwrap_or((0.0, 0.0));
        let m = self.edges.len();
        DatasetStats {
            nodes: self.node_count,
            edges: m,
            duration: self.duration(),
            distinct_timestamps: groups.len(),
            edges_per_timestamp_mean: mean,
            edges_per_timestamp_std: std,
            max_edges_per_timestamp: groups.iter().map(|g| g.len()).max().unwrap_or(0),
            temporal_density: self.duration() as f64 / m as f64,
        }
    }

    /// Edge counts in consecutive bins of `bin_width`, starting at `t_min`.
    /// Empty bins are included as zeros.
    pub fn activity_histogram(&self, bin_width: Timestamp) -> Result<Vec<(Timestamp, usize)>> {
        if bin_width < 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "bin width must be positive, got {bin_width}"
            )));
        }
        let t0 = self.t_min();
        let bins = (self.duration() / bin_width) as usize + 1;
        let mut counts = alloc::vec![0usize; bins];
        for e in &self.edges {
            counts[((e.t - t0) / bin_width) as usize] += 1;
        }
        Ok(counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (t0 + i as Timestamp * bin_width, c))
            .collect())
    }
}

/// Edges sharing one timestamp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotGroup {
    pub t: Timestamp,
    pub edges: Range<usize>,
}

impl SnapshotGroup {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Count-based train / validation / test boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChronologicalSplit {
    pub edge_count: usize,
    pub train_end_index: usize,
    pub val_end_index: usize,
    /// Timestamp of the first validation edge (or of the first test edge when
    /// the validation range is empty).
    pub t_val: Option<Timestamp>,
    /// Timestamp of the first test edge.
    pub t_test: Option<Timestamp>,
    straddles_val: bool,
    straddles_test: bool,
}

impl ChronologicalSplit {
    /// Builds a split from explicit indices. Panics unless
    /// `0 < train_end <= val_end <= m`.
    pub fn from_indices(g: &TemporalGraph, train_end: usize, val_end: usize) -> Self {
        let edges = g.edges();
        let m = edges.len();
        assert!(0 < train_end && train_end <= val_end && val_end <= m);
        let straddles = |idx: usize| idx > 0 && idx < m && edges[idx - 1].t == edges[idx].t;
        ChronologicalSplit {
            edge_count: m,
            train_end_index: train_end,
            val_end_index: val_end,
            t_val: edges.get(train_end).map(|e| e.t),
            t_test: edges.get(val_end).map(|e| e.t),
            straddles_val: straddles(train_end),
            straddles_test: straddles(val_end),
        }
    }

    pub fn train(&self) -> Range<usize> {
        0..self.train_end_index
    }

    pub fn val(&self) -> Range<usize> {
        self.train_end_index..self.val_end_index
    }

    pub fn test(&self) -> Range<usize> {
        self.val_end_index..self.edge_count
    }

    /// Everything that precedes the test range (train and validation).
    pub fn history(&self) -> Range<usize> {
        0..self.val_end_index
    }

    /// True when the last pre-test edge and the first test edge share a timestamp.
    pub fn straddles_test_boundary(&self) -> bool {
        self.straddles_test
    }

    /// True when the last train edge and the first validation edge share a timestamp.
    pub fn straddles_val_boundary(&self) -> bool {
        self.straddles_val
    }
}

/// Dataset characteristics: size, span and burstiness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub nodes: usize,
    pub edges: usize,
    pub duration: Timestamp,
    pub distinct_timestamps: usize,
    pub edges_per_timestamp_mean: f64,
    pub edges_per_timestamp_std: f64,
    pub max_edges_per_timestamp: usize,
    /// `duration / edges`.
    pub temporal_density: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn example() -> TemporalGraph {
        // a=0, b=1, c=2
        TemporalGraph::from_edges(vec![
            TemporalEdge::new(0, 1, 1),
            TemporalEdge::new(1, 2, 2),
            TemporalEdge::new(2, 0, 2),
            TemporalEdge::new(0, 2, 4),
            TemporalEdge::new(0, 1, 5),
            TemporalEdge::new(1, 0, 5),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_empty_and_negative() {
        assert_eq!(TemporalGraph::from_edges(vec![]), Err(Error::EmptyGraph));
        assert_eq!(
            TemporalGraph::from_edges(vec![TemporalEdge::new(0, 1, -3)]),
            Err(Error::NegativeTimestamp { index: 0, t: -3 })
        );
        assert!(matches!(
            TemporalGraph::new(2, vec![TemporalEdge::new(0, 2, 1)], 1),
            Err(Error::NodeOutOfRange { node: 2, .. })
        ));
    }

    #[test]
    fn stable_sort_keeps_input_order_for_ties() {
        let g = TemporalGraph::from_edges(vec![
            TemporalEdge::new(3, 4, 2),
            TemporalEdge::new(0, 1, 1),
            TemporalEdge::new(1, 2, 2),
        ])
        .unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| e.pair()).collect();
        assert_eq!(pairs, vec![(0, 1), (3, 4), (1, 2)]);
    }

    #[test]
    fn split_counts() {
        let edges = (0..100).map(|i| TemporalEdge::new(0, 1, i)).collect();
        let g = TemporalGraph::from_edges(edges).unwrap();
        let s = g.chronological_split(0.7, 0.15).unwrap();
        assert_eq!(
            (s.train().len(), s.val().len(), s.test().len()),
            (70, 15, 15)
        );
        assert!(!s.straddles_test_boundary());

        let one = TemporalGraph::from_edges(vec![TemporalEdge::new(0, 1, 0)]).unwrap();
        assert_eq!(
            one.chronological_split(0.7, 0.15),
            Err(Error::EmptyTrain { edges: 1 })
        );
        assert!(matches!(
            g.chronological_split(0.9, 0.1),
            Err(Error::InvalidSplitRatios { .. })
        ));
        assert!(g.chronological_split(0.0, 0.1).is_err());
    }

    #[test]
    fn split_may_share_boundary_timestamp() {
        let g = example();
        let s = g.chronological_split(0.5, 0.0).unwrap();
        assert_eq!(s.train(), 0..3);
        assert_eq!(s.test(), 3..6);
        assert_eq!(s.t_test, Some(4));
        // first three edges are t=1,2,2 and the test starts at t=4
        assert!(!s.straddles_test_boundary());
        let s = ChronologicalSplit::from_indices(&g, 2, 2);
        assert!(s.straddles_test_boundary());
        assert_eq!(s.t_test, Some(2));
    }

    #[test]
    fn snapshot_groups_of_example() {
        let groups = example().snapshot_groups();
        let summary: Vec<_> = groups.iter().map(|g| (g.t, g.len())).collect();
        assert_eq!(summary, vec![(1, 1), (2, 2), (4, 1), (5, 2)]);
    }

    #[test]
    fn burst_is_one_group() {
        let edges = (0..1705)
            .map(|i| TemporalEdge::new(i % 7, 7 + i % 5, 42))
            .collect();
        let g = TemporalGraph::from_edges(edges).unwrap();
        let groups = g.snapshot_groups();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].len(), 1705);
    }

    #[test]
    fn stats_of_example() {
        let s = example().stats();
        assert_eq!(
            (s.nodes, s.edges, s.duration, s.distinct_timestamps),
            (3, 6, 4, 4)
        );
        assert!((s.edges_per_timestamp_mean - 1.5).abs() < 1e-12);
        assert!((s.edges_per_timestamp_std - 0.5).abs() < 1e-12);
        assert!((s.temporal_density - 4.0 / 6.0).abs() < 1e-12);
        assert!(
            (s.edges_per_timestamp_mean * s.distinct_timestamps as f64 - s.edges as f64).abs()
                < 1e-9
        );
    }

    #[test]
    fn stats_of_single_edge() {
        let g = TemporalGraph::from_edges(vec![TemporalEdge::new(0, 1, 0)]).unwrap();
        let s = g.stats();
        assert_eq!((s.nodes, s.edges, s.duration), (2, 1, 0));
        assert_eq!(s.edges_per_timestamp_mean, 1.0);
        assert_eq!(s.edges_per_timestamp_std, 0.0);
    }

    #[test]
    fn activity_has_zero_bins() {
        let hist = example().activity_histogram(1).unwrap();
        assert_eq!(hist, vec![(1, 1), (2, 2), (3, 0), (4, 1), (5, 2)]);
        let hist = example().activity_histogram(3).unwrap();
        assert_eq!(hist, vec![(1, 3), (4, 3)]);
    }
}
