//! Assignment of edges to evaluation chunks: fixed-size batches of `b`
//! consecutive edges, or fixed-horizon windows `(origin + i·h, origin + (i+1)·h]`.

use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{TemporalEdge, Timestamp};
use crate::numeric::mean_std;

/// Where window ordinal 0 begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorRule {
    /// Windows `(i·h, (i+1)·h]` counted from time zero.
    Zero,
    /// Window 0 starts with the first timestamp of the chunked range.
    #[default]
    RangeStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum ChunkScheme {
    Batch {
        size: usize,
    },
    Window {
        horizon: Timestamp,
        anchor: AnchorRule,
    },
}

impl ChunkScheme {
    pub fn batch(size: usize) -> Self {
        ChunkScheme::Batch { size }
    }

    pub fn window(horizon: Timestamp) -> Self {
        ChunkScheme::Window {
            horizon,
            anchor: AnchorRule::RangeStart,
        }
    }

    pub fn is_window(&self) -> bool {
        matches!(self, ChunkScheme::Window { .. })
    }

    /// Chunks `range` of the graph's edges under this scheme.
    pub fn assign(&self, edges: &[TemporalEdge], range: Range<usize>) -> Result<ChunkAssignment> {
        match *self {
            ChunkScheme::Batch { size } => assign_batches(edges, range, size),
            ChunkScheme::Window { horizon, anchor } => {
                assign_windows(edges, range, horizon, anchor)
            }
        }
    }
}

/// Time coverage of one chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChunkBounds {
    /// Half-open window `(after, through]`.
    Window {
        after: Timestamp,
        through: Timestamp,
    },
    /// Closed span `[first, last]` of the batch's edge timestamps.
    Batch { first: Timestamp, last: Timestamp },
}

impl ChunkBounds {
    /// The instant at which a forecaster takes its memory snapshot for this
    /// chunk: the window start, or the first timestamp of the batch.
    pub fn reference_time(&self) -> Timestamp {
        match *self {
            ChunkBounds::Window { after, .. } => after,
            ChunkBounds::Batch { first, .. } => first,
        }
    }

    /// Inclusive timestamp range whose edges count as "occurring inside" the chunk.
    pub fn inclusive_range(&self) -> (Timestamp, Timestamp) {
        match *self {
            ChunkBounds::Window { after, through } => (after + 1, through),
            ChunkBounds::Batch { first, last } => (first, last),
        }
    }

    /// Window length, or `last - first` for batches.
    pub fn duration(&self) -> Timestamp {
        match *self {
            ChunkBounds::Window { after, through } => through - after,
            ChunkBounds::Batch { first, last } => last - first,
        }
    }

    pub fn midpoint(&self) -> f64 {
        let (lo, hi) = match *self {
            ChunkBounds::Window { after, through } => (after, through),
            ChunkBounds::Batch { first, last } => (first, last),
        };
        (lo as f64 + hi as f64) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub ordinal: i64,
    pub bounds: ChunkBounds,
    /// Indices into the graph's edge sequence.
    pub edges: Range<usize>,
}

impl Chunk {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Every edge of a range mapped to exactly one chunk.
///
/// Only occupied chunks are stored; empty windows between them are produced
/// on demand by [`ChunkAssignment::all_chunks`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkAssignment {
    scheme: ChunkScheme,
    range: Range<usize>,
    chunks: Vec<Chunk>,
    /// For each edge of `range`, the position of its chunk in `chunks`.
    chunk_of: Vec<u32>,
    origin: Option<Timestamp>,
}

impl ChunkAssignment {
    pub fn scheme(&self) -> ChunkScheme {
        self.scheme
    }

    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }

    /// Chunks that contain at least one edge, in time order.
    pub fn occupied(&self) -> &[Chunk] {
        &self.chunks
    }

    /// Window origin (the time before ordinal 0), `None` for batches.
    pub fn origin(&self) -> Option<Timestamp> {
        self.origin
    }

    /// Chunk ordinal of the edge at graph index `edge_index`.
    pub fn ordinal_of(&self, edge_index: usize) -> i64 {
        self.chunks[self.chunk_of[edge_index - self.range.start] as usize].ordinal
    }

    /// Raw chunk ordinal per edge of the range.
    pub fn ordinals(&self) -> Vec<i64> {
        self.chunk_of
            .iter()
            .map(|&c| self.chunks[c as usize].ordinal)
            .collect()
    }

    /// Ordinals renumbered 1.. over occupied chunks only.
    pub fn occupied_labels(&self) -> Vec<u32> {
        self.chunk_of.iter().map(|&c| c + 1).collect()
    }

    /// Number of windows between the first and last occupied one that hold no edge.
    pub fn empty_count(&self) -> u64 {
        match (self.chunks.first(), self.chunks.last()) {
            (Some(first), Some(last)) => {
                (last.ordinal - first.ordinal + 1) as u64 - self.chunks.len() as u64
            }
            _ => 0,
        }
    }

    /// Total number of chunks including materialized empty windows.
    pub fn total_count(&self) -> u64 {
        self.chunks.len() as u64 + self.empty_count()
    }

    /// Every chunk from the first to the last occupied ordinal. Empty windows
    /// carry an empty edge range positioned where the next edge would go.
    pub fn all_chunks(&self) -> impl Iterator<Item = Chunk> + '_ {
        let horizon = match self.scheme {
            ChunkScheme::Window { horizon, .. } => horizon,
            ChunkScheme::Batch { .. } => 0,
        };
        let origin = self.origin.unwrap_or(0);
        let mut next = 0usize;
        let first = self.chunks.first().map_or(0, |c| c.ordinal);
        let last = self.chunks.last().map_or(-1, |c| c.ordinal);
        let is_window = self.scheme.is_window();
        (first..=last).filter_map(move |ordinal| {
            let occupied = self.chunks.get(next).filter(|c| c.ordinal == ordinal);
            match occupied {
                Some(c) => {
                    next += 1;
                    Some(c.clone())
                }
                None if is_window => {
                    let at = self.chunks[next].edges.start;
                    Some(Chunk {
                        ordinal,
                        bounds: ChunkBounds::Window {
                            after: origin + ordinal * horizon,
                            through: origin + (ordinal + 1) * horizon,
                        },
                        edges: at..at,
                    })
                }
                None => None,
            }
        })
    }
}

/// Chunk `k` holds edges `[k·b, (k+1)·b)` of the range.
pub fn assign_batches(
    edges: &[TemporalEdge],
    range: Range<usize>,
    size: usize,
) -> Result<ChunkAssignment> {
    if size == 0 {
        return Err(Error::ZeroBatchSize);
    }
    let mut chunks = Vec::with_capacity(range.len().div_ceil(size));
    let mut chunk_of = Vec::with_capacity(range.len());
    let mut start = range.start;
    while start < range.end {
        let end = (start + size).min(range.end);
        let position = chunks.len() as u32;
        chunks.push(Chunk {
            ordinal: position as i64,
            bounds: ChunkBounds::Batch {
                first: edges[start].t,
                last: edges[end - 1].t,
            },
            edges: start..end,
        });
        chunk_of.extend(core::iter::repeat_n(position, end - start));
        start = end;
    }
    Ok(ChunkAssignment {
        scheme: ChunkScheme::Batch { size },
        range,
        chunks,
        chunk_of,
        origin: None,
    })
}

/// Window origin for a range whose first timestamp is `first_t`.
pub fn window_origin(anchor: AnchorRule, first_t: Timestamp) -> Timestamp {
    match anchor {
        AnchorRule::Zero => 0,
        // Integer timestamps: (first_t - 1, first_t - 1 + h] starts exactly at first_t.
        AnchorRule::RangeStart => first_t - 1,
    }
}

/// Ordinal `i` of the window `(origin + i·h, origin + (i+1)·h]` containing `t`,
/// i.e. `ceil((t - origin) / h) - 1`.
pub fn window_ordinal(t: Timestamp, origin: Timestamp, horizon: Timestamp) -> i64 {
    (t - origin - 1).div_euclid(horizon)
}

pub fn assign_windows(
    edges: &[TemporalEdge],
    range: Range<usize>,
    horizon: Timestamp,
    anchor: AnchorRule,
) -> Result<ChunkAssignment> {
    if horizon < 1 {
        return Err(Error::ZeroHorizon);
    }
    let scheme = ChunkScheme::Window { horizon, anchor };
    let Some(first) = edges.get(range.start).filter(|_| !range.is_empty()) else {
        return Ok(ChunkAssignment {
            scheme,
            range,
            chunks: Vec::new(),
            chunk_of: Vec::new(),
            origin: None,
        });
    };
    let origin = window_origin(anchor, first.t);
    let mut chunks: Vec<Chunk> = Vec::new();
    let mut chunk_of = Vec::with_capacity(range.len());
    for idx in range.clone() {
        let ordinal = window_ordinal(edges[idx].t, origin, horizon);
        match chunks.last_mut() {
            Some(c) if c.ordinal == ordinal => c.edges.end = idx + 1,
            _ => chunks.push(Chunk {
                ordinal,
                bounds: ChunkBounds::Window {
                    after: origin + ordinal * horizon,
                    through: origin + (ordinal + 1) * horizon,
                },
                edges: idx..idx + 1,
            }),
        }
        chunk_of.push((chunks.len() - 1) as u32);
    }
    Ok(ChunkAssignment {
        scheme,
        range,
        chunks,
        chunk_of,
        origin: Some(origin),
    })
}

/// One piece of a logical chunk that was split to bound memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubChunk {
    /// Ordinal of the logical chunk all pieces belong to.
    pub logical_ordinal: i64,
    pub piece: usize,
    pub pieces: usize,
    pub edges: Range<usize>,
}

impl SubChunk {
    /// The forecaster may observe the logical chunk only after this piece.
    pub fn is_last(&self) -> bool {
        self.piece + 1 == self.pieces
    }
}

/// Partitions `edges` into consecutive pieces of at most `max_size` edges.
/// An empty range yields a single empty piece.
pub fn subdivide(
    logical_ordinal: i64,
    edges: Range<usize>,
    max_size: usize,
) -> Result<Vec<SubChunk>> {
    if max_size == 0 {
        return Err(Error::ZeroPieceSize);
    }
    let pieces = edges.len().div_ceil(max_size).max(1);
    Ok((0..pieces)
        .map(|piece| {
            let start = edges.start + piece * max_size;
            SubChunk {
                logical_ordinal,
                piece,
                pieces,
                edges: start..(start + max_size).min(edges.end),
            }
        })
        .collect())
}

pub fn subdivide_chunk(chunk: &Chunk, max_size: usize) -> Result<Vec<SubChunk>> {
    subdivide(chunk.ordinal, chunk.edges.clone(), max_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        let (mean, std) = mean_std(values)?;
        Some(Summary {
            count: values.len(),
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram over `[min, max]`; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    let Some(summary) = Summary::of(values) else {
        return Vec::new();
    };
    let bins = bins.max(1);
    let width = (summary.max - summary.min) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: summary.min + i as f64 * width,
            hi: if i + 1 == bins {
                summary.max
            } else {
                summary.min + (i + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for &v in values {
        let i = if width > 0.0 {
            (((v - summary.min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        out[i].count += 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChunkMeasure {
    /// `last - first` timestamp of each batch.
    Duration,
    /// Number of edges per window, empty windows included.
    Size,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkStats {
    pub measure: ChunkMeasure,
    pub values: Vec<f64>,
    pub summary: Option<Summary>,
    pub histogram: Vec<HistogramBin>,
}

/// Duration distribution for batches, size distribution for windows.
pub fn chunk_stats(a: &ChunkAssignment, bins: usize) -> ChunkStats {
    let (measure, values): (_, Vec<f64>) = match a.scheme() {
        ChunkScheme::Batch { .. } => (
            ChunkMeasure::Duration,
            a.occupied()
                .iter()
                .map(|c| c.bounds.duration() as f64)
                .collect(),
        ),
        ChunkScheme::Window { .. } => (
            ChunkMeasure::Size,
            a.all_chunks().map(|c| c.len() as f64).collect(),
        ),
    };
    ChunkStats {
        measure,
        summary: Summary::of(&values),
        histogram: histogram(&values, bins),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn example_edges() -> Vec<TemporalEdge> {
        [
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 2),
            (0, 2, 4),
            (0, 1, 5),
            (1, 0, 5),
        ]
        .into_iter()
        .map(|(s, d, t)| TemporalEdge::new(s, d, t))
        .collect()
    }

    #[test]
    fn batches_of_example() {
        let e = example_edges();
        let a = assign_batches(&e, 0..6, 2).unwrap();
        assert_eq!(a.ordinals(), vec![0, 0, 1, 1, 2, 2]);
        let durations: Vec<_> = a.occupied().iter().map(|c| c.bounds.duration()).collect();
        assert_eq!(durations, vec![1, 2, 0]);
        assert_eq!(chunk_stats(&a, 4).values, vec![1.0, 2.0, 0.0]);
    }

    #[test]
    fn oversized_batch_is_single_chunk() {
        let e = example_edges();
        let a = assign_batches(&e, 0..6, 6).unwrap();
        assert_eq!(a.occupied().len(), 1);
        let a = assign_batches(&e, 0..6, 100).unwrap();
        assert_eq!(a.occupied().len(), 1);
        assert_eq!(assign_batches(&e, 0..6, 0), Err(Error::ZeroBatchSize));
    }

    #[test]
    fn windows_of_example() {
        let e = example_edges();
        let a = assign_windows(&e, 0..6, 1, AnchorRule::Zero).unwrap();
        assert_eq!(a.ordinals(), vec![0, 1, 1, 3, 4, 4]);
        assert_eq!(a.occupied_labels(), vec![1, 2, 2, 3, 4, 4]);
        assert_eq!(a.empty_count(), 1);
        let all: Vec<_> = a.all_chunks().map(|c| (c.ordinal, c.len())).collect();
        assert_eq!(all, vec![(0, 1), (1, 2), (2, 0), (3, 1), (4, 2)]);
        assert_eq!(
            a.occupied()[0].bounds,
            ChunkBounds::Window {
                after: 0,
                through: 1
            }
        );
    }

    #[test]
    fn range_start_anchor_puts_first_edge_in_window_zero() {
        let e = example_edges();
        let a = assign_windows(&e, 3..6, 2, AnchorRule::RangeStart).unwrap();
        // origin 3: (3,5] holds t=4 and both t=5 edges
        assert_eq!(a.origin(), Some(3));
        assert_eq!(a.ordinals(), vec![0, 0, 0]);
        assert_eq!(window_ordinal(0, 0, 5), -1);
    }

    #[test]
    fn wide_horizon_is_one_window() {
        let e = example_edges();
        let a = assign_windows(&e, 0..6, 5, AnchorRule::RangeStart).unwrap();
        assert_eq!(a.occupied().len(), 1);
        assert_eq!(a.total_count(), 1);
    }

    #[test]
    fn uniform_windows() {
        let e: Vec<_> = (1..=100).map(|t| TemporalEdge::new(0, 1, t)).collect();
        let a = assign_windows(&e, 0..100, 10, AnchorRule::Zero).unwrap();
        assert_eq!(a.occupied().len(), 10);
        assert!(a.occupied().iter().all(|c| c.len() == 10));
        let s = chunk_stats(&a, 5).summary.unwrap();
        assert_eq!((s.count, s.mean, s.std), (10, 10.0, 0.0));
    }

    #[test]
    fn burst_is_nine_batches_and_one_window() {
        let mut e: Vec<_> = (0..400).map(|t| TemporalEdge::new(0, 1, t)).collect();
        e.extend((0..1705).map(|_| TemporalEdge::new(1, 2, 1000)));
        let a = assign_batches(&e, 400..e.len(), 200).unwrap();
        assert_eq!(a.occupied().len(), 9);
        let w = assign_windows(&e, 400..e.len(), 86_400, AnchorRule::RangeStart).unwrap();
        assert_eq!(w.occupied().len(), 1);
    }

    #[test]
    fn subdivision() {
        let chunk = Chunk {
            ordinal: 3,
            bounds: ChunkBounds::Window {
                after: 0,
                through: 1,
            },
            edges: 10..1715,
        };
        let pieces = subdivide_chunk(&chunk, 200).unwrap();
        assert_eq!(pieces.len(), 9);
        assert!(pieces[..8].iter().all(|p| p.edges.len() == 200));
        assert_eq!(pieces[8].edges.len(), 105);
        assert!(pieces[8].is_last() && !pieces[0].is_last());
        assert!(pieces
            .iter()
            .all(|p| p.logical_ordinal == 3 && p.pieces == 9));

        let one = subdivide_chunk(&chunk, 5000).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].edges, 10..1715);
        assert_eq!(subdivide(0, 0..0, 3).unwrap().len(), 1);
        assert_eq!(subdivide(0, 0..4, 0), Err(Error::ZeroPieceSize));
    }

    #[test]
    fn histogram_counts_everything() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0, 10.0], 5);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 5);
        assert_eq!(h[4].count, 1);
        assert_eq!(h[0].count, 2);
        let flat = histogram(&[2.0, 2.0], 3);
        assert_eq!(flat[0].count, 2);
    }
}
