//! Negative edge generation: random, historic and inductive sampling with a
//! random fallback when a candidate pool runs dry.
//!
//! Every chunk draws from its own RNG stream ([`crate::rng::chunk_rng`]) so a
//! chunk's negatives depend only on the seed, the chunk ordinal and the
//! chunk's own inputs. Draws are without replacement within a chunk and reset
//! between chunks. The `j`-th negative takes the timestamp of positive
//! `j / negatives_per_positive`.

use alloc::vec::Vec;
use core::ops::Range;

use hashbrown::{HashMap, HashSet};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::chunking::{ChunkAssignment, ChunkBounds};
use crate::error::{Error, Result};
use crate::graph::{ChronologicalSplit, NodeId, TemporalEdge, TemporalGraph, Timestamp};
use crate::rng::{below, chunk_rng};

pub type Pair = (NodeId, NodeId);
pub type PairSet = HashSet<Pair>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeKind {
    /// Uniform pairs from the node universe.
    Random,
    /// Training pairs not active inside the chunk.
    Historic,
    /// Test pairs unseen in training and not active inside the chunk.
    Inductive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionPolicy {
    /// Random draws may coincide with a positive pair of the chunk.
    #[default]
    AllowPositiveCollision,
    /// Random draws skip every positive pair of the chunk.
    ExcludePositives,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: NegativeKind,
    pub seed: u64,
    pub negatives_per_positive: usize,
    pub collision: CollisionPolicy,
    /// Restrict random pairs to (observed source) × (observed destination).
    /// Off by default; the reference definition samples from all of V².
    #[serde(default)]
    pub bipartite: bool,
}

impl SamplerSpec {
    pub fn new(kind: NegativeKind, seed: u64) -> Self {
        SamplerSpec {
            kind,
            seed,
            negatives_per_positive: 1,
            collision: CollisionPolicy::default(),
            bipartite: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.negatives_per_positive == 0 {
            return Err(Error::ZeroNegatives);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// One `(src, dst, t)` query of a chunk with its ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalInstance {
    pub chunk: i64,
    pub src: NodeId,
    pub dst: NodeId,
    pub t: Timestamp,
    pub label: Label,
}

impl EvalInstance {
    pub fn pair(&self) -> Pair {
        (self.src, self.dst)
    }
}

/// The set of ordered pairs negatives are drawn from. Self-loops never qualify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairUniverse {
    /// All ordered pairs of distinct nodes in `0..nodes`.
    All { nodes: usize },
    /// Observed sources × observed destinations.
    Bipartite {
        sources: Vec<NodeId>,
        destinations: Vec<NodeId>,
    },
}

impl PairUniverse {
    pub fn of_graph(g: &TemporalGraph, bipartite: bool) -> Self {
        if !bipartite {
            return PairUniverse::All {
                nodes: g.node_count(),
            };
        }
        let mut sources: Vec<_> = g.edges().iter().map(|e| e.src).collect();
        let mut destinations: Vec<_> = g.edges().iter().map(|e| e.dst).collect();
        sources.sort_unstable();
        sources.dedup();
        destinations.sort_unstable();
        destinations.dedup();
        PairUniverse::Bipartite {
            sources,
            destinations,
        }
    }

    /// Size of the index space (may include self-loop slots for bipartite universes).
    fn index_space(&self) -> u64 {
        match self {
            PairUniverse::All { nodes } => {
                let n = *nodes as u64;
                n * n.saturating_sub(1)
            }
            PairUniverse::Bipartite {
                sources,
                destinations,
            } => sources.len() as u64 * destinations.len() as u64,
        }
    }

    fn pair(&self, index: u64) -> Pair {
        match self {
            PairUniverse::All { nodes } => {
                let others = *nodes as u64 - 1;
                let src = index / others;
                let r = index % others;
                let dst = if r >= src { r + 1 } else { r };
                (src as NodeId, dst as NodeId)
            }
            PairUniverse::Bipartite {
                sources,
                destinations,
            } => {
                let d = destinations.len() as u64;
                (
                    sources[(index / d) as usize],
                    destinations[(index % d) as usize],
                )
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            PairUniverse::All { nodes } if *nodes < 2 => {
                Err(Error::UniverseTooSmall { nodes: *nodes })
            }
            _ => Ok(()),
        }
    }
}

/// Lazily materialized Fisher-Yates permutation of `0..len`; memory grows
/// with the number of draws, not with `len`.
struct LazyPermutation {
    len: u64,
    next: u64,
    swaps: HashMap<u64, u64>,
}

impl LazyPermutation {
    fn new(len: u64) -> Self {
        LazyPermutation {
            len,
            next: 0,
            swaps: HashMap::new(),
        }
    }

    fn draw<R: RngCore>(&mut self, rng: &mut R) -> Option<u64> {
        if self.next == self.len {
            return None;
        }
        let j = self.next + below(rng, self.len - self.next);
        let at_j = self.swaps.get(&j).copied().unwrap_or(j);
        let at_next = self.swaps.get(&self.next).copied().unwrap_or(self.next);
        self.swaps.insert(j, at_next);
        self.next += 1;
        Some(at_j)
    }
}

/// Sorted, de-duplicated candidate pairs before per-chunk exclusion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidatePool {
    pairs: Vec<Pair>,
}

impl CandidatePool {
    pub fn from_pairs(mut pairs: Vec<Pair>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        CandidatePool { pairs }
    }

    /// Distinct training pairs.
    pub fn historic(train: &[TemporalEdge]) -> Self {
        Self::from_pairs(train.iter().map(TemporalEdge::pair).collect())
    }

    /// Distinct test pairs that never occur in training.
    pub fn inductive(train: &[TemporalEdge], test: &[TemporalEdge]) -> Self {
        let seen: PairSet = train.iter().map(TemporalEdge::pair).collect();
        Self::from_pairs(
            test.iter()
                .map(TemporalEdge::pair)
                .filter(|p| !seen.contains(p))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: &Pair) -> bool {
        self.pairs.binary_search(pair).is_ok()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }
}

/// Distinct pairs of all edges with `lo <= t <= hi`.
pub fn active_pairs(g: &TemporalGraph, (lo, hi): (Timestamp, Timestamp)) -> PairSet {
    g.edges()[g.time_range(lo, hi)]
        .iter()
        .map(TemporalEdge::pair)
        .collect()
}

/// A candidate pool with the pairs active inside one chunk removed.
#[derive(Debug, Clone)]
pub struct ChunkPool<'a> {
    base: &'a CandidatePool,
    excluded: PairSet,
}

impl<'a> ChunkPool<'a> {
    pub fn new(base: &'a CandidatePool, excluded: PairSet) -> Self {
        ChunkPool { base, excluded }
    }

    /// Number of pairs that can still be drawn.
    pub fn len(&self) -> usize {
        let removed = self
            .excluded
            .iter()
            .filter(|p| self.base.contains(p))
            .count();
        self.base.len() - removed
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, pair: &Pair) -> bool {
        self.base.contains(pair) && !self.excluded.contains(pair)
    }

    /// Remaining pairs in sorted order.
    pub fn to_vec(&self) -> Vec<Pair> {
        self.base
            .pairs
            .iter()
            .filter(|p| !self.excluded.contains(*p))
            .copied()
            .collect()
    }
}

/// Historic pool of a chunk: training pairs minus pairs occurring anywhere in
/// the graph at a time inside `bounds`.
pub fn build_historic_pool<'a>(
    base: &'a CandidatePool,
    g: &TemporalGraph,
    bounds: &ChunkBounds,
) -> ChunkPool<'a> {
    ChunkPool::new(base, active_pairs(g, bounds.inclusive_range()))
}

/// Inductive pool of a chunk: test pairs unseen in training, minus pairs
/// occurring anywhere in the graph at a time inside `bounds`.
pub fn build_inductive_pool<'a>(
    base: &'a CandidatePool,
    g: &TemporalGraph,
    bounds: &ChunkBounds,
) -> ChunkPool<'a> {
    ChunkPool::new(base, active_pairs(g, bounds.inclusive_range()))
}

/// Where one chunk's negatives came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSampling {
    pub ordinal: i64,
    pub bounds: ChunkBounds,
    pub positives: usize,
    /// Position of the chunk's instances in the instance stream.
    pub instances: Range<usize>,
    /// Candidates available before drawing; `None` for random sampling.
    pub pool_available: Option<usize>,
    pub from_pool: usize,
    pub from_random: usize,
}

fn draw_negatives(
    ordinal: i64,
    positives: &[TemporalEdge],
    pool: Option<&ChunkPool<'_>>,
    universe: &PairUniverse,
    spec: &SamplerSpec,
) -> Result<(Vec<EvalInstance>, usize, usize)> {
    spec.validate()?;
    let need = positives.len() * spec.negatives_per_positive;
    if need == 0 {
        return Ok((Vec::new(), 0, 0));
    }
    let mut rng = chunk_rng(spec.seed, ordinal);
    let mut chosen: Vec<Pair> = Vec::with_capacity(need);

    if let Some(pool) = pool {
        let base = &pool.base.pairs;
        let mut perm = LazyPermutation::new(base.len() as u64);
        while chosen.len() < need {
            let Some(i) = perm.draw(&mut rng) else { break };
            let pair = base[i as usize];
            if !pool.excluded.contains(&pair) {
                chosen.push(pair);
            }
        }
    }
    let from_pool = chosen.len();

    if chosen.len() < need {
        universe.check()?;
        let mut taken: PairSet = chosen.iter().copied().collect();
        if spec.collision == CollisionPolicy::ExcludePositives {
            taken.extend(positives.iter().map(TemporalEdge::pair));
        }
        let mut perm = LazyPermutation::new(universe.index_space());
        while chosen.len() < need {
            let Some(i) = perm.draw(&mut rng) else {
                return Err(Error::UniverseExhausted {
                    chunk: ordinal,
                    requested: need,
                    available: chosen.len(),
                });
            };
            let pair = universe.pair(i);
            if pair.0 != pair.1 && !taken.contains(&pair) {
                chosen.push(pair);
            }
        }
    }

    let npp = spec.negatives_per_positive;
    let negatives = chosen
        .into_iter()
        .enumerate()
        .map(|(j, (src, dst))| EvalInstance {
            chunk: ordinal,
            src,
            dst,
            t: positives[j / npp].t,
            label: Label::Negative,
        })
        .collect();
    Ok((negatives, from_pool, need - from_pool))
}

/// Uniform pairs from the universe, without replacement within the chunk.
pub fn sample_random(
    ordinal: i64,
    positives: &[TemporalEdge],
    universe: &PairUniverse,
    spec: &SamplerSpec,
) -> Result<Vec<EvalInstance>> {
    draw_negatives(ordinal, positives, None, universe, spec).map(|(n, ..)| n)
}

/// Draws from `pool` first, then tops up with random pairs.
pub fn sample_historic(
    ordinal: i64,
    positives: &[TemporalEdge],
    pool: &ChunkPool<'_>,
    universe: &PairUniverse,
    spec: &SamplerSpec,
) -> Result<Vec<EvalInstance>> {
    draw_negatives(ordinal, positives, Some(pool), universe, spec).map(|(n, ..)| n)
}

/// Inductive sampling for one chunk, building its pool from scratch.
#[allow(clippy::too_many_arguments)]
pub fn sample_inductive(
    ordinal: i64,
    positives: &[TemporalEdge],
    train: &[TemporalEdge],
    test: &[TemporalEdge],
    g: &TemporalGraph,
    bounds: &ChunkBounds,
    universe: &PairUniverse,
    spec: &SamplerSpec,
) -> Result<Vec<EvalInstance>> {
    let base = CandidatePool::inductive(train, test);
    let pool = build_inductive_pool(&base, g, bounds);
    draw_negatives(ordinal, positives, Some(&pool), universe, spec).map(|(n, ..)| n)
}

/// Positives and negatives of every occupied chunk, in chunk order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSet {
    pub instances: Vec<EvalInstance>,
    pub chunks: Vec<ChunkSampling>,
}

impl InstanceSet {
    pub fn chunk_instances(&self, chunk: &ChunkSampling) -> &[EvalInstance] {
        &self.instances[chunk.instances.clone()]
    }
}

/// Builds the instance stream for an assignment over the test range: for each
/// occupied chunk, its positives in edge order followed by its negatives.
pub fn generate_instances(
    g: &TemporalGraph,
    split: &ChronologicalSplit,
    assignment: &ChunkAssignment,
    spec: &SamplerSpec,
) -> Result<InstanceSet> {
    spec.validate()?;
    let edges = g.edges();
    let universe = PairUniverse::of_graph(g, spec.bipartite);
    let base = match spec.kind {
        NegativeKind::Random => None,
        NegativeKind::Historic => Some(CandidatePool::historic(&edges[split.train()])),
        NegativeKind::Inductive => Some(CandidatePool::inductive(
            &edges[split.train()],
            &edges[split.test()],
        )),
    };

    let per_chunk = 1 + spec.negatives_per_positive;
    let mut instances = Vec::with_capacity(assignment.range().len() * per_chunk);
    let mut chunks = Vec::with_capacity(assignment.occupied().len());
    for chunk in assignment.occupied() {
        let positives = &edges[chunk.edges.clone()];
        let pool = base
            .as_ref()
            .map(|b| ChunkPool::new(b, active_pairs(g, chunk.bounds.inclusive_range())));
        let (negatives, from_pool, from_random) =
            draw_negatives(chunk.ordinal, positives, pool.as_ref(), &universe, spec)?;
        let start = instances.len();
        instances.extend(positives.iter().map(|e| EvalInstance {
            chunk: chunk.ordinal,
            src: e.src,
            dst: e.dst,
            t: e.t,
            label: Label::Positive,
        }));
        instances.extend(negatives);
        chunks.push(ChunkSampling {
            ordinal: chunk.ordinal,
            bounds: chunk.bounds,
            positives: positives.len(),
            instances: start..instances.len(),
            pool_available: pool.as_ref().map(ChunkPool::len),
            from_pool,
            from_random,
        });
    }
    Ok(InstanceSet { instances, chunks })
}
