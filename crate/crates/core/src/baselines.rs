//! The forecaster contract and the non-learned forecasters shipped with the
//! toolkit: EdgeBank with its memory modes, a recency scorer, and a replay
//! forecaster for externally produced scores.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::chunking::ChunkBounds;
use crate::error::{Error, Result};
use crate::graph::{TemporalEdge, Timestamp};
use crate::numeric::CompensatedSum;
use crate::sampling::{EvalInstance, Pair};

/// The logical chunk a forecaster is asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkContext {
    pub ordinal: i64,
    pub bounds: ChunkBounds,
    /// Piece index when the chunk is scored in several sub-chunks.
    pub piece: usize,
    pub pieces: usize,
}

impl ChunkContext {
    pub fn reference_time(&self) -> Timestamp {
        self.bounds.reference_time()
    }
}

/// Score-then-observe state machine.
///
/// For each logical chunk, in order: `score_chunk` once per piece, then
/// `observe_chunk` exactly once with the real edges of that chunk. Scores of a
/// chunk may only depend on the history passed to `begin` and the edges
/// observed for earlier chunks.
pub trait Forecaster {
    fn begin(&mut self, history: &[TemporalEdge]);

    /// One score per instance, in order.
    fn score_chunk(&mut self, ctx: &ChunkContext, instances: &[EvalInstance]) -> Result<Vec<f64>>;

    fn observe_chunk(&mut self, ctx: &ChunkContext, edges: &[TemporalEdge]);

    /// Called after the last chunk.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }

    /// Resolved configuration, recorded in reports.
    fn describe(&self) -> Vec<(String, String)>;
}

impl<F: Forecaster + ?Sized> Forecaster for Box<F> {
    fn begin(&mut self, history: &[TemporalEdge]) {
        (**self).begin(history)
    }
    fn score_chunk(&mut self, ctx: &ChunkContext, instances: &[EvalInstance]) -> Result<Vec<f64>> {
        (**self).score_chunk(ctx, instances)
    }
    fn observe_chunk(&mut self, ctx: &ChunkContext, edges: &[TemporalEdge]) {
        (**self).observe_chunk(ctx, edges)
    }
    fn finish(&mut self) -> Result<()> {
        (**self).finish()
    }
    fn describe(&self) -> Vec<(String, String)> {
        (**self).describe()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Ready,
    Scoring(i64),
    Finished,
}

/// Tracks the call sequence of a forecaster and rejects out-of-order calls.
#[derive(Debug, Clone)]
pub struct ContractGuard {
    phase: Phase,
    last_observed: Option<i64>,
}

impl Default for ContractGuard {
    fn default() -> Self {
        Self::new()
    }
}

impl ContractGuard {
    pub fn new() -> Self {
        ContractGuard {
            phase: Phase::Fresh,
            last_observed: None,
        }
    }

    fn violation<T>(msg: String) -> Result<T> {
        Err(Error::ContractViolation(msg))
    }

    pub fn begin(&mut self) -> Result<()> {
        match self.phase {
            Phase::Fresh => {
                self.phase = Phase::Ready;
                Ok(())
            }
            _ => Self::violation("begin called twice".to_string()),
        }
    }

    pub fn score(&mut self, ordinal: i64) -> Result<()> {
        match self.phase {
            Phase::Fresh => Self::violation(format!("chunk {ordinal} scored before begin")),
            Phase::Finished => Self::violation(format!("chunk {ordinal} scored after finish")),
            Phase::Scoring(current) if current != ordinal => Self::violation(format!(
                "chunk {ordinal} scored while chunk {current} is not yet observed"
            )),
            Phase::Scoring(_) => Ok(()),
            Phase::Ready => match self.last_observed {
                Some(prev) if ordinal <= prev => Self::violation(format!(
                    "chunk {ordinal} scored after chunk {prev} was observed"
                )),
                _ => {
                    self.phase = Phase::Scoring(ordinal);
                    Ok(())
                }
            },
        }
    }

    pub fn observe(&mut self, ordinal: i64) -> Result<()> {
        match self.phase {
            Phase::Scoring(current) if current == ordinal => {
                self.phase = Phase::Ready;
                self.last_observed = Some(ordinal);
                Ok(())
            }
            _ => Self::violation(format!("chunk {ordinal} observed before it was scored")),
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        match self.phase {
            Phase::Ready => {
                self.phase = Phase::Finished;
                Ok(())
            }
            Phase::Scoring(c) => {
                Self::violation(format!("finished while chunk {c} is not observed"))
            }
            _ => Self::violation("finish without begin".to_string()),
        }
    }
}

/// How a time-window memory resolves its window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum WindowPolicy {
    /// Explicit duration in native time units.
    Fixed { duration: f64 },
    /// Fraction `p ∈ (0, 1]` of the history span.
    FixedProportion { p: f64 },
    /// Mean gap between consecutive occurrences of repeated history pairs.
    RepeatInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Threshold {
    Count {
        k: u32,
    },
    /// `ceil` of the mean number of occurrences per distinct history pair.
    DerivedMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "memory", rename_all = "kebab-case")]
pub enum EdgeBankConfig {
    /// Any past occurrence.
    Unlimited,
    /// An occurrence within the trailing window that ends at the chunk's reference time.
    TimeWindow { policy: WindowPolicy },
    /// At least `k` past occurrences.
    RepeatThreshold { threshold: Threshold },
}

/// EdgeBank memory mode with every derived quantity resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "memory", rename_all = "kebab-case")]
pub enum ResolvedMemory {
    Unlimited,
    TimeWindow { window: f64 },
    RepeatThreshold { k: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedEdgeBank {
    pub config: EdgeBankConfig,
    pub memory: ResolvedMemory,
    pub warnings: Vec<String>,
}

/// Resolves proportion / repeat-interval windows and derived thresholds from
/// the history edges.
pub fn derive_edgebank_params(
    history: &[TemporalEdge],
    config: EdgeBankConfig,
) -> Result<ResolvedEdgeBank> {
    if history.is_empty() {
        return Err(Error::InvalidParameter(
            "EdgeBank needs a non-empty history".to_string(),
        ));
    }
    let span = (history[history.len() - 1].t - history[0].t) as f64;
    let mut warnings = Vec::new();
    let memory = match config {
        EdgeBankConfig::Unlimited => ResolvedMemory::Unlimited,
        EdgeBankConfig::TimeWindow { policy } => {
            let window = match policy {
                WindowPolicy::Fixed { duration } => {
                    if !(duration > 0.0 && duration.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "window duration {duration}"
                        )));
                    }
                    duration
                }
                WindowPolicy::FixedProportion { p } => {
                    if !(p > 0.0 && p <= 1.0) {
                        return Err(Error::InvalidParameter(format!(
                            "window proportion {p} outside (0, 1]"
                        )));
                    }
                    p * span
                }
                WindowPolicy::RepeatInterval => match mean_repeat_gap(history) {
                    Some(gap) => gap,
                    None => {
                        warnings.push(
                            "no pair repeats in the history; repeat-interval window falls back to the full history span"
                                .to_string(),
                        );
                        span
                    }
                },
            };
            ResolvedMemory::TimeWindow { window }
        }
        EdgeBankConfig::RepeatThreshold { threshold } => {
            let k = match threshold {
                Threshold::Count { k } => {
                    if k == 0 {
                        return Err(Error::InvalidParameter(
                            "repeat threshold must be at least 1".to_string(),
                        ));
                    }
                    k
                }
                Threshold::DerivedMean => {
                    let mut pairs: Vec<Pair> = history.iter().map(TemporalEdge::pair).collect();
                    pairs.sort_unstable();
                    pairs.dedup();
                    let mean = history.len() as f64 / pairs.len() as f64;
                    (libm::ceil(mean - 1e-9) as u32).max(1)
                }
            };
            ResolvedMemory::RepeatThreshold { k }
        }
    };
    Ok(ResolvedEdgeBank {
        config,
        memory,
        warnings,
    })
}

/// Mean over all gaps between consecutive occurrences of the same pair.
fn mean_repeat_gap(history: &[TemporalEdge]) -> Option<f64> {
    let mut last: HashMap<Pair, Timestamp> = HashMap::new();
    let mut gaps: Vec<Timestamp> = Vec::new();
    for e in history {
        if let Some(prev) = last.insert(e.pair(), e.t) {
            gaps.push(e.t - prev);
        }
    }
    if gaps.is_empty() {
        return None;
    }
    let sum = gaps
        .iter()
        .map(|&g| g as f64)
        .collect::<CompensatedSum>()
        .value();
    Some(sum / gaps.len() as f64)
}

#[derive(Debug, Clone, Copy)]
struct PairMemory {
    count: u32,
    last_seen: Timestamp,
}

/// Per-pair occurrence counts and last-seen times of real edges.
#[derive(Debug, Clone, Default)]
struct PairHistory {
    pairs: HashMap<Pair, PairMemory>,
}

impl PairHistory {
    fn record(&mut self, edges: &[TemporalEdge]) {
        for e in edges {
            let m = self.pairs.entry(e.pair()).or_insert(PairMemory {
                count: 0,
                last_seen: e.t,
            });
            m.count += 1;
            m.last_seen = m.last_seen.max(e.t);
        }
    }

    fn get(&self, pair: &Pair) -> Option<&PairMemory> {
        self.pairs.get(pair)
    }
}

/// Non-learned baseline: predicts 1 iff the queried pair qualifies under the
/// memory mode at the chunk's reference time.
#[derive(Debug, Clone)]
pub struct EdgeBank {
    config: EdgeBankConfig,
    resolved: Option<ResolvedEdgeBank>,
    memory: PairHistory,
}

impl EdgeBank {
    pub fn new(config: EdgeBankConfig) -> Self {
        EdgeBank {
            config,
            resolved: None,
            memory: PairHistory::default(),
        }
    }

    /// Uses an already resolved memory mode instead of deriving it in `begin`.
    pub fn with_resolved(resolved: ResolvedEdgeBank) -> Self {
        EdgeBank {
            config: resolved.config,
            resolved: Some(resolved),
            memory: PairHistory::default(),
        }
    }

    pub fn resolved(&self) -> Option<&ResolvedEdgeBank> {
        self.resolved.as_ref()
    }

    fn memory_mode(&self) -> ResolvedMemory {
        self.resolved
            .as_ref()
            .map_or(ResolvedMemory::Unlimited, |r| r.memory)
    }

    /// Score of one pair at `reference_time`.
    pub fn score(&self, pair: &Pair, reference_time: Timestamp) -> f64 {
        let Some(m) = self.memory.get(pair) else {
            return 0.0;
        };
        let hit = match self.memory_mode() {
            ResolvedMemory::Unlimited => true,
            ResolvedMemory::TimeWindow { window } => {
                m.last_seen as f64 > reference_time as f64 - window
            }
            ResolvedMemory::RepeatThreshold { k } => m.count >= k,
        };
        if hit {
            1.0
        } else {
            0.0
        }
    }
}

impl Forecaster for EdgeBank {
    fn begin(&mut self, history: &[TemporalEdge]) {
        if self.resolved.is_none() {
            self.resolved = Some(derive_edgebank_params(history, self.config).unwrap_or_else(
                |_| {
                    // empty history: nothing to derive from
                    ResolvedEdgeBank {
                        config: self.config,
                        memory: match self.config {
                            EdgeBankConfig::Unlimited => ResolvedMemory::Unlimited,
                            EdgeBankConfig::TimeWindow {
                                policy: WindowPolicy::Fixed { duration },
                            } => ResolvedMemory::TimeWindow { window: duration },
                            EdgeBankConfig::TimeWindow { .. } => {
                                ResolvedMemory::TimeWindow { window: 0.0 }
                            }
                            EdgeBankConfig::RepeatThreshold {
                                threshold: Threshold::Count { k },
                            } => ResolvedMemory::RepeatThreshold { k: k.max(1) },
                            EdgeBankConfig::RepeatThreshold { .. } => {
                                ResolvedMemory::RepeatThreshold { k: 1 }
                            }
                        },
                        warnings: alloc::vec![
                            "empty history; EdgeBank parameters not derived".to_string()
                        ],
                    }
                },
            ));
        }
        self.memory.record(history);
    }

    fn score_chunk(&mut self, ctx: &ChunkContext, instances: &[EvalInstance]) -> Result<Vec<f64>> {
        let at = ctx.reference_time();
        Ok(instances
            .iter()
            .map(|i| self.score(&i.pair(), at))
            .collect())
    }

    fn observe_chunk(&mut self, _ctx: &ChunkContext, edges: &[TemporalEdge]) {
        self.memory.record(edges);
    }

    fn describe(&self) -> Vec<(String, String)> {
        let mut out = alloc::vec![("forecaster".to_string(), "edgebank".to_string())];
        match self.memory_mode() {
            ResolvedMemory::Unlimited => out.push(("memory".into(), "unlimited".into())),
            ResolvedMemory::TimeWindow { window } => {
                out.push(("memory".into(), "time-window".into()));
                out.push(("window".into(), format!("{window}")));
            }
            ResolvedMemory::RepeatThreshold { k } => {
                out.push(("memory".into(), "repeat-threshold".into()));
                out.push(("threshold".into(), format!("{k}")));
            }
        }
        if let Some(r) = &self.resolved {
            let policy = match r.config {
                EdgeBankConfig::TimeWindow {
                    policy: WindowPolicy::FixedProportion { p },
                } => Some(format!("fixed-proportion:{p}")),
                EdgeBankConfig::TimeWindow {
                    policy: WindowPolicy::RepeatInterval,
                } => Some("repeat-interval".into()),
                EdgeBankConfig::TimeWindow {
                    policy: WindowPolicy::Fixed { .. },
                } => Some("fixed".into()),
                EdgeBankConfig::RepeatThreshold {
                    threshold: Threshold::DerivedMean,
                } => Some("derived-mean".into()),
                _ => None,
            };
            if let Some(p) = policy {
                out.push(("derived-from".into(), p));
            }
            for w in &r.warnings {
                out.push(("warning".into(), w.clone()));
            }
        }
        out
    }
}

/// Continuous-score baseline: `exp(-Δt / decay)` where `Δt` is the time since
/// the pair was last observed; unseen pairs score 0.
#[derive(Debug, Clone)]
pub struct RecencyForecaster {
    decay: f64,
    memory: PairHistory,
}

impl RecencyForecaster {
    pub fn new(decay: f64) -> Result<Self> {
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decay must be positive, got {decay}"
            )));
        }
        Ok(RecencyForecaster {
            decay,
            memory: PairHistory::default(),
        })
    }

    pub fn score(&self, pair: &Pair, reference_time: Timestamp) -> f64 {
        match self.memory.get(pair) {
            None => 0.0,
            Some(m) => {
                let dt = (reference_time - m.last_seen).max(0) as f64;
                libm::exp(-dt / self.decay)
            }
        }
    }
}

impl Forecaster for RecencyForecaster {
    fn begin(&mut self, history: &[TemporalEdge]) {
        self.memory.record(history);
    }

    fn score_chunk(&mut self, ctx: &ChunkContext, instances: &[EvalInstance]) -> Result<Vec<f64>> {
        let at = ctx.reference_time();
        Ok(instances
            .iter()
            .map(|i| self.score(&i.pair(), at))
            .collect())
    }

    fn observe_chunk(&mut self, _ctx: &ChunkContext, edges: &[TemporalEdge]) {
        self.memory.record(edges);
    }

    fn describe(&self) -> Vec<(String, String)> {
        alloc::vec![
            ("forecaster".to_string(), "recency".to_string()),
            ("decay".to_string(), format!("{}", self.decay)),
        ]
    }
}

/// A recorded score for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredInstance {
    pub instance: EvalInstance,
    pub score: f64,
}

/// Replays scores produced outside the toolkit. Rows must match the instance
/// stream exactly, in order.
#[derive(Debug, Clone)]
pub struct ReplayForecaster {
    rows: Vec<ScoredInstance>,
    cursor: usize,
}

impl ReplayForecaster {
    pub fn new(rows: Vec<ScoredInstance>) -> Result<Self> {
        if let Some(index) = rows.iter().position(|r| !r.score.is_finite()) {
            return Err(Error::NonFiniteScore { index });
        }
        Ok(ReplayForecaster { rows, cursor: 0 })
    }
}

impl Forecaster for ReplayForecaster {
    fn begin(&mut self, _history: &[TemporalEdge]) {
        self.cursor = 0;
    }

    fn score_chunk(&mut self, _ctx: &ChunkContext, instances: &[EvalInstance]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(instances.len());
        for inst in instances {
            let row = self.cursor;
            let Some(rec) = self.rows.get(row) else {
                return Err(Error::ReplayMismatch {
                    row,
                    reason: format!("score file ends after {} rows", self.rows.len()),
                });
            };
            if rec.instance != *inst {
                return Err(Error::ReplayMismatch {
                    row,
                    reason: format!("expected {:?}, found {:?}", inst, rec.instance),
                });
            }
            out.push(rec.score);
            self.cursor += 1;
        }
        Ok(out)
    }

    fn observe_chunk(&mut self, _ctx: &ChunkContext, _edges: &[TemporalEdge]) {}

    fn finish(&mut self) -> Result<()> {
        if self.cursor != self.rows.len() {
            return Err(Error::ReplayMismatch {
                row: self.cursor,
                reason: format!("{} score rows left unused", self.rows.len() - self.cursor),
            });
        }
        Ok(())
    }

    fn describe(&self) -> Vec<(String, String)> {
        alloc::vec![
            ("forecaster".to_string(), "replay".to_string()),
            ("rows".to_string(), format!("{}", self.rows.len())),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Label;
    use alloc::vec;

    fn ctx(ordinal: i64, after: Timestamp) -> ChunkContext {
        ChunkContext {
            ordinal,
            bounds: ChunkBounds::Window {
                after,
                through: after + 10,
            },
            piece: 0,
            pieces: 1,
        }
    }

    fn query(src: u32, dst: u32, t: Timestamp) -> EvalInstance {
        EvalInstance {
            chunk: 0,
            src,
            dst,
            t,
            label: Label::Positive,
        }
    }

    #[test]
    fn unlimited_memory() {
        let mut eb = EdgeBank::new(EdgeBankConfig::Unlimited);
        eb.begin(&[TemporalEdge::new(0, 1, 1)]);
        let s = eb
            .score_chunk(&ctx(0, 5), &[query(0, 1, 6), query(0, 2, 6)])
            .unwrap();
        assert_eq!(s, vec![1.0, 0.0]);
    }

    #[test]
    fn time_window_memory() {
        let resolved = derive_edgebank_params(
            &[TemporalEdge::new(0, 1, 5)],
            EdgeBankConfig::TimeWindow {
                policy: WindowPolicy::Fixed { duration: 10.0 },
            },
        )
        .unwrap();
        let mut eb = EdgeBank::with_resolved(resolved);
        eb.begin(&[TemporalEdge::new(0, 1, 5)]);
        assert_eq!(eb.score(&(0, 1), 20), 0.0);
        assert_eq!(eb.score(&(0, 1), 12), 1.0);
    }

    #[test]
    fn repeat_threshold_memory() {
        let mut eb = EdgeBank::new(EdgeBankConfig::RepeatThreshold {
            threshold: Threshold::Count { k: 2 },
        });
        eb.begin(&[TemporalEdge::new(0, 1, 1)]);
        assert_eq!(eb.score(&(0, 1), 5), 0.0);
        eb.observe_chunk(&ctx(0, 5), &[TemporalEdge::new(0, 1, 6)]);
        assert_eq!(eb.score(&(0, 1), 15), 1.0);
    }

    #[test]
    fn derived_parameters() {
        let span100 = [TemporalEdge::new(0, 1, 0), TemporalEdge::new(1, 2, 100)];
        let r = derive_edgebank_params(
            &span100,
            EdgeBankConfig::TimeWindow {
                policy: WindowPolicy::FixedProportion { p: 0.25 },
            },
        )
        .unwrap();
        assert_eq!(r.memory, ResolvedMemory::TimeWindow { window: 25.0 });

        // pair (0,1) gaps 2 then 4
        let repeats = [
            TemporalEdge::new(0, 1, 0),
            TemporalEdge::new(0, 1, 2),
            TemporalEdge::new(2, 3, 3),
            TemporalEdge::new(0, 1, 6),
        ];
        let r = derive_edgebank_params(
            &repeats,
            EdgeBankConfig::TimeWindow {
                policy: WindowPolicy::RepeatInterval,
            },
        )
        .unwrap();
        assert_eq!(r.memory, ResolvedMemory::TimeWindow { window: 3.0 });
        assert!(r.warnings.is_empty());

        let r = derive_edgebank_params(
            &span100,
            EdgeBankConfig::TimeWindow {
                policy: WindowPolicy::RepeatInterval,
            },
        )
        .unwrap();
        assert_eq!(r.memory, ResolvedMemory::TimeWindow { window: 100.0 });
        assert_eq!(r.warnings.len(), 1);

        let r = derive_edgebank_params(
            &span100,
            EdgeBankConfig::RepeatThreshold {
                threshold: Threshold::DerivedMean,
            },
        )
        .unwrap();
        assert_eq!(r.memory, ResolvedMemory::RepeatThreshold { k: 1 });
        let r = derive_edgebank_params(
            &repeats,
            EdgeBankConfig::RepeatThreshold {
                threshold: Threshold::DerivedMean,
            },
        )
        .unwrap();
        // 4 edges over 2 distinct pairs
        assert_eq!(r.memory, ResolvedMemory::RepeatThreshold { k: 2 });
        assert!(derive_edgebank_params(&[], EdgeBankConfig::Unlimited).is_err());
    }

    #[test]
    fn recency_scores() {
        let mut r = RecencyForecaster::new(10.0).unwrap();
        r.begin(&[TemporalEdge::new(0, 1, 5)]);
        assert_eq!(r.score(&(0, 1), 5), 1.0);
        assert_eq!(r.score(&(1, 0), 5), 0.0);
        assert!((r.score(&(0, 1), 15) - libm::exp(-1.0)).abs() < 1e-15);
        assert!((r.score(&(0, 1), 15) - 0.3679).abs() < 1e-4);
        assert!(RecencyForecaster::new(0.0).is_err());
    }

    #[test]
    fn replay_detects_divergence() {
        let rows = vec![
            ScoredInstance {
                instance: query(0, 1, 3),
                score: 0.5,
            },
            ScoredInstance {
                instance: query(1, 2, 3),
                score: 0.25,
            },
        ];
        let mut r = ReplayForecaster::new(rows.clone()).unwrap();
        r.begin(&[]);
        assert_eq!(
            r.score_chunk(&ctx(0, 0), &[query(0, 1, 3), query(1, 2, 3)])
                .unwrap(),
            vec![0.5, 0.25]
        );
        r.finish().unwrap();

        let mut r = ReplayForecaster::new(rows.clone()).unwrap();
        let err = r.score_chunk(&ctx(0, 0), &[query(1, 2, 3)]).unwrap_err();
        assert!(matches!(err, Error::ReplayMismatch { row: 0, .. }));

        let mut r = ReplayForecaster::new(rows).unwrap();
        r.score_chunk(&ctx(0, 0), &[query(0, 1, 3)]).unwrap();
        assert!(matches!(
            r.finish(),
            Err(Error::ReplayMismatch { row: 1, .. })
        ));

        let bad = vec![ScoredInstance {
            instance: query(0, 1, 3),
            score: f64::INFINITY,
        }];
        assert!(matches!(
            ReplayForecaster::new(bad),
            Err(Error::NonFiniteScore { index: 0 })
        ));
    }

    #[test]
    fn guard_sequence() {
        let mut g = ContractGuard::new();
        assert!(g.score(0).is_err());
        g.begin().unwrap();
        assert!(g.observe(0).is_err());
        g.score(0).unwrap();
        g.score(0).unwrap();
        assert!(g.score(1).is_err());
        g.observe(0).unwrap();
        assert!(g.score(0).is_err());
        g.score(2).unwrap();
        assert!(g.finish().is_err());
        g.observe(2).unwrap();
        g.finish().unwrap();
    }
}
