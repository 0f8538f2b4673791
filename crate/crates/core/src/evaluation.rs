//! The score-then-observe evaluation loop, per-chunk and aggregate metrics,
//! the intra-snapshot shuffle probe, and relative-change tables.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::baselines::{ChunkContext, ContractGuard, Forecaster};
use crate::chunking::{subdivide, ChunkAssignment, ChunkBounds, ChunkScheme};
use crate::error::{Error, Result};
use crate::graph::{ChronologicalSplit, TemporalEdge, TemporalGraph};
use crate::metrics::{auc_roc, average_precision};
use crate::numeric::{mean_std, CompensatedSum};
use crate::rng::{seeded, shuffle};
use crate::sampling::{generate_instances, EvalInstance, InstanceSet, SamplerSpec};

/// One logical chunk ready for evaluation.
#[derive(Debug, Clone)]
pub struct EvalChunk<'a> {
    pub ordinal: i64,
    pub bounds: ChunkBounds,
    pub instances: &'a [EvalInstance],
    /// Real edges the forecaster observes after scoring this chunk.
    pub observe: Vec<TemporalEdge>,
}

#[derive(Debug, Clone)]
pub struct EvalPlan<'a> {
    /// Edges known before the first chunk.
    pub history: &'a [TemporalEdge],
    pub chunks: Vec<EvalChunk<'a>>,
}

/// Lays out the evaluation of a test-range assignment.
///
/// Batches follow edge order: every edge before the test range is history.
/// Windows follow time: history is cut at the first window's start, and
/// pre-test edges that fall inside the first window are observed together
/// with it, so a window never sees edges from its own time span.
pub fn plan_evaluation<'a>(
    g: &'a TemporalGraph,
    split: &ChronologicalSplit,
    assignment: &ChunkAssignment,
    set: &'a InstanceSet,
) -> EvalPlan<'a> {
    let edges = g.edges();
    let pre_test = &edges[split.history()];
    let occupied = assignment.occupied();
    debug_assert_eq!(occupied.len(), set.chunks.len());

    let (history, deferred): (&[TemporalEdge], &[TemporalEdge]) =
        match (assignment.scheme(), occupied.first()) {
            (ChunkScheme::Window { .. }, Some(first)) => {
                let cutoff = first.bounds.reference_time();
                let keep = pre_test.partition_point(|e| e.t <= cutoff);
                pre_test.split_at(keep)
            }
            _ => (pre_test, &[]),
        };

    let chunks = occupied
        .iter()
        .zip(&set.chunks)
        .enumerate()
        .map(|(i, (chunk, sampled))| {
            let mut observe =
                Vec::with_capacity(chunk.len() + if i == 0 { deferred.len() } else { 0 });
            if i == 0 {
                observe.extend_from_slice(deferred);
            }
            observe.extend_from_slice(&edges[chunk.edges.clone()]);
            EvalChunk {
                ordinal: chunk.ordinal,
                bounds: chunk.bounds,
                instances: set.chunk_instances(sampled),
                observe,
            }
        })
        .collect();
    EvalPlan { history, chunks }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkMetrics {
    pub ordinal: i64,
    pub bounds: ChunkBounds,
    pub t_mid: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    /// `None` when the chunk lacks one of the classes.
    pub auc: Option<f64>,
    pub ap: Option<f64>,
}

impl ChunkMetrics {
    pub fn is_evaluable(&self) -> bool {
        self.auc.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_chunk: Vec<ChunkMetrics>,
    /// Mean over evaluable chunks; each time period weighs the same.
    pub macro_auc: Option<f64>,
    pub macro_ap: Option<f64>,
    /// Pooled over every instance.
    pub micro_auc: Option<f64>,
    pub micro_ap: Option<f64>,
    pub evaluable_chunks: usize,
    pub skipped_chunks: usize,
    pub instances: usize,
    pub forecaster: Vec<(String, String)>,
}

impl MetricReport {
    /// Builds the report from per-chunk labels and scores.
    pub fn from_scores(
        chunks: &[EvalChunk<'_>],
        scores: &[f64],
        forecaster: Vec<(String, String)>,
    ) -> Result<Self> {
        let total: usize = chunks.iter().map(|c| c.instances.len()).sum();
        if total != scores.len() {
            return Err(Error::LengthMismatch {
                left: total,
                right: scores.len(),
            });
        }
        let mut per_chunk = Vec::with_capacity(chunks.len());
        let mut all_labels = Vec::with_capacity(total);
        let mut offset = 0;
        for c in chunks {
            let labels: Vec<bool> = c.instances.iter().map(|i| i.label.is_positive()).collect();
            let s = &scores[offset..offset + labels.len()];
            offset += labels.len();
            let n_pos = labels.iter().filter(|&&l| l).count();
            let n_neg = labels.len() - n_pos;
            let (auc, ap) = if n_pos > 0 && n_neg > 0 {
                (
                    Some(auc_roc(&labels, s)?),
                    Some(average_precision(&labels, s)?),
                )
            } else {
                (None, None)
            };
            per_chunk.push(ChunkMetrics {
                ordinal: c.ordinal,
                bounds: c.bounds,
                t_mid: c.bounds.midpoint(),
                n_pos,
                n_neg,
                auc,
                ap,
            });
            all_labels.extend(labels);
        }
        let macro_of = |pick: fn(&ChunkMetrics) -> Option<f64>| {
            let values: Vec<f64> = per_chunk.iter().filter_map(pick).collect();
            (!values.is_empty()).then(|| {
                values.iter().copied().collect::<CompensatedSum>().value() / values.len() as f64
            })
        };
        let evaluable_chunks = per_chunk.iter().filter(|c| c.is_evaluable()).count();
        Ok(MetricReport {
            macro_auc: macro_of(|c| c.auc),
            macro_ap: macro_of(|c| c.ap),
            micro_auc: auc_roc(&all_labels, scores).ok(),
            micro_ap: average_precision(&all_labels, scores).ok(),
            evaluable_chunks,
            skipped_chunks: per_chunk.len() - evaluable_chunks,
            instances: total,
            per_chunk,
            forecaster,
        })
    }

    /// Per-chunk and aggregate metrics only, ignoring forecaster metadata.
    pub fn same_metrics(&self, other: &MetricReport) -> bool {
        self.per_chunk == other.per_chunk
            && self.macro_auc == other.macro_auc
            && self.macro_ap == other.macro_ap
            && self.micro_auc == other.micro_auc
            && self.micro_ap == other.micro_ap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// One score per instance, in plan order.
    pub scores: Vec<f64>,
    pub report: MetricReport,
}

/// Splits a chunk's instances into pieces of at most `max_piece` positives.
///
/// When the chunk has the generated layout (positives first, then
/// `npp` negatives per positive) each piece carries its positives together with
/// their own negatives; otherwise the instance list is cut contiguously.
fn pieces(instances: &[EvalInstance], max_piece: usize) -> Result<Vec<Vec<usize>>> {
    let k = instances
        .iter()
        .take_while(|i| i.label.is_positive())
        .count();
    let rest = &instances[k..];
    let structured = k > 0
        && !rest.is_empty()
        && rest.len().is_multiple_of(k)
        && rest.iter().all(|i| !i.label.is_positive());
    if !structured {
        return Ok(subdivide(0, 0..instances.len(), max_piece)?
            .into_iter()
            .map(|p| p.edges.collect())
            .collect());
    }
    let npp = rest.len() / k;
    Ok(subdivide(0, 0..k, max_piece)?
        .into_iter()
        .map(|p| {
            let negs: Range<usize> = k + p.edges.start * npp..k + p.edges.end * npp;
            p.edges.chain(negs).collect()
        })
        .collect())
}

/// Runs the score-then-observe loop over `plan`.
///
/// With `max_piece`, each logical chunk is scored in pieces and observed once
/// after its last piece.
pub fn evaluate<F: Forecaster + ?Sized>(
    forecaster: &mut F,
    plan: &EvalPlan<'_>,
    max_piece: Option<usize>,
) -> Result<Evaluation> {
    let mut guard = ContractGuard::new();
    guard.begin()?;
    forecaster.begin(plan.history);
    let total: usize = plan.chunks.iter().map(|c| c.instances.len()).sum();
    let mut scores = Vec::with_capacity(total);
    for chunk in &plan.chunks {
        let layout = match max_piece {
            Some(max) => pieces(chunk.instances, max)?,
            None => alloc::vec![(0..chunk.instances.len()).collect()],
        };
        let base = scores.len();
        scores.resize(base + chunk.instances.len(), f64::NAN);
        let count = layout.len();
        for (piece, idx) in layout.into_iter().enumerate() {
            guard.score(chunk.ordinal)?;
            let ctx = ChunkContext {
                ordinal: chunk.ordinal,
                bounds: chunk.bounds,
                piece,
                pieces: count,
            };
            let batch: Vec<EvalInstance> = idx.iter().map(|&i| chunk.instances[i]).collect();
            let s = forecaster.score_chunk(&ctx, &batch)?;
            if s.len() != batch.len() {
                return Err(Error::ContractViolation(alloc::format!(
                    "chunk {} returned {} scores for {} instances",
                    chunk.ordinal,
                    s.len(),
                    batch.len()
                )));
            }
            for (&i, v) in idx.iter().zip(s) {
                if !v.is_finite() {
                    return Err(Error::NonFiniteScore { index: base + i });
                }
                scores[base + i] = v;
            }
        }
        guard.observe(chunk.ordinal)?;
        let ctx = ChunkContext {
            ordinal: chunk.ordinal,
            bounds: chunk.bounds,
            piece: count.saturating_sub(1),
            pieces: count,
        };
        forecaster.observe_chunk(&ctx, &chunk.observe);
    }
    guard.finish()?;
    forecaster.finish()?;
    let report = MetricReport::from_scores(&plan.chunks, &scores, forecaster.describe())?;
    Ok(Evaluation { scores, report })
}

/// Everything produced by one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub assignment: ChunkAssignment,
    pub instances: InstanceSet,
    pub evaluation: Evaluation,
}

/// Chunk the test range, sample negatives, and evaluate `forecaster`.
pub fn run_protocol<F: Forecaster + ?Sized>(
    g: &TemporalGraph,
    split: &ChronologicalSplit,
    scheme: ChunkScheme,
    spec: &SamplerSpec,
    forecaster: &mut F,
    max_piece: Option<usize>,
) -> Result<ProtocolRun> {
    if split.test().is_empty() {
        return Err(Error::EmptyTest);
    }
    let assignment = scheme.assign(g.edges(), split.test())?;
    let instances = generate_instances(g, split, &assignment, spec)?;
    let plan = plan_evaluation(g, split, &assignment, &instances);
    let evaluation = evaluate(forecaster, &plan, max_piece)?;
    Ok(ProtocolRun {
        assignment,
        instances,
        evaluation,
    })
}

/// Uniformly permutes the edges inside every equal-timestamp group.
pub fn shuffle_within_snapshots(g: &TemporalGraph, seed: u64) -> TemporalGraph {
    let mut rng = seeded(seed);
    let mut edges = g.edges().to_vec();
    for group in g.snapshot_groups() {
        shuffle(&mut edges[group.edges], &mut rng);
    }
    g.with_edges(edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub metric: String,
    pub value: Option<f64>,
    pub baseline: Option<f64>,
    /// `100·(value − baseline)/baseline`; `None` when flagged.
    pub change_pct: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDiff {
    pub rows: Vec<DiffRow>,
    /// Mean and population std of `|change_pct|` over unflagged rows.
    pub mean_abs_change: Option<f64>,
    pub std_abs_change: Option<f64>,
}

/// Relative change in percent, `None` for a zero or missing baseline.
pub fn relative_change(value: Option<f64>, baseline: Option<f64>) -> Option<f64> {
    match (value, baseline) {
        (Some(v), Some(b)) if b != 0.0 => Some(100.0 * (v - b) / b),
        _ => None,
    }
}

/// Mean and population std of the absolute values of `changes`.
pub fn abs_change_summary(changes: &[f64]) -> Option<(f64, f64)> {
    let abs: Vec<f64> = changes.iter().map(|c| c.abs()).collect();
    mean_std(&abs)
}

/// Relative change of `a` with respect to `b` for each aggregate metric.
pub fn report_diff(a: &MetricReport, b: &MetricReport) -> ReportDiff {
    let rows: Vec<DiffRow> = [
        ("macro_auc", a.macro_auc, b.macro_auc),
        ("macro_ap", a.macro_ap, b.macro_ap),
        ("micro_auc", a.micro_auc, b.micro_auc),
        ("micro_ap", a.micro_ap, b.micro_ap),
    ]
    .into_iter()
    .map(|(metric, value, baseline)| {
        let change_pct = relative_change(value, baseline);
        DiffRow {
            metric: metric.to_string(),
            value,
            baseline,
            change_pct,
            flagged: change_pct.is_none(),
        }
    })
    .collect();
    let changes: Vec<f64> = rows.iter().filter_map(|r| r.change_pct).collect();
    let summary = abs_change_summary(&changes);
    ReportDiff {
        rows,
        mean_abs_change: summary.map(|s| s.0),
        std_abs_change: summary.map(|s| s.1),
    }
}

/// Rounds to `decimals` places, resolving exact ties to the even neighbour.
pub fn round_half_even(x: f64, decimals: i32) -> f64 {
    let scale = libm::pow(10.0, decimals as f64);
    let scaled = x * scale;
    let floor = libm::floor(scaled);
    let diff = scaled - floor;
    let rounded = if diff > 0.5 {
        floor + 1.0
    } else if diff < 0.5 || libm::fmod(floor, 2.0) == 0.0 {
        floor
    } else {
        floor + 1.0
    };
    rounded / scale
}

/// `+8.5%` style rendering at one decimal, half-even.
pub fn format_change(pct: f64) -> String {
    let r = round_half_even(pct, 1);
    let r = if r == 0.0 { 0.0 } else { r };
    alloc::format!("{r:+.1}%")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub original: MetricReport,
    pub shuffled: MetricReport,
    /// Shuffled relative to original.
    pub diff: ReportDiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakProbeReport {
    pub shuffle_seed: u64,
    pub sampler_seed: u64,
    pub batch: ProbeResult,
    pub window: ProbeResult,
}

/// Evaluates original and snapshot-shuffled graphs under both schemes with
/// shared sampler seeds.
#[allow(clippy::too_many_arguments)]
pub fn leak_probe<F, M>(
    mut make: M,
    g: &TemporalGraph,
    split: &ChronologicalSplit,
    batch: ChunkScheme,
    window: ChunkScheme,
    spec: &SamplerSpec,
    shuffle_seed: u64,
    max_piece: Option<usize>,
) -> Result<LeakProbeReport>
where
    F: Forecaster,
    M: FnMut() -> F,
{
    let shuffled = shuffle_within_snapshots(g, shuffle_seed);
    let shuffled_split =
        ChronologicalSplit::from_indices(&shuffled, split.train_end_index, split.val_end_index);
    let mut probe = |scheme: ChunkScheme| -> Result<ProbeResult> {
        let original = run_protocol(g, split, scheme, spec, &mut make(), max_piece)?
            .evaluation
            .report;
        let after = run_protocol(
            &shuffled,
            &shuffled_split,
            scheme,
            spec,
            &mut make(),
            max_piece,
        )?
        .evaluation
        .report;
        Ok(ProbeResult {
            diff: report_diff(&after, &original),
            original,
            shuffled: after,
        })
    };
    Ok(LeakProbeReport {
        shuffle_seed,
        sampler_seed: spec.seed,
        batch: probe(batch)?,
        window: probe(window)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{EdgeBank, EdgeBankConfig};
    use crate::sampling::{Label, NegativeKind};
    use alloc::vec;

    #[test]
    fn half_even() {
        assert_eq!(round_half_even(0.25, 1), 0.2);
        assert_eq!(round_half_even(0.75, 1), 0.8);
        assert_eq!(round_half_even(8.527, 1), 8.5);
        assert_eq!(format_change(100.0 * (84.0 - 77.4) / 77.4), "+8.5%");
        assert_eq!(format_change(-0.2), "-0.2%");
        assert_eq!(format_change(-0.01), "+0.0%");
    }

    #[test]
    fn change_summary() {
        let (mean, _) = abs_change_summary(&[8.6, -0.2]).unwrap();
        assert!((mean - 4.4).abs() < 1e-12);
        assert_eq!(relative_change(Some(1.0), Some(0.0)), None);
        assert_eq!(relative_change(Some(1.0), None), None);
    }

    fn chunk(ordinal: i64, items: &[EvalInstance]) -> EvalChunk<'_> {
        EvalChunk {
            ordinal,
            bounds: ChunkBounds::Window {
                after: ordinal * 10,
                through: ordinal * 10 + 10,
            },
            instances: items,
            observe: vec![],
        }
    }

    fn inst(chunk: i64, src: u32, label: Label) -> EvalInstance {
        EvalInstance {
            chunk,
            src,
            dst: src + 1,
            t: chunk * 10 + 1,
            label,
        }
    }

    #[test]
    fn macro_versus_micro() {
        use Label::*;
        let a = [inst(0, 0, Positive), inst(0, 1, Negative)];
        let b = [inst(1, 0, Positive), inst(1, 1, Negative)];
        let chunks = [chunk(0, &a), chunk(1, &b)];
        // chunk 0 perfect, chunk 1 tied
        let report = MetricReport::from_scores(&chunks, &[0.9, 0.1, 0.5, 0.5], vec![]).unwrap();
        assert_eq!(report.per_chunk[0].auc, Some(1.0));
        assert_eq!(report.per_chunk[1].auc, Some(0.5));
        assert_eq!(report.macro_auc, Some(0.75));
        // pooled: pos {0.9, 0.5} vs neg {0.1, 0.5} → (2 + 2 + 0 + 1·½·2)/... = 0.875
        assert_eq!(report.micro_auc, Some(0.875));
    }

    #[test]
    fn single_class_chunks_are_skipped() {
        use Label::*;
        let a = [inst(0, 0, Positive), inst(0, 1, Negative)];
        let b = [inst(1, 0, Positive)];
        let chunks = [chunk(0, &a), chunk(1, &b)];
        let report = MetricReport::from_scores(&chunks, &[1.0, 0.0, 0.3], vec![]).unwrap();
        assert_eq!(report.skipped_chunks, 1);
        assert_eq!(report.evaluable_chunks, 1);
        assert_eq!(report.macro_auc, Some(1.0));
    }

    #[test]
    fn piece_layout_keeps_negatives_with_positives() {
        use Label::*;
        let items = [
            inst(0, 0, Positive),
            inst(0, 1, Positive),
            inst(0, 2, Positive),
            inst(0, 10, Negative),
            inst(0, 11, Negative),
            inst(0, 12, Negative),
        ];
        let p = pieces(&items, 2).unwrap();
        assert_eq!(p, vec![vec![0, 1, 3, 4], vec![2, 5]]);
    }

    #[test]
    fn shuffle_keeps_group_structure() {
        let g = TemporalGraph::from_edges(vec![
            TemporalEdge::new(0, 1, 1),
            TemporalEdge::new(1, 2, 2),
            TemporalEdge::new(2, 3, 2),
            TemporalEdge::new(3, 4, 2),
            TemporalEdge::new(4, 5, 3),
        ])
        .unwrap();
        let s = shuffle_within_snapshots(&g, 4);
        assert_eq!(s, shuffle_within_snapshots(&g, 4));
        let sizes = |g: &TemporalGraph| {
            g.snapshot_groups()
                .iter()
                .map(|x| (x.t, x.len()))
                .collect::<Vec<_>>()
        };
        assert_eq!(sizes(&s), sizes(&g));
        assert_eq!(s.edges()[0], g.edges()[0]);
        assert_eq!(s.edges()[4], g.edges()[4]);

        let unique =
            TemporalGraph::from_edges((0..20).map(|t| TemporalEdge::new(0, 1, t)).collect())
                .unwrap();
        assert_eq!(shuffle_within_snapshots(&unique, 9), unique);
    }

    #[test]
    fn window_plan_defers_same_window_history() {
        // history edge at t=5 shares the first test window (4,6]
        let g = TemporalGraph::from_edges(vec![
            TemporalEdge::new(0, 1, 1),
            TemporalEdge::new(0, 2, 5),
            TemporalEdge::new(0, 3, 5),
            TemporalEdge::new(1, 2, 6),
        ])
        .unwrap();
        let split = ChronologicalSplit::from_indices(&g, 2, 2);
        let a = ChunkScheme::Window {
            horizon: 2,
            anchor: crate::chunking::AnchorRule::RangeStart,
        }
        .assign(g.edges(), split.test())
        .unwrap();
        let set =
            generate_instances(&g, &split, &a, &SamplerSpec::new(NegativeKind::Random, 1)).unwrap();
        let plan = plan_evaluation(&g, &split, &a, &set);
        assert_eq!(plan.history, &g.edges()[..1]);
        assert_eq!(plan.chunks[0].observe.len(), 3);

        let b = ChunkScheme::batch(10)
            .assign(g.edges(), split.test())
            .unwrap();
        let set =
            generate_instances(&g, &split, &b, &SamplerSpec::new(NegativeKind::Random, 1)).unwrap();
        let plan = plan_evaluation(&g, &split, &b, &set);
        assert_eq!(plan.history.len(), 2);

        // EdgeBank must not see (0,2) when scoring the window it occurs in
        let mut eb = EdgeBank::new(EdgeBankConfig::Unlimited);
        let run = run_protocol(
            &g,
            &split,
            a.scheme(),
            &SamplerSpec::new(NegativeKind::Random, 1),
            &mut eb,
            None,
        )
        .unwrap();
        let pos = run
            .instances
            .instances
            .iter()
            .position(|i| i.pair() == (0, 3))
            .unwrap();
        assert_eq!(run.evaluation.scores[pos], 0.0);
    }
}
