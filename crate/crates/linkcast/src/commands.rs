//! The command implementations behind the CLI.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use linkcast_core::baselines::{
    EdgeBank, Forecaster, RecencyForecaster, ReplayForecaster, ScoredInstance,
};
use linkcast_core::chunking::{chunk_stats, AnchorRule, ChunkScheme, ChunkStats};
use linkcast_core::evaluation::{
    evaluate, format_change, leak_probe, plan_evaluation, report_diff, LeakProbeReport,
    MetricReport, ReportDiff,
};
use linkcast_core::info::{
    sweep_point, window_batch_nmi, NmiCurve, NmiReport, SweepKind, SweepPoint,
};
use linkcast_core::sampling::generate_instances;
use linkcast_core::{ChronologicalSplit, DatasetStats, Timestamp};
use serde::{Deserialize, Serialize};

use crate::config::{Aggregation, ForecasterKind, RunConfig};
use crate::edgelist::{load_edge_list, EdgeListFormat, LoadedGraph};
use crate::error::{Error, Result};
use crate::files::{self, InstanceHeader, SplitRatios};
use crate::output::OutputDir;
use crate::svg::{LineChart, Series};

pub const TOOL: &str = "linkcast";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where a graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub input: PathBuf,
    pub format: String,
    pub resolution: Timestamp,
}

impl InputSpec {
    pub fn load(&self) -> Result<LoadedGraph> {
        let format: EdgeListFormat = self.format.parse().map_err(Error::Usage)?;
        let g = load_edge_list(&self.input, &format, self.resolution)?;
        log::info!(
            "loaded {}: {} nodes, {} edges",
            self.input.display(),
            g.graph.node_count(),
            g.graph.edge_count()
        );
        Ok(g)
    }
}

impl RunConfig {
    pub fn input_spec(&self) -> InputSpec {
        InputSpec {
            input: self.input.clone(),
            format: self.format.clone(),
            resolution: self.resolution,
        }
    }
}

/// Runs `f` over `items` on up to `threads` scoped threads, keeping order.
fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let per = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(per)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn split_warnings(split: &ChronologicalSplit) -> Vec<String> {
    let mut w = Vec::new();
    if let (true, Some(t)) = (split.straddles_val_boundary(), split.t_val) {
        w.push(format!(
            "timestamp {t} is shared by train and validation edges"
        ));
    }
    if let (true, Some(t)) = (split.straddles_test_boundary(), split.t_test) {
        w.push(format!(
            "timestamp {t} is shared by pre-test and test edges; the count-based split cuts a snapshot"
        ));
    }
    for msg in &w {
        log::warn!("{msg}");
    }
    w
}

// ---------------------------------------------------------------- stats

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    pub input: InputSpec,
    pub stats: DatasetStats,
    pub t_min: Timestamp,
    pub t_max: Timestamp,
    pub activity_bin_width: Timestamp,
    /// Distribution of edges per distinct timestamp.
    pub snapshot_sizes: ChunkStats,
}

pub fn cmd_stats(input: &InputSpec, bin_width: Timestamp, out: &Path) -> Result<StatsReport> {
    let lg = input.load()?;
    let g = &lg.graph;
    let sizes: Vec<f64> = g.snapshot_groups().iter().map(|s| s.len() as f64).collect();
    let snapshot_sizes = ChunkStats {
        measure: linkcast_core::chunking::ChunkMeasure::Size,
        summary: linkcast_core::chunking::Summary::of(&sizes),
        histogram: linkcast_core::chunking::histogram(&sizes, 20),
        values: Vec::new(),
    };
    let activity = g.activity_histogram(bin_width)?;
    let report = StatsReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        fingerprint: lg.fingerprint.clone(),
        input: input.clone(),
        stats: g.stats(),
        t_min: g.t_min(),
        t_max: g.t_max(),
        activity_bin_width: bin_width,
        snapshot_sizes,
    };
    let chart = LineChart {
        title: "Edges per time bin".into(),
        x_label: "time".into(),
        y_label: "edges".into(),
        log_x: false,
        y_range: None,
        series: vec![Series {
            name: "edges".into(),
            points: activity
                .iter()
                .map(|&(t, n)| (t as f64, Some(n as f64)))
                .collect(),
        }],
    };
    let mut dir = OutputDir::create(out)?;
    dir.write_json("stats.json", &report)?;
    dir.write("activity.csv", files::render_activity(&activity).as_bytes())?;
    dir.write("activity.svg", chart.render().as_bytes())?;
    dir.commit();
    Ok(report)
}

pub fn render_stats(r: &StatsReport) -> String {
    let s = &r.stats;
    format!(
        "nodes {}\nedges {}\nduration {}\ndistinct timestamps {}\nedges per timestamp {:.1} ± {:.1} (max {})\ntemporal density T/m {:.4}\n",
        s.nodes,
        s.edges,
        s.duration,
        s.distinct_timestamps,
        s.edges_per_timestamp_mean,
        s.edges_per_timestamp_std,
        s.max_edges_per_timestamp,
        s.temporal_density
    )
}

// ---------------------------------------------------------------- nmi

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmiSweepReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    pub input: InputSpec,
    pub curves: Vec<NmiCurve>,
}

fn sweep(
    g: &linkcast_core::TemporalGraph,
    kind: SweepKind,
    grid: &[i64],
    threads: usize,
) -> Result<NmiCurve> {
    let points: Vec<Result<SweepPoint, _>> =
        parallel_map(grid, threads, |&p| sweep_point(g, kind, p));
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(NmiCurve::from_points(kind, points)?)
}

pub fn cmd_nmi(
    input: &InputSpec,
    batch_grid: Option<&[i64]>,
    window_grid: Option<&[i64]>,
    anchor: AnchorRule,
    threads: usize,
    out: &Path,
) -> Result<NmiSweepReport> {
    let lg = input.load()?;
    let mut curves = Vec::new();
    let mut dir = OutputDir::create(out)?;
    let mut series = Vec::new();
    for (name, kind, grid) in [
        ("batch", SweepKind::Batch, batch_grid),
        ("window", SweepKind::Window { anchor }, window_grid),
    ] {
        let Some(grid) = grid else { continue };
        if grid.is_empty() {
            return Err(linkcast_core::Error::EmptyGrid.into());
        }
        let curve = sweep(&lg.graph, kind, grid, threads)?;
        dir.write(
            &format!("nmi_{name}.csv"),
            files::render_sweep(&curve).as_bytes(),
        )?;
        series.push(Series {
            name: name.into(),
            points: curve
                .points
                .iter()
                .map(|p| (p.parameter as f64, Some(p.report.value)))
                .collect(),
        });
        curves.push(curve);
    }
    let chart = LineChart {
        title: "Timestamp NMI".into(),
        x_label: "batch size / horizon".into(),
        y_label: "NMI".into(),
        log_x: true,
        y_range: Some((0.0, 1.0)),
        series,
    };
    let report = NmiSweepReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        fingerprint: lg.fingerprint.clone(),
        input: input.clone(),
        curves,
    };
    dir.write("nmi.svg", chart.render().as_bytes())?;
    dir.write_json("nmi.json", &report)?;
    dir.commit();
    Ok(report)
}

pub fn render_nmi(r: &NmiSweepReport) -> String {
    let mut s = String::new();
    for c in &r.curves {
        let name = match c.kind {
            SweepKind::Batch => "batch",
            SweepKind::Window { .. } => "window",
        };
        let _ = writeln!(s, "{name:<8} {:>12} {:>8}", "parameter", "nmi");
        for p in &c.points {
            let _ = writeln!(s, "{:<8} {:>12} {:>8.4}", "", p.parameter, p.report.value);
        }
        let best = c.best_point();
        let _ = writeln!(s, "max {:.4} at {}", best.report.value, best.parameter);
    }
    s
}

// ---------------------------------------------------------------- chunks

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeRange {
    All,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeChunks {
    pub name: String,
    pub scheme: ChunkScheme,
    pub occupied: usize,
    pub empty: u64,
    pub stats: ChunkStats,
    pub timestamp_nmi: NmiReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunksReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    pub input: InputSpec,
    pub range: EdgeRange,
    pub edges: usize,
    pub schemes: Vec<SchemeChunks>,
    /// NMI between window and batch ordinals when both schemes ran.
    pub window_batch_nmi: Option<NmiReport>,
}

pub fn cmd_chunks(
    cfg: &RunConfig,
    range: EdgeRange,
    bins: usize,
    out: &Path,
) -> Result<ChunksReport> {
    let lg = cfg.input_spec().load()?;
    let g = &lg.graph;
    let edges = match range {
        EdgeRange::All => 0..g.edge_count(),
        EdgeRange::Test => {
            let split = g.chronological_split(cfg.train_ratio, cfg.val_ratio)?;
            split_warnings(&split);
            split.test()
        }
    };
    if edges.is_empty() {
        return Err(linkcast_core::Error::EmptyTest.into());
    }
    let mut dir = OutputDir::create(out)?;
    let mut schemes = Vec::new();
    let mut assignments = Vec::new();
    for (name, scheme) in cfg.schemes()? {
        let a = scheme.assign(g.edges(), edges.clone())?;
        dir.write(
            &format!("chunks_{name}.csv"),
            files::render_chunk_export(g, &a).as_bytes(),
        )?;
        let t: Vec<i64> = g.edges()[edges.clone()].iter().map(|e| e.t).collect();
        schemes.push(SchemeChunks {
            name: name.into(),
            scheme,
            occupied: a.occupied().len(),
            empty: a.empty_count(),
            stats: chunk_stats(&a, bins),
            timestamp_nmi: linkcast_core::info::nmi(&t, &a.ordinals())?,
        });
        assignments.push(a);
    }
    let window_batch_nmi = match &assignments[..] {
        [batch, window] => Some(window_batch_nmi(window, batch)?),
        _ => None,
    };
    let report = ChunksReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        fingerprint: lg.fingerprint.clone(),
        input: cfg.input_spec(),
        range,
        edges: edges.len(),
        schemes,
        window_batch_nmi,
    };
    dir.write_json("chunks.json", &report)?;
    dir.commit();
    Ok(report)
}

pub fn render_chunks(r: &ChunksReport) -> String {
    let mut s = String::new();
    for c in &r.schemes {
        let _ = write!(s, "{}: {} occupied, {} empty", c.name, c.occupied, c.empty);
        if let Some(sum) = &c.stats.summary {
            let what = match c.stats.measure {
                linkcast_core::chunking::ChunkMeasure::Duration => "duration",
                linkcast_core::chunking::ChunkMeasure::Size => "size",
            };
            let _ = write!(
                s,
                ", {what} {:.1} ± {:.1} [{}, {}]",
                sum.mean, sum.std, sum.min, sum.max
            );
        }
        let _ = writeln!(s, ", timestamp NMI {:.4}", c.timestamp_nmi.value);
    }
    if let Some(n) = &r.window_batch_nmi {
        let _ = writeln!(s, "window-batch NMI {:.4}", n.value);
    }
    s
}

// ---------------------------------------------------------------- pipeline

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub train_edges: usize,
    pub val_edges: usize,
    pub test_edges: usize,
    pub t_val: Option<Timestamp>,
    pub t_test: Option<Timestamp>,
    pub history_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSummary {
    pub instances: usize,
    pub negatives_from_pool: usize,
    pub negatives_from_random: usize,
    /// Chunks whose pool ran short and fell back to random pairs.
    pub fallback_chunks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub aggregation: Aggregation,
    pub auc: Option<f64>,
    pub ap: Option<f64>,
}

/// The evaluation of one scheme, with its full provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    pub config: RunConfig,
    pub scheme_name: String,
    pub scheme: ChunkScheme,
    pub split: SplitSummary,
    pub occupied_chunks: usize,
    pub empty_chunks: u64,
    pub sampling: SamplingSummary,
    pub headline: Headline,
    pub metrics: MetricReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    /// Relative change of `value` over `baseline`, in percent.
    pub value: String,
    pub baseline: String,
    pub diff: ReportDiff,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub reports: Vec<SchemeReport>,
    pub diff: Option<DiffReport>,
    pub files: Vec<PathBuf>,
}

fn make_forecaster(
    cfg: &RunConfig,
    replay: Option<Vec<ScoredInstance>>,
) -> Result<Box<dyn Forecaster>> {
    Ok(match cfg.forecaster {
        ForecasterKind::Edgebank => Box::new(EdgeBank::new(cfg.edgebank)),
        ForecasterKind::Recency => Box::new(RecencyForecaster::new(cfg.decay())?),
        ForecasterKind::Replay => {
            let rows = replay
                .ok_or_else(|| Error::Usage("the replay forecaster needs --scores".into()))?;
            Box::new(ReplayForecaster::new(rows)?)
        }
    })
}

struct SchemeRun {
    report: SchemeReport,
    instances: Vec<u8>,
    scores: Vec<u8>,
    series: String,
}

fn headline(metrics: &MetricReport, aggregation: Aggregation) -> Headline {
    let (auc, ap) = match aggregation {
        Aggregation::Macro => (metrics.macro_auc, metrics.macro_ap),
        Aggregation::Micro => (metrics.micro_auc, metrics.micro_ap),
    };
    Headline {
        aggregation,
        auc,
        ap,
    }
}

fn header_for(lg: &LoadedGraph, cfg: &RunConfig, scheme: ChunkScheme) -> InstanceHeader {
    InstanceHeader {
        fingerprint: lg.fingerprint.clone(),
        scheme,
        split: SplitRatios {
            train_ratio: cfg.train_ratio,
            val_ratio: cfg.val_ratio,
        },
        sampler: cfg.sampler_spec(),
    }
}

fn run_scheme(
    lg: &LoadedGraph,
    cfg: &RunConfig,
    split: &ChronologicalSplit,
    name: &str,
    scheme: ChunkScheme,
    replay: Option<&Path>,
    warnings: &[String],
) -> Result<SchemeRun> {
    let g = &lg.graph;
    let spec = cfg.sampler_spec();
    let header = header_for(lg, cfg, scheme);
    let replay_rows = match replay {
        Some(path) => {
            let (got, rows) = files::read_scores(path, lg)?;
            files::check_echo(&header, &got, path)?;
            Some(rows)
        }
        None => None,
    };
    let assignment = scheme.assign(g.edges(), split.test())?;
    let set = generate_instances(g, split, &assignment, &spec)?;
    let plan = plan_evaluation(g, split, &assignment, &set);
    let mut forecaster = make_forecaster(cfg, replay_rows)?;
    let evaluation = evaluate(&mut forecaster, &plan, cfg.max_piece)?;
    let metrics = evaluation.report;
    if metrics.evaluable_chunks == 0 {
        return Err(Error::NotEvaluable(format!(
            "{name}: none of {} chunks has both positive and negative instances",
            metrics.per_chunk.len()
        )));
    }
    let sampling = SamplingSummary {
        instances: set.instances.len(),
        negatives_from_pool: set.chunks.iter().map(|c| c.from_pool).sum(),
        negatives_from_random: set.chunks.iter().map(|c| c.from_random).sum(),
        fallback_chunks: set
            .chunks
            .iter()
            .filter(|c| c.pool_available.is_some() && c.from_random > 0)
            .count(),
    };
    if sampling.fallback_chunks > 0 {
        log::info!(
            "{name}: {} chunk(s) topped up with random negatives",
            sampling.fallback_chunks
        );
    }
    let report = SchemeReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        fingerprint: lg.fingerprint.clone(),
        config: cfg.clone(),
        scheme_name: name.into(),
        scheme,
        split: SplitSummary {
            train_edges: split.train().len(),
            val_edges: split.val().len(),
            test_edges: split.test().len(),
            t_val: split.t_val,
            t_test: split.t_test,
            history_edges: plan.history.len(),
        },
        occupied_chunks: assignment.occupied().len(),
        empty_chunks: assignment.empty_count(),
        sampling,
        headline: headline(&metrics, cfg.headline),
        metrics,
        warnings: warnings.to_vec(),
    };
    Ok(SchemeRun {
        instances: files::render_instances(&header, lg, &set.instances),
        scores: files::render_scores(&header, lg, &set.instances, &evaluation.scores),
        series: files::render_series(&report.metrics),
        report,
    })
}

fn diff_report(fingerprint: &str, value: &SchemeReport, baseline: &SchemeReport) -> DiffReport {
    DiffReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        fingerprint: fingerprint.into(),
        value: value.scheme_name.clone(),
        baseline: baseline.scheme_name.clone(),
        diff: report_diff(&value.metrics, &baseline.metrics),
    }
}

/// Split, chunk, sample, score, evaluate and write every artifact of the run.
pub fn cmd_pipeline(
    cfg: &RunConfig,
    replay: Option<&Path>,
    threads: usize,
    out: &Path,
) -> Result<PipelineOutcome> {
    let schemes = cfg.schemes()?;
    if replay.is_some() && schemes.len() != 1 {
        return Err(Error::Usage(
            "a score file belongs to one scheme; pick --scheme batch or window".into(),
        ));
    }
    let lg = cfg.input_spec().load()?;
    let split = lg
        .graph
        .chronological_split(cfg.train_ratio, cfg.val_ratio)?;
    let warnings = split_warnings(&split);
    let runs = parallel_map(&schemes, threads, |&(name, scheme)| {
        run_scheme(&lg, cfg, &split, name, scheme, replay, &warnings)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut dir = OutputDir::create(out)?;
    let mut series = Vec::new();
    for run in &runs {
        let name = &run.report.scheme_name;
        dir.write(&format!("instances_{name}.csv"), &run.instances)?;
        dir.write(&format!("scores_{name}.csv"), &run.scores)?;
        dir.write(&format!("series_{name}.csv"), run.series.as_bytes())?;
        dir.write_json(&format!("report_{name}.json"), &run.report)?;
        series.push(Series {
            name: name.clone(),
            points: run
                .report
                .metrics
                .per_chunk
                .iter()
                .map(|c| (c.t_mid, c.auc))
                .collect(),
        });
    }
    let chart = LineChart {
        title: "AUC-ROC per chunk".into(),
        x_label: "chunk midpoint time".into(),
        y_label: "AUC-ROC".into(),
        log_x: false,
        y_range: Some((0.0, 1.0)),
        series,
    };
    dir.write("auc_over_time.svg", chart.render().as_bytes())?;
    let diff = match &runs[..] {
        [batch, window] => {
            let d = diff_report(&lg.fingerprint, &window.report, &batch.report);
            dir.write_json("diff.json", &d)?;
            dir.write("diff.txt", render_diff(&d).as_bytes())?;
            Some(d)
        }
        _ => None,
    };
    let files = dir.commit();
    Ok(PipelineOutcome {
        reports: runs.into_iter().map(|r| r.report).collect(),
        diff,
        files,
    })
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{:.1}", 100.0 * v))
}

pub fn render_scheme(r: &SchemeReport) -> String {
    let m = &r.metrics;
    let (head, other, auc, ap) = match r.headline.aggregation {
        Aggregation::Macro => ("macro", "micro", m.micro_auc, m.micro_ap),
        Aggregation::Micro => ("micro", "macro", m.macro_auc, m.macro_ap),
    };
    format!(
        "{}: {head} AUC {} AP {} | {other} AUC {} AP {} | {} evaluable, {} skipped chunks\n",
        r.scheme_name,
        pct(r.headline.auc),
        pct(r.headline.ap),
        pct(auc),
        pct(ap),
        m.evaluable_chunks,
        m.skipped_chunks
    )
}

pub fn render_diff(d: &DiffReport) -> String {
    let mut s = format!("{} relative to {}\n", d.value, d.baseline);
    for row in &d.diff.rows {
        let change = match row.change_pct {
            Some(c) if !row.flagged => format_change(c),
            _ => "n/a".into(),
        };
        let _ = writeln!(
            s,
            "{:<10} {:>6} {:>6} {:>8}",
            row.metric,
            pct(row.value),
            pct(row.baseline),
            change
        );
    }
    if let (Some(mu), Some(sd)) = (d.diff.mean_abs_change, d.diff.std_abs_change) {
        let _ = writeln!(s, "|change| {mu:.1} ± {sd:.1}");
    }
    s
}

// ---------------------------------------------------------------- leak-test

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    pub config: RunConfig,
    pub probe: LeakProbeReport,
}

pub fn cmd_leak_test(cfg: &RunConfig, out: &Path) -> Result<LeakReport> {
    let make = || -> Result<Box<dyn Forecaster>> {
        match cfg.forecaster {
            ForecasterKind::Replay => Err(Error::Usage(
                "recorded scores cannot follow a shuffled graph; use edgebank or recency".into(),
            )),
            _ => make_forecaster(cfg, None),
        }
    };
    make()?;
    let lg = cfg.input_spec().load()?;
    let split = lg
        .graph
        .chronological_split(cfg.train_ratio, cfg.val_ratio)?;
    split_warnings(&split);
    let probe = leak_probe(
        || make().expect("checked above"),
        &lg.graph,
        &split,
        cfg.batch_scheme()?,
        cfg.window_scheme()?,
        &cfg.sampler_spec(),
        cfg.shuffle_seed,
        cfg.max_piece,
    )?;
    let report = LeakReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        fingerprint: lg.fingerprint.clone(),
        config: cfg.clone(),
        probe,
    };
    let mut dir = OutputDir::create(out)?;
    dir.write_json("leak.json", &report)?;
    dir.write("leak.txt", render_leak(&report).as_bytes())?;
    dir.commit();
    Ok(report)
}

pub fn render_leak(r: &LeakReport) -> String {
    let mut s = format!(
        "shuffle seed {}, sampler seed {}\n{:<8} {:>10} {:>10} {:>8}\n",
        r.probe.shuffle_seed, r.probe.sampler_seed, "scheme", "original", "shuffled", "change"
    );
    for (name, p) in [("batch", &r.probe.batch), ("window", &r.probe.window)] {
        let change = p
            .diff
            .rows
            .iter()
            .find(|row| row.metric == "macro_auc")
            .and_then(|row| row.change_pct)
            .map_or_else(|| "n/a".into(), format_change);
        let _ = writeln!(
            s,
            "{name:<8} {:>10} {:>10} {change:>8}",
            pct(p.original.macro_auc),
            pct(p.shuffled.macro_auc)
        );
    }
    s
}

// ---------------------------------------------------------------- diff

pub fn read_scheme_report(path: &Path) -> Result<SchemeReport> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: format!("not a scheme report: {e}"),
    })
}

/// Relative change of `value` over `baseline`; both must come from the same input.
pub fn cmd_diff(value: &Path, baseline: &Path, out: Option<&Path>) -> Result<DiffReport> {
    let a = read_scheme_report(value)?;
    let b = read_scheme_report(baseline)?;
    if a.fingerprint != b.fingerprint {
        return Err(Error::FingerprintMismatch {
            left: a.fingerprint,
            right: b.fingerprint,
        });
    }
    let d = diff_report(&a.fingerprint, &a, &b);
    if let Some(out) = out {
        crate::output::write_json(out, &d)?;
    }
    Ok(d)
}

// ---------------------------------------------------------------- evaluate

/// Scores an instance file with an external score file, after checking that
/// both belong to `input` and that the instances are the ones the recorded
/// settings generate.
pub fn cmd_evaluate(
    input: &InputSpec,
    instances: &Path,
    scores: &Path,
    out: &Path,
) -> Result<SchemeReport> {
    let lg = input.load()?;
    let (header, rows) = files::read_instances(instances, &lg)?;
    if header.fingerprint != lg.fingerprint {
        return Err(Error::FingerprintMismatch {
            left: header.fingerprint,
            right: lg.fingerprint.clone(),
        });
    }
    let g = &lg.graph;
    let split = g.chronological_split(header.split.train_ratio, header.split.val_ratio)?;
    let warnings = split_warnings(&split);
    let assignment = header.scheme.assign(g.edges(), split.test())?;
    let set = generate_instances(g, &split, &assignment, &header.sampler)?;
    if let Some(row) =
        (0..rows.len().max(set.instances.len())).find(|&i| rows.get(i) != set.instances.get(i))
    {
        return Err(Error::Format {
            path: instances.to_path_buf(),
            message: format!(
                "row {} differs from the stream its header describes",
                row + 1
            ),
        });
    }
    let (name, batch_size, horizon, anchor) = match header.scheme {
        ChunkScheme::Batch { size } => ("batch", Some(size), None, AnchorRule::default()),
        ChunkScheme::Window { horizon, anchor } => ("window", None, Some(horizon), anchor),
    };
    let cfg = RunConfig {
        input: input.input.clone(),
        format: input.format.clone(),
        resolution: input.resolution,
        train_ratio: header.split.train_ratio,
        val_ratio: header.split.val_ratio,
        scheme: if name == "batch" {
            crate::config::SchemeChoice::Batch
        } else {
            crate::config::SchemeChoice::Window
        },
        batch_size,
        horizon,
        anchor,
        sampler: header.sampler.kind,
        negatives_per_positive: header.sampler.negatives_per_positive,
        collision: header.sampler.collision,
        bipartite: header.sampler.bipartite,
        seed: None,
        sampler_seed: header.sampler.seed,
        shuffle_seed: 0,
        forecaster: ForecasterKind::Replay,
        edgebank_mode: String::new(),
        edgebank: linkcast_core::baselines::EdgeBankConfig::Unlimited,
        recency_decay: None,
        max_piece: None,
        headline: Aggregation::Macro,
    };
    let run = run_scheme(
        &lg,
        &cfg,
        &split,
        name,
        header.scheme,
        Some(scores),
        &warnings,
    )?;
    let mut dir = OutputDir::create(out)?;
    dir.write(&format!("series_{name}.csv"), run.series.as_bytes())?;
    dir.write_json(&format!("report_{name}.json"), &run.report)?;
    dir.commit();
    Ok(run.report)
}
