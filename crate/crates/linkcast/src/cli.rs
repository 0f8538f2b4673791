//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use linkcast_core::chunking::AnchorRule;
use linkcast_core::sampling::{CollisionPolicy, NegativeKind};
use linkcast_core::Timestamp;

use crate::commands::{self, EdgeRange, InputSpec};
use crate::config::{
    edgebank_mode_string, parse_edgebank_mode, Aggregation, ForecasterKind, RunConfig, SchemeChoice,
};
use crate::edgelist::EdgeListFormat;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "linkcast",
    version,
    about = "Batch and time-window evaluation of temporal link forecasters"
)]
pub struct Cli {
    /// Worker threads for sweeps and multi-scheme runs.
    #[arg(long, global = true, env = "LINKCAST_THREADS", default_value_t = 1)]
    pub threads: usize,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset statistics and the edge activity series.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        /// Activity bin width; defaults to the horizon, else the resolution.
        #[arg(long)]
        bin_width: Option<Timestamp>,
        #[arg(long)]
        horizon: Option<Timestamp>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Timestamp NMI across batch sizes and/or horizons.
    Nmi {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = SchemeChoice::Batch)]
        kind: SchemeChoice,
        /// Batch sizes, comma separated [default: 1,2,4,...,1024].
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<i64>>,
        /// Horizons, comma separated [default: resolution × 1,2,4,...,1024].
        #[arg(long, value_delimiter = ',')]
        window_grid: Option<Vec<i64>>,
        #[arg(long, value_enum, default_value_t = Anchor::RangeStart)]
        anchor: Anchor,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Chunk assignment export and chunk duration / size statistics.
    Chunks {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, value_enum, default_value_t = EdgeRange::Test)]
        range: EdgeRange,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// End-to-end evaluation: instances, scores, reports, series and charts.
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Score file replayed by `--forecaster replay`.
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-evaluates after shuffling edges inside each timestamp.
    LeakTest {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Relative change between two scheme reports of the same input.
    Diff {
        value: PathBuf,
        baseline: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates an external score file against its instance file.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        instances: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Anchor {
    Zero,
    RangeStart,
}

impl From<Anchor> for AnchorRule {
    fn from(a: Anchor) -> Self {
        match a {
            Anchor::Zero => AnchorRule::Zero,
            Anchor::RangeStart => AnchorRule::RangeStart,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Random,
    Historic,
    Inductive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Collision {
    Allow,
    Exclude,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Edge-list file.
    #[arg(long)]
    pub input: PathBuf,
    /// `csv`, `tsv` or `ws`, optionally followed by `:header=auto|yes|no`,
    /// `:cols=SRC,DST,T` and `:delim=C`.
    #[arg(long, default_value = "csv")]
    pub format: EdgeListFormat,
    /// Smallest meaningful time unit of the dataset.
    #[arg(long, default_value_t = 1)]
    pub resolution: Timestamp,
}

impl InputArgs {
    pub fn spec(&self) -> InputSpec {
        InputSpec {
            input: self.input.clone(),
            format: self.format.to_string(),
            resolution: self.resolution,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    #[arg(long, default_value_t = 0.7)]
    pub train_ratio: f64,
    #[arg(long, default_value_t = 0.15)]
    pub val_ratio: f64,
    #[arg(long, value_enum, default_value_t = SchemeChoice::Both)]
    pub scheme: SchemeChoice,
    #[arg(long, default_value_t = 200)]
    pub batch_size: usize,
    /// Window length in native time units.
    #[arg(long)]
    pub horizon: Option<Timestamp>,
    #[arg(long, value_enum, default_value_t = Anchor::RangeStart)]
    pub anchor: Anchor,
    #[arg(long, value_enum, default_value_t = Sampler::Random)]
    pub sampler: Sampler,
    #[arg(long, default_value_t = 1)]
    pub negatives: usize,
    /// Whether random negatives may coincide with a positive of their chunk.
    #[arg(long, value_enum, default_value_t = Collision::Allow)]
    pub collision: Collision,
    /// Draw random pairs from observed sources × observed destinations.
    #[arg(long)]
    pub bipartite: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ForecasterKind::Edgebank)]
    pub forecaster: ForecasterKind,
    /// `unlimited`, `window:fixed=D`, `window:proportion=P`,
    /// `window:repeat-interval`, `threshold:K` or `threshold:mean`.
    #[arg(long, default_value = "unlimited")]
    pub edgebank_mode: String,
    /// Decay of the recency forecaster [default: horizon, else resolution].
    #[arg(long)]
    pub decay: Option<f64>,
    /// Score each chunk in pieces of at most this many positives.
    #[arg(long)]
    pub max_piece: Option<usize>,
    #[arg(long, value_enum, default_value_t = Aggregation::Macro)]
    pub headline: Aggregation,
}

pub fn run_config(input: &InputArgs, p: &ProtocolArgs) -> Result<RunConfig> {
    let edgebank = parse_edgebank_mode(&p.edgebank_mode).map_err(Error::Usage)?;
    let (sampler_seed, shuffle_seed) = RunConfig::seeds(p.seed);
    Ok(RunConfig {
        input: input.input.clone(),
        format: input.format.to_string(),
        resolution: input.resolution,
        train_ratio: p.train_ratio,
        val_ratio: p.val_ratio,
        scheme: p.scheme,
        batch_size: Some(p.batch_size),
        horizon: p.horizon,
        anchor: p.anchor.into(),
        sampler: match p.sampler {
            Sampler::Random => NegativeKind::Random,
            Sampler::Historic => NegativeKind::Historic,
            Sampler::Inductive => NegativeKind::Inductive,
        },
        negatives_per_positive: p.negatives,
        collision: match p.collision {
            Collision::Allow => CollisionPolicy::AllowPositiveCollision,
            Collision::Exclude => CollisionPolicy::ExcludePositives,
        },
        bipartite: p.bipartite,
        seed: Some(p.seed),
        sampler_seed,
        shuffle_seed,
        forecaster: p.forecaster,
        edgebank_mode: edgebank_mode_string(&edgebank),
        edgebank,
        recency_decay: p.decay,
        max_piece: p.max_piece,
        headline: p.headline,
    })
}

fn powers_of_two(scale: i64) -> Vec<i64> {
    (0..=10).map(|k| scale.saturating_mul(1 << k)).collect()
}

/// Runs one command and returns the text printed on success.
pub fn dispatch(cli: &Cli) -> Result<String> {
    let threads = cli.threads.max(1);
    match &cli.command {
        Command::Stats {
            input,
            bin_width,
            horizon,
            out,
        } => {
            let width = bin_width.or(*horizon).unwrap_or(input.resolution);
            let r = commands::cmd_stats(&input.spec(), width, out)?;
            Ok(commands::render_stats(&r))
        }
        Command::Nmi {
            input,
            kind,
            grid,
            window_grid,
            anchor,
            out,
        } => {
            let batch = grid.clone().unwrap_or_else(|| powers_of_two(1));
            let window = window_grid
                .clone()
                .unwrap_or_else(|| powers_of_two(input.resolution));
            let (b, w) = match kind {
                SchemeChoice::Batch => (Some(&batch[..]), None),
                SchemeChoice::Window => (None, Some(&window[..])),
                SchemeChoice::Both => (Some(&batch[..]), Some(&window[..])),
            };
            let r = commands::cmd_nmi(&input.spec(), b, w, (*anchor).into(), threads, out)?;
            Ok(commands::render_nmi(&r))
        }
        Command::Chunks {
            input,
            protocol,
            range,
            bins,
            out,
        } => {
            let r = commands::cmd_chunks(&run_config(input, protocol)?, *range, *bins, out)?;
            Ok(commands::render_chunks(&r))
        }
        Command::Pipeline {
            input,
            protocol,
            scores,
            out,
        } => {
            let cfg = run_config(input, protocol)?;
            let r = commands::cmd_pipeline(&cfg, scores.as_deref(), threads, out)?;
            let mut s: String = r.reports.iter().map(commands::render_scheme).collect();
            if let Some(d) = &r.diff {
                s.push_str(&commands::render_diff(d));
            }
            Ok(s)
        }
        Command::LeakTest {
            input,
            protocol,
            out,
        } => {
            let r = commands::cmd_leak_test(&run_config(input, protocol)?, out)?;
            Ok(commands::render_leak(&r))
        }
        Command::Diff {
            value,
            baseline,
            out,
        } => {
            let d = commands::cmd_diff(value, baseline, out.as_deref())?;
            Ok(commands::render_diff(&d))
        }
        Command::Evaluate {
            input,
            instances,
            scores,
            out,
        } => {
            let r = commands::cmd_evaluate(&input.spec(), instances, scores, out)?;
            Ok(commands::render_scheme(&r))
        }
    }
}
