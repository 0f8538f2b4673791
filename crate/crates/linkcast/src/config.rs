//! The resolved run configuration embedded in every report.

use std::path::PathBuf;

use linkcast_core::baselines::{EdgeBankConfig, Threshold, WindowPolicy};
use linkcast_core::chunking::{AnchorRule, ChunkScheme};
use linkcast_core::rng::{derive_seed, PURPOSE_SAMPLING, PURPOSE_SHUFFLE};
use linkcast_core::sampling::{CollisionPolicy, NegativeKind, SamplerSpec};
use linkcast_core::Timestamp;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    Batch,
    Window,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ForecasterKind {
    Edgebank,
    Recency,
    Replay,
}

/// Which aggregate is quoted as the headline number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Macro,
    Micro,
}

/// Parses `unlimited`, `window:fixed=<duration>`, `window:proportion=<p>`,
/// `window:repeat-interval`, `threshold:<k>` or `threshold:mean`.
pub fn parse_edgebank_mode(s: &str) -> Result<EdgeBankConfig, String> {
    let bad = || format!("unknown EdgeBank mode '{s}'");
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    match (head, rest) {
        ("unlimited", "") => Ok(EdgeBankConfig::Unlimited),
        ("window", "repeat-interval") => Ok(EdgeBankConfig::TimeWindow {
            policy: WindowPolicy::RepeatInterval,
        }),
        ("window", r) => {
            let (key, value) = r.split_once('=').ok_or_else(bad)?;
            let x: f64 = value
                .parse()
                .map_err(|_| format!("bad number '{value}' in EdgeBank mode"))?;
            let policy = match key {
                "fixed" if x > 0.0 => WindowPolicy::Fixed { duration: x },
                "proportion" if x > 0.0 && x <= 1.0 => WindowPolicy::FixedProportion { p: x },
                "fixed" | "proportion" => {
                    return Err(format!("EdgeBank window value {x} out of range"))
                }
                _ => return Err(bad()),
            };
            Ok(EdgeBankConfig::TimeWindow { policy })
        }
        ("threshold", "mean") => Ok(EdgeBankConfig::RepeatThreshold {
            threshold: Threshold::DerivedMean,
        }),
        ("threshold", k) => {
            let k: u32 = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err("EdgeBank threshold must be at least 1".into());
            }
            Ok(EdgeBankConfig::RepeatThreshold {
                threshold: Threshold::Count { k },
            })
        }
        _ => Err(bad()),
    }
}

pub fn edgebank_mode_string(c: &EdgeBankConfig) -> String {
    match c {
        EdgeBankConfig::Unlimited => "unlimited".into(),
        EdgeBankConfig::TimeWindow { policy } => match policy {
            WindowPolicy::Fixed { duration } => format!("window:fixed={duration}"),
            WindowPolicy::FixedProportion { p } => format!("window:proportion={p}"),
            WindowPolicy::RepeatInterval => "window:repeat-interval".into(),
        },
        EdgeBankConfig::RepeatThreshold { threshold } => match threshold {
            Threshold::Count { k } => format!("threshold:{k}"),
            Threshold::DerivedMean => "threshold:mean".into(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: String,
    pub resolution: Timestamp,
    pub train_ratio: f64,
    pub val_ratio: f64,
    pub scheme: SchemeChoice,
    pub batch_size: Option<usize>,
    pub horizon: Option<Timestamp>,
    pub anchor: AnchorRule,
    pub sampler: NegativeKind,
    pub negatives_per_positive: usize,
    pub collision: CollisionPolicy,
    pub bipartite: bool,
    /// Root seed; the two below are derived from it. Absent when a run is
    /// rebuilt from an instance file, which only records the derived seed.
    pub seed: Option<u64>,
    pub sampler_seed: u64,
    pub shuffle_seed: u64,
    pub forecaster: ForecasterKind,
    pub edgebank_mode: String,
    pub edgebank: EdgeBankConfig,
    pub recency_decay: Option<f64>,
    pub max_piece: Option<usize>,
    pub headline: Aggregation,
}

impl RunConfig {
    pub fn seeds(root: u64) -> (u64, u64) {
        (
            derive_seed(root, PURPOSE_SAMPLING),
            derive_seed(root, PURPOSE_SHUFFLE),
        )
    }

    pub fn sampler_spec(&self) -> SamplerSpec {
        SamplerSpec {
            kind: self.sampler,
            seed: self.sampler_seed,
            negatives_per_positive: self.negatives_per_positive,
            collision: self.collision,
            bipartite: self.bipartite,
        }
    }

    pub fn batch_scheme(&self) -> Result<ChunkScheme> {
        let size = self
            .batch_size
            .ok_or_else(|| Error::Usage("the batch scheme needs --batch-size".into()))?;
        Ok(ChunkScheme::batch(size))
    }

    pub fn window_scheme(&self) -> Result<ChunkScheme> {
        let horizon = self
            .horizon
            .ok_or_else(|| Error::Usage("the window scheme needs --horizon".into()))?;
        Ok(ChunkScheme::Window {
            horizon,
            anchor: self.anchor,
        })
    }

    /// Schemes to run, named as they appear in output file names.
    pub fn schemes(&self) -> Result<Vec<(&'static str, ChunkScheme)>> {
        Ok(match self.scheme {
            SchemeChoice::Batch => vec![("batch", self.batch_scheme()?)],
            SchemeChoice::Window => vec![("window", self.window_scheme()?)],
            SchemeChoice::Both => vec![
                ("batch", self.batch_scheme()?),
                ("window", self.window_scheme()?),
            ],
        })
    }

    /// Decay of the recency forecaster: explicit, else the horizon, else the resolution.
    pub fn decay(&self) -> f64 {
        self.recency_decay
            .unwrap_or_else(|| self.horizon.unwrap_or(self.resolution).max(1) as f64)
    }
}
