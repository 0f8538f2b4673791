//! Allocation-only core of `linkcast`, a toolkit for evaluating dynamic link
//! forecasters on temporal graphs.
//!
//! Two evaluation protocols are supported side by side:
//!
//! * **link prediction** chunks the test edges into fixed-size batches of `b`
//!   consecutive edges, and
//! * **link forecasting** chunks them into fixed-duration windows
//!   `(i·h, (i+1)·h]`, so every chunk covers the same amount of time.
//!
//! The crate also carries the diagnostics that expose where batching goes
//! wrong: normalized mutual information between timestamps and chunk ids,
//! chunk duration and size distributions, and an intra-snapshot shuffle probe
//! for information leakage.
//!
//! Everything here is `no_std` + `alloc`. File formats, the command line and
//! chart rendering live in the `linkcast` crate.
#![no_std]

extern crate alloc;

pub mod baselines;
pub mod chunking;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod info;
pub mod metrics;
mod numeric;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::{ChronologicalSplit, DatasetStats, NodeId, TemporalEdge, TemporalGraph, Timestamp};
