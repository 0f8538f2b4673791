#![allow(dead_code)]

use linkcast_core::{TemporalEdge, TemporalGraph};
use proptest::prelude::*;

pub const NODES: u32 = 12;

/// Small graphs with many repeated timestamps and repeated pairs.
pub fn graph(max_edges: usize) -> impl Strategy<Value = TemporalGraph> {
    prop::collection::vec((0..NODES, 0..NODES, 0i64..60), 8..max_edges).prop_map(|raw| {
        let edges = raw
            .into_iter()
            .map(|(s, d, t)| TemporalEdge::new(s, if s == d { (d + 1) % NODES } else { d }, t))
            .collect();
        TemporalGraph::new(NODES as usize, edges, 1).unwrap()
    })
}
