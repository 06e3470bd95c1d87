//! Routes over the current link graph.
//!
//! Two interchangeable routers: per-node Dijkstra tables built once per step
//! and looked up in O(path length), and on-demand A* with a light-speed
//! heuristic. Both minimise total latency.

mod astar;
mod path;
mod search;
mod tables;
#[cfg(test)]
pub(crate) mod test_graphs;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use astar::{astar_route, astar_route_bounded, astar_search, straight_line_latency_ms, Expansion};
pub use path::{RoutePath, RoutingError};
pub use tables::{
    compute_routing_tables, compute_routing_tables_for, lookup_route, routing_table, RoutingTable, RoutingTables, TableEntry,
    TableSources,
};

use crate::topology::{NetworkGraph, NodeId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouterKind {
    Dijkstra,
    #[default]
    Astar,
}

impl RouterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RouterKind::Dijkstra => "dijkstra",
            RouterKind::Astar => "astar",
        }
    }
}

impl fmt::Display for RouterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RouterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dijkstra" => Ok(RouterKind::Dijkstra),
            "astar" | "a*" => Ok(RouterKind::Astar),
            other => Err(format!("unknown router {other:?} (expected dijkstra or astar)")),
        }
    }
}

/// Visits nodes reachable from `source` in order of increasing route
/// latency, up to `max_latency_ms`. `visit(node, latency)` returns `false`
/// to stop early.
pub fn expand_by_latency(
    graph: &NetworkGraph,
    source: NodeId,
    max_latency_ms: f64,
    mut visit: impl FnMut(NodeId, f64) -> bool,
) -> Result<(), RoutingError> {
    path::check_node(graph, source)?;
    search::best_first(graph, source, |_| 0.0, max_latency_ms, |u, g, _| visit(NodeId(u), g), |_| ());
    Ok(())
}
