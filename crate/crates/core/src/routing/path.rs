use serde::Serialize;
use thiserror::Error;

use crate::topology::{LinkId, NetworkGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no routing table for node {0}")]
    MissingTable(NodeId),
    #[error("routing tables disagree on the route from {from} to {to}")]
    InconsistentTables { from: NodeId, to: NodeId },
}

/// A simple path through the current link graph.
///
/// An empty path (source equals destination) has zero latency and an
/// unbounded bottleneck.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutePath {
    pub node_sequence: Vec<NodeId>,
    pub link_sequence: Vec<LinkId>,
    pub total_latency_ms: f64,
    pub bottleneck_bandwidth_mbps: f64,
}

impl RoutePath {
    pub fn trivial(node: NodeId) -> Self {
        RoutePath {
            node_sequence: vec![node],
            link_sequence: Vec::new(),
            total_latency_ms: 0.0,
            bottleneck_bandwidth_mbps: f64::INFINITY,
        }
    }

    /// Builds the path along `nodes`, which must be joined by links in `graph`.
    /// Latencies are summed from the source forward.
    pub fn from_node_sequence(graph: &NetworkGraph, nodes: Vec<NodeId>) -> Option<Self> {
        let first = *nodes.first()?;
        let mut path = RoutePath::trivial(first);
        path.node_sequence = nodes;
        for pair in path.node_sequence.windows(2) {
            let link = graph.link_between(pair[0], pair[1])?;
            path.link_sequence.push(link.id);
            path.total_latency_ms += link.latency_ms;
            path.bottleneck_bandwidth_mbps = path.bottleneck_bandwidth_mbps.min(link.bandwidth_mbps);
        }
        Some(path)
    }

    pub fn source(&self) -> NodeId {
        self.node_sequence[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.node_sequence.last().expect("route has at least one node")
    }

    pub fn hop_count(&self) -> usize {
        self.link_sequence.len()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen: Vec<NodeId> = self.node_sequence.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

pub(crate) fn check_node(graph: &NetworkGraph, id: NodeId) -> Result<(), RoutingError> {
    if graph.contains(id) {
        Ok(())
    } else {
        Err(RoutingError::UnknownNode(id))
    }
}
