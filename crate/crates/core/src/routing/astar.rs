use super::path::{check_node, RoutePath, RoutingError};
use super::search::best_first;
use crate::constants::light_latency_ms;
use crate::topology::{NetworkGraph, NodeId};

/// A node settled by the A* search, with its path cost and heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub node: NodeId,
    pub g_ms: f64,
    pub h_ms: f64,
}

/// Light-speed latency of the straight line between two nodes.
pub fn straight_line_latency_ms(graph: &NetworkGraph, a: NodeId, b: NodeId) -> f64 {
    light_latency_ms(graph.position(a).distance_to(&graph.position(b)))
}

/// Minimum-latency route found by A* with the straight-line light-speed
/// heuristic. `Ok(None)` means the destination is unreachable.
pub fn astar_route(graph: &NetworkGraph, source: NodeId, destination: NodeId) -> Result<Option<RoutePath>, RoutingError> {
    astar_search(graph, source, destination, f64::INFINITY, |_| {})
}

/// Like [`astar_route`], but gives up on routes longer than `max_latency_ms`.
pub fn astar_route_bounded(
    graph: &NetworkGraph,
    source: NodeId,
    destination: NodeId,
    max_latency_ms: f64,
) -> Result<Option<RoutePath>, RoutingError> {
    astar_search(graph, source, destination, max_latency_ms, |_| {})
}

/// A* search reporting every settled node to `observer`.
pub fn astar_search(
    graph: &NetworkGraph,
    source: NodeId,
    destination: NodeId,
    max_latency_ms: f64,
    mut observer: impl FnMut(Expansion),
) -> Result<Option<RoutePath>, RoutingError> {
    check_node(graph, source)?;
    check_node(graph, destination)?;
    if source == destination {
        return Ok(Some(RoutePath::trivial(source)));
    }
    let target = graph.position(destination);
    let nodes = best_first(
        graph,
        source,
        |v| light_latency_ms(graph.position(NodeId(v)).distance_to(&target)),
        max_latency_ms,
        |u, g, h| {
            observer(Expansion { node: NodeId(u), g_ms: g, h_ms: h });
            u != destination.0
        },
        |sp| (sp.order().last() == Some(&destination.0)).then(|| sp.node_sequence(destination.0)),
    );
    Ok(nodes.and_then(|nodes| RoutePath::from_node_sequence(graph, nodes)))
}
