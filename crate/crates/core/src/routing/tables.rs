use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{check_node, RoutePath, RoutingError};
use super::search::{best_first, NONE};
use crate::topology::{NetworkGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub next_hop: NodeId,
    pub latency_ms: f64,
}

/// Next hop and total latency from `owner` to every reachable destination.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTable {
    owner: NodeId,
    entries: Vec<Option<TableEntry>>,
}

impl RoutingTable {
    pub fn owner(&self) -> NodeId {
        self.owner
    }

    /// `None` for the owner itself and for unreachable destinations.
    pub fn get(&self, destination: NodeId) -> Option<TableEntry> {
        self.entries.get(destination.index()).copied().flatten()
    }

    pub fn reachable_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, TableEntry)> + '_ {
        self.entries.iter().enumerate().filter_map(|(i, e)| e.map(|e| (NodeId(i as u32), e)))
    }
}

/// Which nodes own a routing table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSources {
    #[default]
    AllNodes,
    SatellitesOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTables {
    tables: Vec<Option<RoutingTable>>,
}

impl RoutingTables {
    pub fn table(&self, owner: NodeId) -> Option<&RoutingTable> {
        self.tables.get(owner.index()).and_then(Option::as_ref)
    }

    pub fn node_count(&self) -> usize {
        self.tables.len()
    }

    pub fn has_table(&self, owner: NodeId) -> bool {
        self.table(owner).is_some()
    }
}

pub fn routing_table(graph: &NetworkGraph, owner: NodeId) -> RoutingTable {
    best_first(graph, owner, |_| 0.0, f64::INFINITY, |_, _, _| true, |sp| {
        let mut first_hop = vec![NONE; graph.node_count()];
        let mut entries = vec![None; graph.node_count()];
        for &v in sp.order().iter().skip(1) {
            let p = sp.pred(v);
            let hop = if p == owner.0 { v } else { first_hop[p as usize] };
            first_hop[v as usize] = hop;
            entries[v as usize] = Some(TableEntry { next_hop: NodeId(hop), latency_ms: sp.dist(v) });
        }
        RoutingTable { owner, entries }
    })
}

/// Single-source Dijkstra from every node, in parallel.
pub fn compute_routing_tables(graph: &NetworkGraph) -> RoutingTables {
    compute_routing_tables_for(graph, TableSources::AllNodes)
}

pub fn compute_routing_tables_for(graph: &NetworkGraph, sources: TableSources) -> RoutingTables {
    let owners = match sources {
        TableSources::AllNodes => graph.node_count(),
        TableSources::SatellitesOnly => graph.satellite_count(),
    };
    let mut tables: Vec<Option<RoutingTable>> =
        (0..owners as u32).into_par_iter().map(|i| Some(routing_table(graph, NodeId(i)))).collect();
    tables.resize(graph.node_count(), None);
    RoutingTables { tables }
}

/// Materializes the route by chaining next hops through the tables.
/// `Ok(None)` means the destination is unreachable.
pub fn lookup_route(
    tables: &RoutingTables,
    graph: &NetworkGraph,
    source: NodeId,
    destination: NodeId,
) -> Result<Option<RoutePath>, RoutingError> {
    check_node(graph, source)?;
    check_node(graph, destination)?;
    if source == destination {
        return Ok(Some(RoutePath::trivial(source)));
    }
    let mut nodes = vec![source];
    let mut cur = source;
    while cur != destination {
        let table = tables.table(cur).ok_or(RoutingError::MissingTable(cur))?;
        let Some(entry) = table.get(destination) else {
            return if cur == source { Ok(None) } else { Err(RoutingError::InconsistentTables { from: source, to: destination }) };
        };
        cur = entry.next_hop;
        nodes.push(cur);
        if nodes.len() > graph.node_count() {
            return Err(RoutingError::InconsistentTables { from: source, to: destination });
        }
    }
    RoutePath::from_node_sequence(graph, nodes).map(Some).ok_or(RoutingError::InconsistentTables { from: source, to: destination })
}
