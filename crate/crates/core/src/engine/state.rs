use thiserror::Error;

use super::metrics::{PluginTiming, StepMetrics};
use crate::orchestration::{DeploymentRegistry, ServiceDirectory};
use crate::routing::{astar_route, lookup_route, RoutePath, RoutingError, RoutingTables};
use crate::time::SimTime;
use crate::topology::{LinkSummary, NetworkGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown service {0:?}")]
    UnknownService(String),
    #[error("no route from {from:?} to {to:?}")]
    NoRoute { from: String, to: String },
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

/// A route destination: a node, or any node hosting a service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouteTarget {
    Node(NodeId),
    Service(String),
}

/// Read-only routing over one step's graph, tables and services.
#[derive(Debug, Clone, Copy)]
pub struct RouteView<'a> {
    pub graph: &'a NetworkGraph,
    pub tables: Option<&'a RoutingTables>,
    pub services: &'a ServiceDirectory,
}

impl<'a> RouteView<'a> {
    /// Table lookup when the source owns a table, A* otherwise.
    pub fn route_between(&self, source: NodeId, destination: NodeId) -> Result<Option<RoutePath>, RoutingError> {
        match self.tables {
            Some(t) if t.has_table(source) => lookup_route(t, self.graph, source, destination),
            _ => astar_route(self.graph, source, destination),
        }
    }

    pub fn resolve_node(&self, reference: &str) -> Result<NodeId, QueryError> {
        self.graph.resolve(reference).ok_or_else(|| QueryError::UnknownNode(reference.to_owned()))
    }

    /// Node names and ids take precedence over service names.
    pub fn resolve_target(&self, reference: &str) -> Result<RouteTarget, QueryError> {
        if let Some(id) = self.graph.resolve(reference) {
            return Ok(RouteTarget::Node(id));
        }
        if self.services.contains(reference) {
            return Ok(RouteTarget::Service(reference.to_owned()));
        }
        Err(QueryError::UnknownNode(reference.to_owned()))
    }

    /// Route to a node, or to the nearest host of a service (ties by id).
    pub fn route_to(&self, source: NodeId, target: &RouteTarget) -> Result<Option<RoutePath>, QueryError> {
        match target {
            RouteTarget::Node(id) => Ok(self.route_between(source, *id)?),
            RouteTarget::Service(name) => {
                let hosts = self.services.hosts(name);
                if hosts.is_empty() {
                    return Err(QueryError::UnknownService(name.clone()));
                }
                let mut best: Option<RoutePath> = None;
                for host in hosts {
                    if let Some(route) = self.route_between(source, host)? {
                        if best.as_ref().is_none_or(|b| route.total_latency_ms < b.total_latency_ms) {
                            best = Some(route);
                        }
                    }
                }
                Ok(best)
            }
        }
    }

    /// Resolves both ends by name or id (the target may also be a service)
    /// and returns the route. Unreachable targets are a [`QueryError::NoRoute`].
    pub fn query_route(&self, source: &str, target: &str) -> Result<RoutePath, QueryError> {
        let from = self.resolve_node(source)?;
        let to = self.resolve_target(target)?;
        self.route_to(from, &to)?.ok_or_else(|| QueryError::NoRoute { from: source.to_owned(), to: target.to_owned() })
    }

    pub fn query_service(&self, source: &str, service: &str) -> Result<RoutePath, QueryError> {
        let from = self.resolve_node(source)?;
        self.route_to(from, &RouteTarget::Service(service.to_owned()))?
            .ok_or_else(|| QueryError::NoRoute { from: source.to_owned(), to: service.to_owned() })
    }
}

/// Everything a plugin can see and change between steps.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub(crate) step_index: u64,
    pub(crate) sim_time: SimTime,
    pub graph: NetworkGraph,
    pub(crate) tables: Option<RoutingTables>,
    pub deployments: DeploymentRegistry,
    pub(crate) link_summary: LinkSummary,
    pub(crate) metrics: Vec<StepMetrics>,
    pub(crate) plugin_timings: Vec<PluginTiming>,
}

impl SimulationState {
    /// State at step 0, taking time from the graph.
    pub fn new(graph: NetworkGraph, tables: Option<RoutingTables>) -> Self {
        SimulationState {
            step_index: 0,
            sim_time: graph.time(),
            graph,
            tables,
            deployments: DeploymentRegistry::default(),
            link_summary: LinkSummary::default(),
            metrics: Vec::new(),
            plugin_timings: Vec::new(),
        }
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn sim_time(&self) -> SimTime {
        self.sim_time
    }

    pub fn tables(&self) -> Option<&RoutingTables> {
        self.tables.as_ref()
    }

    pub fn link_summary(&self) -> &LinkSummary {
        &self.link_summary
    }

    pub fn metrics(&self) -> &[StepMetrics] {
        &self.metrics
    }

    pub fn plugin_timings(&self) -> &[PluginTiming] {
        &self.plugin_timings
    }

    pub fn view(&self) -> RouteView<'_> {
        RouteView { graph: &self.graph, tables: self.tables.as_ref(), services: self.deployments.services() }
    }

    pub fn route_between(&self, source: NodeId, destination: NodeId) -> Result<Option<RoutePath>, RoutingError> {
        self.view().route_between(source, destination)
    }

    pub fn query_route(&self, source: &str, target: &str) -> Result<RoutePath, QueryError> {
        self.view().query_route(source, target)
    }
}
