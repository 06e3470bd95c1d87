use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::computing::Computing;
use super::node::{Motion, NodeId, NodeKind, NodeRecord};
use crate::constants::light_latency_ms;
use crate::geometry::EciPosition;
use crate::orbital::{GroundLocation, KeplerError, OrbitalElements};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkId(pub u32);

impl LinkId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    InterSatellite,
    GroundSatellite,
}

/// An undirected physical link. `endpoint_a < endpoint_b` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub endpoint_a: NodeId,
    pub endpoint_b: NodeId,
    pub distance_km: f64,
    pub latency_ms: f64,
    pub bandwidth_mbps: f64,
    pub kind: LinkKind,
}

impl Link {
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.endpoint_a {
            self.endpoint_b
        } else {
            self.endpoint_a
        }
    }
}

/// A link before it is placed in a graph: endpoints, distance, kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub distance_km: f64,
    pub kind: LinkKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate node name {0:?}")]
    DuplicateName(String),
    #[error("link endpoints must be distinct ({0})")]
    SelfLink(NodeId),
    #[error("link references unknown node {0}")]
    UnknownNode(NodeId),
    #[error("duplicate link between {0} and {1}")]
    DuplicateLink(NodeId, NodeId),
    #[error(transparent)]
    Propagation(#[from] KeplerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacent {
    pub neighbor: NodeId,
    pub link: LinkId,
}

/// Nodes plus the links established for the current step.
///
/// Satellites always hold ids `0..satellite_count()`, ground stations follow.
#[derive(Debug, Clone)]
pub struct NetworkGraph {
    nodes: Vec<NodeRecord>,
    satellite_count: usize,
    links: Vec<Link>,
    adjacency: Vec<Vec<Adjacent>>,
    names: HashMap<String, NodeId>,
    time: SimTime,
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    satellites: Vec<(String, OrbitalElements, Computing)>,
    ground: Vec<(String, GroundLocation, Computing)>,
}

impl GraphBuilder {
    pub fn satellite(mut self, name: impl Into<String>, elements: OrbitalElements, computing: Computing) -> Self {
        self.add_satellite(name, elements, computing);
        self
    }

    pub fn ground_station(mut self, name: impl Into<String>, location: GroundLocation, computing: Computing) -> Self {
        self.add_ground_station(name, location, computing);
        self
    }

    pub fn add_satellite(&mut self, name: impl Into<String>, elements: OrbitalElements, computing: Computing) {
        self.satellites.push((name.into(), elements, computing));
    }

    pub fn add_ground_station(&mut self, name: impl Into<String>, location: GroundLocation, computing: Computing) {
        self.ground.push((name.into(), location, computing));
    }

    /// Assigns ids (satellites first, in insertion order) and computes the
    /// positions at `time`. Ground stations rotate relative to `time`.
    pub fn build(self, time: SimTime) -> Result<NetworkGraph, GraphError> {
        let mut nodes = Vec::with_capacity(self.satellites.len() + self.ground.len());
        let satellite_count = self.satellites.len();
        for (name, el, computing) in self.satellites {
            let id = NodeId(nodes.len() as u32);
            nodes.push(NodeRecord { id, name, motion: Motion::Orbit(el), position: EciPosition::ORIGIN, computing });
        }
        for (name, location, computing) in self.ground {
            let id = NodeId(nodes.len() as u32);
            let motion = Motion::Ground { location, reference_epoch: time };
            nodes.push(NodeRecord { id, name, motion, position: EciPosition::ORIGIN, computing });
        }
        let mut names = HashMap::with_capacity(nodes.len());
        for n in &nodes {
            if names.insert(n.name.clone(), n.id).is_some() {
                return Err(GraphError::DuplicateName(n.name.clone()));
            }
        }
        let mut graph = NetworkGraph {
            adjacency: vec![Vec::new(); nodes.len()],
            nodes,
            satellite_count,
            links: Vec::new(),
            names,
            time,
        };
        graph.update_positions(time)?;
        Ok(graph)
    }
}

impl NetworkGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn time(&self) -> SimTime {
        self.time
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn satellite_count(&self) -> usize {
        self.satellite_count
    }

    pub fn ground_station_count(&self) -> usize {
        self.nodes.len() - self.satellite_count
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn satellites(&self) -> &[NodeRecord] {
        &self.nodes[..self.satellite_count]
    }

    pub fn ground_stations(&self) -> &[NodeRecord] {
        &self.nodes[self.satellite_count..]
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.nodes.get(id.index())
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut NodeRecord> {
        self.nodes.get_mut(id.index())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn kind(&self, id: NodeId) -> Option<NodeKind> {
        self.node(id).map(NodeRecord::kind)
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.names.get(name).copied()
    }

    /// Resolves a numeric id or a node name.
    pub fn resolve(&self, reference: &str) -> Option<NodeId> {
        let reference = reference.trim();
        if let Some(id) = self.find(reference) {
            return Some(id);
        }
        reference.parse::<u32>().ok().map(NodeId).filter(|id| self.contains(*id))
    }

    pub fn position(&self, id: NodeId) -> EciPosition {
        self.nodes[id.index()].position
    }

    pub fn positions(&self) -> impl Iterator<Item = EciPosition> + '_ {
        self.nodes.iter().map(|n| n.position)
    }

    pub fn satellite_positions(&self) -> Vec<EciPosition> {
        self.satellites().iter().map(|n| n.position).collect()
    }

    pub fn ground_positions(&self) -> Vec<EciPosition> {
        self.ground_stations().iter().map(|n| n.position).collect()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(id.index())
    }

    pub fn neighbors(&self, id: NodeId) -> &[Adjacent] {
        &self.adjacency[id.index()]
    }

    /// Link ids incident to `id`.
    pub fn incident_links(&self, id: NodeId) -> impl Iterator<Item = LinkId> + '_ {
        self.adjacency[id.index()].iter().map(|a| a.link)
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<&Link> {
        self.adjacency[a.index()].iter().find(|adj| adj.neighbor == b).map(|adj| &self.links[adj.link.index()])
    }

    /// Recomputes every node position for `time` (in parallel). Links are
    /// left untouched and become stale until the next rebuild.
    pub fn update_positions(&mut self, time: SimTime) -> Result<(), GraphError> {
        self.nodes.par_iter_mut().try_for_each(|n| -> Result<(), KeplerError> {
            n.position = n.motion.position_at(time)?;
            Ok(())
        })?;
        self.time = time;
        Ok(())
    }

    pub fn clear_links(&mut self) {
        self.links.clear();
        self.adjacency.iter_mut().for_each(Vec::clear);
    }

    /// Replaces all links. Ids are assigned in the given order; latency is
    /// derived from distance at the speed of light.
    pub fn set_links(
        &mut self,
        specs: impl IntoIterator<Item = LinkSpec>,
        isl_bandwidth_mbps: f64,
        ground_bandwidth_mbps: f64,
    ) -> Result<(), GraphError> {
        self.clear_links();
        for spec in specs {
            let (a, b) = if spec.a < spec.b { (spec.a, spec.b) } else { (spec.b, spec.a) };
            if a == b {
                return Err(GraphError::SelfLink(a));
            }
            if !self.contains(b) {
                return Err(GraphError::UnknownNode(b));
            }
            if self.adjacency[a.index()].iter().any(|adj| adj.neighbor == b) {
                return Err(GraphError::DuplicateLink(a, b));
            }
            let id = LinkId(self.links.len() as u32);
            let bandwidth_mbps = match spec.kind {
                LinkKind::InterSatellite => isl_bandwidth_mbps,
                LinkKind::GroundSatellite => ground_bandwidth_mbps,
            };
            self.links.push(Link {
                id,
                endpoint_a: a,
                endpoint_b: b,
                distance_km: spec.distance_km,
                latency_ms: light_latency_ms(spec.distance_km),
                bandwidth_mbps,
                kind: spec.kind,
            });
            self.adjacency[a.index()].push(Adjacent { neighbor: b, link: id });
            self.adjacency[b.index()].push(Adjacent { neighbor: a, link: id });
        }
        Ok(())
    }

    /// Connected components of the satellite-only subgraph, as a label per satellite.
    pub fn satellite_components(&self) -> Vec<usize> {
        let s = self.satellite_count;
        let mut uf = super::union_find::UnionFind::new(s);
        for l in &self.links {
            if l.endpoint_b.index() < s {
                uf.union(l.endpoint_a.index(), l.endpoint_b.index());
            }
        }
        (0..s).map(|i| uf.find(i)).collect()
    }

    pub fn satellite_component_count(&self) -> usize {
        let mut labels = self.satellite_components();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }
}
