//! Scenario generators: Walker shells, small random graphs and workflows.

use continuum_core::constellation::WalkerShell;
use continuum_core::engine::{SatelliteSpec, SimulationState};
use continuum_core::orchestration::{LatencyReference, TaskSpecification, WorkflowSpecification};
use continuum_core::routing::compute_routing_tables;
use continuum_core::topology::{default_roster, Computing, ComputingType, LinkParams, LinkProtocol, NetworkGraph, NodeId};
use continuum_core::SimTime;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::{mixed_graph, random_elements};

/// Starlink-like shell of `n` satellites named `sat-{i}`.
pub fn walker_satellites(n: usize, epoch: SimTime) -> Vec<SatelliteSpec> {
    WalkerShell::starlink_like(n)
        .generate(epoch)
        .expect("valid shell")
        .into_iter()
        .enumerate()
        .map(|(i, elements)| SatelliteSpec { name: format!("sat-{i}"), elements })
        .collect()
}

/// Roster stations within 45° of the equator, which a 53° shell covers.
pub fn low_latitude_stations() -> Vec<String> {
    default_roster().into_iter().filter(|g| g.location.latitude_rad().to_degrees().abs() < 45.0).map(|g| g.name).collect()
}

/// Random satellites plus a random subset of the roster, at most
/// `max_nodes` nodes, linked by a random protocol.
pub fn random_mixed_graph(rng: &mut impl Rng, max_nodes: usize, epoch: SimTime) -> NetworkGraph {
    let stations_n = rng.gen_range(0..=50.min(max_nodes / 4));
    let sats_n = rng.gen_range(10..=max_nodes - stations_n);
    let sats = random_elements(rng, sats_n, epoch);
    let mut stations = default_roster();
    stations.shuffle(rng);
    stations.truncate(stations_n);
    let protocol = LinkProtocol::ALL[rng.gen_range(0..LinkProtocol::ALL.len())];
    mixed_graph(&sats, &stations, protocol, &LinkParams::default(), epoch)
}

/// A state of at most 50 nodes with scarce, uneven capacity. Routing
/// tables are present in about half the draws.
pub fn scarce_state(rng: &mut impl Rng, epoch: SimTime) -> SimulationState {
    let count = rng.gen_range(15..=35);
    let sats = random_elements(rng, count, epoch);
    let mut stations = default_roster();
    stations.shuffle(rng);
    stations.truncate(rng.gen_range(3..=15));
    let mut graph = mixed_graph(&sats, &stations, LinkProtocol::PstSmartLoop, &LinkParams::default(), epoch);
    for i in 0..graph.node_count() {
        let node = graph.node_mut(NodeId(i as u32)).expect("node exists");
        let kind = node.computing.computing_type();
        node.computing = Computing::new(kind, rng.gen_range(200..3000), rng.gen_range(200..3000));
    }
    let tables = rng.gen_bool(0.5).then(|| compute_routing_tables(&graph));
    SimulationState::new(graph, tables)
}

/// One to four tasks with random demands, type constraints and SLOs.
/// Nodes are named by index; `services` are candidates for service references.
pub fn random_workflow(rng: &mut impl Rng, graph: &NetworkGraph, name: String, services: &[String]) -> WorkflowSpecification {
    let n = graph.node_count() as u32;
    let tasks = (0..rng.gen_range(1..=4))
        .map(|i| {
            let mut t = TaskSpecification::new(format!("t{i}"), rng.gen_range(100..1500), rng.gen_range(100..1500));
            if rng.gen_bool(0.3) {
                t = t.with_computing_type(if rng.gen_bool(0.5) { ComputingType::Edge } else { ComputingType::Cloud });
            }
            match rng.gen_range(0..10) {
                0..=5 => t.with_max_latency(rng.gen_range(2.0..40.0), LatencyReference::PredecessorTask),
                6 => t.with_max_latency(rng.gen_range(2.0..40.0), LatencyReference::NamedNode { node: rng.gen_range(0..n).to_string() }),
                7 if !services.is_empty() => t.with_max_latency(
                    rng.gen_range(2.0..40.0),
                    LatencyReference::NamedService { service: services.choose(rng).expect("not empty").clone() },
                ),
                _ => t,
            }
        })
        .collect();
    WorkflowSpecification::new(name, tasks).with_origin(rng.gen_range(0..n).to_string())
}
