use chrono::{TimeZone, Utc};

use super::state::SimulationState;
use crate::orbital::{GroundLocation, OrbitalElements};
use crate::routing::compute_routing_tables;
use crate::time::SimTime;
use crate::topology::{Computing, ComputingType, LinkKind, LinkSpec, NetworkGraph, NodeId};

pub fn epoch() -> SimTime {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

fn sat(k: usize) -> OrbitalElements {
    OrbitalElements::new(7000.0, 0.0, 0.9, 0.0, 0.0, 0.05 * k as f64, epoch()).unwrap()
}

fn with_links(mut graph: NetworkGraph, links: &[(u32, u32, f64)]) -> SimulationState {
    let specs: Vec<_> = links
        .iter()
        .map(|&(a, b, d)| LinkSpec {
            a: NodeId(a),
            b: NodeId(b),
            distance_km: d,
            kind: if graph.node(NodeId(b)).unwrap().is_satellite() { LinkKind::InterSatellite } else { LinkKind::GroundSatellite },
        })
        .collect();
    graph.set_links(specs, 100.0, 10.0).unwrap();
    let tables = compute_routing_tables(&graph);
    SimulationState::new(graph, Some(tables))
}

/// Three satellites in a row, each with the given capacity.
pub fn small_state(cpu: u64, mem: u64) -> SimulationState {
    let mut b = NetworkGraph::builder();
    for k in 0..3 {
        b.add_satellite(format!("s{k}"), sat(k), Computing::new(ComputingType::Edge, cpu, mem));
    }
    with_links(b.build(epoch()).unwrap(), &[(0, 1, 1000.0), (1, 2, 1000.0)])
}

/// Satellites `n0`..`n3` in a line 1000 km apart and a cloud ground
/// station `n4` 500 km from `n3`.
pub fn line_state() -> SimulationState {
    let mut b = NetworkGraph::builder();
    for k in 0..4 {
        b.add_satellite(format!("n{k}"), sat(k), Computing::new(ComputingType::Edge, 4000, 4096));
    }
    b.add_ground_station("n4", GroundLocation::from_degrees(10.0, 20.0, 0.0).unwrap(), Computing::new(ComputingType::Cloud, 64000, 65536));
    with_links(b.build(epoch()).unwrap(), &[(0, 1, 1000.0), (1, 2, 1000.0), (2, 3, 1000.0), (3, 4, 500.0)])
}
