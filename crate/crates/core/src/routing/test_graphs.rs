use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::SPEED_OF_LIGHT_KM_S;
use crate::orbital::OrbitalElements;
use crate::time::SimTime;
use crate::topology::{Computing, ComputingType, LinkKind, LinkSpec, NetworkGraph, NodeId};

pub fn epoch() -> SimTime {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

fn satellites(elements: Vec<OrbitalElements>) -> NetworkGraph {
    let mut b = NetworkGraph::builder();
    for (i, el) in elements.into_iter().enumerate() {
        b.add_satellite(format!("sat-{i}"), el, Computing::new(ComputingType::Edge, 1000, 1024));
    }
    b.build(epoch()).unwrap()
}

/// Satellites joined by links of the given latency (in ms). Positions do not
/// match the latencies, so only table routing is meaningful on these graphs.
pub fn weighted_graph(n: usize, edges: &[(u32, u32, f64)]) -> NetworkGraph {
    let els = (0..n)
        .map(|k| OrbitalElements::new(7000.0, 0.0, 0.9, 0.5 * k as f64, 0.0, 0.7 * k as f64, epoch()).unwrap())
        .collect();
    let mut g = satellites(els);
    let specs = edges.iter().map(|&(a, b, ms)| LinkSpec {
        a: NodeId(a),
        b: NodeId(b),
        distance_km: ms * SPEED_OF_LIGHT_KM_S / 1000.0,
        kind: LinkKind::InterSatellite,
    });
    g.set_links(specs, 100.0, 10.0).unwrap();
    g
}

/// Random satellites with a random path backbone plus `extra` random links,
/// each link as long as the true distance between its endpoints.
pub fn random_geometric_graph(n: usize, extra: usize, seed: u64) -> NetworkGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let els = (0..n)
        .map(|_| {
            OrbitalElements::new(
                rng.gen_range(6800.0..7600.0),
                0.0,
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
                0.0,
                rng.gen_range(0.0..std::f64::consts::TAU),
                epoch(),
            )
            .unwrap()
        })
        .collect();
    let mut g = satellites(els);
    let mut pairs = std::collections::BTreeSet::new();
    for i in 1..n as u32 {
        if rng.gen_bool(0.9) {
            pairs.insert((rng.gen_range(0..i), i));
        }
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n as u32);
        let b = rng.gen_range(0..n as u32);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let specs: Vec<_> = pairs
        .into_iter()
        .map(|(a, b)| LinkSpec {
            a: NodeId(a),
            b: NodeId(b),
            distance_km: g.position(NodeId(a)).distance_to(&g.position(NodeId(b))),
            kind: LinkKind::InterSatellite,
        })
        .collect();
    g.set_links(specs, 100.0, 10.0).unwrap();
    g
}
