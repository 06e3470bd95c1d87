//! Per-step link rebuild.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::candidates::{edges_from_lists, neighbor_lists, CandidateEdge, CandidateGraph, CandidateMode, Eligibility};
use super::graph::{GraphError, LinkKind, LinkSpec, NetworkGraph};
use super::ground::link_ground_nearest;
use super::grid::Neighbor;
use super::loops::{add_loops, add_smart_loops};
use super::node::NodeId;
use super::spanning::{bridge_candidates, build_links_mst, spanning_forest_from_sorted_lists};
use crate::geometry::EciPosition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkProtocol {
    Mst,
    MstLoop,
    MstSmartLoop,
    Pst,
    PstLoop,
    PstSmartLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    None,
    Nearest,
    Smart,
}

impl LinkProtocol {
    pub const ALL: [LinkProtocol; 6] = [
        LinkProtocol::Mst,
        LinkProtocol::MstLoop,
        LinkProtocol::MstSmartLoop,
        LinkProtocol::Pst,
        LinkProtocol::PstLoop,
        LinkProtocol::PstSmartLoop,
    ];

    pub fn is_parallel(self) -> bool {
        matches!(self, LinkProtocol::Pst | LinkProtocol::PstLoop | LinkProtocol::PstSmartLoop)
    }

    pub fn loop_mode(self) -> LoopMode {
        match self {
            LinkProtocol::Mst | LinkProtocol::Pst => LoopMode::None,
            LinkProtocol::MstLoop | LinkProtocol::PstLoop => LoopMode::Nearest,
            LinkProtocol::MstSmartLoop | LinkProtocol::PstSmartLoop => LoopMode::Smart,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinkProtocol::Mst => "mst",
            LinkProtocol::MstLoop => "mst_loop",
            LinkProtocol::MstSmartLoop => "mst_smart_loop",
            LinkProtocol::Pst => "pst",
            LinkProtocol::PstLoop => "pst_loop",
            LinkProtocol::PstSmartLoop => "pst_smart_loop",
        }
    }
}

impl fmt::Display for LinkProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkProtocol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim())
            .ok_or_else(|| format!("unknown link protocol {s:?} (expected one of mst, mst_loop, mst_smart_loop, pst, pst_loop, pst_smart_loop)"))
    }
}

/// Tuning knobs for link construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkParams {
    pub max_isl_range_km: f64,
    pub occlusion_margin_km: f64,
    pub loop_degree_threshold: usize,
    pub candidates: CandidateMode,
    pub isl_bandwidth_mbps: f64,
    pub ground_bandwidth_mbps: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            max_isl_range_km: 5000.0,
            occlusion_margin_km: crate::constants::ATMOSPHERE_MARGIN_KM,
            loop_degree_threshold: 2,
            candidates: CandidateMode::default(),
            isl_bandwidth_mbps: 100_000.0,
            ground_bandwidth_mbps: 4_000.0,
        }
    }
}

impl LinkParams {
    pub fn eligibility(&self) -> Eligibility {
        Eligibility {
            max_range_km: self.max_isl_range_km,
            occlusion_radius_km: crate::constants::EARTH_RADIUS_KM + self.occlusion_margin_km,
        }
    }
}

/// Inter-satellite links chosen by `protocol`, as canonical candidate edges
/// over satellite indices. Tree edges come first, loops after.
pub fn inter_satellite_links(positions: &[EciPosition], protocol: LinkProtocol, params: &LinkParams) -> Vec<CandidateEdge> {
    let elig = params.eligibility();
    let parallel = protocol.is_parallel();
    let n = positions.len();

    let mut lists = neighbor_lists(positions, params.candidates, &elig, parallel);
    let (mut edges, mut tree) = if parallel {
        let tree = spanning_forest_from_sorted_lists(&lists);
        (None, tree)
    } else {
        let edges = edges_from_lists(&lists);
        let tree = build_links_mst(n, &edges);
        (Some(edges), tree)
    };

    if matches!(params.candidates, CandidateMode::Nearest { .. }) {
        loop {
            let bridges = bridge_candidates(positions, &tree, &elig, parallel);
            if bridges.is_empty() {
                break;
            }
            for b in &bridges {
                lists[b.a as usize].push(Neighbor { index: b.b, distance_km: b.distance_km });
            }
            lists.iter_mut().for_each(|l| l.sort_by(Neighbor::cmp_by_distance));
            let before = tree.len();
            tree = if parallel {
                spanning_forest_from_sorted_lists(&lists)
            } else {
                let e = edges_from_lists(&lists);
                let t = build_links_mst(n, &e);
                edges = Some(e);
                t
            };
            if tree.len() <= before {
                break;
            }
        }
    }

    match protocol.loop_mode() {
        LoopMode::None => tree,
        mode => {
            let edges = edges.unwrap_or_else(|| edges_from_lists(&lists));
            let graph = CandidateGraph::from_edges(n, &edges, parallel);
            match mode {
                LoopMode::Nearest => add_loops(&tree, &graph, params.loop_degree_threshold, parallel),
                _ => add_smart_loops(positions, &tree, &graph, params.loop_degree_threshold, parallel),
            }
        }
    }
}

/// Counts reported after a rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LinkSummary {
    pub inter_satellite: usize,
    pub ground_satellite: usize,
    pub unlinked_ground_stations: usize,
}

/// Discards all links and rebuilds them for the current positions: the
/// inter-satellite protocol and the nearest-satellite ground protocol run
/// concurrently, then both results are merged in a fixed order (ISLs by
/// canonical endpoints, then ground links by station id).
pub fn update_links(graph: &mut NetworkGraph, protocol: LinkProtocol, params: &LinkParams) -> Result<LinkSummary, GraphError> {
    let sats = graph.satellite_positions();
    let ground = graph.ground_positions();
    let s = sats.len() as u32;

    let (isl, ground_links) =
        rayon::join(|| inter_satellite_links(&sats, protocol, params), || link_ground_nearest(&sats, &ground));

    let mut isl_specs: Vec<LinkSpec> = isl
        .iter()
        .map(|e| LinkSpec { a: NodeId(e.a), b: NodeId(e.b), distance_km: e.distance_km, kind: LinkKind::InterSatellite })
        .collect();
    isl_specs.sort_unstable_by_key(|l| (l.a, l.b));

    let mut unlinked = 0;
    let mut ground_specs = Vec::with_capacity(ground_links.len());
    for (g, link) in ground_links.iter().enumerate() {
        let station = NodeId(s + g as u32);
        match link {
            Some((sat, d)) => ground_specs.push(LinkSpec { a: NodeId(*sat), b: station, distance_km: *d, kind: LinkKind::GroundSatellite }),
            None => {
                unlinked += 1;
                tracing::debug!(station = %station, "ground station sees no satellite");
            }
        }
    }

    let summary = LinkSummary { inter_satellite: isl_specs.len(), ground_satellite: ground_specs.len(), unlinked_ground_stations: unlinked };
    graph.set_links(isl_specs.into_iter().chain(ground_specs), params.isl_bandwidth_mbps, params.ground_bandwidth_mbps)?;
    Ok(summary)
}
