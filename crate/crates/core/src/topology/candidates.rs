//! Eligible inter-satellite link candidates.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Neighbor, SpatialGrid};
use super::node::NodeRecord;
use crate::constants::{ATMOSPHERE_MARGIN_KM, EARTH_RADIUS_KM};
use crate::geometry::{segment_clears_sphere, EciPosition};

/// Range and line-of-sight limits for inter-satellite links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eligibility {
    pub max_range_km: f64,
    pub occlusion_radius_km: f64,
}

impl Eligibility {
    pub fn with_range(max_range_km: f64) -> Self {
        Self { max_range_km, occlusion_radius_km: EARTH_RADIUS_KM + ATMOSPHERE_MARGIN_KM }
    }

    #[inline]
    pub fn allows(&self, a: &EciPosition, b: &EciPosition) -> bool {
        a.distance_to(b) <= self.max_range_km && segment_clears_sphere(a, b, self.occlusion_radius_km)
    }
}

impl Default for Eligibility {
    fn default() -> Self {
        Self::with_range(5000.0)
    }
}

/// Whether two satellites may be linked: within `max_range_km` and with a
/// line of sight that stays above the atmosphere margin.
pub fn eligible_isl(a: &NodeRecord, b: &NodeRecord, max_range_km: f64) -> bool {
    a.is_satellite() && b.is_satellite() && a.id != b.id && Eligibility::with_range(max_range_km).allows(&a.position, &b.position)
}

/// How candidate pairs are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CandidateMode {
    /// Every pair is tested. Quadratic; meant for small constellations and tests.
    AllPairs,
    /// The `k` nearest satellites of each satellite, via a spatial grid.
    Nearest { k: usize },
}

impl Default for CandidateMode {
    fn default() -> Self {
        CandidateMode::Nearest { k: 16 }
    }
}

/// Undirected weighted candidate with `a < b` (satellite indices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEdge {
    pub a: u32,
    pub b: u32,
    pub distance_km: f64,
}

impl CandidateEdge {
    pub fn new(x: u32, y: u32, distance_km: f64) -> Self {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Self { a, b, distance_km }
    }

    /// Canonical order: weight, then lower endpoint, then higher endpoint.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.distance_km.total_cmp(&other.distance_km).then(self.a.cmp(&other.a)).then(self.b.cmp(&other.b))
    }
}

pub fn total_weight(edges: &[CandidateEdge]) -> f64 {
    edges.iter().map(|e| e.distance_km).sum()
}

fn neighbors_of(i: usize, positions: &[EciPosition], grid: Option<&SpatialGrid>, mode: CandidateMode, elig: &Eligibility) -> Vec<Neighbor> {
    let p = &positions[i];
    let mut out: Vec<Neighbor> = match (mode, grid) {
        (CandidateMode::Nearest { k }, Some(grid)) => grid.k_nearest(p, k, elig.max_range_km, Some(i as u32)),
        _ => positions
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(j, q)| Neighbor { index: j as u32, distance_km: p.distance_to(q) })
            .filter(|n| n.distance_km <= elig.max_range_km)
            .collect(),
    };
    out.retain(|n| segment_clears_sphere(p, &positions[n.index as usize], elig.occlusion_radius_km));
    if matches!(mode, CandidateMode::AllPairs) {
        out.sort_by(Neighbor::cmp_by_distance);
    }
    out
}

/// Per-satellite eligible neighbours, each list sorted by (distance, index).
/// The relation is not necessarily symmetric in `Nearest` mode.
pub fn neighbor_lists(positions: &[EciPosition], mode: CandidateMode, elig: &Eligibility, parallel: bool) -> Vec<Vec<Neighbor>> {
    let grid = match mode {
        CandidateMode::Nearest { .. } => Some(SpatialGrid::for_shell(positions)),
        CandidateMode::AllPairs => None,
    };
    if parallel {
        (0..positions.len()).into_par_iter().map(|i| neighbors_of(i, positions, grid.as_ref(), mode, elig)).collect()
    } else {
        (0..positions.len()).map(|i| neighbors_of(i, positions, grid.as_ref(), mode, elig)).collect()
    }
}

/// Flattens neighbour lists into deduplicated edges in canonical order.
pub fn edges_from_lists(lists: &[Vec<Neighbor>]) -> Vec<CandidateEdge> {
    let mut edges: Vec<CandidateEdge> = lists
        .iter()
        .enumerate()
        .flat_map(|(i, list)| list.iter().map(move |n| CandidateEdge::new(i as u32, n.index, n.distance_km)))
        .collect();
    edges.sort_unstable_by(CandidateEdge::canonical_cmp);
    edges.dedup_by(|x, y| x.a == y.a && x.b == y.b);
    edges
}

/// Eligible candidate edges for the satellites at `positions`.
pub fn candidate_edges(positions: &[EciPosition], mode: CandidateMode, elig: &Eligibility) -> Vec<CandidateEdge> {
    edges_from_lists(&neighbor_lists(positions, mode, elig, false))
}

/// Symmetric adjacency over candidate edges, each list sorted by (distance, index).
#[derive(Debug, Clone, Default)]
pub struct CandidateGraph {
    lists: Vec<Vec<Neighbor>>,
}

impl CandidateGraph {
    pub fn from_edges(node_count: usize, edges: &[CandidateEdge], parallel: bool) -> Self {
        let mut lists = vec![Vec::new(); node_count];
        for e in edges {
            lists[e.a as usize].push(Neighbor { index: e.b, distance_km: e.distance_km });
            lists[e.b as usize].push(Neighbor { index: e.a, distance_km: e.distance_km });
        }
        if parallel {
            lists.par_iter_mut().for_each(|l: &mut Vec<Neighbor>| l.sort_by(Neighbor::cmp_by_distance));
        } else {
            lists.iter_mut().for_each(|l| l.sort_by(Neighbor::cmp_by_distance));
        }
        Self { lists }
    }

    pub fn neighbors(&self, node: usize) -> &[Neighbor] {
        &self.lists[node]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}
