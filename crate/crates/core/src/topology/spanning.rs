//! Spanning-tree construction for the inter-satellite backbone.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::candidates::{edges_from_lists, neighbor_lists, CandidateEdge, CandidateMode, Eligibility};
use super::grid::{Neighbor, SpatialGrid};
use super::union_find::UnionFind;
use crate::geometry::{segment_clears_sphere, EciPosition};

/// Kruskal over `candidate_edges` on a single thread: canonical sort, then
/// union-find. Returns the minimum spanning forest in acceptance order.
pub fn build_links_mst(node_count: usize, candidate_edges: &[CandidateEdge]) -> Vec<CandidateEdge> {
    let mut sorted = candidate_edges.to_vec();
    sorted.sort_unstable_by(CandidateEdge::canonical_cmp);
    kruskal_sorted(node_count, sorted)
}

fn kruskal_sorted(node_count: usize, sorted: impl IntoIterator<Item = CandidateEdge>) -> Vec<CandidateEdge> {
    let mut uf = UnionFind::new(node_count);
    let mut tree = Vec::with_capacity(node_count.saturating_sub(1));
    for e in sorted {
        if uf.components() <= 1 {
            break;
        }
        if uf.union(e.a as usize, e.b as usize) {
            tree.push(e);
        }
    }
    tree
}

#[derive(PartialEq)]
struct MergeHead {
    edge: CandidateEdge,
    list: u32,
    pos: u32,
}

impl Eq for MergeHead {}

impl PartialOrd for MergeHead {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MergeHead {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edge.canonical_cmp(&other.edge).then(self.list.cmp(&other.list))
    }
}

/// Kruskal fed by a k-way merge of per-satellite sorted neighbour lists.
///
/// Each list must be sorted by (distance, index); the merged stream is then
/// in canonical edge order and the result equals [`build_links_mst`] on the
/// union of the lists. Duplicate pairs are rejected by the union-find.
pub fn spanning_forest_from_sorted_lists(lists: &[Vec<Neighbor>]) -> Vec<CandidateEdge> {
    let edge_at = |list: usize, pos: usize| {
        let n = lists[list][pos];
        CandidateEdge::new(list as u32, n.index, n.distance_km)
    };
    let mut heap: BinaryHeap<Reverse<MergeHead>> = lists
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, _)| Reverse(MergeHead { edge: edge_at(i, 0), list: i as u32, pos: 0 }))
        .collect();

    // Each list is already in canonical order: at equal distance a smaller
    // neighbour index always gives a smaller (lower, higher) endpoint pair.
    let merged = std::iter::from_fn(move || {
        let Reverse(head) = heap.pop()?;
        let next = head.pos as usize + 1;
        if next < lists[head.list as usize].len() {
            heap.push(Reverse(MergeHead { edge: edge_at(head.list as usize, next), list: head.list, pos: next as u32 }));
        }
        Some(head.edge)
    });
    kruskal_sorted(lists.len(), merged)
}

/// Parallel variant: eligibility filtering and per-satellite sorting fan out
/// over worker threads; the tree itself is built sequentially.
pub fn build_links_pst(positions: &[EciPosition], mode: CandidateMode, elig: &Eligibility) -> Vec<CandidateEdge> {
    let mut lists = neighbor_lists(positions, mode, elig, true);
    lists.par_iter_mut().for_each(|l| l.sort_by(Neighbor::cmp_by_distance));
    spanning_forest_from_sorted_lists(&lists)
}

/// Sequential variant over the same candidate set.
pub fn build_links_mst_from_positions(positions: &[EciPosition], mode: CandidateMode, elig: &Eligibility) -> Vec<CandidateEdge> {
    let edges = edges_from_lists(&neighbor_lists(positions, mode, elig, false));
    build_links_mst(positions.len(), &edges)
}

/// For every satellite, the nearest eligible satellite in a different
/// component of `forest`, searched through the grid with a growing `k`.
/// Used when k-nearest candidates leave the forest split although eligible
/// bridges exist.
pub fn bridge_candidates(positions: &[EciPosition], forest: &[CandidateEdge], elig: &Eligibility, parallel: bool) -> Vec<CandidateEdge> {
    let n = positions.len();
    let mut uf = UnionFind::new(n);
    for e in forest {
        uf.union(e.a as usize, e.b as usize);
    }
    if uf.components() <= 1 {
        return Vec::new();
    }
    let labels: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let grid = SpatialGrid::for_shell(positions);
    let search = |i: usize| -> Option<CandidateEdge> {
        let mut k = 32usize;
        loop {
            let found = grid.k_nearest(&positions[i], k, elig.max_range_km, Some(i as u32));
            let exhausted = found.len() < k;
            if let Some(nb) = found.iter().find(|nb| {
                labels[nb.index as usize] != labels[i]
                    && segment_clears_sphere(&positions[i], &positions[nb.index as usize], elig.occlusion_radius_km)
            }) {
                return Some(CandidateEdge::new(i as u32, nb.index, nb.distance_km));
            }
            if exhausted || k >= n {
                return None;
            }
            k *= 4;
        }
    };
    let mut bridges: Vec<CandidateEdge> = if parallel {
        (0..n).into_par_iter().filter_map(search).collect()
    } else {
        (0..n).filter_map(search).collect()
    };
    bridges.sort_unstable_by(CandidateEdge::canonical_cmp);
    bridges.dedup_by(|x, y| x.a == y.a && x.b == y.b);
    bridges
}
