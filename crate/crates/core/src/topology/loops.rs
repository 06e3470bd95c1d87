//! Extra links ("loops") for satellites left with few links by the tree.
//!
//! Qualification uses the tree degree only, so every satellite decides
//! independently and the result does not depend on evaluation order.

use std::collections::HashSet;

use rayon::prelude::*;

use super::candidates::{CandidateEdge, CandidateGraph};
use crate::geometry::EciPosition;

fn tree_degrees(node_count: usize, tree: &[CandidateEdge]) -> Vec<usize> {
    let mut deg = vec![0usize; node_count];
    for e in tree {
        deg[e.a as usize] += 1;
        deg[e.b as usize] += 1;
    }
    deg
}

fn merge(tree: &[CandidateEdge], loops: impl IntoIterator<Item = CandidateEdge>) -> Vec<CandidateEdge> {
    let mut seen: HashSet<(u32, u32)> = tree.iter().map(|e| (e.a, e.b)).collect();
    let mut out = tree.to_vec();
    let mut extra: Vec<CandidateEdge> = loops.into_iter().filter(|e| seen.insert((e.a, e.b))).collect();
    extra.sort_unstable_by(CandidateEdge::canonical_cmp);
    out.extend(extra);
    out
}

struct LoopContext<'a> {
    tree: &'a [CandidateEdge],
    degrees: Vec<usize>,
    linked: HashSet<(u32, u32)>,
    candidates: &'a CandidateGraph,
    threshold: usize,
}

impl<'a> LoopContext<'a> {
    fn new(tree: &'a [CandidateEdge], candidates: &'a CandidateGraph, threshold: usize) -> Self {
        Self {
            tree,
            degrees: tree_degrees(candidates.len(), tree),
            linked: tree.iter().map(|e| (e.a, e.b)).collect(),
            candidates,
            threshold,
        }
    }

    fn under_connected(&self, node: usize) -> bool {
        self.degrees[node] <= self.threshold
    }

    /// Eligible partners of `node` that also qualify, nearest first.
    fn partners(&self, node: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.candidates.neighbors(node).iter().filter_map(move |nb| {
            let key = if (node as u32) < nb.index { (node as u32, nb.index) } else { (nb.index, node as u32) };
            (self.under_connected(nb.index as usize) && !self.linked.contains(&key)).then_some((nb.index, nb.distance_km))
        })
    }

    fn nearest(&self, node: usize) -> Option<CandidateEdge> {
        self.partners(node).next().map(|(j, d)| CandidateEdge::new(node as u32, j, d))
    }

    fn smart(&self, node: usize, positions: &[EciPosition]) -> Option<CandidateEdge> {
        let here = positions[node];
        let directions: Vec<EciPosition> = self
            .tree
            .iter()
            .filter_map(|e| match (e.a as usize == node, e.b as usize == node) {
                (true, _) => Some(e.b),
                (_, true) => Some(e.a),
                _ => None,
            })
            .filter_map(|other| (positions[other as usize] - here).normalized())
            .collect();

        let mut best: Option<(f64, f64, u32)> = None;
        for (j, d) in self.partners(node) {
            let Some(u) = (positions[j as usize] - here).normalized() else { continue };
            let score = opposition_score(&u, &directions);
            if score <= 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bs, bd, bj)) => score > bs || (score == bs && (d < bd || (d == bd && j < bj))),
            };
            if better {
                best = Some((score, d, j));
            }
        }
        match best {
            Some((_, d, j)) => Some(CandidateEdge::new(node as u32, j, d)),
            None => self.nearest(node),
        }
    }
}

/// How strongly direction `u` points away from the existing link directions:
/// the largest `-u . d` over unit vectors `d`. Zero when there are none.
pub fn opposition_score(u: &EciPosition, existing: &[EciPosition]) -> f64 {
    if existing.is_empty() {
        return 0.0;
    }
    existing.iter().map(|d| -u.dot(d)).fold(f64::NEG_INFINITY, f64::max)
}

/// Tree links plus, for every satellite whose tree degree is at most
/// `degree_threshold`, a link to its nearest eligible candidate that also
/// qualifies and is not yet linked. Duplicates are merged.
pub fn add_loops(tree: &[CandidateEdge], candidates: &CandidateGraph, degree_threshold: usize, parallel: bool) -> Vec<CandidateEdge> {
    let ctx = LoopContext::new(tree, candidates, degree_threshold);
    let pick = |i: usize| if ctx.under_connected(i) { ctx.nearest(i) } else { None };
    let loops: Vec<CandidateEdge> = if parallel {
        (0..candidates.len()).into_par_iter().filter_map(pick).collect()
    } else {
        (0..candidates.len()).filter_map(pick).collect()
    };
    merge(tree, loops)
}

/// Like [`add_loops`], but prefers the partner whose direction best opposes
/// an existing tree link (towards a +Grid-like neighbourhood). Ranking is by
/// opposition score, then distance, then node index. Nodes without any
/// opposing candidate fall back to the nearest qualifying partner.
pub fn add_smart_loops(
    positions: &[EciPosition],
    tree: &[CandidateEdge],
    candidates: &CandidateGraph,
    degree_threshold: usize,
    parallel: bool,
) -> Vec<CandidateEdge> {
    let ctx = LoopContext::new(tree, candidates, degree_threshold);
    let pick = |i: usize| if ctx.under_connected(i) { ctx.smart(i, positions) } else { None };
    let loops: Vec<CandidateEdge> = if parallel {
        (0..candidates.len()).into_par_iter().filter_map(pick).collect()
    } else {
        (0..candidates.len()).filter_map(pick).collect()
    };
    merge(tree, loops)
}
