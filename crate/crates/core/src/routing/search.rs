//! Best-first search shared by the Dijkstra tables, A* and the scheduler.
//!
//! Paths are ordered by total latency, then hop count, then the node
//! sequence compared lexicographically from the source. The last two keys
//! only matter when latencies are exactly equal.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::topology::{NetworkGraph, NodeId};

pub(crate) const NONE: u32 = u32::MAX;

/// Per-node labels reused across searches on one thread. A slot belongs to
/// the current search only when its stamp equals `generation`, so starting
/// a search costs nothing beyond the nodes it touches.
#[derive(Default)]
struct Workspace {
    generation: u32,
    stamp: Vec<u32>,
    dist: Vec<f64>,
    hops: Vec<u32>,
    pred: Vec<u32>,
    settled: Vec<bool>,
    h: Vec<f64>,
    order: Vec<u32>,
    heap: BinaryHeap<Item>,
}

impl Workspace {
    fn begin(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.dist.resize(n, f64::INFINITY);
            self.hops.resize(n, NONE);
            self.pred.resize(n, NONE);
            self.settled.resize(n, false);
            self.h.resize(n, f64::NAN);
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        self.order.clear();
        self.heap.clear();
    }

    fn touch(&mut self, v: usize) {
        if self.stamp[v] != self.generation {
            self.stamp[v] = self.generation;
            self.dist[v] = f64::INFINITY;
            self.hops[v] = NONE;
            self.pred[v] = NONE;
            self.settled[v] = false;
            self.h[v] = f64::NAN;
        }
    }

    fn live(&self, v: usize) -> bool {
        self.stamp[v] == self.generation
    }
}

thread_local! {
    static POOL: RefCell<Vec<Workspace>> = const { RefCell::new(Vec::new()) };
}

/// Result of a search, valid inside the `finish` callback of [`best_first`].
pub(crate) struct ShortestPaths<'a> {
    ws: &'a Workspace,
}

impl ShortestPaths<'_> {
    pub fn dist(&self, v: u32) -> f64 {
        if self.ws.live(v as usize) {
            self.ws.dist[v as usize]
        } else {
            f64::INFINITY
        }
    }

    pub fn pred(&self, v: u32) -> u32 {
        if self.ws.live(v as usize) {
            self.ws.pred[v as usize]
        } else {
            NONE
        }
    }

    /// Nodes in the order they were settled.
    pub fn order(&self) -> &[u32] {
        &self.ws.order
    }

    pub fn node_sequence(&self, target: u32) -> Vec<NodeId> {
        let mut seq = Vec::new();
        let mut cur = target;
        while cur != NONE {
            seq.push(NodeId(cur));
            cur = self.pred(cur);
        }
        seq.reverse();
        seq
    }
}

#[derive(Clone, Copy)]
struct Item {
    key: f64,
    hops: u32,
    node: u32,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then(other.hops.cmp(&self.hops)).then(other.node.cmp(&self.node))
    }
}

fn lex_less(pred: &[u32], a: u32, b: u32) -> bool {
    let walk = |mut cur: u32| {
        let mut seq = Vec::new();
        while cur != NONE {
            seq.push(cur);
            cur = pred[cur as usize];
        }
        seq.reverse();
        seq
    };
    walk(a) < walk(b)
}

/// Runs a best-first search from `source`.
///
/// `heuristic` must never overestimate the remaining latency (zero gives
/// Dijkstra). Nodes whose estimated total exceeds `bound` are never
/// queued. `visit(node, g, h)` is called as each node is settled; returning
/// `false` stops the search. `finish` reads the labels afterwards.
pub(crate) fn best_first<H, V, F, R>(graph: &NetworkGraph, source: NodeId, heuristic: H, bound: f64, visit: V, finish: F) -> R
where
    H: Fn(u32) -> f64,
    V: FnMut(u32, f64, f64) -> bool,
    F: FnOnce(&ShortestPaths<'_>) -> R,
{
    // Searches may nest through `visit`, so each takes its own workspace.
    let mut ws = POOL.with(|p| p.borrow_mut().pop()).unwrap_or_default();
    ws.begin(graph.node_count());
    run(&mut ws, graph, source.0, heuristic, bound, visit);
    let out = finish(&ShortestPaths { ws: &ws });
    POOL.with(|p| p.borrow_mut().push(ws));
    out
}

fn run<H, V>(ws: &mut Workspace, graph: &NetworkGraph, s: u32, heuristic: H, bound: f64, mut visit: V)
where
    H: Fn(u32) -> f64,
    V: FnMut(u32, f64, f64) -> bool,
{
    let h = |ws: &mut Workspace, v: usize| {
        if ws.h[v].is_nan() {
            ws.h[v] = heuristic(v as u32);
        }
        ws.h[v]
    };

    let si = s as usize;
    ws.touch(si);
    let h0 = h(ws, si);
    if h0 > bound {
        return;
    }
    ws.dist[si] = 0.0;
    ws.hops[si] = 0;
    let mut heap = std::mem::take(&mut ws.heap);
    heap.push(Item { key: h0, hops: 0, node: s });

    while let Some(Item { node: u, .. }) = heap.pop() {
        let ui = u as usize;
        if ws.settled[ui] {
            continue;
        }
        ws.settled[ui] = true;
        ws.order.push(u);
        let hu_est = h(ws, ui);
        if !visit(u, ws.dist[ui], hu_est) {
            break;
        }
        let (du, hu) = (ws.dist[ui], ws.hops[ui]);
        for adj in graph.neighbors(NodeId(u)) {
            let v = adj.neighbor.0;
            let vi = v as usize;
            ws.touch(vi);
            if ws.settled[vi] {
                continue;
            }
            let link = graph.link(adj.link).expect("adjacency references a live link");
            let nd = du + link.latency_ms;
            let nh = hu + 1;
            let improves = nd < ws.dist[vi]
                || (nd == ws.dist[vi] && (nh < ws.hops[vi] || (nh == ws.hops[vi] && lex_less(&ws.pred, u, ws.pred[vi]))));
            if !improves {
                continue;
            }
            let f = nd + h(ws, vi);
            if f > bound {
                continue;
            }
            let key_changed = nd != ws.dist[vi] || nh != ws.hops[vi];
            ws.dist[vi] = nd;
            ws.hops[vi] = nh;
            ws.pred[vi] = u;
            if key_changed {
                heap.push(Item { key: f, hops: nh, node: v });
            }
        }
    }
    heap.clear();
    ws.heap = heap;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::test_graphs::random_geometric_graph;

    fn distances(graph: &NetworkGraph, source: u32) -> Vec<f64> {
        let n = graph.node_count() as u32;
        best_first(graph, NodeId(source), |_| 0.0, f64::INFINITY, |_, _, _| true, |sp| (0..n).map(|v| sp.dist(v)).collect())
    }

    #[test]
    fn reused_and_nested_searches_agree_with_fresh_ones() {
        let big = random_geometric_graph(80, 120, 7);
        let small = random_geometric_graph(20, 30, 8);
        let expected: Vec<Vec<f64>> = (0..80).map(|s| distances(&big, s)).collect();
        let expected_small: Vec<Vec<f64>> = (0..20).map(|s| distances(&small, s)).collect();
        // Alternating graph sizes reuses workspaces with stale slots.
        for s in 0..20 {
            assert_eq!(distances(&small, s), expected_small[s as usize]);
            assert_eq!(distances(&big, s), expected[s as usize]);
        }
        let mut inner = Vec::new();
        let outer = best_first(
            &big,
            NodeId(3),
            |_| 0.0,
            f64::INFINITY,
            |u, _, _| {
                inner.push(distances(&big, u));
                true
            },
            |sp| (0..80).map(|v| sp.dist(v)).collect::<Vec<_>>(),
        );
        assert_eq!(outer, expected[3]);
        assert!(inner.len() > 1);
        for (row, u) in inner.iter().zip(best_first(&big, NodeId(3), |_| 0.0, f64::INFINITY, |_, _, _| true, |sp| sp.order().to_vec())) {
            assert_eq!(row, &expected[u as usize]);
        }
    }

    #[test]
    fn bounded_search_leaves_far_nodes_unreached() {
        let g = random_geometric_graph(60, 80, 3);
        let d = best_first(&g, NodeId(0), |_| 0.0, 5.0, |_, _, _| true, |sp| (0..60).map(|v| sp.dist(v)).collect::<Vec<_>>());
        assert!(d.iter().all(|&x| x <= 5.0 || x.is_infinite()));
        let full = distances(&g, 0);
        for (a, b) in d.iter().zip(&full) {
            if a.is_finite() {
                assert_eq!(a, b);
            }
        }
    }
}
