use continuum_core::EciPosition;

use crate::constellations::Limits;

pub(crate) fn distance(a: &EciPosition, b: &EciPosition) -> f64 {
    ((a.x_km - b.x_km).powi(2) + (a.y_km - b.y_km).powi(2) + (a.z_km - b.z_km).powi(2)).sqrt()
}

/// Every eligible pair `(i, j, distance)` with `i < j`.
pub fn eligible_pairs(positions: &[EciPosition], limits: &Limits) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if limits.allows(&positions[i], &positions[j]) {
                out.push((i as u32, j as u32, distance(&positions[i], &positions[j])));
            }
        }
    }
    out
}

/// Minimum spanning forest over all eligible pairs by dense Prim, grown
/// from every not yet reached vertex.
pub fn prim_forest(positions: &[EciPosition], limits: &Limits) -> Vec<(u32, u32, f64)> {
    let n = positions.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut forest = Vec::with_capacity(n.saturating_sub(1));
    for root in 0..n {
        if in_tree[root] {
            continue;
        }
        best[root] = 0.0;
        loop {
            let mut u = usize::MAX;
            for v in 0..n {
                if !in_tree[v] && best[v].is_finite() && (u == usize::MAX || best[v] < best[u]) {
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            in_tree[u] = true;
            if parent[u] != usize::MAX {
                forest.push((parent[u].min(u) as u32, parent[u].max(u) as u32, best[u]));
            }
            for v in 0..n {
                if !in_tree[v] && limits.allows(&positions[u], &positions[v]) {
                    let d = distance(&positions[u], &positions[v]);
                    if d < best[v] {
                        best[v] = d;
                        parent[v] = u;
                    }
                }
            }
        }
    }
    forest
}

/// Connected components of an undirected graph given by its edges.
pub fn component_count(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> EciPosition {
        EciPosition::new(7000.0 + x, y, 0.0)
    }

    #[test]
    fn prim_on_a_square() {
        let pts = [p(0.0, 0.0), p(100.0, 0.0), p(100.0, 100.0), p(0.0, 100.0), p(50.0, 50.0)];
        let forest = prim_forest(&pts, &Limits::default());
        assert_eq!(forest.len(), 4);
        let w: f64 = forest.iter().map(|e| e.2).sum();
        assert!((w - 4.0 * 50.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn components_of_two_pairs() {
        assert_eq!(component_count(5, [(0, 1), (2, 3)]), 3);
    }
}
