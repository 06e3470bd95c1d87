//! Uniform spatial hash over 3D points for k-nearest-neighbour queries.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::geometry::EciPosition;

type CellKey = (i32, i32, i32);

/// A neighbour found by a proximity query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: u32,
    pub distance_km: f64,
}

impl Neighbor {
    /// Total order by distance, then index.
    pub fn cmp_by_distance(&self, other: &Self) -> Ordering {
        self.distance_km.total_cmp(&other.distance_km).then(self.index.cmp(&other.index))
    }
}

#[derive(PartialEq)]
struct HeapEntry(Neighbor);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_by_distance(&other.0)
    }
}

#[derive(Debug, Clone)]
pub struct SpatialGrid {
    cell_km: f64,
    cells: HashMap<CellKey, Vec<u32>>,
    points: Vec<EciPosition>,
    min: CellKey,
    max: CellKey,
}

impl SpatialGrid {
    pub fn new(points: &[EciPosition], cell_km: f64) -> Self {
        assert!(cell_km > 0.0 && cell_km.is_finite(), "cell size must be positive");
        let mut cells: HashMap<CellKey, Vec<u32>> = HashMap::new();
        let mut min = (i32::MAX, i32::MAX, i32::MAX);
        let mut max = (i32::MIN, i32::MIN, i32::MIN);
        for (i, p) in points.iter().enumerate() {
            let key = Self::key(cell_km, p);
            min = (min.0.min(key.0), min.1.min(key.1), min.2.min(key.2));
            max = (max.0.max(key.0), max.1.max(key.1), max.2.max(key.2));
            cells.entry(key).or_default().push(i as u32);
        }
        Self { cell_km, cells, points: points.to_vec(), min, max }
    }

    /// Picks a cell edge so that points spread over a spherical shell land
    /// a handful per occupied cell.
    pub fn for_shell(points: &[EciPosition]) -> Self {
        let n = points.len().max(1) as f64;
        let mean_radius = points.iter().map(EciPosition::norm).sum::<f64>() / n;
        let area = 4.0 * std::f64::consts::PI * mean_radius.max(1.0).powi(2);
        let cell = (area * 4.0 / n).sqrt().max(1.0);
        Self::new(points, cell)
    }

    fn key(cell_km: f64, p: &EciPosition) -> CellKey {
        (
            (p.x_km / cell_km).floor() as i32,
            (p.y_km / cell_km).floor() as i32,
            (p.z_km / cell_km).floor() as i32,
        )
    }

    pub fn cell_km(&self) -> f64 {
        self.cell_km
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Up to `k` nearest points to `query` within `max_distance_km`, sorted by
    /// (distance, index). `exclude` is skipped (typically the query's own index).
    pub fn k_nearest(&self, query: &EciPosition, k: usize, max_distance_km: f64, exclude: Option<u32>) -> Vec<Neighbor> {
        if k == 0 || self.points.is_empty() {
            return Vec::new();
        }
        let center = Self::key(self.cell_km, query);
        let max_ring = [
            (center.0 - self.min.0).abs(),
            (self.max.0 - center.0).abs(),
            (center.1 - self.min.1).abs(),
            (self.max.1 - center.1).abs(),
            (center.2 - self.min.2).abs(),
            (self.max.2 - center.2).abs(),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);

        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::with_capacity(k + 1);
        let visit = |key: CellKey, heap: &mut BinaryHeap<HeapEntry>| {
            if let Some(members) = self.cells.get(&key) {
                for &idx in members {
                    if Some(idx) == exclude {
                        continue;
                    }
                    let d = self.points[idx as usize].distance_to(query);
                    if d > max_distance_km {
                        continue;
                    }
                    let cand = Neighbor { index: idx, distance_km: d };
                    if heap.len() < k {
                        heap.push(HeapEntry(cand));
                    } else if let Some(top) = heap.peek() {
                        if cand.cmp_by_distance(&top.0) == Ordering::Less {
                            heap.pop();
                            heap.push(HeapEntry(cand));
                        }
                    }
                }
            }
        };

        for r in 0..=max_ring {
            for dx in -r..=r {
                for dy in -r..=r {
                    let on_face = dx.abs() == r || dy.abs() == r;
                    if on_face {
                        for dz in -r..=r {
                            visit((center.0 + dx, center.1 + dy, center.2 + dz), &mut heap);
                        }
                    } else {
                        visit((center.0 + dx, center.1 + dy, center.2 - r), &mut heap);
                        if r != 0 {
                            visit((center.0 + dx, center.1 + dy, center.2 + r), &mut heap);
                        }
                    }
                }
            }
            // Anything outside the visited block is at least r cells away.
            let reach = r as f64 * self.cell_km;
            let full = heap.len() == k && heap.peek().is_some_and(|top| top.0.distance_km <= reach);
            if full || reach > max_distance_km {
                break;
            }
        }

        let mut out: Vec<Neighbor> = heap.into_iter().map(|e| e.0).collect();
        out.sort_by(Neighbor::cmp_by_distance);
        out
    }
}
