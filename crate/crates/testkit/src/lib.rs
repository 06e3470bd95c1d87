//! Reference implementations used to check the simulator.
//!
//! Everything here is written independently of the production code paths
//! it is compared against: dense Prim instead of Kruskal over candidate
//! lists, Floyd–Warshall instead of per-source Dijkstra, brute-force
//! placement instead of bounded expansion.

pub mod constellations;
pub mod paths;
pub mod placement;
pub mod spanning;
pub mod workloads;

pub use constellations::{connectable_constellation, positions_at, random_elements, Limits};
pub use paths::{floyd_warshall, mixed_graph};
pub use placement::{exhaustive_feasible, greedy_oracle, Verdict};
pub use spanning::{component_count, prim_forest};
pub use workloads::{low_latitude_stations, random_mixed_graph, random_workflow, scarce_state, walker_satellites};
