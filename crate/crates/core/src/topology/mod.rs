//! Continuum nodes, their compute resources and the per-step link graph.

mod candidates;
mod computing;
mod graph;
mod grid;
mod ground;
mod loops;
mod node;
mod protocol;
mod roster;
mod spanning;
mod union_find;

pub use candidates::{
    candidate_edges, edges_from_lists, eligible_isl, neighbor_lists, total_weight, CandidateEdge, CandidateGraph, CandidateMode,
    Eligibility,
};
pub use computing::{Computing, ComputingType, InsufficientResource, OverRelease, Resource};
pub use graph::{Adjacent, GraphBuilder, GraphError, Link, LinkId, LinkKind, LinkSpec, NetworkGraph};
pub use grid::{Neighbor, SpatialGrid};
pub use ground::link_ground_nearest;
pub use loops::{add_loops, add_smart_loops, opposition_score};
pub use node::{Motion, NodeId, NodeKind, NodeRecord};
pub use protocol::{inter_satellite_links, update_links, LinkParams, LinkProtocol, LinkSummary, LoopMode};
pub use roster::{default_roster, load_roster, parse_roster, GroundStationSpec, RosterError, DEFAULT_ROSTER};
pub use spanning::{
    bridge_candidates, build_links_mst, build_links_mst_from_positions, build_links_pst, spanning_forest_from_sorted_lists,
};
pub use union_find::UnionFind;
