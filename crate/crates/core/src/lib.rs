//! Discrete-step simulation of the Edge, Cloud and LEO satellite continuum.
//!
//! Each simulation step recomputes every node position, rebuilds the physical
//! link graph with a configurable link protocol, optionally precomputes
//! routing tables and then hands the full state to registered plugins.
//!
//! The crate is organised bottom-up:
//!
//! * [`orbital`]: TLE parsing, Kepler propagation and ground rotation.
//! * [`topology`]: nodes, compute resources, link eligibility and the link
//!   protocols that rebuild the [`topology::NetworkGraph`] every step.
//! * [`routing`]: Dijkstra routing tables and on-demand A* routes.
//! * [`engine`]: the step loop, plugins and per-step metrics.
//! * [`orchestration`]: workflows, placements and the SLO-aware scheduler.
//! * [`constellation`]: Walker-delta shell generator used for experiments.

pub mod constants;
pub mod constellation;
pub mod engine;
pub mod geometry;
pub mod orbital;
pub mod orchestration;
pub mod routing;
pub mod time;
pub mod topology;

pub use geometry::EciPosition;
pub use time::SimTime;
