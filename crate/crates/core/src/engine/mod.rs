//! The simulation step loop, its state, plugins and metrics.

mod config;
mod metrics;
mod plugin;
mod scenario;
mod simulation;
mod snapshot;
mod state;
#[cfg(test)]
pub(crate) mod test_support;

pub use config::{duration_text, ConfigError, Pacing, SimulationConfig};
pub use metrics::{
    read_plugin_csv, read_step_csv, write_plugin_csv, write_step_csv, PluginTiming, ResourceSampler, StepMetrics,
};
pub use plugin::{HookPhase, PluginError, PluginHandle, SimPlugin};
pub use scenario::{
    build_graph, default_satellite_computing, duplicate_satellites, load_ground_stations, load_tle_satellites,
    SatelliteSpec, ScenarioError,
};
pub use simulation::{EngineError, Simulation};
pub use snapshot::{latest, publish, RouteSnapshot, SharedSnapshot, SnapshotPublisher};
pub use state::{QueryError, RouteTarget, RouteView, SimulationState};
