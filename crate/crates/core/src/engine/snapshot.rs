use std::sync::{Arc, RwLock};

use super::plugin::{PluginError, SimPlugin};
use super::state::{RouteView, SimulationState};
use crate::orchestration::ServiceDirectory;
use crate::routing::RoutingTables;
use crate::time::SimTime;
use crate::topology::NetworkGraph;

/// An owned copy of the routing-relevant state of one step.
#[derive(Debug, Clone)]
pub struct RouteSnapshot {
    pub step_index: u64,
    pub sim_time: SimTime,
    pub graph: NetworkGraph,
    pub tables: Option<RoutingTables>,
    pub services: ServiceDirectory,
}

impl RouteSnapshot {
    pub fn capture(state: &SimulationState) -> Self {
        RouteSnapshot {
            step_index: state.step_index(),
            sim_time: state.sim_time(),
            graph: state.graph.clone(),
            tables: state.tables().cloned(),
            services: state.deployments.services().clone(),
        }
    }

    pub fn view(&self) -> RouteView<'_> {
        RouteView { graph: &self.graph, tables: self.tables.as_ref(), services: &self.services }
    }
}

/// The latest snapshot, shared between the step loop and readers on other threads.
pub type SharedSnapshot = Arc<RwLock<Option<Arc<RouteSnapshot>>>>;

pub fn latest(shared: &SharedSnapshot) -> Option<Arc<RouteSnapshot>> {
    shared.read().unwrap_or_else(|e| e.into_inner()).clone()
}

pub fn publish(shared: &SharedSnapshot, snapshot: RouteSnapshot) {
    *shared.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::new(snapshot));
}

/// Publishes a [`RouteSnapshot`] after every step, and of the initial state
/// before the first one.
#[derive(Debug, Clone, Default)]
pub struct SnapshotPublisher {
    shared: SharedSnapshot,
}

impl SnapshotPublisher {
    pub fn new(shared: SharedSnapshot) -> Self {
        SnapshotPublisher { shared }
    }

    pub fn shared(&self) -> SharedSnapshot {
        Arc::clone(&self.shared)
    }
}

impl SimPlugin for SnapshotPublisher {
    fn name(&self) -> &str {
        "snapshot-publisher"
    }

    fn pre_step(&mut self, _step: u64, _sim_time: SimTime, state: &mut SimulationState) -> Result<(), PluginError> {
        if latest(&self.shared).is_none() {
            publish(&self.shared, RouteSnapshot::capture(state));
        }
        Ok(())
    }

    fn post_step(&mut self, _step: u64, _sim_time: SimTime, state: &mut SimulationState) -> Result<(), PluginError> {
        publish(&self.shared, RouteSnapshot::capture(state));
        Ok(())
    }
}
