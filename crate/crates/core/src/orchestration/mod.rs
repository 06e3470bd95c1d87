//! Workflows, resource placements and the SLO-aware greedy scheduler.

mod deployment;
mod plugin;
mod resolver;
mod scheduler;
mod spec;

pub use deployment::{
    allocated_totals, deploy_task, release_workflow, DeployError, Deployment, DeploymentId, DeploymentRegistry, PlacedSlo,
    Placement, ReleaseError, ReleasedTotals, ServiceDirectory,
};
pub use plugin::{SchedulerStepStats, SimpleScheduler};
pub use resolver::{
    is_type, DeploymentOrchestrator, DeploymentSpecification, DirectUplinkOrchestrator, DirectUplinkSpecification,
    OrchestrationError, OrchestratorRegistry, WorkflowOrchestrator,
};
pub use scheduler::{count_slo_violations, schedule_workflow, slo_holds, ScheduleError};
pub use spec::{flood_response, LatencyReference, SpecError, TaskSpecification, WorkflowSpecification};
