use std::any::Any;

use thiserror::Error;

use super::deployment::{place, Deployment, DeployError};
use super::scheduler::{schedule_workflow, ScheduleError};
use super::spec::{TaskSpecification, WorkflowSpecification};
use crate::engine::SimulationState;
use crate::topology::{ComputingType, NodeId};

/// Anything that can be handed to an orchestrator. `kind` selects which one.
pub trait DeploymentSpecification: Any + Send + Sync {
    fn kind(&self) -> &'static str;
}

impl DeploymentSpecification for WorkflowSpecification {
    fn kind(&self) -> &'static str {
        WorkflowOrchestrator::KIND
    }
}

/// A single task pinned to the satellite a ground station is linked to.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectUplinkSpecification {
    pub ground_station: String,
    pub task: TaskSpecification,
}

impl DeploymentSpecification for DirectUplinkSpecification {
    fn kind(&self) -> &'static str {
        DirectUplinkOrchestrator::KIND
    }
}

#[derive(Debug, Error)]
pub enum OrchestrationError {
    #[error("no orchestrator handles {0:?} specifications")]
    NoMatch(&'static str),
    #[error("orchestrators {names:?} all handle {kind:?} specifications")]
    Ambiguous { kind: &'static str, names: Vec<String> },
    #[error("orchestrator {orchestrator:?} cannot handle a {kind:?} specification")]
    WrongSpecification { orchestrator: String, kind: &'static str },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Deploy(#[from] DeployError),
    #[error("unknown ground station {0:?}")]
    UnknownGroundStation(String),
    #[error("ground station {0:?} has no uplink satellite")]
    NoUplink(String),
    #[error("uplink satellite {node} cannot host task {task:?}")]
    UplinkInfeasible { node: NodeId, task: String },
}

impl OrchestrationError {
    pub fn is_unschedulable(&self) -> bool {
        match self {
            OrchestrationError::Schedule(e) => e.is_unschedulable(),
            OrchestrationError::UplinkInfeasible { .. } | OrchestrationError::NoUplink(_) => true,
            _ => false,
        }
    }
}

pub trait DeploymentOrchestrator: Send {
    fn name(&self) -> &str;

    /// The specification kind this orchestrator handles.
    fn handles(&self) -> &'static str;

    fn deploy(&self, spec: &dyn DeploymentSpecification, state: &mut SimulationState) -> Result<Deployment, OrchestrationError>;
}

fn downcast<'a, T: 'static>(orchestrator: &str, spec: &'a dyn DeploymentSpecification) -> Result<&'a T, OrchestrationError> {
    let any: &dyn Any = spec;
    any.downcast_ref::<T>()
        .ok_or_else(|| OrchestrationError::WrongSpecification { orchestrator: orchestrator.to_owned(), kind: spec.kind() })
}

/// Places workflows with [`schedule_workflow`].
#[derive(Debug, Clone, Copy, Default)]
pub struct WorkflowOrchestrator;

impl WorkflowOrchestrator {
    pub const KIND: &'static str = "workflow";
}

impl DeploymentOrchestrator for WorkflowOrchestrator {
    fn name(&self) -> &str {
        "workflow"
    }

    fn handles(&self) -> &'static str {
        Self::KIND
    }

    fn deploy(&self, spec: &dyn DeploymentSpecification, state: &mut SimulationState) -> Result<Deployment, OrchestrationError> {
        let workflow = downcast::<WorkflowSpecification>(self.name(), spec)?;
        Ok(schedule_workflow(state, workflow)?)
    }
}

/// Places a task on the ground station's current uplink satellite.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectUplinkOrchestrator;

impl DirectUplinkOrchestrator {
    pub const KIND: &'static str = "direct_uplink";
}

impl DeploymentOrchestrator for DirectUplinkOrchestrator {
    fn name(&self) -> &str {
        "direct-uplink"
    }

    fn handles(&self) -> &'static str {
        Self::KIND
    }

    fn deploy(&self, spec: &dyn DeploymentSpecification, state: &mut SimulationState) -> Result<Deployment, OrchestrationError> {
        let spec = downcast::<DirectUplinkSpecification>(self.name(), spec)?;
        let station = state
            .graph
            .resolve(&spec.ground_station)
            .filter(|id| !state.graph.node(*id).is_some_and(|n| n.is_satellite()))
            .ok_or_else(|| OrchestrationError::UnknownGroundStation(spec.ground_station.clone()))?;
        let uplink = state
            .graph
            .neighbors(station)
            .iter()
            .map(|a| a.neighbor)
            .find(|n| state.graph.node(*n).is_some_and(|r| r.is_satellite()))
            .ok_or_else(|| OrchestrationError::NoUplink(spec.ground_station.clone()))?;
        let node = state.graph.node(uplink).expect("neighbor exists");
        let type_ok = spec.task.required_computing_type.is_none_or(|t| node.computing.computing_type() == t);
        if !type_ok || !node.computing.fits(spec.task.cpu_millicores, spec.task.memory_mib) {
            return Err(OrchestrationError::UplinkInfeasible { node: uplink, task: spec.task.task_name.clone() });
        }
        let id = state.deployments.open(format!("uplink:{}", spec.ground_station), state.step_index());
        place(state, id, &spec.task, uplink, None)?;
        Ok(state.deployments.get(id).expect("deployment is live").clone())
    }
}

/// Registered orchestrators; each specification goes to the single one
/// that handles its kind.
#[derive(Default)]
pub struct OrchestratorRegistry {
    orchestrators: Vec<Box<dyn DeploymentOrchestrator>>,
}

impl OrchestratorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The workflow and direct-uplink orchestrators.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Box::new(WorkflowOrchestrator));
        r.register(Box::new(DirectUplinkOrchestrator));
        r
    }

    pub fn register(&mut self, orchestrator: Box<dyn DeploymentOrchestrator>) {
        self.orchestrators.push(orchestrator);
    }

    pub fn resolve(&self, spec: &dyn DeploymentSpecification) -> Result<&dyn DeploymentOrchestrator, OrchestrationError> {
        let kind = spec.kind();
        let mut matching = self.orchestrators.iter().filter(|o| o.handles() == kind);
        let first = matching.next().ok_or(OrchestrationError::NoMatch(kind))?;
        let rest: Vec<_> = matching.collect();
        if !rest.is_empty() {
            let names = std::iter::once(first).chain(rest).map(|o| o.name().to_owned()).collect();
            return Err(OrchestrationError::Ambiguous { kind, names });
        }
        Ok(first.as_ref())
    }

    pub fn deploy(&self, spec: &dyn DeploymentSpecification, state: &mut SimulationState) -> Result<Deployment, OrchestrationError> {
        self.resolve(spec)?.deploy(spec, state)
    }
}

/// `true` when the node's computing type matches.
pub fn is_type(state: &SimulationState, node: NodeId, t: ComputingType) -> bool {
    state.graph.node(node).is_some_and(|n| n.computing.computing_type() == t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::test_support::line_state;

    struct Other;
    impl DeploymentSpecification for Other {
        fn kind(&self) -> &'static str {
            "other"
        }
    }

    #[test]
    fn resolves_unique_orchestrator() {
        let mut registry = OrchestratorRegistry::new();
        registry.register(Box::new(WorkflowOrchestrator));
        let wf = WorkflowSpecification::new("w", vec![TaskSpecification::new("a", 1, 1)]);
        assert_eq!(registry.resolve(&wf).unwrap().name(), "workflow");
        assert!(matches!(registry.resolve(&Other), Err(OrchestrationError::NoMatch("other"))));
        registry.register(Box::new(WorkflowOrchestrator));
        match registry.resolve(&wf) {
            Err(OrchestrationError::Ambiguous { kind, names }) => {
                assert_eq!(kind, "workflow");
                assert_eq!(names.len(), 2);
            }
            _ => panic!("expected ambiguity"),
        }
    }

    #[test]
    fn direct_uplink_uses_the_linked_satellite() {
        let mut state = line_state();
        let registry = OrchestratorRegistry::with_defaults();
        let spec = DirectUplinkSpecification { ground_station: "n4".into(), task: TaskSpecification::new("cam", 100, 100) };
        let d = registry.deploy(&spec, &mut state).unwrap();
        assert_eq!(d.placements[0].node_id, state.graph.find("n3").unwrap());
        assert!(is_type(&state, d.placements[0].node_id, ComputingType::Edge));
        let too_big = DirectUplinkSpecification { ground_station: "n4".into(), task: TaskSpecification::new("x", 1_000_000, 1) };
        assert!(registry.deploy(&too_big, &mut state).unwrap_err().is_unschedulable());
        let sat = DirectUplinkSpecification { ground_station: "n1".into(), task: TaskSpecification::new("x", 1, 1) };
        assert!(matches!(registry.deploy(&sat, &mut state), Err(OrchestrationError::UnknownGroundStation(_))));
    }

    #[test]
    fn wrong_specification_is_reported() {
        let mut state = line_state();
        let err = WorkflowOrchestrator.deploy(&Other, &mut state).unwrap_err();
        assert!(matches!(err, OrchestrationError::WrongSpecification { .. }));
    }
}
