use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::spec::TaskSpecification;
use crate::engine::SimulationState;
use crate::topology::{InsufficientResource, NetworkGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeploymentId(pub u64);

impl fmt::Display for DeploymentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// The latency SLO a placement satisfied when it was made.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacedSlo {
    pub max_latency_ms: f64,
    /// Candidate reference nodes; the SLO holds against the nearest one.
    pub reference_nodes: Vec<NodeId>,
    pub latency_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Placement {
    pub deployment_id: DeploymentId,
    pub task_name: String,
    pub node_id: NodeId,
    pub allocated_cpu_millicores: u64,
    pub allocated_memory_mib: u64,
    pub deployed_at_step: u64,
    pub slo: Option<PlacedSlo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deployment {
    pub id: DeploymentId,
    pub name: String,
    pub deployed_at_step: u64,
    pub placements: Vec<Placement>,
}

/// Service name to hosting nodes, with a reference count per node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ServiceDirectory {
    entries: BTreeMap<String, BTreeMap<NodeId, u32>>,
}

impl ServiceDirectory {
    pub fn register(&mut self, service: &str, node: NodeId) {
        *self.entries.entry(service.to_owned()).or_default().entry(node).or_insert(0) += 1;
    }

    pub fn unregister(&mut self, service: &str, node: NodeId) {
        if let Some(hosts) = self.entries.get_mut(service) {
            if let Some(count) = hosts.get_mut(&node) {
                *count -= 1;
                if *count == 0 {
                    hosts.remove(&node);
                }
            }
            if hosts.is_empty() {
                self.entries.remove(service);
            }
        }
    }

    /// Hosting nodes in id order. Empty for unknown services.
    pub fn hosts(&self, service: &str) -> Vec<NodeId> {
        self.entries.get(service).map(|h| h.keys().copied().collect()).unwrap_or_default()
    }

    pub fn contains(&self, service: &str) -> bool {
        self.entries.contains_key(service)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeployError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown deployment {0}")]
    UnknownDeployment(DeploymentId),
    #[error("placement on node {node} rejected: {source}")]
    Rejected { node: NodeId, source: InsufficientResource },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReleaseError {
    #[error("unknown deployment {0}")]
    Unknown(DeploymentId),
    #[error("deployment {0} was already released")]
    AlreadyReleased(DeploymentId),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ReleasedTotals {
    pub placements: usize,
    pub cpu_millicores: u64,
    pub memory_mib: u64,
}

/// Live deployments and the ids of released ones.
#[derive(Debug, Clone, Default)]
pub struct DeploymentRegistry {
    next_id: u64,
    live: BTreeMap<DeploymentId, Deployment>,
    released: HashSet<DeploymentId>,
    services: ServiceDirectory,
}

impl DeploymentRegistry {
    pub fn open(&mut self, name: impl Into<String>, step: u64) -> DeploymentId {
        let id = DeploymentId(self.next_id);
        self.next_id += 1;
        self.live.insert(id, Deployment { id, name: name.into(), deployed_at_step: step, placements: Vec::new() });
        id
    }

    pub fn get(&self, id: DeploymentId) -> Option<&Deployment> {
        self.live.get(&id)
    }

    pub fn live(&self) -> impl Iterator<Item = &Deployment> {
        self.live.values()
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn placements(&self) -> impl Iterator<Item = &Placement> {
        self.live.values().flat_map(|d| d.placements.iter())
    }

    pub fn is_released(&self, id: DeploymentId) -> bool {
        self.released.contains(&id)
    }

    pub fn services(&self) -> &ServiceDirectory {
        &self.services
    }

    pub fn services_mut(&mut self) -> &mut ServiceDirectory {
        &mut self.services
    }

    fn record(&mut self, placement: Placement) {
        self.services.register(&placement.task_name, placement.node_id);
        self.live.get_mut(&placement.deployment_id).expect("deployment is open").placements.push(placement);
    }

    fn take(&mut self, id: DeploymentId) -> Option<Deployment> {
        let d = self.live.remove(&id)?;
        for p in &d.placements {
            self.services.unregister(&p.task_name, p.node_id);
        }
        Some(d)
    }
}

fn give_back(graph: &mut NetworkGraph, deployment: &Deployment) -> ReleasedTotals {
    let mut totals = ReleasedTotals::default();
    for p in &deployment.placements {
        graph
            .node_mut(p.node_id)
            .expect("placement node exists")
            .computing
            .release(p.allocated_cpu_millicores, p.allocated_memory_mib)
            .expect("placements are backed by allocations");
        totals.placements += 1;
        totals.cpu_millicores += p.allocated_cpu_millicores;
        totals.memory_mib += p.allocated_memory_mib;
    }
    totals
}

/// Allocates the task's resources on `node` and records the placement
/// under `deployment`. Both resources are allocated or neither.
pub fn deploy_task(
    state: &mut SimulationState,
    deployment: DeploymentId,
    task: &TaskSpecification,
    node: NodeId,
) -> Result<Placement, DeployError> {
    place(state, deployment, task, node, None)
}

pub(crate) fn place(
    state: &mut SimulationState,
    deployment: DeploymentId,
    task: &TaskSpecification,
    node: NodeId,
    slo: Option<PlacedSlo>,
) -> Result<Placement, DeployError> {
    if state.deployments.get(deployment).is_none() {
        return Err(DeployError::UnknownDeployment(deployment));
    }
    let record = state.graph.node_mut(node).ok_or(DeployError::UnknownNode(node))?;
    record.computing.allocate(task.cpu_millicores, task.memory_mib).map_err(|source| DeployError::Rejected { node, source })?;
    let placement = Placement {
        deployment_id: deployment,
        task_name: task.task_name.clone(),
        node_id: node,
        allocated_cpu_millicores: task.cpu_millicores,
        allocated_memory_mib: task.memory_mib,
        deployed_at_step: state.step_index,
        slo,
    };
    state.deployments.record(placement.clone());
    Ok(placement)
}

/// Returns every allocation of the deployment to its node.
pub fn release_workflow(state: &mut SimulationState, id: DeploymentId) -> Result<ReleasedTotals, ReleaseError> {
    if state.deployments.is_released(id) {
        return Err(ReleaseError::AlreadyReleased(id));
    }
    let deployment = state.deployments.take(id).ok_or(ReleaseError::Unknown(id))?;
    state.deployments.released.insert(id);
    Ok(give_back(&mut state.graph, &deployment))
}

/// Undoes a deployment that failed part way. The id is not marked released.
pub(crate) fn roll_back(state: &mut SimulationState, id: DeploymentId) {
    if let Some(deployment) = state.deployments.take(id) {
        give_back(&mut state.graph, &deployment);
    }
}

/// Sum of allocated cpu and memory over all nodes.
pub fn allocated_totals(graph: &NetworkGraph) -> (u64, u64) {
    graph
        .nodes()
        .iter()
        .fold((0, 0), |(c, m), n| (c + n.computing.allocated_cpu_millicores(), m + n.computing.allocated_memory_mib()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::test_support::small_state;
    use crate::topology::Resource;

    #[test]
    fn deploy_reduces_free_resources() {
        let mut state = small_state(1000, 1024);
        let id = state.deployments.open("w", 0);
        let p = deploy_task(&mut state, id, &TaskSpecification::new("t", 500, 512), NodeId(0)).unwrap();
        assert_eq!(p.node_id, NodeId(0));
        let c = state.graph.node(NodeId(0)).unwrap().computing;
        assert_eq!((c.free_cpu_millicores(), c.free_memory_mib()), (500, 512));
        assert_eq!(state.deployments.services().hosts("t"), vec![NodeId(0)]);
    }

    #[test]
    fn rejection_names_the_binding_resource() {
        let mut state = small_state(1000, 1024);
        let id = state.deployments.open("w", 0);
        let err = deploy_task(&mut state, id, &TaskSpecification::new("t", 2000, 128), NodeId(0)).unwrap_err();
        match err {
            DeployError::Rejected { source, .. } => assert_eq!(source.resource, Resource::Cpu),
            other => panic!("unexpected {other:?}"),
        }
        let err = deploy_task(&mut state, id, &TaskSpecification::new("t", 10, 4096), NodeId(0)).unwrap_err();
        assert!(matches!(err, DeployError::Rejected { source: InsufficientResource { resource: Resource::Memory, .. }, .. }));
        assert_eq!(allocated_totals(&state.graph), (0, 0));
        assert!(matches!(
            deploy_task(&mut state, id, &TaskSpecification::new("t", 1, 1), NodeId(99)),
            Err(DeployError::UnknownNode(_))
        ));
    }

    #[test]
    fn release_restores_and_guards_double_release() {
        let mut state = small_state(1000, 1024);
        let before = state.graph.node(NodeId(1)).unwrap().computing;
        let id = state.deployments.open("w", 0);
        deploy_task(&mut state, id, &TaskSpecification::new("a", 300, 100), NodeId(1)).unwrap();
        deploy_task(&mut state, id, &TaskSpecification::new("b", 200, 100), NodeId(1)).unwrap();
        let totals = release_workflow(&mut state, id).unwrap();
        assert_eq!(totals, ReleasedTotals { placements: 2, cpu_millicores: 500, memory_mib: 200 });
        assert_eq!(state.graph.node(NodeId(1)).unwrap().computing, before);
        assert!(state.deployments.services().is_empty());
        assert_eq!(release_workflow(&mut state, id), Err(ReleaseError::AlreadyReleased(id)));
        assert_eq!(release_workflow(&mut state, DeploymentId(77)), Err(ReleaseError::Unknown(DeploymentId(77))));
        assert_eq!(state.graph.node(NodeId(1)).unwrap().computing, before);
    }

    #[test]
    fn service_directory_counts_hosts() {
        let mut s = ServiceDirectory::default();
        s.register("x", NodeId(2));
        s.register("x", NodeId(2));
        s.register("x", NodeId(1));
        assert_eq!(s.hosts("x"), vec![NodeId(1), NodeId(2)]);
        s.unregister("x", NodeId(2));
        assert_eq!(s.hosts("x"), vec![NodeId(1), NodeId(2)]);
        s.unregister("x", NodeId(2));
        s.unregister("x", NodeId(1));
        assert!(!s.contains("x"));
        assert!(s.hosts("nope").is_empty());
    }
}
