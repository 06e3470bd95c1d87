//! Greedy SLO-aware placement of workflows.
//!
//! Tasks are placed in list order. Each task goes to the feasible node with
//! the lowest route latency to its reference (ties by node id); a task
//! without any reference goes to the lowest-id feasible node. If any task
//! cannot be placed, every placement of the workflow is undone.

use std::collections::BTreeMap;

use thiserror::Error;

use super::deployment::{place, roll_back, Deployment, DeployError, PlacedSlo};
use super::spec::{LatencyReference, SpecError, TaskSpecification, WorkflowSpecification};
use crate::engine::SimulationState;
use crate::routing::{expand_by_latency, RoutingError};
use crate::topology::{NodeId, NodeRecord};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error(transparent)]
    Invalid(#[from] SpecError),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown service {0:?}")]
    UnknownService(String),
    #[error("workflow {workflow:?} is unschedulable: no feasible node for task {task:?}")]
    Unschedulable { workflow: String, task: String },
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Deploy(#[from] DeployError),
}

impl ScheduleError {
    pub fn is_unschedulable(&self) -> bool {
        matches!(self, ScheduleError::Unschedulable { .. })
    }
}

fn fits(node: &NodeRecord, task: &TaskSpecification) -> bool {
    node.computing.fits(task.cpu_millicores, task.memory_mib)
        && task.required_computing_type.is_none_or(|t| node.computing.computing_type() == t)
}

/// Reference nodes for `task`, or `None` when it has nothing to be near.
fn reference_nodes(
    state: &SimulationState,
    task: &TaskSpecification,
    predecessor: Option<NodeId>,
) -> Result<Option<Vec<NodeId>>, ScheduleError> {
    match &task.latency_reference {
        LatencyReference::PredecessorTask => Ok(predecessor.map(|n| vec![n])),
        LatencyReference::NamedNode { node } => {
            let id = state.graph.resolve(node).ok_or_else(|| ScheduleError::UnknownNode(node.clone()))?;
            Ok(Some(vec![id]))
        }
        LatencyReference::NamedService { service } => {
            let hosts = state.deployments.services().hosts(service);
            if hosts.is_empty() {
                return Err(ScheduleError::UnknownService(service.clone()));
            }
            Ok(Some(hosts))
        }
    }
}

/// Route latency from the nearest reference to `node`, as reported by
/// [`SimulationState::route_between`].
fn measured_latency(state: &SimulationState, references: &[NodeId], node: NodeId) -> Result<Option<f64>, RoutingError> {
    let mut best: Option<f64> = None;
    for &r in references {
        if let Some(route) = state.route_between(r, node)? {
            best = Some(best.map_or(route.total_latency_ms, |b| b.min(route.total_latency_ms)));
        }
    }
    Ok(best)
}

/// Feasible nodes within `bound` of any reference, by (latency, id).
fn ranked_candidates(
    state: &SimulationState,
    task: &TaskSpecification,
    references: &[NodeId],
    bound: f64,
) -> Result<Vec<(f64, NodeId)>, RoutingError> {
    let mut best: BTreeMap<NodeId, f64> = BTreeMap::new();
    for &r in references {
        expand_by_latency(&state.graph, r, bound, |n, l| {
            if fits(state.graph.node(n).expect("expanded node exists"), task) {
                let e = best.entry(n).or_insert(l);
                *e = e.min(l);
            }
            true
        })?;
    }
    let mut ranked: Vec<_> = best.into_iter().map(|(n, l)| (l, n)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(ranked)
}

/// Picks the node for one task. Returns the node and its SLO record.
pub(crate) fn select_node(
    state: &SimulationState,
    task: &TaskSpecification,
    references: Option<&[NodeId]>,
) -> Result<Option<(NodeId, Option<PlacedSlo>)>, RoutingError> {
    let Some(references) = references else {
        return Ok(state.graph.nodes().iter().find(|n| fits(n, task)).map(|n| (n.id, None)));
    };
    let bound = task.max_latency_ms.unwrap_or(f64::INFINITY);
    let slo_record = |latency_ms: f64| {
        task.max_latency_ms.map(|max_latency_ms| PlacedSlo { max_latency_ms, reference_nodes: references.to_vec(), latency_ms })
    };

    if let [r] = references {
        // Lazy expansion: stop once the nearest feasible latency is passed.
        let mut chosen: Option<(f64, NodeId, f64)> = None;
        let mut failure = None;
        expand_by_latency(&state.graph, *r, bound, |n, l| {
            if chosen.is_some_and(|(cl, _, _)| l > cl) {
                return false;
            }
            if !fits(state.graph.node(n).expect("expanded node exists"), task) {
                return true;
            }
            match measured_latency(state, references, n) {
                Ok(Some(q)) if q <= bound => {
                    if chosen.is_none_or(|(cl, cn, _)| l < cl || (l == cl && n < cn)) {
                        chosen = Some((l, n, q));
                    }
                }
                Ok(_) => {}
                Err(e) => {
                    failure = Some(e);
                    return false;
                }
            }
            true
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        return Ok(chosen.map(|(_, n, q)| (n, slo_record(q))));
    }

    for (_, n) in ranked_candidates(state, task, references, bound)? {
        if let Some(q) = measured_latency(state, references, n)? {
            if q <= bound {
                return Ok(Some((n, slo_record(q))));
            }
        }
    }
    Ok(None)
}

/// Places every task of `workflow` or none of them.
pub fn schedule_workflow(state: &mut SimulationState, workflow: &WorkflowSpecification) -> Result<Deployment, ScheduleError> {
    workflow.validate()?;
    let origin = match &workflow.origin {
        Some(name) => Some(state.graph.resolve(name).ok_or_else(|| ScheduleError::UnknownNode(name.clone()))?),
        None => None,
    };
    let id = state.deployments.open(workflow.workflow_name.clone(), state.step_index);
    let mut predecessor = origin;
    for task in &workflow.tasks {
        let outcome = reference_nodes(state, task, predecessor)
            .and_then(|refs| select_node(state, task, refs.as_deref()).map_err(ScheduleError::from));
        let chosen = match outcome {
            Ok(Some(chosen)) => chosen,
            Ok(None) => {
                roll_back(state, id);
                return Err(ScheduleError::Unschedulable { workflow: workflow.workflow_name.clone(), task: task.task_name.clone() });
            }
            Err(e) => {
                roll_back(state, id);
                return Err(e);
            }
        };
        let (node, slo) = chosen;
        if let Err(e) = place(state, id, task, node, slo) {
            roll_back(state, id);
            return Err(e.into());
        }
        predecessor = Some(node);
    }
    Ok(state.deployments.get(id).expect("deployment is live").clone())
}

/// Re-evaluates a placement's latency SLO on the current graph.
pub fn slo_holds(state: &SimulationState, slo: &PlacedSlo, node: NodeId) -> Result<bool, RoutingError> {
    Ok(measured_latency(state, &slo.reference_nodes, node)?.is_some_and(|l| l <= slo.max_latency_ms))
}

/// Number of live placements whose SLO no longer holds.
pub fn count_slo_violations(state: &SimulationState) -> Result<usize, RoutingError> {
    let mut violations = 0;
    for p in state.deployments.placements() {
        if let Some(slo) = &p.slo {
            if !slo_holds(state, slo, p.node_id)? {
                violations += 1;
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::test_support::{line_state, small_state};
    use crate::orchestration::deployment::allocated_totals;
    use crate::topology::ComputingType;

    #[test]
    fn oversized_task_rolls_back_everything() {
        let mut state = small_state(1000, 1024);
        let wf = WorkflowSpecification::new(
            "w",
            vec![TaskSpecification::new("a", 100, 100), TaskSpecification::new("b", 100, 100), TaskSpecification::new("c", 5000, 1)],
        );
        let err = schedule_workflow(&mut state, &wf).unwrap_err();
        assert!(err.is_unschedulable());
        assert_eq!(allocated_totals(&state.graph), (0, 0));
        assert_eq!(state.deployments.live_count(), 0);
        assert!(state.deployments.services().is_empty());
    }

    #[test]
    fn tight_slo_on_named_node_places_on_that_node() {
        let mut state = line_state();
        let wf = WorkflowSpecification::new(
            "w",
            vec![TaskSpecification::new("a", 10, 10).with_max_latency(0.01, LatencyReference::NamedNode { node: "n2".into() })],
        );
        let d = schedule_workflow(&mut state, &wf).unwrap();
        assert_eq!(d.placements[0].node_id, state.graph.find("n2").unwrap());
        assert_eq!(d.placements[0].slo.as_ref().unwrap().latency_ms, 0.0);
    }

    #[test]
    fn without_reference_lowest_feasible_id_wins() {
        let mut state = line_state();
        let wf = WorkflowSpecification::new("w", vec![TaskSpecification::new("a", 10, 10)]);
        assert_eq!(schedule_workflow(&mut state, &wf).unwrap().placements[0].node_id, NodeId(0));
    }

    #[test]
    fn successors_follow_their_predecessor() {
        let mut state = line_state();
        let wf = WorkflowSpecification::new("w", vec![TaskSpecification::new("a", 10, 10), TaskSpecification::new("b", 10, 10)])
            .with_origin("n3");
        let d = schedule_workflow(&mut state, &wf).unwrap();
        let n3 = state.graph.find("n3").unwrap();
        assert_eq!(d.placements[0].node_id, n3);
        assert_eq!(d.placements[1].node_id, n3);
    }

    #[test]
    fn full_reference_pushes_to_the_nearest_neighbour() {
        let mut state = line_state();
        let n2 = state.graph.find("n2").unwrap();
        let free = state.graph.node(n2).unwrap().computing.free_cpu_millicores();
        let wf = WorkflowSpecification::new("w", vec![TaskSpecification::new("a", free, 10), TaskSpecification::new("b", 10, 10)])
            .with_origin("n2");
        let d = schedule_workflow(&mut state, &wf).unwrap();
        assert_eq!(d.placements[0].node_id, n2);
        // n1 and n3 are equally far from n2 on the line; the lower id wins.
        assert_eq!(d.placements[1].node_id, state.graph.find("n1").unwrap());
    }

    #[test]
    fn computing_type_filter_and_service_reference() {
        let mut state = line_state();
        let wf = WorkflowSpecification::new(
            "w",
            vec![TaskSpecification::new("db", 10, 10).with_max_latency(1e-3, LatencyReference::NamedNode { node: "n4".into() })],
        );
        schedule_workflow(&mut state, &wf).unwrap();
        let wf = WorkflowSpecification::new(
            "v",
            vec![TaskSpecification::new("api", 10, 10)
                .with_computing_type(ComputingType::Cloud)
                .with_max_latency(100.0, LatencyReference::NamedService { service: "db".into() })],
        );
        let d = schedule_workflow(&mut state, &wf).unwrap();
        let p = &d.placements[0];
        assert_eq!(state.graph.node(p.node_id).unwrap().computing.computing_type(), ComputingType::Cloud);
        assert!(slo_holds(&state, p.slo.as_ref().unwrap(), p.node_id).unwrap());
        let missing = WorkflowSpecification::new(
            "x",
            vec![TaskSpecification::new("q", 1, 1).with_max_latency(5.0, LatencyReference::NamedService { service: "none".into() })],
        );
        assert!(matches!(schedule_workflow(&mut state, &missing), Err(ScheduleError::UnknownService(_))));
        assert_eq!(count_slo_violations(&state).unwrap(), 0);
    }
}
