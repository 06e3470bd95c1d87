use continuum_core::orchestration::{LatencyReference, TaskSpecification, WorkflowSpecification};
use continuum_core::topology::{ComputingType, NetworkGraph, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Placed(Vec<NodeId>),
    Unschedulable,
    /// A reference names no node or no running service.
    Invalid,
}

#[derive(Clone)]
struct Free {
    kind: ComputingType,
    cpu: u64,
    mem: u64,
}

fn free_resources(graph: &NetworkGraph) -> Vec<Free> {
    graph
        .nodes()
        .iter()
        .map(|n| Free { kind: n.computing.computing_type(), cpu: n.computing.free_cpu_millicores(), mem: n.computing.free_memory_mib() })
        .collect()
}

fn fits(f: &Free, task: &TaskSpecification) -> bool {
    f.cpu >= task.cpu_millicores && f.mem >= task.memory_mib && task.required_computing_type.is_none_or(|t| t == f.kind)
}

/// Reference nodes of `task` given the previous placements of the same
/// workflow. `Err(())` when a named reference does not exist.
fn references(
    graph: &NetworkGraph,
    wf: &WorkflowSpecification,
    task_index: usize,
    placed: &[NodeId],
    hosts: &dyn Fn(&str) -> Vec<NodeId>,
) -> Result<Option<Vec<NodeId>>, ()> {
    let task = &wf.tasks[task_index];
    match &task.latency_reference {
        LatencyReference::PredecessorTask => {
            if task_index == 0 {
                match &wf.origin {
                    Some(o) => graph.resolve(o).map(|id| Some(vec![id])).ok_or(()),
                    None => Ok(None),
                }
            } else {
                Ok(Some(vec![placed[task_index - 1]]))
            }
        }
        LatencyReference::NamedNode { node } => graph.resolve(node).map(|id| Some(vec![id])).ok_or(()),
        LatencyReference::NamedService { service } => {
            let mut h = hosts(service);
            h.extend(wf.tasks[..task_index].iter().zip(placed).filter(|(t, _)| &t.task_name == service).map(|(_, n)| *n));
            if h.is_empty() {
                Err(())
            } else {
                Ok(Some(h))
            }
        }
    }
}

fn reference_latency(latency: &[Vec<f64>], refs: &[NodeId], node: usize) -> f64 {
    refs.iter().map(|r| latency[r.index()][node]).fold(f64::INFINITY, f64::min)
}

/// Brute-force re-run of the greedy rule: every task in list order goes to
/// the feasible node of least latency to its references (ties by id), or
/// the lowest-id feasible node when it has no reference. Latencies come
/// from `latency`, typically [`crate::floyd_warshall`].
pub fn greedy_oracle(
    graph: &NetworkGraph,
    latency: &[Vec<f64>],
    hosts: &dyn Fn(&str) -> Vec<NodeId>,
    wf: &WorkflowSpecification,
) -> Verdict {
    let mut free = free_resources(graph);
    let mut placed = Vec::new();
    for (i, task) in wf.tasks.iter().enumerate() {
        let Ok(refs) = references(graph, wf, i, &placed, hosts) else { return Verdict::Invalid };
        let bound = task.max_latency_ms.unwrap_or(f64::INFINITY);
        let mut best: Option<(f64, usize)> = None;
        for (n, f) in free.iter().enumerate() {
            if !fits(f, task) {
                continue;
            }
            let l = match &refs {
                Some(r) => reference_latency(latency, r, n),
                None => 0.0,
            };
            if !l.is_finite() || l > bound {
                continue;
            }
            if best.is_none_or(|(bl, _)| l < bl) {
                best = Some((l, n));
            }
        }
        let Some((_, n)) = best else { return Verdict::Unschedulable };
        free[n].cpu -= task.cpu_millicores;
        free[n].mem -= task.memory_mib;
        placed.push(NodeId(n as u32));
    }
    Verdict::Placed(placed)
}

/// Whether any assignment in task order satisfies every resource and SLO
/// constraint, searching all combinations.
pub fn exhaustive_feasible(
    graph: &NetworkGraph,
    latency: &[Vec<f64>],
    hosts: &dyn Fn(&str) -> Vec<NodeId>,
    wf: &WorkflowSpecification,
) -> Option<bool> {
    fn go(
        graph: &NetworkGraph,
        latency: &[Vec<f64>],
        hosts: &dyn Fn(&str) -> Vec<NodeId>,
        wf: &WorkflowSpecification,
        free: &mut Vec<Free>,
        placed: &mut Vec<NodeId>,
    ) -> Result<bool, ()> {
        let i = placed.len();
        if i == wf.tasks.len() {
            return Ok(true);
        }
        let task = &wf.tasks[i];
        let refs = references(graph, wf, i, placed, hosts)?;
        let bound = task.max_latency_ms.unwrap_or(f64::INFINITY);
        for n in 0..free.len() {
            if !fits(&free[n], task) {
                continue;
            }
            if let Some(r) = &refs {
                let l = reference_latency(latency, r, n);
                if !l.is_finite() || l > bound {
                    continue;
                }
            }
            free[n].cpu -= task.cpu_millicores;
            free[n].mem -= task.memory_mib;
            placed.push(NodeId(n as u32));
            let found = go(graph, latency, hosts, wf, free, placed)?;
            placed.pop();
            free[n].cpu += task.cpu_millicores;
            free[n].mem += task.memory_mib;
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
    go(graph, latency, hosts, wf, &mut free_resources(graph), &mut Vec::new()).ok()
}
