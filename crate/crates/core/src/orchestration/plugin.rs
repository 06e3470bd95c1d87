use std::collections::VecDeque;

use serde::Serialize;

use super::deployment::{release_workflow, DeploymentId};
use super::scheduler::{count_slo_violations, schedule_workflow};
use super::spec::WorkflowSpecification;
use crate::engine::{PluginError, SimPlugin, SimulationState};
use crate::time::SimTime;

/// What the scheduler did in one step.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SchedulerStepStats {
    pub step: u64,
    pub submitted: usize,
    pub deployed: usize,
    pub unschedulable: usize,
    pub released: usize,
    pub live: usize,
    /// `None` unless violation tracking is enabled.
    pub slo_violations: Option<usize>,
    pub scheduling_ms: f64,
}

/// Submits copies of a template workflow every step and schedules them
/// after the step's topology is in place.
///
/// Copies are named `"{template}#{n}"`. When the template has no origin,
/// origins are taken round robin from `origins`. Workflows that cannot be
/// placed are counted and dropped.
pub struct SimpleScheduler {
    template: WorkflowSpecification,
    instances_per_step: usize,
    origins: Vec<String>,
    release_after: Option<u64>,
    track_slo: bool,
    next_origin: usize,
    submitted_total: u64,
    pending_release: VecDeque<(u64, DeploymentId)>,
    stats: Vec<SchedulerStepStats>,
}

impl SimpleScheduler {
    pub const NAME: &'static str = "scheduler";

    pub fn new(template: WorkflowSpecification, instances_per_step: usize) -> Self {
        SimpleScheduler {
            template,
            instances_per_step,
            origins: Vec::new(),
            release_after: None,
            track_slo: false,
            next_origin: 0,
            submitted_total: 0,
            pending_release: VecDeque::new(),
            stats: Vec::new(),
        }
    }

    pub fn with_origins(mut self, origins: Vec<String>) -> Self {
        self.origins = origins;
        self
    }

    /// Releases each deployment `steps` steps after it was placed.
    pub fn with_release_after(mut self, steps: u64) -> Self {
        self.release_after = Some(steps.max(1));
        self
    }

    /// Re-checks every live SLO at the end of each step.
    pub fn with_slo_tracking(mut self, enabled: bool) -> Self {
        self.track_slo = enabled;
        self
    }

    pub fn stats(&self) -> &[SchedulerStepStats] {
        &self.stats
    }

    pub fn total_deployed(&self) -> usize {
        self.stats.iter().map(|s| s.deployed).sum()
    }

    pub fn total_unschedulable(&self) -> usize {
        self.stats.iter().map(|s| s.unschedulable).sum()
    }

    fn next_instance(&mut self) -> WorkflowSpecification {
        let mut wf = self.template.clone();
        wf.workflow_name = format!("{}#{}", self.template.workflow_name, self.submitted_total);
        self.submitted_total += 1;
        if wf.origin.is_none() && !self.origins.is_empty() {
            wf.origin = Some(self.origins[self.next_origin % self.origins.len()].clone());
            self.next_origin += 1;
        }
        wf
    }
}

impl SimPlugin for SimpleScheduler {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn post_step(&mut self, step: u64, _sim_time: SimTime, state: &mut SimulationState) -> Result<(), PluginError> {
        let start = std::time::Instant::now();
        let mut stats = SchedulerStepStats { step, ..Default::default() };

        while self.pending_release.front().is_some_and(|(due, _)| *due <= step) {
            let (_, id) = self.pending_release.pop_front().expect("front exists");
            release_workflow(state, id)?;
            stats.released += 1;
        }

        for _ in 0..self.instances_per_step {
            let wf = self.next_instance();
            stats.submitted += 1;
            match schedule_workflow(state, &wf) {
                Ok(d) => {
                    stats.deployed += 1;
                    if let Some(after) = self.release_after {
                        self.pending_release.push_back((step + after, d.id));
                    }
                }
                Err(e) if e.is_unschedulable() => stats.unschedulable += 1,
                Err(e) => return Err(e.into()),
            }
        }
        stats.scheduling_ms = start.elapsed().as_secs_f64() * 1000.0;

        stats.live = state.deployments.live_count();
        if self.track_slo {
            stats.slo_violations = Some(count_slo_violations(state)?);
        }
        self.stats.push(stats);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::test_support::line_state;
    use crate::orchestration::TaskSpecification;
    use chrono::Duration;

    #[test]
    fn schedules_releases_and_counts() {
        let mut state = line_state();
        let t = state.sim_time() + Duration::seconds(60);
        let wf = WorkflowSpecification::new("w", vec![TaskSpecification::new("a", 1000, 1024)]);
        let mut plugin = SimpleScheduler::new(wf, 3).with_release_after(1).with_origins(vec!["n4".into()]).with_slo_tracking(true);
        plugin.post_step(1, t, &mut state).unwrap();
        assert_eq!(plugin.stats()[0].deployed, 3);
        assert_eq!(plugin.stats()[0].live, 3);
        plugin.post_step(2, t, &mut state).unwrap();
        let s = &plugin.stats()[1];
        assert_eq!((s.released, s.deployed, s.live), (3, 3, 3));
        assert_eq!(s.slo_violations, Some(0));
        let names: Vec<_> = state.deployments.live().map(|d| d.name.clone()).collect();
        assert!(names.contains(&"w#5".to_owned()));
    }

    #[test]
    fn unschedulable_workflows_are_not_fatal() {
        let mut state = line_state();
        let t = state.sim_time();
        let wf = WorkflowSpecification::new("big", vec![TaskSpecification::new("a", 10_000_000, 1)]);
        let mut plugin = SimpleScheduler::new(wf, 2);
        plugin.post_step(1, t, &mut state).unwrap();
        assert_eq!(plugin.total_unschedulable(), 2);
        assert_eq!(plugin.total_deployed(), 0);
    }

    #[test]
    fn unknown_origin_is_fatal() {
        let mut state = line_state();
        let t = state.sim_time();
        let wf = WorkflowSpecification::new("w", vec![TaskSpecification::new("a", 1, 1)]);
        let mut plugin = SimpleScheduler::new(wf, 1).with_origins(vec!["nowhere".into()]);
        assert!(plugin.post_step(1, t, &mut state).is_err());
    }
}
