use std::any::Any;
use std::fmt;

use super::state::SimulationState;
use crate::time::SimTime;

pub type PluginError = Box<dyn std::error::Error + Send + Sync>;

/// User code run before and after every simulation step.
///
/// `pre_step` sees the state of the previous step together with the index
/// and time of the step about to run. `post_step` sees the finished step.
/// Hooks run one at a time, in registration order, with exclusive access
/// to the state. Returning an error aborts the run.
pub trait SimPlugin: Any + Send {
    fn name(&self) -> &str;

    fn pre_step(&mut self, _step: u64, _sim_time: SimTime, _state: &mut SimulationState) -> Result<(), PluginError> {
        Ok(())
    }

    fn post_step(&mut self, _step: u64, _sim_time: SimTime, _state: &mut SimulationState) -> Result<(), PluginError> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PluginHandle(pub(crate) usize);

impl PluginHandle {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookPhase {
    Pre,
    Post,
}

impl fmt::Display for HookPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HookPhase::Pre => "pre-step",
            HookPhase::Post => "post-step",
        })
    }
}
