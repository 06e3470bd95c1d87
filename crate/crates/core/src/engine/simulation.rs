use std::any::Any;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;

use super::config::{ConfigError, Pacing, SimulationConfig};
use super::metrics::{write_plugin_csv, write_step_csv, PluginTiming, ResourceSampler, StepMetrics};
use super::plugin::{HookPhase, PluginError, PluginHandle, SimPlugin};
use super::state::SimulationState;
use crate::routing::compute_routing_tables_for;
use crate::time::SimTime;
use crate::topology::{update_links, GraphError, NetworkGraph};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("plugins must be registered before the first step")]
    AlreadyStarted,
    #[error("plugin {plugin:?} failed in its {phase} hook at step {step}: {source}")]
    Plugin { plugin: String, phase: HookPhase, step: u64, source: PluginError },
    #[error("cannot write metrics: {0}")]
    Metrics(#[from] csv::Error),
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// The step loop.
///
/// Step `k` (counting from 1) moves the state to `start_time + k * step_duration`:
/// pre-step hooks, positions, links, optional routing tables, post-step hooks.
pub struct Simulation {
    config: SimulationConfig,
    state: SimulationState,
    plugins: Vec<Box<dyn SimPlugin>>,
    started: bool,
    sampling: bool,
    sampler: Option<ResourceSampler>,
    wall_origin: Option<Instant>,
}

impl Simulation {
    /// Brings `graph` to the configured start time: positions, links and,
    /// if enabled, routing tables.
    pub fn new(config: SimulationConfig, mut graph: NetworkGraph) -> Result<Self, EngineError> {
        config.validate()?;
        graph.update_positions(config.start_time)?;
        let summary = update_links(&mut graph, config.link_protocol, &config.links)?;
        let tables = config.precompute_tables.then(|| compute_routing_tables_for(&graph, config.table_sources));
        let mut state = SimulationState::new(graph, tables);
        state.link_summary = summary;
        Ok(Simulation { config, state, plugins: Vec::new(), started: false, sampling: true, sampler: None, wall_origin: None })
    }

    /// Turns per-step CPU and memory sampling on or off (on by default).
    pub fn with_resource_sampling(mut self, enabled: bool) -> Self {
        self.sampling = enabled;
        self
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn state(&self) -> &SimulationState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut SimulationState {
        &mut self.state
    }

    pub fn into_state(self) -> SimulationState {
        self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.step_index >= self.config.step_count
    }

    pub fn register_plugin(&mut self, plugin: Box<dyn SimPlugin>) -> Result<PluginHandle, EngineError> {
        if self.started {
            return Err(EngineError::AlreadyStarted);
        }
        self.plugins.push(plugin);
        Ok(PluginHandle(self.plugins.len() - 1))
    }

    pub fn register<P: SimPlugin>(&mut self, plugin: P) -> Result<PluginHandle, EngineError> {
        self.register_plugin(Box::new(plugin))
    }

    pub fn plugin_names(&self) -> Vec<&str> {
        self.plugins.iter().map(|p| p.name()).collect()
    }

    pub fn plugin<T: SimPlugin>(&self, handle: PluginHandle) -> Option<&T> {
        let p: &dyn Any = self.plugins.get(handle.0)?.as_ref();
        p.downcast_ref()
    }

    pub fn plugin_mut<T: SimPlugin>(&mut self, handle: PluginHandle) -> Option<&mut T> {
        let p: &mut dyn Any = self.plugins.get_mut(handle.0)?.as_mut();
        p.downcast_mut()
    }

    fn run_hooks(&mut self, phase: HookPhase, step: u64, t: SimTime, timings: &mut [PluginTiming]) -> Result<(), EngineError> {
        for (plugin, timing) in self.plugins.iter_mut().zip(timings.iter_mut()) {
            let start = Instant::now();
            let result = match phase {
                HookPhase::Pre => plugin.pre_step(step, t, &mut self.state),
                HookPhase::Post => plugin.post_step(step, t, &mut self.state),
            };
            let ms = ms_since(start);
            match phase {
                HookPhase::Pre => timing.pre_ms = ms,
                HookPhase::Post => timing.post_ms = ms,
            }
            result.map_err(|source| EngineError::Plugin { plugin: plugin.name().to_owned(), phase, step, source })?;
        }
        Ok(())
    }

    fn pace(&mut self, step: u64) {
        if self.config.pacing != Pacing::RealTime {
            return;
        }
        let origin = *self.wall_origin.get_or_insert_with(Instant::now);
        let offset = self.config.step_duration.to_std().unwrap_or_default().saturating_mul(step as u32);
        let due = origin + offset;
        let now = Instant::now();
        if due > now {
            std::thread::sleep(due - now);
        }
    }

    /// Runs one step and returns its metrics.
    pub fn step(&mut self) -> Result<&StepMetrics, EngineError> {
        if !self.started {
            self.started = true;
            if self.sampling {
                self.sampler = Some(ResourceSampler::new());
            }
        }
        let step = self.state.step_index + 1;
        let t = self.config.time_at(step)?;
        self.pace(step);

        let total = Instant::now();
        let mut timings: Vec<PluginTiming> = self
            .plugins
            .iter()
            .map(|p| PluginTiming { step, plugin: p.name().to_owned(), pre_ms: 0.0, post_ms: 0.0, total_ms: 0.0 })
            .collect();
        self.run_hooks(HookPhase::Pre, step, t, &mut timings)?;

        let phase = Instant::now();
        self.state.graph.update_positions(t)?;
        let position_ms = ms_since(phase);

        let phase = Instant::now();
        self.state.link_summary = update_links(&mut self.state.graph, self.config.link_protocol, &self.config.links)?;
        let links_ms = ms_since(phase);

        let phase = Instant::now();
        self.state.tables = self.config.precompute_tables.then(|| compute_routing_tables_for(&self.state.graph, self.config.table_sources));
        let tables_ms = ms_since(phase);

        self.state.step_index = step;
        self.state.sim_time = t;
        self.run_hooks(HookPhase::Post, step, t, &mut timings)?;
        let total_ms = ms_since(total);

        let (cpu_pct, mem_mb) = self.sampler.as_mut().map_or((0.0, 0.0), ResourceSampler::sample);
        for timing in &mut timings {
            timing.total_ms = timing.pre_ms + timing.post_ms;
        }
        let plugins_ms = timings.iter().map(|t| t.total_ms).sum();
        self.state.plugin_timings.extend(timings);
        self.state.metrics.push(StepMetrics {
            step,
            sim_time: t,
            position_ms,
            links_ms,
            tables_ms,
            plugins_ms,
            total_ms,
            cpu_pct,
            mem_mb,
        });
        tracing::debug!(step, total_ms, "step finished");
        Ok(self.state.metrics.last().expect("metrics just pushed"))
    }

    /// Runs the remaining steps up to the configured step count.
    pub fn run(&mut self) -> Result<(), EngineError> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(())
    }

    /// Writes `steps.csv` and `plugins.csv` into `dir`.
    pub fn write_metrics(&self, dir: &Path) -> Result<(), EngineError> {
        write_step_csv(&dir.join("steps.csv"), &self.state.metrics)?;
        write_plugin_csv(&dir.join("plugins.csv"), &self.state.plugin_timings)?;
        Ok(())
    }
}
