use std::path::{Path, PathBuf};
use std::time::Instant;

use continuum_core::constellation::WalkerShell;
use continuum_core::engine::{
    build_graph, default_satellite_computing, duplicate_satellites, load_ground_stations, load_tle_satellites, EngineError,
    PluginHandle, SatelliteSpec, ScenarioError, SimPlugin, Simulation, SimulationConfig,
};
use continuum_core::orbital::{format_tle, ElementsError};
use continuum_core::orchestration::{flood_response, SchedulerStepStats, SimpleScheduler, SpecError, WorkflowSpecification};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub simulation: SimulationConfig,
    /// Each satellite is followed by `satellite_multiplier - 1` along-track copies.
    pub satellite_multiplier: usize,
    pub workflow_instances_per_step: usize,
    pub output_directory: PathBuf,
    /// Size of a generated Walker shell, used when no TLE file is given.
    pub walker_satellites: Option<usize>,
    /// Workflow template; the flood-response workflow when absent.
    pub workflow_path: Option<PathBuf>,
    pub release_after_steps: Option<u64>,
    pub track_slo_violations: bool,
    pub workers: Option<usize>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            simulation: SimulationConfig::default(),
            satellite_multiplier: 1,
            workflow_instances_per_step: 0,
            output_directory: PathBuf::from("results"),
            walker_satellites: None,
            workflow_path: None,
            release_after_steps: None,
            track_slo_violations: false,
            workers: None,
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.to_owned(), source })?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("satellite multiplier must be at least 1")]
    Multiplier,
    #[error("no satellites: pass a TLE file or a Walker shell size")]
    NoSatellites,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Elements(#[from] ElementsError),
    #[error(transparent)]
    Workflow(#[from] SpecError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: Box<dyn std::error::Error + Send + Sync> },
}

/// Headline numbers of a finished run, written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub link_protocol: String,
    pub router: String,
    pub satellites: usize,
    pub ground_stations: usize,
    pub steps: u64,
    pub step_duration_s: f64,
    pub workflow_instances_per_step: usize,
    pub end_to_end_s: f64,
    pub mean_step_ms: f64,
    pub mean_scheduling_ms: f64,
    pub mean_cpu_pct: f64,
    pub peak_mem_mb: f64,
    pub deployed: usize,
    pub unschedulable: usize,
    pub max_slo_violations: Option<usize>,
}

fn walker_satellites(n: usize, spec: &ExperimentSpec) -> Result<Vec<SatelliteSpec>, ElementsError> {
    Ok(WalkerShell::starlink_like(n)
        .generate(spec.simulation.start_time)?
        .into_iter()
        .enumerate()
        .map(|(i, elements)| SatelliteSpec { name: format!("WALKER-{i}"), elements })
        .collect())
}

/// Writes a Walker shell of `n` satellites as a TLE file.
pub fn write_walker_tle(path: &Path, shell: &WalkerShell, epoch: continuum_core::SimTime) -> Result<usize, ExperimentError> {
    let elements = shell.generate(epoch)?;
    let mut text = String::new();
    for (i, el) in elements.iter().enumerate() {
        text.push_str(&format_tle(&format!("WALKER-{i}"), (i + 1) as u32, el));
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    std::fs::write(path, text).map_err(|source| ExperimentError::Io { path: path.to_owned(), source })?;
    Ok(elements.len())
}

/// A simulation assembled from an [`ExperimentSpec`], ready to run.
pub struct Experiment {
    spec: ExperimentSpec,
    simulation: Simulation,
    scheduler: Option<PluginHandle>,
    satellites: usize,
    ground_stations: usize,
}

impl Experiment {
    /// Loads inputs and builds the initial state. Nothing is written yet.
    pub fn prepare(spec: ExperimentSpec) -> Result<Self, ExperimentError> {
        if spec.satellite_multiplier == 0 {
            return Err(ExperimentError::Multiplier);
        }
        spec.simulation.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        let base = match (&spec.simulation.tle_path, spec.walker_satellites) {
            (Some(path), _) => load_tle_satellites(path)?,
            (None, Some(n)) if n > 0 => walker_satellites(n, &spec)?,
            _ => return Err(ExperimentError::NoSatellites),
        };
        let satellites = duplicate_satellites(&base, spec.satellite_multiplier);
        let stations = load_ground_stations(spec.simulation.ground_roster_path.as_deref())?;
        let template = match &spec.workflow_path {
            Some(p) => WorkflowSpecification::load(p)?,
            None => flood_response(),
        };
        let graph = build_graph(&satellites, &stations, default_satellite_computing(), spec.simulation.start_time)
            .map_err(ScenarioError::from)?;
        let mut simulation = Simulation::new(spec.simulation.clone(), graph)?;
        let scheduler = if spec.workflow_instances_per_step > 0 {
            let mut plugin = SimpleScheduler::new(template, spec.workflow_instances_per_step)
                .with_origins(stations.iter().map(|s| s.name.clone()).collect())
                .with_slo_tracking(spec.track_slo_violations);
            if let Some(after) = spec.release_after_steps {
                plugin = plugin.with_release_after(after);
            }
            Some(simulation.register(plugin)?)
        } else {
            None
        };
        tracing::info!(satellites = satellites.len(), ground_stations = stations.len(), "experiment prepared");
        Ok(Experiment { satellites: satellites.len(), ground_stations: stations.len(), spec, simulation, scheduler })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn simulation(&self) -> &Simulation {
        &self.simulation
    }

    pub fn node_count(&self) -> usize {
        self.simulation.state().graph.node_count()
    }

    pub fn register<P: SimPlugin>(&mut self, plugin: P) -> Result<PluginHandle, ExperimentError> {
        Ok(self.simulation.register(plugin)?)
    }

    fn scheduler_stats(&self) -> &[SchedulerStepStats] {
        self.scheduler.and_then(|h| self.simulation.plugin::<SimpleScheduler>(h)).map_or(&[], |p| p.stats())
    }

    /// Runs every step and writes `steps.csv`, `plugins.csv`,
    /// `summary.json` and, with a scheduler, `scheduler.csv`.
    pub fn run(mut self) -> Result<RunSummary, ExperimentError> {
        let out = self.spec.output_directory.clone();
        std::fs::create_dir_all(&out).map_err(|source| ExperimentError::Io { path: out.clone(), source })?;
        let start = Instant::now();
        while !self.simulation.is_finished() {
            let m = self.simulation.step()?;
            tracing::debug!(step = m.step, total_ms = m.total_ms, "step");
        }
        let end_to_end_s = start.elapsed().as_secs_f64();
        self.simulation
            .write_metrics(&out)
            .map_err(|e| ExperimentError::Output { path: out.clone(), source: Box::new(e) })?;

        let stats = self.scheduler_stats();
        if self.scheduler.is_some() {
            let path = out.join("scheduler.csv");
            write_scheduler_csv(&path, stats).map_err(|e| ExperimentError::Output { path, source: Box::new(e) })?;
        }
        let summary = self.summarize(end_to_end_s);
        let path = out.join("summary.json");
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
        std::fs::write(&path, json + "\n").map_err(|e| ExperimentError::Output { path, source: Box::new(e) })?;
        Ok(summary)
    }

    fn summarize(&self, end_to_end_s: f64) -> RunSummary {
        let state = self.simulation.state();
        let metrics = state.metrics();
        let n = metrics.len().max(1) as f64;
        let scheduling: Vec<f64> =
            state.plugin_timings().iter().filter(|t| t.plugin == SimpleScheduler::NAME).map(|t| t.post_ms).collect();
        let stats = self.scheduler_stats();
        let cfg = self.simulation.config();
        RunSummary {
            link_protocol: cfg.link_protocol.to_string(),
            router: cfg.router.to_string(),
            satellites: self.satellites,
            ground_stations: self.ground_stations,
            steps: metrics.len() as u64,
            step_duration_s: cfg.step_duration.num_milliseconds() as f64 / 1000.0,
            workflow_instances_per_step: self.spec.workflow_instances_per_step,
            end_to_end_s,
            mean_step_ms: metrics.iter().map(|m| m.total_ms).sum::<f64>() / n,
            mean_scheduling_ms: if scheduling.is_empty() { 0.0 } else { scheduling.iter().sum::<f64>() / scheduling.len() as f64 },
            mean_cpu_pct: metrics.iter().map(|m| m.cpu_pct).sum::<f64>() / n,
            peak_mem_mb: metrics.iter().map(|m| m.mem_mb).fold(0.0, f64::max),
            deployed: stats.iter().map(|s| s.deployed).sum(),
            unschedulable: stats.iter().map(|s| s.unschedulable).sum(),
            max_slo_violations: stats.iter().filter_map(|s| s.slo_violations).max(),
        }
    }
}

fn write_scheduler_csv(path: &Path, stats: &[SchedulerStepStats]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "submitted", "deployed", "unschedulable", "released", "live", "slo_violations", "scheduling_ms"])?;
    for s in stats {
        w.write_record([
            s.step.to_string(),
            s.submitted.to_string(),
            s.deployed.to_string(),
            s.unschedulable.to_string(),
            s.released.to_string(),
            s.live.to_string(),
            s.slo_violations.map(|v| v.to_string()).unwrap_or_default(),
            s.scheduling_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Prepares and runs an experiment in one call.
pub fn run_experiment(spec: ExperimentSpec) -> Result<RunSummary, ExperimentError> {
    Experiment::prepare(spec)?.run()
}
