use std::path::Path;

use serde::{Deserialize, Serialize};
use sysinfo::{Pid, ProcessRefreshKind, ProcessesToUpdate, System};

use crate::time::SimTime;

/// Timings of one step. Serializes to the columns
/// `step,sim_time,position_ms,links_ms,tables_ms,plugins_ms,total_ms,cpu_pct,mem_mb`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub step: u64,
    pub sim_time: SimTime,
    pub position_ms: f64,
    pub links_ms: f64,
    pub tables_ms: f64,
    pub plugins_ms: f64,
    pub total_ms: f64,
    pub cpu_pct: f64,
    pub mem_mb: f64,
}

/// Hook timings of one plugin in one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluginTiming {
    pub step: u64,
    pub plugin: String,
    pub pre_ms: f64,
    pub post_ms: f64,
    pub total_ms: f64,
}

/// Samples CPU and resident memory of the current process.
pub struct ResourceSampler {
    system: System,
    pid: Option<Pid>,
}

impl Default for ResourceSampler {
    fn default() -> Self {
        Self::new()
    }
}

impl ResourceSampler {
    pub fn new() -> Self {
        let mut sampler = ResourceSampler { system: System::new(), pid: sysinfo::get_current_pid().ok() };
        sampler.sample();
        sampler
    }

    /// CPU percent since the previous sample (100 = one core) and resident
    /// memory in MiB. Zeros when the platform reports nothing.
    pub fn sample(&mut self) -> (f64, f64) {
        let Some(pid) = self.pid else { return (0.0, 0.0) };
        self.system.refresh_processes_specifics(
            ProcessesToUpdate::Some(&[pid]),
            false,
            ProcessRefreshKind::nothing().with_cpu().with_memory(),
        );
        match self.system.process(pid) {
            Some(p) => (f64::from(p.cpu_usage()), p.memory() as f64 / (1024.0 * 1024.0)),
            None => (0.0, 0.0),
        }
    }
}

pub fn write_step_csv(path: &Path, rows: &[StepMetrics]) -> Result<(), csv::Error> {
    write_csv(path, rows, "step,sim_time,position_ms,links_ms,tables_ms,plugins_ms,total_ms,cpu_pct,mem_mb")
}

pub fn write_plugin_csv(path: &Path, rows: &[PluginTiming]) -> Result<(), csv::Error> {
    write_csv(path, rows, "step,plugin,pre_ms,post_ms,total_ms")
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &str) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_step_csv(path: &Path) -> Result<Vec<StepMetrics>, csv::Error> {
    read_csv(path)
}

pub fn read_plugin_csv(path: &Path) -> Result<Vec<PluginTiming>, csv::Error> {
    read_csv(path)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, csv::Error> {
    csv::Reader::from_path(path)?.deserialize().collect()
}
