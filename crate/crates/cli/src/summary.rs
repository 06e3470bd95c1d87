use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use continuum_core::engine::{read_plugin_csv, read_step_csv};
use continuum_core::orchestration::SimpleScheduler;
use serde::Serialize;
use thiserror::Error;

use crate::experiment::RunSummary;

#[derive(Debug, Error)]
pub enum SummarizeError {
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} has no steps")]
    Empty(PathBuf),
}

/// Means over one run's step metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub run: String,
    pub protocol: String,
    pub satellites: Option<usize>,
    pub steps: usize,
    pub mean_step_ms: f64,
    pub mean_scheduling_ms: f64,
    pub mean_cpu_pct: f64,
    pub mean_mem_mb: f64,
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Summarizes one run, given its output directory or its `steps.csv`.
/// `plugins.csv` and `summary.json` next to it are used when present.
pub fn summarize_run(path: &Path) -> Result<SummaryRow, SummarizeError> {
    let (dir, steps_path) = if path.is_dir() {
        (path.to_owned(), path.join("steps.csv"))
    } else {
        (path.parent().map(Path::to_owned).unwrap_or_default(), path.to_owned())
    };
    let steps = read_step_csv(&steps_path).map_err(|source| SummarizeError::Csv { path: steps_path.clone(), source })?;
    if steps.is_empty() {
        return Err(SummarizeError::Empty(steps_path));
    }

    let plugins_path = dir.join("plugins.csv");
    let scheduling = if plugins_path.exists() {
        let rows = read_plugin_csv(&plugins_path).map_err(|source| SummarizeError::Csv { path: plugins_path, source })?;
        mean(rows.into_iter().filter(|r| r.plugin == SimpleScheduler::NAME).map(|r| r.post_ms))
    } else {
        0.0
    };

    let summary_path = dir.join("summary.json");
    let summary: Option<RunSummary> = if summary_path.exists() {
        let text = std::fs::read_to_string(&summary_path).map_err(|source| SummarizeError::Io { path: summary_path.clone(), source })?;
        Some(serde_json::from_str(&text).map_err(|source| SummarizeError::Json { path: summary_path, source })?)
    } else {
        None
    };

    let run = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok(SummaryRow {
        run,
        protocol: summary.as_ref().map_or_else(|| "unknown".to_owned(), |s| s.link_protocol.clone()),
        satellites: summary.map(|s| s.satellites),
        steps: steps.len(),
        mean_step_ms: mean(steps.iter().map(|s| s.total_ms)),
        mean_scheduling_ms: scheduling,
        mean_cpu_pct: mean(steps.iter().map(|s| s.cpu_pct)),
        mean_mem_mb: mean(steps.iter().map(|s| s.mem_mb)),
    })
}

pub fn summarize(paths: &[PathBuf]) -> Result<Vec<SummaryRow>, SummarizeError> {
    paths.iter().map(|p| summarize_run(p)).collect()
}

/// Fixed-width text table.
pub fn format_table(rows: &[SummaryRow]) -> String {
    let header = ["run", "protocol", "satellites", "steps", "mean_step_ms", "mean_sched_ms", "mean_cpu_pct", "mean_mem_mb"];
    let cells: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                r.run.clone(),
                r.protocol.clone(),
                r.satellites.map_or_else(|| "-".into(), |s| s.to_string()),
                r.steps.to_string(),
                format!("{:.3}", r.mean_step_ms),
                format!("{:.3}", r.mean_scheduling_ms),
                format!("{:.1}", r.mean_cpu_pct),
                format!("{:.1}", r.mean_mem_mb),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len()).map(|i| cells.iter().map(|c| c[i].len()).chain([header[i].len()]).max().unwrap()).collect();
    let mut out = String::new();
    let mut line = |fields: Vec<&str>| {
        let row: Vec<String> =
            fields.iter().enumerate().map(|(i, f)| if i < 2 { format!("{f:<w$}", w = widths[i]) } else { format!("{f:>w$}", w = widths[i]) }).collect();
        writeln!(out, "{}", row.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec());
    for c in &cells {
        line(c.iter().map(String::as_str).collect());
    }
    out
}

pub fn write_csv(rows: &[SummaryRow], writer: impl std::io::Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const STEPS: &str = "step,sim_time,position_ms,links_ms,tables_ms,plugins_ms,total_ms,cpu_pct,mem_mb\n\
        1,2024-12-17T00:01:00Z,1,2,0,0.5,4,90,100\n\
        2,2024-12-17T00:02:00Z,1,2,0,0.5,6,110,102\n";

    #[test]
    fn means_of_a_single_run() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("steps.csv"), STEPS).unwrap();
        std::fs::write(dir.path().join("plugins.csv"), "step,plugin,pre_ms,post_ms,total_ms\n1,scheduler,0,3,3\n2,scheduler,0,5,5\n").unwrap();
        let rows = summarize(&[dir.path().to_owned()]).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!((r.steps, r.mean_step_ms, r.mean_scheduling_ms, r.mean_cpu_pct, r.mean_mem_mb), (2, 5.0, 4.0, 100.0, 101.0));
        assert_eq!(r.protocol, "unknown");
        let table = format_table(&rows);
        assert_eq!(table.lines().count(), 2);
        assert!(table.contains("5.000"));
    }

    #[test]
    fn empty_input_gives_empty_table() {
        assert!(summarize(&[]).unwrap().is_empty());
        assert_eq!(format_table(&[]).lines().count(), 1);
    }

    #[test]
    fn malformed_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("steps.csv");
        std::fs::write(&path, "step,sim_time\nx,y\n").unwrap();
        assert!(matches!(summarize_run(&path), Err(SummarizeError::Csv { .. })));
    }
}
