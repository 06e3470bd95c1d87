use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::ComputingType;

/// What a task's latency SLO is measured against.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatencyReference {
    /// The node of the previous task, or the workflow origin for the first task.
    #[default]
    PredecessorTask,
    /// The nearest node currently hosting the named service.
    NamedService { service: String },
    /// A node given by name or numeric id.
    NamedNode { node: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpecification {
    pub task_name: String,
    pub cpu_millicores: u64,
    pub memory_mib: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_latency_ms: Option<f64>,
    #[serde(default)]
    pub latency_reference: LatencyReference,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_computing_type: Option<ComputingType>,
}

impl TaskSpecification {
    pub fn new(task_name: impl Into<String>, cpu_millicores: u64, memory_mib: u64) -> Self {
        TaskSpecification {
            task_name: task_name.into(),
            cpu_millicores,
            memory_mib,
            max_latency_ms: None,
            latency_reference: LatencyReference::PredecessorTask,
            required_computing_type: None,
        }
    }

    pub fn with_max_latency(mut self, max_latency_ms: f64, reference: LatencyReference) -> Self {
        self.max_latency_ms = Some(max_latency_ms);
        self.latency_reference = reference;
        self
    }

    pub fn with_computing_type(mut self, computing_type: ComputingType) -> Self {
        self.required_computing_type = Some(computing_type);
        self
    }
}

/// An ordered list of tasks deployed together.
///
/// `origin` names the node the workflow's input comes from. It is the
/// predecessor of the first task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowSpecification {
    pub workflow_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    pub tasks: Vec<TaskSpecification>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("workflow {0:?} has no tasks")]
    Empty(String),
    #[error("workflow {workflow:?} repeats task name {task:?}")]
    DuplicateTask { workflow: String, task: String },
    #[error("task {0:?} must request positive cpu and memory")]
    ZeroRequest(String),
    #[error("task {0:?} has a non-positive or non-finite max latency")]
    InvalidLatency(String),
    #[error("task {0:?} has a latency SLO on its predecessor but the workflow has no origin")]
    UndefinedReference(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid workflow document: {0}")]
    Parse(#[from] toml::de::Error),
}

impl WorkflowSpecification {
    pub fn new(workflow_name: impl Into<String>, tasks: Vec<TaskSpecification>) -> Self {
        WorkflowSpecification { workflow_name: workflow_name.into(), origin: None, tasks }
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.tasks.is_empty() {
            return Err(SpecError::Empty(self.workflow_name.clone()));
        }
        let mut names = HashSet::new();
        for (i, task) in self.tasks.iter().enumerate() {
            if !names.insert(task.task_name.as_str()) {
                return Err(SpecError::DuplicateTask { workflow: self.workflow_name.clone(), task: task.task_name.clone() });
            }
            if task.cpu_millicores == 0 || task.memory_mib == 0 {
                return Err(SpecError::ZeroRequest(task.task_name.clone()));
            }
            if let Some(l) = task.max_latency_ms {
                if !(l.is_finite() && l > 0.0) {
                    return Err(SpecError::InvalidLatency(task.task_name.clone()));
                }
                if i == 0 && task.latency_reference == LatencyReference::PredecessorTask && self.origin.is_none() {
                    return Err(SpecError::UndefinedReference(task.task_name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SpecError> {
        let spec: WorkflowSpecification = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn total_cpu_millicores(&self) -> u64 {
        self.tasks.iter().map(|t| t.cpu_millicores).sum()
    }

    pub fn total_memory_mib(&self) -> u64 {
        self.tasks.iter().map(|t| t.memory_mib).sum()
    }
}

/// The four-stage flood response workflow used by the bundled experiments.
///
/// Video from the disaster area is ingested and analysed on satellites
/// close to the origin ground station; results go to a cloud.
pub fn flood_response() -> WorkflowSpecification {
    WorkflowSpecification::new(
        "flood-response",
        vec![
            TaskSpecification::new("ingest", 250, 256)
                .with_computing_type(ComputingType::Edge)
                .with_max_latency(30.0, LatencyReference::PredecessorTask),
            TaskSpecification::new("fuse", 500, 512)
                .with_computing_type(ComputingType::Edge)
                .with_max_latency(20.0, LatencyReference::PredecessorTask),
            TaskSpecification::new("detect", 1000, 1024)
                .with_computing_type(ComputingType::Edge)
                .with_max_latency(20.0, LatencyReference::PredecessorTask),
            TaskSpecification::new("analyze", 500, 512).with_computing_type(ComputingType::Cloud),
        ],
    )
}
