use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tag describing what kind of infrastructure a node's compute belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum ComputingType {
    Cloud,
    Edge,
}

impl fmt::Display for ComputingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComputingType::Cloud => "cloud",
            ComputingType::Edge => "edge",
        })
    }
}

impl FromStr for ComputingType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cloud" => Ok(ComputingType::Cloud),
            "edge" => Ok(ComputingType::Edge),
            other => Err(format!("unknown computing type {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Cpu,
    Memory,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::Cpu => "cpu",
            Resource::Memory => "memory",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("insufficient {resource}: requested {requested}, free {free}")]
pub struct InsufficientResource {
    pub resource: Resource,
    pub requested: u64,
    pub free: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("releasing {cpu_millicores} mc / {memory_mib} MiB exceeds the current allocation")]
pub struct OverRelease {
    pub cpu_millicores: u64,
    pub memory_mib: u64,
}

/// CPU and memory capacity of a node, with exclusive allocations.
///
/// Allocations never exceed the totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Computing {
    computing_type: ComputingType,
    total_cpu_millicores: u64,
    total_memory_mib: u64,
    allocated_cpu_millicores: u64,
    allocated_memory_mib: u64,
}

impl Computing {
    pub fn new(computing_type: ComputingType, total_cpu_millicores: u64, total_memory_mib: u64) -> Self {
        Self { computing_type, total_cpu_millicores, total_memory_mib, allocated_cpu_millicores: 0, allocated_memory_mib: 0 }
    }

    pub fn computing_type(&self) -> ComputingType {
        self.computing_type
    }
    pub fn total_cpu_millicores(&self) -> u64 {
        self.total_cpu_millicores
    }
    pub fn total_memory_mib(&self) -> u64 {
        self.total_memory_mib
    }
    pub fn allocated_cpu_millicores(&self) -> u64 {
        self.allocated_cpu_millicores
    }
    pub fn allocated_memory_mib(&self) -> u64 {
        self.allocated_memory_mib
    }
    pub fn free_cpu_millicores(&self) -> u64 {
        self.total_cpu_millicores - self.allocated_cpu_millicores
    }
    pub fn free_memory_mib(&self) -> u64 {
        self.total_memory_mib - self.allocated_memory_mib
    }

    pub fn fits(&self, cpu_millicores: u64, memory_mib: u64) -> bool {
        self.check(cpu_millicores, memory_mib).is_ok()
    }

    fn check(&self, cpu_millicores: u64, memory_mib: u64) -> Result<(), InsufficientResource> {
        if cpu_millicores > self.free_cpu_millicores() {
            return Err(InsufficientResource { resource: Resource::Cpu, requested: cpu_millicores, free: self.free_cpu_millicores() });
        }
        if memory_mib > self.free_memory_mib() {
            return Err(InsufficientResource { resource: Resource::Memory, requested: memory_mib, free: self.free_memory_mib() });
        }
        Ok(())
    }

    /// Allocates both resources or neither. CPU is reported first when both
    /// are short.
    pub fn allocate(&mut self, cpu_millicores: u64, memory_mib: u64) -> Result<(), InsufficientResource> {
        self.check(cpu_millicores, memory_mib)?;
        self.allocated_cpu_millicores += cpu_millicores;
        self.allocated_memory_mib += memory_mib;
        Ok(())
    }

    pub fn release(&mut self, cpu_millicores: u64, memory_mib: u64) -> Result<(), OverRelease> {
        if cpu_millicores > self.allocated_cpu_millicores || memory_mib > self.allocated_memory_mib {
            return Err(OverRelease { cpu_millicores, memory_mib });
        }
        self.allocated_cpu_millicores -= cpu_millicores;
        self.allocated_memory_mib -= memory_mib;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocate_and_release_conserve() {
        let mut c = Computing::new(ComputingType::Edge, 1000, 1024);
        c.allocate(500, 512).unwrap();
        assert_eq!((c.free_cpu_millicores(), c.free_memory_mib()), (500, 512));
        c.release(500, 512).unwrap();
        assert_eq!((c.free_cpu_millicores(), c.free_memory_mib()), (1000, 1024));
    }

    #[test]
    fn rejection_names_binding_resource_and_is_atomic() {
        let mut c = Computing::new(ComputingType::Edge, 1000, 1024);
        let err = c.allocate(2000, 128).unwrap_err();
        assert_eq!(err.resource, Resource::Cpu);
        let err = c.allocate(100, 4096).unwrap_err();
        assert_eq!(err.resource, Resource::Memory);
        assert_eq!(c.allocated_cpu_millicores(), 0);
        assert_eq!(c.allocated_memory_mib(), 0);
    }

    #[test]
    fn over_release_is_refused() {
        let mut c = Computing::new(ComputingType::Cloud, 10, 10);
        c.allocate(5, 5).unwrap();
        assert!(c.release(6, 1).is_err());
        assert_eq!(c.allocated_cpu_millicores(), 5);
    }
}
