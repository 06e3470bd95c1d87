use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chrono::{TimeDelta, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::routing::{RouterKind, TableSources};
use crate::time::SimTime;
use crate::topology::{LinkParams, LinkProtocol};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pacing {
    #[default]
    AsFastAsPossible,
    /// Sleep between steps so simulated time advances with the wall clock.
    RealTime,
}

impl Pacing {
    pub fn as_str(self) -> &'static str {
        match self {
            Pacing::AsFastAsPossible => "as_fast_as_possible",
            Pacing::RealTime => "real_time",
        }
    }
}

impl fmt::Display for Pacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "as_fast_as_possible" | "fast" => Ok(Pacing::AsFastAsPossible),
            "real_time" | "realtime" => Ok(Pacing::RealTime),
            other => Err(format!("unknown pacing {other:?} (expected as_fast_as_possible or real_time)")),
        }
    }
}

/// Durations as human-readable text such as `"60s"` or `"5m"`.
pub mod duration_text {
    use chrono::TimeDelta;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &TimeDelta, s: S) -> Result<S::Ok, S::Error> {
        let std = d.to_std().map_err(serde::ser::Error::custom)?;
        s.serialize_str(&humantime::format_duration(std).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<TimeDelta, D::Error> {
        let text = String::deserialize(d)?;
        crate::time::parse_duration(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub start_time: SimTime,
    #[serde(with = "duration_text")]
    pub step_duration: TimeDelta,
    pub step_count: u64,
    pub link_protocol: LinkProtocol,
    pub router: RouterKind,
    pub precompute_tables: bool,
    pub table_sources: TableSources,
    pub tle_path: Option<PathBuf>,
    pub ground_roster_path: Option<PathBuf>,
    pub links: LinkParams,
    pub pacing: Pacing,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            start_time: Utc.with_ymd_and_hms(2024, 12, 17, 0, 0, 0).unwrap(),
            step_duration: TimeDelta::seconds(60),
            step_count: 100,
            link_protocol: LinkProtocol::PstSmartLoop,
            router: RouterKind::Astar,
            precompute_tables: false,
            table_sources: TableSources::AllNodes,
            tle_path: None,
            ground_roster_path: None,
            links: LinkParams::default(),
            pacing: Pacing::AsFastAsPossible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("step duration must be positive")]
    NonPositiveStep,
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("precomputed routing tables require the dijkstra router")]
    TablesNeedDijkstra,
    #[error("invalid link parameter: {0}")]
    Links(String),
    #[error("simulated time overflows at step {0}")]
    TimeOverflow(u64),
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.step_duration <= TimeDelta::zero() {
            return Err(ConfigError::NonPositiveStep);
        }
        if self.step_count == 0 {
            return Err(ConfigError::NoSteps);
        }
        if self.precompute_tables && self.router != RouterKind::Dijkstra {
            return Err(ConfigError::TablesNeedDijkstra);
        }
        let l = &self.links;
        if !(l.max_isl_range_km.is_finite() && l.max_isl_range_km > 0.0) {
            return Err(ConfigError::Links("max_isl_range_km must be positive".into()));
        }
        if !(l.isl_bandwidth_mbps > 0.0 && l.ground_bandwidth_mbps > 0.0) {
            return Err(ConfigError::Links("bandwidths must be positive".into()));
        }
        self.time_at(self.step_count)?;
        Ok(())
    }

    /// Simulated time of step `k`; step 0 is the initial state.
    pub fn time_at(&self, k: u64) -> Result<SimTime, ConfigError> {
        i32::try_from(k)
            .ok()
            .and_then(|k| self.step_duration.checked_mul(k))
            .and_then(|d| self.start_time.checked_add_signed(d))
            .ok_or(ConfigError::TimeOverflow(k))
    }

    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
