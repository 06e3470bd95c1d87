//! Simulation time helpers.
//!
//! Timestamps are UTC with millisecond resolution; differences are handled as
//! `f64` seconds.

use chrono::{DateTime, TimeDelta, Utc};

pub type SimTime = DateTime<Utc>;

/// Seconds elapsed from `from` to `to` (negative when `to` is earlier).
pub fn seconds_between(from: SimTime, to: SimTime) -> f64 {
    (to - from).num_milliseconds() as f64 / 1000.0
}

/// Rounds a floating second count to the millisecond grid.
pub fn delta_from_seconds(seconds: f64) -> TimeDelta {
    TimeDelta::milliseconds((seconds * 1000.0).round() as i64)
}

/// Parses durations such as `60s`, `1m`, `5min` or `1h 30m`.
pub fn parse_duration(text: &str) -> Result<TimeDelta, String> {
    let std = humantime::parse_duration(text.trim()).map_err(|e| e.to_string())?;
    TimeDelta::from_std(std).map_err(|e| e.to_string())
}
