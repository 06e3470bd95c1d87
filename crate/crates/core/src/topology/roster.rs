//! Ground-station roster files.
//!
//! One station per line:
//! `name, latitude_deg, longitude_deg, altitude_km, computing_type, cpu_millicores, memory_mib`.
//! Lines starting with `#` are comments; an optional header row starting
//! with `name` is skipped.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::computing::{Computing, ComputingType};
use crate::orbital::{GroundLocation, LocationError};

#[derive(Debug, Error)]
pub enum RosterError {
    #[error("cannot read roster {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("roster record {record}: {source}")]
    Csv { record: u64, source: csv::Error },
    #[error("roster record {record}: unknown computing type {value:?}")]
    ComputingType { record: u64, value: String },
    #[error("roster record {record}: {source}")]
    Location { record: u64, source: LocationError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStationSpec {
    pub name: String,
    pub location: GroundLocation,
    pub computing: Computing,
}

#[derive(Deserialize)]
struct Row {
    name: String,
    latitude_deg: f64,
    longitude_deg: f64,
    altitude_km: f64,
    computing_type: String,
    cpu_millicores: u64,
    memory_mib: u64,
}

pub fn parse_roster(text: &str) -> Result<Vec<GroundStationSpec>, RosterError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record_no = i as u64 + 1;
        let record = record.map_err(|source| RosterError::Csv { record: record_no, source })?;
        if i == 0 && record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("name")) {
            continue;
        }
        let row: Row = record.deserialize(None).map_err(|source| RosterError::Csv { record: record_no, source })?;
        let computing_type: ComputingType = row
            .computing_type
            .parse()
            .map_err(|_| RosterError::ComputingType { record: record_no, value: row.computing_type.clone() })?;
        let location = GroundLocation::from_degrees(row.latitude_deg, row.longitude_deg, row.altitude_km)
            .map_err(|source| RosterError::Location { record: record_no, source })?;
        out.push(GroundStationSpec {
            name: row.name,
            location,
            computing: Computing::new(computing_type, row.cpu_millicores, row.memory_mib),
        });
    }
    Ok(out)
}

pub fn load_roster(path: &Path) -> Result<Vec<GroundStationSpec>, RosterError> {
    let text = std::fs::read_to_string(path).map_err(|source| RosterError::Io { path: path.display().to_string(), source })?;
    parse_roster(&text)
}

/// The bundled 85-station roster (large cities spread over all continents).
pub fn default_roster() -> Vec<GroundStationSpec> {
    parse_roster(DEFAULT_ROSTER).expect("bundled roster is valid")
}

pub const DEFAULT_ROSTER: &str = include_str!("../../data/ground_stations.csv");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_roster_has_85_stations() {
        let roster = default_roster();
        assert_eq!(roster.len(), 85);
        let mut names: Vec<_> = roster.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 85);
        assert!(roster.iter().all(|s| s.computing.computing_type() == ComputingType::Cloud));
    }

    #[test]
    fn parses_header_comments_and_rows() {
        let text = "# test\nname,lat,lon,alt,type,cpu,mem\nVienna, 48.21, 16.37, 0.2, cloud, 64000, 131072\nEdge1,0,0,0,edge,1000,1024\n";
        let roster = parse_roster(text).unwrap();
        assert_eq!(roster.len(), 2);
        assert_eq!(roster[0].name, "Vienna");
        assert!((roster[0].location.latitude_rad().to_degrees() - 48.21).abs() < 1e-12);
        assert_eq!(roster[1].computing.computing_type(), ComputingType::Edge);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(parse_roster("a,0,0,0,fog,1,1\n"), Err(RosterError::ComputingType { record: 1, .. })));
        assert!(matches!(parse_roster("a,95,0,0,cloud,1,1\n"), Err(RosterError::Location { .. })));
        assert!(matches!(parse_roster("a,x,0,0,cloud,1,1\n"), Err(RosterError::Csv { .. })));
        assert!(matches!(parse_roster("a,0,0\n"), Err(RosterError::Csv { .. })));
    }
}
