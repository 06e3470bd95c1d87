//! Assembling a node graph from TLE and roster inputs.

use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

use crate::constellation::expand_with_duplicates;
use crate::orbital::{parse_tle_file, OrbitalElements, TleError};
use crate::time::SimTime;
use crate::topology::{
    default_roster, load_roster, Computing, ComputingType, GraphError, GroundStationSpec, NetworkGraph, RosterError,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Tle { path: String, source: TleError },
    #[error(transparent)]
    Roster(#[from] RosterError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} contains no satellites")]
    NoSatellites(String),
}

/// A named satellite ready to be added to a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteSpec {
    pub name: String,
    pub elements: OrbitalElements,
}

/// Loads every record of a TLE file. Unnamed records are called after
/// their catalog number; repeated names get the catalog number appended.
pub fn load_tle_satellites(path: &Path) -> Result<Vec<SatelliteSpec>, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    let records = parse_tle_file(&text).map_err(|source| ScenarioError::Tle { path: path.display().to_string(), source })?;
    if records.is_empty() {
        return Err(ScenarioError::NoSatellites(path.display().to_string()));
    }
    let mut seen = HashSet::new();
    Ok(records
        .into_iter()
        .map(|r| {
            let base = r.name.clone().unwrap_or_else(|| format!("SAT-{}", r.catalog_number));
            let name = if seen.insert(base.clone()) { base } else { format!("{base} [{}]", r.catalog_number) };
            seen.insert(name.clone());
            SatelliteSpec { name, elements: r.elements }
        })
        .collect())
}

/// Applies epoch-offset duplication: copy `j` of satellite `s` is named
/// `"{s}/{j}"`.
pub fn duplicate_satellites(satellites: &[SatelliteSpec], multiplier: usize) -> Vec<SatelliteSpec> {
    let m = multiplier.max(1);
    let elements: Vec<OrbitalElements> = satellites.iter().map(|s| s.elements).collect();
    expand_with_duplicates(&elements, m)
        .into_iter()
        .enumerate()
        .map(|(i, elements)| {
            let (orig, j) = (i / m, i % m);
            let name = if j == 0 { satellites[orig].name.clone() } else { format!("{}/{j}", satellites[orig].name) };
            SatelliteSpec { name, elements }
        })
        .collect()
}

pub fn load_ground_stations(path: Option<&Path>) -> Result<Vec<GroundStationSpec>, ScenarioError> {
    Ok(match path {
        Some(p) => load_roster(p)?,
        None => default_roster(),
    })
}

/// Default satellite compute: an edge node of 16 cores and 32 GiB.
pub fn default_satellite_computing() -> Computing {
    Computing::new(ComputingType::Edge, 16_000, 32_768)
}

pub fn build_graph(
    satellites: &[SatelliteSpec],
    stations: &[GroundStationSpec],
    satellite_computing: Computing,
    time: SimTime,
) -> Result<NetworkGraph, GraphError> {
    let mut b = NetworkGraph::builder();
    for s in satellites {
        b.add_satellite(s.name.clone(), s.elements, satellite_computing);
    }
    for g in stations {
        b.add_ground_station(g.name.clone(), g.location, g.computing);
    }
    b.build(time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbital::format_tle;
    use chrono::{TimeZone, Utc};

    fn elements(m0: f64) -> OrbitalElements {
        OrbitalElements::from_mean_motion(15.05, 0.0001, 0.9, 1.0, 0.5, m0, Utc.with_ymd_and_hms(2024, 5, 1, 6, 0, 0).unwrap())
            .unwrap()
    }

    #[test]
    fn loads_and_duplicates_tle_satellites() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sats.tle");
        let mut text = String::new();
        for (name, cat, m0) in [(Some("ALPHA"), 1, 0.1), (None, 2, 0.2), (Some("ALPHA"), 3, 0.3)] {
            let record = format_tle("x", cat, &elements(m0));
            let mut lines = record.lines().skip(1);
            if let Some(n) = name {
                text.push_str(n);
                text.push('\n');
            }
            text.push_str(&format!("{}\n{}\n", lines.next().unwrap(), lines.next().unwrap()));
        }
        std::fs::write(&path, text).unwrap();
        let sats = load_tle_satellites(&path).unwrap();
        let names: Vec<_> = sats.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["ALPHA", "SAT-00002", "ALPHA [00003]"]);

        let tripled = duplicate_satellites(&sats, 3);
        assert_eq!(tripled.len(), 9);
        assert_eq!(tripled[1].name, "ALPHA/1");
        assert_eq!(tripled[3].name, "SAT-00002");
        let stations = load_ground_stations(None).unwrap();
        let g = build_graph(&tripled, &stations, default_satellite_computing(), elements(0.0).epoch()).unwrap();
        assert_eq!(g.node_count(), 9 + 85);
    }

    #[test]
    fn missing_and_empty_inputs_fail() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_tle_satellites(&dir.path().join("none.tle")), Err(ScenarioError::Io { .. })));
        let empty = dir.path().join("empty.tle");
        std::fs::write(&empty, "\n").unwrap();
        assert!(matches!(load_tle_satellites(&empty), Err(ScenarioError::NoSatellites(_))));
        let bad = dir.path().join("bad.tle");
        std::fs::write(&bad, "1 garbage\n2 garbage\n").unwrap();
        assert!(matches!(load_tle_satellites(&bad), Err(ScenarioError::Tle { .. })));
    }
}
