use std::fmt;

use serde::{Deserialize, Serialize};

use super::computing::Computing;
use crate::geometry::EciPosition;
use crate::orbital::{ground_station_position, GroundLocation, KeplerError, OrbitalElements};
use crate::time::SimTime;

/// Dense node identifier. Satellites occupy the lowest ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Satellite,
    GroundStation,
}

/// How a node moves over time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Motion {
    Orbit(OrbitalElements),
    Ground { location: GroundLocation, reference_epoch: SimTime },
}

impl Motion {
    pub fn position_at(&self, t: SimTime) -> Result<EciPosition, KeplerError> {
        match self {
            Motion::Orbit(el) => el.position_at(t),
            Motion::Ground { location, reference_epoch } => Ok(ground_station_position(location, t, *reference_epoch)),
        }
    }
}

/// A node of the continuum: a satellite or a ground station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub name: String,
    pub motion: Motion,
    pub position: EciPosition,
    pub computing: Computing,
}

impl NodeRecord {
    pub fn kind(&self) -> NodeKind {
        match self.motion {
            Motion::Orbit(_) => NodeKind::Satellite,
            Motion::Ground { .. } => NodeKind::GroundStation,
        }
    }

    pub fn is_satellite(&self) -> bool {
        self.kind() == NodeKind::Satellite
    }
}
