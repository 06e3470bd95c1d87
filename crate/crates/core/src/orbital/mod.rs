//! Orbital mechanics: TLE ingestion, unperturbed Kepler propagation and the
//! simplified rotation of ground locations.
//!
//! All functions here are pure and may be called from any thread.

mod elements;
mod ground;
mod kepler;
mod tle;

pub use elements::{ElementsError, OrbitalElements};
pub use ground::{ground_station_position, GroundLocation, LocationError};
pub use kepler::{solve_kepler, KeplerError, DEFAULT_KEPLER_TOLERANCE, KEPLER_MAX_ITERATIONS};
pub use tle::{format_tle, parse_tle, parse_tle_file, TleError, TleErrorKind, TleRecord};

use crate::{geometry::EciPosition, time::SimTime};

/// Position of a satellite at `sim_time`, see [`OrbitalElements::position_at`].
pub fn satellite_position(elements: &OrbitalElements, sim_time: SimTime) -> Result<EciPosition, KeplerError> {
    elements.position_at(sim_time)
}

/// Copy of `elements` shifted along-track by `offset_fraction` of a revolution.
pub fn duplicate_with_epoch_offset(elements: &OrbitalElements, offset_fraction: f64) -> OrbitalElements {
    elements.with_phase_offset(offset_fraction)
}
