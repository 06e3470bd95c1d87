use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{EARTH_RADIUS_KM, SECONDS_PER_DAY, TWO_PI};
use crate::geometry::EciPosition;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocationError {
    #[error("latitude {0} rad outside [-pi/2, pi/2]")]
    Latitude(f64),
    #[error("longitude {0} rad outside [-pi, pi]")]
    Longitude(f64),
    #[error("altitude {0} km must be non-negative")]
    Altitude(f64),
}

/// A fixed point on (or above) the Earth's surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundLocation {
    latitude_rad: f64,
    longitude_rad: f64,
    altitude_km: f64,
}

impl GroundLocation {
    pub fn new(latitude_rad: f64, longitude_rad: f64, altitude_km: f64) -> Result<Self, LocationError> {
        use std::f64::consts::{FRAC_PI_2, PI};
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&latitude_rad) {
            return Err(LocationError::Latitude(latitude_rad));
        }
        if !(-PI..=PI).contains(&longitude_rad) {
            return Err(LocationError::Longitude(longitude_rad));
        }
        if !(altitude_km >= 0.0 && altitude_km.is_finite()) {
            return Err(LocationError::Altitude(altitude_km));
        }
        Ok(Self { latitude_rad, longitude_rad, altitude_km })
    }

    pub fn from_degrees(latitude_deg: f64, longitude_deg: f64, altitude_km: f64) -> Result<Self, LocationError> {
        Self::new(latitude_deg.to_radians(), longitude_deg.to_radians(), altitude_km)
    }

    pub fn latitude_rad(&self) -> f64 {
        self.latitude_rad
    }
    pub fn longitude_rad(&self) -> f64 {
        self.longitude_rad
    }
    pub fn altitude_km(&self) -> f64 {
        self.altitude_km
    }
}

/// Position of a ground location rotating once every 24 hours about the
/// z axis, with no axial tilt. At `reference_epoch` the longitude is measured
/// from the x axis.
pub fn ground_station_position(location: &GroundLocation, sim_time: SimTime, reference_epoch: SimTime) -> EciPosition {
    let elapsed_ms = (sim_time - reference_epoch).num_milliseconds();
    // Reduce to one day first so whole-day offsets reproduce the same angle exactly.
    let day_ms = (SECONDS_PER_DAY * 1000.0) as i64;
    let within_day_s = elapsed_ms.rem_euclid(day_ms) as f64 / 1000.0;
    let longitude = location.longitude_rad + TWO_PI * within_day_s / SECONDS_PER_DAY;

    let radius = EARTH_RADIUS_KM + location.altitude_km;
    let (sin_lat, cos_lat) = location.latitude_rad.sin_cos();
    let (sin_lon, cos_lon) = longitude.sin_cos();
    EciPosition::new(radius * cos_lat * cos_lon, radius * cos_lat * sin_lon, radius * sin_lat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeDelta, TimeZone, Utc};

    fn t0() -> SimTime {
        Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap()
    }

    #[test]
    fn equator_at_reference_epoch() {
        let loc = GroundLocation::new(0.0, 0.0, 0.5).unwrap();
        assert_eq!(ground_station_position(&loc, t0(), t0()), EciPosition::new(6371.5, 0.0, 0.0));
    }

    #[test]
    fn six_hours_is_a_quarter_turn() {
        let loc = GroundLocation::new(0.0, 0.0, 0.0).unwrap();
        let p = ground_station_position(&loc, t0() + TimeDelta::hours(6), t0());
        assert!(p.x_km.abs() < 1e-9 && (p.y_km - 6371.0).abs() < 1e-9 && p.z_km == 0.0);
    }

    #[test]
    fn pole_does_not_move() {
        let loc = GroundLocation::new(std::f64::consts::FRAC_PI_2, 0.3, 1.0).unwrap();
        for h in [0, 5, 13, 30] {
            let p = ground_station_position(&loc, t0() + TimeDelta::hours(h), t0());
            assert!(p.x_km.abs() < 1e-9 && p.y_km.abs() < 1e-9);
            assert!((p.z_km - 6372.0).abs() < 1e-9);
        }
    }

    #[test]
    fn whole_days_repeat() {
        let loc = GroundLocation::from_degrees(48.2, 16.37, 0.2).unwrap();
        let t = t0() + TimeDelta::milliseconds(12_345_678);
        let a = ground_station_position(&loc, t, t0());
        let b = ground_station_position(&loc, t + TimeDelta::hours(24), t0());
        assert!(a.distance_to(&b) <= 1e-9);
    }

    #[test]
    fn validates_ranges() {
        assert!(GroundLocation::new(2.0, 0.0, 0.0).is_err());
        assert!(GroundLocation::new(0.0, 3.5, 0.0).is_err());
        assert!(GroundLocation::new(0.0, 0.0, -1.0).is_err());
    }
}
