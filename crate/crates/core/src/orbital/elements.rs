use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::kepler::{solve_kepler, KeplerError, DEFAULT_KEPLER_TOLERANCE};
use crate::constants::{EARTH_RADIUS_KM, MU_EARTH_KM3_S2, TWO_PI};
use crate::geometry::EciPosition;
use crate::time::{seconds_between, SimTime};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElementsError {
    #[error("eccentricity {0} outside [0, 1)")]
    Eccentricity(f64),
    #[error("semi-major axis {0} km does not clear the Earth radius")]
    SemiMajorAxis(f64),
    #[error("inclination {0} rad outside [0, pi]")]
    Inclination(f64),
    #[error("mean motion must be positive, got {0}")]
    MeanMotion(f64),
    #[error("non-finite angle {0}")]
    Angle(f64),
}

/// Keplerian elements of an unperturbed orbit around the Earth.
///
/// Angles are stored normalised to `[0, 2pi)`; the mean motion is always
/// derived from the semi-major axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    semi_major_axis_km: f64,
    eccentricity: f64,
    inclination_rad: f64,
    raan_rad: f64,
    arg_perigee_rad: f64,
    mean_anomaly_at_epoch_rad: f64,
    epoch: SimTime,
    mean_motion_rad_per_s: f64,
}

impl OrbitalElements {
    pub fn new(
        semi_major_axis_km: f64,
        eccentricity: f64,
        inclination_rad: f64,
        raan_rad: f64,
        arg_perigee_rad: f64,
        mean_anomaly_at_epoch_rad: f64,
        epoch: SimTime,
    ) -> Result<Self, ElementsError> {
        if !(0.0..1.0).contains(&eccentricity) {
            return Err(ElementsError::Eccentricity(eccentricity));
        }
        if !(semi_major_axis_km.is_finite() && semi_major_axis_km > EARTH_RADIUS_KM) {
            return Err(ElementsError::SemiMajorAxis(semi_major_axis_km));
        }
        if !(0.0..=std::f64::consts::PI).contains(&inclination_rad) {
            return Err(ElementsError::Inclination(inclination_rad));
        }
        for angle in [raan_rad, arg_perigee_rad, mean_anomaly_at_epoch_rad] {
            if !angle.is_finite() {
                return Err(ElementsError::Angle(angle));
            }
        }
        Ok(Self {
            semi_major_axis_km,
            eccentricity,
            inclination_rad,
            raan_rad: raan_rad.rem_euclid(TWO_PI),
            arg_perigee_rad: arg_perigee_rad.rem_euclid(TWO_PI),
            mean_anomaly_at_epoch_rad: mean_anomaly_at_epoch_rad.rem_euclid(TWO_PI),
            epoch,
            mean_motion_rad_per_s: (MU_EARTH_KM3_S2 / semi_major_axis_km.powi(3)).sqrt(),
        })
    }

    /// Builds elements from a mean motion in revolutions per day, the unit
    /// used by TLEs. The semi-major axis follows from `a = (mu / n^2)^(1/3)`.
    pub fn from_mean_motion(
        revs_per_day: f64,
        eccentricity: f64,
        inclination_rad: f64,
        raan_rad: f64,
        arg_perigee_rad: f64,
        mean_anomaly_at_epoch_rad: f64,
        epoch: SimTime,
    ) -> Result<Self, ElementsError> {
        if !(revs_per_day.is_finite() && revs_per_day > 0.0) {
            return Err(ElementsError::MeanMotion(revs_per_day));
        }
        let n = revs_per_day * TWO_PI / 86_400.0;
        let a = (MU_EARTH_KM3_S2 / (n * n)).cbrt();
        Self::new(a, eccentricity, inclination_rad, raan_rad, arg_perigee_rad, mean_anomaly_at_epoch_rad, epoch)
    }

    pub fn semi_major_axis_km(&self) -> f64 {
        self.semi_major_axis_km
    }
    pub fn eccentricity(&self) -> f64 {
        self.eccentricity
    }
    pub fn inclination_rad(&self) -> f64 {
        self.inclination_rad
    }
    pub fn raan_rad(&self) -> f64 {
        self.raan_rad
    }
    pub fn arg_perigee_rad(&self) -> f64 {
        self.arg_perigee_rad
    }
    pub fn mean_anomaly_at_epoch_rad(&self) -> f64 {
        self.mean_anomaly_at_epoch_rad
    }
    pub fn epoch(&self) -> SimTime {
        self.epoch
    }
    pub fn mean_motion_rad_per_s(&self) -> f64 {
        self.mean_motion_rad_per_s
    }

    pub fn mean_motion_revs_per_day(&self) -> f64 {
        self.mean_motion_rad_per_s * 86_400.0 / TWO_PI
    }

    pub fn period_s(&self) -> f64 {
        TWO_PI / self.mean_motion_rad_per_s
    }

    /// Same orbit, phase shifted forward by `fraction` of a revolution.
    pub fn with_phase_offset(&self, fraction: f64) -> Self {
        Self {
            mean_anomaly_at_epoch_rad: (self.mean_anomaly_at_epoch_rad + fraction * TWO_PI).rem_euclid(TWO_PI),
            ..*self
        }
    }

    pub fn position_at(&self, sim_time: SimTime) -> Result<EciPosition, KeplerError> {
        self.position_after_epoch(seconds_between(self.epoch, sim_time))
    }

    /// ECI position `dt_s` seconds after the epoch.
    pub fn position_after_epoch(&self, dt_s: f64) -> Result<EciPosition, KeplerError> {
        let mean = (self.mean_anomaly_at_epoch_rad + self.mean_motion_rad_per_s * dt_s).rem_euclid(TWO_PI);
        let ecc = self.eccentricity;
        let ecc_anom = solve_kepler(mean, ecc, DEFAULT_KEPLER_TOLERANCE)?;

        let (sin_half, cos_half) = (0.5 * ecc_anom).sin_cos();
        let true_anom = 2.0 * ((1.0 + ecc).sqrt() * sin_half).atan2((1.0 - ecc).sqrt() * cos_half);
        let radius = self.semi_major_axis_km * (1.0 - ecc * ecc_anom.cos());

        let (sin_u, cos_u) = (self.arg_perigee_rad + true_anom).sin_cos();
        let (sin_raan, cos_raan) = self.raan_rad.sin_cos();
        let (sin_i, cos_i) = self.inclination_rad.sin_cos();

        Ok(EciPosition::new(
            radius * (cos_raan * cos_u - sin_raan * sin_u * cos_i),
            radius * (sin_raan * cos_u + cos_raan * sin_u * cos_i),
            radius * (sin_u * sin_i),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn epoch() -> SimTime {
        Utc.with_ymd_and_hms(2024, 12, 17, 0, 0, 0).unwrap()
    }

    fn circular_equatorial() -> OrbitalElements {
        OrbitalElements::new(6921.0, 0.0, 0.0, 0.0, 0.0, 0.0, epoch()).unwrap()
    }

    #[test]
    fn frame_definition_at_epoch() {
        let p = circular_equatorial().position_at(epoch()).unwrap();
        assert_eq!(p, EciPosition::new(6921.0, 0.0, 0.0));
    }

    #[test]
    fn quarter_period_turns_ninety_degrees() {
        let el = circular_equatorial();
        // T = 2 pi sqrt(a^3 / mu), computed independently of the implementation.
        let period = TWO_PI * (6921.0_f64.powi(3) / 398_600.441_8).sqrt();
        let p = el.position_after_epoch(period / 4.0).unwrap();
        assert!(p.x_km.abs() < 1e-6 && (p.y_km - 6921.0).abs() < 1e-6 && p.z_km.abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn mean_motion_round_trip() {
        let el = OrbitalElements::from_mean_motion(15.05, 0.0, 0.9, 0.0, 0.0, 0.0, epoch()).unwrap();
        // Oracle: (mu / n^2)^(1/3) with n = 15.05 * 2pi / 86400 evaluated in Python.
        assert!((el.semi_major_axis_km() - 6_929.642_682_157_906).abs() < 1e-6);
        assert!((el.mean_motion_revs_per_day() - 15.05).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_elements() {
        assert!(matches!(OrbitalElements::new(6000.0, 0.0, 0.0, 0.0, 0.0, 0.0, epoch()), Err(ElementsError::SemiMajorAxis(_))));
        assert!(matches!(OrbitalElements::new(7000.0, 1.0, 0.0, 0.0, 0.0, 0.0, epoch()), Err(ElementsError::Eccentricity(_))));
        assert!(matches!(OrbitalElements::new(7000.0, 0.0, 4.0, 0.0, 0.0, 0.0, epoch()), Err(ElementsError::Inclination(_))));
    }

    #[test]
    fn half_offset_is_antipodal() {
        let el = circular_equatorial();
        let dup = el.with_phase_offset(0.5);
        for k in 0..20 {
            let dt = k as f64 * 311.0;
            let a = el.position_after_epoch(dt).unwrap();
            let b = dup.position_after_epoch(dt).unwrap();
            assert!((a + b).norm() < 1e-6);
        }
    }

    #[test]
    fn quarter_offset_is_ninety_degrees_apart() {
        let el = OrbitalElements::new(6921.0, 0.0, 0.93, 1.2, 0.0, 0.4, epoch()).unwrap();
        let dup = el.with_phase_offset(0.25);
        let a = el.position_at(epoch()).unwrap();
        let b = dup.position_at(epoch()).unwrap();
        let angle = (a.dot(&b) / (a.norm() * b.norm())).acos();
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    fn elements_strategy() -> impl Strategy<Value = OrbitalElements> {
        (6600.0..42_000.0f64, 0.0..0.9f64, 0.0..std::f64::consts::PI, 0.0..TWO_PI, 0.0..TWO_PI, 0.0..TWO_PI)
            .prop_filter_map("perigee above ground", |(a, e, i, raan, argp, m)| {
                OrbitalElements::new(a, e, i, raan, argp, m, epoch()).ok()
            })
    }

    proptest! {
        #[test]
        fn radius_stays_within_apsides(el in elements_strategy(), dt in -1.0e6..1.0e6f64) {
            let r = el.position_after_epoch(dt).unwrap().norm();
            let a = el.semi_major_axis_km();
            let e = el.eccentricity();
            prop_assert!(r >= a * (1.0 - e) * (1.0 - 1e-12));
            prop_assert!(r <= a * (1.0 + e) * (1.0 + 1e-12));
        }

        #[test]
        fn period_closure(el in elements_strategy(), dt in 0.0..1.0e5f64) {
            let p0 = el.position_after_epoch(dt).unwrap();
            let p1 = el.position_after_epoch(dt + el.period_s()).unwrap();
            prop_assert!(p0.distance_to(&p1) < 1e-6);
        }

        #[test]
        fn identical_offsets_agree(el in elements_strategy(), frac in 0.01..0.99f64, dt in 0.0..1.0e5f64) {
            let a = el.with_phase_offset(frac).position_after_epoch(dt).unwrap();
            let b = el.with_phase_offset(frac).position_after_epoch(dt).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
