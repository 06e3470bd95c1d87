use thiserror::Error;

use crate::constants::TWO_PI;

pub const DEFAULT_KEPLER_TOLERANCE: f64 = 1e-10;
pub const KEPLER_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KeplerError {
    #[error("eccentricity {0} outside [0, 1)")]
    InvalidEccentricity(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("mean anomaly must be finite, got {0}")]
    InvalidMeanAnomaly(f64),
    #[error("Kepler solver did not reach {tolerance:e} rad for M={mean_anomaly}, e={eccentricity}")]
    NoConvergence { mean_anomaly: f64, eccentricity: f64, tolerance: f64 },
}

#[inline]
fn residual(e_anom: f64, ecc: f64, mean: f64) -> f64 {
    e_anom - ecc * e_anom.sin() - mean
}

/// Solves `E - e sin E = M` for the eccentric anomaly `E` in `[0, 2pi)`.
///
/// Newton-Raphson seeded at `M` (or `pi` for `e >= 0.8`), falling back to
/// bisection over `[0, 2pi]` if Newton has not converged after
/// [`KEPLER_MAX_ITERATIONS`] iterations.
pub fn solve_kepler(mean_anomaly_rad: f64, eccentricity: f64, tolerance_rad: f64) -> Result<f64, KeplerError> {
    if !(0.0..1.0).contains(&eccentricity) {
        return Err(KeplerError::InvalidEccentricity(eccentricity));
    }
    if !(tolerance_rad > 0.0 && tolerance_rad.is_finite()) {
        return Err(KeplerError::InvalidTolerance(tolerance_rad));
    }
    if !mean_anomaly_rad.is_finite() {
        return Err(KeplerError::InvalidMeanAnomaly(mean_anomaly_rad));
    }
    let mean = mean_anomaly_rad.rem_euclid(TWO_PI);
    if eccentricity == 0.0 {
        return Ok(mean);
    }

    let mut e_anom = if eccentricity < 0.8 { mean } else { std::f64::consts::PI };
    for _ in 0..KEPLER_MAX_ITERATIONS {
        let f = residual(e_anom, eccentricity, mean);
        if f.abs() <= tolerance_rad {
            let normalized = e_anom.rem_euclid(TWO_PI);
            if residual(normalized, eccentricity, mean).abs() <= tolerance_rad {
                return Ok(normalized);
            }
            break;
        }
        let slope = 1.0 - eccentricity * e_anom.cos();
        e_anom -= f / slope;
        if !e_anom.is_finite() {
            break;
        }
    }

    // f(E) is strictly increasing with f(0) = -M <= 0 and f(2pi) = 2pi - M > 0.
    let (mut lo, mut hi) = (0.0_f64, TWO_PI);
    loop {
        let mid = 0.5 * (lo + hi);
        let f = residual(mid, eccentricity, mean);
        if f.abs() <= tolerance_rad {
            return Ok(mid.rem_euclid(TWO_PI));
        }
        if mid <= lo || mid >= hi {
            return Err(KeplerError::NoConvergence { mean_anomaly: mean_anomaly_rad, eccentricity, tolerance: tolerance_rad });
        }
        if f > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Independent bisection to ~1e-15 used as an oracle.
    fn bisection_oracle(mean: f64, ecc: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, TWO_PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - ecc * mid.sin() - mean > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    #[test]
    fn zero_eccentricity_is_identity() {
        assert_eq!(solve_kepler(1.3, 0.0, 1e-10).unwrap(), 1.3);
    }

    #[test]
    fn pi_is_a_fixed_point() {
        let e = solve_kepler(PI, 0.5, 1e-12).unwrap();
        assert!((e - PI).abs() < 1e-12);
    }

    #[test]
    fn matches_bisection_oracle() {
        // Frozen from the oracle: 2.02097993808977
        let expected = 2.020_979_938_089_77;
        assert!((bisection_oracle(FRAC_PI_2, 0.5) - expected).abs() < 1e-12);
        let e = solve_kepler(FRAC_PI_2, 0.5, 1e-12).unwrap();
        assert!((e - expected).abs() < 1e-11, "{e}");
    }

    #[test]
    fn high_eccentricity_grid_converges() {
        for i in 0..=628 {
            let m = i as f64 * 0.01;
            for ecc in [0.85, 0.9, 0.95, 0.99] {
                let e = solve_kepler(m, ecc, 1e-10).unwrap();
                assert!(residual(e, ecc, m.rem_euclid(TWO_PI)).abs() <= 1e-10);
                assert!((0.0..TWO_PI).contains(&e));
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(solve_kepler(1.0, 1.0, 1e-10), Err(KeplerError::InvalidEccentricity(_))));
        assert!(matches!(solve_kepler(1.0, -0.1, 1e-10), Err(KeplerError::InvalidEccentricity(_))));
        assert!(matches!(solve_kepler(1.0, 0.1, 0.0), Err(KeplerError::InvalidTolerance(_))));
        assert!(matches!(solve_kepler(f64::NAN, 0.1, 1e-9), Err(KeplerError::InvalidMeanAnomaly(_))));
    }

    #[test]
    fn unreachable_tolerance_terminates() {
        // Either an exact root is hit or the solver gives up; it must not spin.
        match solve_kepler(2.5, 0.3, 1e-300) {
            Ok(e) => assert_eq!(residual(e, 0.3, 2.5), 0.0),
            Err(err) => assert!(matches!(err, KeplerError::NoConvergence { .. })),
        }
    }

    #[test]
    fn negative_and_large_mean_anomalies_are_normalized() {
        let a = solve_kepler(-0.5, 0.2, 1e-12).unwrap();
        let b = solve_kepler(TWO_PI - 0.5, 0.2, 1e-12).unwrap();
        assert!((a - b).abs() < 1e-12);
        let c = solve_kepler(1.0 + 10.0 * TWO_PI, 0.2, 1e-12).unwrap();
        let d = solve_kepler(1.0, 0.2, 1e-12).unwrap();
        assert!((c - d).abs() < 1e-9);
    }
}
