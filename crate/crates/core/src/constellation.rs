//! Synthetic constellations for experiments that have no TLE snapshot at hand.

use crate::constants::{EARTH_RADIUS_KM, TWO_PI};
use crate::orbital::{ElementsError, OrbitalElements};
use crate::time::SimTime;

/// A Walker-delta shell `inclination: total / planes / phasing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerShell {
    pub total: usize,
    pub planes: usize,
    pub phasing: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
}

impl WalkerShell {
    /// A 53 degree, 550 km shell with roughly Starlink-like plane density.
    pub fn starlink_like(total: usize) -> Self {
        let planes = ((total as f64 * 72.0 / 22.0).sqrt().round() as usize).clamp(1, total.max(1));
        Self { total, planes, phasing: 1, altitude_km: 550.0, inclination_deg: 53.0 }
    }

    /// Circular orbits, evenly spread in right ascension and along track.
    /// When `total` is not a multiple of `planes` the first planes get one
    /// extra satellite.
    pub fn generate(&self, epoch: SimTime) -> Result<Vec<OrbitalElements>, ElementsError> {
        let planes = self.planes.max(1);
        let a = EARTH_RADIUS_KM + self.altitude_km;
        let inc = self.inclination_deg.to_radians();
        let mut out = Vec::with_capacity(self.total);
        for p in 0..planes {
            let in_plane = self.total / planes + usize::from(p < self.total % planes);
            let raan = TWO_PI * p as f64 / planes as f64;
            for s in 0..in_plane {
                let phase = TWO_PI * (s as f64 / in_plane as f64 + (self.phasing * p) as f64 / self.total.max(1) as f64);
                out.push(OrbitalElements::new(a, 0.0, inc, raan, 0.0, phase, epoch)?);
            }
        }
        Ok(out)
    }
}

/// Expands a constellation by `multiplier`: every satellite is followed by
/// `multiplier - 1` copies shifted along track by `j / multiplier` of a
/// revolution.
pub fn expand_with_duplicates(elements: &[OrbitalElements], multiplier: usize) -> Vec<OrbitalElements> {
    let m = multiplier.max(1);
    let mut out = Vec::with_capacity(elements.len() * m);
    for el in elements {
        out.push(*el);
        for j in 1..m {
            out.push(el.with_phase_offset(j as f64 / m as f64));
        }
    }
    out
}
