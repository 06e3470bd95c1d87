use std::f64::consts::{PI, TAU};

use continuum_core::orbital::OrbitalElements;
use continuum_core::{EciPosition, SimTime};
use rand::Rng;

use crate::spanning::{component_count, eligible_pairs};

const EARTH_RADIUS_KM: f64 = 6371.0;

/// Link range and line-of-sight radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_range_km: f64,
    pub occlusion_radius_km: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_range_km: 5000.0, occlusion_radius_km: EARTH_RADIUS_KM + 80.0 }
    }
}

impl Limits {
    /// Within range and the segment stays outside the occlusion sphere.
    pub fn allows(&self, a: &EciPosition, b: &EciPosition) -> bool {
        let (dx, dy, dz) = (b.x_km - a.x_km, b.y_km - a.y_km, b.z_km - a.z_km);
        let len2 = dx * dx + dy * dy + dz * dz;
        if len2.sqrt() > self.max_range_km {
            return false;
        }
        let t = if len2 == 0.0 { 0.0 } else { (-(a.x_km * dx + a.y_km * dy + a.z_km * dz) / len2).clamp(0.0, 1.0) };
        let (px, py, pz) = (a.x_km + t * dx, a.y_km + t * dy, a.z_km + t * dz);
        (px * px + py * py + pz * pz).sqrt() >= self.occlusion_radius_km
    }
}

/// `n` satellites drawn either uniformly over near-circular LEO orbits or
/// as a jittered multi-plane shell.
pub fn random_elements<R: Rng>(rng: &mut R, n: usize, epoch: SimTime) -> Vec<OrbitalElements> {
    if rng.gen_bool(0.5) {
        (0..n)
            .map(|_| {
                let a = EARTH_RADIUS_KM + rng.gen_range(400.0..1200.0);
                OrbitalElements::new(
                    a,
                    rng.gen_range(0.0..0.005),
                    rng.gen_range(0.1..PI - 0.1),
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..TAU),
                    epoch,
                )
                .expect("valid random elements")
            })
            .collect()
    } else {
        let planes = rng.gen_range(1..=(n / 10).max(1));
        let altitude = rng.gen_range(450.0..1100.0);
        let inclination = rng.gen_range(0.5..1.7);
        (0..n)
            .map(|i| {
                let (p, s) = (i % planes, i / planes);
                let per_plane = n.div_ceil(planes);
                let raan = TAU * p as f64 / planes as f64 + rng.gen_range(-0.02..0.02);
                let phase = TAU * s as f64 / per_plane as f64 + rng.gen_range(-0.02..0.02);
                OrbitalElements::new(EARTH_RADIUS_KM + altitude, 0.0, inclination, raan, 0.0, phase.rem_euclid(TAU), epoch)
                    .expect("valid shell elements")
            })
            .collect()
    }
}

pub fn positions_at(elements: &[OrbitalElements], t: SimTime) -> Vec<EciPosition> {
    elements.iter().map(|e| e.position_at(t).expect("propagation converges")).collect()
}

/// Draws constellations until one whose eligible-pair graph is connected
/// comes up.
pub fn connectable_constellation<R: Rng>(rng: &mut R, n: usize, epoch: SimTime, limits: &Limits) -> Vec<OrbitalElements> {
    loop {
        let elements = random_elements(rng, n, epoch);
        let positions = positions_at(&elements, epoch);
        let pairs = eligible_pairs(&positions, limits);
        if component_count(n, pairs.iter().map(|&(a, b, _)| (a, b))) == 1 {
            return elements;
        }
    }
}
