use rayon::prelude::*;

use crate::constants::EARTH_RADIUS_KM;
use crate::geometry::{segment_clears_sphere, EciPosition};

/// For every ground station, the nearest satellite with an unobstructed line
/// of sight, as `(satellite index, distance_km)`. Ties go to the lower index.
/// Stations that see no satellite get `None`.
pub fn link_ground_nearest(satellites: &[EciPosition], ground_stations: &[EciPosition]) -> Vec<Option<(u32, f64)>> {
    ground_stations
        .par_iter()
        .map(|gs| {
            let mut best: Option<(u32, f64)> = None;
            for (i, sat) in satellites.iter().enumerate() {
                let d = gs.distance_to(sat);
                if best.is_some_and(|(_, bd)| d >= bd) {
                    continue;
                }
                if segment_clears_sphere(gs, sat, EARTH_RADIUS_KM) {
                    best = Some((i as u32, d));
                }
            }
            best
        })
        .collect()
}
