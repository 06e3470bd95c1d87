//! Physical constants shared across the simulator.

/// Standard gravitational parameter of the Earth (km^3 / s^2).
pub const MU_EARTH_KM3_S2: f64 = 398_600.441_8;

/// Mean Earth radius (km).
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Extra margin above the surface that inter-satellite links may not cross (km).
pub const ATMOSPHERE_MARGIN_KM: f64 = 80.0;

/// Speed of light in vacuum (km / s).
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

/// Ground stations complete one revolution per solar day.
pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// One-way propagation delay in milliseconds over a straight line of `distance_km`.
#[inline]
pub fn light_latency_ms(distance_km: f64) -> f64 {
    distance_km / SPEED_OF_LIGHT_KM_S * 1000.0
}
