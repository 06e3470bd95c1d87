//! Earth-centred Cartesian vectors and line-of-sight tests.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A position in the Earth-centred inertial frame, in kilometres.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EciPosition {
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
}

impl EciPosition {
    pub const ORIGIN: EciPosition = EciPosition { x_km: 0.0, y_km: 0.0, z_km: 0.0 };

    pub const fn new(x_km: f64, y_km: f64, z_km: f64) -> Self {
        Self { x_km, y_km, z_km }
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> f64 {
        self.x_km * other.x_km + self.y_km * other.y_km + self.z_km * other.z_km
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn distance_to(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    #[inline]
    pub fn distance_squared_to(&self, other: &Self) -> f64 {
        let d = *self - *other;
        d.dot(&d)
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y_km * other.z_km - self.z_km * other.y_km,
            self.z_km * other.x_km - self.x_km * other.z_km,
            self.x_km * other.y_km - self.y_km * other.x_km,
        )
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| *self * (1.0 / n))
    }
}

impl Add for EciPosition {
    type Output = EciPosition;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x_km + rhs.x_km, self.y_km + rhs.y_km, self.z_km + rhs.z_km)
    }
}

impl Sub for EciPosition {
    type Output = EciPosition;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x_km - rhs.x_km, self.y_km - rhs.y_km, self.z_km - rhs.z_km)
    }
}

impl Mul<f64> for EciPosition {
    type Output = EciPosition;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x_km * rhs, self.y_km * rhs, self.z_km * rhs)
    }
}

/// Distance from the origin to the closest point of the segment `a`-`b`.
pub fn segment_min_distance_to_origin(a: &EciPosition, b: &EciPosition) -> f64 {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-a.dot(&ab) / len2).clamp(0.0, 1.0);
    (*a + ab * t).norm()
}

/// True when the segment `a`-`b` never enters the open ball of `radius_km`
/// around the Earth centre. Endpoints lying exactly on the sphere count as
/// clear, so surface stations can see satellites above their horizon.
pub fn segment_clears_sphere(a: &EciPosition, b: &EciPosition, radius_km: f64) -> bool {
    segment_min_distance_to_origin(a, b) >= radius_km - 1e-9
}
