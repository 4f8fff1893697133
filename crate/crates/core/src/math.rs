//! Small numeric helpers shared across modules.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type C64 = Complex64;

/// Speed of light in vacuum (m/s). Scenes may override it.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const TAU: f64 = std::f64::consts::TAU;

/// Wrap an angle into [0, 2π).
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can return exactly 2π when phi is a tiny negative number.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Skew-symmetric cross-product matrix: skew(a) * b == a × b.
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Unit complex phasor e^{jφ}.
pub fn phasor(phi: f64) -> C64 {
    C64::new(phi.cos(), phi.sin())
}

/// Deterministic total order for f64 keys (NaN sorts last).
pub fn total_cmp(a: f64, b: f64) -> std::cmp::Ordering {
    a.total_cmp(&b)
}

/// True if every component of the slice is finite.
pub fn all_finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_phase_range() {
        for &phi in &[-7.0, -1e-18, 0.0, 1.0, TAU, TAU + 0.5, 123.456] {
            let w = wrap_phase(phi);
            assert!((0.0..TAU).contains(&w), "wrap({phi}) = {w}");
        }
    }

    #[test]
    fn skew_matches_cross() {
        let a = Vec3::new(1.0, -2.0, 0.5);
        let b = Vec3::new(0.3, 4.0, -1.0);
        assert!((skew(&a) * b - a.cross(&b)).norm() < 1e-15);
    }
}
