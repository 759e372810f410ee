//! Small shared utilities: seeded randomness and angle arithmetic.

pub mod rng;

use std::f64::consts::PI;

/// Normalize an angle to `(-PI, PI]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}
