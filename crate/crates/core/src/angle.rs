//! Angle and torus arithmetic.

use std::f64::consts::{PI, TAU};

/// Wraps an angle into `[-π, π)`.
pub fn normalize(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Signed shortest difference `b - a` on the circle, in `[-π, π)`.
pub fn diff(a: f64, b: f64) -> f64 {
    normalize(b - a)
}

/// Geodesic distance on the flat torus `S¹ × S¹`.
pub fn torus_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    diff(a.0, b.0).hypot(diff(a.1, b.1))
}

/// Chebyshev (per-angle max) distance on the torus.
pub fn torus_max_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    diff(a.0, b.0).abs().max(diff(a.1, b.1).abs())
}

/// Circular mean of two angles.
pub fn mid(a: f64, b: f64) -> f64 {
    normalize(a + 0.5 * diff(a, b))
}
