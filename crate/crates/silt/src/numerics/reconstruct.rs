//! Slope-limited piecewise-linear reconstruction.
//!
//! Slopes are limited on the free surface `H + b`, the depth, and both
//! velocity components. Reconstructing the surface rather than the depth
//! keeps the rest state exactly balanced: a flat surface has zero slope in
//! every cell, so face values are equal across every wet-wet face.

use crate::params::Limiter;

/// Minmod: the smaller slope when signs agree, zero otherwise.
#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        a.min(b)
    } else if a < 0.0 && b < 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

/// Superbee: the more aggressive TVD choice.
#[inline]
pub fn superbee(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        return 0.0;
    }
    let s1 = minmod(2.0 * a, b);
    let s2 = minmod(a, 2.0 * b);
    if s1.abs() > s2.abs() {
        s1
    } else {
        s2
    }
}

/// Limited slope per unit length from a three-cell stencil.
#[inline]
pub fn limited_slope(limiter: Limiter, q_minus: f64, q_center: f64, q_plus: f64, h: f64) -> f64 {
    let left = (q_center - q_minus) / h;
    let right = (q_plus - q_center) / h;
    match limiter {
        Limiter::Minmod => minmod(left, right),
        Limiter::Superbee => superbee(left, right),
    }
}
