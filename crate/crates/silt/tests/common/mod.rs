//! Shared helpers and independent analytic oracles for the integration
//! suites. The oracles are implemented here from the textbook solutions,
//! separately from anything in the crate, so they can check the solver
//! without sharing code with it.

use std::sync::{Mutex, MutexGuard, OnceLock};

/// Serialize tests that measure wall time (and, for simplicity, everything
/// else in a suite that uses it): timings on a small machine are meaningless
/// when tests run concurrently.
pub fn serial() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    match LOCK.get_or_init(|| Mutex::new(())).lock() {
        Ok(g) => g,
        Err(poisoned) => poisoned.into_inner(),
    }
}

/// Depth of the instantaneous dry-bed dam-break similarity solution:
/// reservoir depth `h_l` left of `x0`, dry bed to the right, evaluated at
/// `(x, t)`.
pub fn ritter_depth(x: f64, t: f64, x0: f64, h_l: f64, g: f64) -> f64 {
    let c0 = (g * h_l).sqrt();
    let xi = (x - x0) / t;
    if xi <= -c0 {
        h_l
    } else if xi >= 2.0 * c0 {
        0.0
    } else {
        let c = (2.0 * c0 - xi) / 3.0;
        c * c / g
    }
}

/// Star region of the wet-bed dam break (still water both sides): plateau
/// depth and velocity, bore speed, and the rarefaction tail speed. Solved by
/// bisection on the depth of the star region: the left rarefaction invariant
/// `u* = 2(c_l - c*)` must meet the bore relation
/// `u* = (h* - h_r) sqrt(g (h* + h_r) / (2 h* h_r))`.
#[allow(dead_code)]
pub struct Star {
    pub h_m: f64,
    pub u_m: f64,
    pub shock_speed: f64,
    pub tail_speed: f64,
}

pub fn stoker_star(h_l: f64, h_r: f64, g: f64) -> Star {
    let c_l = (g * h_l).sqrt();
    let f = |hm: f64| {
        2.0 * (c_l - (g * hm).sqrt())
            - (hm - h_r) * (0.5 * g * (hm + h_r) / (hm * h_r)).sqrt()
    };
    let (mut lo, mut hi) = (h_r, h_l);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h_m = 0.5 * (lo + hi);
    let u_m = 2.0 * (c_l - (g * h_m).sqrt());
    Star {
        h_m,
        u_m,
        shock_speed: u_m * h_m / (h_m - h_r),
        tail_speed: u_m - (g * h_m).sqrt(),
    }
}
