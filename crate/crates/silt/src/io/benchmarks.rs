//! Analytic dam-break solutions used to score benchmark runs.

use crate::grid::SimGrid;
use crate::state::FlowState;

/// Depth of the dry-bed dam-break similarity solution at position `x` and
/// time `t`, for a reservoir of depth `h_l` left of `x0`.
pub fn ritter_depth(x: f64, t: f64, x0: f64, h_l: f64, g: f64) -> f64 {
    if t <= 0.0 {
        return if x < x0 { h_l } else { 0.0 };
    }
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

/// Star region of the wet-bed dam break: plateau depth, plateau velocity,
/// and bore speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokerStar {
    pub h_m: f64,
    pub u_m: f64,
    pub shock_speed: f64,
    /// Signal speed of the rarefaction tail (right edge of the fan).
    pub tail_speed: f64,
}

/// Solve the wet-bed dam-break Riemann problem (still water on both sides)
/// by bisection on the depth of the star region.
pub fn stoker_star(h_l: f64, h_r: f64, g: f64) -> StokerStar {
    assert!(h_l > h_r && h_r > 0.0);
    let c_l = (g * h_l).sqrt();
    let f = |hm: f64| -> f64 {
        let cm = (g * hm).sqrt();
        let rarefaction = 2.0 * (c_l - cm);
        let shock = (hm - h_r) * (0.5 * g * (hm + h_r) / (hm * h_r)).sqrt();
        rarefaction - shock
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
    let c_m = (g * h_m).sqrt();
    let u_m = 2.0 * (c_l - c_m);
    StokerStar { h_m, u_m, shock_speed: u_m * h_m / (h_m - h_r), tail_speed: u_m - c_m }
}

/// Relative L1 depth error of a dam-break run against the dry-bed analytic
/// profile along the center row.
pub fn ritter_l1_error(state: &FlowState, grid: &SimGrid, t: f64, dam_col: usize, h_l: f64, g: f64) -> f64 {
    let x0 = grid.origin_x + dam_col as f64 * grid.h;
    let j = grid.ny / 2;
    let mut err = 0.0;
    let mut norm = 0.0;
    for i in 0..grid.nx {
        let (x, _) = grid.cell_center(i, j);
        let exact = ritter_depth(x, t, x0, h_l, g);
        err += (state.h[grid.idx(i, j)] - exact).abs();
        norm += exact;
    }
    err / norm
}

/// Relative error of the simulated bore plateau depth against the exact
/// star-region depth, sampled mid-plateau along the center row.
pub fn stoker_plateau_error(
    state: &FlowState,
    grid: &SimGrid,
    t: f64,
    dam_col: usize,
    h_l: f64,
    h_r: f64,
    g: f64,
) -> f64 {
    let star = stoker_star(h_l, h_r, g);
    let x0 = grid.origin_x + dam_col as f64 * grid.h;
    let x_mid = x0 + 0.5 * (star.tail_speed + star.shock_speed) * t;
    let i_mid = (((x_mid - grid.origin_x) / grid.h) as usize).clamp(5, grid.nx - 6);
    let j = grid.ny / 2;
    let mut avg = 0.0;
    for i in i_mid - 5..i_mid + 5 {
        avg += state.h[grid.idx(i, j)];
    }
    avg /= 10.0;
    (avg - star.h_m).abs() / star.h_m
}
