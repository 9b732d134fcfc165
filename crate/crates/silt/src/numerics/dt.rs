//! Adaptive time step: `tau = K min(h / 2v_p, h / v_s, h^2 / 2D)` over wet
//! cells, where `v_p` is the peak speed, `v_s` the peak gravity-wave signal
//! speed and `D` the bedload diffusion coefficient `|J0| / (1 - psi)`.
//!
//! The first term guarantees particles drift at most half a cell per step;
//! the third accounts for the diffusion-like slope correction of the bedload
//! flux.

use crate::grid::SimGrid;
use crate::params::PhysParams;
use crate::physics::gated_bedload;
use crate::state::FlowState;

/// Which term of the stability bound produced the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitingTerm {
    AdvectiveParticle,
    GravityWave,
    BedDiffusion,
}

impl std::fmt::Display for LimitingTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitingTerm::AdvectiveParticle => write!(f, "advective_particle"),
            LimitingTerm::GravityWave => write!(f, "gravity_wave"),
            LimitingTerm::BedDiffusion => write!(f, "bed_diffusion"),
        }
    }
}

/// Result of the time-step controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtResult {
    pub tau: f64,
    pub limiting_term: LimitingTerm,
    /// Cell `(i, j)` achieving the binding extremum; `None` on an all-dry
    /// domain, where the configured `dt_max` is returned.
    pub limiting_cell: Option<(usize, usize)>,
}

/// Partial reduction state; combined across row bands in fixed order so the
/// result is independent of the worker count.
#[derive(Debug, Clone, Copy)]
pub struct DtPartial {
    pub v_p: f64,
    pub cell_p: usize,
    pub v_s: f64,
    pub cell_s: usize,
    pub d_coef: f64,
    pub cell_d: usize,
    pub any_wet: bool,
}

impl DtPartial {
    pub fn empty() -> Self {
        DtPartial { v_p: 0.0, cell_p: 0, v_s: 0.0, cell_s: 0, d_coef: 0.0, cell_d: 0, any_wet: false }
    }

    /// Merge `other` (covering later cells) into `self`. Strict inequality
    /// keeps the lowest cell index on ties.
    pub fn merge(&mut self, other: &DtPartial) {
        if !other.any_wet {
            return;
        }
        if !self.any_wet {
            *self = *other;
            return;
        }
        if other.v_p > self.v_p {
            self.v_p = other.v_p;
            self.cell_p = other.cell_p;
        }
        if other.v_s > self.v_s {
            self.v_s = other.v_s;
            self.cell_s = other.cell_s;
        }
        if other.d_coef > self.d_coef {
            self.d_coef = other.d_coef;
            self.cell_d = other.cell_d;
        }
    }
}

/// Scan rows `[j0, j1)` of the state for the reduction extrema.
pub(crate) fn dt_partial_rows(
    state: &FlowState,
    params: &PhysParams,
    j0: usize,
    j1: usize,
) -> DtPartial {
    let geom = super::kernels::BandGeom::full(state.nx, state.ny);
    dt_partial_band(&state.h, &state.hu, &state.hv, &geom, params, j0, j1)
}

/// Reduction over global rows `[j0, j1)` of a band's local arrays.
pub(crate) fn dt_partial_band(
    h_arr: &[f64],
    hu: &[f64],
    hv: &[f64],
    geom: &super::kernels::BandGeom,
    params: &PhysParams,
    j0: usize,
    j1: usize,
) -> DtPartial {
    let mut part = DtPartial::empty();
    let inv_porosity = 1.0 / (1.0 - params.psi);
    for j in j0..j1 {
        for i in 0..geom.nx {
            let idx = j * geom.nx + i;
            let loc = geom.loc(i, j);
            let h = h_arr[loc];
            if h < params.eps_dry {
                continue;
            }
            let u = hu[loc] / h;
            let v = hv[loc] / h;
            let speed = (u * u + v * v).sqrt();
            let signal = speed + (params.g * h).sqrt();
            let j0b = gated_bedload(params, params.manning.at(idx), h, u, v);
            let d = j0b.magnitude() * inv_porosity;
            if !part.any_wet {
                part.any_wet = true;
                part.v_p = speed;
                part.cell_p = idx;
                part.v_s = signal;
                part.cell_s = idx;
                part.d_coef = d;
                part.cell_d = idx;
                continue;
            }
            if speed > part.v_p {
                part.v_p = speed;
                part.cell_p = idx;
            }
            if signal > part.v_s {
                part.v_s = signal;
                part.cell_s = idx;
            }
            if d > part.d_coef {
                part.d_coef = d;
                part.cell_d = idx;
            }
        }
    }
    part
}

/// Turn the combined reduction into a time step.
pub(crate) fn dt_from_partial(part: &DtPartial, params: &PhysParams, grid: &SimGrid) -> DtResult {
    if !part.any_wet {
        return DtResult { tau: params.dt_max, limiting_term: LimitingTerm::AdvectiveParticle, limiting_cell: None };
    }
    let h = grid.h;
    let t_adv = if part.v_p > 0.0 { h / (2.0 * part.v_p) } else { f64::INFINITY };
    let t_wave = h / part.v_s;
    let t_diff = if part.d_coef > 0.0 { h * h / (2.0 * part.d_coef) } else { f64::INFINITY };

    let (mut term, mut t_min, mut cell) = (LimitingTerm::AdvectiveParticle, t_adv, part.cell_p);
    if t_wave < t_min {
        term = LimitingTerm::GravityWave;
        t_min = t_wave;
        cell = part.cell_s;
    }
    if t_diff < t_min {
        term = LimitingTerm::BedDiffusion;
        t_min = t_diff;
        cell = part.cell_d;
    }
    let tau = (params.k_cfl * t_min).min(params.dt_max);
    DtResult { tau, limiting_term: term, limiting_cell: Some((cell % grid.nx, cell / grid.nx)) }
}

/// Stability-bounded time step for the whole grid.
pub fn compute_dt(state: &FlowState, params: &PhysParams, grid: &SimGrid) -> DtResult {
    let part = dt_partial_rows(state, params, 0, state.ny);
    dt_from_partial(&part, params, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::AjMode;
    use crate::state::{new_state, WaterInit};

    fn single_wet_cell(u: f64) -> (SimGrid, FlowState, PhysParams) {
        let grid = SimGrid::new(3, 3, 1.0).unwrap();
        let mut state = new_state(&grid, vec![0.0; 9], &WaterInit::Depth { h0: 0.0 }).unwrap();
        let idx = grid.idx(1, 1);
        state.h[idx] = 1.0;
        state.hu[idx] = u;
        let mut p = PhysParams::default();
        p.aj_mode = AjMode::Constant(0.001);
        p.m_exp = 2.0;
        p.psi = 0.4;
        p.k_cfl = 0.5;
        (grid, state, p)
    }

    #[test]
    fn single_cell_terms_match_direct_evaluation() {
        // H = 1, v = (2, 0), h = 1, g = 9.81, K = 0.5, A = 0.001, m = 2,
        // psi = 0.4. Direct evaluation:
        //   h / (2 v_p)            = 0.25
        //   h / (|v| + sqrt(gH))   = 1 / 5.1320919526... = 0.1948523154...
        //   h^2 / (2 |J0|/(1-psi)) = 1 / (2 * 0.008 / 0.6) = 37.5
        // so tau = 0.5 * 0.1948523154... = 0.0974261577...
        let (grid, state, p) = single_wet_cell(2.0);
        let r = compute_dt(&state, &p, &grid);
        let t_wave = 1.0 / (2.0 + (9.81f64).sqrt());
        assert!((r.tau - 0.5 * t_wave).abs() < 1e-15);
        assert!((r.tau - 0.0974261577).abs() < 1e-9, "tau = {}", r.tau);
        assert_eq!(r.limiting_term, LimitingTerm::GravityWave);
        assert_eq!(r.limiting_cell, Some((1, 1)));
        // Cross-check the other two terms through the partial.
        let part = dt_partial_rows(&state, &p, 0, 3);
        assert!((1.0 / (2.0 * part.v_p) - 0.25).abs() < 1e-15);
        assert!((1.0 / (2.0 * part.d_coef) - 37.5).abs() < 1e-12);
    }

    #[test]
    fn still_water_is_wave_limited() {
        let grid = SimGrid::new(4, 4, 1.0).unwrap();
        let state = new_state(&grid, vec![0.0; 16], &WaterInit::Depth { h0: 1.0 }).unwrap();
        let p = PhysParams::default();
        let r = compute_dt(&state, &p, &grid);
        assert_eq!(r.limiting_term, LimitingTerm::GravityWave);
        assert!((r.tau - p.k_cfl / (9.81f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rest_state_ignores_huge_transport_coefficient() {
        // |J0| = 0 at v = 0, so bed diffusion cannot limit.
        let grid = SimGrid::new(4, 4, 1.0).unwrap();
        let state = new_state(&grid, vec![0.0; 16], &WaterInit::Depth { h0: 1.0 }).unwrap();
        let mut p = PhysParams::default();
        p.aj_mode = AjMode::Constant(1e6);
        let r = compute_dt(&state, &p, &grid);
        assert_eq!(r.limiting_term, LimitingTerm::GravityWave);
    }

    #[test]
    fn all_dry_returns_dt_max() {
        let grid = SimGrid::new(4, 4, 1.0).unwrap();
        let state = new_state(&grid, vec![0.0; 16], &WaterInit::Depth { h0: 0.0 }).unwrap();
        let mut p = PhysParams::default();
        p.dt_max = 7.5;
        let r = compute_dt(&state, &p, &grid);
        assert_eq!(r.tau, 7.5);
        assert_eq!(r.limiting_term, LimitingTerm::AdvectiveParticle);
        assert_eq!(r.limiting_cell, None);
    }

    #[test]
    fn banded_reduction_matches_dense() {
        let grid = SimGrid::new(8, 8, 0.5).unwrap();
        let mut state = new_state(&grid, vec![0.0; 64], &WaterInit::Depth { h0: 0.5 }).unwrap();
        // Uneven velocity field.
        for idx in 0..64 {
            state.hu[idx] = 0.01 * (idx as f64) - 0.2;
            state.hv[idx] = 0.3 - 0.007 * (idx as f64);
        }
        let mut p = PhysParams::default();
        p.aj_mode = AjMode::Constant(0.001);
        let dense = compute_dt(&state, &p, &grid);
        for split in [1usize, 3, 4, 7] {
            let mut acc = DtPartial::empty();
            let mut j = 0;
            while j < 8 {
                let hi = (j + split).min(8);
                let part = dt_partial_rows(&state, &p, j, hi);
                acc.merge(&part);
                j = hi;
            }
            let r = dt_from_partial(&acc, &p, &grid);
            assert_eq!(r, dense);
        }
    }
}
