//! The two-stage time step: Lagrangian particle predictor-corrector for the
//! forces, Eulerian TVD/HLL flux stage for the transport, plus the stability
//! controller.

pub mod dt;
pub mod flux;
pub(crate) mod kernels;
pub mod reconstruct;

pub use dt::{compute_dt, DtResult, LimitingTerm};
pub use flux::{hll_face_flux, sediment_face_flux, FaceFlux, FaceState};
pub use kernels::{BandGeom, NEG_DEPTH_TOL};
pub use reconstruct::{limited_slope, minmod, superbee};

use crate::activeblocks::{update_counts_rows, ActiveBlockMap, SourceMask};
use crate::error::{Result, SiltError};
use crate::grid::SimGrid;
use crate::params::{AjMode, PhysParams, SourceInputs};
use crate::state::FlowState;

use kernels::{BaseView, FluxArgs, FluxScratch, HalfView, SourceRates, Stencil};

/// Whether block skipping is applied or every block runs every stage.
/// Results are bitwise identical either way; the dense sweep exists as the
/// oracle for that equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    #[default]
    Active,
    Dense,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    /// Stability-bound step from the controller.
    pub dt: DtResult,
    /// Step actually taken (the controller value, possibly clipped to land
    /// on an output time).
    pub dt_used: f64,
    pub lag_blocks: usize,
    pub eul_blocks: usize,
    /// Largest particle displacement component over the full step.
    pub max_displacement: f64,
}

/// Scratch arrays for one row band, reused across steps.
pub struct StepWorkspace {
    pub(crate) geom: BandGeom,
    /// Largest stability-bound step seen while the domain had water; a
    /// collapse of many orders against it marks runaway feedback.
    pub(crate) dt_peak: f64,
    pub(crate) h_half: Vec<f64>,
    pub(crate) u_half: Vec<f64>,
    pub(crate) v_half: Vec<f64>,
    pub(crate) disp_x: Vec<f64>,
    pub(crate) disp_y: Vec<f64>,
    pub(crate) acc_x: Vec<f64>,
    pub(crate) acc_y: Vec<f64>,
    pub(crate) lag_h: Vec<f64>,
    pub(crate) lag_hu: Vec<f64>,
    pub(crate) lag_hv: Vec<f64>,
    pub(crate) lag_b: Vec<f64>,
    pub(crate) lag_active: Vec<bool>,
    pub(crate) eul_active: Vec<bool>,
    pub(crate) flux: FluxScratch,
    /// Block column per cell column / block row per cell row.
    pub(crate) bcol: Vec<u32>,
    pub(crate) brow: Vec<u32>,
}

impl StepWorkspace {
    pub fn new(geom: BandGeom, grid: &SimGrid) -> Self {
        let n = geom.local_len();
        let nb = grid.block_count();
        StepWorkspace {
            geom,
            dt_peak: 0.0,
            h_half: vec![0.0; n],
            u_half: vec![0.0; n],
            v_half: vec![0.0; n],
            disp_x: vec![0.0; n],
            disp_y: vec![0.0; n],
            acc_x: vec![0.0; n],
            acc_y: vec![0.0; n],
            lag_h: vec![0.0; n],
            lag_hu: vec![0.0; n],
            lag_hv: vec![0.0; n],
            lag_b: vec![0.0; n],
            lag_active: vec![false; nb],
            eul_active: vec![false; nb],
            flux: FluxScratch::new(),
            bcol: (0..grid.nx).map(|i| (i / grid.block_w) as u32).collect(),
            brow: (0..grid.ny).map(|j| (j / grid.block_h) as u32).collect(),
        }
    }

    /// Workspace covering a whole grid.
    pub fn for_grid(grid: &SimGrid) -> Self {
        Self::new(BandGeom::full(grid.nx, grid.ny), grid)
    }
}

/// Dense per-cell point-source tables, built once per run.
pub(crate) struct PointDense {
    pub gain: Option<Vec<f64>>,
    pub loss: Option<Vec<f64>>,
}

impl PointDense {
    pub fn build(grid: &SimGrid, sources: &SourceInputs) -> Self {
        if sources.points.is_empty() {
            return PointDense { gain: None, loss: None };
        }
        let table = sources.point_tables(grid);
        let (gain, loss) = table.dense(grid.cell_count());
        PointDense {
            gain: if table.inflow.is_empty() { None } else { Some(gain) },
            loss: if table.outflow.is_empty() { None } else { Some(loss) },
        }
    }
}

/// One full step of the pipeline over a single band covering the grid:
/// activity, forces, time step, predictor, corrector forces, corrector,
/// fluxes, update. Returns an instability error (leaving the state at the
/// pre-step values) if the update would produce a meaningfully negative or
/// non-finite depth.
///
/// `dt_cap` clips the controller step, e.g. to land exactly on an output
/// time; pass `f64::INFINITY` for free running.
pub fn step(
    state: &mut FlowState,
    params: &PhysParams,
    sources: &SourceInputs,
    grid: &SimGrid,
    active: &mut ActiveBlockMap,
    ws: &mut StepWorkspace,
    sweep: SweepMode,
    dt_cap: f64,
) -> Result<StepStats> {
    let mask = SourceMask::build(grid, sources);
    let pts = PointDense::build(grid, sources);
    step_inner(state, params, sources, grid, active, ws, sweep, dt_cap, &mask, &pts, 0.0, 0)
}

/// Step with externally cached source tables; the engine calls this in its
/// loop. `time`/`step_no` only label instability errors.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_inner(
    state: &mut FlowState,
    params: &PhysParams,
    sources: &SourceInputs,
    grid: &SimGrid,
    active: &mut ActiveBlockMap,
    ws: &mut StepWorkspace,
    sweep: SweepMode,
    dt_cap: f64,
    mask: &SourceMask,
    pts: &PointDense,
    time: f64,
    step_no: u64,
) -> Result<StepStats> {
    let geom = ws.geom;
    debug_assert_eq!(geom, BandGeom::full(grid.nx, grid.ny));
    let nby = grid.nby();

    // K1: block activity.
    update_counts_rows(&mut active.counts, &state.h, &geom, grid, mask, params.eps_dry, 0, nby);
    let dense = sweep == SweepMode::Dense;
    for k in 0..grid.block_count() {
        ws.lag_active[k] = dense || active.lagrangian_active(k);
        ws.eul_active[k] = dense || active.euler_active(k);
    }
    let lag_blocks = ws.lag_active.iter().filter(|&&a| a).count();
    let eul_blocks = ws.eul_active.iter().filter(|&&a| a).count();

    let base = BaseView { h: &state.h, hu: &state.hu, hv: &state.hv, b: &state.b };
    let rates = SourceRates {
        sources,
        pt_gain: pts.gain.as_deref(),
        pt_loss: pts.loss.as_deref(),
        inv_area: 1.0 / grid.cell_area(),
    };

    // K2: forces at the step start.
    let st = Stencil {
        geom,
        grid,
        base,
        half: None,
        lag_active: &ws.lag_active,
        bcol: &ws.bcol,
        brow: &ws.brow,
        nbx: grid.nbx(),
        west: sources.west,
        east: sources.east,
        south: sources.south,
        north: sources.north,
        eps_dry: params.eps_dry,
    };
    kernels::stage_forces(&st, params, 0, nby, &mut ws.acc_x, &mut ws.acc_y);

    // K3: time step.
    let part = dt::dt_partial_rows(state, params, 0, grid.ny);
    let dtr = dt::dt_from_partial(&part, params, grid);
    let dt_used = dtr.tau.min(dt_cap);
    let collapsed = part.any_wet && dtr.tau < 1e-7 * ws.dt_peak;
    if part.any_wet {
        ws.dt_peak = ws.dt_peak.max(dtr.tau);
    }
    if !dt_used.is_finite() || dt_used <= 0.0 || collapsed {
        return Err(SiltError::Instability {
            time,
            step: step_no,
            detail: format!("time step collapsed to {:.3e} s (peak was {:.3e} s)", dtr.tau, ws.dt_peak),
        });
    }

    // K4: predictor.
    kernels::stage_predict(
        &st,
        params,
        &rates,
        &ws.acc_x,
        &ws.acc_y,
        dt_used,
        0,
        nby,
        &mut ws.h_half,
        &mut ws.u_half,
        &mut ws.v_half,
        &mut ws.disp_x,
        &mut ws.disp_y,
    );

    // K5: forces on the half-step state.
    let half = HalfView { h: &ws.h_half, u: &ws.u_half, v: &ws.v_half, dx: &ws.disp_x, dy: &ws.disp_y };
    let st_half = Stencil { half: Some(half), ..st };
    kernels::stage_forces(&st_half, params, 0, nby, &mut ws.acc_x, &mut ws.acc_y);

    // K6: corrector.
    let max_displacement = kernels::stage_correct(
        &st_half,
        params,
        &rates,
        &half,
        &ws.acc_x,
        &ws.acc_y,
        dt_used,
        0,
        nby,
        &mut ws.lag_h,
        &mut ws.lag_hu,
        &mut ws.lag_hv,
    );

    // K7: face fluxes accumulated into the particle totals.
    let transport = !matches!(params.aj_mode, AjMode::Constant(a) if a == 0.0);
    let args =
        FluxArgs { p: params, rates: &rates, dt: dt_used, transport, eul_active: &ws.eul_active };
    kernels::stage_flux(
        &st_half,
        &args,
        0,
        nby,
        &mut ws.lag_h,
        &mut ws.lag_hu,
        &mut ws.lag_hv,
        &mut ws.lag_b,
        &mut ws.flux,
    );

    // K8: validate, then commit.
    if let Some((i, j, detail)) = kernels::stage_validate(
        &geom,
        grid,
        &ws.eul_active,
        0,
        nby,
        &ws.lag_h,
        &ws.lag_hu,
        &ws.lag_hv,
        &ws.lag_b,
    ) {
        return Err(SiltError::Instability {
            time,
            step: step_no,
            detail: format!("cell ({i}, {j}): {detail}"),
        });
    }
    kernels::stage_commit(
        &geom,
        grid,
        params,
        &ws.eul_active,
        0,
        nby,
        &ws.lag_h,
        &ws.lag_hu,
        &ws.lag_hv,
        &ws.lag_b,
        &mut state.h,
        &mut state.hu,
        &mut state.hv,
        &mut state.b,
    );

    Ok(StepStats { dt: dtr, dt_used, lag_blocks, eul_blocks, max_displacement })
}
