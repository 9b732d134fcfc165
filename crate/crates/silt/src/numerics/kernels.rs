//! Stage kernels of the staged pipeline. Every kernel operates on a row band
//! so the same code serves the single-threaded path and the engine's
//! partitioned workers; results are bitwise identical either way.
//!
//! Stage order within one step:
//!   1. block activity counts
//!   2. forces on the current state          (predictor input)
//!   3. time step
//!   4. particle kick and half-step drift    (predictor)
//!   5. forces on the half-step state        (corrector input)
//!   6. particle state at the full step      (corrector)
//!   7. face fluxes from the half-step state, accumulated per cell
//!   8. validation and commit
//!
//! Cells are wet when `h > eps_dry`. Dry cells feel no force, never donate
//! flux, and carry zero momentum.

use crate::grid::SimGrid;
use crate::params::{BoundaryKind, PhysParams, SourceInputs};
use crate::physics::{coriolis, friction_factor, CellCtx};

use super::flux::{hll_face_flux, sediment_face_flux, FaceFlux, FaceState};
use super::reconstruct::limited_slope;

/// Negative depths beyond this tolerance abort the step.
pub const NEG_DEPTH_TOL: f64 = 1e-12;

/// Which global rows a band's local arrays cover.
///
/// Local arrays hold `rows + 2 * halo` rows of `nx` values; `halo` rows of
/// valid neighbor data sit on each side of the owned range (zero for a band
/// covering the whole grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandGeom {
    pub nx: usize,
    pub ny: usize,
    pub row0: usize,
    pub rows: usize,
    pub halo: usize,
}

impl BandGeom {
    pub fn full(nx: usize, ny: usize) -> Self {
        BandGeom { nx, ny, row0: 0, rows: ny, halo: 0 }
    }

    pub fn local_len(&self) -> usize {
        (self.rows + 2 * self.halo) * self.nx
    }

    /// Local array index of global cell `(i, j)`.
    #[inline]
    pub fn loc(&self, i: usize, gj: usize) -> usize {
        debug_assert!(gj + self.halo >= self.row0 && gj < self.row0 + self.rows + self.halo);
        (gj + self.halo - self.row0) * self.nx + i
    }
}

/// Read-only view of the conserved state at the step start.
#[derive(Clone, Copy)]
pub(crate) struct BaseView<'a> {
    pub h: &'a [f64],
    pub hu: &'a [f64],
    pub hv: &'a [f64],
    pub b: &'a [f64],
}

/// Read-only view of the half-step particle state.
#[derive(Clone, Copy)]
pub(crate) struct HalfView<'a> {
    pub h: &'a [f64],
    pub u: &'a [f64],
    pub v: &'a [f64],
    pub dx: &'a [f64],
    pub dy: &'a [f64],
}

/// Values of one cell as seen by a stencil, after boundary resolution and
/// half-step selection.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CellVals {
    pub h: f64,
    pub u: f64,
    pub v: f64,
    pub b: f64,
    pub eta: f64,
    pub dx: f64,
    pub dy: f64,
    /// Depth at the step start, before the Lagrangian stage.
    pub base_h: f64,
    /// Global index of the in-domain cell the values came from; ghost cells
    /// report their mirror source. Used for per-cell parameter lookups.
    pub src: usize,
}

/// Stencil accessor: resolves out-of-domain indices through the boundary
/// conditions (wall mirrors the interior cell and flips the normal velocity
/// component, open copies it) and serves the half-step state where the
/// Lagrangian stage ran, the base state elsewhere. Blocks skipped by the
/// Lagrangian stage contain no water and no sources, so their half-step
/// state equals the base state exactly.
pub(crate) struct Stencil<'a> {
    pub geom: BandGeom,
    pub grid: &'a SimGrid,
    pub base: BaseView<'a>,
    pub half: Option<HalfView<'a>>,
    pub lag_active: &'a [bool],
    /// Block column per cell column and block row per cell row; lookup
    /// tables keep integer division out of the per-cell path.
    pub bcol: &'a [u32],
    pub brow: &'a [u32],
    pub nbx: usize,
    pub west: BoundaryKind,
    pub east: BoundaryKind,
    pub south: BoundaryKind,
    pub north: BoundaryKind,
    pub eps_dry: f64,
}

impl Stencil<'_> {
    /// Map a possibly-out-of-domain index to an interior cell plus velocity
    /// sign flips for wall mirroring.
    #[inline]
    fn resolve(&self, i: isize, j: isize) -> (usize, usize, f64, f64) {
        let nx = self.geom.nx as isize;
        let ny = self.geom.ny as isize;
        let mut su = 1.0;
        let mut sv = 1.0;
        let ri = if i < 0 {
            match self.west {
                BoundaryKind::Wall => {
                    su = -1.0;
                    -1 - i
                }
                BoundaryKind::Open => 0,
            }
        } else if i >= nx {
            match self.east {
                BoundaryKind::Wall => {
                    su = -1.0;
                    2 * nx - 1 - i
                }
                BoundaryKind::Open => nx - 1,
            }
        } else {
            i
        };
        let rj = if j < 0 {
            match self.south {
                BoundaryKind::Wall => {
                    sv = -1.0;
                    -1 - j
                }
                BoundaryKind::Open => 0,
            }
        } else if j >= ny {
            match self.north {
                BoundaryKind::Wall => {
                    sv = -1.0;
                    2 * ny - 1 - j
                }
                BoundaryKind::Open => ny - 1,
            }
        } else {
            j
        };
        (ri as usize, rj as usize, su, sv)
    }

    #[inline]
    pub fn at(&self, i: isize, j: isize) -> CellVals {
        let (ri, rj, su, sv) = self.resolve(i, j);
        let loc = self.geom.loc(ri, rj);
        let src = rj * self.geom.nx + ri;
        let b = self.base.b[loc];
        let base_h = self.base.h[loc];
        if let Some(half) = &self.half {
            let blk = self.brow[rj] as usize * self.nbx + self.bcol[ri] as usize;
            if self.lag_active[blk] {
                let h = half.h[loc];
                return CellVals {
                    h,
                    u: su * half.u[loc],
                    v: sv * half.v[loc],
                    b,
                    eta: h + b,
                    dx: su * half.dx[loc],
                    dy: sv * half.dy[loc],
                    base_h,
                    src,
                };
            }
        }
        let h = base_h;
        let (u, v) = if h > self.eps_dry {
            (self.base.hu[loc] / h, self.base.hv[loc] / h)
        } else {
            (0.0, 0.0)
        };
        CellVals { h, u: su * u, v: sv * v, b, eta: h + b, dx: 0.0, dy: 0.0, base_h, src }
    }

    /// Depth and surface elevation only; cheaper than [`Stencil::at`] for
    /// stencils that need no velocities.
    #[inline]
    pub fn surface_at(&self, i: isize, j: isize) -> (f64, f64) {
        let (ri, rj, _, _) = self.resolve(i, j);
        let loc = self.geom.loc(ri, rj);
        let b = self.base.b[loc];
        if let Some(half) = &self.half {
            let blk = self.brow[rj] as usize * self.nbx + self.bcol[ri] as usize;
            if self.lag_active[blk] {
                let h = half.h[loc];
                return (h, h + b);
            }
        }
        let h = self.base.h[loc];
        (h, h + b)
    }
}

/// Iterate the blocks of block-rows `[br0, br1)` that pass `active`,
/// yielding `(block_index, i_range, j_range)`.
fn for_active_blocks(
    grid: &SimGrid,
    active: &[bool],
    br0: usize,
    br1: usize,
    mut body: impl FnMut(usize, std::ops::Range<usize>, std::ops::Range<usize>),
) {
    let nbx = grid.nbx();
    for by in br0..br1 {
        for bx in 0..nbx {
            let k = by * nbx + bx;
            if !active[k] {
                continue;
            }
            body(
                k,
                bx * grid.block_w..(bx + 1) * grid.block_w,
                by * grid.block_h..(by + 1) * grid.block_h,
            );
        }
    }
}

/// Largest allowed ratio of neighbor-average depth to cell depth in the
/// surface-gradient force. The ratio weighting makes the flat-bed momentum
/// source telescope to the exact pressure-flux difference (so captured bores
/// satisfy the correct jump conditions); the cap keeps a thin film beside a
/// deep column from receiving an unbounded kick.
const PRESSURE_AMP_CAP: f64 = 4.0;

/// Forces (surface gradient + Coriolis) per wet cell of the Lagrangian-active
/// blocks. Friction is not part of the acceleration; it is applied
/// semi-implicitly during the kick.
///
/// The surface-gradient acceleration is
/// `-(g / H_i) * (H_e + H_w)/2 * d(eta)/dx` (and likewise in y): in momentum
/// form the flat-bed part is the central difference of `g H^2 / 2`, which
/// sums to pure boundary terms. On a flat surface the gradient vanishes and
/// the weighting is irrelevant, so the rest state stays exact.
pub(crate) fn stage_forces(
    st: &Stencil,
    p: &PhysParams,
    br0: usize,
    br1: usize,
    acc_x: &mut [f64],
    acc_y: &mut [f64],
) {
    let grid = st.grid;
    let inv2h = 1.0 / (2.0 * grid.h);
    let eps = st.eps_dry;
    let rotating = p.f_c != 0.0;
    for_active_blocks(grid, st.lag_active, br0, br1, |_, ir, jr| {
        for j in jr.clone() {
            for i in ir.clone() {
                let loc = st.geom.loc(i, j);
                // The own block is Lagrangian-active, so the half-step
                // arrays are valid here when present.
                let ch = match &st.half {
                    Some(half) => half.h[loc],
                    None => st.base.h[loc],
                };
                if ch <= eps {
                    acc_x[loc] = 0.0;
                    acc_y[loc] = 0.0;
                    continue;
                }
                let ceta = ch + st.base.b[loc];
                let (ii, jj) = (i as isize, j as isize);
                let (he, ee) = st.surface_at(ii + 1, jj);
                let (hw, ew) = st.surface_at(ii - 1, jj);
                let (hn, en) = st.surface_at(ii, jj + 1);
                let (hs, es) = st.surface_at(ii, jj - 1);
                let eff = |nh: f64, ne: f64| if nh > eps { ne } else { ne.min(ceta) };
                let gx = (eff(he, ee) - eff(hw, ew)) * inv2h;
                let gy = (eff(hn, en) - eff(hs, es)) * inv2h;
                let rx = (0.5 * (he + hw) / ch).min(PRESSURE_AMP_CAP);
                let ry = (0.5 * (hn + hs) / ch).min(PRESSURE_AMP_CAP);
                let (cx, cy) = if rotating {
                    let (cu, cv) = match &st.half {
                        Some(half) => (half.u[loc], half.v[loc]),
                        None => (st.base.hu[loc] / ch, st.base.hv[loc] / ch),
                    };
                    coriolis(p.f_c, cu, cv)
                } else {
                    (0.0, 0.0)
                };
                acc_x[loc] = -p.g * rx * gx + cx;
                acc_y[loc] = -p.g * ry * gy + cy;
            }
        }
    });
}

/// Per-cell source rates, shared by predictor and corrector.
pub(crate) struct SourceRates<'a> {
    pub sources: &'a SourceInputs,
    /// Dense point inflow/outflow tables (m^3/s), present only when point
    /// sources exist.
    pub pt_gain: Option<&'a [f64]>,
    pub pt_loss: Option<&'a [f64]>,
    pub inv_area: f64,
}

impl SourceRates<'_> {
    #[inline]
    fn gain(&self, src: usize) -> f64 {
        let rain = self.sources.rain.at(src).max(0.0);
        let pt = self.pt_gain.map_or(0.0, |t| t[src]);
        rain + pt * self.inv_area
    }

    #[inline]
    fn loss_rate(&self, src: usize, depth: f64, beta: f64) -> f64 {
        let pt = self.pt_loss.map_or(0.0, |t| t[src]);
        beta * depth + pt * self.inv_area
    }
}

/// One semi-implicit kick + source application over a stage of length `tau`,
/// starting from depth `h0` and velocity `(u0, v0)`, with forces and friction
/// evaluated on (`h_eval`, `speed_eval`).
///
/// Returns `(h1, kept, ux, vy)`: the new depth, the depth of retained
/// original water, and the kicked velocity of that water. Rain enters with
/// zero momentum and dilutes the velocity; absorbed or drained water leaves
/// at the local velocity. The applied source rate is bounded below so the
/// depth cannot go negative.
#[allow(clippy::too_many_arguments)]
#[inline]
fn kick_and_sources(
    p: &PhysParams,
    rates: &SourceRates,
    src: usize,
    tau: f64,
    h0: f64,
    u0: f64,
    v0: f64,
    ax: f64,
    ay: f64,
    h_eval: f64,
    speed_eval: f64,
    n_m: f64,
) -> (f64, f64, f64, f64) {
    let phi = friction_factor(h_eval, speed_eval, n_m, p.g, tau);
    let ux = (u0 + tau * ax) * phi;
    let vy = (v0 + tau * ay) * phi;
    let (h1, kept) = sourced_depth(p, rates, src, tau, h0, h_eval);
    (h1, kept, ux, vy)
}

/// Depth after applying sources over `tau`, with the loss rate evaluated on
/// `h_eval`. Returns `(new, kept)` where `kept` is the retained original
/// water. Also used to bound outgoing face fluxes, so it must match the
/// corrector arithmetic exactly.
#[inline]
pub(crate) fn sourced_depth(
    p: &PhysParams,
    rates: &SourceRates,
    src: usize,
    tau: f64,
    h0: f64,
    h_eval: f64,
) -> (f64, f64) {
    let gain = rates.gain(src);
    let beta = p.beta.at(src).max(0.0);
    let loss = rates.loss_rate(src, h_eval, beta);
    if gain == 0.0 && loss == 0.0 {
        return (h0, h0);
    }
    let removed = (tau * loss).min(h0);
    let kept = h0 - removed;
    (kept + tau * gain, kept)
}

/// Predictor: advance particle velocities by `dt/2` worth of forces and
/// friction, apply sources, and record the half-step drift. Displacements
/// are confined to the owning cell.
#[allow(clippy::too_many_arguments)]
pub(crate) fn stage_predict(
    st: &Stencil,
    p: &PhysParams,
    rates: &SourceRates,
    acc_x: &[f64],
    acc_y: &[f64],
    dt: f64,
    br0: usize,
    br1: usize,
    h_half: &mut [f64],
    u_half: &mut [f64],
    v_half: &mut [f64],
    disp_x: &mut [f64],
    disp_y: &mut [f64],
) {
    let grid = st.grid;
    let tau = 0.5 * dt;
    let half_cell = 0.5 * grid.h;
    let eps = p.eps_dry;
    for_active_blocks(grid, st.lag_active, br0, br1, |_, ir, jr| {
        for j in jr.clone() {
            for i in ir.clone() {
                let loc = st.geom.loc(i, j);
                let src = j * grid.nx + i;
                let h0 = st.base.h[loc];
                let wet = h0 > eps;
                let (u0, v0) = if wet { (st.base.hu[loc] / h0, st.base.hv[loc] / h0) } else { (0.0, 0.0) };
                let (ax, ay) = if wet { (acc_x[loc], acc_y[loc]) } else { (0.0, 0.0) };
                let speed = (u0 * u0 + v0 * v0).sqrt();
                let n_m = p.manning.at(src);
                let (h1, kept, ux, vy) =
                    kick_and_sources(p, rates, src, tau, h0, u0, v0, ax, ay, h0, speed, n_m);
                let (ue, ve) = if h1 <= eps {
                    (0.0, 0.0)
                } else if kept == h1 {
                    (ux, vy)
                } else {
                    (kept * ux / h1, kept * vy / h1)
                };
                h_half[loc] = h1;
                u_half[loc] = ue;
                v_half[loc] = ve;
                disp_x[loc] = (tau * ue).clamp(-half_cell, half_cell);
                disp_y[loc] = (tau * ve).clamp(-half_cell, half_cell);
            }
        }
    });
}

/// Corrector: integrate the full step from the base state using forces and
/// friction evaluated on the half-step state, producing the per-cell
/// particle totals (conserved form). Returns the largest particle
/// displacement over the full step for the confinement diagnostic.
#[allow(clippy::too_many_arguments)]
pub(crate) fn stage_correct(
    st: &Stencil,
    p: &PhysParams,
    rates: &SourceRates,
    half: &HalfView,
    acc_x: &[f64],
    acc_y: &[f64],
    dt: f64,
    br0: usize,
    br1: usize,
    lag_h: &mut [f64],
    lag_hu: &mut [f64],
    lag_hv: &mut [f64],
) -> f64 {
    let grid = st.grid;
    let eps = p.eps_dry;
    let mut max_disp = 0.0f64;
    for_active_blocks(grid, st.lag_active, br0, br1, |_, ir, jr| {
        for j in jr.clone() {
            for i in ir.clone() {
                let loc = st.geom.loc(i, j);
                let src = j * grid.nx + i;
                let h0 = st.base.h[loc];
                let wet0 = h0 > eps;
                let (u0, v0) = if wet0 { (st.base.hu[loc] / h0, st.base.hv[loc] / h0) } else { (0.0, 0.0) };
                let hh = half.h[loc];
                let (uh, vh) = (half.u[loc], half.v[loc]);
                let (ax, ay) = (acc_x[loc], acc_y[loc]);
                let speed_h = (uh * uh + vh * vh).sqrt();
                let n_m = p.manning.at(src);
                // Full-step displacement is the midpoint drift dt * v_half.
                max_disp = max_disp.max((dt * uh).abs()).max((dt * vh).abs());
                let (h1, kept, ux, vy) =
                    kick_and_sources(p, rates, src, dt, h0, u0, v0, ax, ay, hh, speed_h, n_m);
                lag_h[loc] = h1;
                lag_hu[loc] = kept * ux;
                lag_hv[loc] = kept * vy;
            }
        }
    });
    max_disp
}

/// Everything the flux stage needs besides the stencil.
pub(crate) struct FluxArgs<'a> {
    pub p: &'a PhysParams,
    pub rates: &'a SourceRates<'a>,
    pub dt: f64,
    /// Skip the bedload flux entirely when transport is off.
    pub transport: bool,
    pub eul_active: &'a [bool],
}

/// Scratch buffers for the flux stage, reused across steps.
pub(crate) struct FluxScratch {
    xf: Vec<FaceFlux>,
    yf: Vec<FaceFlux>,
    win: Vec<CellVals>,
    slopes: Vec<SlopeSet>,
}

impl FluxScratch {
    pub fn new() -> Self {
        FluxScratch { xf: Vec::new(), yf: Vec::new(), win: Vec::new(), slopes: Vec::new() }
    }
}

/// Limited slopes of one cell along the sweep axis.
#[derive(Debug, Clone, Copy, Default)]
struct SlopeSet {
    eta: f64,
    h: f64,
    u: f64,
    v: f64,
}

/// Face fluxes from the reconstructed half-step state, accumulated into the
/// per-cell particle totals (initializing them from the base state where the
/// Lagrangian stage did not run). Each block computes the faces touching its
/// own cells; a face shared by two blocks is computed identically by both,
/// so the update telescopes exactly.
///
/// Rows (and columns) are swept with a sliding window of fetched cell values
/// and slopes, so every cell is resolved and sloped once per sweep.
#[allow(clippy::too_many_arguments)]
pub(crate) fn stage_flux(
    st: &Stencil,
    args: &FluxArgs,
    br0: usize,
    br1: usize,
    lag_h: &mut [f64],
    lag_hu: &mut [f64],
    lag_hv: &mut [f64],
    lag_b: &mut [f64],
    scratch: &mut FluxScratch,
) {
    let grid = st.grid;
    let p = args.p;
    let k_dt = args.dt / grid.h;
    let inv_porosity = 1.0 / (1.0 - p.psi);
    let bw = grid.block_w;
    let bh = grid.block_h;
    scratch.xf.resize(bw + 1, FaceFlux::ZERO);
    scratch.yf.resize(bh + 1, FaceFlux::ZERO);
    let wlen = bw.max(bh) + 4;
    scratch.win.resize(wlen, CellVals::default());
    scratch.slopes.resize(wlen, SlopeSet::default());
    let win = &mut scratch.win;
    let slopes = &mut scratch.slopes;
    let xf = &mut scratch.xf;
    let yf = &mut scratch.yf;

    for_active_blocks(grid, args.eul_active, br0, br1, |k, ir, jr| {
        let lag_ran = st.lag_active[k];
        // Initialize the accumulators and apply the erosion/deposition
        // closure.
        for j in jr.clone() {
            for i in ir.clone() {
                let loc = st.geom.loc(i, j);
                if !lag_ran {
                    lag_h[loc] = st.base.h[loc];
                    lag_hu[loc] = st.base.hu[loc];
                    lag_hv[loc] = st.base.hv[loc];
                }
                if p.bed_exchange.is_some() {
                    let c = st.at(i as isize, j as isize);
                    let speed = (c.u * c.u + c.v * c.v).sqrt();
                    let above = speed
                        >= crate::physics::shamov_threshold(p.d50, c.h, p.c_sh, p.eps_dry);
                    let ctx = CellCtx {
                        i,
                        j,
                        depth: c.h,
                        u: c.u,
                        v: c.v,
                        bed: c.b,
                        above_threshold: above,
                    };
                    let q = p.bed_exchange_at(&ctx);
                    lag_b[loc] = st.base.b[loc] + args.dt * q.net() * inv_porosity;
                } else {
                    lag_b[loc] = st.base.b[loc];
                }
            }
        }
        // x-faces, row by row. Window cell w holds global column
        // ir.start - 2 + w; faces f = 0..=bw sit between window cells
        // f + 1 and f + 2.
        for j in jr.clone() {
            let jj = j as isize;
            let base_i = ir.start as isize - 2;
            for (w, cell) in win[..bw + 4].iter_mut().enumerate() {
                *cell = st.at(base_i + w as isize, jj);
            }
            for w in 1..bw + 3 {
                slopes[w] = slope_set(p, &win[w - 1], &win[w], &win[w + 1], grid.h);
            }
            for (f, slot) in xf[..bw + 1].iter_mut().enumerate() {
                *slot = face_combine(st, args, &win[f + 1], &slopes[f + 1], &win[f + 2], &slopes[f + 2], Axis::X);
            }
            for (ci, i) in ir.clone().enumerate() {
                let loc = st.geom.loc(i, j);
                lag_h[loc] -= k_dt * (xf[ci + 1].mass - xf[ci].mass);
                lag_hu[loc] -= k_dt * (xf[ci + 1].mom_n - xf[ci].mom_n);
                lag_hv[loc] -= k_dt * (xf[ci + 1].mom_t - xf[ci].mom_t);
                lag_b[loc] -= k_dt * (xf[ci + 1].sed - xf[ci].sed);
            }
        }
        // y-faces, column by column.
        for i in ir.clone() {
            let ii = i as isize;
            let base_j = jr.start as isize - 2;
            for (w, cell) in win[..bh + 4].iter_mut().enumerate() {
                *cell = st.at(ii, base_j + w as isize);
            }
            for w in 1..bh + 3 {
                slopes[w] = slope_set(p, &win[w - 1], &win[w], &win[w + 1], grid.h);
            }
            for (f, slot) in yf[..bh + 1].iter_mut().enumerate() {
                *slot = face_combine(st, args, &win[f + 1], &slopes[f + 1], &win[f + 2], &slopes[f + 2], Axis::Y);
            }
            for (cj, j) in jr.clone().enumerate() {
                let loc = st.geom.loc(i, j);
                lag_h[loc] -= k_dt * (yf[cj + 1].mass - yf[cj].mass);
                lag_hu[loc] -= k_dt * (yf[cj + 1].mom_t - yf[cj].mom_t);
                lag_hv[loc] -= k_dt * (yf[cj + 1].mom_n - yf[cj].mom_n);
                lag_b[loc] -= k_dt * (yf[cj + 1].sed - yf[cj].sed);
            }
        }
    });
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    X,
    Y,
}

/// Limited slopes of a cell from its two axis neighbors.
#[inline]
fn slope_set(p: &PhysParams, m: &CellVals, c: &CellVals, q: &CellVals, h: f64) -> SlopeSet {
    let lim = p.limiter;
    SlopeSet {
        eta: limited_slope(lim, m.eta, c.eta, q.eta, h),
        h: limited_slope(lim, m.h, c.h, q.h, h),
        u: limited_slope(lim, m.u, c.u, q.u, h),
        v: limited_slope(lim, m.v, c.v, q.v, h),
    }
}

/// Reconstructed state of a cell at its face on the side `side` (+1:
/// positive face, -1: negative face) along `axis`, evaluated at the face
/// relative to the displaced particle position.
#[inline]
fn face_state(c: &CellVals, sl: &SlopeSet, p: &PhysParams, side: f64, axis: Axis, h: f64) -> FaceState {
    let n_m = p.manning.at(c.src);
    if c.h <= p.eps_dry {
        return FaceState::dry(c.eta, n_m);
    }
    let (un, ut, s_un, s_ut, d_along) = match axis {
        Axis::X => (c.u, c.v, sl.u, sl.v, c.dx),
        Axis::Y => (c.v, c.u, sl.v, sl.u, c.dy),
    };
    let delta = side * 0.5 * h - d_along;
    FaceState {
        h: (c.h + sl.h * delta).max(0.0),
        un: un + s_un * delta,
        ut: ut + s_ut * delta,
        eta: c.eta + sl.eta * delta,
        n_m,
    }
}

/// Flux through the face between two reconstructed cells.
///
/// The outgoing water flux is capped at a quarter of the donor cell's
/// deliverable depth per step, so a cell drained through all four faces can
/// never go meaningfully negative. The cap is a pure function of the two
/// cell states, so both blocks sharing a face compute the same value and the
/// update stays conservative. Away from wetting fronts the cap never binds:
/// there the per-step drainage is a small fraction of the cell volume.
fn face_combine(
    st: &Stencil,
    args: &FluxArgs,
    cl: &CellVals,
    sl: &SlopeSet,
    cr: &CellVals,
    sr: &SlopeSet,
    axis: Axis,
) -> FaceFlux {
    let p = args.p;
    if cl.h <= p.eps_dry && cr.h <= p.eps_dry {
        return FaceFlux::ZERO;
    }
    let l = face_state(cl, sl, p, 1.0, axis, st.grid.h);
    let r = face_state(cr, sr, p, -1.0, axis, st.grid.h);
    let mut f = hll_face_flux(&l, &r, p.g, p.eps_dry);
    if f.mass != 0.0 {
        let donor = if f.mass > 0.0 { cl } else { cr };
        let (avail, _) = sourced_depth(p, args.rates, donor.src, args.dt, donor.base_h, donor.h);
        let cap = 0.25 * avail * st.grid.h / args.dt;
        if f.mass.abs() > cap {
            let scale = if f.mass.abs() > 0.0 { cap / f.mass.abs() } else { 0.0 };
            f.mass *= scale;
            f.mom_n *= scale;
            f.mom_t *= scale;
        }
    }
    if args.transport {
        let db_dn = (cr.b - cl.b) / st.grid.h;
        f.sed = sediment_face_flux(&l, &r, db_dn, p);
    }
    f
}

/// First constraint violation in the accumulated totals, if any. Runs before
/// the commit so a failing step leaves the state untouched.
pub(crate) fn stage_validate(
    geom: &BandGeom,
    grid: &SimGrid,
    eul_active: &[bool],
    br0: usize,
    br1: usize,
    lag_h: &[f64],
    lag_hu: &[f64],
    lag_hv: &[f64],
    lag_b: &[f64],
) -> Option<(usize, usize, String)> {
    let mut found = None;
    for_active_blocks(grid, eul_active, br0, br1, |_, ir, jr| {
        if found.is_some() {
            return;
        }
        for j in jr.clone() {
            for i in ir.clone() {
                let loc = geom.loc(i, j);
                let h = lag_h[loc];
                if h < -NEG_DEPTH_TOL {
                    found = Some((i, j, format!("depth {h:.3e} below -{NEG_DEPTH_TOL:.0e}")));
                    return;
                }
                if !h.is_finite() || !lag_hu[loc].is_finite() || !lag_hv[loc].is_finite() || !lag_b[loc].is_finite()
                {
                    found = Some((i, j, "non-finite field value".to_string()));
                    return;
                }
            }
        }
    });
    found
}

/// Commit the accumulated totals into the state. Depths within the negative
/// tolerance clamp to zero; cells at or below the dry threshold drop their
/// momentum.
#[allow(clippy::too_many_arguments)]
pub(crate) fn stage_commit(
    geom: &BandGeom,
    grid: &SimGrid,
    p: &PhysParams,
    eul_active: &[bool],
    br0: usize,
    br1: usize,
    lag_h: &[f64],
    lag_hu: &[f64],
    lag_hv: &[f64],
    lag_b: &[f64],
    h: &mut [f64],
    hu: &mut [f64],
    hv: &mut [f64],
    b: &mut [f64],
) {
    for_active_blocks(grid, eul_active, br0, br1, |_, ir, jr| {
        for j in jr.clone() {
            for i in ir.clone() {
                let loc = geom.loc(i, j);
                let mut hn = lag_h[loc];
                if hn < 0.0 {
                    hn = 0.0;
                }
                h[loc] = hn;
                if hn > p.eps_dry {
                    hu[loc] = lag_hu[loc];
                    hv[loc] = lag_hv[loc];
                } else {
                    hu[loc] = 0.0;
                    hv[loc] = 0.0;
                }
                b[loc] = lag_b[loc];
            }
        }
    });
}
