//! Per-block wet-cell accounting so dry regions cost almost nothing.
//!
//! Each block stores the number of cells containing water or an active source.
//! The Lagrangian stage only needs water in the block itself; the Eulerian
//! stage also checks the four edge neighbors because fluxes cross block
//! boundaries.

use crate::grid::SimGrid;
use crate::params::{FieldSpec, SourceInputs};
use crate::state::FlowState;

/// Per-block wet/source cell counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveBlockMap {
    pub counts: Vec<u32>,
    pub nbx: usize,
    pub nby: usize,
}

impl ActiveBlockMap {
    pub fn empty(grid: &SimGrid) -> Self {
        ActiveBlockMap { counts: vec![0; grid.block_count()], nbx: grid.nbx(), nby: grid.nby() }
    }

    /// Whether block `k` must run the Lagrangian stage.
    #[inline]
    pub fn lagrangian_active(&self, k: usize) -> bool {
        self.counts[k] > 0
    }

    /// Whether block `k` must run the Eulerian stage: water in the block
    /// itself or any of its four edge neighbors. Neighbor lookups clamp at
    /// the domain edge.
    #[inline]
    pub fn euler_active(&self, k: usize) -> bool {
        let bx = k % self.nbx;
        let by = k / self.nbx;
        let left = by * self.nbx + bx.saturating_sub(1);
        let right = by * self.nbx + (bx + 1).min(self.nbx - 1);
        let down = by.saturating_sub(1) * self.nbx + bx;
        let up = (by + 1).min(self.nby - 1) * self.nbx + bx;
        self.counts[k] > 0
            || self.counts[left] > 0
            || self.counts[right] > 0
            || self.counts[down] > 0
            || self.counts[up] > 0
    }

    pub fn active_lagrangian_count(&self) -> usize {
        (0..self.counts.len()).filter(|&k| self.lagrangian_active(k)).count()
    }

    pub fn active_euler_count(&self) -> usize {
        (0..self.counts.len()).filter(|&k| self.euler_active(k)).count()
    }

    /// Fraction of blocks that run the Eulerian stage.
    pub fn occupancy(&self) -> f64 {
        self.active_euler_count() as f64 / self.counts.len().max(1) as f64
    }
}

/// Cells that stay active regardless of water content because a source can
/// wet them. Built once per run from the static source configuration.
#[derive(Debug, Clone)]
pub struct SourceMask {
    /// Uniform positive rain keeps every block active.
    pub all: bool,
    /// Sparse per-cell flags; only present when needed.
    pub cells: Option<Vec<bool>>,
}

impl SourceMask {
    pub fn build(grid: &SimGrid, sources: &SourceInputs) -> Self {
        let all = matches!(sources.rain, FieldSpec::Uniform(r) if r > 0.0);
        if all {
            return SourceMask { all: true, cells: None };
        }
        let mut cells: Option<Vec<bool>> = None;
        if let FieldSpec::PerCell(rain) = &sources.rain {
            if rain.iter().any(|&r| r > 0.0) {
                let mask = cells.get_or_insert_with(|| vec![false; grid.cell_count()]);
                for (k, &r) in rain.iter().enumerate() {
                    if r > 0.0 {
                        mask[k] = true;
                    }
                }
            }
        }
        for p in &sources.points {
            let mask = cells.get_or_insert_with(|| vec![false; grid.cell_count()]);
            mask[grid.idx(p.i, p.j)] = true;
        }
        SourceMask { all: false, cells }
    }

    #[inline]
    pub fn is_source(&self, idx: usize) -> bool {
        self.all || self.cells.as_ref().map_or(false, |m| m[idx])
    }
}

/// Count wet/source cells per block over the whole grid.
pub fn update_counts(state: &FlowState, grid: &SimGrid, sources: &SourceInputs, eps_dry: f64) -> ActiveBlockMap {
    let mask = SourceMask::build(grid, sources);
    let mut map = ActiveBlockMap::empty(grid);
    let geom = crate::numerics::BandGeom::full(grid.nx, grid.ny);
    update_counts_rows(&mut map.counts, &state.h, &geom, grid, &mask, eps_dry, 0, grid.nby());
    map
}

/// Count wet/source cells for block rows `[br0, br1)`; writes only those
/// entries of `counts`. Used by the engine to split the reduction across
/// workers; `h` may be a band's local array described by `geom`.
pub(crate) fn update_counts_rows(
    counts: &mut [u32],
    h: &[f64],
    geom: &crate::numerics::BandGeom,
    grid: &SimGrid,
    mask: &SourceMask,
    eps_dry: f64,
    br0: usize,
    br1: usize,
) {
    let nbx = grid.nbx();
    for by in br0..br1 {
        for bx in 0..nbx {
            let mut c = 0u32;
            for j in by * grid.block_h..(by + 1) * grid.block_h {
                for i in bx * grid.block_w..(bx + 1) * grid.block_w {
                    if h[geom.loc(i, j)] > eps_dry || mask.is_source(j * grid.nx + i) {
                        c += 1;
                    }
                }
            }
            counts[by * nbx + bx] = c;
        }
    }
}
