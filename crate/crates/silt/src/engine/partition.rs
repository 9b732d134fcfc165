//! Domain decomposition into row bands of blocks, with halo exchange over a
//! ring of workers.
//!
//! Each worker owns a contiguous band of block rows, stored locally with two
//! halo rows on each side so reconstruction at band edges uses true neighbor
//! data. Boundary rows travel through per-band outboxes: before an exchange
//! barrier every worker deposits its edge rows, after it every worker copies
//! its ring neighbors' deposits into its halo. The first band's lower
//! neighbor wraps to the last band and vice versa; wrapped halo rows are
//! never read by the kernels (physical boundaries use ghost values), they
//! just keep the wiring uniform.

use std::ops::Range;

use crate::grid::SimGrid;
use crate::numerics::{BandGeom, StepWorkspace};
use crate::state::FlowState;

pub(crate) const HALO_ROWS: usize = 2;

/// One worker's owned slice of the grid plus its scratch arrays.
pub(crate) struct WorkerBand {
    pub geom: BandGeom,
    pub block_rows: Range<usize>,
    pub h: Vec<f64>,
    pub hu: Vec<f64>,
    pub hv: Vec<f64>,
    pub b: Vec<f64>,
    pub ws: StepWorkspace,
}

impl WorkerBand {
    pub fn is_empty(&self) -> bool {
        self.geom.rows == 0
    }
}

/// Block-row ranges per worker. Bands are contiguous, non-empty bands come
/// first, and every non-empty band owns at least two cell rows so one ring
/// neighbor supplies a full halo. Workers beyond the useful band count get
/// empty ranges and only participate in barriers.
pub(crate) fn band_layout(grid: &SimGrid, workers: usize) -> Vec<Range<usize>> {
    let nby = grid.nby();
    let mut nbands = workers.min(nby).max(1);
    while nbands > 1 && (nby / nbands) * grid.block_h < HALO_ROWS {
        nbands -= 1;
    }
    let base = nby / nbands;
    let rem = nby % nbands;
    let mut ranges = Vec::with_capacity(workers);
    let mut start = 0;
    for w in 0..workers {
        if w < nbands {
            let len = base + usize::from(w < rem);
            ranges.push(start..start + len);
            start += len;
        } else {
            ranges.push(nby..nby);
        }
    }
    ranges
}

/// Ring neighbor ids `(below, above)`: the lowest band's below-neighbor
/// wraps to the highest and the highest band's above-neighbor wraps to the
/// lowest.
pub(crate) fn ring_neighbors(id: usize, count: usize) -> (usize, usize) {
    if count <= 1 {
        return (id, id);
    }
    let below = if id == 0 { count - 1 } else { id - 1 };
    let above = if id == count - 1 { 0 } else { id + 1 };
    (below, above)
}

/// Copy the global state into per-worker bands, filling real halo rows
/// directly (wrapped halo slots start at zero and are refreshed by the first
/// exchange).
pub(crate) fn scatter(state: &FlowState, grid: &SimGrid, ranges: &[Range<usize>]) -> Vec<WorkerBand> {
    let nx = grid.nx;
    let ny = grid.ny;
    ranges
        .iter()
        .map(|br| {
            let row0 = br.start * grid.block_h;
            let rows = (br.end - br.start) * grid.block_h;
            let geom = BandGeom { nx, ny, row0, rows, halo: HALO_ROWS };
            let len = geom.local_len();
            let mut band = WorkerBand {
                geom,
                block_rows: br.clone(),
                h: vec![0.0; len],
                hu: vec![0.0; len],
                hv: vec![0.0; len],
                b: vec![0.0; len],
                ws: StepWorkspace::new(geom, grid),
            };
            if rows > 0 {
                let lo = row0.saturating_sub(HALO_ROWS);
                let hi = (row0 + rows + HALO_ROWS).min(ny);
                for gj in lo..hi {
                    let loc = geom.loc(0, gj);
                    let g0 = gj * nx;
                    band.h[loc..loc + nx].copy_from_slice(&state.h[g0..g0 + nx]);
                    band.hu[loc..loc + nx].copy_from_slice(&state.hu[g0..g0 + nx]);
                    band.hv[loc..loc + nx].copy_from_slice(&state.hv[g0..g0 + nx]);
                    band.b[loc..loc + nx].copy_from_slice(&state.b[g0..g0 + nx]);
                }
            }
            band
        })
        .collect()
}

/// Copy a band's owned rows back into the global state.
pub(crate) fn gather_band(band: &WorkerBand, state: &mut FlowState) {
    let geom = &band.geom;
    for gj in geom.row0..geom.row0 + geom.rows {
        let loc = geom.loc(0, gj);
        let g0 = gj * geom.nx;
        state.h[g0..g0 + geom.nx].copy_from_slice(&band.h[loc..loc + geom.nx]);
        state.hu[g0..g0 + geom.nx].copy_from_slice(&band.hu[loc..loc + geom.nx]);
        state.hv[g0..g0 + geom.nx].copy_from_slice(&band.hv[loc..loc + geom.nx]);
        state.b[g0..g0 + geom.nx].copy_from_slice(&band.b[loc..loc + geom.nx]);
    }
}

/// Which arrays an exchange moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum HaloSet {
    /// Conserved state at the step start.
    Base,
    /// Half-step particle state and displacements.
    Half,
}

const MAX_ARRAYS: usize = 5;

/// Edge rows a band deposits for its ring neighbors.
pub(crate) struct Outbox {
    /// First owned rows, headed to the band below.
    to_below: [Vec<f64>; MAX_ARRAYS],
    /// Last owned rows, headed to the band above.
    to_above: [Vec<f64>; MAX_ARRAYS],
}

impl Outbox {
    pub fn new(nx: usize) -> Self {
        let make = || std::array::from_fn(|_| vec![0.0; HALO_ROWS * nx]);
        Outbox { to_below: make(), to_above: make() }
    }
}

fn set_arrays<'a>(band: &'a WorkerBand, set: HaloSet) -> Vec<&'a [f64]> {
    match set {
        HaloSet::Base => vec![&band.h, &band.hu, &band.hv, &band.b],
        HaloSet::Half => vec![
            &band.ws.h_half,
            &band.ws.u_half,
            &band.ws.v_half,
            &band.ws.disp_x,
            &band.ws.disp_y,
        ],
    }
}

fn set_arrays_mut<'a>(band: &'a mut WorkerBand, set: HaloSet) -> Vec<&'a mut [f64]> {
    match set {
        HaloSet::Base => vec![&mut band.h, &mut band.hu, &mut band.hv, &mut band.b],
        HaloSet::Half => vec![
            &mut band.ws.h_half,
            &mut band.ws.u_half,
            &mut band.ws.v_half,
            &mut band.ws.disp_x,
            &mut band.ws.disp_y,
        ],
    }
}

/// Deposit this band's edge rows into its outbox. Runs before the exchange
/// barrier.
pub(crate) fn fill_outbox(band: &WorkerBand, set: HaloSet, out: &mut Outbox) {
    if band.is_empty() {
        return;
    }
    let geom = &band.geom;
    let nx = geom.nx;
    for (a, arr) in set_arrays(band, set).into_iter().enumerate() {
        for r in 0..HALO_ROWS {
            let lo_row = geom.row0 + r;
            let hi_row = geom.row0 + geom.rows - HALO_ROWS + r;
            let lo = geom.loc(0, lo_row);
            let hi = geom.loc(0, hi_row);
            out.to_below[a][r * nx..(r + 1) * nx].copy_from_slice(&arr[lo..lo + nx]);
            out.to_above[a][r * nx..(r + 1) * nx].copy_from_slice(&arr[hi..hi + nx]);
        }
    }
}

/// Copy the below-neighbor's deposit (its `to_above` rows) into this band's
/// bottom halo rows. Runs after the exchange barrier. Each side is applied
/// under its own lock so a two-band ring, where both neighbors are the same
/// band, needs no nested locking.
pub(crate) fn apply_from_below(band: &mut WorkerBand, set: HaloSet, from_below: &Outbox) {
    if band.is_empty() {
        return;
    }
    let nx = band.geom.nx;
    for (a, arr) in set_arrays_mut(band, set).into_iter().enumerate() {
        for r in 0..HALO_ROWS {
            let bottom = r * nx;
            arr[bottom..bottom + nx].copy_from_slice(&from_below.to_above[a][r * nx..(r + 1) * nx]);
        }
    }
}

/// Copy the above-neighbor's deposit (its `to_below` rows) into this band's
/// top halo rows.
pub(crate) fn apply_from_above(band: &mut WorkerBand, set: HaloSet, from_above: &Outbox) {
    if band.is_empty() {
        return;
    }
    let geom = band.geom;
    let nx = geom.nx;
    for (a, arr) in set_arrays_mut(band, set).into_iter().enumerate() {
        for r in 0..HALO_ROWS {
            let top = (geom.halo + geom.rows + r) * nx;
            arr[top..top + nx].copy_from_slice(&from_above.to_below[a][r * nx..(r + 1) * nx]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{new_state, WaterInit};

    #[test]
    fn ring_matches_reference_wiring() {
        // Two participants point at each other.
        assert_eq!(ring_neighbors(0, 2), (1, 1));
        assert_eq!(ring_neighbors(1, 2), (0, 0));
        // With four, the ends wrap.
        assert_eq!(ring_neighbors(0, 4), (3, 1));
        assert_eq!(ring_neighbors(1, 4), (0, 2));
        assert_eq!(ring_neighbors(3, 4), (2, 0));
        // A single participant is its own neighbor (exchange is a no-op).
        assert_eq!(ring_neighbors(0, 1), (0, 0));
    }

    #[test]
    fn layout_is_contiguous_and_respects_min_rows() {
        let grid = SimGrid::with_blocks(32, 128, 1.0, 16, 16).unwrap();
        let ranges = band_layout(&grid, 3);
        assert_eq!(ranges.len(), 3);
        assert_eq!(ranges[0], 0..3);
        assert_eq!(ranges[1], 3..6);
        assert_eq!(ranges[2], 6..8);
        // More workers than block rows: the extras get empty bands.
        let grid = SimGrid::with_blocks(16, 3, 1.0, 16, 3).unwrap();
        let ranges = band_layout(&grid, 4);
        assert_eq!(ranges[0], 0..1);
        assert!(ranges[1].is_empty() && ranges[2].is_empty() && ranges[3].is_empty());
        // Unit-height block rows merge until each band holds two cell rows.
        let grid = SimGrid::with_blocks(16, 5, 1.0, 16, 1).unwrap();
        let ranges = band_layout(&grid, 4);
        let nonempty = ranges.iter().filter(|r| !r.is_empty()).count();
        assert_eq!(nonempty, 2);
    }

    #[test]
    fn scatter_gather_roundtrip() {
        let grid = SimGrid::with_blocks(8, 64, 1.0, 8, 8).unwrap();
        let n = grid.cell_count();
        let mut state = new_state(&grid, vec![0.0; n], &WaterInit::Depth { h0: 1.0 }).unwrap();
        for idx in 0..n {
            state.h[idx] = idx as f64;
            state.hu[idx] = -(idx as f64);
            state.b[idx] = 0.5 * idx as f64;
        }
        let ranges = band_layout(&grid, 3);
        let bands = scatter(&state, &grid, &ranges);
        let mut back = new_state(&grid, vec![0.0; n], &WaterInit::Depth { h0: 0.0 }).unwrap();
        for band in &bands {
            gather_band(band, &mut back);
        }
        assert_eq!(back.h, state.h);
        assert_eq!(back.hu, state.hu);
        assert_eq!(back.b, state.b);
    }

    #[test]
    fn exchange_carries_neighbor_sentinels_around_the_ring() {
        let grid = SimGrid::with_blocks(4, 48, 1.0, 4, 8).unwrap();
        let n = grid.cell_count();
        let state = new_state(&grid, vec![0.0; n], &WaterInit::Depth { h0: 0.0 }).unwrap();
        let ranges = band_layout(&grid, 3);
        let mut bands = scatter(&state, &grid, &ranges);
        // Distinct sentinel per band in its owned rows.
        for (id, band) in bands.iter_mut().enumerate() {
            let geom = band.geom;
            let sentinel = 100.0 + id as f64;
            for gj in geom.row0..geom.row0 + geom.rows {
                let lo = geom.loc(0, gj);
                band.h[lo..lo + geom.nx].fill(sentinel);
            }
        }
        let mut outboxes: Vec<Outbox> = bands.iter().map(|_| Outbox::new(grid.nx)).collect();
        for (band, out) in bands.iter().zip(outboxes.iter_mut()) {
            fill_outbox(band, HaloSet::Base, out);
        }
        let count = bands.len();
        for k in 0..count {
            let (below, above) = ring_neighbors(k, count);
            apply_from_below(&mut bands[k], HaloSet::Base, &outboxes[below]);
            apply_from_above(&mut bands[k], HaloSet::Base, &outboxes[above]);
        }
        // Interior halos carry the physical neighbor's sentinel.
        let b1 = &bands[1];
        assert!(b1.h[0..grid.nx].iter().all(|&v| v == 100.0), "band 1 bottom halo from band 0");
        let top = (b1.geom.halo + b1.geom.rows) * grid.nx;
        assert!(b1.h[top..top + grid.nx].iter().all(|&v| v == 102.0), "band 1 top halo from band 2");
        // Wrapped halos carry the ring partner's sentinel (never read by
        // kernels, but the wiring is uniform).
        let b0 = &bands[0];
        assert!(b0.h[0..grid.nx].iter().all(|&v| v == 102.0), "band 0 wraps to band 2");
        let b2 = &bands[2];
        let top2 = (b2.geom.halo + b2.geom.rows) * grid.nx;
        assert!(b2.h[top2..top2 + grid.nx].iter().all(|&v| v == 100.0), "band 2 wraps to band 0");
    }
}
