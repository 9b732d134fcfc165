//! Simulation state: conserved water fields and bed elevation.

use crate::error::{Result, SiltError};
use crate::grid::SimGrid;

/// Conserved fields on the grid: depth `h`, momentum densities `hu`/`hv`, and
/// bed elevation `b`. All arrays are row-major `ny * nx`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub nx: usize,
    pub ny: usize,
    pub h: Vec<f64>,
    pub hu: Vec<f64>,
    pub hv: Vec<f64>,
    pub b: Vec<f64>,
}

impl FlowState {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Free surface elevation of a cell.
    #[inline]
    pub fn eta(&self, idx: usize) -> f64 {
        self.h[idx] + self.b[idx]
    }

    /// Velocity of a cell; dry cells report zero.
    #[inline]
    pub fn velocity(&self, idx: usize, eps_dry: f64) -> (f64, f64) {
        let h = self.h[idx];
        if h < eps_dry {
            (0.0, 0.0)
        } else {
            (self.hu[idx] / h, self.hv[idx] / h)
        }
    }

    /// Largest |v| over wet cells.
    pub fn max_speed(&self, eps_dry: f64) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..self.h.len() {
            let (u, v) = self.velocity(idx, eps_dry);
            m = m.max((u * u + v * v).sqrt());
        }
        m
    }

    /// Total water volume, summed in fixed cell order.
    pub fn water_volume(&self, cell_area: f64) -> f64 {
        self.h.iter().sum::<f64>() * cell_area
    }

    /// Total bed volume above datum, summed in fixed cell order.
    pub fn bed_volume(&self, cell_area: f64) -> f64 {
        self.b.iter().sum::<f64>() * cell_area
    }

    pub fn wet_cells(&self, eps_dry: f64) -> usize {
        self.h.iter().filter(|&&h| h >= eps_dry).count()
    }

    /// Check every field for NaN/Inf; returns the first offending cell.
    pub fn find_non_finite(&self) -> Option<(usize, &'static str)> {
        for (name, arr) in [("h", &self.h), ("hu", &self.hu), ("hv", &self.hv), ("b", &self.b)] {
            if let Some(idx) = arr.iter().position(|v| !v.is_finite()) {
                return Some((idx, name));
            }
        }
        None
    }
}

/// Initial water distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum WaterInit {
    /// Constant free-surface elevation; depth is `max(0, eta0 - b)`.
    Surface { eta0: f64 },
    /// Constant depth everywhere.
    Depth { h0: f64 },
    /// Depth `h_left` for columns `< col`, `h_right` at and beyond it.
    DamBreakX { col: usize, h_left: f64, h_right: f64 },
    /// Explicit per-cell depth field.
    Field(Vec<f64>),
}

/// Build the initial state from a bed field and a water specification.
/// Momenta start at zero; use [`new_state_with_velocity`] for a moving start.
pub fn new_state(grid: &SimGrid, bed: Vec<f64>, water: &WaterInit) -> Result<FlowState> {
    new_state_with_velocity(grid, bed, water, (0.0, 0.0))
}

/// Like [`new_state`] but with a uniform initial velocity applied to every
/// wet cell.
pub fn new_state_with_velocity(
    grid: &SimGrid,
    bed: Vec<f64>,
    water: &WaterInit,
    velocity: (f64, f64),
) -> Result<FlowState> {
    let n = grid.cell_count();
    if bed.len() != n {
        return Err(SiltError::Dimension(format!(
            "bed field has {} values, grid {}x{} has {} cells",
            bed.len(),
            grid.nx,
            grid.ny,
            n
        )));
    }
    let mut h = vec![0.0; n];
    match water {
        WaterInit::Surface { eta0 } => {
            for idx in 0..n {
                h[idx] = (eta0 - bed[idx]).max(0.0);
            }
        }
        WaterInit::Depth { h0 } => {
            if *h0 < 0.0 {
                return Err(SiltError::Scenario(format!("initial depth must be >= 0, got {h0}")));
            }
            h.fill(*h0);
        }
        WaterInit::DamBreakX { col, h_left, h_right } => {
            if *col >= grid.nx {
                return Err(SiltError::Scenario(format!(
                    "dam column {col} outside grid of width {}",
                    grid.nx
                )));
            }
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    h[grid.idx(i, j)] = if i < *col { *h_left } else { *h_right };
                }
            }
        }
        WaterInit::Field(depths) => {
            if depths.len() != n {
                return Err(SiltError::Dimension(format!(
                    "depth field has {} values, grid has {n} cells",
                    depths.len()
                )));
            }
            for idx in 0..n {
                if depths[idx] < 0.0 {
                    return Err(SiltError::Scenario(format!("negative depth at cell {idx}")));
                }
            }
            h.copy_from_slice(depths);
        }
    }
    let (u0, v0) = velocity;
    let mut hu = vec![0.0; n];
    let mut hv = vec![0.0; n];
    if u0 != 0.0 || v0 != 0.0 {
        for idx in 0..n {
            if h[idx] > 0.0 {
                hu[idx] = h[idx] * u0;
                hv[idx] = h[idx] * v0;
            }
        }
    }
    Ok(FlowState { nx: grid.nx, ny: grid.ny, h, hu, hv, b: bed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SimGrid {
        SimGrid::new(8, 4, 1.0).unwrap()
    }

    #[test]
    fn constant_surface_on_flat_bed() {
        let g = grid();
        let s = new_state(&g, vec![0.0; g.cell_count()], &WaterInit::Surface { eta0: 1.0 }).unwrap();
        assert!(s.h.iter().all(|&h| h == 1.0));
        assert!(s.hu.iter().all(|&m| m == 0.0));
        assert!(s.hv.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn surface_clamps_dry_cells() {
        let g = grid();
        let mut bed = vec![0.0; g.cell_count()];
        bed[5] = 2.0;
        let s = new_state(&g, bed, &WaterInit::Surface { eta0: 1.0 }).unwrap();
        assert_eq!(s.h[5], 0.0);
    }

    #[test]
    fn surface_over_step_bed() {
        let g = grid();
        let mut bed = vec![0.0; g.cell_count()];
        for j in 0..g.ny {
            for i in 4..g.nx {
                bed[g.idx(i, j)] = 0.5;
            }
        }
        let s = new_state(&g, bed, &WaterInit::Surface { eta0: 1.0 }).unwrap();
        assert_eq!(s.h[g.idx(0, 0)], 1.0);
        assert_eq!(s.h[g.idx(7, 0)], 0.5);
    }

    #[test]
    fn constant_surface_is_discretely_balanced() {
        // eta = h + b must be identical on every wet-wet neighbor pair.
        let g = grid();
        let mut bed = vec![0.0; g.cell_count()];
        // Quantized bumps make eta0 - b exact in f64.
        for (k, b) in bed.iter_mut().enumerate() {
            *b = ((k % 5) as f64) * 0.125;
        }
        let s = new_state(&g, bed, &WaterInit::Surface { eta0: 1.0 }).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx - 1 {
                let a = g.idx(i, j);
                let b2 = g.idx(i + 1, j);
                if s.h[a] > 0.0 && s.h[b2] > 0.0 {
                    assert_eq!(s.eta(a), s.eta(b2));
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = grid();
        assert!(new_state(&g, vec![0.0; 7], &WaterInit::Depth { h0: 1.0 }).is_err());
    }

    #[test]
    fn dam_break_split() {
        let g = grid();
        let s = new_state(
            &g,
            vec![0.0; g.cell_count()],
            &WaterInit::DamBreakX { col: 4, h_left: 1.0, h_right: 0.25 },
        )
        .unwrap();
        assert_eq!(s.h[g.idx(3, 2)], 1.0);
        assert_eq!(s.h[g.idx(4, 2)], 0.25);
    }

    #[test]
    fn uniform_velocity_only_on_wet_cells() {
        let g = grid();
        let mut bed = vec![0.0; g.cell_count()];
        bed[3] = 5.0;
        let s = new_state_with_velocity(&g, bed, &WaterInit::Surface { eta0: 1.0 }, (1.5, 0.0)).unwrap();
        assert_eq!(s.hu[0], 1.5);
        assert_eq!(s.hu[3], 0.0);
    }
}
