//! Uniform Cartesian grid geometry and block tiling.

use crate::error::{Result, SiltError};

/// Preferred block edge length when none is requested explicitly.
pub const DEFAULT_BLOCK: usize = 16;

/// Uniform grid of square cells, tiled into blocks for activity tracking.
///
/// Cell `(i, j)` has its center at
/// `(origin_x + (i + 0.5) h, origin_y + (j + 0.5) h)`; `i` runs west to east,
/// `j` south to north. Fields are stored row-major with index `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimGrid {
    pub nx: usize,
    pub ny: usize,
    /// Cell size in meters (cells are square).
    pub h: f64,
    pub block_w: usize,
    pub block_h: usize,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl SimGrid {
    /// Grid with an automatically fitted block tiling: the largest divisor of
    /// each dimension not exceeding [`DEFAULT_BLOCK`]. Every grid therefore
    /// satisfies the divisibility invariant without padded margin cells.
    pub fn new(nx: usize, ny: usize, h: f64) -> Result<Self> {
        let block_w = largest_divisor_up_to(nx, DEFAULT_BLOCK);
        let block_h = largest_divisor_up_to(ny, DEFAULT_BLOCK);
        Self::with_blocks(nx, ny, h, block_w, block_h)
    }

    /// Grid with an explicit block tiling. The block dimensions must divide
    /// the grid dimensions exactly.
    pub fn with_blocks(nx: usize, ny: usize, h: f64, block_w: usize, block_h: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(SiltError::Grid(format!("grid must be at least 3x3, got {nx}x{ny}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(SiltError::Grid(format!("cell size must be positive, got {h}")));
        }
        if block_w == 0 || block_h == 0 {
            return Err(SiltError::Grid("block dimensions must be nonzero".into()));
        }
        if nx % block_w != 0 || ny % block_h != 0 {
            return Err(SiltError::Grid(format!(
                "block {block_w}x{block_h} does not divide grid {nx}x{ny}; \
                 use SimGrid::new for an auto-fitted tiling"
            )));
        }
        Ok(SimGrid { nx, ny, h, block_w, block_h, origin_x: 0.0, origin_y: 0.0 })
    }

    pub fn with_origin(mut self, x: f64, y: f64) -> Self {
        self.origin_x = x;
        self.origin_y = y;
        self
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Area of one cell in m^2.
    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Number of blocks along x.
    pub fn nbx(&self) -> usize {
        self.nx / self.block_w
    }

    /// Number of blocks along y.
    pub fn nby(&self) -> usize {
        self.ny / self.block_h
    }

    pub fn block_count(&self) -> usize {
        self.nbx() * self.nby()
    }

    /// Block index of cell `(i, j)`.
    #[inline]
    pub fn block_of(&self, i: usize, j: usize) -> usize {
        (j / self.block_h) * self.nbx() + i / self.block_w
    }

    /// World coordinates of the center of cell `(i, j)`.
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin_x + (i as f64 + 0.5) * self.h,
            self.origin_y + (j as f64 + 0.5) * self.h,
        )
    }
}

fn largest_divisor_up_to(n: usize, cap: usize) -> usize {
    (1..=cap.min(n)).rev().find(|d| n % d == 0).unwrap_or(1)
}
