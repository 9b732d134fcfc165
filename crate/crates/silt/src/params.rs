//! Physical parameters, source terms and boundary configuration.

use std::sync::Arc;

use crate::error::{Result, SiltError};
use crate::grid::SimGrid;
use crate::physics::{BedExchange, BedExchangeClosure, CellCtx};

/// A scalar parameter that may vary per cell, e.g. Manning roughness or the
/// absorption coefficient.
#[derive(Debug, Clone)]
pub enum FieldSpec {
    Uniform(f64),
    /// Row-major per-cell values; length must equal `nx * ny`.
    PerCell(Arc<Vec<f64>>),
}

impl FieldSpec {
    #[inline]
    pub fn at(&self, idx: usize) -> f64 {
        match self {
            FieldSpec::Uniform(v) => *v,
            FieldSpec::PerCell(v) => v[idx],
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            FieldSpec::Uniform(v) => *v,
            FieldSpec::PerCell(v) => v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn check_len(&self, n: usize, name: &str) -> Result<()> {
        if let FieldSpec::PerCell(v) = self {
            if v.len() != n {
                return Err(SiltError::Dimension(format!(
                    "{name} field has {} values, grid has {n} cells",
                    v.len()
                )));
            }
        }
        Ok(())
    }
}

/// How the Grass coefficient is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AjMode {
    /// Fixed coefficient, e.g. 0.001 for fine sand.
    Constant(f64),
    /// Derived from roughness, grain size and local depth.
    DepthDependent,
}

/// Slope limiter used by the piecewise-linear reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Limiter {
    #[default]
    Minmod,
    Superbee,
}

/// Physical and numerical parameters of a run.
#[derive(Clone)]
pub struct PhysParams {
    /// Gravity (m/s^2).
    pub g: f64,
    /// Bed porosity, 0 <= psi < 1.
    pub psi: f64,
    /// Manning roughness field n_M(x, y) (s m^-1/3).
    pub manning: FieldSpec,
    /// Absorption coefficient field beta(x, y) (1/s).
    pub beta: FieldSpec,
    pub aj_mode: AjMode,
    /// Grass exponent m.
    pub m_exp: f64,
    /// Slope-correction constant C_J.
    pub c_j: f64,
    /// Shamov constant C_Sh; zero disables the erosion threshold.
    pub c_sh: f64,
    /// Relative grain density rho_s / rho.
    pub s_rel: f64,
    /// Median grain size (m).
    pub d50: f64,
    /// Coriolis parameter (1/s).
    pub f_c: f64,
    /// Courant number, 0 < K < 1 for stable runs.
    pub k_cfl: f64,
    /// Depth below which a cell is dry (m).
    pub eps_dry: f64,
    /// Cap on the time step; also the step used when the whole domain is dry.
    pub dt_max: f64,
    pub limiter: Limiter,
    /// Erosion/deposition closure q+- of the bed-evolution equation. The
    /// default exchanges nothing; bed change then comes from flux divergence
    /// alone.
    pub bed_exchange: Option<Arc<dyn BedExchangeClosure>>,
    /// Permit a Courant number outside (0, 1). Exists to demonstrate that
    /// the stability bound is binding; production runs leave this off.
    pub unchecked_courant: bool,
}

impl std::fmt::Debug for PhysParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhysParams")
            .field("g", &self.g)
            .field("psi", &self.psi)
            .field("manning", &self.manning)
            .field("beta", &self.beta)
            .field("aj_mode", &self.aj_mode)
            .field("m_exp", &self.m_exp)
            .field("c_j", &self.c_j)
            .field("c_sh", &self.c_sh)
            .field("s_rel", &self.s_rel)
            .field("d50", &self.d50)
            .field("f_c", &self.f_c)
            .field("k_cfl", &self.k_cfl)
            .field("eps_dry", &self.eps_dry)
            .field("dt_max", &self.dt_max)
            .field("limiter", &self.limiter)
            .field("bed_exchange", &self.bed_exchange.is_some())
            .field("unchecked_courant", &self.unchecked_courant)
            .finish()
    }
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            g: 9.81,
            psi: 0.4,
            manning: FieldSpec::Uniform(0.0),
            beta: FieldSpec::Uniform(0.0),
            aj_mode: AjMode::Constant(0.0),
            m_exp: 2.0,
            c_j: 2.0,
            c_sh: 0.0,
            s_rel: 2.65,
            d50: 1e-3,
            f_c: 0.0,
            k_cfl: 0.5,
            eps_dry: 1e-6,
            dt_max: 1e9,
            limiter: Limiter::Minmod,
            bed_exchange: None,
            unchecked_courant: false,
        }
    }
}

impl PhysParams {
    pub fn validate(&self, grid: &SimGrid) -> Result<()> {
        let fail = |msg: String| Err(SiltError::Params(msg));
        if !(self.g > 0.0) {
            return fail(format!("gravity must be positive, got {}", self.g));
        }
        if !(0.0..1.0).contains(&self.psi) {
            return fail(format!("porosity must satisfy 0 <= psi < 1, got {}", self.psi));
        }
        if !(self.k_cfl > 0.0 && self.k_cfl < 1.0) && !self.unchecked_courant {
            return fail(format!("Courant number must satisfy 0 < K < 1, got {}", self.k_cfl));
        }
        if !(self.k_cfl > 0.0) {
            return fail(format!("Courant number must be positive, got {}", self.k_cfl));
        }
        if !(self.eps_dry > 0.0) {
            return fail(format!("eps_dry must be positive, got {}", self.eps_dry));
        }
        if !(self.dt_max > 0.0) {
            return fail(format!("dt_max must be positive, got {}", self.dt_max));
        }
        if self.aj_mode == AjMode::DepthDependent && !(self.d50 > 0.0 && self.s_rel > 1.0) {
            return fail(format!(
                "depth-dependent transport needs d50 > 0 and s_rel > 1, got d50={} s_rel={}",
                self.d50, self.s_rel
            ));
        }
        if self.c_sh > 0.0 && !(self.d50 > 0.0) {
            return fail(format!("erosion threshold needs d50 > 0, got {}", self.d50));
        }
        let n = grid.cell_count();
        self.manning.check_len(n, "manning")?;
        self.beta.check_len(n, "beta")?;
        Ok(())
    }

    /// Evaluate the user bed-exchange closure for a cell, or the conservative
    /// default. Dry cells never exchange regardless of the closure.
    #[inline]
    pub fn bed_exchange_at(&self, ctx: &CellCtx) -> BedExchange {
        if ctx.depth < self.eps_dry {
            return BedExchange::NONE;
        }
        match &self.bed_exchange {
            None => BedExchange::NONE,
            Some(c) => c.exchange(ctx),
        }
    }

    /// Allow an unstable Courant number; used to demonstrate that the
    /// stability criterion is binding.
    pub fn with_unchecked_courant(mut self, k: f64) -> Self {
        self.k_cfl = k;
        self.unchecked_courant = true;
        self
    }
}

/// Kind of boundary condition applied along one edge of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryKind {
    /// Reflective; no mass crosses the edge.
    #[default]
    Wall,
    /// Zero-gradient outflow/inflow.
    Open,
}

impl std::str::FromStr for BoundaryKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wall" => Ok(BoundaryKind::Wall),
            "open" => Ok(BoundaryKind::Open),
            other => Err(format!("unknown boundary kind '{other}' (expected wall|open)")),
        }
    }
}

/// A point source or sink of water.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub i: usize,
    pub j: usize,
    /// Volume rate in m^3/s; positive adds water, negative drains it.
    pub rate: f64,
}

/// Water sources, sinks, and boundary kinds for a run.
#[derive(Debug, Clone)]
pub struct SourceInputs {
    /// Rainfall rate (m/s), uniform or per cell.
    pub rain: FieldSpec,
    pub points: Vec<PointSource>,
    pub west: BoundaryKind,
    pub east: BoundaryKind,
    pub south: BoundaryKind,
    pub north: BoundaryKind,
}

impl Default for SourceInputs {
    fn default() -> Self {
        SourceInputs {
            rain: FieldSpec::Uniform(0.0),
            points: Vec::new(),
            west: BoundaryKind::Wall,
            east: BoundaryKind::Wall,
            south: BoundaryKind::Wall,
            north: BoundaryKind::Wall,
        }
    }
}

impl SourceInputs {
    pub fn validate(&self, grid: &SimGrid) -> Result<()> {
        self.rain.check_len(grid.cell_count(), "rain")?;
        for p in &self.points {
            if p.i >= grid.nx || p.j >= grid.ny {
                return Err(SiltError::Scenario(format!(
                    "point source at ({}, {}) is outside the {}x{} grid",
                    p.i, p.j, grid.nx, grid.ny
                )));
            }
        }
        Ok(())
    }

    pub fn all_walls(&self) -> bool {
        [self.west, self.east, self.south, self.north]
            .iter()
            .all(|b| *b == BoundaryKind::Wall)
    }

    /// Per-cell gain rate (m/s) from rain and point inflows.
    #[inline]
    pub fn gain_rate(&self, idx: usize, inflow: f64, cell_area: f64) -> f64 {
        self.rain.at(idx).max(0.0) + inflow.max(0.0) / cell_area
    }

    /// Net point-source volume rates folded into per-cell lookup tables.
    pub fn point_tables(&self, grid: &SimGrid) -> PointTable {
        let mut inflow = Vec::new();
        let mut outflow = Vec::new();
        for p in &self.points {
            let idx = grid.idx(p.i, p.j);
            if p.rate >= 0.0 {
                inflow.push((idx, p.rate));
            } else {
                outflow.push((idx, -p.rate));
            }
        }
        PointTable { inflow, outflow }
    }
}

/// Sparse per-cell inflow/outflow rates (m^3/s), split by sign.
#[derive(Debug, Clone, Default)]
pub struct PointTable {
    pub inflow: Vec<(usize, f64)>,
    pub outflow: Vec<(usize, f64)>,
}

impl PointTable {
    pub fn dense(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut gain = vec![0.0; n];
        let mut loss = vec![0.0; n];
        for &(idx, r) in &self.inflow {
            gain[idx] += r;
        }
        for &(idx, r) in &self.outflow {
            loss[idx] += r;
        }
        (gain, loss)
    }
}
