//! Scenario configuration: flat `key = value` sections in plain text. One
//! file fully determines a run.
//!
//! ```text
//! [grid]
//! nx = 256
//! ny = 256
//! cell_size = 2.0
//! # or: dem = terrain.asc
//!
//! [bed]
//! flat = 0.0            # or dem = ..., bumps = AMP COUNT SEED,
//!                       # ridge_x = HEIGHT CENTER SIGMA, tilt = SX SY
//!
//! [initial]
//! surface = 1.0         # or depth = H, dam_break_x = COL HL HR
//! velocity = 0.0 0.0
//!
//! [params]
//! gravity = 9.81
//! porosity = 0.4
//! manning = 0.02        # or manning_dem = n.asc
//! aj = constant 0.001   # or: aj = depth_dependent
//! ...
//!
//! [sources]
//! rain = 0.0            # or rain_dem = rain.asc
//! inflow = 10 12 0.5    # cell i j, rate m^3/s (repeatable)
//! boundary = wall wall wall wall   # west east south north
//!
//! [run]
//! t_end = 100.0
//! snapshot_every = 10.0
//! workers = 1
//! output = out
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Result, SiltError};
use crate::grid::SimGrid;
use crate::params::{AjMode, BoundaryKind, FieldSpec, Limiter, PhysParams, PointSource, SourceInputs};
use crate::state::{new_state_with_velocity, FlowState, WaterInit};

use super::dem::{read_dem, NodataFill};

/// Grid geometry source.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Dims { nx: usize, ny: usize, cell_size: f64 },
    Dem(PathBuf),
}

/// A scalar field that is either uniform or loaded from an ESRI ASCII grid.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Uniform(f64),
    Dem(PathBuf),
}

impl FieldValue {
    fn resolve(&self, grid: &SimGrid, base: Option<&Path>, what: &str) -> Result<FieldSpec> {
        match self {
            FieldValue::Uniform(v) => Ok(FieldSpec::Uniform(*v)),
            FieldValue::Dem(path) => {
                let path = resolve_path(path, base);
                let dem = read_dem(&path, NodataFill::Constant(0.0))?;
                if dem.ncols != grid.nx || dem.nrows != grid.ny {
                    return Err(SiltError::Dimension(format!(
                        "{what} grid {} is {}x{}, simulation grid is {}x{}",
                        path.display(),
                        dem.ncols,
                        dem.nrows,
                        grid.nx,
                        grid.ny
                    )));
                }
                Ok(FieldSpec::PerCell(Arc::new(dem.values)))
            }
        }
    }
}

/// Programmatic bed shapes used by the benchmark presets.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticBed {
    /// Sum of smooth random bumps with the given peak amplitude. Values are
    /// quantized to a dyadic grid so `eta0 - b` is exact in f64 and the lake
    /// at rest is a bitwise fixed point.
    SmoothBumps { amplitude: f64, count: usize, seed: u64 },
    /// A Gaussian ridge across the flow: `height * exp(-((x-center)/sigma)^2)`.
    GaussianRidgeX { height: f64, center_x: f64, sigma: f64 },
    /// Plane `b = slope_x * x + slope_y * y`.
    TiltedPlane { slope_x: f64, slope_y: f64 },
}

/// Bed elevation source.
#[derive(Debug, Clone, PartialEq)]
pub enum BedSpec {
    Flat(f64),
    /// Use the elevation grid the geometry came from.
    FromGridDem,
    Dem(PathBuf),
    Synthetic(SyntheticBed),
}

/// Initial water configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub water: WaterInit,
    pub velocity: (f64, f64),
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: GridSpec,
    pub block: Option<(usize, usize)>,
    pub origin: Option<(f64, f64)>,
    pub bed: BedSpec,
    pub initial: InitialSpec,

    pub gravity: f64,
    pub porosity: f64,
    pub manning: FieldValue,
    pub beta: FieldValue,
    pub aj: AjMode,
    pub m_exp: f64,
    pub c_j: f64,
    pub c_sh: f64,
    pub s_rel: f64,
    pub d50: f64,
    pub coriolis: f64,
    pub courant: f64,
    pub eps_dry: f64,
    pub dt_max: f64,
    pub limiter: Limiter,

    pub rain: FieldValue,
    pub points: Vec<PointSource>,
    pub boundaries: [BoundaryKind; 4],

    pub t_end: f64,
    pub snapshot_every: Option<f64>,
    pub snapshot_every_steps: Option<u64>,
    pub max_steps: Option<u64>,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub dense_sweep: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let p = PhysParams::default();
        ScenarioConfig {
            name: "scenario".into(),
            grid: GridSpec::Dims { nx: 64, ny: 64, cell_size: 1.0 },
            block: None,
            origin: None,
            bed: BedSpec::Flat(0.0),
            initial: InitialSpec { water: WaterInit::Depth { h0: 0.0 }, velocity: (0.0, 0.0) },
            gravity: p.g,
            porosity: p.psi,
            manning: FieldValue::Uniform(0.0),
            beta: FieldValue::Uniform(0.0),
            aj: p.aj_mode,
            m_exp: p.m_exp,
            c_j: p.c_j,
            c_sh: p.c_sh,
            s_rel: p.s_rel,
            d50: p.d50,
            coriolis: p.f_c,
            courant: p.k_cfl,
            eps_dry: p.eps_dry,
            dt_max: p.dt_max,
            limiter: p.limiter,
            rain: FieldValue::Uniform(0.0),
            points: Vec::new(),
            boundaries: [BoundaryKind::Wall; 4],
            t_end: 10.0,
            snapshot_every: None,
            snapshot_every_steps: None,
            max_steps: None,
            workers: 1,
            output: None,
            dense_sweep: false,
        }
    }
}

/// Run options carried alongside the built state.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    pub snapshot_every: Option<f64>,
    pub snapshot_every_steps: Option<u64>,
    pub max_steps: Option<u64>,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub dense_sweep: bool,
}

/// A scenario resolved into runtime objects.
pub struct SimSetup {
    pub name: String,
    pub grid: SimGrid,
    pub state: FlowState,
    pub params: PhysParams,
    pub sources: SourceInputs,
    pub run: RunOptions,
}

impl ScenarioConfig {
    /// Resolve file references and construct the runtime objects.
    /// Relative paths are taken relative to `base` (the scenario file's
    /// directory) when given.
    pub fn build(&self, base: Option<&Path>) -> Result<SimSetup> {
        let (grid, grid_bed) = match &self.grid {
            GridSpec::Dims { nx, ny, cell_size } => {
                let grid = match self.block {
                    Some((bw, bh)) => SimGrid::with_blocks(*nx, *ny, *cell_size, bw, bh)?,
                    None => SimGrid::new(*nx, *ny, *cell_size)?,
                };
                (grid, None)
            }
            GridSpec::Dem(path) => {
                let path = resolve_path(path, base);
                let dem = read_dem(&path, NodataFill::Wall)?;
                let mut grid = match self.block {
                    Some((bw, bh)) => SimGrid::with_blocks(dem.ncols, dem.nrows, dem.cellsize, bw, bh)?,
                    None => SimGrid::new(dem.ncols, dem.nrows, dem.cellsize)?,
                };
                grid = grid.with_origin(dem.xllcorner, dem.yllcorner);
                (grid, Some(dem.values))
            }
        };
        let grid = match self.origin {
            Some((x, y)) => grid.with_origin(x, y),
            None => grid,
        };

        let bed = match &self.bed {
            BedSpec::Flat(b0) => vec![*b0; grid.cell_count()],
            BedSpec::FromGridDem => grid_bed.ok_or_else(|| {
                SiltError::Scenario("bed = grid DEM requested but the grid is not from a DEM".into())
            })?,
            BedSpec::Dem(path) => {
                let path = resolve_path(path, base);
                let dem = read_dem(&path, NodataFill::Wall)?;
                if dem.ncols != grid.nx || dem.nrows != grid.ny {
                    return Err(SiltError::Dimension(format!(
                        "bed grid is {}x{}, simulation grid is {}x{}",
                        dem.ncols, dem.nrows, grid.nx, grid.ny
                    )));
                }
                dem.values
            }
            BedSpec::Synthetic(s) => synthesize_bed(&grid, s),
        };

        let state = new_state_with_velocity(&grid, bed, &self.initial.water, self.initial.velocity)?;

        let params = PhysParams {
            g: self.gravity,
            psi: self.porosity,
            manning: self.manning.resolve(&grid, base, "manning")?,
            beta: self.beta.resolve(&grid, base, "beta")?,
            aj_mode: self.aj,
            m_exp: self.m_exp,
            c_j: self.c_j,
            c_sh: self.c_sh,
            s_rel: self.s_rel,
            d50: self.d50,
            f_c: self.coriolis,
            k_cfl: self.courant,
            eps_dry: self.eps_dry,
            dt_max: self.dt_max,
            limiter: self.limiter,
            bed_exchange: None,
            unchecked_courant: false,
        };
        params.validate(&grid)?;

        let sources = SourceInputs {
            rain: self.rain.resolve(&grid, base, "rain")?,
            points: self.points.clone(),
            west: self.boundaries[0],
            east: self.boundaries[1],
            south: self.boundaries[2],
            north: self.boundaries[3],
        };
        sources.validate(&grid)?;

        Ok(SimSetup {
            name: self.name.clone(),
            grid,
            state,
            params,
            sources,
            run: RunOptions {
                t_end: self.t_end,
                snapshot_every: self.snapshot_every,
                snapshot_every_steps: self.snapshot_every_steps,
                max_steps: self.max_steps,
                workers: self.workers,
                output: self.output.as_ref().map(|p| resolve_path(p, base)),
                dense_sweep: self.dense_sweep,
            },
        })
    }

    pub fn from_file(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        parse_scenario(&text, path)
    }
}

fn resolve_path(path: &Path, base: Option<&Path>) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn synthesize_bed(grid: &SimGrid, spec: &SyntheticBed) -> Vec<f64> {
    let n = grid.cell_count();
    let mut bed = vec![0.0; n];
    match spec {
        SyntheticBed::SmoothBumps { amplitude, count, seed } => {
            let mut s = if *seed == 0 { 0x9e3779b97f4a7c15 } else { *seed };
            let mut next = move || {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64
            };
            let lx = grid.nx as f64 * grid.h;
            let ly = grid.ny as f64 * grid.h;
            let bumps: Vec<(f64, f64, f64, f64)> = (0..*count)
                .map(|_| {
                    let cx = next() * lx;
                    let cy = next() * ly;
                    let sigma = (0.03 + 0.1 * next()) * lx.max(ly);
                    let height = (0.2 + 0.8 * next()) * amplitude;
                    (cx, cy, sigma, height)
                })
                .collect();
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let (x, y) = grid.cell_center(i, j);
                    let mut v = 0.0;
                    for &(cx, cy, sigma, height) in &bumps {
                        let r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (sigma * sigma);
                        v += height * (-r2).exp();
                    }
                    bed[grid.idx(i, j)] = v;
                }
            }
            // Quantize so that a constant initial surface minus the bed is
            // exact in f64.
            let scale = (1u64 << 20) as f64;
            for v in bed.iter_mut() {
                *v = (*v * scale).round() / scale;
            }
        }
        SyntheticBed::GaussianRidgeX { height, center_x, sigma } => {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let (x, _) = grid.cell_center(i, j);
                    let r = (x - center_x) / sigma;
                    bed[grid.idx(i, j)] = height * (-r * r).exp();
                }
            }
        }
        SyntheticBed::TiltedPlane { slope_x, slope_y } => {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let (x, y) = grid.cell_center(i, j);
                    bed[grid.idx(i, j)] = slope_x * x + slope_y * y;
                }
            }
        }
    }
    bed
}

/// Parse the scenario text format.
pub fn parse_scenario(text: &str, path: &Path) -> Result<ScenarioConfig> {
    let err = |line: usize, msg: String| SiltError::Parse { path: path.to_path_buf(), line, msg };
    let mut cfg = ScenarioConfig::default();
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        cfg.name = stem.to_string();
    }
    let mut section = String::new();
    // Grid fields may arrive in any order inside [grid].
    let mut nx: Option<usize> = None;
    let mut ny: Option<usize> = None;
    let mut cell: Option<f64> = None;
    let mut grid_dem: Option<PathBuf> = None;
    let mut saw_bed = false;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(err(lineno, format!("malformed section header '{line}'")));
            }
            section = line[1..line.len() - 1].trim().to_ascii_lowercase();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let fnum = |v: &str| -> Result<f64> {
            v.parse().map_err(|_| err(lineno, format!("'{key}': expected a number, got '{v}'")))
        };
        let unum = |v: &str| -> Result<usize> {
            v.parse().map_err(|_| err(lineno, format!("'{key}': expected an integer, got '{v}'")))
        };
        fn words(v: &str) -> Vec<&str> {
            v.split_whitespace().collect()
        }

        match (section.as_str(), key.as_str()) {
            ("grid", "nx") => nx = Some(unum(value)?),
            ("grid", "ny") => ny = Some(unum(value)?),
            ("grid", "cell_size") => cell = Some(fnum(value)?),
            ("grid", "dem") => grid_dem = Some(PathBuf::from(value)),
            ("grid", "block") => {
                let w = words(value);
                if w.len() != 2 {
                    return Err(err(lineno, "block wants two integers".into()));
                }
                cfg.block = Some((unum(w[0])?, unum(w[1])?));
            }
            ("grid", "origin") => {
                let w = words(value);
                if w.len() != 2 {
                    return Err(err(lineno, "origin wants two numbers".into()));
                }
                cfg.origin = Some((fnum(w[0])?, fnum(w[1])?));
            }

            ("bed", "flat") => {
                cfg.bed = BedSpec::Flat(fnum(value)?);
                saw_bed = true;
            }
            ("bed", "dem") => {
                cfg.bed = BedSpec::Dem(PathBuf::from(value));
                saw_bed = true;
            }
            ("bed", "bumps") => {
                let w = words(value);
                if w.len() != 3 {
                    return Err(err(lineno, "bumps wants: amplitude count seed".into()));
                }
                cfg.bed = BedSpec::Synthetic(SyntheticBed::SmoothBumps {
                    amplitude: fnum(w[0])?,
                    count: unum(w[1])?,
                    seed: w[2].parse().map_err(|_| err(lineno, "bad seed".into()))?,
                });
                saw_bed = true;
            }
            ("bed", "ridge_x") => {
                let w = words(value);
                if w.len() != 3 {
                    return Err(err(lineno, "ridge_x wants: height center sigma".into()));
                }
                cfg.bed = BedSpec::Synthetic(SyntheticBed::GaussianRidgeX {
                    height: fnum(w[0])?,
                    center_x: fnum(w[1])?,
                    sigma: fnum(w[2])?,
                });
                saw_bed = true;
            }
            ("bed", "tilt") => {
                let w = words(value);
                if w.len() != 2 {
                    return Err(err(lineno, "tilt wants: slope_x slope_y".into()));
                }
                cfg.bed = BedSpec::Synthetic(SyntheticBed::TiltedPlane {
                    slope_x: fnum(w[0])?,
                    slope_y: fnum(w[1])?,
                });
                saw_bed = true;
            }

            ("initial", "surface") => cfg.initial.water = WaterInit::Surface { eta0: fnum(value)? },
            ("initial", "depth") => cfg.initial.water = WaterInit::Depth { h0: fnum(value)? },
            ("initial", "dam_break_x") => {
                let w = words(value);
                if w.len() != 3 {
                    return Err(err(lineno, "dam_break_x wants: col h_left h_right".into()));
                }
                cfg.initial.water = WaterInit::DamBreakX {
                    col: unum(w[0])?,
                    h_left: fnum(w[1])?,
                    h_right: fnum(w[2])?,
                };
            }
            ("initial", "velocity") => {
                let w = words(value);
                if w.len() != 2 {
                    return Err(err(lineno, "velocity wants two numbers".into()));
                }
                cfg.initial.velocity = (fnum(w[0])?, fnum(w[1])?);
            }

            ("params", "gravity") => cfg.gravity = fnum(value)?,
            ("params", "porosity") => cfg.porosity = fnum(value)?,
            ("params", "manning") => cfg.manning = FieldValue::Uniform(fnum(value)?),
            ("params", "manning_dem") => cfg.manning = FieldValue::Dem(PathBuf::from(value)),
            ("params", "beta") => cfg.beta = FieldValue::Uniform(fnum(value)?),
            ("params", "beta_dem") => cfg.beta = FieldValue::Dem(PathBuf::from(value)),
            ("params", "aj") => {
                let w = words(value);
                cfg.aj = match w.as_slice() {
                    ["constant", v] => AjMode::Constant(fnum(v)?),
                    ["depth_dependent"] => AjMode::DepthDependent,
                    _ => return Err(err(lineno, "aj wants 'constant VALUE' or 'depth_dependent'".into())),
                };
            }
            ("params", "m") | ("params", "grass_m") => cfg.m_exp = fnum(value)?,
            ("params", "c_j") => cfg.c_j = fnum(value)?,
            ("params", "c_sh") => cfg.c_sh = fnum(value)?,
            ("params", "s_rel") => cfg.s_rel = fnum(value)?,
            ("params", "d50") => cfg.d50 = fnum(value)?,
            ("params", "coriolis") => cfg.coriolis = fnum(value)?,
            ("params", "courant") => cfg.courant = fnum(value)?,
            ("params", "eps_dry") => cfg.eps_dry = fnum(value)?,
            ("params", "dt_max") => cfg.dt_max = fnum(value)?,
            ("params", "limiter") => {
                cfg.limiter = match value {
                    "minmod" => Limiter::Minmod,
                    "superbee" => Limiter::Superbee,
                    other => return Err(err(lineno, format!("unknown limiter '{other}'"))),
                };
            }

            ("sources", "rain") => cfg.rain = FieldValue::Uniform(fnum(value)?),
            ("sources", "rain_dem") => cfg.rain = FieldValue::Dem(PathBuf::from(value)),
            ("sources", "inflow") | ("sources", "outflow") => {
                let w = words(value);
                if w.len() != 3 {
                    return Err(err(lineno, format!("{key} wants: i j rate")));
                }
                let rate = fnum(w[2])?;
                let rate = if key == "outflow" { -rate.abs() } else { rate };
                cfg.points.push(PointSource { i: unum(w[0])?, j: unum(w[1])?, rate });
            }
            ("sources", "boundary") => {
                let w = words(value);
                if w.len() != 4 {
                    return Err(err(lineno, "boundary wants: west east south north".into()));
                }
                for (slot, tok) in cfg.boundaries.iter_mut().zip(w) {
                    *slot = tok.parse().map_err(|e: String| err(lineno, e))?;
                }
            }
            ("sources", "boundary_west") => cfg.boundaries[0] = value.parse().map_err(|e: String| err(lineno, e))?,
            ("sources", "boundary_east") => cfg.boundaries[1] = value.parse().map_err(|e: String| err(lineno, e))?,
            ("sources", "boundary_south") => cfg.boundaries[2] = value.parse().map_err(|e: String| err(lineno, e))?,
            ("sources", "boundary_north") => cfg.boundaries[3] = value.parse().map_err(|e: String| err(lineno, e))?,

            ("run", "t_end") => cfg.t_end = fnum(value)?,
            ("run", "snapshot_every") => cfg.snapshot_every = Some(fnum(value)?),
            ("run", "snapshot_steps") => {
                cfg.snapshot_every_steps =
                    Some(value.parse().map_err(|_| err(lineno, "bad snapshot_steps".into()))?)
            }
            ("run", "max_steps") => {
                cfg.max_steps = Some(value.parse().map_err(|_| err(lineno, "bad max_steps".into()))?)
            }
            ("run", "workers") => cfg.workers = unum(value)?,
            ("run", "output") => cfg.output = Some(PathBuf::from(value)),
            ("run", "dense_sweep") => {
                cfg.dense_sweep = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    other => return Err(err(lineno, format!("bad boolean '{other}'"))),
                };
            }
            ("run", "name") => cfg.name = value.to_string(),

            ("", k) => return Err(err(lineno, format!("key '{k}' before any [section]"))),
            (s, k) => return Err(err(lineno, format!("unknown key '{k}' in section [{s}]"))),
        }
    }

    match (grid_dem, nx, ny, cell) {
        (Some(p), None, None, None) => {
            cfg.grid = GridSpec::Dem(p.clone());
            if !saw_bed {
                cfg.bed = BedSpec::FromGridDem;
            }
        }
        (None, Some(nx), Some(ny), Some(cell_size)) => {
            cfg.grid = GridSpec::Dims { nx, ny, cell_size };
        }
        (Some(_), _, _, _) => {
            return Err(err(1, "give either dem or nx/ny/cell_size in [grid], not both".into()))
        }
        _ => return Err(err(1, "incomplete [grid]: need nx, ny and cell_size (or dem)".into())),
    }
    Ok(cfg)
}
