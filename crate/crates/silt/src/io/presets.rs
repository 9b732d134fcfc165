//! Built-in benchmark scenarios.

use crate::error::{Result, SiltError};
use crate::params::{AjMode, BoundaryKind};
use crate::state::WaterInit;

use super::scenario::{BedSpec, GridSpec, ScenarioConfig, SyntheticBed};

pub const PRESET_NAMES: [&str; 4] = ["dam-break-dry", "dam-break-wet", "lake-at-rest", "grass-hump"];

/// Benchmark scenario by name:
///
/// - `dam-break-dry`: the classic instantaneous dam break onto a dry bed
///   (analytic similarity solution available).
/// - `dam-break-wet`: dam break onto standing water with depth ratio 1:0.1
///   (bore + rarefaction; exact Riemann solution available).
/// - `lake-at-rest`: irregular bumpy bed under a flat surface with islands;
///   nothing may move.
/// - `grass-hump`: subcritical flow over a sandy ridge with bedload
///   transport on; the ridge migrates downstream.
pub fn preset_scenarios(name: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig { name: name.to_string(), ..ScenarioConfig::default() };
    match name {
        "dam-break-dry" => {
            cfg.grid = GridSpec::Dims { nx: 400, ny: 3, cell_size: 1.0 };
            cfg.bed = BedSpec::Flat(0.0);
            cfg.initial.water = WaterInit::DamBreakX { col: 200, h_left: 1.0, h_right: 0.0 };
            cfg.aj = AjMode::Constant(0.0);
            cfg.courant = 0.5;
            // Front reaches cell 300 at t = 100 h / (2 sqrt(g)).
            cfg.t_end = 100.0 / (2.0 * 9.81f64.sqrt());
        }
        "dam-break-wet" => {
            cfg.grid = GridSpec::Dims { nx: 400, ny: 3, cell_size: 1.0 };
            cfg.bed = BedSpec::Flat(0.0);
            cfg.initial.water = WaterInit::DamBreakX { col: 200, h_left: 1.0, h_right: 0.1 };
            cfg.aj = AjMode::Constant(0.0);
            cfg.courant = 0.5;
            cfg.t_end = 20.0;
        }
        "lake-at-rest" => {
            cfg.grid = GridSpec::Dims { nx: 256, ny: 256, cell_size: 2.0 };
            cfg.bed = BedSpec::Synthetic(SyntheticBed::SmoothBumps {
                amplitude: 3.0,
                count: 40,
                seed: 20200817,
            });
            // Some bumps poke above the surface and form dry islands.
            cfg.initial.water = WaterInit::Surface { eta0: 2.0 };
            cfg.manning = super::scenario::FieldValue::Uniform(0.02);
            cfg.aj = AjMode::Constant(0.001);
            cfg.courant = 0.5;
            cfg.t_end = 60.0;
        }
        "grass-hump" => {
            // Subcritical channel flow over a sandy ridge, fine-sand Grass
            // transport (A = 0.001, m = 2), threshold off for the classic
            // ungated benchmark.
            cfg.grid = GridSpec::Dims { nx: 256, ny: 4, cell_size: 0.5 };
            cfg.bed = BedSpec::Synthetic(SyntheticBed::GaussianRidgeX {
                height: 0.2,
                center_x: 32.0,
                sigma: 4.0,
            });
            cfg.initial.water = WaterInit::Surface { eta0: 1.0 };
            cfg.initial.velocity = (1.5, 0.0);
            cfg.aj = AjMode::Constant(0.001);
            cfg.m_exp = 2.0;
            cfg.porosity = 0.4;
            cfg.c_sh = 0.0;
            cfg.boundaries = [BoundaryKind::Open, BoundaryKind::Open, BoundaryKind::Wall, BoundaryKind::Wall];
            cfg.courant = 0.5;
            cfg.t_end = 300.0;
            cfg.snapshot_every = Some(30.0);
        }
        other => {
            return Err(SiltError::Scenario(format!(
                "unknown preset '{other}' (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    }
    Ok(cfg)
}
