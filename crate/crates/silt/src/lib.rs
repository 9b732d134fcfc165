//! Simulation of surface water dynamics coupled with bedload sediment transport.
//!
//! The solver integrates the 2D Saint-Venant equations together with the Exner
//! equation for bed evolution on a uniform Cartesian grid. A time step is split
//! into a Lagrangian stage (per-cell particles pick up forces and drift with a
//! predictor-corrector) and an Eulerian stage (TVD-reconstructed HLL fluxes
//! remap the particle quantities back onto the grid). Dry regions are skipped
//! block-by-block, and the engine runs the staged pipeline across workers with
//! halo exchange and per-stage timing.

pub mod activeblocks;
pub mod cli;
pub mod engine;
pub mod error;
pub mod grid;
pub mod io;
pub mod numerics;
pub mod params;
pub mod physics;
pub mod state;

pub use error::SiltError;
pub use grid::SimGrid;
pub use params::{AjMode, BoundaryKind, FieldSpec, Limiter, PhysParams, SourceInputs};
pub use state::{new_state, FlowState, WaterInit};
