//! Scenario configuration, DEM ingestion, and snapshot output.

pub mod benchmarks;
pub mod dem;
pub mod presets;
pub mod scenario;
pub mod snapshot;

pub use dem::{read_dem, DemGrid, NodataFill};
pub use presets::{preset_scenarios, PRESET_NAMES};
pub use scenario::{parse_scenario, RunOptions, ScenarioConfig, SimSetup};
pub use snapshot::Snapshot;
