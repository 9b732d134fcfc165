//! Command-line entry point: run a scenario file or a named preset.

use std::path::PathBuf;

use clap::Parser;

use crate::engine::{self, RunReport, Schedule};
use crate::error::SiltError;
use crate::io::benchmarks;
use crate::io::{preset_scenarios, ScenarioConfig, SimSetup, PRESET_NAMES};
use crate::state::WaterInit;

#[derive(Parser, Debug)]
#[command(name = "silt", version, about = "2D shallow-water + bedload sediment transport simulator")]
struct Cli {
    /// Scenario file (see the scenario format in the README).
    scenario: Option<PathBuf>,

    /// Run a built-in benchmark instead of a scenario file:
    /// dam-break-dry | dam-break-wet | lake-at-rest | grass-hump.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Number of parallel workers.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    /// End time in simulated seconds.
    #[arg(long = "t-end", value_name = "S")]
    t_end: Option<f64>,

    /// Snapshot cadence in simulated seconds.
    #[arg(long = "snapshot-every", value_name = "S")]
    snapshot_every: Option<f64>,

    /// Stop after this many steps.
    #[arg(long, value_name = "N")]
    max_steps: Option<u64>,

    /// Disable active-block skipping and sweep every block (oracle mode).
    #[arg(long)]
    dense_sweep: bool,

    /// Directory for snapshots (defaults to the scenario's `output`).
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Write the machine-readable report to this file.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Also export every written snapshot as CSV.
    #[arg(long)]
    csv: bool,

    /// Print only errors.
    #[arg(long)]
    quiet: bool,
}

/// Run the CLI; returns the process exit code (0 success, 1 configuration
/// error, 2 numerical instability).
pub fn run_cli(args: Vec<String>) -> i32 {
    let argv = std::iter::once("silt".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_with(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SiltError::Instability { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn run_with(cli: Cli) -> Result<(), SiltError> {
    let (config, base): (ScenarioConfig, Option<PathBuf>) = match (&cli.scenario, &cli.preset) {
        (Some(_), Some(_)) => {
            return Err(SiltError::Scenario("give either a scenario file or --preset, not both".into()))
        }
        (None, None) => {
            return Err(SiltError::Scenario(format!(
                "nothing to run: give a scenario file or --preset (one of: {})",
                PRESET_NAMES.join(", ")
            )))
        }
        (Some(path), None) => {
            if !path.exists() {
                return Err(SiltError::Scenario(format!("scenario file '{}' not found", path.display())));
            }
            let base = path.parent().map(|p| p.to_path_buf());
            (ScenarioConfig::from_file(path)?, base)
        }
        (None, Some(name)) => (preset_scenarios(name)?, None),
    };

    let mut setup = config.build(base.as_deref())?;
    apply_overrides(&cli, &mut setup);

    let schedule = Schedule::from_options(&setup.run);
    if !cli.quiet {
        println!(
            "scenario '{}': {}x{} cells (h = {} m), {} blocks of {}x{}, {} workers{}",
            setup.name,
            setup.grid.nx,
            setup.grid.ny,
            setup.grid.h,
            setup.grid.block_count(),
            setup.grid.block_w,
            setup.grid.block_h,
            schedule.workers,
            if schedule.sweep == crate::numerics::SweepMode::Dense { ", dense sweep" } else { "" }
        );
    }

    let report = engine::run(&mut setup.state, &setup.params, &setup.sources, &setup.grid, &schedule)?;

    let mut kv = report.key_values();
    append_benchmark_metrics(&config, &setup, &report, &mut kv);

    if !cli.quiet {
        print!("{report}");
        for (k, v) in kv.iter().filter(|(k, _)| k.starts_with("ritter") || k.starts_with("stoker")) {
            println!("{k} = {v}");
        }
    }
    if let Some(path) = &cli.report {
        let mut text = String::new();
        for (k, v) in &kv {
            text.push_str(&format!("{k} = {v}\n"));
        }
        std::fs::write(path, text)?;
    }
    if cli.csv {
        if let Some(dir) = &schedule.output_dir {
            for entry in std::fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "bin") {
                    let snap = crate::io::Snapshot::read(&path)?;
                    snap.export_csv(&path.with_extension("csv"))?;
                }
            }
        }
    }
    Ok(())
}

fn apply_overrides(cli: &Cli, setup: &mut SimSetup) {
    if let Some(w) = cli.workers {
        setup.run.workers = w;
    }
    if let Some(t) = cli.t_end {
        setup.run.t_end = t;
    }
    if let Some(s) = cli.snapshot_every {
        setup.run.snapshot_every = Some(s);
    }
    if let Some(m) = cli.max_steps {
        setup.run.max_steps = Some(m);
    }
    if cli.dense_sweep {
        setup.run.dense_sweep = true;
    }
    if let Some(dir) = &cli.output {
        setup.run.output = Some(dir.clone());
    }
}

/// Attach analytic-solution metrics for the dam-break presets.
fn append_benchmark_metrics(
    config: &ScenarioConfig,
    setup: &SimSetup,
    report: &RunReport,
    kv: &mut Vec<(String, String)>,
) {
    if report.steps == 0 {
        return;
    }
    if let WaterInit::DamBreakX { col, h_left, h_right } = config.initial.water {
        if h_right == 0.0 {
            let err = benchmarks::ritter_l1_error(
                &setup.state,
                &setup.grid,
                report.sim_time,
                col,
                h_left,
                setup.params.g,
            );
            kv.push(("ritter_l1_rel".into(), format!("{err:.6}")));
        } else if h_left > h_right {
            let err = benchmarks::stoker_plateau_error(
                &setup.state,
                &setup.grid,
                report.sim_time,
                col,
                h_left,
                h_right,
                setup.params.g,
            );
            kv.push(("stoker_plateau_rel".into(), format!("{err:.6}")));
        }
    }
}
