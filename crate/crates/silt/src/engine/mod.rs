//! Staged parallel engine: runs the pipeline across workers with domain
//! decomposition, halo exchange, deterministic reductions, and per-stage
//! timing.
//!
//! Workers advance in lockstep through the eight stages with a barrier
//! between consecutive stages; each owns a band of block rows and writes
//! only its own cells. The time-step reduction folds per-worker partials in
//! a fixed order, so results are bitwise identical for any worker count.
//! Snapshot writing happens between steps.

pub mod partition;
pub mod timing;

pub use timing::{timing_report, StageTimings, STAGE_NAMES};

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::{Barrier, Mutex};
use std::time::Instant;

use crate::activeblocks::{update_counts_rows, ActiveBlockMap, SourceMask};
use crate::error::{Result, SiltError};
use crate::grid::SimGrid;
use crate::numerics::dt::{dt_from_partial, dt_partial_band, DtPartial};
use crate::numerics::kernels::{self, BaseView, FluxArgs, HalfView, SourceRates, Stencil};
use crate::numerics::{PointDense, SweepMode};
use crate::params::{AjMode, PhysParams, SourceInputs};
use crate::state::FlowState;

use partition::{
    apply_from_above, apply_from_below, band_layout, fill_outbox, gather_band, ring_neighbors,
    scatter, HaloSet, Outbox, WorkerBand,
};

/// What to run and how.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub t_end: f64,
    /// Snapshot cadence in simulated seconds; steps are clipped to land on
    /// the cadence exactly.
    pub snapshot_every: Option<f64>,
    /// Snapshot cadence in steps (both cadences may be active).
    pub snapshot_every_steps: Option<u64>,
    /// Stop after this many steps even if `t_end` was not reached.
    pub max_steps: Option<u64>,
    pub workers: usize,
    pub sweep: SweepMode,
    pub output_dir: Option<PathBuf>,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            t_end: 1.0,
            snapshot_every: None,
            snapshot_every_steps: None,
            max_steps: None,
            workers: 1,
            sweep: SweepMode::Active,
            output_dir: None,
        }
    }
}

impl Schedule {
    pub fn from_options(run: &crate::io::RunOptions) -> Self {
        Schedule {
            t_end: run.t_end,
            snapshot_every: run.snapshot_every,
            snapshot_every_steps: run.snapshot_every_steps,
            max_steps: run.max_steps,
            workers: run.workers,
            sweep: if run.dense_sweep { SweepMode::Dense } else { SweepMode::Active },
            output_dir: run.output.clone(),
        }
    }
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub steps: u64,
    pub sim_time: f64,
    pub wall_seconds: f64,
    /// Cells touched by the Eulerian stage, totaled over all steps.
    pub cell_updates: u64,
    pub cells_per_sec: f64,
    pub timings: StageTimings,
    /// Mean and final fraction of blocks that ran the Eulerian stage.
    pub occupancy_mean: f64,
    pub occupancy_final: f64,
    pub max_displacement: f64,
    pub max_speed_final: f64,
    pub water_volume_final: f64,
    pub bed_volume_final: f64,
    pub snapshots_written: u64,
    pub workers: usize,
}

impl RunReport {
    /// Machine-readable key=value lines.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = vec![
            ("steps".into(), self.steps.to_string()),
            ("sim_time_s".into(), format!("{:.9e}", self.sim_time)),
            ("wall_s".into(), format!("{:.6}", self.wall_seconds)),
            ("cell_updates".into(), self.cell_updates.to_string()),
            ("cells_per_sec".into(), format!("{:.3e}", self.cells_per_sec)),
            ("occupancy_mean".into(), format!("{:.6}", self.occupancy_mean)),
            ("occupancy_final".into(), format!("{:.6}", self.occupancy_final)),
            ("max_displacement_m".into(), format!("{:.6e}", self.max_displacement)),
            ("max_speed_final".into(), format!("{:.9e}", self.max_speed_final)),
            ("water_volume_final".into(), format!("{:.12e}", self.water_volume_final)),
            ("bed_volume_final".into(), format!("{:.12e}", self.bed_volume_final)),
            ("snapshots".into(), self.snapshots_written.to_string()),
            ("workers".into(), self.workers.to_string()),
        ];
        for (k, name) in STAGE_NAMES.iter().enumerate() {
            kv.push((format!("{}_s", name.to_lowercase()), format!("{:.6}", self.timings.seconds[k])));
        }
        let shares = self.timings.shares();
        for (k, name) in STAGE_NAMES.iter().enumerate() {
            kv.push((format!("{}_share", name.to_lowercase()), format!("{:.3}", shares[k])));
        }
        let (dom, tie) = self.timings.dominant();
        kv.push(("dominant_stage".into(), STAGE_NAMES[dom].to_string()));
        kv.push(("dominant_tie".into(), (tie as u8).to_string()));
        kv
    }
}

impl std::fmt::Display for RunReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "run: {} steps to t = {:.6} s in {:.3} s wall ({} workers)",
            self.steps, self.sim_time, self.wall_seconds, self.workers
        )?;
        writeln!(
            f,
            "     {:.3e} cell updates ({:.3e} cells/s), occupancy mean {:.1}% final {:.1}%",
            self.cell_updates as f64,
            self.cells_per_sec,
            100.0 * self.occupancy_mean,
            100.0 * self.occupancy_final
        )?;
        writeln!(f, "     max |v| = {:.3e} m/s, snapshots: {}", self.max_speed_final, self.snapshots_written)?;
        if self.timings.total() > 0.0 {
            write!(f, "{}", timing_report(&self.timings).unwrap_or_default())?;
        }
        Ok(())
    }
}

/// Tallies only worker 0 accumulates.
#[derive(Default)]
struct RunTallies {
    steps: u64,
    sim_time: f64,
    cell_updates: u64,
    occupancy_sum: f64,
    occupancy_final: f64,
    max_displacement: f64,
    snapshots: u64,
    timings: StageTimings,
}

struct WorkerScratch {
    dt: DtPartial,
    max_disp: f64,
}

/// Shared run context, borrowed by every worker.
struct SharedRun<'a> {
    grid: &'a SimGrid,
    params: &'a PhysParams,
    sources: &'a SourceInputs,
    mask: &'a SourceMask,
    pts: &'a PointDense,
    sched: &'a Schedule,
    counts: Vec<AtomicU32>,
    scratch: Vec<Mutex<WorkerScratch>>,
    outboxes: Vec<Mutex<Outbox>>,
    assembly: Mutex<FlowState>,
    err_flag: AtomicBool,
    err: Mutex<Option<SiltError>>,
    barrier: Barrier,
    /// Number of non-empty bands participating in the exchange ring.
    ring: usize,
    transport: bool,
}

/// Advance the state to `t_end` across `schedule.workers` workers. Snapshots
/// are emitted on schedule into the output directory; the result is bitwise
/// independent of the worker count. On instability the state is left at the
/// last completed step, a last-good snapshot is written, and the error is
/// returned.
pub fn run(
    state: &mut FlowState,
    params: &PhysParams,
    sources: &SourceInputs,
    grid: &SimGrid,
    schedule: &Schedule,
) -> Result<RunReport> {
    if schedule.workers == 0 {
        return Err(SiltError::Params("workers must be >= 1".into()));
    }
    params.validate(grid)?;
    sources.validate(grid)?;
    if let Some(dir) = &schedule.output_dir {
        std::fs::create_dir_all(dir)?;
    }

    let mask = SourceMask::build(grid, sources);
    let pts = PointDense::build(grid, sources);
    let ranges = band_layout(grid, schedule.workers);
    let ring = ranges.iter().filter(|r| !r.is_empty()).count();
    let mut bands = scatter(state, grid, &ranges);
    let transport = !matches!(params.aj_mode, AjMode::Constant(a) if a == 0.0);

    let n = grid.cell_count();
    let shared = SharedRun {
        grid,
        params,
        sources,
        mask: &mask,
        pts: &pts,
        sched: schedule,
        counts: (0..grid.block_count()).map(|_| AtomicU32::new(0)).collect(),
        scratch: (0..schedule.workers)
            .map(|_| Mutex::new(WorkerScratch { dt: DtPartial::empty(), max_disp: 0.0 }))
            .collect(),
        outboxes: (0..schedule.workers).map(|_| Mutex::new(Outbox::new(grid.nx))).collect(),
        assembly: Mutex::new(FlowState {
            nx: grid.nx,
            ny: grid.ny,
            h: vec![0.0; n],
            hu: vec![0.0; n],
            hv: vec![0.0; n],
            b: vec![0.0; n],
        }),
        err_flag: AtomicBool::new(false),
        err: Mutex::new(None),
        barrier: Barrier::new(schedule.workers),
        ring,
        transport,
    };

    let started = Instant::now();
    let tallies: RunTallies = if schedule.workers == 1 {
        worker_loop(0, &mut bands[0], &shared).unwrap_or_default()
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (w, band) in bands.iter_mut().enumerate() {
                let shared = &shared;
                handles.push(scope.spawn(move || worker_loop(w, band, shared)));
            }
            let mut main_tallies = RunTallies::default();
            for handle in handles {
                if let Some(t) = handle.join().expect("worker panicked") {
                    main_tallies = t;
                }
            }
            main_tallies
        })
    };
    let wall = started.elapsed().as_secs_f64();

    for band in &bands {
        gather_band(band, state);
    }

    if shared.err_flag.load(Ordering::SeqCst) {
        // State is at the last completed step; keep it on disk.
        if let Some(dir) = &schedule.output_dir {
            let snap = crate::io::Snapshot::capture(state, grid, tallies.sim_time, params.eps_dry);
            snap.write(&dir.join("snap_lastgood.bin"))?;
        }
        let err = shared.err.lock().unwrap().take();
        return Err(err.unwrap_or_else(|| SiltError::Instability {
            time: tallies.sim_time,
            step: tallies.steps,
            detail: "instability".into(),
        }));
    }

    if let Some(dir) = &schedule.output_dir {
        let snap = crate::io::Snapshot::capture(state, grid, tallies.sim_time, params.eps_dry);
        snap.write(&dir.join("snap_final.bin"))?;
    }

    let area = grid.cell_area();
    Ok(RunReport {
        steps: tallies.steps,
        sim_time: tallies.sim_time,
        wall_seconds: wall,
        cell_updates: tallies.cell_updates,
        cells_per_sec: if wall > 0.0 { tallies.cell_updates as f64 / wall } else { 0.0 },
        timings: tallies.timings,
        occupancy_mean: if tallies.steps > 0 { tallies.occupancy_sum / tallies.steps as f64 } else { 0.0 },
        occupancy_final: tallies.occupancy_final,
        max_displacement: tallies.max_displacement,
        max_speed_final: state.max_speed(params.eps_dry),
        water_volume_final: state.water_volume(area),
        bed_volume_final: state.bed_volume(area),
        snapshots_written: tallies.snapshots,
        workers: schedule.workers,
    })
}

/// The per-worker pipeline loop. Every worker executes the same barrier
/// sequence; only worker 0 returns tallies.
fn worker_loop(w: usize, band: &mut WorkerBand, sh: &SharedRun) -> Option<RunTallies> {
    let grid = sh.grid;
    let params = sh.params;
    let sched = sh.sched;
    let nb = grid.block_count();
    let block_cells = (grid.block_w * grid.block_h) as u64;
    let dense = sched.sweep == SweepMode::Dense;
    let lead = w == 0;

    let mut counts_local = vec![0u32; nb];
    let mut lag_active = vec![false; nb];
    let mut eul_active = vec![false; nb];

    let rates = SourceRates {
        sources: sh.sources,
        pt_gain: sh.pts.gain.as_deref(),
        pt_loss: sh.pts.loss.as_deref(),
        inv_area: 1.0 / grid.cell_area(),
    };

    let (br0, br1) = (band.block_rows.start, band.block_rows.end);
    let has_rows = !band.is_empty();
    let (ring_below, ring_above) = ring_neighbors(w, sh.ring);
    let in_ring = w < sh.ring && sh.ring > 1;

    let mut tallies = RunTallies::default();
    let mut time = 0.0f64;
    let mut steps = 0u64;
    let mut next_snap = sched.snapshot_every;
    let mut dt_peak = 0.0f64;
    let mut clock = Instant::now();

    macro_rules! mark {
        ($stage:expr) => {
            if lead {
                let now = Instant::now();
                tallies.timings.add($stage, (now - clock).as_secs_f64());
                clock = now;
            }
        };
    }

    loop {
        let done = time >= sched.t_end || sched.max_steps.is_some_and(|m| steps >= m);
        if done {
            break;
        }
        if lead {
            clock = Instant::now();
        }

        // K1: per-block wet/source counts for the owned block rows.
        if has_rows {
            let geom = band.geom;
            update_counts_rows(&mut counts_local, &band.h, &geom, grid, sh.mask, params.eps_dry, br0, br1);
            for k in br0 * grid.nbx()..br1 * grid.nbx() {
                sh.counts[k].store(counts_local[k], Ordering::Relaxed);
            }
        }
        sh.barrier.wait();
        mark!(0);

        // Everyone derives the full activity maps; identical by construction.
        for (k, c) in counts_local.iter_mut().enumerate() {
            *c = sh.counts[k].load(Ordering::Relaxed);
        }
        let map = ActiveBlockMap { counts: counts_local.clone(), nbx: grid.nbx(), nby: grid.nby() };
        for k in 0..nb {
            lag_active[k] = dense || map.lagrangian_active(k);
            eul_active[k] = dense || map.euler_active(k);
        }
        let eul_blocks = eul_active.iter().filter(|&&a| a).count();

        // Base-state halo exchange, then K2: forces at the step start.
        if in_ring && has_rows {
            fill_outbox(band, HaloSet::Base, &mut sh.outboxes[w].lock().unwrap());
        }
        sh.barrier.wait();
        if in_ring && has_rows {
            apply_from_below(band, HaloSet::Base, &sh.outboxes[ring_below].lock().unwrap());
            apply_from_above(band, HaloSet::Base, &sh.outboxes[ring_above].lock().unwrap());
        }
        if has_rows {
            let base = BaseView { h: &band.h, hu: &band.hu, hv: &band.hv, b: &band.b };
            let st = Stencil {
                geom: band.geom,
                grid,
                base,
                half: None,
                lag_active: &lag_active,
                bcol: &band.ws.bcol,
                brow: &band.ws.brow,
                nbx: grid.nbx(),
                west: sh.sources.west,
                east: sh.sources.east,
                south: sh.sources.south,
                north: sh.sources.north,
                eps_dry: params.eps_dry,
            };
            kernels::stage_forces(&st, params, br0, br1, &mut band.ws.acc_x, &mut band.ws.acc_y);
        }
        sh.barrier.wait();
        mark!(1);

        // K3: time step, reduced in fixed band order.
        {
            let part = if has_rows {
                dt_partial_band(
                    &band.h,
                    &band.hu,
                    &band.hv,
                    &band.geom,
                    params,
                    band.geom.row0,
                    band.geom.row0 + band.geom.rows,
                )
            } else {
                DtPartial::empty()
            };
            sh.scratch[w].lock().unwrap().dt = part;
        }
        sh.barrier.wait();
        let mut combined = DtPartial::empty();
        for slot in sh.scratch.iter() {
            combined.merge(&slot.lock().unwrap().dt);
        }
        let dtr = dt_from_partial(&combined, params, grid);
        let mut dt = dtr.tau.min(sched.t_end - time);
        if let Some(ns) = next_snap {
            dt = dt.min(ns - time);
        }
        mark!(2);
        // Runaway feedback shrinks the stability bound without end; a
        // collapse of seven orders against the run's own scale is the
        // detector for instabilities that stay finite cell-by-cell.
        let collapsed = combined.any_wet && dtr.tau < 1e-7 * dt_peak;
        if combined.any_wet {
            dt_peak = dt_peak.max(dtr.tau);
        }
        if !dt.is_finite() || dt <= 0.0 || collapsed {
            let mut slot = sh.err.lock().unwrap();
            if slot.is_none() {
                *slot = Some(SiltError::Instability {
                    time,
                    step: steps,
                    detail: format!(
                        "time step collapsed to {:.3e} s (peak was {:.3e} s)",
                        dtr.tau, dt_peak
                    ),
                });
            }
            drop(slot);
            sh.err_flag.store(true, Ordering::SeqCst);
            break;
        }

        // K4: predictor.
        if has_rows {
            let base = BaseView { h: &band.h, hu: &band.hu, hv: &band.hv, b: &band.b };
            let st = Stencil {
                geom: band.geom,
                grid,
                base,
                half: None,
                lag_active: &lag_active,
                bcol: &band.ws.bcol,
                brow: &band.ws.brow,
                nbx: grid.nbx(),
                west: sh.sources.west,
                east: sh.sources.east,
                south: sh.sources.south,
                north: sh.sources.north,
                eps_dry: params.eps_dry,
            };
            kernels::stage_predict(
                &st,
                params,
                &rates,
                &band.ws.acc_x,
                &band.ws.acc_y,
                dt,
                br0,
                br1,
                &mut band.ws.h_half,
                &mut band.ws.u_half,
                &mut band.ws.v_half,
                &mut band.ws.disp_x,
                &mut band.ws.disp_y,
            );
        }
        sh.barrier.wait();
        mark!(3);

        // Half-state halo exchange, then K5: forces on the half state.
        if in_ring && has_rows {
            fill_outbox(band, HaloSet::Half, &mut sh.outboxes[w].lock().unwrap());
        }
        sh.barrier.wait();
        if in_ring && has_rows {
            apply_from_below(band, HaloSet::Half, &sh.outboxes[ring_below].lock().unwrap());
            apply_from_above(band, HaloSet::Half, &sh.outboxes[ring_above].lock().unwrap());
        }
        if has_rows {
            let base = BaseView { h: &band.h, hu: &band.hu, hv: &band.hv, b: &band.b };
            let half = HalfView {
                h: &band.ws.h_half,
                u: &band.ws.u_half,
                v: &band.ws.v_half,
                dx: &band.ws.disp_x,
                dy: &band.ws.disp_y,
            };
            let st = Stencil {
                geom: band.geom,
                grid,
                base,
                half: Some(half),
                lag_active: &lag_active,
                bcol: &band.ws.bcol,
                brow: &band.ws.brow,
                nbx: grid.nbx(),
                west: sh.sources.west,
                east: sh.sources.east,
                south: sh.sources.south,
                north: sh.sources.north,
                eps_dry: params.eps_dry,
            };
            kernels::stage_forces(&st, params, br0, br1, &mut band.ws.acc_x, &mut band.ws.acc_y);
        }
        sh.barrier.wait();
        mark!(4);

        // K6: corrector.
        if has_rows {
            let base = BaseView { h: &band.h, hu: &band.hu, hv: &band.hv, b: &band.b };
            let half = HalfView {
                h: &band.ws.h_half,
                u: &band.ws.u_half,
                v: &band.ws.v_half,
                dx: &band.ws.disp_x,
                dy: &band.ws.disp_y,
            };
            let st = Stencil {
                geom: band.geom,
                grid,
                base,
                half: Some(half),
                lag_active: &lag_active,
                bcol: &band.ws.bcol,
                brow: &band.ws.brow,
                nbx: grid.nbx(),
                west: sh.sources.west,
                east: sh.sources.east,
                south: sh.sources.south,
                north: sh.sources.north,
                eps_dry: params.eps_dry,
            };
            let md = kernels::stage_correct(
                &st,
                params,
                &rates,
                &half,
                &band.ws.acc_x,
                &band.ws.acc_y,
                dt,
                br0,
                br1,
                &mut band.ws.lag_h,
                &mut band.ws.lag_hu,
                &mut band.ws.lag_hv,
            );
            sh.scratch[w].lock().unwrap().max_disp = md;
        } else {
            sh.scratch[w].lock().unwrap().max_disp = 0.0;
        }
        sh.barrier.wait();
        mark!(5);

        // K7: face fluxes accumulated into the particle totals.
        if has_rows {
            let base = BaseView { h: &band.h, hu: &band.hu, hv: &band.hv, b: &band.b };
            let half = HalfView {
                h: &band.ws.h_half,
                u: &band.ws.u_half,
                v: &band.ws.v_half,
                dx: &band.ws.disp_x,
                dy: &band.ws.disp_y,
            };
            let st = Stencil {
                geom: band.geom,
                grid,
                base,
                half: Some(half),
                lag_active: &lag_active,
                bcol: &band.ws.bcol,
                brow: &band.ws.brow,
                nbx: grid.nbx(),
                west: sh.sources.west,
                east: sh.sources.east,
                south: sh.sources.south,
                north: sh.sources.north,
                eps_dry: params.eps_dry,
            };
            let args =
                FluxArgs { p: params, rates: &rates, dt, transport: sh.transport, eul_active: &eul_active };
            kernels::stage_flux(
                &st,
                &args,
                br0,
                br1,
                &mut band.ws.lag_h,
                &mut band.ws.lag_hu,
                &mut band.ws.lag_hv,
                &mut band.ws.lag_b,
                &mut band.ws.flux,
            );
        }
        sh.barrier.wait();
        mark!(6);

        // K8: validate everywhere, then commit. A failed validation aborts
        // before anyone commits, leaving the state at the step start.
        if has_rows {
            if let Some((i, j, detail)) = kernels::stage_validate(
                &band.geom,
                grid,
                &eul_active,
                br0,
                br1,
                &band.ws.lag_h,
                &band.ws.lag_hu,
                &band.ws.lag_hv,
                &band.ws.lag_b,
            ) {
                let mut slot = sh.err.lock().unwrap();
                if slot.is_none() {
                    *slot = Some(SiltError::Instability {
                        time,
                        step: steps,
                        detail: format!("cell ({i}, {j}): {detail}"),
                    });
                }
                drop(slot);
                sh.err_flag.store(true, Ordering::SeqCst);
            }
        }
        sh.barrier.wait();
        if sh.err_flag.load(Ordering::SeqCst) {
            break;
        }
        if has_rows {
            kernels::stage_commit(
                &band.geom,
                grid,
                params,
                &eul_active,
                br0,
                br1,
                &band.ws.lag_h,
                &band.ws.lag_hu,
                &band.ws.lag_hv,
                &band.ws.lag_b,
                &mut band.h,
                &mut band.hu,
                &mut band.hv,
                &mut band.b,
            );
        }
        sh.barrier.wait();
        mark!(7);

        // Bookkeeping; the arithmetic is identical on every worker.
        time += dt;
        steps += 1;
        let emit_time = next_snap.is_some_and(|ns| {
            let tol = 1e-9 * sched.snapshot_every.unwrap_or(1.0);
            time >= ns - tol
        });
        let emit_steps = sched.snapshot_every_steps.is_some_and(|k| k > 0 && steps % k == 0);
        if emit_time {
            let every = sched.snapshot_every.unwrap();
            next_snap = Some(next_snap.unwrap() + every);
        }
        if lead {
            tallies.steps = steps;
            tallies.sim_time = time;
            tallies.cell_updates += eul_blocks as u64 * block_cells;
            let frac = eul_blocks as f64 / nb as f64;
            tallies.occupancy_sum += frac;
            tallies.occupancy_final = frac;
            let mut md = 0.0f64;
            for slot in sh.scratch.iter() {
                md = md.max(slot.lock().unwrap().max_disp);
            }
            tallies.max_displacement = tallies.max_displacement.max(md);
        }
        if emit_time || emit_steps {
            {
                let mut assembly = sh.assembly.lock().unwrap();
                gather_band(band, &mut assembly);
            }
            sh.barrier.wait();
            if lead {
                tallies.snapshots += 1;
                if let Some(dir) = &sched.output_dir {
                    let assembly = sh.assembly.lock().unwrap();
                    let snap = crate::io::Snapshot::capture(&assembly, grid, time, params.eps_dry);
                    if let Err(e) = snap.write(&dir.join(format!("snap_{:06}.bin", tallies.snapshots))) {
                        let mut slot = sh.err.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        drop(slot);
                        sh.err_flag.store(true, Ordering::SeqCst);
                    }
                }
            }
            sh.barrier.wait();
            if sh.err_flag.load(Ordering::SeqCst) {
                break;
            }
        }
    }

    if lead {
        tallies.sim_time = time;
        tallies.steps = steps;
        Some(tallies)
    } else {
        None
    }
}
