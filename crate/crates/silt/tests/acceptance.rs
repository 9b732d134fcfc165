//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Tolerances are pinned here and nowhere else.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::Instant;

use silt::activeblocks::ActiveBlockMap;
use silt::engine::{run, Schedule, STAGE_NAMES};
use silt::io::{preset_scenarios, scenario::*};
use silt::numerics::{compute_dt, step, LimitingTerm, StepWorkspace, SweepMode};
use silt::params::{AjMode, BoundaryKind, PhysParams, SourceInputs};
use silt::state::{new_state, new_state_with_velocity, FlowState, WaterInit};
use silt::SimGrid;

use common::{ritter_depth, serial, stoker_star};

fn pass(n: u32, what: &str, detail: String) {
    println!("criterion {n}: PASS - {what} ({detail})");
}

/// Criterion 1: lake at rest on an irregular 256x256 bed stays below
/// 1e-12 m/s peak velocity over 1000 steps, in under 30 s of wall time.
#[test]
fn criterion_01_well_balancing() {
    let _guard = serial();
    let setup = preset_scenarios("lake-at-rest").unwrap().build(None).unwrap();
    assert_eq!((setup.grid.nx, setup.grid.ny), (256, 256));
    let mut state = setup.state;
    let sched = Schedule {
        t_end: f64::INFINITY,
        max_steps: Some(1000),
        workers: 1,
        ..Schedule::default()
    };
    let started = Instant::now();
    let report = run(&mut state, &setup.params, &setup.sources, &setup.grid, &sched).unwrap();
    let wall = started.elapsed().as_secs_f64();
    assert_eq!(report.steps, 1000);
    let max_v = state.max_speed(setup.params.eps_dry);
    assert!(max_v <= 1e-12, "lake at rest drifted: max |v| = {max_v:.3e} m/s");
    assert!(wall < 30.0, "runtime {wall:.1} s exceeds 30 s");
    pass(1, "well-balancing", format!("max |v| = {max_v:.1e} m/s after 1000 steps in {wall:.1} s"));
}

/// Criterion 2: closed-box dam break with sediment conserves water and bed
/// volume to 1e-10 relative over 10^4 steps.
#[test]
fn criterion_02_conservation() {
    let _guard = serial();
    let grid = SimGrid::with_blocks(64, 32, 0.5, 16, 16).unwrap();
    let n = grid.cell_count();
    let mut bed = vec![0.0; n];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            bed[grid.idx(i, j)] = 0.05 * (1.0 + (i as f64 * 0.37).sin() * (j as f64 * 0.23).cos());
        }
    }
    let mut state =
        new_state(&grid, bed, &WaterInit::DamBreakX { col: 32, h_left: 1.0, h_right: 0.2 }).unwrap();
    let mut params = PhysParams::default();
    params.aj_mode = AjMode::Constant(0.001);
    params.m_exp = 2.0;
    params.psi = 0.4;
    params.k_cfl = 0.5;
    let sources = SourceInputs::default();
    let area = grid.cell_area();
    let water0 = state.water_volume(area);
    let bed0 = state.bed_volume(area);

    let sched = Schedule { t_end: f64::INFINITY, max_steps: Some(10_000), workers: 1, ..Schedule::default() };
    let report = run(&mut state, &params, &sources, &grid, &sched).unwrap();
    assert_eq!(report.steps, 10_000);

    let water_drift = ((state.water_volume(area) - water0) / water0).abs();
    let bed_drift = ((state.bed_volume(area) - bed0) / bed0).abs();
    assert!(water_drift <= 1e-10, "water volume drift {water_drift:.3e}");
    assert!(bed_drift <= 1e-10, "bed volume drift {bed_drift:.3e}");
    pass(2, "conservation", format!("drift: water {water_drift:.1e}, bed {bed_drift:.1e} over 1e4 steps"));
}

/// Criterion 3: Ritter dry dam break on 400x3 at K = 0.5 matches the
/// analytic profile to 2% in L1 when the front has crossed 100 cells, with
/// no depth overshoot beyond 0.1% of the initial jump.
#[test]
fn criterion_03_ritter_dry_dam_break() {
    let _guard = serial();
    let setup = preset_scenarios("dam-break-dry").unwrap().build(None).unwrap();
    assert_eq!((setup.grid.nx, setup.grid.ny), (400, 3));
    assert_eq!(setup.params.k_cfl, 0.5);
    let grid = setup.grid;
    let g = setup.params.g;
    // Time for the analytic front (speed 2 c0) to traverse 100 cells.
    let t_end = 100.0 * grid.h / (2.0 * (g * 1.0f64).sqrt());
    let mut state = setup.state;
    let sched = Schedule { t_end, workers: 1, ..Schedule::default() };
    let report = run(&mut state, &setup.params, &setup.sources, &grid, &sched).unwrap();
    assert!((report.sim_time - t_end).abs() < 1e-12);

    let x0 = 200.0 * grid.h;
    let j = 1;
    let mut err = 0.0;
    let mut norm = 0.0;
    let mut max_h: f64 = 0.0;
    for i in 0..grid.nx {
        let x = (i as f64 + 0.5) * grid.h;
        let exact = ritter_depth(x, t_end, x0, 1.0, g);
        let sim = state.h[grid.idx(i, j)];
        err += (sim - exact).abs();
        norm += exact;
        max_h = max_h.max(sim);
    }
    let l1 = err / norm;
    assert!(l1 <= 0.02, "Ritter L1 error {:.3}%", 100.0 * l1);
    // Initial jump is 1 m; overshoot budget is 0.1% of it.
    let overshoot = max_h - 1.0;
    assert!(overshoot <= 1e-3, "depth overshoot {overshoot:.3e} m");
    pass(3, "Ritter dry dam break", format!("L1 = {:.3}%, overshoot = {overshoot:.1e} m", 100.0 * l1));
}

/// Criterion 4: Stoker wet dam break (depth ratio 1:0.1) reproduces the
/// exact plateau depth within 1%.
#[test]
fn criterion_04_stoker_wet_dam_break() {
    let _guard = serial();
    let setup = preset_scenarios("dam-break-wet").unwrap().build(None).unwrap();
    let grid = setup.grid;
    let g = setup.params.g;
    let t_end = 20.0;
    let mut state = setup.state;
    let sched = Schedule { t_end, workers: 1, ..Schedule::default() };
    run(&mut state, &setup.params, &setup.sources, &grid, &sched).unwrap();

    let star = stoker_star(1.0, 0.1, g);
    // Sample the middle of the plateau between rarefaction tail and bore.
    let x0 = 200.0 * grid.h;
    let x_mid = x0 + 0.5 * (star.tail_speed + star.shock_speed) * t_end;
    let i_mid = (x_mid / grid.h) as usize;
    let mut avg = 0.0;
    for i in i_mid - 5..i_mid + 5 {
        avg += state.h[grid.idx(i, 1)];
    }
    avg /= 10.0;
    let rel = (avg - star.h_m).abs() / star.h_m;
    assert!(rel <= 0.01, "plateau depth {avg:.5} vs exact {:.5} ({:.2}%)", star.h_m, 100.0 * rel);
    pass(4, "Stoker wet dam break", format!("plateau {avg:.5} vs {:.5} ({:.3}%)", star.h_m, 100.0 * rel));
}

/// Criterion 5: the stability controller reproduces direct evaluation of
/// its bound on the single-cell example (H = 1, v = (2, 0), h = 1,
/// A = 0.001, m = 2, psi = 0.4, K = 0.5) with the gravity-wave term binding.
///
/// Direct evaluation of the three terms gives (0.25, 0.1948523..., 37.5),
/// so tau = 0.5 * 1 / (2 + sqrt(9.81)) = 0.0974261577...; the value is
/// asserted at the stated 1e-5 tolerance and at 1e-12 against the oracle.
#[test]
fn criterion_05_dt_controller() {
    let _guard = serial();
    let grid = SimGrid::new(3, 3, 1.0).unwrap();
    let mut state = new_state(&grid, vec![0.0; 9], &WaterInit::Depth { h0: 0.0 }).unwrap();
    let idx = grid.idx(1, 1);
    state.h[idx] = 1.0;
    state.hu[idx] = 2.0;
    let mut params = PhysParams::default();
    params.aj_mode = AjMode::Constant(0.001);
    params.m_exp = 2.0;
    params.psi = 0.4;
    params.k_cfl = 0.5;

    // Independent oracle: direct evaluation of the bound.
    let (h_cell, u, g) = (1.0f64, 2.0f64, params.g);
    let t_adv = grid.h / (2.0 * u);
    let t_wave = grid.h / (u + (g * h_cell).sqrt());
    let j0 = 0.001 * u * u * u; // A |v|^m v with m = 2
    let t_diff = grid.h * grid.h / (2.0 * j0 / (1.0 - params.psi));
    let oracle = params.k_cfl * t_adv.min(t_wave).min(t_diff);
    assert!((t_adv - 0.25).abs() < 1e-15);
    assert!((t_wave - 0.194_852_315_4).abs() < 1e-10);
    assert!((t_diff - 37.5).abs() < 1e-12);

    let r = compute_dt(&state, &params, &grid);
    assert!((r.tau - oracle).abs() < 1e-12, "tau {} vs oracle {oracle}", r.tau);
    assert!((r.tau - 0.097_426_157_7).abs() < 1e-5, "tau {}", r.tau);
    assert_eq!(r.limiting_term, LimitingTerm::GravityWave);
    assert_eq!(r.limiting_cell, Some((1, 1)));
    pass(5, "dt controller", format!("tau = {:.10}, gravity-wave limited", r.tau));
}

fn grass_channel(k_cfl: f64) -> (SimGrid, FlowState, PhysParams, SourceInputs) {
    let grid = SimGrid::with_blocks(128, 4, 0.5, 16, 4).unwrap();
    let n = grid.cell_count();
    let state =
        new_state(&grid, vec![0.0; n], &WaterInit::DamBreakX { col: 64, h_left: 1.0, h_right: 0.1 })
            .unwrap();
    let mut params = PhysParams::default();
    // Strong enough transport that the bed-diffusion term of the stability
    // bound matters; at K = 1.5 the runaway is then multiplicative.
    params.aj_mode = AjMode::Constant(0.005);
    params.c_j = 1.0;
    params.m_exp = 2.0;
    params.psi = 0.4;
    params.k_cfl = k_cfl;
    (grid, state, params, SourceInputs::default())
}

/// Criterion 6: with Grass transport on, 10^4 steps at K = 0.8 stay finite;
/// raising K to 1.5 trips the instability detector, demonstrating that the
/// stability bound is binding.
#[test]
fn criterion_06_stability_margin() {
    let _guard = serial();
    let (grid, state0, params, sources) = grass_channel(0.8);
    let mut state = state0.clone();
    let sched = Schedule { t_end: f64::INFINITY, max_steps: Some(10_000), workers: 1, ..Schedule::default() };
    let report = run(&mut state, &params, &sources, &grid, &sched).unwrap();
    assert_eq!(report.steps, 10_000);
    assert!(state.find_non_finite().is_none(), "NaN/Inf after 1e4 steps at K = 0.8");

    let (grid, state0, params, sources) = grass_channel(0.8);
    let mut state = state0;
    let params = params.with_unchecked_courant(1.5);
    let sched = Schedule { t_end: f64::INFINITY, max_steps: Some(30_000), workers: 1, ..Schedule::default() };
    let err = run(&mut state, &params, &sources, &grid, &sched)
        .expect_err("K = 1.5 must trip the instability detector");
    assert!(matches!(err, silt::SiltError::Instability { .. }), "unexpected error: {err}");
    pass(6, "stability margin", format!("K=0.8 finite for 1e4 steps; K=1.5 aborted: {err}"));
}

/// Criterion 7: on a 10%-wet 1024x1024 flood scenario, active-block
/// skipping is bitwise exact against the dense sweep and at least 3x faster.
#[test]
fn criterion_07_active_blocks() {
    let _guard = serial();
    let grid = SimGrid::with_blocks(1024, 1024, 1.0, 16, 16).unwrap();
    let n = grid.cell_count();
    let mut bed = vec![0.0; n];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            bed[grid.idx(i, j)] = 0.002 * i as f64;
        }
    }
    let state0 =
        new_state(&grid, bed, &WaterInit::DamBreakX { col: 102, h_left: 0.5, h_right: 0.0 }).unwrap();
    let params = PhysParams::default();
    let sources = SourceInputs::default();
    let wet_frac = state0.wet_cells(params.eps_dry) as f64 / n as f64;
    assert!((0.08..0.12).contains(&wet_frac), "wet fraction {wet_frac:.3}");

    let mut times = [0.0f64; 2];
    let mut states: Vec<FlowState> = Vec::new();
    let mut occupancy = 0.0;
    for (k, sweep) in [SweepMode::Dense, SweepMode::Active].into_iter().enumerate() {
        let mut state = state0.clone();
        let sched = Schedule {
            t_end: f64::INFINITY,
            max_steps: Some(30),
            workers: 1,
            sweep,
            ..Schedule::default()
        };
        let started = Instant::now();
        let report = run(&mut state, &params, &sources, &grid, &sched).unwrap();
        times[k] = started.elapsed().as_secs_f64();
        assert_eq!(report.steps, 30);
        occupancy = report.occupancy_mean;
        states.push(state);
    }
    assert_eq!(states[0].h, states[1].h, "active sweep altered depths");
    assert_eq!(states[0].hu, states[1].hu);
    assert_eq!(states[0].hv, states[1].hv);
    assert_eq!(states[0].b, states[1].b);
    let speedup = times[0] / times[1];
    assert!(speedup >= 3.0, "sparse speedup only {speedup:.2}x (dense {:.2}s, active {:.2}s)", times[0], times[1]);
    pass(
        7,
        "active-block exactness + speedup",
        format!("bitwise equal; {speedup:.2}x faster at {:.1}% occupancy", 100.0 * occupancy),
    );
}

/// Criterion 8: a fully wet 2048x2048 run over 100 steps gives
/// bitwise-identical snapshots for 1, 2 and 4 workers, and 4 workers are at
/// least 2.5x faster than 1.
#[test]
fn criterion_08_parallel_determinism_scaling() {
    let _guard = serial();
    let grid = SimGrid::with_blocks(2048, 2048, 1.0, 16, 16).unwrap();
    let n = grid.cell_count();
    let state0 =
        new_state(&grid, vec![0.0; n], &WaterInit::DamBreakX { col: 1024, h_left: 2.0, h_right: 1.0 })
            .unwrap();
    let params = PhysParams::default();
    let sources = SourceInputs::default();

    let tmp = tempfile::tempdir().unwrap();
    let mut finals: Vec<Vec<u8>> = Vec::new();
    let mut walls: Vec<f64> = Vec::new();
    for workers in [1usize, 2, 4] {
        let dir = tmp.path().join(format!("w{workers}"));
        let mut state = state0.clone();
        let sched = Schedule {
            t_end: f64::INFINITY,
            max_steps: Some(100),
            workers,
            output_dir: Some(dir.clone()),
            ..Schedule::default()
        };
        let started = Instant::now();
        let report = run(&mut state, &params, &sources, &grid, &sched).unwrap();
        walls.push(started.elapsed().as_secs_f64());
        assert_eq!(report.steps, 100);
        finals.push(std::fs::read(dir.join("snap_final.bin")).unwrap());
    }
    assert!(finals[0] == finals[1], "1 vs 2 workers: snapshots differ");
    assert!(finals[0] == finals[2], "1 vs 4 workers: snapshots differ");
    let speedup = walls[0] / walls[2];
    println!(
        "criterion 8: determinism PASS (1/2/4 workers bitwise identical); speedup 4w = {speedup:.2}x \
         (walls: {:.1}s / {:.1}s / {:.1}s)",
        walls[0], walls[1], walls[2]
    );
    assert!(
        speedup >= 2.5,
        "4 workers reached only {speedup:.2}x over 1 (walls {:.1}s -> {:.1}s); \
         determinism itself passed bitwise",
        walls[0], walls[2]
    );
    pass(8, "parallel determinism + scaling", format!("bitwise identical; speedup {speedup:.2}x"));
}

/// Criterion 9: on a fully wet run the face-flux stage is the single
/// largest share of stage time.
#[test]
fn criterion_09_timing_breakdown() {
    let _guard = serial();
    let grid = SimGrid::with_blocks(192, 192, 1.0, 16, 16).unwrap();
    let n = grid.cell_count();
    let mut state =
        new_state(&grid, vec![0.0; n], &WaterInit::DamBreakX { col: 96, h_left: 2.0, h_right: 1.0 })
            .unwrap();
    let params = PhysParams::default();
    let sources = SourceInputs::default();
    let sched = Schedule { t_end: f64::INFINITY, max_steps: Some(50), workers: 1, ..Schedule::default() };
    let report = run(&mut state, &params, &sources, &grid, &sched).unwrap();
    let (dom, tie) = report.timings.dominant();
    let shares = report.timings.shares();
    assert_eq!(STAGE_NAMES[dom], "K7", "dominant stage was {} ({:.1}%)", STAGE_NAMES[dom], shares[dom]);
    assert!(!tie, "dominance must not be a tie");
    pass(9, "timing breakdown", format!("K7 dominates at {:.1}% of stage time", shares[6]));
}

/// Criterion 10: the sandy ridge under subcritical flow migrates downstream
/// monotonically, and the bed profile self-converges under grid refinement
/// with observed L1 order >= 0.9.
#[test]
fn criterion_10_grass_hump() {
    let _guard = serial();
    let t_end = 150.0;
    // Same physical setup at three resolutions: L = 128 m channel, ridge at
    // x = 32 m, flow 1.5 m/s over ~1 m of water.
    let run_channel = |nx: usize, h: f64, track: bool| -> (Vec<f64>, Vec<usize>) {
        let cfg_bed = SyntheticBed::GaussianRidgeX { height: 0.2, center_x: 32.0, sigma: 4.0 };
        let grid = SimGrid::new(nx, 4, h).unwrap();
        let n = grid.cell_count();
        let mut bed = vec![0.0; n];
        if let SyntheticBed::GaussianRidgeX { height, center_x, sigma } = cfg_bed {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let (x, _) = grid.cell_center(i, j);
                    let r = (x - center_x) / sigma;
                    bed[grid.idx(i, j)] = height * (-r * r).exp();
                }
            }
        }
        let mut state =
            new_state_with_velocity(&grid, bed, &WaterInit::Surface { eta0: 1.0 }, (1.5, 0.0)).unwrap();
        let mut params = PhysParams::default();
        params.aj_mode = AjMode::Constant(0.001);
        params.m_exp = 2.0;
        params.psi = 0.4;
        params.c_sh = 0.0;
        params.k_cfl = 0.5;
        let mut sources = SourceInputs::default();
        sources.west = BoundaryKind::Open;
        sources.east = BoundaryKind::Open;

        let mut apexes = Vec::new();
        let mut map = ActiveBlockMap::empty(&grid);
        let mut ws = StepWorkspace::for_grid(&grid);
        let mut t = 0.0;
        let mut next_mark = 15.0;
        while t < t_end {
            let s = step(
                &mut state,
                &params,
                &sources,
                &grid,
                &mut map,
                &mut ws,
                SweepMode::Active,
                t_end - t,
            )
            .unwrap();
            t += s.dt_used;
            if track && t >= next_mark {
                next_mark += 15.0;
                let row = centerline(&state, &grid);
                apexes.push(argmax(&row));
            }
        }
        (centerline(&state, &grid), apexes)
    };

    // Monotone downstream migration on the middle grid.
    let (_, apexes) = run_channel(256, 0.5, true);
    assert!(apexes.len() >= 8);
    for w in apexes.windows(2) {
        assert!(w[1] >= w[0], "apex moved upstream: {apexes:?}");
    }
    assert!(
        *apexes.last().unwrap() > apexes[0],
        "apex did not move downstream: {apexes:?}"
    );

    // Self-convergence: L1 differences between successive refinements.
    let (coarse, _) = run_channel(128, 1.0, false);
    let (mid, _) = run_channel(256, 0.5, false);
    let (fine, _) = run_channel(512, 0.25, false);
    let e_cm = l1_between_levels(&coarse, &mid);
    let e_mf = l1_between_levels(&mid, &fine);
    let order = (e_cm / e_mf).log2();
    assert!(
        order >= 0.9,
        "observed bed convergence order {order:.2} (L1 diffs {e_cm:.4e}, {e_mf:.4e})"
    );
    pass(
        10,
        "sandy ridge morphodynamics",
        format!("apex {:?} cells; order {order:.2}", (apexes[0], *apexes.last().unwrap())),
    );
}

fn centerline(state: &FlowState, grid: &SimGrid) -> Vec<f64> {
    (0..grid.nx).map(|i| state.b[grid.idx(i, 1)]).collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

/// L1 distance between a coarse profile and a finer one averaged down to the
/// coarse cells (cell size ratio 2), normalized by the cell count.
fn l1_between_levels(coarse: &[f64], fine: &[f64]) -> f64 {
    assert_eq!(fine.len(), 2 * coarse.len());
    let mut err = 0.0;
    for (i, c) in coarse.iter().enumerate() {
        let avg = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
        err += (avg - c).abs();
    }
    err / coarse.len() as f64
}

/// Criterion 11: with the erosion threshold active and the flow everywhere
/// below it, the bed is bitwise constant over 1000 steps.
#[test]
fn criterion_11_threshold_gating() {
    let _guard = serial();
    let grid = SimGrid::with_blocks(48, 48, 1.0, 16, 16).unwrap();
    let n = grid.cell_count();
    let mut bed = vec![0.0; n];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            bed[grid.idx(i, j)] = 0.1 * (1.0 + (0.3 * i as f64).sin() * (0.2 * j as f64).sin());
        }
    }
    // Gentle uniform drift well below the threshold:
    // v_k = 6 * 0.001^(1/3) * H^(1/6) ~ 0.6 m/s at H ~ 1.
    let mut state =
        new_state_with_velocity(&grid, bed, &WaterInit::Surface { eta0: 1.2 }, (0.15, 0.0)).unwrap();
    let mut params = PhysParams::default();
    params.aj_mode = AjMode::Constant(0.01);
    params.m_exp = 2.0;
    params.psi = 0.4;
    params.c_sh = 6.0;
    params.d50 = 1e-3;
    let sources = SourceInputs::default();
    let bed_bits: Vec<u64> = state.b.iter().map(|v| v.to_bits()).collect();

    let sched = Schedule { t_end: f64::INFINITY, max_steps: Some(1000), workers: 1, ..Schedule::default() };
    let report = run(&mut state, &params, &sources, &grid, &sched).unwrap();
    assert_eq!(report.steps, 1000);
    let after: Vec<u64> = state.b.iter().map(|v| v.to_bits()).collect();
    assert_eq!(bed_bits, after, "bed changed despite sub-threshold flow");
    // Sanity: water did slosh, so the gate (not stagnation) kept the bed.
    assert!(report.max_speed_final > 0.01, "flow died; gating untested");
    pass(11, "threshold gating", format!("bed bitwise constant; final max |v| = {:.3} m/s", report.max_speed_final));
}
