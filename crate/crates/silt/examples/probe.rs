// Scratch accuracy probe: dry/wet dam breaks vs exact solutions.
use silt::activeblocks::ActiveBlockMap;
use silt::numerics::{step, StepWorkspace, SweepMode};
use silt::params::{PhysParams, SourceInputs};
use silt::state::{new_state, WaterInit};
use silt::SimGrid;

fn ritter_depth(x: f64, t: f64, x0: f64, h_l: f64, g: f64) -> f64 {
    let c0 = (g * h_l).sqrt();
    let xi = (x - x0) / t;
    if xi <= -c0 {
        h_l
    } else if xi >= 2.0 * c0 {
        0.0
    } else {
        let c = (2.0 * c0 - xi) / 3.0;
        c * c / g
    }
}

fn main() {
    let g = 9.81;
    let grid = SimGrid::new(400, 3, 1.0).unwrap();
    let n = grid.cell_count();
    let mut state = new_state(
        &grid,
        vec![0.0; n],
        &WaterInit::DamBreakX { col: 200, h_left: 1.0, h_right: 0.0 },
    )
    .unwrap();
    let mut params = PhysParams::default();
    params.k_cfl = 0.5;
    let sources = SourceInputs::default();
    let mut map = ActiveBlockMap::empty(&grid);
    let mut ws = StepWorkspace::for_grid(&grid);

    // Run until the front would traverse 100 cells: t = 100 h / (2 c0).
    let c0 = (g * 1.0f64).sqrt();
    let t_end = 100.0 * grid.h / (2.0 * c0);
    let mut t = 0.0;
    let mut steps = 0;
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
        steps += 1;
    }
    // L1 error against the analytic profile along the center row.
    let x0 = 200.0 * grid.h;
    let mut err = 0.0;
    let mut norm = 0.0;
    let mut max_h: f64 = 0.0;
    for i in 0..grid.nx {
        let x = (i as f64 + 0.5) * grid.h;
        let he = ritter_depth(x, t, x0, 1.0, g);
        let hn = state.h[grid.idx(i, 1)];
        err += (hn - he).abs();
        norm += he;
        max_h = max_h.max(hn);
    }
    println!("ritter: steps={steps} t={t:.4} L1rel={:.4}% overshoot={:.3e}", 100.0 * err / norm, max_h - 1.0);

    // Numerical front position vs analytic
    let mut front = 0.0;
    for i in (0..grid.nx).rev() {
        if state.h[grid.idx(i, 1)] > 1e-4 {
            front = (i as f64 + 0.5) * grid.h;
            break;
        }
    }
    println!("front: numeric={front:.1} analytic={:.1}", x0 + 2.0 * c0 * t);

    // Stoker 1:0.1 plateau check.
    let mut state = new_state(
        &grid,
        vec![0.0; n],
        &WaterInit::DamBreakX { col: 200, h_left: 1.0, h_right: 0.1 },
    )
    .unwrap();
    let mut t = 0.0;
    let t_end = 20.0;
    while t < t_end {
        let s = step(&mut state, &params, &sources, &grid, &mut map, &mut ws, SweepMode::Active, t_end - t).unwrap();
        t += s.dt_used;
    }
    // Exact star depth by bisection on the dam-break function.
    let h_l = 1.0f64;
    let h_r = 0.1f64;
    let f = |hm: f64| -> f64 {
        let cl = (g * h_l).sqrt();
        let cm = (g * hm).sqrt();
        let rare = 2.0 * (cl - cm);
        let shock = (hm - h_r) * (0.5 * g * (hm + h_r) / (hm * h_r)).sqrt();
        rare - shock
    };
    let (mut lo, mut hi) = (h_r, h_l);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let hm = 0.5 * (lo + hi);
    // The plateau spans from the rarefaction tail to the shock; sample its
    // middle. u_m = 2 (c_l - c_m); S = u_m h_m / (h_m - h_r).
    let cl = (g * h_l).sqrt();
    let cm = (g * hm).sqrt();
    let um = 2.0 * (cl - cm);
    let s_shock = um * hm / (hm - h_r);
    let x0 = 200.0 * grid.h;
    let x_mid = x0 + 0.5 * ((um - cm) + s_shock) * t;
    let i_mid = (x_mid / grid.h) as usize;
    let mut avg = 0.0;
    for i in i_mid - 5..i_mid + 5 {
        avg += state.h[grid.idx(i, 1)];
    }
    avg /= 10.0;
    println!(
        "stoker: exact_hm={hm:.5} plateau=[{:.1},{:.1}] window_avg={avg:.5} err={:.3}%  u_m={um:.4} S={s_shock:.4}",
        x0 + (um - cm) * t,
        x0 + s_shock * t,
        100.0 * (avg - hm).abs() / hm
    );
}
