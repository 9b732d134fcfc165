// Find transport strength where K=0.8 holds for 1e4 steps and K=1.5 trips.
use silt::activeblocks::ActiveBlockMap;
use silt::numerics::{step, StepWorkspace, SweepMode};
use silt::params::{AjMode, PhysParams, SourceInputs};
use silt::state::{new_state, WaterInit};
use silt::SimGrid;

fn trial(a: f64, c_j: f64, k: f64, max_steps: usize) -> (usize, bool, f64) {
    let grid = SimGrid::with_blocks(128, 4, 0.5, 16, 4).unwrap();
    let n = grid.cell_count();
    let mut state =
        new_state(&grid, vec![0.0; n], &WaterInit::DamBreakX { col: 64, h_left: 1.0, h_right: 0.1 }).unwrap();
    let mut params = PhysParams::default();
    params.aj_mode = AjMode::Constant(a);
    params.c_j = c_j;
    params.psi = 0.4;
    params = params.with_unchecked_courant(k);
    let sources = SourceInputs::default();
    let mut map = ActiveBlockMap::empty(&grid);
    let mut ws = StepWorkspace::for_grid(&grid);
    for s in 0..max_steps {
        if step(&mut state, &params, &sources, &grid, &mut map, &mut ws, SweepMode::Active, f64::INFINITY).is_err() {
            return (s, true, state.max_speed(params.eps_dry));
        }
    }
    (max_steps, false, state.max_speed(params.eps_dry))
}

fn main() {
    for a in [0.02, 0.01, 0.005] {
        let (s8, died8, v8) = trial(a, 1.0, 0.8, 10_000);
        let (s15, died15, _) = trial(a, 1.0, 1.5, 30_000);
        println!(
            "A={a}: K=0.8 -> {} at step {s8} (max|v|={v8:.2}); K=1.5 -> {} at step {s15}",
            if died8 { "DIED" } else { "ok" },
            if died15 { "DIED" } else { "survived" }
        );
    }
}
