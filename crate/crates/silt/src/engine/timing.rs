//! Per-stage wall-time accounting for the staged pipeline.

use crate::error::{Result, SiltError};

pub const STAGE_COUNT: usize = 8;

/// Stage names in pipeline order: activity, predictor forces, time step,
/// predictor drift, corrector forces, corrector, face fluxes, update.
pub const STAGE_NAMES: [&str; STAGE_COUNT] = ["K1", "K2", "K3", "K4", "K5", "K6", "K7", "K8"];

/// Accumulated seconds per pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimings {
    pub seconds: [f64; STAGE_COUNT],
}

impl StageTimings {
    pub fn add(&mut self, stage: usize, secs: f64) {
        self.seconds[stage] += secs;
    }

    pub fn total(&self) -> f64 {
        self.seconds.iter().sum()
    }

    /// Percent shares; they sum to 100 whenever any time was recorded.
    pub fn shares(&self) -> [f64; STAGE_COUNT] {
        let total = self.total();
        let mut out = [0.0; STAGE_COUNT];
        if total > 0.0 {
            for (o, s) in out.iter_mut().zip(self.seconds.iter()) {
                *o = 100.0 * s / total;
            }
        }
        out
    }

    /// Index of the dominant stage and whether it ties with another stage.
    /// Ties resolve to the lowest stage index.
    pub fn dominant(&self) -> (usize, bool) {
        let mut best = 0;
        for k in 1..STAGE_COUNT {
            if self.seconds[k] > self.seconds[best] {
                best = k;
            }
        }
        let tie = (0..STAGE_COUNT).any(|k| k != best && self.seconds[k] == self.seconds[best]);
        (best, tie)
    }
}

/// Human-readable share breakdown. Errors when nothing was timed.
pub fn timing_report(t: &StageTimings) -> Result<String> {
    let total = t.total();
    if total <= 0.0 {
        return Err(SiltError::Report("no timed steps".into()));
    }
    let shares = t.shares();
    let (dom, tie) = t.dominant();
    let mut out = String::from("stage timings:\n");
    for k in 0..STAGE_COUNT {
        out.push_str(&format!(
            "  {:<3} {:>10.4} s  {:>6.2}%{}\n",
            STAGE_NAMES[k],
            t.seconds[k],
            shares[k],
            if k == dom { if tie { "  <- dominant (tie)" } else { "  <- dominant" } } else { "" }
        ));
    }
    out.push_str(&format!("  total {:.4} s\n", total));
    Ok(out)
}
