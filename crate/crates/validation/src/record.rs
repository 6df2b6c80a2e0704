//! Full runs with per-step observations.

use std::time::{Duration, Instant};
use svm_core::config::SimConfig;
use svm_core::fv2d::{total_energy, FieldState, Grid2D};
use svm_core::sim::Simulation;

#[derive(Clone, Copy, Debug)]
pub struct StepObs {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub e_before: f64,
    pub e_total: f64,
    pub residual: f64,
    pub kinetic: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// Cells with `H <= 0`, `A` not SPD or `A_cc <= 0`.
    pub inadmissible: usize,
    pub max_drift: f64,
}

#[derive(Debug)]
pub struct RunRecord {
    pub cfg: SimConfig,
    pub grid: Grid2D,
    pub e0: f64,
    pub steps: Vec<StepObs>,
    /// Last state reached, final or the one before a failed step.
    pub last: FieldState,
    pub error: Option<String>,
    pub elapsed: Duration,
}

impl RunRecord {
    pub fn completed(&self) -> bool {
        self.error.is_none()
    }
}

pub fn observe(fs: &FieldState, grid: &Grid2D) -> (f64, f64, f64, usize, f64) {
    let area = grid.cell_area();
    let (mut ke, mut lo, mut hi, mut bad, mut drift) = (0.0, f64::INFINITY, 0.0f64, 0, 0.0f64);
    for q in &fs.q {
        let h = q[0];
        let (ux, uy) = (q[1] / h, q[2] / h);
        ke += area * 0.5 * h * (ux * ux + uy * uy);
        lo = lo.min(h);
        hi = hi.max(h);
        match svm_core::model::conserved_to_primitive(q) {
            Ok(s) => {
                if !(s.h > 0.0 && s.a.is_spd() && s.acc > 0.0) {
                    bad += 1;
                }
                drift = drift.max(s.involution_drift());
            }
            Err(_) => bad += 1,
        }
    }
    (ke, lo, hi, bad, drift)
}

/// Runs `cfg` to `t_end` or to the first solver error.
pub fn record(cfg: &SimConfig) -> RunRecord {
    let start = Instant::now();
    let mut sim = Simulation::new(cfg.clone()).expect("valid configuration");
    let e0 = total_energy(&sim.state, &sim.grid, &cfg.params).expect("admissible initial state");
    let mut steps = Vec::new();
    let mut error = None;
    while !sim.finished() {
        if sim.state.step >= cfg.max_steps {
            error = Some(format!("step limit {}", cfg.max_steps));
            break;
        }
        match sim.step() {
            Ok(e) => {
                let (kinetic, min_h, max_h, inadmissible, max_drift) = observe(&sim.state, &sim.grid);
                steps.push(StepObs {
                    step: e.step,
                    t: e.t,
                    dt: e.dt,
                    e_before: e.e_before,
                    e_total: e.e_total,
                    residual: e.residual,
                    kinetic,
                    min_h,
                    max_h,
                    inadmissible,
                    max_drift,
                });
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    RunRecord {
        cfg: cfg.clone(),
        grid: sim.grid.clone(),
        e0,
        steps,
        last: sim.state,
        error,
        elapsed: start.elapsed(),
    }
}
