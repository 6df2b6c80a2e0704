//! Simulation driver.

use crate::config::{Axis, ConfigError, SimConfig};
use crate::error::SvmError;
use crate::exec::Exec;
use crate::fv2d::{total_energy, FieldState, Grid2D, LedgerEntry, Stepper};
use crate::output::{
    extract_slice, snapshot_rows, write_slice_csv, write_snapshot, write_vtk, EnergyWriter,
    OutputError,
};
use crate::presets;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(#[from] SvmError),
    #[error("output failed: {0}")]
    Output(#[from] OutputError),
    #[error("step limit {0} reached before t_end")]
    StepLimit(usize),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Output(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub steps: usize,
    pub t_final: f64,
    pub min_h: f64,
    /// Largest `|H det F - 1|` seen after any step.
    pub max_involution_drift: f64,
    pub max_residual: f64,
    pub e_initial: f64,
    pub e_final: f64,
    pub min_dt: f64,
    pub max_dt: f64,
}

impl Summary {
    fn start(fs: &FieldState, grid: &Grid2D, e0: f64) -> Result<Self, SvmError> {
        let mut s = Summary {
            steps: 0,
            t_final: fs.t,
            min_h: f64::INFINITY,
            max_involution_drift: 0.0,
            max_residual: f64::NEG_INFINITY,
            e_initial: e0,
            e_final: e0,
            min_dt: f64::INFINITY,
            max_dt: 0.0,
        };
        s.observe_field(fs, grid)?;
        Ok(s)
    }

    fn observe_field(&mut self, fs: &FieldState, grid: &Grid2D) -> Result<(), SvmError> {
        for c in fs.primitives(grid)? {
            self.min_h = self.min_h.min(c.h);
            self.max_involution_drift = self.max_involution_drift.max(c.involution_drift());
        }
        Ok(())
    }

    fn observe(&mut self, fs: &FieldState, grid: &Grid2D, e: &LedgerEntry) -> Result<(), SvmError> {
        self.steps = fs.step;
        self.t_final = fs.t;
        self.e_final = e.e_total;
        self.max_residual = self.max_residual.max(e.residual);
        self.min_dt = self.min_dt.min(e.dt);
        self.max_dt = self.max_dt.max(e.dt);
        self.observe_field(fs, grid)
    }
}

/// A configured run: grid, stepper and current state.
pub struct Simulation {
    pub cfg: SimConfig,
    pub grid: Grid2D,
    pub stepper: Stepper,
    pub state: FieldState,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self, RunError> {
        cfg.validate()?;
        let grid = presets::build_grid(&cfg)?;
        let state = presets::initial_field(&cfg, &grid)?;
        let mut stepper = Stepper::new(grid.clone(), cfg.params, cfg.cfl);
        stepper.project_every = cfg.project_every;
        Ok(Self {
            cfg,
            grid,
            stepper,
            state,
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.stepper.exec = exec;
        self
    }

    /// One step, never past `t_end`.
    pub fn step(&mut self) -> Result<LedgerEntry, SvmError> {
        let remaining = self.cfg.t_end - self.state.t;
        let (next, entry) = self.stepper.advance(&self.state, Some(remaining))?;
        self.state = next;
        Ok(entry)
    }

    pub fn finished(&self) -> bool {
        self.state.t >= self.cfg.t_end * (1.0 - 1e-14)
    }

    /// Steps to `t_end`, calling `observe` after each step.
    pub fn run_with<F>(&mut self, mut observe: F) -> Result<Summary, RunError>
    where
        F: FnMut(&FieldState, &LedgerEntry) -> Result<(), RunError>,
    {
        let e0 = total_energy(&self.state, &self.grid, &self.cfg.params)?;
        let mut summary = Summary::start(&self.state, &self.grid, e0)?;
        while !self.finished() {
            if self.state.step >= self.cfg.max_steps {
                return Err(RunError::StepLimit(self.cfg.max_steps));
            }
            let entry = self.step()?;
            summary.observe(&self.state, &self.grid, &entry)?;
            observe(&self.state, &entry)?;
        }
        Ok(summary)
    }
}

fn snapshot_files(dir: &Path, fs: &FieldState, grid: &Grid2D, cfg: &SimConfig) -> Result<(), RunError> {
    let p = &cfg.params;
    let stem = format!("snapshot_{:06}", fs.step);
    write_snapshot(&dir.join(format!("{stem}.csv")), fs, grid, p)?;
    if cfg.output.vtk {
        let rows = snapshot_rows(fs, grid, p)?;
        let mut w = BufWriter::new(File::create(dir.join(format!("{stem}.vtk")))?);
        write_vtk(&mut w, grid, &rows)?;
        w.flush()?;
    }
    for s in &cfg.output.slices {
        let name = match s.axis {
            Axis::X => format!("slice_x{}_{:06}.csv", s.at, fs.step),
            Axis::Y => format!("slice_y{}_{:06}.csv", s.at, fs.step),
        };
        let rec = extract_slice(fs, grid, p, s.axis, s.at)?;
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        write_slice_csv(&mut w, &rec)?;
        w.flush()?;
    }
    Ok(())
}

/// Runs `cfg` to completion. With an output directory, writes
/// `snapshot_NNNNNN.csv` (and `.vtk`, slices) at the configured cadence,
/// the final state, and `energy.csv`. On failure the energy series and the
/// last good state (`snapshot_failed.csv`) are still written.
pub fn run_simulation(cfg: &SimConfig) -> Result<Summary, RunError> {
    let mut sim = Simulation::new(cfg.clone())?;
    let Some(dir) = cfg.output.dir.clone() else {
        return sim.run_with(|_, _| Ok(()));
    };
    std::fs::create_dir_all(&dir)?;
    let mut energy = EnergyWriter::new(BufWriter::new(File::create(dir.join("energy.csv"))?))?;
    energy.initial(total_energy(&sim.state, &sim.grid, &cfg.params)?)?;
    let grid = sim.grid.clone();
    snapshot_files(&dir, &sim.state, &grid, cfg)?;

    let every = cfg.output.snap_every;
    let result = sim.run_with(|fs, e| {
        energy.record(e)?;
        if every > 0 && fs.step % every == 0 {
            snapshot_files(&dir, fs, &grid, cfg)?;
        }
        Ok(())
    });
    energy.flush()?;
    match result {
        Ok(summary) => {
            if every == 0 || sim.state.step % every != 0 {
                snapshot_files(&dir, &sim.state, &grid, cfg)?;
            }
            Ok(summary)
        }
        Err(e) => {
            let path: PathBuf = dir.join("snapshot_failed.csv");
            let _ = write_snapshot(&path, &sim.state, &grid, &cfg.params);
            Err(e)
        }
    }
}
