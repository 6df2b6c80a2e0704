use super::{FieldState, Grid2D};
use crate::error::Result;
use crate::model::{free_energy, CellState, PhysicalParams};

/// Energy bookkeeping of one step, all terms integrated over the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerEntry {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub e_before: f64,
    pub e_total: f64,
    /// Net energy leaving through the boundary during the step.
    pub boundary_flux: f64,
    pub dissipation: f64,
    pub friction: f64,
    /// `e_total - e_before + boundary_flux + dissipation + friction`, expected `<= 0`.
    pub residual: f64,
    pub boundary_mass_flux: f64,
}

#[derive(Clone, Debug, Default)]
pub struct EnergyLedger {
    pub entries: Vec<LedgerEntry>,
}

impl EnergyLedger {
    pub fn push(&mut self, e: LedgerEntry) {
        self.entries.push(e);
    }

    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.residual)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sum of per-step residuals, i.e. the budget defect since the start.
    pub fn cumulative_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).sum()
    }
}

pub(crate) fn energy_of_cells(prims: &[CellState], grid: &Grid2D, p: &PhysicalParams) -> f64 {
    prims.iter().map(|s| s.h * free_energy(s, p)).sum::<f64>() * grid.cell_area()
}

/// `∫ H E dx` over the grid.
pub fn total_energy(fs: &FieldState, grid: &Grid2D, p: &PhysicalParams) -> Result<f64> {
    Ok(energy_of_cells(&fs.primitives(grid)?, grid, p))
}

/// Budget defect between two snapshots given the accumulated boundary and
/// dissipation terms.
pub fn energy_budget(e_start: f64, e_end: f64, boundary: f64, dissipated: f64) -> f64 {
    e_end - e_start + boundary + dissipated
}
