//! Structured-grid finite-volume stepper.

mod ledger;
mod step;

pub use ledger::{energy_budget, total_energy, EnergyLedger, LedgerEntry};
pub use step::{
    advance, apply_boundaries, compute_fluxes, compute_timestep, hyperbolic_step, project_cell,
    project_cells, relax_cell, relax_sources, timestep_from_fluxes, upwind_transport_a,
    FaceFluxes, GhostLayer, Stepper,
};

use crate::error::{Result, SvmError};
use crate::linalg::{Mat2, Vec2};
use crate::model::{
    conserved_to_primitive, primitive_to_conserved, CellState, Conserved,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    /// Zero-gradient outflow.
    Copy,
    /// Mirror across the wall, applied to spatial and material indices.
    Reflective,
    /// Prescribed ghost state.
    Fixed(CellState),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::West, Side::East, Side::South, Side::North];

    /// Outward unit normal.
    pub fn normal(self) -> Vec2 {
        match self {
            Side::West => [-1.0, 0.0],
            Side::East => [1.0, 0.0],
            Side::South => [0.0, -1.0],
            Side::North => [0.0, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    /// West, east, south, north.
    pub bc: [Boundary; 4],
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, origin: Vec2, extent: Vec2, bc: [Boundary; 4]) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(SvmError::InvalidParam {
                name: "grid",
                reason: format!("need at least 2x2 cells, got {nx}x{ny}"),
            });
        }
        if !(extent[0] > 0.0 && extent[1] > 0.0) {
            return Err(SvmError::InvalidParam {
                name: "grid",
                reason: "domain extents must be positive".into(),
            });
        }
        Ok(Self {
            nx,
            ny,
            x0: origin[0],
            y0: origin[1],
            dx: extent[0] / nx as f64,
            dy: extent[1] / ny as f64,
            bc,
        })
    }

    /// Uniform boundary condition on all sides.
    pub fn uniform(nx: usize, ny: usize, origin: Vec2, extent: Vec2, bc: Boundary) -> Result<Self> {
        Self::new(nx, ny, origin, extent, [bc; 4])
    }

    pub fn ncells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        [
            self.x0 + (i as f64 + 0.5) * self.dx,
            self.y0 + (j as f64 + 0.5) * self.dy,
        ]
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn extent(&self) -> Vec2 {
        [self.nx as f64 * self.dx, self.ny as f64 * self.dy]
    }

    pub fn boundary(&self, side: Side) -> &Boundary {
        &self.bc[side as usize]
    }

    pub fn with_resolution(&self, nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, [self.x0, self.y0], self.extent(), self.bc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    /// Row-major, `j * nx + i`.
    pub q: Vec<Conserved>,
    pub t: f64,
    pub step: usize,
}

impl FieldState {
    pub fn from_fn<F>(grid: &Grid2D, mut init: F) -> Result<Self>
    where
        F: FnMut(Vec2) -> CellState,
    {
        let mut q = Vec::with_capacity(grid.ncells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let s = init(grid.center(i, j));
                let c = primitive_to_conserved(&s).map_err(|e| SvmError::Cell {
                    i,
                    j,
                    source: Box::new(e),
                })?;
                q.push(c);
            }
        }
        Ok(Self { q, t: 0.0, step: 0 })
    }

    pub fn uniform(grid: &Grid2D, s: &CellState) -> Result<Self> {
        Self::from_fn(grid, |_| *s)
    }

    pub fn primitive(&self, grid: &Grid2D, i: usize, j: usize) -> Result<CellState> {
        conserved_to_primitive(&self.q[grid.index(i, j)]).map_err(|e| SvmError::Cell {
            i,
            j,
            source: Box::new(e),
        })
    }

    pub fn primitives(&self, grid: &Grid2D) -> Result<Vec<CellState>> {
        let mut out = Vec::with_capacity(self.q.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                out.push(self.primitive(grid, i, j)?);
            }
        }
        Ok(out)
    }

    pub fn total_mass(&self, grid: &Grid2D) -> f64 {
        self.q.iter().map(|c| c[0]).sum::<f64>() * grid.cell_area()
    }
}

/// Mirror `s` across a wall with normal `n`.
pub fn reflect(s: &CellState, n: Vec2) -> CellState {
    let m = Mat2::identity() - Mat2::outer(n, n).scale(2.0);
    CellState {
        h: s.h,
        u: m.mul_vec(s.u),
        f: m * s.f * m,
        a: (m * s.a * m).symmetrized(),
        acc: s.acc,
    }
}
