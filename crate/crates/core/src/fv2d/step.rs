use super::ledger::{energy_of_cells, LedgerEntry};
use super::{reflect, Boundary, FieldState, Grid2D, Side};
use crate::error::{Result, SvmError};
use crate::euler::{numerical_flux, upwind_a_flux, NumericalFlux, NFAN};
use crate::exec::{map_indexed, try_map_indexed, Exec};
use crate::linalg::dot;
use crate::model::{
    conserved_to_primitive, dissipation_rate, idx, primitive_to_conserved_unchecked,
    relaxation_targets, CellState, Conserved, PhysicalParams, DET_F_MIN, NCONS,
};

/// Ghost states, one per boundary face.
#[derive(Clone, Debug, PartialEq)]
pub struct GhostLayer {
    /// Indexed by `j`.
    pub west: Vec<CellState>,
    pub east: Vec<CellState>,
    /// Indexed by `i`.
    pub south: Vec<CellState>,
    pub north: Vec<CellState>,
}

fn ghost(bc: &Boundary, inner: &CellState, side: Side) -> CellState {
    match bc {
        Boundary::Copy => *inner,
        Boundary::Reflective => reflect(inner, side.normal()),
        Boundary::Fixed(s) => *s,
    }
}

fn ghosts_from(prims: &[CellState], grid: &Grid2D) -> GhostLayer {
    let (nx, ny) = (grid.nx, grid.ny);
    let at = |i, j| &prims[grid.index(i, j)];
    GhostLayer {
        west: (0..ny)
            .map(|j| ghost(grid.boundary(Side::West), at(0, j), Side::West))
            .collect(),
        east: (0..ny)
            .map(|j| ghost(grid.boundary(Side::East), at(nx - 1, j), Side::East))
            .collect(),
        south: (0..nx)
            .map(|i| ghost(grid.boundary(Side::South), at(i, 0), Side::South))
            .collect(),
        north: (0..nx)
            .map(|i| ghost(grid.boundary(Side::North), at(i, ny - 1), Side::North))
            .collect(),
    }
}

pub fn apply_boundaries(fs: &FieldState, grid: &Grid2D) -> Result<GhostLayer> {
    Ok(ghosts_from(&fs.primitives(grid)?, grid))
}

/// Interface fluxes of one state. `x[j * (nx + 1) + i]` sits between cells
/// `i - 1` and `i`; `y[j * nx + i]` between rows `j - 1` and `j`. The
/// distortion components already hold the upwinded transport flux.
#[derive(Clone, Debug)]
pub struct FaceFluxes {
    pub x: Vec<NumericalFlux>,
    pub y: Vec<NumericalFlux>,
}

fn face_states<'a>(
    prims: &'a [CellState],
    ghosts: &'a GhostLayer,
    grid: &Grid2D,
    dir: char,
    k: usize,
) -> (&'a CellState, &'a CellState, usize, usize) {
    let (nx, ny) = (grid.nx, grid.ny);
    if dir == 'x' {
        let (i, j) = (k % (nx + 1), k / (nx + 1));
        let l = if i == 0 { &ghosts.west[j] } else { &prims[grid.index(i - 1, j)] };
        let r = if i == nx { &ghosts.east[j] } else { &prims[grid.index(i, j)] };
        (l, r, i, j)
    } else {
        let (i, j) = (k % nx, k / nx);
        let l = if j == 0 { &ghosts.south[i] } else { &prims[grid.index(i, j - 1)] };
        let r = if j == ny { &ghosts.north[i] } else { &prims[grid.index(i, j)] };
        (l, r, i, j)
    }
}

pub fn compute_fluxes(
    prims: &[CellState],
    ghosts: &GhostLayer,
    grid: &Grid2D,
    p: &PhysicalParams,
    exec: Exec,
) -> Result<FaceFluxes> {
    let one = |dir: char, n: [f64; 2], k: usize| -> Result<NumericalFlux> {
        let (l, r, i, j) = face_states(prims, ghosts, grid, dir, k);
        let mut nf = numerical_flux(l, r, n, p).map_err(|e| SvmError::Interface {
            i,
            j,
            dir,
            source: Box::new(e),
        })?;
        let a = upwind_a_flux(l, r, nf.mass_flux);
        nf.flux[idx::HAAA] = a[0];
        nf.flux[idx::HAAB] = a[1];
        nf.flux[idx::HABB] = a[2];
        nf.flux[idx::HACC] = a[3];
        Ok(nf)
    };
    let x = try_map_indexed(exec, (grid.nx + 1) * grid.ny, |k| one('x', [1.0, 0.0], k))?;
    let y = try_map_indexed(exec, grid.nx * (grid.ny + 1), |k| one('y', [0.0, 1.0], k))?;
    Ok(FaceFluxes { x, y })
}

fn cell_faces(grid: &Grid2D, i: usize, j: usize) -> [usize; 4] {
    [
        j * (grid.nx + 1) + i,
        j * (grid.nx + 1) + i + 1,
        j * grid.nx + i,
        (j + 1) * grid.nx + i,
    ]
}

/// Largest stable step: `τ s_i (1/dx + 1/dy) <= cfl` for every cell, with
/// `s_i` the fastest fan speed over the cell's faces.
pub fn timestep_from_fluxes(fluxes: &FaceFluxes, grid: &Grid2D, cfl: f64) -> Result<f64> {
    let inv = 1.0 / grid.dx + 1.0 / grid.dy;
    let mut worst = 0.0f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let [w, e, s, n] = cell_faces(grid, i, j);
            let si = fluxes.x[w]
                .max_speed
                .max(fluxes.x[e].max_speed)
                .max(fluxes.y[s].max_speed)
                .max(fluxes.y[n].max_speed);
            if !si.is_finite() {
                return Err(SvmError::NonFiniteSpeed);
            }
            worst = worst.max(si * inv);
        }
    }
    if worst <= 0.0 {
        return Err(SvmError::NonFiniteSpeed);
    }
    Ok(cfl / worst)
}

pub fn compute_timestep(
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
    cfl: f64,
) -> Result<f64> {
    let prims = fs.primitives(grid)?;
    let ghosts = ghosts_from(&prims, grid);
    let fluxes = compute_fluxes(&prims, &ghosts, grid, p, Exec::default())?;
    timestep_from_fluxes(&fluxes, grid, cfl)
}

fn flux_divergence(fluxes: &FaceFluxes, grid: &Grid2D, i: usize, j: usize, range: std::ops::Range<usize>) -> [f64; NCONS] {
    let [w, e, s, n] = cell_faces(grid, i, j);
    let mut out = [0.0; NCONS];
    for k in range {
        out[k] = (fluxes.x[e].flux[k] - fluxes.x[w].flux[k]) / grid.dx
            + (fluxes.y[n].flux[k] - fluxes.y[s].flux[k]) / grid.dy;
    }
    out
}

/// Conservative update of `H`, `HU`, `HF` from the face fluxes.
fn conservative_update(q: &[Conserved], fluxes: &FaceFluxes, grid: &Grid2D, tau: f64, exec: Exec) -> Vec<Conserved> {
    map_indexed(exec, grid.ncells(), |c| {
        let (i, j) = (c % grid.nx, c / grid.nx);
        let div = flux_divergence(fluxes, grid, i, j, 0..NFAN);
        let mut out = q[c];
        for k in 0..NFAN {
            out[k] -= tau * div[k];
        }
        out
    })
}

/// Upwind transport of `H A` and `H A_cc` with the face mass fluxes.
pub fn upwind_transport_a(
    q: &mut [Conserved],
    q_old: &[Conserved],
    fluxes: &FaceFluxes,
    grid: &Grid2D,
    tau: f64,
) {
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.index(i, j);
            let div = flux_divergence(fluxes, grid, i, j, NFAN..NCONS);
            for k in NFAN..NCONS {
                q[c][k] = q_old[c][k] - tau * div[k];
            }
        }
    }
}

fn wrap_cell(grid: &Grid2D, c: usize) -> impl Fn(SvmError) -> SvmError + '_ {
    move |e| SvmError::Cell {
        i: c % grid.nx,
        j: c / grid.nx,
        source: Box::new(e),
    }
}

/// Transport step: fluxes, conservative update and upwinded distortion.
pub fn hyperbolic_step(
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
    tau: f64,
) -> Result<FieldState> {
    let prims = fs.primitives(grid)?;
    let ghosts = ghosts_from(&prims, grid);
    let fluxes = compute_fluxes(&prims, &ghosts, grid, p, Exec::default())?;
    let q = apply_fluxes(&fs.q, &fluxes, grid, tau, Exec::default());
    check_cells(&q, grid, Exec::default())?;
    Ok(FieldState {
        q,
        t: fs.t + tau,
        step: fs.step,
    })
}

fn apply_fluxes(q: &[Conserved], fluxes: &FaceFluxes, grid: &Grid2D, tau: f64, exec: Exec) -> Vec<Conserved> {
    let mut out = conservative_update(q, fluxes, grid, tau, exec);
    upwind_transport_a(&mut out, q, fluxes, grid, tau);
    out
}

fn check_cells(q: &[Conserved], grid: &Grid2D, exec: Exec) -> Result<Vec<CellState>> {
    try_map_indexed(exec, q.len(), |c| {
        conserved_to_primitive(&q[c]).map_err(wrap_cell(grid, c))
    })
}

/// Restores `H |det F| = 1` by rescaling the singular values of `F` at fixed
/// `H` and fixed elastic energy `tr(F A Fᵀ)` when possible.
pub fn project_cell(s: &CellState) -> Result<CellState> {
    let det = s.f.det();
    if !(det.abs() > DET_F_MIN) {
        return Err(SvmError::SingularDeformation { det });
    }
    if s.involution_drift() == 0.0 {
        return Ok(*s);
    }
    let svd = s.f.svd();
    let [s0, s1] = svd.s;
    let (v0, v1) = (svd.right(0), svd.right(1));
    let w0 = s.a.bilinear(v0, v0);
    let w1 = s.a.bilinear(v1, v1);
    let energy = w0 * s0 * s0 + w1 * s1 * s1;
    let h2 = s.h * s.h;
    let disc = energy * energy - 4.0 * w0 * w1 / h2;
    let x = if disc > 1e-13 * energy * energy {
        let sq = disc.sqrt();
        let cand = [(energy + sq) / (2.0 * w0), (energy - sq) / (2.0 * w0)];
        let cost = |x: f64| {
            let a = x.sqrt();
            let b = 1.0 / (s.h * a);
            w0 * (a - s0).powi(2) + w1 * (b - s1.abs()).powi(2)
        };
        if cost(cand[1]) < cost(cand[0]) {
            cand[1]
        } else {
            cand[0]
        }
    } else {
        (w1 / (w0 * h2)).sqrt()
    };
    let a0 = x.sqrt();
    let a1 = s1.signum() / (s.h * a0);
    Ok(CellState {
        f: svd.compose([a0, a1]),
        ..*s
    })
}

pub fn project_cells(fs: &FieldState, grid: &Grid2D) -> Result<FieldState> {
    project_with(fs, grid, Exec::default())
}

fn project_with(fs: &FieldState, grid: &Grid2D, exec: Exec) -> Result<FieldState> {
    let q = try_map_indexed(exec, fs.q.len(), |c| {
        let s = conserved_to_primitive(&fs.q[c]).map_err(wrap_cell(grid, c))?;
        let s = project_cell(&s).map_err(wrap_cell(grid, c))?;
        Ok(primitive_to_conserved_unchecked(&s))
    })?;
    Ok(FieldState { q, ..fs.clone() })
}

/// Backward-Euler relaxation of `A`, `A_cc` and friction on `U`, with the
/// targets frozen at the current `F`, `H`.
pub fn relax_cell(s: &CellState, p: &PhysicalParams, tau: f64) -> Result<CellState> {
    let r = if p.lambda.is_infinite() { 0.0 } else { tau / p.lambda };
    let (a_inf, acc_inf) = relaxation_targets(s)?;
    let (a, acc) = if r.is_infinite() {
        (a_inf, acc_inf)
    } else {
        let w = 1.0 / (1.0 + r);
        (
            (s.a + a_inf.scale(r)).scale(w).symmetrized(),
            (s.acc + r * acc_inf) * w,
        )
    };
    let fr = 1.0 / (1.0 + tau * p.k);
    Ok(CellState {
        u: [s.u[0] * fr, s.u[1] * fr],
        a,
        acc,
        ..*s
    })
}

pub fn relax_sources(fs: &FieldState, grid: &Grid2D, p: &PhysicalParams, tau: f64) -> Result<FieldState> {
    relax_with(fs, grid, p, tau, Exec::default())
}

fn relax_with(fs: &FieldState, grid: &Grid2D, p: &PhysicalParams, tau: f64, exec: Exec) -> Result<FieldState> {
    let q = try_map_indexed(exec, fs.q.len(), |c| {
        let s = conserved_to_primitive(&fs.q[c]).map_err(wrap_cell(grid, c))?;
        let s = relax_cell(&s, p, tau).map_err(wrap_cell(grid, c))?;
        Ok(primitive_to_conserved_unchecked(&s))
    })?;
    Ok(FieldState { q, ..fs.clone() })
}

/// Full-step driver with its execution settings.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub grid: Grid2D,
    pub params: PhysicalParams,
    pub cfl: f64,
    /// Project every `k` steps; `0` disables projection.
    pub project_every: usize,
    pub exec: Exec,
}

impl Stepper {
    pub fn new(grid: Grid2D, params: PhysicalParams, cfl: f64) -> Self {
        Self {
            grid,
            params,
            cfl,
            project_every: 1,
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// One step; `max_dt` caps the CFL step, e.g. to land on an output time.
    pub fn advance(&self, fs: &FieldState, max_dt: Option<f64>) -> Result<(FieldState, LedgerEntry)> {
        let wrap = |e: SvmError| SvmError::Step {
            step: fs.step,
            t: fs.t,
            source: Box::new(e),
        };
        self.advance_inner(fs, max_dt).map_err(wrap)
    }

    fn advance_inner(&self, fs: &FieldState, max_dt: Option<f64>) -> Result<(FieldState, LedgerEntry)> {
        let (grid, p, exec) = (&self.grid, &self.params, self.exec);
        let prims = check_cells(&fs.q, grid, exec)?;
        let e_before = energy_of_cells(&prims, grid, p);
        let ghosts = ghosts_from(&prims, grid);
        let fluxes = compute_fluxes(&prims, &ghosts, grid, p, exec)?;
        let mut tau = timestep_from_fluxes(&fluxes, grid, self.cfl)?;
        if let Some(m) = max_dt {
            tau = tau.min(m);
        }

        let q = apply_fluxes(&fs.q, &fluxes, grid, tau, exec);
        check_cells(&q, grid, exec)?;
        let mut next = FieldState {
            q,
            t: fs.t + tau,
            step: fs.step + 1,
        };
        if self.project_every > 0 && next.step.is_multiple_of(self.project_every) {
            next = project_with(&next, grid, exec)?;
        }
        next = relax_with(&next, grid, p, tau, exec)?;

        let prims = check_cells(&next.q, grid, exec)?;
        let e_after = energy_of_cells(&prims, grid, p);
        let boundary_flux = tau * boundary_energy_flux(&fluxes, grid);
        let area = grid.cell_area();
        let mut dissipation = 0.0;
        let mut friction = 0.0;
        for s in &prims {
            dissipation += area * s.h * dissipation_rate(s, p);
            friction += area * s.h * p.k * dot(s.u, s.u);
        }
        let (dissipation, friction) = (tau * dissipation, tau * friction);
        let entry = LedgerEntry {
            step: next.step,
            t: next.t,
            dt: tau,
            e_before,
            e_total: e_after,
            boundary_flux,
            dissipation,
            friction,
            residual: e_after - e_before + boundary_flux + dissipation + friction,
            boundary_mass_flux: tau * boundary_component_flux(&fluxes, grid, idx::H),
        };
        Ok((next, entry))
    }
}

/// Net outward flux of component `k` through the domain boundary, per unit time.
fn boundary_component_flux(fluxes: &FaceFluxes, grid: &Grid2D, k: usize) -> f64 {
    boundary_sum(fluxes, grid, |nf| nf.flux[k])
}

fn boundary_energy_flux(fluxes: &FaceFluxes, grid: &Grid2D) -> f64 {
    boundary_sum(fluxes, grid, |nf| nf.entropy_flux)
}

fn boundary_sum(fluxes: &FaceFluxes, grid: &Grid2D, f: impl Fn(&NumericalFlux) -> f64) -> f64 {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = 0.0;
    for j in 0..ny {
        out -= grid.dy * f(&fluxes.x[j * (nx + 1)]);
        out += grid.dy * f(&fluxes.x[j * (nx + 1) + nx]);
    }
    for i in 0..nx {
        out -= grid.dx * f(&fluxes.y[i]);
        out += grid.dx * f(&fluxes.y[ny * nx + i]);
    }
    out
}

/// One step with default execution settings.
pub fn advance(
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
    cfl: f64,
) -> Result<(FieldState, LedgerEntry)> {
    Stepper::new(grid.clone(), *p, cfl).advance(fs, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat2;
    use approx::assert_relative_eq;

    fn p() -> PhysicalParams {
        PhysicalParams::new(10.0, 1.0, 0.1)
    }

    #[test]
    fn projection_example() {
        let s = CellState {
            f: Mat2::diag(2.0, 1.0),
            ..CellState::identity()
        };
        let out = project_cell(&s).unwrap();
        let svd = out.f.svd();
        assert_relative_eq!(svd.s[0], ((5.0 + 21f64.sqrt()) / 2.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(svd.s[0], 2.1889, epsilon = 1e-4);
        assert_relative_eq!(svd.s[1], 0.4569, epsilon = 1e-4);
        assert!(out.involution_drift() < 1e-14);
        let e0 = s.f.congruence(&s.a).trace();
        let e1 = out.f.congruence(&out.a).trace();
        assert_relative_eq!(e0, e1, max_relative = 1e-14);
    }

    #[test]
    fn projection_keeps_admissible_cell() {
        let s = CellState::identity();
        assert_eq!(project_cell(&s).unwrap(), s);
    }

    #[test]
    fn relaxation_examples() {
        let s = CellState {
            acc: 2.0,
            ..CellState::identity()
        };
        let out = relax_cell(&s, &p(), p().lambda).unwrap();
        assert_relative_eq!(out.acc, 1.5, epsilon = 1e-15);

        let frozen = PhysicalParams {
            lambda: f64::INFINITY,
            ..p()
        };
        assert_eq!(relax_cell(&s, &frozen, 1.0).unwrap(), s);

        let fast = PhysicalParams {
            lambda: 1e-300,
            ..p()
        };
        let out = relax_cell(&s, &fast, 1.0).unwrap();
        assert!((out.acc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_rest_is_fixed_point() {
        let grid = Grid2D::uniform(4, 3, [0.0, 0.0], [1.0, 1.0], Boundary::Reflective).unwrap();
        let fs = FieldState::uniform(&grid, &CellState::identity()).unwrap();
        let (next, entry) = advance(&fs, &grid, &p(), 0.5).unwrap();
        assert_eq!(next.q, fs.q);
        assert_eq!(entry.residual, 0.0);
    }
}
