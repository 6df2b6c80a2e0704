//! The four built-in test cases.

use crate::config::{Case, CustomInit, OutputSpec, SimConfig};
use crate::error::{Result, SvmError};
use crate::fv2d::{Boundary, FieldState, Grid2D};
use crate::linalg::{Mat2, Vec2};
use crate::model::{CellState, PhysicalParams};
use std::f64::consts::FRAC_PI_4;

pub const DOMAIN: f64 = 8.0;
pub const RESOLUTION: usize = 128;

/// Ghost state on the moving wall of case 4.
pub fn lid_state() -> CellState {
    CellState::at_equilibrium(1.0, [0.0, 1.0], Mat2::new(1.0, 0.0, 1.0, 1.0))
        .expect("lid deformation is invertible")
}

pub fn defaults(id: u8) -> Result<SimConfig> {
    let t_end = match id {
        1..=3 => 0.2,
        4 => 10.0,
        _ => {
            return Err(SvmError::InvalidParam {
                name: "case",
                reason: format!("unknown preset {id}, expected 1..=4"),
            })
        }
    };
    Ok(SimConfig {
        case: Case::Preset(id),
        params: PhysicalParams::new(10.0, 1.0, 0.1),
        nx: RESOLUTION,
        ny: RESOLUTION,
        origin: [0.0, 0.0],
        extent: [DOMAIN, DOMAIN],
        t_end,
        cfl: 0.5,
        project_every: 1,
        max_steps: 1_000_000,
        output: OutputSpec::default(),
    })
}

/// West, east, south, north.
pub fn boundaries(case: &Case) -> [Boundary; 4] {
    match case {
        Case::Preset(4) => {
            let rest = Boundary::Fixed(CellState::identity());
            [Boundary::Fixed(lid_state()), rest, rest, rest]
        }
        Case::Custom(c) => [c.boundary; 4],
        _ => [Boundary::Copy; 4],
    }
}

fn column(h: f64, f: Mat2) -> CellState {
    CellState::at_equilibrium(h, [0.0, 0.0], f).expect("preset deformation is invertible")
}

fn stretched(h: f64) -> Mat2 {
    Mat2::diag(1.0 / h, 1.0)
}

/// Initial cell state at `x` for a case on the domain `origin + [0, extent]`.
pub fn initial_cell(case: &Case, x: Vec2, origin: Vec2, extent: Vec2) -> CellState {
    let mid = [origin[0] + 0.5 * extent[0], origin[1] + 0.5 * extent[1]];
    match case {
        Case::Preset(1) => {
            let h = if x[0] < mid[0] { 3.0 } else { 1.0 };
            column(h, stretched(h))
        }
        Case::Preset(2) => {
            let h = if x[0] + x[1] < mid[0] + mid[1] { 3.0 } else { 1.0 };
            let r = Mat2::rotation(FRAC_PI_4);
            column(h, r * stretched(h) * r.transpose())
        }
        Case::Preset(3) => {
            let d = [x[0] - mid[0], x[1] - mid[1]];
            let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let h = if r < 1.0 { 3.0 } else { 1.0 };
            let er = if r > 0.0 { [d[0] / r, d[1] / r] } else { [1.0, 0.0] };
            let et = [-er[1], er[0]];
            column(h, Mat2::outer(er, er).scale(1.0 / h) + Mat2::outer(et, et))
        }
        Case::Custom(c) => {
            let h = if x[0] < c.x_split { c.h_left } else { c.h_right };
            column(h, stretched(h))
        }
        _ => CellState::identity(),
    }
}

pub fn build_grid(cfg: &SimConfig) -> Result<Grid2D> {
    Grid2D::new(cfg.nx, cfg.ny, cfg.origin, cfg.extent, boundaries(&cfg.case))
}

pub fn initial_field(cfg: &SimConfig, grid: &Grid2D) -> Result<FieldState> {
    FieldState::from_fn(grid, |x| initial_cell(&cfg.case, x, cfg.origin, cfg.extent))
}

pub fn preset_case(id: u8) -> Result<(SimConfig, FieldState)> {
    let cfg = defaults(id)?;
    let grid = build_grid(&cfg)?;
    let fs = initial_field(&cfg, &grid)?;
    Ok((cfg, fs))
}

impl Default for CustomInit {
    fn default() -> Self {
        Self {
            h_left: 2.0,
            h_right: 1.0,
            x_split: DOMAIN / 2.0,
            boundary: Boundary::Copy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_admissible, dissipation_rate, strain_from_state};
    use approx::assert_relative_eq;

    #[test]
    fn case1_left_cell() {
        let s = initial_cell(&Case::Preset(1), [1.0, 4.0], [0.0; 2], [8.0; 2]);
        assert_eq!(s.h, 3.0);
        assert_relative_eq!(s.f.m[0][0], 1.0 / 3.0);
        assert_relative_eq!(s.a.m[0][0], 9.0, max_relative = 1e-14);
        assert_relative_eq!(s.a.m[1][1], 1.0);
        assert_relative_eq!(s.acc, 1.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn lid_tuple() {
        let s = lid_state();
        assert_eq!((s.h, s.u), (1.0, [0.0, 1.0]));
        assert_eq!(s.f, Mat2::new(1.0, 0.0, 1.0, 1.0));
        assert!(dissipation_rate(&s, &PhysicalParams::default()).abs() < 1e-14);
    }

    #[test]
    fn case3_outer_cell_is_rotation() {
        let s = initial_cell(&Case::Preset(3), [6.0, 5.0], [0.0; 2], [8.0; 2]);
        assert_eq!(s.h, 1.0);
        assert_relative_eq!(s.f.det(), 1.0, epsilon = 1e-14);
        let ftf = s.f.transpose() * s.f;
        assert!((ftf - Mat2::identity()).max_abs() < 1e-14);
        let inner = initial_cell(&Case::Preset(3), [4.3, 4.2], [0.0; 2], [8.0; 2]);
        assert_relative_eq!(inner.h * inner.f.det(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn case2_is_rotated_case1() {
        let s = initial_cell(&Case::Preset(2), [1.0, 2.0], [0.0; 2], [8.0; 2]);
        assert_eq!(s.h, 3.0);
        let b = strain_from_state(&s);
        assert!((b.b - Mat2::identity()).max_abs() < 1e-13);
        assert_relative_eq!(s.f.m[0][1], s.f.m[1][0]);
    }

    #[test]
    fn presets_admissible_at_equilibrium() {
        let p = PhysicalParams::default();
        for id in 1..=4 {
            let cfg = defaults(id).unwrap().with_resolution(16, 16);
            let grid = build_grid(&cfg).unwrap();
            let fs = initial_field(&cfg, &grid).unwrap();
            for s in fs.primitives(&grid).unwrap() {
                assert!(check_admissible(&s, 1e-12).is_admissible());
                assert!(dissipation_rate(&s, &p).abs() < 1e-12);
            }
        }
        assert!(defaults(5).is_err());
    }
}
