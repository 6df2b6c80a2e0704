//! Eigenstructure of the one-dimensional projection and hyperbolicity checks.

use crate::linalg::{dot, perp, Vec2};
use crate::model::{strain_from_state, CellState, PhysicalParams};

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    /// Ascending. Entries are NaN when the pair is complex.
    pub eigenvalues: [f64; 7],
    /// Distinct values with their multiplicity.
    pub multiplicities: Vec<(f64, usize)>,
    pub hyperbolic: bool,
    pub margin: f64,
}

/// Strain components `(B_nn, B_nt, B_tt)` in the frame `(n, n⊥)`.
pub fn strain_in_frame(s: &CellState, n: Vec2) -> (f64, f64, f64) {
    let b = strain_from_state(s).b;
    let t = perp(n);
    (b.bilinear(n, n), b.bilinear(n, t), b.bilinear(t, t))
}

fn margin_from(bxx: f64, bxy: f64, byy: f64, bzz: f64, h: f64, p: &PhysicalParams) -> f64 {
    let z = p.zeta;
    let g = p.big_g;
    let delta = 2.0 * p.g * h + g * (2.0 * (3.0 - 2.0 * z) * bzz + z * byy - 3.0 * z * bxx);
    let k = 4.0 * bxx - 2.0 * z * (bxx + byy);
    let lhs = g * g * (4.0 * z * bxy).powi(2);
    2.0 * g * delta * k + g * g * k * k - lhs
}

/// Realness margin of the one-dimensional projection along `e_x`.
pub fn gs_hyperbolicity_margin(s: &CellState, p: &PhysicalParams) -> f64 {
    gs_hyperbolicity_margin_along(s, [1.0, 0.0], p)
}

pub fn gs_hyperbolicity_margin_along(s: &CellState, n: Vec2, p: &PhysicalParams) -> f64 {
    let (bnn, bnt, btt) = strain_in_frame(s, n);
    let bzz = strain_from_state(s).bzz;
    margin_from(bnn, bnt, btt, bzz, s.h, p)
}

pub fn svucm_eigenvalues_1d(s: &CellState, n: Vec2, p: &PhysicalParams) -> EigenReport {
    let (bnn, bnt, btt) = strain_in_frame(s, n);
    let bzz = strain_from_state(s).bzz;
    let u = dot(s.u, n);
    let g = p.big_g;
    let z = p.zeta;
    let margin = margin_from(bnn, bnt, btt, bzz, s.h, p);

    let (fast, slow) = if z == 0.0 {
        let fast = (p.g * s.h + 3.0 * g * bzz + g * bnn).sqrt();
        let slow = (g * bnn).sqrt();
        (fast, slow)
    } else {
        let delta = 2.0 * p.g * s.h + g * (2.0 * (3.0 - 2.0 * z) * bzz + z * btt - 3.0 * z * bnn);
        let k = 4.0 * bnn - 2.0 * z * (bnn + btt);
        let root = (delta * delta + (g * 4.0 * z * bnt).powi(2)).sqrt();
        let hi = delta + g * k + root;
        let lo = delta + g * k - root;
        let sq = |x: f64| if x >= 0.0 { 0.5 * x.sqrt() } else { f64::NAN };
        (sq(hi), sq(lo))
    };

    let mut ev = [
        u - fast,
        u - slow,
        u,
        u,
        u,
        u + slow,
        u + fast,
    ];
    let hyperbolic = ev.iter().all(|x| x.is_finite()) && margin >= 0.0;
    if hyperbolic {
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    EigenReport {
        eigenvalues: ev,
        multiplicities: group(&ev),
        hyperbolic,
        margin,
    }
}

fn group(ev: &[f64; 7]) -> Vec<(f64, usize)> {
    let scale = ev
        .iter()
        .filter(|x| x.is_finite())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &x in ev.iter().filter(|x| x.is_finite()) {
        match out.last_mut() {
            Some((v, m)) if (x - *v).abs() <= 1e-12 * scale => *m += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Upper bound on `|eigenvalue|` along `n`, used to pre-size time steps.
pub fn characteristic_bound(s: &CellState, n: Vec2, p: &PhysicalParams) -> f64 {
    let (bnn, _, _) = strain_in_frame(s, n);
    let bzz = strain_from_state(s).bzz;
    dot(s.u, n).abs() + (p.g * s.h + 3.0 * p.big_g * bzz + p.big_g * bnn).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_eigenvalues() {
        let p = PhysicalParams::new(10.0, 1.0, 0.1);
        let r = svucm_eigenvalues_1d(&CellState::identity(), [1.0, 0.0], &p);
        let s14 = 14f64.sqrt();
        let want = [-s14, -1.0, 0.0, 0.0, 0.0, 1.0, s14];
        for (a, b) in r.eigenvalues.iter().zip(want) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
        assert!(r.hyperbolic);
        assert_eq!(r.multiplicities[2], (0.0, 3));
    }

    #[test]
    fn saint_venant_limit() {
        let p = PhysicalParams::new(10.0, 0.0, 0.1);
        let s = CellState {
            h: 2.0,
            u: [0.5, 0.0],
            ..CellState::identity()
        };
        let r = svucm_eigenvalues_1d(&s, [1.0, 0.0], &p);
        let c = 20f64.sqrt();
        assert_relative_eq!(r.eigenvalues[0], 0.5 - c);
        assert_relative_eq!(r.eigenvalues[6], 0.5 + c);
        assert_eq!(r.multiplicities, vec![(0.5 - c, 1), (0.5, 5), (0.5 + c, 1)]);
    }

    #[test]
    fn bound_examples() {
        let p = PhysicalParams::new(10.0, 1.0, 0.1);
        let b0 = characteristic_bound(&CellState::identity(), [1.0, 0.0], &p);
        assert_relative_eq!(b0, 14f64.sqrt());
        let s = CellState {
            u: [2.0, 0.0],
            ..CellState::identity()
        };
        assert_relative_eq!(characteristic_bound(&s, [1.0, 0.0], &p), b0 + 2.0);
    }

    #[test]
    fn zeta_zero_margin_nonnegative() {
        let p = PhysicalParams::new(10.0, 1.0, 0.1);
        let m = gs_hyperbolicity_margin(&CellState::identity(), &p);
        // Delta = 20 + 6 = 26, K = 4: 2*26*4 + 16.
        assert_relative_eq!(m, 224.0);
    }
}
