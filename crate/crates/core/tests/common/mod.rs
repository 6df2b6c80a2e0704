#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svm_core::model::CellState;
use svm_core::{Mat2, PhysicalParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params() -> PhysicalParams {
    PhysicalParams::new(10.0, 1.0, 0.1)
}

/// Random SPD matrix with eigenvalues in `[lo, hi]`.
pub fn spd(r: &mut impl Rng, lo: f64, hi: f64) -> Mat2 {
    let th: f64 = r.gen_range(0.0..std::f64::consts::PI);
    let q = Mat2::rotation(th);
    let d = Mat2::diag(r.gen_range(lo..hi), r.gen_range(lo..hi));
    (q * d * q.transpose()).symmetrized()
}

/// Deformation gradient with singular values in `[lo, hi]` and random orientation.
pub fn deformation(r: &mut impl Rng, lo: f64, hi: f64) -> Mat2 {
    let u = Mat2::rotation(r.gen_range(-3.1..3.1));
    let v = Mat2::rotation(r.gen_range(-3.1..3.1));
    u * Mat2::diag(r.gen_range(lo..hi), r.gen_range(lo..hi)) * v.transpose()
}

/// Admissible state with `H |det F| = 1` and `A`, `A_cc` off equilibrium.
pub fn state(r: &mut impl Rng) -> CellState {
    let f = deformation(r, 0.5, 2.0);
    CellState {
        h: 1.0 / f.det().abs(),
        u: [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)],
        f,
        a: spd(r, 0.3, 3.0),
        acc: r.gen_range(0.2..3.0),
    }
}

/// Admissible state with `A = F⁻¹F⁻ᵀ`, `A_cc = H⁻²`.
pub fn equilibrium_state(r: &mut impl Rng) -> CellState {
    let f = deformation(r, 0.5, 2.0);
    CellState::at_equilibrium(
        1.0 / f.det().abs(),
        [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)],
        f,
    )
    .unwrap()
}

pub fn unit(r: &mut impl Rng) -> [f64; 2] {
    let th: f64 = r.gen_range(-3.2..3.2);
    [th.cos(), th.sin()]
}

/// Spatial rotation: `U → RU`, `F → RF`; material tensors are untouched.
pub fn rotate_state(s: &CellState, rot: &Mat2) -> CellState {
    CellState {
        u: rot.mul_vec(s.u),
        f: *rot * s.f,
        ..*s
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
