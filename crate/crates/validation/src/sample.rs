//! Seeded random admissible states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svm_core::{CellState, Mat2};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spd(r: &mut impl Rng, lo: f64, hi: f64) -> Mat2 {
    let q = Mat2::rotation(r.gen_range(0.0..std::f64::consts::PI));
    let d = Mat2::diag(r.gen_range(lo..hi), r.gen_range(lo..hi));
    (q * d * q.transpose()).symmetrized()
}

pub fn deformation(r: &mut impl Rng, lo: f64, hi: f64) -> Mat2 {
    let u = Mat2::rotation(r.gen_range(-3.1..3.1));
    let v = Mat2::rotation(r.gen_range(-3.1..3.1));
    u * Mat2::diag(r.gen_range(lo..hi), r.gen_range(lo..hi)) * v.transpose()
}

/// `H |det F| = 1`, `A` and `A_cc` off equilibrium.
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

pub fn unit(r: &mut impl Rng) -> [f64; 2] {
    let th: f64 = r.gen_range(-3.2..3.2);
    [th.cos(), th.sin()]
}
