//! Fixed-size 2×2 linear algebra.
//!
//! `Mat2` is row-major: `m[i][j]` is row `i`, column `j`. For a deformation
//! gradient the row is the spatial index (x, y) and the column the material
//! index (a, b).

use std::ops::{Add, Mul, Neg, Sub};

pub type Vec2 = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const fn new(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn diag(d0: f64, d1: f64) -> Self {
        Self::new(d0, 0.0, 0.0, d1)
    }

    pub fn sym(aa: f64, ab: f64, bb: f64) -> Self {
        Self::new(aa, ab, ab, bb)
    }

    /// Counter-clockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// Matrix with columns `c0`, `c1`.
    pub fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Self::new(c0[0], c1[0], c0[1], c1[1])
    }

    pub fn outer(u: Vec2, v: Vec2) -> Self {
        Self::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    }

    pub fn col(&self, j: usize) -> Vec2 {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn row(&self, i: usize) -> Vec2 {
        self.m[i]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    /// Inverse, or `None` when `|det| <= floor`.
    pub fn inverse(&self, floor: f64) -> Option<Self> {
        let d = self.det();
        if !(d.abs() > floor) {
            return None;
        }
        Some(Self::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: Vec2, v: Vec2) -> f64 {
        dot(u, self.mul_vec(v))
    }

    /// `M D Mᵀ` for symmetric `D`.
    pub fn congruence(&self, d: &Mat2) -> Self {
        let r = *self * *d * self.transpose();
        r.symmetrized()
    }

    pub fn symmetrized(&self) -> Self {
        let off = 0.5 * (self.m[0][1] + self.m[1][0]);
        Self::new(self.m[0][0], off, off, self.m[1][1])
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn frob(&self, other: &Mat2) -> f64 {
        self.m[0][0] * other.m[0][0]
            + self.m[0][1] * other.m[0][1]
            + self.m[1][0] * other.m[1][0]
            + self.m[1][1] * other.m[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flat_map(|r| r.iter()).all(|x| x.is_finite())
    }

    /// Symmetric positive-definite test by leading minors.
    pub fn is_spd(&self) -> bool {
        self.m[0][0] > 0.0 && self.m[1][1] > 0.0 && self.det() > 0.0
    }

    /// Closed-form SVD `M = R(phi) diag(s0, s1) R(theta)`.
    ///
    /// `s0 >= |s1|`; `s1` carries the sign of `det M`.
    pub fn svd(&self) -> Svd2 {
        let [[a, b], [c, d]] = self.m;
        let e = 0.5 * (a + d);
        let f = 0.5 * (a - d);
        let g = 0.5 * (c + b);
        let h = 0.5 * (c - b);
        let q = e.hypot(h);
        let r = f.hypot(g);
        let a1 = g.atan2(f);
        let a2 = h.atan2(e);
        Svd2 {
            phi: 0.5 * (a2 + a1),
            theta: 0.5 * (a2 - a1),
            s: [q + r, q - r],
        }
    }
}

/// Result of [`Mat2::svd`].
#[derive(Clone, Copy, Debug)]
pub struct Svd2 {
    pub phi: f64,
    pub theta: f64,
    pub s: [f64; 2],
}

impl Svd2 {
    /// Right-singular vector `k` (material space): `M v_k = s_k u_k`.
    pub fn right(&self, k: usize) -> Vec2 {
        let (s, c) = self.theta.sin_cos();
        if k == 0 {
            [c, -s]
        } else {
            [s, c]
        }
    }

    /// Left-singular vector `k` (spatial space).
    pub fn left(&self, k: usize) -> Vec2 {
        let (s, c) = self.phi.sin_cos();
        if k == 0 {
            [c, s]
        } else {
            [-s, c]
        }
    }

    pub fn compose(&self, s: [f64; 2]) -> Mat2 {
        Mat2::rotation(self.phi) * Mat2::diag(s[0], s[1]) * Mat2::rotation(self.theta)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

pub fn dot(u: Vec2, v: Vec2) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

pub fn norm(u: Vec2) -> f64 {
    u[0].hypot(u[1])
}

/// Rotate by +π/2.
pub fn perp(u: Vec2) -> Vec2 {
    [-u[1], u[0]]
}

pub fn rotate(u: Vec2, theta: f64) -> Vec2 {
    Mat2::rotation(theta).mul_vec(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_reconstructs() {
        let cases = [
            Mat2::new(2.0, 0.0, 0.0, 1.0),
            Mat2::new(1.0, 1.0, 0.0, 1.0),
            Mat2::new(0.3, -1.2, 0.7, 0.4),
            Mat2::new(0.0, 1.0, -1.0, 0.0),
            Mat2::new(1.0, 2.0, 3.0, 4.0),
        ];
        for f in cases {
            let svd = f.svd();
            let back = svd.compose(svd.s);
            assert!((back - f).max_abs() < 1e-14, "{f:?} -> {back:?}");
            assert!(svd.s[0] >= svd.s[1].abs());
            assert!((svd.s[0] * svd.s[1] - f.det()).abs() < 1e-14);
            for k in 0..2 {
                let fv = f.mul_vec(svd.right(k));
                let su = svd.left(k).map(|x| x * svd.s[k]);
                assert!((fv[0] - su[0]).abs() < 1e-14 && (fv[1] - su[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_and_det() {
        let f = Mat2::new(2.0, 1.0, 0.5, 3.0);
        let inv = f.inverse(1e-12).unwrap();
        assert!(((f * inv) - Mat2::identity()).max_abs() < 1e-15);
        assert!(Mat2::zero().inverse(1e-12).is_none());
    }
}
