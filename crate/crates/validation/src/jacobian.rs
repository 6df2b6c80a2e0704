//! Eigenvalues of the 1D upper-convected system from a finite-difference
//! Jacobian and a dense eigensolver.

use nalgebra::SMatrix;

type M7 = SMatrix<f64, 7, 7>;

/// Primitive variables `(H, U, V, Bxx, Byy, Bxy, Bzz)` along a direction.
pub type Prim1d = [f64; 7];

/// Spatial part of `∂t w + M(w) ∂x w = 0`, evaluated at `(w, w_x)`.
pub fn quasilinear(w: &Prim1d, wx: &Prim1d, g: f64, big_g: f64) -> Prim1d {
    let [h, u, _v, bxx, _byy, bxy, bzz] = *w;
    let [dh, du, dv, dbxx, dbyy, dbxy, dbzz] = *wx;
    [
        u * dh + h * du,
        u * du + g * dh - big_g * ((bxx - bzz) / h * dh + dbxx - dbzz),
        u * dv - big_g * (bxy / h * dh + dbxy),
        u * dbxx - 2.0 * bxx * du,
        u * dbyy - 2.0 * bxy * dv,
        u * dbxy - bxx * dv - bxy * du,
        u * dbzz + 2.0 * bzz * du,
    ]
}

/// `M(w)` by central differences in `w_x`.
pub fn fd_jacobian(w: &Prim1d, g: f64, big_g: f64, step: f64) -> M7 {
    let mut m = M7::zeros();
    for k in 0..7 {
        let mut plus = [0.0; 7];
        let mut minus = [0.0; 7];
        plus[k] = step;
        minus[k] = -step;
        let rp = quasilinear(w, &plus, g, big_g);
        let rm = quasilinear(w, &minus, g, big_g);
        for i in 0..7 {
            m[(i, k)] = (rp[i] - rm[i]) / (2.0 * step);
        }
    }
    m
}

/// Eigenvalues as `(re, im)` pairs sorted by real part; `None` if the Schur
/// iteration does not converge.
pub fn fd_eigenvalues(w: &Prim1d, g: f64, big_g: f64) -> Option<Vec<(f64, f64)>> {
    let m = fd_jacobian(w, g, big_g, 1e-3);
    // Shifted so the deflation test never compares against a zero diagonal.
    let (shift, schur) = [1.0, -0.7, 0.37].into_iter().find_map(|k| {
        let shift = k * m.norm();
        (m + M7::identity() * shift)
            .try_schur(4.0 * f64::EPSILON, 10_000)
            .map(|s| (shift, s))
    })?;
    let mut ev: Vec<_> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re - shift, z.im))
        .collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0));
    Some(ev)
}

/// Projects a cell onto the direction `n`: normal and tangential velocity,
/// strain `B = F A Fᵀ` in the `(n, t)` basis and `Bzz = H² A_cc`.
pub fn project_state(
    h: f64,
    u: [f64; 2],
    f: [[f64; 2]; 2],
    a: [[f64; 2]; 2],
    acc: f64,
    n: [f64; 2],
) -> Prim1d {
    let t = [-n[1], n[0]];
    let mut b = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    b[i][j] += f[i][k] * a[k][l] * f[j][l];
                }
            }
        }
    }
    let quad = |x: [f64; 2], y: [f64; 2]| {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += x[i] * b[i][j] * y[j];
            }
        }
        s
    };
    [
        h,
        u[0] * n[0] + u[1] * n[1],
        u[0] * t[0] + u[1] * t[1],
        quad(n, n),
        quad(t, t),
        quad(n, t),
        h * h * acc,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let w = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let ev = fd_eigenvalues(&w, 10.0, 1.0).unwrap();
        let want = [-14f64.sqrt(), -1.0, 0.0, 0.0, 0.0, 1.0, 14f64.sqrt()];
        for ((re, im), w) in ev.iter().zip(want) {
            assert!((re - w).abs() < 1e-6, "{re} vs {w}");
            assert!(im.abs() < 1e-6);
        }
    }

    #[test]
    fn saint_venant_speeds() {
        let w = [2.0, 0.5, 0.0, 1.0, 1.0, 0.0, 1.0];
        let ev = fd_eigenvalues(&w, 10.0, 0.0).unwrap();
        let c = 20f64.sqrt();
        assert!((ev[0].0 - (0.5 - c)).abs() < 1e-12);
        assert!((ev[6].0 - (0.5 + c)).abs() < 1e-12);
    }
}
