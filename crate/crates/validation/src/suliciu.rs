//! First-order Godunov scheme with the Suliciu relaxation solver for the
//! 1D shallow-water equations with a passive transverse velocity.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sw {
    pub h: f64,
    pub u: f64,
    pub v: f64,
}

impl Sw {
    fn p(&self, g: f64) -> f64 {
        0.5 * g * self.h * self.h
    }
}

/// Mass-flux speeds `c_l`, `c_r`.
pub fn speeds(l: &Sw, r: &Sw, g: f64) -> (f64, f64) {
    let cl0 = l.h * (g * l.h).sqrt();
    let cr0 = r.h * (g * r.h).sqrt();
    let du = (l.u - r.u).max(0.0);
    let (pl, pr) = (l.p(g), r.p(g));
    let cl = cl0 + 2.0 * l.h * (du + (pr - pl).max(0.0) / (cl0 + cr0));
    let cr = cr0 + 2.0 * r.h * (du + (pl - pr).max(0.0) / (cl0 + cr0));
    (cl, cr)
}

/// Godunov flux `(hu, hu² + π, huv)` of the relaxation fan at `x/t = 0`,
/// and the largest wave speed.
pub fn flux(l: &Sw, r: &Sw, g: f64) -> ([f64; 3], f64) {
    let (cl, cr) = speeds(l, r, g);
    let (pl, pr) = (l.p(g), r.p(g));
    let us = (cl * l.u + cr * r.u + pl - pr) / (cl + cr);
    let ps = (cr * pl + cl * pr + cl * cr * (l.u - r.u)) / (cl + cr);
    let hl = 1.0 / (1.0 / l.h + (us - l.u) / cl);
    let hr = 1.0 / (1.0 / r.h - (us - r.u) / cr);
    let (sl, sr) = (l.u - cl / l.h, r.u + cr / r.h);
    let (h, u, p, v) = if sl >= 0.0 {
        (l.h, l.u, pl, l.v)
    } else if us >= 0.0 {
        (hl, us, ps, l.v)
    } else if sr > 0.0 {
        (hr, us, ps, r.v)
    } else {
        (r.h, r.u, pr, r.v)
    };
    let m = h * u;
    ([m, m * u + p, m * v], sl.abs().max(sr.abs()))
}

/// Cells on a uniform line with zero-gradient ends.
#[derive(Clone, Debug)]
pub struct Line {
    pub g: f64,
    pub dx: f64,
    pub q: Vec<[f64; 3]>,
}

impl Line {
    pub fn new(g: f64, dx: f64, cells: &[Sw]) -> Self {
        let q = cells.iter().map(|s| [s.h, s.h * s.u, s.h * s.v]).collect();
        Self { g, dx, q }
    }

    pub fn cell(&self, i: usize) -> Sw {
        let [h, hu, hv] = self.q[i];
        Sw {
            h,
            u: hu / h,
            v: hv / h,
        }
    }

    /// One step of length `dt`; returns the largest wave speed seen.
    pub fn step(&mut self, dt: f64) -> f64 {
        let n = self.q.len();
        let mut fluxes = Vec::with_capacity(n + 1);
        let mut smax = 0.0f64;
        for k in 0..=n {
            let l = self.cell(k.saturating_sub(1));
            let r = self.cell(k.min(n - 1));
            let (f, s) = flux(&l, &r, self.g);
            smax = smax.max(s);
            fluxes.push(f);
        }
        for (i, q) in self.q.iter_mut().enumerate() {
            for c in 0..3 {
                q[c] -= dt / self.dx * (fluxes[i + 1][c] - fluxes[i][c]);
            }
        }
        smax
    }
}
