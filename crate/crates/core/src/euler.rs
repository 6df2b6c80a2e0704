//! Eulerian interface solver: material frame, face reconstruction of `F`,
//! the three-wave fan and the numerical flux.
//!
//! Local components are written `F^δ_α` with `δ ∈ {∥, ⊥}` the spatial basis
//! `(n, n⊥)` and `α ∈ {e, f}` the material basis. After reconstruction each
//! side is rescaled to the material basis `(λ e_e, e_f / λ)`, in which the
//! cofactor entry `E^m_e` equals one and the fan coincides with the
//! mass-coordinate solver of [`crate::lagrange`].

use crate::error::{Result, SvmError};
use crate::lagrange::{
    init_relaxation_speeds, solve_lagrangian_fan, LagrangianFan, LagrangianSide,
};
use crate::linalg::{dot, perp, Mat2, Vec2};
use crate::model::{
    free_energy, idx, physical_flux, primitive_to_conserved_unchecked, CellState, Conserved,
    PhysicalParams, DET_F_MIN, NCONS,
};

/// Max `|H det F - 1|` accepted by the face reconstruction.
pub const INVOLUTION_TOL: f64 = 1e-8;

/// Number of components fluxed by the fan: `H`, `HU`, `HF`.
pub const NFAN: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceFrame {
    pub n_par: Vec2,
    pub n_perp: Vec2,
    pub e_e: Vec2,
    pub e_f: Vec2,
}

impl InterfaceFrame {
    pub fn new(n: Vec2, e_e: Vec2, e_f: Vec2) -> Self {
        Self {
            n_par: n,
            n_perp: perp(n),
            e_e,
            e_f,
        }
    }

    /// `N = [n∥ n⊥]`.
    pub fn spatial(&self) -> Mat2 {
        Mat2::from_cols(self.n_par, self.n_perp)
    }

    /// `M = [e_e e_f]`.
    pub fn material(&self) -> Mat2 {
        Mat2::from_cols(self.e_e, self.e_f)
    }

    /// `Nᵀ F M`.
    pub fn local_f(&self, f: &Mat2) -> Mat2 {
        self.spatial().transpose() * *f * self.material()
    }

    pub fn global_f(&self, f_loc: &Mat2) -> Mat2 {
        self.spatial() * *f_loc * self.material().transpose()
    }

    pub fn local_a(&self, a: &Mat2) -> Mat2 {
        let m = self.material();
        (m.transpose() * *a * m).symmetrized()
    }

    pub fn local_vec(&self, u: Vec2) -> Vec2 {
        [dot(u, self.n_par), dot(u, self.n_perp)]
    }

    pub fn global_vec(&self, u: Vec2) -> Vec2 {
        [
            u[0] * self.n_par[0] + u[1] * self.n_perp[0],
            u[0] * self.n_par[1] + u[1] * self.n_perp[1],
        ]
    }
}

/// `x - ln x - 1`, the distance of a singular value to one.
fn dist_to_one(x: f64) -> f64 {
    x - x.ln() - 1.0
}

fn frame_vector(f: &Mat2) -> Result<Vec2> {
    let det = f.det();
    if !(det > DET_F_MIN) || !f.is_finite() {
        return Err(SvmError::SingularDeformation { det });
    }
    let svd = f.svd();
    let [s0, s1] = svd.s;
    let e_b = [0.0, 1.0];
    if s0 - s1 <= 1e-12 * s0 {
        return Ok(e_b);
    }
    let (d0, d1) = (dist_to_one(s0), dist_to_one(s1));
    let (v0, v1) = (svd.right(0), svd.right(1));
    let k = if (d0 - d1).abs() <= 1e-12 * (1.0 + d0.max(d1)) {
        if dot(v0, e_b).abs() >= dot(v1, e_b).abs() {
            0
        } else {
            1
        }
    } else if d0 < d1 {
        0
    } else {
        1
    };
    Ok(if k == 0 { v0 } else { v1 })
}

/// Material basis `(e_e, e_f)` for the interface with normal `n`.
pub fn select_material_frame(left: &CellState, right: &CellState, n: Vec2) -> Result<(Vec2, Vec2)> {
    let vl = frame_vector(&left.f)?;
    let mut vr = frame_vector(&right.f)?;
    if dot(vl, vr) < 0.0 {
        vr = [-vr[0], -vr[1]];
    }
    let sum = [vl[0] + vr[0], vl[1] + vr[1]];
    let len = sum[0].hypot(sum[1]);
    let mut e_f = [sum[0] / len, sum[1] / len];
    // e_e = R(-π/2) e_f
    let mut e_e = [e_f[1], -e_f[0]];
    let par = dot(n, left.f.mul_vec(e_e)) + dot(n, right.f.mul_vec(e_e));
    if par < 0.0 {
        e_e = [-e_e[0], -e_e[1]];
        e_f = [-e_f[0], -e_f[1]];
    }
    Ok((e_e, e_f))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructedSide {
    pub state: CellState,
    pub lambda: f64,
    /// Reconstructed `F` in `(n∥, n⊥) × (e_e, e_f)`: `F^∥_f = 0`, `F^⊥_f = λ`.
    pub f_loc: Mat2,
    /// `A` in `(e_e, e_f)`.
    pub a_loc: Mat2,
    /// Elastic energy `tr(F A Fᵀ)`.
    pub energy: f64,
    /// Cofactor entry with `E^m_e F^⊥_f = 1`.
    pub em_e: f64,
}

impl ReconstructedSide {
    pub fn f_rec(&self, frame: &InterfaceFrame) -> Mat2 {
        frame.global_f(&self.f_loc)
    }

    /// Side in mass coordinates along `λ e_e`; `F_b = (0, 1)`.
    pub fn to_lagrangian(&self, frame: &InterfaceFrame) -> LagrangianSide {
        let l = self.lambda;
        let a = &self.a_loc;
        LagrangianSide {
            h: self.state.h,
            u: frame.local_vec(self.state.u),
            fa: [self.f_loc.m[0][0] * l, self.f_loc.m[1][0] * l],
            fb: [0.0, 1.0],
            a: Mat2::sym(a.m[0][0] / (l * l), a.m[0][1], a.m[1][1] * l * l),
            acc: self.state.acc,
            c: 0.0,
        }
    }
}

/// Discriminants below this fraction of their term magnitude are rounding
/// noise; taking their square root would inject `O(sqrt(eps))` shear.
const DISC_ROUNDING: f64 = 1e-13;

fn round_to_zero(d: f64, scale: f64) -> f64 {
    if d <= DISC_ROUNDING * scale.abs() {
        0.0
    } else {
        d
    }
}

pub fn reconstruct_interface_f(s: &CellState, frame: &InterfaceFrame) -> Result<ReconstructedSide> {
    let drift = s.involution_drift();
    if !(drift <= INVOLUTION_TOL) {
        return Err(SvmError::Reconstruction {
            drift,
            tol: INVOLUTION_TOL,
        });
    }
    let h = s.h;
    let energy = s.f.congruence(&s.a).trace();
    let a_loc = frame.local_a(&s.a);
    let (aee, aef, aff) = (a_loc.m[0][0], a_loc.m[0][1], a_loc.m[1][1]);
    let det_a = s.a.det();
    let disc = round_to_zero(energy * energy - 4.0 * det_a / (h * h), energy * energy);
    let center = aee * energy / (2.0 * det_a);
    let half = aee * disc.sqrt() / (2.0 * det_a);
    let x = 1.0f64.clamp(center - half, center + half);
    let lambda = x.sqrt();

    let rad = round_to_zero(
        aef * aef * x + aee * (energy - aee / (x * h * h) - aff * x),
        aef * aef * x + aee * (energy + aee / (x * h * h) + aff * x),
    );
    let sq = rad.sqrt();
    let r_plus = (-aef * lambda + sq) / aee;
    let r_minus = (-aef * lambda - sq) / aee;
    let orig = dot(frame.n_perp, s.f.mul_vec(frame.e_e));
    let (dp, dm) = ((r_plus - orig).abs(), (r_minus - orig).abs());
    let f_perp_e = if dp < dm {
        r_plus
    } else if dm < dp {
        r_minus
    } else if r_plus >= 0.0 {
        r_plus
    } else {
        r_minus
    };
    Ok(ReconstructedSide {
        state: *s,
        lambda,
        f_loc: Mat2::new(1.0 / (lambda * h), 0.0, f_perp_e, lambda),
        a_loc,
        energy,
        em_e: 1.0 / lambda,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerianFan {
    /// `λ₋ ≤ λ₀ ≤ λ₊`.
    pub speeds: [f64; 3],
    /// `(l, *l, *r, r)` in the global frame, with reconstructed `F`.
    pub states: [CellState; 4],
    pub lagrangian: LagrangianFan,
    pub c: [f64; 2],
    /// Local `(∥, ⊥)` components.
    pub u_star: Vec2,
    pub pi_star: Vec2,
    /// Relaxed specific internal energy on each side of the contact.
    pub e_star: [f64; 2],
    pub traction: [Vec2; 2],
    pub internal: [f64; 2],
}

impl EulerianFan {
    /// Index of the state sitting on `x/t = 0`.
    pub fn index_at_zero(&self) -> usize {
        let [lm, l0, lp] = self.speeds;
        if lm > 0.0 {
            0
        } else if l0 > 0.0 {
            1
        } else if lp > 0.0 {
            2
        } else {
            3
        }
    }
}

pub fn solve_eulerian_fan(
    left: &ReconstructedSide,
    right: &ReconstructedSide,
    frame: &InterfaceFrame,
    p: &PhysicalParams,
) -> Result<EulerianFan> {
    let ls = left.to_lagrangian(frame);
    let rs = right.to_lagrangian(frame);
    let (cl, cr) = init_relaxation_speeds(&ls, &rs, p);
    if !(cl.is_finite() && cr.is_finite()) {
        return Err(SvmError::NonFiniteSpeed);
    }
    let (ls, rs) = (ls.with_c(cl), rs.with_c(cr));
    let fan = solve_lagrangian_fan(&ls, &rs, p)?;

    let lm = ls.u[0] - cl / ls.h;
    let l0 = fan.u_star[0];
    let lp = rs.u[0] + cr / rs.h;
    if !(lm <= l0 && l0 <= lp) {
        return Err(SvmError::WaveOrdering { lm, l0, lp });
    }

    let star = |side: &ReconstructedSide, tau: f64, fa: Vec2| -> CellState {
        let l = side.lambda;
        let f_loc = Mat2::new(fa[0] / l, 0.0, fa[1] / l, l);
        CellState {
            h: 1.0 / tau,
            u: frame.global_vec(fan.u_star),
            f: frame.global_f(&f_loc),
            a: side.state.a,
            acc: side.state.acc,
        }
    };
    let rec = |side: &ReconstructedSide| CellState {
        f: side.f_rec(frame),
        ..side.state
    };
    let states = [
        rec(left),
        star(left, fan.tau_l, fan.fa_l),
        star(right, fan.tau_r, fan.fa_r),
        rec(right),
    ];

    let tl = ls.traction(p);
    let tr = rs.traction(p);
    let (el, er) = (ls.internal_energy(p), rs.internal_energy(p));
    let relaxed = |e: f64, t: Vec2, c: f64| {
        e + (dot(fan.pi_star, fan.pi_star) - dot(t, t)) / (2.0 * c * c)
    };
    Ok(EulerianFan {
        speeds: [lm, l0, lp],
        states,
        lagrangian: fan,
        c: [cl, cr],
        u_star: fan.u_star,
        pi_star: fan.pi_star,
        e_star: [relaxed(el, tl, cl), relaxed(er, tr, cr)],
        traction: [tl, tr],
        internal: [el, er],
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericalFlux {
    /// Flux along `n`; the distortion components are left at zero.
    pub flux: Conserved,
    pub max_speed: f64,
    /// Contact velocity in the global frame.
    pub u_star: Vec2,
    pub mass_flux: f64,
    /// Interface energy flux along `n`, including the upwinded logarithmic part.
    pub entropy_flux: f64,
    pub speeds: [f64; 3],
}

fn fan_components(s: &CellState) -> [f64; NFAN] {
    let q = primitive_to_conserved_unchecked(s);
    let mut out = [0.0; NFAN];
    out.copy_from_slice(&q.0[..NFAN]);
    out
}

/// Specific free energy minus its kinetic and fan-internal parts.
fn log_energy(s: &CellState, p: &PhysicalParams) -> f64 {
    let st = crate::model::strain_from_state(s);
    free_energy(s, p)
        - 0.5 * dot(s.u, s.u)
        - 0.5 * p.g * s.h
        - 0.5 * p.big_g * (st.b.trace() + st.bzz)
}

pub fn numerical_flux(
    left: &CellState,
    right: &CellState,
    n: Vec2,
    p: &PhysicalParams,
) -> Result<NumericalFlux> {
    let (e_e, e_f) = select_material_frame(left, right, n)?;
    let frame = InterfaceFrame::new(n, e_e, e_f);
    let lrec = reconstruct_interface_f(left, &frame)?;
    let rrec = reconstruct_interface_f(right, &frame)?;
    let fan = solve_eulerian_fan(&lrec, &rrec, &frame, p)?;

    let fl = physical_flux(left, n, p);
    let fr = physical_flux(right, n, p);
    let qs = fan.states.map(|s| fan_components(&s));
    let mut flux = Conserved::zero();
    for k in 0..NFAN {
        let mut diss = 0.0;
        for w in 0..3 {
            diss += fan.speeds[w].abs() * (qs[w + 1][k] - qs[w][k]);
        }
        flux[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * diss;
    }
    for k in NFAN..NCONS {
        flux[k] = 0.0;
    }
    let m = flux[idx::H];

    let k0 = fan.index_at_zero();
    let s0 = &fan.states[k0];
    let (u0, pi0, e0) = match k0 {
        0 => (frame.local_vec(left.u), fan.traction[0], fan.internal[0]),
        1 => (fan.u_star, fan.pi_star, fan.e_star[0]),
        2 => (fan.u_star, fan.pi_star, fan.e_star[1]),
        _ => (frame.local_vec(right.u), fan.traction[1], fan.internal[1]),
    };
    let up = if m >= 0.0 { left } else { right };
    let entropy_flux =
        m * (0.5 * dot(u0, u0) + e0 + log_energy(up, p)) + dot(pi0, u0);
    debug_assert!(s0.h > 0.0);

    let max_speed = fan.speeds[0].abs().max(fan.speeds[2].abs());
    if !max_speed.is_finite() {
        return Err(SvmError::NonFiniteSpeed);
    }
    Ok(NumericalFlux {
        flux,
        max_speed,
        u_star: frame.global_vec(fan.u_star),
        mass_flux: m,
        entropy_flux,
        speeds: fan.speeds,
    })
}

/// Upwinded distortion flux `m (A_aa, A_ab, A_bb, A_cc)` for mass flux `m`.
pub fn upwind_a_flux(left: &CellState, right: &CellState, mass_flux: f64) -> [f64; 4] {
    let s = if mass_flux >= 0.0 { left } else { right };
    [
        mass_flux * s.a.m[0][0],
        mass_flux * s.a.m[0][1],
        mass_flux * s.a.m[1][1],
        mass_flux * s.acc,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p() -> PhysicalParams {
        PhysicalParams::new(10.0, 1.0, 0.1)
    }

    fn case1_left() -> CellState {
        CellState {
            h: 3.0,
            u: [0.0, 0.0],
            f: Mat2::diag(1.0 / 3.0, 1.0),
            a: Mat2::diag(9.0, 1.0),
            acc: 1.0 / 9.0,
        }
    }

    #[test]
    fn frame_examples() {
        let id = CellState::identity();
        let (e_e, e_f) = select_material_frame(&id, &id, [1.0, 0.0]).unwrap();
        assert_eq!(e_f, [0.0, 1.0]);
        assert_eq!(e_e, [1.0, 0.0]);

        let s = CellState {
            f: Mat2::diag(2.0, 1.0),
            ..id
        };
        let (e_e, e_f) = select_material_frame(&s, &s, [1.0, 0.0]).unwrap();
        assert!((e_f[0]).abs() < 1e-15 && (e_f[1] - 1.0).abs() < 1e-15);
        assert!((e_e[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_reconstruction() {
        let frame = InterfaceFrame::new([1.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        let r = reconstruct_interface_f(&CellState::identity(), &frame).unwrap();
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.f_loc, Mat2::identity());
    }

    #[test]
    fn case1_reconstruction() {
        let frame = InterfaceFrame::new([1.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        let r = reconstruct_interface_f(&case1_left(), &frame).unwrap();
        assert_relative_eq!(r.lambda, 1.0, epsilon = 1e-7);
        assert_relative_eq!(r.f_loc.m[0][0], 1.0 / 3.0, epsilon = 1e-7);
        assert!(r.f_loc.m[1][0].abs() < 1e-7);
        assert_relative_eq!(r.energy, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rest_flux() {
        let id = CellState::identity();
        let nf = numerical_flux(&id, &id, [1.0, 0.0], &p()).unwrap();
        assert_eq!(nf.mass_flux, 0.0);
        assert_relative_eq!(nf.flux[idx::HUX], 5.0, epsilon = 1e-14);
        assert_relative_eq!(nf.max_speed, 14f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn case1_interface() {
        let right = CellState::identity();
        let frame = InterfaceFrame::new([1.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        let l = reconstruct_interface_f(&case1_left(), &frame).unwrap();
        let r = reconstruct_interface_f(&right, &frame).unwrap();
        let fan = solve_eulerian_fan(&l, &r, &frame, &p()).unwrap();
        assert!(fan.speeds[0] < 0.0 && fan.speeds[2] > 0.0);
        let hl = fan.states[1].h;
        assert!(hl > 1.0 && hl < 3.0, "H*_l = {hl}");
    }
}
