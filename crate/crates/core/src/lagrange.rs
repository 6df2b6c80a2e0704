//! Three-wave relaxation solver in material (mass) coordinates.
//!
//! The coordinate `a` runs along the first material axis. Only `H⁻¹`, `F_a`
//! and `U` evolve; `F_b`, `A` and `A_cc` are carried by the contact.

use crate::error::{Result, SvmError};
use crate::linalg::{dot, Mat2, Vec2};
use crate::model::{CellState, PhysicalParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangianSide {
    pub h: f64,
    pub u: Vec2,
    pub fa: Vec2,
    pub fb: Vec2,
    /// Distortion in the material basis `(a, b)`.
    pub a: Mat2,
    pub acc: f64,
    /// Relaxation speed, mass flux units.
    pub c: f64,
}

impl LagrangianSide {
    /// Takes `F_a`, `F_b` from the columns of `F`; `c` is left at zero.
    pub fn from_cell(s: &CellState) -> Self {
        Self {
            h: s.h,
            u: s.u,
            fa: s.f.col(0),
            fb: s.f.col(1),
            a: s.a,
            acc: s.acc,
            c: 0.0,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.h
    }

    /// `σ_ij F^j_b` with `σ_xy = 1 = -σ_yx`.
    pub fn sigma_fb(&self) -> Vec2 {
        [self.fb[1], -self.fb[0]]
    }

    /// Transport velocity `V = U^j σ_jk F^k_b`.
    pub fn v(&self) -> f64 {
        dot(self.u, self.sigma_fb())
    }

    /// Scalar pressure `gH²/2 + G H³ A_cc`.
    pub fn pressure(&self, p: &PhysicalParams) -> f64 {
        0.5 * p.g * self.h * self.h + p.big_g * self.h.powi(3) * self.acc
    }

    /// Traction `P^i = 𝒫 σ_ij F^j_b - G (F_a A_aa + F_b A_ab)^i`.
    pub fn traction(&self, p: &PhysicalParams) -> Vec2 {
        let pr = self.pressure(p);
        let sf = self.sigma_fb();
        let (aa, ab) = (self.a.m[0][0], self.a.m[0][1]);
        [
            pr * sf[0] - p.big_g * (self.fa[0] * aa + self.fb[0] * ab),
            pr * sf[1] - p.big_g * (self.fa[1] * aa + self.fb[1] * ab),
        ]
    }

    pub fn z(&self, p: &PhysicalParams) -> f64 {
        dot(self.traction(p), self.sigma_fb())
    }

    /// Specific internal energy without the (contact-invariant) logarithm.
    pub fn internal_energy(&self, p: &PhysicalParams) -> f64 {
        internal_energy_at(self, self.tau(), self.fa, p)
    }
}

fn internal_energy_at(side: &LagrangianSide, tau: f64, fa: Vec2, p: &PhysicalParams) -> f64 {
    let h = 1.0 / tau;
    let a = &side.a;
    let faf = a.m[0][0] * dot(fa, fa)
        + 2.0 * a.m[0][1] * dot(fa, side.fb)
        + a.m[1][1] * dot(side.fb, side.fb);
    0.5 * p.g * h + 0.5 * p.big_g * (faf + h * h * side.acc)
}

fn traction_at(side: &LagrangianSide, tau: f64, fa: Vec2, p: &PhysicalParams) -> Vec2 {
    LagrangianSide {
        h: 1.0 / tau,
        fa,
        ..*side
    }
    .traction(p)
}

/// Subcharacteristic lower bound on `c²`, pointwise maximum form.
pub fn whitham_lower_bound(side: &LagrangianSide, p: &PhysicalParams) -> f64 {
    let (ga, gb) = bound_terms(side, p);
    ga.max(gb)
}

/// Sharp bound on `c²` for the quadratic part of the entropy residual.
///
/// Both tractions enter the residual through the same relaxed state, so the
/// two contributions add.
pub fn whitham_sharp_bound(side: &LagrangianSide, p: &PhysicalParams) -> f64 {
    let (ga, gb) = bound_terms(side, p);
    ga + gb
}

fn bound_terms(side: &LagrangianSide, p: &PhysicalParams) -> (f64, f64) {
    let h = side.h;
    let ga = p.big_g * side.a.m[0][0];
    let gb = (p.g * h.powi(3) + 3.0 * p.big_g * h.powi(4) * side.acc) * dot(side.fb, side.fb);
    (ga, gb)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpeedRule {
    /// `c̃² = G A_aa + (gH³ + 3GH⁴A_cc)|F_b|²`.
    #[default]
    Sharp,
    /// `c̃² = max(G A_aa, (gH³ + 3GH⁴A_cc)|F_b|²)`.
    PrintedMax,
}

pub fn init_relaxation_speeds(
    left: &LagrangianSide,
    right: &LagrangianSide,
    p: &PhysicalParams,
) -> (f64, f64) {
    init_relaxation_speeds_with(left, right, p, SpeedRule::default())
}

pub fn init_relaxation_speeds_with(
    left: &LagrangianSide,
    right: &LagrangianSide,
    p: &PhysicalParams,
    rule: SpeedRule,
) -> (f64, f64) {
    let base = |s: &LagrangianSide| match rule {
        SpeedRule::Sharp => whitham_sharp_bound(s, p).sqrt(),
        SpeedRule::PrintedMax => whitham_lower_bound(s, p).sqrt(),
    };
    let (cl, cr) = (base(left), base(right));
    let (zl, zr) = (left.z(p), right.z(p));
    let dv = (left.v() - right.v()).max(0.0);
    // Z jump over c̃_l + c̃_r: both are mass fluxes.
    let denom = cl + cr;
    let cl_out = cl + 2.0 * left.h * (dv + (zr - zl).max(0.0) / denom);
    let cr_out = cr + 2.0 * right.h * (dv + (zl - zr).max(0.0) / denom);
    (cl_out, cr_out)
}

/// One side of the relaxed Riemann problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxedSide {
    pub tau: f64,
    pub v: f64,
    pub z: f64,
    pub u: Vec2,
    pub pi: Vec2,
    pub fa: Vec2,
    pub c: f64,
}

impl RelaxedSide {
    /// Relaxed variables initialized at equilibrium: `Π = P`, `Z = P·σF_b`, `V = U·σF_b`.
    pub fn at_equilibrium(side: &LagrangianSide, p: &PhysicalParams) -> Self {
        Self {
            tau: side.tau(),
            v: side.v(),
            z: side.z(p),
            u: side.u,
            pi: side.traction(p),
            fa: side.fa,
            c: side.c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangianFan {
    /// `(-c_l, 0, c_r)`.
    pub speeds: [f64; 3],
    pub tau_l: f64,
    pub tau_r: f64,
    pub v_star: f64,
    pub z_star: f64,
    pub u_star: Vec2,
    pub pi_star: Vec2,
    pub fa_l: Vec2,
    pub fa_r: Vec2,
}

impl LagrangianFan {
    pub fn h_l(&self) -> f64 {
        1.0 / self.tau_l
    }

    pub fn h_r(&self) -> f64 {
        1.0 / self.tau_r
    }

    /// Flux of `(H⁻¹, F^x_a, F^y_a, U^x, U^y)` at `a/t = 0`.
    pub fn flux(&self) -> [f64; 5] {
        [
            -self.v_star,
            -self.u_star[0],
            -self.u_star[1],
            self.pi_star[0],
            self.pi_star[1],
        ]
    }

    /// Energy flux `Π*·U*`.
    pub fn entropy_flux(&self) -> f64 {
        dot(self.pi_star, self.u_star)
    }
}

pub fn solve_relaxed_fan(l: &RelaxedSide, r: &RelaxedSide) -> Result<LagrangianFan> {
    let (cl, cr) = (l.c, r.c);
    if !(cl > 0.0 && cr > 0.0 && cl.is_finite() && cr.is_finite()) {
        return Err(SvmError::InvalidParam {
            name: "c",
            reason: format!("relaxation speeds must be positive, got ({cl}, {cr})"),
        });
    }
    let s = cl + cr;
    let v_star = (cl * l.v + cr * r.v + l.z - r.z) / s;
    let z_star = (cr * l.z + cl * r.z + cl * cr * (l.v - r.v)) / s;
    let mut u_star = [0.0; 2];
    let mut pi_star = [0.0; 2];
    for i in 0..2 {
        u_star[i] = (cl * l.u[i] + cr * r.u[i] + l.pi[i] - r.pi[i]) / s;
        pi_star[i] = (cr * l.pi[i] + cl * r.pi[i] + cl * cr * (l.u[i] - r.u[i])) / s;
    }
    let tau_l = l.tau + (v_star - l.v) / cl;
    let tau_r = r.tau - (v_star - r.v) / cr;
    if !(tau_l > 0.0) {
        return Err(SvmError::InadmissibleFan { side: "left", tau: tau_l });
    }
    if !(tau_r > 0.0) {
        return Err(SvmError::InadmissibleFan { side: "right", tau: tau_r });
    }
    let fa_l = [
        l.fa[0] + (u_star[0] - l.u[0]) / cl,
        l.fa[1] + (u_star[1] - l.u[1]) / cl,
    ];
    let fa_r = [
        r.fa[0] - (u_star[0] - r.u[0]) / cr,
        r.fa[1] - (u_star[1] - r.u[1]) / cr,
    ];
    Ok(LagrangianFan {
        speeds: [-cl, 0.0, cr],
        tau_l,
        tau_r,
        v_star,
        z_star,
        u_star,
        pi_star,
        fa_l,
        fa_r,
    })
}

/// Fan for equilibrium data on both sides; speeds are read from `left.c`, `right.c`.
pub fn solve_lagrangian_fan(
    left: &LagrangianSide,
    right: &LagrangianSide,
    p: &PhysicalParams,
) -> Result<LagrangianFan> {
    solve_relaxed_fan(
        &RelaxedSide::at_equilibrium(left, p),
        &RelaxedSide::at_equilibrium(right, p),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyResiduals {
    pub left: f64,
    pub right: f64,
}

impl EntropyResiduals {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }
}

/// Intermediate-state entropy residuals; `<= 0` certifies the fan.
///
/// Per side, `|P(X₁) - P(X₂)|² / 2c² - D_e(X₂, X₁)` with `X = (H⁻¹, F_a)`,
/// `X₁` the intermediate state, `X₂` the outer state and `D_e` the Bregman
/// divergence of the internal energy. The divergence is evaluated in closed
/// form to avoid cancellation.
pub fn check_entropy_consistency(
    fan: &LagrangianFan,
    left: &LagrangianSide,
    right: &LagrangianSide,
    p: &PhysicalParams,
) -> EntropyResiduals {
    EntropyResiduals {
        left: side_residual(left, fan.tau_l, fan.fa_l, p),
        right: side_residual(right, fan.tau_r, fan.fa_r, p),
    }
}

fn side_residual(side: &LagrangianSide, tau1: f64, fa1: Vec2, p: &PhysicalParams) -> f64 {
    let tau2 = side.tau();
    let d = tau2 - tau1;
    let w = [side.fa[0] - fa1[0], side.fa[1] - fa1[1]];
    let aaa = side.a.m[0][0];
    let bregman = 0.5 * p.g * d * d / (tau1 * tau1 * tau2)
        + 0.5 * p.big_g * side.acc * d * d * (2.0 * tau2 + tau1) / (tau1.powi(3) * tau2 * tau2)
        + 0.5 * p.big_g * aaa * dot(w, w);
    // P(X1) - P(X2), pressure difference factored through (tau2 - tau1).
    let dp = d
        * (0.5 * p.g * (tau2 + tau1) / (tau1 * tau1 * tau2 * tau2)
            + p.big_g * side.acc * (tau2 * tau2 + tau1 * tau2 + tau1 * tau1)
                / (tau1.powi(3) * tau2.powi(3)));
    let sf = side.sigma_fb();
    let dtrac = [
        dp * sf[0] + p.big_g * aaa * w[0],
        dp * sf[1] + p.big_g * aaa * w[1],
    ];
    dot(dtrac, dtrac) / (2.0 * side.c * side.c) - bregman
}

/// Direct evaluation of the residual from energies and tractions; used to
/// cross-check the closed form.
pub fn entropy_residual_direct(
    side: &LagrangianSide,
    tau1: f64,
    fa1: Vec2,
    p: &PhysicalParams,
) -> f64 {
    let c2 = side.c * side.c;
    let p1 = traction_at(side, tau1, fa1, p);
    let p2 = side.traction(p);
    let e1 = internal_energy_at(side, tau1, fa1, p);
    let e2 = side.internal_energy(p);
    let h1 = 1.0 / tau1;
    let pr1 = 0.5 * p.g * h1 * h1 + p.big_g * h1.powi(3) * side.acc;
    let grad_f = [
        p.big_g * (side.a.m[0][0] * fa1[0] + side.a.m[0][1] * side.fb[0]),
        p.big_g * (side.a.m[0][0] * fa1[1] + side.a.m[0][1] * side.fb[1]),
    ];
    let dx_tau = side.tau() - tau1;
    let dx_f = [side.fa[0] - fa1[0], side.fa[1] - fa1[1]];
    let bregman = e2 - e1 - (-pr1 * dx_tau + dot(grad_f, dx_f));
    let dpv = [p1[0] - p2[0], p1[1] - p2[1]];
    dot(dpv, dpv) / (2.0 * c2) - bregman
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p() -> PhysicalParams {
        PhysicalParams::new(10.0, 1.0, 0.1)
    }

    fn rest() -> LagrangianSide {
        LagrangianSide::from_cell(&CellState::identity())
    }

    #[test]
    fn whitham_examples() {
        assert_relative_eq!(whitham_lower_bound(&rest(), &p()), 13.0);
        let g0 = PhysicalParams::new(10.0, 0.0, 0.1);
        assert_relative_eq!(whitham_lower_bound(&rest(), &g0), 10.0);
        let case1 = LagrangianSide {
            h: 3.0,
            fa: [1.0 / 3.0, 0.0],
            a: Mat2::diag(9.0, 1.0),
            acc: 1.0 / 9.0,
            ..rest()
        };
        assert_relative_eq!(whitham_lower_bound(&case1, &p()), 297.0, max_relative = 1e-14);
        assert_relative_eq!(whitham_sharp_bound(&case1, &p()), 306.0, max_relative = 1e-14);
    }

    #[test]
    fn speed_examples() {
        let (cl, cr) = init_relaxation_speeds_with(&rest(), &rest(), &p(), SpeedRule::PrintedMax);
        assert_relative_eq!(cl, 13f64.sqrt());
        assert_relative_eq!(cr, 13f64.sqrt());
        let (cl, _) = init_relaxation_speeds(&rest(), &rest(), &p());
        assert_relative_eq!(cl, 14f64.sqrt());

        let g0 = PhysicalParams::new(10.0, 0.0, 0.1);
        let (cl, _) = init_relaxation_speeds(&rest(), &rest(), &g0);
        assert_relative_eq!(cl, 10f64.sqrt());

        // V = U^x F^y_b - U^y F^x_b, so U^x = 1 on the left gives V_l - V_r = 1.
        let moving = LagrangianSide {
            u: [1.0, 0.0],
            ..rest()
        };
        let (cl, cr) =
            init_relaxation_speeds_with(&moving, &rest(), &p(), SpeedRule::PrintedMax);
        assert_relative_eq!(cl, 13f64.sqrt() + 2.0);
        assert_relative_eq!(cr, 13f64.sqrt() + 2.0);
    }

    #[test]
    fn closed_form_intermediate_states() {
        let l = RelaxedSide {
            tau: 1.0,
            v: 0.0,
            z: 1.0,
            u: [0.0; 2],
            pi: [0.0; 2],
            fa: [1.0, 0.0],
            c: 1.0,
        };
        let r = RelaxedSide { z: 0.0, ..l };
        let fan = solve_relaxed_fan(&l, &r).unwrap();
        assert_relative_eq!(fan.h_l(), 2.0 / 3.0);
        assert_relative_eq!(fan.v_star, 0.5);
        assert_relative_eq!(fan.z_star, 0.5);
    }

    #[test]
    fn equal_states_are_fixed() {
        let s = LagrangianSide {
            u: [0.3, -0.2],
            ..rest()
        };
        let (cl, cr) = init_relaxation_speeds(&s, &s, &p());
        let (l, r) = (s.with_c(cl), s.with_c(cr));
        let fan = solve_lagrangian_fan(&l, &r, &p()).unwrap();
        assert_relative_eq!(fan.tau_l, 1.0, epsilon = 1e-15);
        assert_relative_eq!(fan.u_star[0], 0.3, epsilon = 1e-15);
        let tr = s.traction(&p());
        assert_relative_eq!(fan.pi_star[0], tr[0], epsilon = 1e-14);
        let res = check_entropy_consistency(&fan, &l, &r, &p());
        assert!(res.max().abs() < 1e-14);
    }

    #[test]
    fn mirror_symmetry() {
        let l = LagrangianSide {
            h: 2.0,
            u: [0.4, 0.1],
            fa: [0.5, 0.0],
            a: Mat2::diag(4.0, 1.0),
            acc: 0.25,
            ..rest()
        };
        let r = LagrangianSide {
            u: [-0.4, 0.1],
            ..l
        };
        let (cl, cr) = init_relaxation_speeds(&l, &r, &p());
        assert_relative_eq!(cl, cr);
        let fan = solve_lagrangian_fan(&l.with_c(cl), &r.with_c(cr), &p()).unwrap();
        assert!(fan.u_star[0].abs() < 1e-15);
        assert_relative_eq!(fan.tau_l, fan.tau_r, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_speed() {
        let s = RelaxedSide::at_equilibrium(&rest(), &p());
        assert!(solve_relaxed_fan(&s, &s).is_err());
    }
}
