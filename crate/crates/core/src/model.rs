//! SVM state, conservative representation, energies and dissipation.

use crate::error::{Invariant, Result, SvmError};
use crate::linalg::{dot, Mat2, Vec2};

/// Vacuum floor on the depth.
pub const H_MIN: f64 = 1e-12;
/// Floor on `|det F|` when inverting the deformation gradient.
pub const DET_F_MIN: f64 = 1e-12;

pub const NCONS: usize = 11;

/// Index of each component inside a [`Conserved`] vector.
pub mod idx {
    pub const H: usize = 0;
    pub const HUX: usize = 1;
    pub const HUY: usize = 2;
    pub const HFXA: usize = 3;
    pub const HFYA: usize = 4;
    pub const HFXB: usize = 5;
    pub const HFYB: usize = 6;
    pub const HAAA: usize = 7;
    pub const HAAB: usize = 8;
    pub const HABB: usize = 9;
    pub const HACC: usize = 10;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    pub g: f64,
    /// Specific elastic modulus.
    pub big_g: f64,
    pub lambda: f64,
    /// Linear friction coefficient.
    pub k: f64,
    /// Slip parameter, only used by the hyperbolicity analysis.
    pub zeta: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            g: 10.0,
            big_g: 1.0,
            lambda: 0.1,
            k: 0.0,
            zeta: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(g: f64, big_g: f64, lambda: f64) -> Self {
        Self {
            g,
            big_g,
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(SvmError::InvalidParam {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad("g", "must be > 0");
        }
        if !(self.big_g >= 0.0 && self.big_g.is_finite()) {
            return bad("G", "must be >= 0");
        }
        // lambda = +inf is allowed: no relaxation.
        if !(self.lambda > 0.0) {
            return bad("lambda", "must be > 0");
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return bad("K", "must be >= 0");
        }
        if !(0.0..=2.0).contains(&self.zeta) {
            return bad("zeta", "must lie in [0, 2]");
        }
        Ok(())
    }
}

/// Primitive cell state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellState {
    pub h: f64,
    pub u: Vec2,
    /// Deformation gradient, `f.m[i][alpha]`.
    pub f: Mat2,
    /// Symmetric material distortion.
    pub a: Mat2,
    pub acc: f64,
}

impl CellState {
    /// Rest state with `F = I`, `A = I`, `A_cc = 1`.
    pub fn identity() -> Self {
        Self {
            h: 1.0,
            u: [0.0, 0.0],
            f: Mat2::identity(),
            a: Mat2::identity(),
            acc: 1.0,
        }
    }

    /// State with `A`, `A_cc` at their relaxation targets.
    pub fn at_equilibrium(h: f64, u: Vec2, f: Mat2) -> Result<Self> {
        let mut s = Self {
            h,
            u,
            f,
            a: Mat2::identity(),
            acc: 1.0,
        };
        let (a, acc) = relaxation_targets(&s)?;
        s.a = a;
        s.acc = acc;
        Ok(s)
    }

    pub fn involution_drift(&self) -> f64 {
        (self.h * self.f.det().abs() - 1.0).abs()
    }

    /// Normalized off-diagonal `A_ab / sqrt(A_aa A_bb)`; inside (-1, 1) iff `A` is SPD.
    pub fn normalized_aab(&self) -> f64 {
        self.a.m[0][1] / (self.a.m[0][0] * self.a.m[1][1]).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conserved(pub [f64; NCONS]);

impl Conserved {
    pub fn zero() -> Self {
        Self([0.0; NCONS])
    }
}

impl std::ops::Index<usize> for Conserved {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Conserved {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainState {
    pub b: Mat2,
    pub bzz: f64,
}

fn admissibility_error(s: &CellState) -> Option<Invariant> {
    let finite = s.h.is_finite()
        && s.u.iter().all(|x| x.is_finite())
        && s.f.is_finite()
        && s.a.is_finite()
        && s.acc.is_finite();
    if !finite {
        return Some(Invariant::Finite);
    }
    if !(s.h > 0.0) {
        return Some(Invariant::Depth);
    }
    if !s.a.is_spd() {
        return Some(Invariant::DistortionSpd);
    }
    if !(s.acc > 0.0) {
        return Some(Invariant::VerticalDistortion);
    }
    None
}

pub fn primitive_to_conserved(s: &CellState) -> Result<Conserved> {
    if let Some(inv) = admissibility_error(s) {
        return Err(SvmError::Inadmissible(inv));
    }
    Ok(primitive_to_conserved_unchecked(s))
}

pub fn primitive_to_conserved_unchecked(s: &CellState) -> Conserved {
    let h = s.h;
    Conserved([
        h,
        h * s.u[0],
        h * s.u[1],
        h * s.f.m[0][0],
        h * s.f.m[1][0],
        h * s.f.m[0][1],
        h * s.f.m[1][1],
        h * s.a.m[0][0],
        h * s.a.m[0][1],
        h * s.a.m[1][1],
        h * s.acc,
    ])
}

pub fn conserved_to_primitive(q: &Conserved) -> Result<CellState> {
    conserved_to_primitive_floor(q, H_MIN)
}

pub fn conserved_to_primitive_floor(q: &Conserved, h_min: f64) -> Result<CellState> {
    let h = q[idx::H];
    if !(h > h_min) {
        return Err(SvmError::Vacuum { h, floor: h_min });
    }
    let s = CellState {
        h,
        u: [q[idx::HUX] / h, q[idx::HUY] / h],
        f: Mat2::new(
            q[idx::HFXA] / h,
            q[idx::HFXB] / h,
            q[idx::HFYA] / h,
            q[idx::HFYB] / h,
        ),
        a: Mat2::sym(q[idx::HAAA] / h, q[idx::HAAB] / h, q[idx::HABB] / h),
        acc: q[idx::HACC] / h,
    };
    match admissibility_error(&s) {
        Some(inv) => Err(SvmError::Inadmissible(inv)),
        None => Ok(s),
    }
}

pub fn strain_from_state(s: &CellState) -> StrainState {
    StrainState {
        b: s.f.congruence(&s.a),
        bzz: s.h * s.h * s.acc,
    }
}

/// `|det F|² det A H² A_cc`, the argument of the free-energy logarithm.
pub fn log_argument(s: &CellState) -> f64 {
    let d = s.f.det();
    d * d * s.a.det() * s.h * s.h * s.acc
}

pub fn free_energy(s: &CellState, p: &PhysicalParams) -> f64 {
    let arg = log_argument(s);
    debug_assert!(arg > 0.0, "free-energy log argument {arg} not positive");
    entropy_tilde(s, p) - 0.5 * p.big_g * arg.ln()
}

pub fn entropy_tilde(s: &CellState, p: &PhysicalParams) -> f64 {
    let st = strain_from_state(s);
    0.5 * (dot(s.u, s.u) + p.g * s.h) + 0.5 * p.big_g * (st.b.trace() + st.bzz)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DissipationForm {
    /// Vertical contribution `B_zz + 1/B_zz - 2`; vanishes at equilibrium.
    #[default]
    Consistent,
    /// Vertical contribution `B_zz + 1/B_zz - 1` as printed in the source derivation.
    Printed,
}

pub fn dissipation_rate(s: &CellState, p: &PhysicalParams) -> f64 {
    dissipation_rate_with(s, p, DissipationForm::Consistent)
}

pub fn dissipation_rate_with(s: &CellState, p: &PhysicalParams, form: DissipationForm) -> f64 {
    let st = strain_from_state(s);
    let b = st.b;
    let det = b.det();
    // tr(B^-1) = tr(B) / det(B) for 2x2.
    let horiz = b.trace() + b.trace() / det - 4.0;
    let c = match form {
        DissipationForm::Consistent => 2.0,
        DissipationForm::Printed => 1.0,
    };
    let vert = st.bzz + 1.0 / st.bzz - c;
    p.big_g * (horiz + vert) / (2.0 * p.lambda)
}

/// `(F⁻¹F⁻ᵀ, H⁻²)`.
pub fn relaxation_targets(s: &CellState) -> Result<(Mat2, f64)> {
    let finv = s
        .f
        .inverse(DET_F_MIN)
        .ok_or(SvmError::SingularDeformation { det: s.f.det() })?;
    let a_inf = (finv * finv.transpose()).symmetrized();
    Ok((a_inf, 1.0 / (s.h * s.h)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnosis {
    pub violations: Vec<Invariant>,
    pub involution_drift: f64,
}

impl Diagnosis {
    /// Hard invariants only; the involution is monitored.
    pub fn is_admissible(&self) -> bool {
        self.violations.iter().all(|v| *v == Invariant::Involution)
    }
}

/// Reports every violated invariant. Involution drift above `involution_tol` is listed too.
pub fn check_admissible(s: &CellState, involution_tol: f64) -> Diagnosis {
    let mut violations = Vec::new();
    let finite = s.h.is_finite()
        && s.u.iter().all(|x| x.is_finite())
        && s.f.is_finite()
        && s.a.is_finite()
        && s.acc.is_finite();
    if !finite {
        violations.push(Invariant::Finite);
    }
    if !(s.h > 0.0) {
        violations.push(Invariant::Depth);
    }
    if !s.a.is_spd() {
        violations.push(Invariant::DistortionSpd);
    }
    if !(s.acc > 0.0) {
        violations.push(Invariant::VerticalDistortion);
    }
    let drift = s.involution_drift();
    if !(drift <= involution_tol) {
        violations.push(Invariant::Involution);
    }
    Diagnosis {
        violations,
        involution_drift: drift,
    }
}

/// Exact physical flux of the conserved variables along unit normal `n`.
///
/// The distortion components are advected with the mass flux.
pub fn physical_flux(s: &CellState, n: Vec2, p: &PhysicalParams) -> Conserved {
    let h = s.h;
    let un = dot(s.u, n);
    let b = s.f.congruence(&s.a);
    let press = 0.5 * p.g * h * h + p.big_g * h * h * h * s.acc;
    let bn = b.mul_vec(n);
    // H F^T n: material covector of the normal row.
    let fn_ = [
        s.f.m[0][0] * n[0] + s.f.m[1][0] * n[1],
        s.f.m[0][1] * n[0] + s.f.m[1][1] * n[1],
    ];
    let mut out = [0.0; NCONS];
    out[idx::H] = h * un;
    out[idx::HUX] = h * un * s.u[0] + press * n[0] - p.big_g * h * bn[0];
    out[idx::HUY] = h * un * s.u[1] + press * n[1] - p.big_g * h * bn[1];
    out[idx::HFXA] = h * (un * s.f.m[0][0] - fn_[0] * s.u[0]);
    out[idx::HFYA] = h * (un * s.f.m[1][0] - fn_[0] * s.u[1]);
    out[idx::HFXB] = h * (un * s.f.m[0][1] - fn_[1] * s.u[0]);
    out[idx::HFYB] = h * (un * s.f.m[1][1] - fn_[1] * s.u[1]);
    out[idx::HAAA] = h * un * s.a.m[0][0];
    out[idx::HAAB] = h * un * s.a.m[0][1];
    out[idx::HABB] = h * un * s.a.m[1][1];
    out[idx::HACC] = h * un * s.acc;
    Conserved(out)
}

/// Physical energy flux `(H E + P) U·n - G H (B U)·n`.
pub fn physical_energy_flux(s: &CellState, n: Vec2, p: &PhysicalParams) -> f64 {
    let h = s.h;
    let un = dot(s.u, n);
    let b = s.f.congruence(&s.a);
    let press = 0.5 * p.g * h * h + p.big_g * h * h * h * s.acc;
    h * free_energy(s, p) * un + press * un - p.big_g * h * b.bilinear(n, s.u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

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
    fn conserved_examples() {
        let q = primitive_to_conserved(&CellState::identity()).unwrap();
        assert_eq!(q.0, [1., 0., 0., 1., 0., 0., 1., 1., 0., 1., 1.]);

        let s = CellState {
            h: 2.0,
            u: [1.0, 0.0],
            acc: 0.25,
            ..CellState::identity()
        };
        let q = primitive_to_conserved(&s).unwrap();
        assert_eq!(q.0, [2., 2., 0., 2., 0., 0., 2., 2., 0., 2., 0.5]);

        let q = primitive_to_conserved(&case1_left()).unwrap();
        let want = [3., 0., 0., 1., 0., 0., 3., 27., 0., 3., 1.0 / 3.0];
        for (a, b) in q.0.iter().zip(want) {
            assert_relative_eq!(*a, b, max_relative = 1e-15);
        }
    }

    #[test]
    fn vacuum_and_spd_errors() {
        let mut q = primitive_to_conserved(&CellState::identity()).unwrap();
        q[idx::H] = 0.0;
        assert!(matches!(
            conserved_to_primitive(&q),
            Err(SvmError::Vacuum { .. })
        ));
        let bad = CellState {
            a: Mat2::sym(1.0, 1.0, 1.0),
            ..CellState::identity()
        };
        assert_eq!(
            primitive_to_conserved(&bad),
            Err(SvmError::Inadmissible(Invariant::DistortionSpd))
        );
    }

    #[test]
    fn strain_examples() {
        let st = strain_from_state(&CellState::identity());
        assert_eq!(st.b, Mat2::identity());
        assert_eq!(st.bzz, 1.0);
        let st = strain_from_state(&case1_left());
        assert!((st.b - Mat2::identity()).max_abs() < 1e-15);
        assert_relative_eq!(st.bzz, 1.0, max_relative = 1e-15);
        let s = CellState {
            f: Mat2::new(1.0, 1.0, 0.0, 1.0),
            ..CellState::identity()
        };
        assert_eq!(strain_from_state(&s).b, Mat2::new(2.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn energy_examples() {
        let p = PhysicalParams::new(10.0, 1.0, 0.1);
        assert_relative_eq!(free_energy(&CellState::identity(), &p), 6.5);
        let p0 = PhysicalParams::new(10.0, 0.0, 0.1);
        let s = CellState {
            h: 2.0,
            ..CellState::identity()
        };
        assert_relative_eq!(free_energy(&s, &p0), 10.0);
        assert_relative_eq!(free_energy(&case1_left(), &p), 16.5, max_relative = 1e-14);

        assert_relative_eq!(entropy_tilde(&CellState::identity(), &p), 6.5);
        let s4 = CellState {
            h: 4.0,
            ..CellState::identity()
        };
        assert_relative_eq!(entropy_tilde(&s4, &p), 29.0);
    }

    #[test]
    fn dissipation_examples() {
        let p = PhysicalParams::new(10.0, 1.0, 0.1);
        assert_eq!(dissipation_rate(&CellState::identity(), &p), 0.0);
        // B = I, B_zz = 2.
        let s = CellState {
            acc: 2.0,
            ..CellState::identity()
        };
        assert_relative_eq!(dissipation_rate(&s, &p), 2.5, max_relative = 1e-14);
        assert_relative_eq!(
            dissipation_rate_with(&CellState::identity(), &p, DissipationForm::Printed),
            5.0
        );
    }

    #[test]
    fn targets_examples() {
        let (a, acc) = relaxation_targets(&CellState::identity()).unwrap();
        assert_eq!(a, Mat2::identity());
        assert_eq!(acc, 1.0);
        let s = CellState {
            f: Mat2::diag(2.0, 0.5),
            ..CellState::identity()
        };
        let (a, acc) = relaxation_targets(&s).unwrap();
        assert!((a - Mat2::diag(0.25, 4.0)).max_abs() < 1e-15);
        assert_eq!(acc, 1.0);
        let sing = CellState {
            f: Mat2::zero(),
            ..CellState::identity()
        };
        assert!(matches!(
            relaxation_targets(&sing),
            Err(SvmError::SingularDeformation { .. })
        ));
    }

    #[test]
    fn admissibility_examples() {
        let d = check_admissible(&CellState::identity(), 1e-8);
        assert!(d.violations.is_empty());
        assert_eq!(d.involution_drift, 0.0);

        let s = CellState {
            a: Mat2::sym(4.0, 2.0, 1.0),
            ..CellState::identity()
        };
        assert!(check_admissible(&s, 1e-8)
            .violations
            .contains(&Invariant::DistortionSpd));

        let s = CellState {
            f: Mat2::diag(2.0, 1.0),
            ..CellState::identity()
        };
        let d = check_admissible(&s, 1e-8);
        assert_eq!(d.involution_drift, 1.0);
        assert_eq!(d.violations, vec![Invariant::Involution]);
        assert!(d.is_admissible());
    }

    #[test]
    fn rest_flux_is_pressure_minus_elastic() {
        let p = PhysicalParams::new(10.0, 1.0, 0.1);
        let fl = physical_flux(&CellState::identity(), [1.0, 0.0], &p);
        assert_eq!(fl[idx::H], 0.0);
        assert_relative_eq!(fl[idx::HUX], 5.0);
        assert_eq!(fl[idx::HUY], 0.0);
    }
}
