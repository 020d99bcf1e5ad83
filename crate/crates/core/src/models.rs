//! Two-state electronic Hamiltonians with conical intersections.
//!
//! Every model is a traceless Hermitian matrix `[[h, c], [c*, -h]]` plus an
//! optional scalar barrier on the diagonal. Each comes with a single-valued
//! eigenframe `W(x, y)` whose columns are the (excited, ground) eigenvectors,
//! so that `H = W·diag(E, -E)·W†` with `E = sqrt(h² + |c|²)`.

use crate::error::{Error, Result};
use crate::linalg::{wrap_angle, Mat2};
use num_complex::Complex64 as C64;

/// Cap factor `Δ·[θ(ρ-ρ₀)/ρ + θ(ρ₀-ρ)/ρ₀]` with `θ(0) = 1/2`.
///
/// Multiplying a cone of slope one by this factor flattens it to `±Δ`
/// outside `ρ₀`.
pub fn xi_factor(rho: f64, rho0: f64, delta: f64) -> Result<f64> {
    if !(rho0 > 0.0) || !(rho >= 0.0) {
        return Err(Error::Domain(format!("xi_factor needs rho >= 0 and rho0 > 0, got rho={rho}, rho0={rho0}")));
    }
    let step = |u: f64| {
        if u > 0.0 {
            1.0
        } else if u < 0.0 {
            0.0
        } else {
            0.5
        }
    };
    let outer = step(rho - rho0);
    let inner = step(rho0 - rho);
    let outer_term = if outer == 0.0 { 0.0 } else { outer / rho };
    Ok(delta * (outer_term + inner / rho0))
}

/// Single-valued eigenframe of the linear cone `h = x, c = y` at azimuth `φ`.
pub fn u_c(phi: f64) -> Mat2 {
    let (s, c) = (phi / 2.0).sin_cos();
    let p = C64::from_polar(1.0, phi / 2.0);
    let m = p.conj();
    Mat2::new(p * c, -m * s, p * s, m * c)
}

/// Single-valued eigenframe of the twisted cone `c = y·e^{-iφ}`.
pub fn u_d(phi: f64) -> Mat2 {
    let (s, c) = (phi / 2.0).sin_cos();
    let w = 0.5 * phi.sin();
    let h = 0.5 * phi;
    Mat2::new(
        C64::from_polar(c, w - h),
        C64::from_polar(-s, -h - w),
        C64::from_polar(s, h + w),
        C64::from_polar(c, -w + h),
    )
}

/// Real eigenvector rotation, double-valued around the cone.
pub fn u_real(phi: f64) -> Mat2 {
    let (s, c) = (phi / 2.0).sin_cos();
    Mat2::real(c, -s, s, c)
}

/// Single-valued frame diagonalizing `[[h, g], [g, -h]]` for real `h, g`.
///
/// Satisfies `U·diag(s, -s)·U† = [[h, g], [g, -h]]` with `s = sqrt(h² + g²)`;
/// for `(h, g) = (x, y)` it coincides with [`u_c`].
pub fn u_general(h: f64, g: f64) -> Result<Mat2> {
    let s = h.hypot(g);
    if s == 0.0 {
        return Err(Error::SingularBasis { x: h, y: g });
    }
    let n = 1.0 / (2.0 * s);
    Ok(Mat2::new(C64::new(h + s, g) * n, C64::new(-g, s - h) * n, C64::new(g, s - h) * n, C64::new(h + s, -g) * n))
}

/// Radially symmetric scalar barrier `V₀·exp(-(r/r_b)⁸)` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barrier {
    pub height: f64,
    pub radius: f64,
}

impl Barrier {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let u = (x * x + y * y) / (self.radius * self.radius);
        self.height * (-(u * u * u * u)).exp()
    }
}

/// Model identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// No electronic coupling; both channels free.
    Free,
    /// `h = x, c = y`.
    LinearJT,
    /// `h = Ξx, c = Ξy`: flat surfaces `±Δ` outside the cone radius.
    CappedJT,
    /// `h = Ξx, c = Ξy·e^{-iφ}`: same surfaces, different embedding.
    TwistedCappedJT,
    /// `h = x(x₀ - x), c = y`: intersections at the origin and `(x₀, 0)`.
    TwoCI,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Free => "free",
            ModelKind::LinearJT => "linear_jt",
            ModelKind::CappedJT => "capped_jt",
            ModelKind::TwistedCappedJT => "twisted_capped_jt",
            ModelKind::TwoCI => "two_ci",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [ModelKind::Free, ModelKind::LinearJT, ModelKind::CappedJT, ModelKind::TwistedCappedJT, ModelKind::TwoCI]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

/// A catalog two-state potential with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStatePotential {
    pub kind: ModelKind,
    /// Asymptotic gap parameter Δ.
    pub delta: f64,
    /// Cone radius ρ₀.
    pub rho0: f64,
    /// Second-intersection offset for [`ModelKind::TwoCI`].
    pub x0: f64,
    /// Apply the cap to the two-intersection model (flattens its surfaces
    /// to `±Δ` wherever `sqrt(h² + c²) > ρ₀`).
    pub cap_two_ci: bool,
    pub barrier: Option<Barrier>,
}

impl TwoStatePotential {
    fn with_kind(kind: ModelKind) -> Self {
        TwoStatePotential { kind, delta: 1.0, rho0: 5.0, x0: 3.0, cap_two_ci: false, barrier: None }
    }

    pub fn free() -> Self {
        Self::with_kind(ModelKind::Free)
    }

    pub fn linear_jt() -> Self {
        Self::with_kind(ModelKind::LinearJT)
    }

    pub fn capped_jt(delta: f64, rho0: f64) -> Self {
        TwoStatePotential { delta, rho0, ..Self::with_kind(ModelKind::CappedJT) }
    }

    pub fn twisted_capped_jt(delta: f64, rho0: f64) -> Self {
        TwoStatePotential { delta, rho0, ..Self::with_kind(ModelKind::TwistedCappedJT) }
    }

    pub fn two_ci(x0: f64) -> Self {
        TwoStatePotential { x0, ..Self::with_kind(ModelKind::TwoCI) }
    }

    /// Cap the two-intersection model with gap `delta` beyond `rho0`.
    pub fn capped(mut self, delta: f64, rho0: f64) -> Self {
        self.delta = delta;
        self.rho0 = rho0;
        self.cap_two_ci = true;
        self
    }

    pub fn with_barrier(mut self, barrier: Barrier) -> Self {
        self.barrier = Some(barrier);
        self
    }

    /// Check parameters for the selected model.
    pub fn validate(&self) -> Result<()> {
        let capped = matches!(self.kind, ModelKind::CappedJT | ModelKind::TwistedCappedJT)
            || (self.kind == ModelKind::TwoCI && self.cap_two_ci);
        if capped && !(self.delta > 0.0 && self.rho0 > 0.0) {
            return Err(Error::Config(format!(
                "capped model needs delta > 0 and rho0 > 0 (got {}, {})",
                self.delta, self.rho0
            )));
        }
        if self.kind == ModelKind::TwoCI && !(self.x0.is_finite() && self.x0 != 0.0) {
            return Err(Error::Config(format!("two_ci needs a nonzero finite x0, got {}", self.x0)));
        }
        if let Some(b) = self.barrier {
            if !(b.height.is_finite() && b.radius > 0.0) {
                return Err(Error::Config("barrier needs finite height and positive radius".into()));
            }
        }
        Ok(())
    }

    /// Uncapped real pair `(h, g)` underlying the model; the twisted model's
    /// off-diagonal modulus is returned as `g`.
    pub fn raw_pair(&self, x: f64, y: f64) -> (f64, f64) {
        match self.kind {
            ModelKind::Free => (0.0, 0.0),
            ModelKind::LinearJT | ModelKind::CappedJT | ModelKind::TwistedCappedJT => (x, y),
            ModelKind::TwoCI => (x * (self.x0 - x), y),
        }
    }

    /// Diagonal entry `h` and off-diagonal entry `c` of the traceless part.
    pub fn coefficients(&self, x: f64, y: f64) -> (f64, C64) {
        match self.kind {
            ModelKind::Free => (0.0, C64::new(0.0, 0.0)),
            ModelKind::LinearJT => (x, C64::new(y, 0.0)),
            ModelKind::CappedJT => {
                let xi = self.cap(x.hypot(y));
                (xi * x, C64::new(xi * y, 0.0))
            }
            ModelKind::TwistedCappedJT => {
                let xi = self.cap(x.hypot(y));
                (xi * x, C64::from_polar(xi * y, -y.atan2(x)))
            }
            ModelKind::TwoCI => {
                let (h, g) = self.raw_pair(x, y);
                let xi = if self.cap_two_ci { self.cap(h.hypot(g)) } else { 1.0 };
                (xi * h, C64::new(xi * g, 0.0))
            }
        }
    }

    fn cap(&self, rho: f64) -> f64 {
        xi_factor(rho, self.rho0, self.delta).unwrap_or(0.0)
    }

    /// Scalar (identity) part, i.e. the barrier.
    pub fn scalar(&self, x: f64, y: f64) -> f64 {
        self.barrier.map_or(0.0, |b| b.value(x, y))
    }

    /// The full 2×2 matrix including the barrier.
    pub fn matrix(&self, x: f64, y: f64) -> Mat2 {
        let (h, c) = self.coefficients(x, y);
        let v = self.scalar(x, y);
        Mat2::hermitian_traceless(h, c) + Mat2::diag(v, v)
    }

    /// Eigenvalues `(-E, +E)` of the traceless part.
    pub fn eigenvalues(&self, x: f64, y: f64) -> (f64, f64) {
        let (h, c) = self.coefficients(x, y);
        let e = (h * h + c.norm_sqr()).sqrt();
        (-e, e)
    }

    /// Single-valued eigenframe: columns are the (excited, ground) states.
    ///
    /// The free model has no preferred frame and returns the identity.
    pub fn frame(&self, x: f64, y: f64) -> Result<Mat2> {
        match self.kind {
            ModelKind::Free => Ok(Mat2::IDENTITY),
            ModelKind::LinearJT | ModelKind::CappedJT | ModelKind::TwistedCappedJT => {
                if x == 0.0 && y == 0.0 {
                    return Err(Error::SingularBasis { x, y });
                }
                let phi = y.atan2(x);
                Ok(if self.kind == ModelKind::TwistedCappedJT { u_d(phi) } else { u_c(phi) })
            }
            ModelKind::TwoCI => {
                let (h, g) = self.raw_pair(x, y);
                u_general(h, g).map_err(|_| Error::SingularBasis { x, y })
            }
        }
    }

    /// Angle `χ` with `∇χ` equal to the ground-state gauge potential of
    /// [`Self::frame`], defined modulo π (zero where that potential vanishes).
    pub fn ground_connection_angle(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            ModelKind::Free | ModelKind::TwistedCappedJT => 0.0,
            _ => {
                let (h, g) = self.raw_pair(x, y);
                0.5 * g.atan2(h)
            }
        }
    }

    /// Parallel-transport phase relative to a reference point, continuous in
    /// any region that does not encircle an intersection.
    pub fn transport_phase(&self, x: f64, y: f64, reference: (f64, f64)) -> f64 {
        let a = 2.0 * self.ground_connection_angle(x, y);
        let b = 2.0 * self.ground_connection_angle(reference.0, reference.1);
        0.5 * wrap_angle(a - b)
    }

    /// Locations of the conical intersections.
    pub fn intersections(&self) -> Vec<(f64, f64)> {
        match self.kind {
            ModelKind::Free => vec![],
            ModelKind::TwoCI => vec![(0.0, 0.0), (self.x0, 0.0)],
            _ => vec![(0.0, 0.0)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn hbo(e: f64) -> Mat2 {
        Mat2::diag(e, -e)
    }

    #[test]
    fn xi_factor_branches() {
        let (r0, d) = (5.0, 1.3);
        assert!((xi_factor(2.0 * r0, r0, d).unwrap() - d / (2.0 * r0)).abs() < 1e-16);
        assert!((xi_factor(r0 / 2.0, r0, d).unwrap() - d / r0).abs() < 1e-16);
        assert!((xi_factor(r0, r0, d).unwrap() - d / r0).abs() < 1e-16);
        let eps = 1e-12;
        assert!((xi_factor(r0 + eps, r0, d).unwrap() - xi_factor(r0 - eps, r0, d).unwrap()).abs() < 1e-12);
        assert!(xi_factor(0.0, 0.0, d).is_err());
        assert!(xi_factor(-1.0, 1.0, d).is_err());
    }

    #[test]
    fn linear_cone_eigenvalues() {
        assert_eq!(TwoStatePotential::linear_jt().eigenvalues(3.0, 4.0), (-5.0, 5.0));
    }

    #[test]
    fn capped_surfaces_are_flat_outside() {
        let m = TwoStatePotential::capped_jt(1.0, 5.0);
        let (lo, hi) = m.eigenvalues(6.0, 8.0);
        assert!((lo + 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        let (lo, _) = m.eigenvalues(1.2, -1.6);
        assert!((lo + 2.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn uc_single_valued_and_real_rotation_is_not() {
        assert!(u_c(0.0).max_abs_diff(&Mat2::IDENTITY) < 1e-16);
        assert!(u_c(2.0 * PI).max_abs_diff(&Mat2::IDENTITY) < 1e-14);
        assert!(u_real(2.0 * PI).max_abs_diff(&Mat2::IDENTITY.scale((-1.0).into())) < 1e-14);
    }

    #[test]
    fn uc_reconstructs_linear_cone_at_one_one() {
        let (x, y) = (1.0f64, 1.0f64);
        let u = u_c(y.atan2(x));
        let h = u * hbo(x.hypot(y)) * u.adjoint();
        assert!(h.max_abs_diff(&TwoStatePotential::linear_jt().matrix(x, y)) < 1e-14);
    }

    #[test]
    fn ud_reconstructs_twisted_model() {
        let (x, y) = (0.3f64, 0.7f64);
        let m = TwoStatePotential::twisted_capped_jt(1.0, 5.0);
        let u = u_d(y.atan2(x));
        let (_, e) = m.eigenvalues(x, y);
        assert!((u * hbo(e) * u.adjoint()).max_abs_diff(&m.matrix(x, y)) < 1e-12);
        assert!(u_d(0.0).max_abs_diff(&Mat2::IDENTITY) < 1e-16);
    }

    #[test]
    fn u_general_reduces_to_uc_and_identity() {
        assert!(u_general(1.0, 0.0).unwrap().max_abs_diff(&Mat2::IDENTITY) < 1e-16);
        let (x, y) = (-0.4f64, 1.7f64);
        assert!(u_general(x, y).unwrap().max_abs_diff(&u_c(y.atan2(x))) < 1e-14);
        assert!(matches!(u_general(0.0, 0.0), Err(Error::SingularBasis { .. })));
    }

    #[test]
    fn u_general_sandwich_convention() {
        let (h, g) = (0.6, -0.8);
        let u = u_general(h, g).unwrap();
        let target = Mat2::real(h, g, g, -h);
        assert!((u * hbo(1.0) * u.adjoint()).max_abs_diff(&target) < 1e-15);
        // The reversed sandwich does not reproduce the matrix.
        assert!((u.adjoint() * hbo(1.0) * u).max_abs_diff(&target) > 0.1);
    }

    #[test]
    fn barrier_profile() {
        let b = Barrier { height: 50.0, radius: 1.0 };
        assert_eq!(b.value(0.0, 0.0), 50.0);
        assert!(b.value(3.0, 0.0) < 1e-10 * 50.0);
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let v = b.value(0.03 * i as f64, 0.0);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn two_ci_has_two_intersections() {
        let m = TwoStatePotential::two_ci(3.0);
        for (x, y) in m.intersections() {
            let (h, c) = m.coefficients(x, y);
            assert_eq!((h, c.norm()), (0.0, 0.0));
        }
        assert!(m.frame(3.0, 0.0).is_err());
        assert!(m.frame(1.5, 0.0).is_ok());
    }

    #[test]
    fn capped_two_ci_is_flat_far_away() {
        let m = TwoStatePotential::two_ci(3.0).capped(1.0, 5.0);
        let (lo, hi) = m.eigenvalues(-20.0, 3.0);
        assert!((lo + 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        let u = TwoStatePotential::two_ci(3.0);
        assert!((m.frame(-20.0, 3.0).unwrap()).max_abs_diff(&u.frame(-20.0, 3.0).unwrap()) < 1e-15);
    }

    #[test]
    fn transport_phase_is_continuous_across_branch_cut() {
        let m = TwoStatePotential::capped_jt(1.0, 5.0);
        let r = (-20.0, 0.0);
        let above = m.transport_phase(-20.0, 1e-9, r);
        let below = m.transport_phase(-20.0, -1e-9, r);
        assert!((above - below).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn matrices_are_hermitian_and_traceless(x in -30.0..30.0f64, y in -30.0..30.0f64, which in 0usize..5) {
            let m = [
                TwoStatePotential::free(),
                TwoStatePotential::linear_jt(),
                TwoStatePotential::capped_jt(1.0, 5.0),
                TwoStatePotential::twisted_capped_jt(1.0, 5.0),
                TwoStatePotential::two_ci(3.0).capped(1.0, 5.0),
            ][which];
            let h = m.matrix(x, y);
            prop_assert!(h.hermiticity_defect() <= 1e-15);
            prop_assert!(h.trace().norm() <= 1e-15);
        }

        #[test]
        fn twisted_and_capped_share_surfaces(x in -20.0..20.0f64, y in -20.0..20.0f64) {
            let a = TwoStatePotential::capped_jt(1.0, 5.0).eigenvalues(x, y);
            let b = TwoStatePotential::twisted_capped_jt(1.0, 5.0).eigenvalues(x, y);
            prop_assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        }

        #[test]
        fn frames_are_unitary_and_diagonalize(x in -10.0..10.0f64, y in -10.0..10.0f64, which in 0usize..4) {
            prop_assume!(x.hypot(y) > 1e-6 && (x - 3.0).hypot(y) > 1e-6);
            let m = [
                TwoStatePotential::linear_jt(),
                TwoStatePotential::capped_jt(1.0, 5.0),
                TwoStatePotential::twisted_capped_jt(1.0, 5.0),
                TwoStatePotential::two_ci(3.0).capped(2.0, 4.0),
            ][which];
            let w = m.frame(x, y).unwrap();
            prop_assert!(w.unitarity_defect() < 1e-12);
            let (h, c) = m.coefficients(x, y);
            let e = (h * h + c.norm_sqr()).sqrt();
            let rebuilt = w * hbo(e) * w.adjoint();
            prop_assert!(rebuilt.max_abs_diff(&Mat2::hermitian_traceless(h, c)) < 1e-12 * (1.0 + e));
        }

        #[test]
        fn frames_single_valued(phi in -10.0..10.0f64) {
            prop_assert!(u_c(phi).max_abs_diff(&u_c(phi + 2.0 * PI)) < 1e-13);
            prop_assert!(u_d(phi).max_abs_diff(&u_d(phi + 2.0 * PI)) < 1e-13);
        }

        #[test]
        fn u_general_unitary(h in -5.0..5.0f64, g in -5.0..5.0f64) {
            prop_assume!(h.hypot(g) > 1e-9);
            prop_assert!(u_general(h, g).unwrap().unitarity_defect() < 1e-12);
        }
    }
}
