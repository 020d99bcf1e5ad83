//! Aharonov-Bohm scattering by a flux line with a short-range potential.
//!
//! The regular solution for flux `α` is `Σ_m e^{imθ}(a_m J_ν(kr) + b_m H_ν(kr))`
//! with `ν = |m - α|` and `a_m = e^{-iπν/2}`. The incident wave approaches
//! from `+x`, so `θ = π` is the forward direction. Cross sections are
//! reported as `2π·k·dσ/dθ`, which for a bare flux line is
//! `sin²(πα)/cos²(θ/2)` at every energy.

use crate::error::{Error, Result};
use crate::linalg::wrap_angle;
use crate::special::{bessel_jy, erf, halfint_jy, BesselJY};
use num_complex::Complex64 as C64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Scalar potential `U(r)` in the radial equation.
#[derive(Clone)]
pub enum RadialPotential {
    Zero,
    /// Impenetrable disk of the given radius.
    HardDisk {
        radius: f64,
    },
    /// Smooth potential negligible beyond `range`.
    Smooth {
        profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        range: f64,
    },
}

impl std::fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadialPotential::Zero => write!(f, "Zero"),
            RadialPotential::HardDisk { radius } => write!(f, "HardDisk {{ radius: {radius} }}"),
            RadialPotential::Smooth { range, .. } => write!(f, "Smooth {{ range: {range} }}"),
        }
    }
}

impl RadialPotential {
    /// `height·exp(-(r/width)²)`; the matching radius defaults to `5·width`.
    pub fn gaussian(height: f64, width: f64) -> Self {
        RadialPotential::Smooth { profile: Arc::new(move |r| height * (-(r / width).powi(2)).exp()), range: width }
    }

    /// Default matching radius for wavenumber `k`.
    pub fn default_matching_radius(&self, k: f64) -> f64 {
        match self {
            RadialPotential::Zero => 1.0,
            RadialPotential::HardDisk { radius } => radius + 10.0 / k,
            RadialPotential::Smooth { range, .. } => 5.0 * range,
        }
    }

    /// Smallest radius at which the exterior Bessel form is exact (to the
    /// potential's tail).
    pub fn exterior_radius(&self, r_c: f64) -> f64 {
        match self {
            RadialPotential::Zero => 0.0,
            RadialPotential::HardDisk { radius } => *radius,
            RadialPotential::Smooth { .. } => r_c,
        }
    }
}

/// Boundary data for one partial wave at the matching radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// `y = R'(r_c)/R(r_c)` with the derivative taken in `r`.
    LogDerivative(f64),
    /// `R(r_c) = 0`: a hard wall at the matching radius.
    HardWall,
    /// No potential: the regular Bessel function, `b = 0`.
    Free,
}

/// Integration steps for the radial equation.
pub const DEFAULT_STEPS: usize = 4096;

/// Log-derivative `R'/R` at `r_c` of the regular solution of
/// `R'' + R'/r + (k² - U - ν²/r²)R = 0`.
///
/// With `r = e^x` the equation becomes `R_xx + ((k² - U)r² - ν²)R = 0`,
/// integrated by the renormalized Numerov recursion on a uniform `x` grid.
/// It starts from the small-`r` series, or from the wall of a hard disk.
pub fn radial_logderiv(u: &RadialPotential, nu: f64, k: f64, r_c: f64) -> Result<f64> {
    radial_logderiv_steps(u, nu, k, r_c, DEFAULT_STEPS)
}

pub fn radial_logderiv_steps(u: &RadialPotential, nu: f64, k: f64, r_c: f64, steps: usize) -> Result<f64> {
    if !(k > 0.0 && nu >= 0.0 && r_c > 0.0 && steps >= 8) {
        return Err(Error::Domain(format!(
            "radial_logderiv needs k > 0, nu >= 0, r_c > 0 (k={k}, nu={nu}, r_c={r_c})"
        )));
    }
    let k2 = k * k;
    let zero = |_: f64| 0.0;
    let (wall, potential): (Option<f64>, &dyn Fn(f64) -> f64) = match u {
        RadialPotential::Zero => (None, &zero),
        RadialPotential::HardDisk { radius } => {
            if !(r_c > *radius) {
                return Err(Error::Domain(format!("matching radius {r_c} must exceed the disk radius {radius}")));
            }
            (Some(*radius), &zero)
        }
        RadialPotential::Smooth { profile, .. } => (None, profile.as_ref()),
    };
    let kappa2 = k2 - potential(0.0);
    // Below r_min the three-term series is exact to double precision.
    let r_min = match wall {
        Some(a) => a,
        None => (1e-2 / kappa2.abs().sqrt().max(1e-300)).min(1e-3 * r_c),
    };
    let x0 = r_min.ln();
    let h = (r_c.ln() - x0) / steps as f64;
    let t = |n: usize| {
        let r = (x0 + n as f64 * h).exp();
        -h * h * ((k2 - potential(r)) * r * r - nu * nu) / 12.0
    };
    let numerov_u = |tn: f64| (2.0 + 10.0 * tn) / (1.0 - tn);

    // ratio = F_{n+1}/F_n with F = (1 - T)·R.
    let mut ratio = if wall.is_some() {
        // R(a) = 0 so F_0 = 0 and the first ratio is infinite.
        f64::INFINITY
    } else {
        let series = |r: f64| {
            let z = kappa2 * r * r;
            1.0 - z / (4.0 * (nu + 1.0)) + z * z / (32.0 * (nu + 1.0) * (nu + 2.0))
        };
        let growth = (nu * h).exp() * series(r_min * h.exp()) / series(r_min);
        growth * (1.0 - t(1)) / (1.0 - t(0))
    };
    let mut previous = ratio;
    for n in 1..=steps {
        previous = ratio;
        ratio = numerov_u(t(n)) - 1.0 / ratio;
    }
    // previous = F_N/F_{N-1}, ratio = F_{N+1}/F_N.
    let (tm, t0, tp) = (t(steps - 1), t(steps), t(steps + 1));
    let up_over = ratio * (1.0 - t0) / (1.0 - tp);
    let down_over = (1.0 - t0) / ((1.0 - tm) * previous);
    let dx = ((0.5 - tp) * up_over - (0.5 - tm) * down_over) / h;
    let y = dx / r_c;
    if !y.is_finite() {
        return Err(Error::Accuracy(format!("radial solution vanishes at the matching radius (nu={nu}, r_c={r_c})")));
    }
    Ok(y)
}

fn bessel_at(nu: f64, x: f64) -> Result<BesselJY> {
    bessel_jy(nu, x)
}

/// `(a_m, b_m)` for flux `alpha` from the boundary data at `r_c`.
pub fn coefficients(boundary: Boundary, k: f64, r_c: f64, alpha: f64, m: i64) -> Result<(C64, C64)> {
    let nu = (m as f64 - alpha).abs();
    let a = C64::from_polar(1.0, -0.5 * PI * nu);
    let b = match boundary {
        Boundary::Free => C64::new(0.0, 0.0),
        Boundary::HardWall => {
            let v = bessel_at(nu, k * r_c)?;
            let h = v.hankel1();
            if !(h.norm() >= 1e-300) {
                return Err(Error::IllConditioned { nu, denominator: h.norm() });
            }
            if !h.norm().is_finite() {
                C64::new(0.0, 0.0)
            } else {
                -a * v.j / h
            }
        }
        Boundary::LogDerivative(y) => {
            let v = bessel_at(nu, k * r_c)?;
            let h = v.hankel1();
            let den = k * v.hankel1_prime() - y * h;
            if !den.norm().is_finite() {
                C64::new(0.0, 0.0)
            } else if !(den.norm() >= 1e-300) {
                return Err(Error::IllConditioned { nu, denominator: den.norm() });
            } else {
                a * (y * v.j - k * v.jp) / den
            }
        }
    };
    Ok((a, b))
}

/// One partial wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialWave {
    pub m: i64,
    pub nu: f64,
    pub a: C64,
    pub b: C64,
    pub boundary: Boundary,
}

/// Options for [`PartialWaveSolution::solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub m_max: usize,
    /// Matching radius; the potential's default when `None`.
    pub r_c: Option<f64>,
    pub steps: usize,
    /// Largest `k·r` at which the wave will be evaluated; raises `m_max`
    /// until the regular series converges there.
    pub max_kr: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { m_max: 40, r_c: None, steps: DEFAULT_STEPS, max_kr: 0.0 }
    }
}

/// Coefficient tables for `m ∈ [-m_max, m_max + 1]`.
#[derive(Debug, Clone)]
pub struct PartialWaveSolution {
    pub alpha: f64,
    pub k: f64,
    pub r_c: f64,
    pub m_max: usize,
    /// Waves in order of increasing `m`.
    pub waves: Vec<PartialWave>,
    /// The exterior form is valid for `r >= exterior_radius`.
    pub exterior_radius: f64,
}

const M_MAX_CAP: usize = 4000;

impl PartialWaveSolution {
    pub fn solve(potential: &RadialPotential, k: f64, alpha: f64, opts: SolveOptions) -> Result<Self> {
        if !(k > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("need k > 0 and finite alpha (k={k}, alpha={alpha})")));
        }
        let r_c = opts.r_c.unwrap_or_else(|| potential.default_matching_radius(k));
        let kr = opts.max_kr.max(0.0);
        let mut m_max = opts.m_max.max((kr + 10.0 * kr.cbrt() + 20.0).ceil() as usize + alpha.abs().ceil() as usize);
        let mut cache: HashMap<u64, Boundary> = HashMap::new();
        loop {
            let mut waves = Vec::with_capacity(2 * m_max + 2);
            for m in -(m_max as i64)..=(m_max as i64 + 1) {
                let nu = (m as f64 - alpha).abs();
                let boundary = match cache.get(&nu.to_bits()) {
                    Some(b) => *b,
                    None => {
                        let b = match potential {
                            RadialPotential::Zero => Boundary::Free,
                            _ => Boundary::LogDerivative(radial_logderiv_steps(potential, nu, k, r_c, opts.steps)?),
                        };
                        cache.insert(nu.to_bits(), b);
                        b
                    }
                };
                let (a, b) = coefficients(boundary, k, r_c, alpha, m)?;
                waves.push(PartialWave { m, nu, a, b, boundary });
            }
            let biggest = waves.iter().map(|w| w.b.norm()).fold(0.0, f64::max);
            let edge = waves[0].b.norm().max(waves[waves.len() - 1].b.norm());
            if edge <= 1e-12 * biggest || biggest == 0.0 {
                return Ok(PartialWaveSolution {
                    alpha,
                    k,
                    r_c,
                    m_max,
                    waves,
                    exterior_radius: potential.exterior_radius(r_c),
                });
            }
            if m_max >= M_MAX_CAP {
                return Err(Error::Truncation { tail: edge / biggest });
            }
            m_max = (m_max + 20).min(M_MAX_CAP);
        }
    }

    /// Solution for a hard disk from the exact exterior boundary condition
    /// `R(a) = 0`, without radial integration.
    pub fn hard_disk_exact(radius: f64, k: f64, alpha: f64, m_max: usize) -> Result<Self> {
        let mut waves = Vec::new();
        for m in -(m_max as i64)..=(m_max as i64 + 1) {
            let nu = (m as f64 - alpha).abs();
            let (a, b) = coefficients(Boundary::HardWall, k, radius, alpha, m)?;
            waves.push(PartialWave { m, nu, a, b, boundary: Boundary::HardWall });
        }
        Ok(PartialWaveSolution { alpha, k, r_c: radius, m_max, waves, exterior_radius: radius })
    }

    pub fn wave(&self, m: i64) -> Option<&PartialWave> {
        let i = m + self.m_max as i64;
        if i < 0 {
            return None;
        }
        self.waves.get(i as usize)
    }

    fn radial_terms(&self, r: f64) -> Result<Vec<(C64, C64)>> {
        if r < self.exterior_radius {
            return Err(Error::Domain(format!(
                "r = {r} is inside the interaction region (r < {})",
                self.exterior_radius
            )));
        }
        let x = self.k * r;
        let half = (self.alpha - 0.5).fract() == 0.0;
        let max_nu = self.waves.iter().map(|w| w.nu).fold(0.0, f64::max);
        let table = if half && x > 0.0 { Some(halfint_jy((max_nu - 0.5).round() as usize, x)?) } else { None };
        let mut out = Vec::with_capacity(self.waves.len());
        for w in &self.waves {
            let (j, y) = if x == 0.0 {
                (if w.nu == 0.0 { 1.0 } else { 0.0 }, f64::NEG_INFINITY)
            } else if let Some((jt, yt)) = &table {
                let n = (w.nu - 0.5).round() as usize;
                (jt[n], yt[n])
            } else {
                let v = bessel_jy(w.nu, x)?;
                (v.j, v.y)
            };
            let scattered = if w.b == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { w.b * C64::new(j, y) };
            out.push((w.a * j, scattered));
        }
        Ok(out)
    }

    fn check_tail(terms: &[C64]) -> Result<()> {
        let tail = terms[0].norm() + terms[terms.len() - 1].norm();
        if !(tail < 1e-12) {
            return Err(Error::Truncation { tail });
        }
        Ok(())
    }

    /// `Σ_m e^{imθ}(a_m J_ν(kr) + b_m H_ν(kr))`.
    pub fn psi_total(&self, r: f64, theta: f64) -> Result<C64> {
        let radial = self.radial_terms(r)?;
        let terms: Vec<C64> = self
            .waves
            .iter()
            .zip(&radial)
            .map(|(w, (p, s))| C64::from_polar(1.0, w.m as f64 * theta) * (p + s))
            .collect();
        Self::check_tail(&terms)?;
        Ok(pairwise_sum(&terms))
    }

    /// The same sum for `α = 1/2` folded onto `ν = n + 1/2`:
    /// `Σ_n e^{i(n+1)θ}(1 + e^{-i(2n+1)θ})(a J + b H)`, which vanishes
    /// identically on `θ = ±π`.
    pub fn psi_total_folded(&self, r: f64, theta: f64) -> Result<C64> {
        if self.alpha != 0.5 {
            return Err(Error::Domain(format!("the folded form needs alpha = 1/2, got {}", self.alpha)));
        }
        let radial = self.radial_terms(r)?;
        let m_max = self.m_max as i64;
        let mut terms = Vec::with_capacity(self.m_max + 1);
        for n in 0..=m_max {
            let i = (n + 1 + m_max) as usize;
            let (p, s) = radial[i];
            let fold = C64::new(1.0, 0.0) + C64::from_polar(1.0, -((2 * n + 1) as f64) * theta);
            terms.push(C64::from_polar(1.0, (n + 1) as f64 * theta) * fold * (p + s));
        }
        let tail = terms[terms.len() - 1].norm();
        if !(tail < 1e-12) {
            return Err(Error::Truncation { tail });
        }
        Ok(pairwise_sum(&terms))
    }

    /// Amplitude `Σ_m b_m e^{-iπν/2} e^{imθ}` of the short-range part.
    pub fn short_range_amplitude(&self, theta: f64) -> C64 {
        let terms: Vec<C64> =
            self.waves.iter().map(|w| w.b * C64::from_polar(1.0, -0.5 * PI * w.nu + w.m as f64 * theta)).collect();
        pairwise_sum(&terms)
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => C64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Scattering amplitude of a bare flux line, normalized so that
/// `4|F|² = sin²(πα)/cos²(θ/2)`.
pub fn ab_amplitude(alpha: f64, theta: f64) -> Result<C64> {
    let n = alpha.floor();
    let frac = alpha - n;
    if frac == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let u = wrap_angle(theta - PI);
    let s = (0.5 * u).sin();
    if s.abs() < 1e-12 {
        return Err(Error::Divergence { theta });
    }
    Ok(C64::from_polar(-(PI * frac).sin() / (2.0 * s), 0.5 * u + n * theta))
}

/// `sin²(πα)/cos²(θ/2)`, independent of energy.
pub fn xs_pure_ab(alpha: f64, theta: f64) -> Result<f64> {
    let c = (0.5 * theta).cos();
    if c.abs() < 1e-12 {
        return Err(Error::Divergence { theta });
    }
    let s = (PI * alpha).sin();
    // sin(πn) is not exactly zero in floating point.
    let s = if alpha.fract() == 0.0 { 0.0 } else { s };
    Ok(s * s / (c * c))
}

/// `2π·k·dσ/dθ` at each angle: the short-range amplitude from the outgoing
/// Hankel asymptotics plus the bare flux-line amplitude.
pub fn differential_cross_section(solution: &PartialWaveSolution, thetas: &[f64]) -> Result<Vec<f64>> {
    thetas
        .iter()
        .map(|&theta| {
            let f = ab_amplitude(solution.alpha, theta)? + solution.short_range_amplitude(theta);
            Ok(4.0 * f.norm_sqr())
        })
        .collect()
}

/// Flux-line wave `-e^{iφ/2} e^{-ikρcosφ} erf(e^{3iπ/4}·√(2kρ)·cos(φ/2))`
/// for `α = 1/2`, with `φ ∈ [-π, π]`.
pub fn psi_ab(rho: f64, phi: f64, k: f64) -> C64 {
    if rho == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let phi = if phi.abs() <= PI { phi } else { wrap_angle(phi) };
    let z = C64::from_polar((2.0 * k * rho).sqrt() * (0.5 * phi).cos(), 0.75 * PI);
    -C64::from_polar(1.0, 0.5 * phi - k * rho * phi.cos()) * erf(z)
}

/// Incident wave `e^{-ikρcosφ}·e^{iφ/2}` approaching from `+x`.
pub fn psi_incident(rho: f64, phi: f64, k: f64) -> C64 {
    C64::from_polar(1.0, 0.5 * phi - k * rho * phi.cos())
}

/// Flux line inside an impenetrable disk of radius `a` (`α = 1/2`):
/// the bare wave minus `Σ_m e^{-iπν/2} e^{imθ} J_ν(ka)/H_ν(ka)·H_ν(kr)`.
pub fn psi_flux_disk(r: f64, theta: f64, k: f64, a: f64, m_max: usize) -> Result<C64> {
    let (ja, ya) = halfint_jy(m_max, k * a)?;
    let (jr, yr) = halfint_jy(m_max, k * r)?;
    let mut terms = Vec::with_capacity(2 * m_max + 2);
    for m in -(m_max as i64)..=(m_max as i64 + 1) {
        let nu = (m as f64 - 0.5).abs();
        let n = (nu - 0.5).round() as usize;
        let ha = C64::new(ja[n], ya[n]);
        if !ha.norm().is_finite() {
            continue;
        }
        let ratio = ja[n] / ha;
        terms.push(C64::from_polar(1.0, -0.5 * PI * nu + m as f64 * theta) * ratio * C64::new(jr[n], yr[n]));
    }
    Ok(psi_ab(r, wrap_angle(theta), k) - pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_ab_cross_section_values() {
        assert!((xs_pure_ab(0.5, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(xs_pure_ab(1.0, 0.7).unwrap(), 0.0);
        assert!((xs_pure_ab(0.5, 2.0 * PI / 3.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(xs_pure_ab(0.5, PI), Err(Error::Divergence { .. })));
    }

    #[test]
    fn amplitude_modulus_matches_formula() {
        for alpha in [0.25, 0.5, 1.3, -0.7] {
            for theta in [0.0, 1.0, -2.0, 3.0] {
                let f = ab_amplitude(alpha, theta).unwrap();
                let want = xs_pure_ab(alpha, theta).unwrap();
                assert!((4.0 * f.norm_sqr() - want).abs() < 1e-12 * want.max(1.0));
            }
        }
        assert!(ab_amplitude(0.5, PI).is_err());
        assert_eq!(ab_amplitude(2.0, PI).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn psi_ab_nodal_ray_and_origin() {
        assert!(psi_ab(3.0, PI, 1.0).norm() < 1e-15);
        assert!(psi_ab(3.0, -PI, 1.0).norm() < 1e-15);
        assert_eq!(psi_ab(0.0, 0.3, 1.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn psi_ab_approaches_incident_wave() {
        let (k, rho, phi) = (1.0, 1e4, PI / 4.0);
        assert!((psi_ab(rho, phi, k) - psi_incident(rho, phi, k)).norm() < 0.01);
        // At kρ = 50 the difference is the outgoing wave |F|·sqrt(2/(πkρ)).
        let rho = 50.0;
        let scattered = ab_amplitude(0.5, phi).unwrap().norm() * (2.0 / (PI * k * rho)).sqrt();
        let diff = (psi_ab(rho, phi, k) - psi_incident(rho, phi, k)).norm();
        assert!((diff - scattered).abs() < 0.05 * scattered, "{diff} vs {scattered}");
    }

    #[test]
    fn partial_wave_sum_reproduces_erf_form() {
        let sol = PartialWaveSolution::solve(
            &RadialPotential::Zero,
            1.0,
            0.5,
            SolveOptions { max_kr: 30.0, ..Default::default() },
        )
        .unwrap();
        for theta in [0.3, 1.7, -2.9, 3.0] {
            let a = sol.psi_total(30.0, theta).unwrap();
            let b = psi_ab(30.0, theta, 1.0);
            assert!((a - b).norm() < 1e-6, "theta={theta}: {a} vs {b}");
        }
    }

    #[test]
    fn free_log_derivative_is_bessel() {
        let (k, r_c) = (1.3, 4.0);
        for nu in [0.5, 1.5, 0.25, 3.0] {
            let y = radial_logderiv(&RadialPotential::Zero, nu, k, r_c).unwrap();
            let v = bessel_jy(nu, k * r_c).unwrap();
            let want = k * v.jp / v.j;
            assert!((y - want).abs() < 1e-9 * want.abs().max(1.0), "nu={nu}: {y} vs {want}");
        }
    }

    #[test]
    fn zero_potential_has_no_scattered_wave() {
        let (k, r_c) = (0.8, 3.0);
        for m in -3..4 {
            let nu = (m as f64 - 0.5).abs();
            let v = bessel_jy(nu, k * r_c).unwrap();
            let (a, b) = coefficients(Boundary::LogDerivative(k * v.jp / v.j), k, r_c, 0.5, m).unwrap();
            assert!((a.norm() - 1.0).abs() < 1e-15);
            assert!(b.norm() < 1e-14);
        }
    }

    #[test]
    fn hard_disk_integration_matches_exact_coefficients() {
        for k in [0.01, 0.1, 1.0, 10.0] {
            let disk = RadialPotential::HardDisk { radius: 1.0 };
            let num = PartialWaveSolution::solve(&disk, k, 0.5, SolveOptions::default()).unwrap();
            let exact = PartialWaveSolution::hard_disk_exact(1.0, k, 0.5, num.m_max).unwrap();
            let scale = exact.waves.iter().map(|w| w.b.norm()).fold(0.0, f64::max);
            for (a, b) in num.waves.iter().zip(&exact.waves) {
                assert!((a.b - b.b).norm() < 1e-6 * scale, "k={k} m={}: {} vs {}", a.m, a.b, b.b);
            }
            let thetas = [0.0, 1.0, 2.0, -2.5];
            let xa = differential_cross_section(&num, &thetas).unwrap();
            let xb = differential_cross_section(&exact, &thetas).unwrap();
            for (p, q) in xa.iter().zip(&xb) {
                assert!((p - q).abs() < 1e-7 * q, "k={k}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn hard_disk_unit_wavenumber_s_wave() {
        let v = bessel_jy(0.5, 1.0).unwrap();
        let (_, b0) = coefficients(Boundary::HardWall, 1.0, 1.0, 0.5, 0).unwrap();
        let want = -C64::from_polar(1.0, -PI / 4.0) * v.j / v.hankel1();
        assert!((b0 - want).norm() < 1e-15);
        let disk = RadialPotential::HardDisk { radius: 1.0 };
        let sol = PartialWaveSolution::solve(&disk, 1.0, 0.5, SolveOptions::default()).unwrap();
        assert!((sol.wave(0).unwrap().b - want).norm() < 1e-10);
    }

    #[test]
    fn coefficient_symmetry_for_half_flux() {
        for pot in [
            RadialPotential::HardDisk { radius: 1.0 },
            RadialPotential::gaussian(3.0, 0.7),
            RadialPotential::gaussian(-2.0, 1.2),
        ] {
            let sol = PartialWaveSolution::solve(&pot, 1.4, 0.5, SolveOptions::default()).unwrap();
            for n in 0..=20i64 {
                let (p, q) = (sol.wave(-n).unwrap(), sol.wave(n + 1).unwrap());
                assert!((p.a - q.a).norm() < 1e-12 && (p.b - q.b).norm() < 1e-12, "{pot:?} n={n}");
                assert_eq!(p.boundary, q.boundary);
            }
        }
    }

    #[test]
    fn matching_radius_independence() {
        let pot = RadialPotential::gaussian(2.0, 0.8);
        let k = 1.1;
        let base = PartialWaveSolution::solve(&pot, k, 0.5, SolveOptions::default()).unwrap();
        let far =
            PartialWaveSolution::solve(&pot, k, 0.5, SolveOptions { r_c: Some(1.5 * base.r_c), ..Default::default() })
                .unwrap();
        let thetas: Vec<f64> = (0..12).map(|i| -2.9 + 0.5 * i as f64).collect();
        let a = differential_cross_section(&base, &thetas).unwrap();
        let b = differential_cross_section(&far, &thetas).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn folded_and_direct_sums_agree() {
        let disk = RadialPotential::HardDisk { radius: 1.0 };
        let sol =
            PartialWaveSolution::solve(&disk, 2.0, 0.5, SolveOptions { max_kr: 20.0, ..Default::default() }).unwrap();
        for theta in [0.1, 1.0, 2.5, -1.3, PI, -PI] {
            let a = sol.psi_total(10.0, theta).unwrap();
            let b = sol.psi_total_folded(10.0, theta).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
        assert!(sol.psi_total_folded(10.0, PI).unwrap().norm() < 1e-12);
    }

    #[test]
    fn disk_reconstruction_identity() {
        let (k, a) = (1.0, 1.0);
        let sol = PartialWaveSolution::hard_disk_exact(a, k, 0.5, 80).unwrap();
        for theta in [0.4, 2.0, -2.5] {
            let direct = sol.psi_total(20.0, theta).unwrap();
            let explicit = psi_flux_disk(20.0, theta, k, a, 80).unwrap();
            assert!((direct - explicit).norm() < 1e-8);
        }
    }

    #[test]
    fn truncation_is_reported() {
        let sol = PartialWaveSolution::solve(
            &RadialPotential::Zero,
            1.0,
            0.5,
            SolveOptions { m_max: 5, ..Default::default() },
        )
        .unwrap();
        assert!(matches!(sol.psi_total(40.0, 0.3), Err(Error::Truncation { .. })));
    }

    #[test]
    fn low_energy_leading_term() {
        // ψ ≈ e^{-iπ/4}·J_{1/2}(kr)·(1 + e^{iφ}) as kr → 0.
        let (k, r) = (1.0, 1e-3);
        let j = crate::special::bessel_j_halfint(0.5, k * r).unwrap();
        let sol = PartialWaveSolution::solve(&RadialPotential::Zero, k, 0.5, SolveOptions::default()).unwrap();
        for phi in [0.2, 1.5, -2.0] {
            let lead = C64::from_polar(1.0, -PI / 4.0) * j * (C64::new(1.0, 0.0) + C64::from_polar(1.0, phi));
            for psi in [sol.psi_total(r, phi).unwrap(), psi_ab(r, phi, k)] {
                let ratio = psi / lead;
                assert!((ratio - 1.0).norm() < 2e-3, "phi={phi}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn s_wave_limit_is_isotropic() {
        let disk = RadialPotential::HardDisk { radius: 1.0 };
        let sol = PartialWaveSolution::solve(&disk, 0.01, 0.0, SolveOptions::default()).unwrap();
        let thetas: Vec<f64> = (0..36).map(|i| -PI + (i as f64 + 0.5) * PI / 18.0).collect();
        let xs = differential_cross_section(&sol, &thetas).unwrap();
        let (lo, hi) = xs.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(hi / lo < 1.1, "max/min {}", hi / lo);
    }
}
