//! Gauge potentials, Wilson loops and conical-intersection bookkeeping.
//!
//! For a real two-state Hamiltonian `[[h, g], [g, -h]]` the ground state
//! carries the Abelian potential `A = (h∇g - g∇h) / (2(h² + g²))`. Its curl
//! vanishes away from the intersections, and the Wilson loop around a
//! closed contour is `(-1)^n` for `n` enclosed (generic) intersections.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::models::TwoStatePotential;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Minimum clearance between a loop and any intersection.
pub const EPS_CI: f64 = 1e-6;

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

const MAX_SAMPLES: usize = 1 << 20;
const PHASE_TOL: f64 = 1e-8;

/// A pair of real functions `(h, g)` of the plane.
pub trait RealPair {
    fn eval(&self, x: f64, y: f64) -> (f64, f64);

    /// `[[h_x, h_y], [g_x, g_y]]`; central differences unless overridden.
    fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let d = FD_STEP;
        let (hxp, gxp) = self.eval(x + d, y);
        let (hxm, gxm) = self.eval(x - d, y);
        let (hyp, gyp) = self.eval(x, y + d);
        let (hym, gym) = self.eval(x, y - d);
        let s = 0.5 / d;
        [[(hxp - hxm) * s, (hyp - hym) * s], [(gxp - gxm) * s, (gyp - gym) * s]]
    }
}

/// Quadratic polynomials in the basis `[1, x, y, x², xy, y²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub h: [f64; 6],
    pub g: [f64; 6],
}

fn quad(c: &[f64; 6], x: f64, y: f64) -> f64 {
    c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
}

fn quad_grad(c: &[f64; 6], x: f64, y: f64) -> [f64; 2] {
    [c[1] + 2.0 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2.0 * c[5] * y]
}

impl Quadratic {
    /// `h = x, g = y`.
    pub fn linear_cone() -> Self {
        Quadratic { h: [0.0, 1.0, 0.0, 0.0, 0.0, 0.0], g: [0.0, 0.0, 1.0, 0.0, 0.0, 0.0] }
    }

    /// `h = x(x₀ - x), g = y`.
    pub fn two_ci(x0: f64) -> Self {
        Quadratic { h: [0.0, x0, 0.0, -1.0, 0.0, 0.0], g: [0.0, 0.0, 1.0, 0.0, 0.0, 0.0] }
    }

    /// The real pair behind a catalog model. Capping rescales `(h, g)` by a
    /// positive factor and leaves the projected potential unchanged, so the
    /// uncapped pair is returned. The twisted model has no real pair.
    pub fn from_model(model: &TwoStatePotential) -> Option<Self> {
        use crate::models::ModelKind::*;
        match model.kind {
            LinearJT | CappedJT => Some(Quadratic::linear_cone()),
            TwoCI => Some(Quadratic::two_ci(model.x0)),
            Free | TwistedCappedJT => None,
        }
    }
}

impl RealPair for Quadratic {
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (quad(&self.h, x, y), quad(&self.g, x, y))
    }

    fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        [quad_grad(&self.h, x, y), quad_grad(&self.g, x, y)]
    }
}

/// A closure-defined pair with finite-difference gradients.
pub struct PairFn<F>(pub F);

impl<F: Fn(f64, f64) -> (f64, f64)> RealPair for PairFn<F> {
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.0)(x, y)
    }
}

/// Projected ground-state gauge potential `(h∇g - g∇h) / (2(h² + g²))`.
pub fn projected_gauge<P: RealPair + ?Sized>(pair: &P, x: f64, y: f64) -> Result<[f64; 2]> {
    let (h, g) = pair.eval(x, y);
    let r2 = h * h + g * g;
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::Singularity { x, y });
    }
    let [dh, dg] = pair.jacobian(x, y);
    let s = 0.5 / r2;
    Ok([(h * dg[0] - g * dh[0]) * s, (h * dg[1] - g * dh[1]) * s])
}

/// A real (Abelian) vector potential on the plane.
pub trait AbelianGauge {
    fn potential(&self, x: f64, y: f64) -> Result<[f64; 2]>;
}

/// The projected potential of a real pair as an [`AbelianGauge`].
pub struct Projected<P>(pub P);

impl<P: RealPair> AbelianGauge for Projected<P> {
    fn potential(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        projected_gauge(&self.0, x, y)
    }
}

/// A closure-defined potential.
pub struct GaugeFn<F>(pub F);

impl<F: Fn(f64, f64) -> [f64; 2]> AbelianGauge for GaugeFn<F> {
    fn potential(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        Ok((self.0)(x, y))
    }
}

/// Non-Abelian potential `A_k = i·U†·∂_k U` by central differences.
pub fn nonabelian_gauge<F>(u: F, x: f64, y: f64, fd_step: f64) -> Result<[Mat2; 2]>
where
    F: Fn(f64, f64) -> Result<Mat2>,
{
    let at = |px: f64, py: f64| u(px, py).map_err(|_| Error::Singularity { x, y });
    let u0 = at(x, y)?.adjoint();
    let i2d = C64::new(0.0, 0.5 / fd_step);
    let ax = (u0 * (at(x + fd_step, y)? - at(x - fd_step, y)?)).scale(i2d);
    let ay = (u0 * (at(x, y + fd_step)? - at(x, y - fd_step)?)).scale(i2d);
    Ok([ax, ay])
}

/// Non-Abelian potential of a catalog model's eigenframe, refusing points
/// within [`EPS_CI`] of an intersection.
pub fn model_gauge(model: &TwoStatePotential, x: f64, y: f64, fd_step: f64) -> Result<[Mat2; 2]> {
    if model.intersections().iter().any(|&(cx, cy)| (x - cx).hypot(y - cy) < EPS_CI.max(2.0 * fd_step)) {
        return Err(Error::Singularity { x, y });
    }
    nonabelian_gauge(|px, py| model.frame(px, py), x, y, fd_step)
}

/// Scalar non-adiabatic correction on the ground channel,
/// `Σ_k |A_k[0][1]|²` (the `1/2μ` prefactor is one in these units).
pub fn scalar_correction<F>(u: F, x: f64, y: f64, fd_step: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<Mat2>,
{
    let a = nonabelian_gauge(u, x, y, fd_step)?;
    Ok(a.iter().map(|m| m.0[0][1].norm_sqr()).sum())
}

/// Closed contour in the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum LoopPath {
    /// Counter-clockwise circle.
    Circle { center: [f64; 2], radius: f64 },
    /// Closed polygon; the last vertex connects back to the first.
    Polyline(Vec<[f64; 2]>),
}

impl LoopPath {
    pub fn circle(cx: f64, cy: f64, radius: f64) -> Self {
        LoopPath::Circle { center: [cx, cy], radius }
    }

    /// Polygon through `vertices`; a repeated closing vertex is dropped.
    pub fn polyline(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() > 1 {
            let (a, b) = (vertices[0], vertices[vertices.len() - 1]);
            if (a[0] - b[0]).abs() <= 1e-14 && (a[1] - b[1]).abs() <= 1e-14 {
                vertices.pop();
            }
        }
        if vertices.len() < 3 {
            return Err(Error::Domain("a polyline loop needs at least three distinct vertices".into()));
        }
        Ok(LoopPath::Polyline(vertices))
    }

    /// Distance from `p` to the contour.
    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        match self {
            LoopPath::Circle { center, radius } => ((p.0 - center[0]).hypot(p.1 - center[1]) - radius).abs(),
            LoopPath::Polyline(v) => {
                (0..v.len()).map(|i| segment_distance(p, v[i], v[(i + 1) % v.len()])).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Reject degenerate loops and loops passing within [`EPS_CI`] of `cis`.
    pub fn validate(&self, cis: &[(f64, f64)]) -> Result<()> {
        if let LoopPath::Circle { radius, .. } = self {
            if !(*radius > 0.0) {
                return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
            }
        }
        for &p in cis {
            if self.distance_to(p) < EPS_CI {
                return Err(Error::Singularity { x: p.0, y: p.1 });
            }
        }
        Ok(())
    }

    /// Whether `p` lies inside the contour (winding number nonzero).
    pub fn encloses(&self, p: (f64, f64)) -> bool {
        match self {
            LoopPath::Circle { center, radius } => (p.0 - center[0]).hypot(p.1 - center[1]) < *radius,
            LoopPath::Polyline(v) => {
                let mut inside = false;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    if (a[1] > p.1) != (b[1] > p.1) {
                        let t = (p.1 - a[1]) / (b[1] - a[1]);
                        if p.0 < a[0] + t * (b[0] - a[0]) {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }
}

fn segment_distance(p: (f64, f64), a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a[0]) * dx + (p.1 - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p.0 - a[0] - t * dx).hypot(p.1 - a[1] - t * dy)
}

/// Result of a Wilson loop evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonLoop {
    /// `exp(i ∮ A·dr)`.
    pub value: C64,
    /// `∮ A·dr`.
    pub phase: f64,
    /// Quadrature samples used at convergence.
    pub samples: usize,
}

/// Composite trapezoid rule on one parametrized piece with doubling.
struct Piece<'a, G: AbelianGauge + ?Sized> {
    gauge: &'a G,
    /// Point and derivative at parameter `t ∈ [0, 1]`.
    curve: Box<dyn Fn(f64) -> ([f64; 2], [f64; 2]) + 'a>,
    periodic: bool,
    sum: f64,
    n: usize,
}

impl<G: AbelianGauge + ?Sized> Piece<'_, G> {
    fn integrand(&self, t: f64) -> Result<f64> {
        let (p, d) = (self.curve)(t);
        let a = self.gauge.potential(p[0], p[1])?;
        Ok(a[0] * d[0] + a[1] * d[1])
    }

    fn start(&mut self, n: usize) -> Result<()> {
        self.n = n;
        let mut s = 0.0;
        for i in 0..n {
            s += self.integrand(i as f64 / n as f64)?;
        }
        if !self.periodic {
            s += 0.5 * (self.integrand(1.0)? - self.integrand(0.0)?);
        }
        self.sum = s;
        Ok(())
    }

    fn trapezoid(&self) -> f64 {
        self.sum / self.n as f64
    }

    fn refine(&mut self) -> Result<()> {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            s += self.integrand((i as f64 + 0.5) / n as f64)?;
        }
        self.sum += s;
        self.n = 2 * n;
        Ok(())
    }
}

/// `exp(i ∮ A·dr)` along `path`.
///
/// Circles use the periodic trapezoid rule; polygons use per-edge trapezoid
/// sums with one Richardson step. Samples are doubled until the phase moves
/// by less than 1e-8, up to 2²⁰ samples.
pub fn wilson_loop<G: AbelianGauge + ?Sized>(gauge: &G, path: &LoopPath) -> Result<WilsonLoop> {
    let mut pieces: Vec<Piece<'_, G>> = match path {
        LoopPath::Circle { center, radius } => {
            let (c, r) = (*center, *radius);
            vec![Piece {
                gauge,
                curve: Box::new(move |t| {
                    let (s, co) = (2.0 * PI * t).sin_cos();
                    ([c[0] + r * co, c[1] + r * s], [-2.0 * PI * r * s, 2.0 * PI * r * co])
                }),
                periodic: true,
                sum: 0.0,
                n: 0,
            }]
        }
        LoopPath::Polyline(v) => (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                let d = [b[0] - a[0], b[1] - a[1]];
                Piece {
                    gauge,
                    curve: Box::new(move |t| ([a[0] + t * d[0], a[1] + t * d[1]], d)),
                    periodic: false,
                    sum: 0.0,
                    n: 0,
                }
            })
            .collect(),
    };
    let periodic = matches!(path, LoopPath::Circle { .. });
    let initial = if periodic { 64 } else { 16 };
    for p in pieces.iter_mut() {
        p.start(initial)?;
    }
    let estimate = |pieces: &[Piece<'_, G>], previous: &[f64]| -> (f64, Vec<f64>) {
        let current: Vec<f64> = pieces.iter().map(|p| p.trapezoid()).collect();
        let total = if periodic || previous.is_empty() {
            current.iter().sum()
        } else {
            current.iter().zip(previous).map(|(c, p)| (4.0 * c - p) / 3.0).sum()
        };
        (total, current)
    };
    let (mut value, mut previous) = estimate(&pieces, &[]);
    let mut first = true;
    loop {
        let samples: usize = pieces.iter().map(|p| p.n).sum();
        if samples * 2 > MAX_SAMPLES {
            return Err(Error::Quadrature(format!("loop integral not converged at {samples} samples")));
        }
        for p in pieces.iter_mut() {
            p.refine()?;
        }
        let (next, current) = estimate(&pieces, &previous);
        let converged = (next - value).abs() < PHASE_TOL && !(first && !periodic);
        value = next;
        previous = current;
        first = false;
        if converged {
            let samples = pieces.iter().map(|p| p.n).sum();
            return Ok(WilsonLoop { value: C64::from_polar(1.0, value), phase: value, samples });
        }
    }
}

/// Predicted Wilson loop value `Π_i exp(iπ·sgn(g_y h_x - h_y g_x))` over the
/// enclosed intersections, i.e. `(-1)^n`.
pub fn wilson_sign_predicted<P: RealPair + ?Sized>(pair: &P, enclosed: &[(f64, f64)]) -> Result<f64> {
    let mut sign = 1.0;
    for &(x, y) in enclosed {
        let [dh, dg] = pair.jacobian(x, y);
        let det = dg[1] * dh[0] - dh[1] * dg[0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::DegenerateCi { x, y });
        }
        // exp(±iπ) = -1 for either orientation.
        sign = -sign;
    }
    Ok(sign)
}

/// Sum of the per-intersection orientations `sgn(g_y h_x - h_y g_x)`,
/// i.e. the winding of `(h, g)` around a loop enclosing them.
pub fn enclosed_orientation<P: RealPair + ?Sized>(pair: &P, enclosed: &[(f64, f64)]) -> Result<i32> {
    let mut total = 0;
    for &(x, y) in enclosed {
        let [dh, dg] = pair.jacobian(x, y);
        let det = dg[1] * dh[0] - dh[1] * dg[0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::DegenerateCi { x, y });
        }
        total += if det > 0.0 { 1 } else { -1 };
    }
    Ok(total)
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Region {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Region { x, y }
    }

    fn contains(&self, p: (f64, f64), pad: f64) -> bool {
        p.0 >= self.x.0 - pad && p.0 <= self.x.1 + pad && p.1 >= self.y.0 - pad && p.1 <= self.y.1 + pad
    }
}

/// Outcome of an intersection search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CiSearch {
    /// Refined common zeros of `(h, g)`, sorted by `(x, y)`.
    pub points: Vec<(f64, f64)>,
    /// Centers of candidate cells whose Newton iteration failed.
    pub unresolved: Vec<(f64, f64)>,
}

/// Locate the common zeros of `(h, g)` inside `region`.
///
/// Cells of a `resolution` lattice where both functions change sign are
/// refined by Newton iteration to `|h| + |g| < 1e-12`; duplicates closer
/// than 1e-8 are merged.
pub fn find_cis<P: RealPair + ?Sized>(pair: &P, region: Region, resolution: (usize, usize)) -> CiSearch {
    let (nx, ny) = (resolution.0.max(1), resolution.1.max(1));
    let dx = (region.x.1 - region.x.0) / nx as f64;
    let dy = (region.y.1 - region.y.0) / ny as f64;
    let corner = |i: usize, j: usize| pair.eval(region.x.0 + i as f64 * dx, region.y.0 + j as f64 * dy);
    let values: Vec<Vec<(f64, f64)>> = (0..=nx).map(|i| (0..=ny).map(|j| corner(i, j)).collect()).collect();
    let spans_zero = |v: [f64; 4]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut out = CiSearch::default();
    for i in 0..nx {
        for j in 0..ny {
            let c = [values[i][j], values[i + 1][j], values[i][j + 1], values[i + 1][j + 1]];
            if !(spans_zero(c.map(|v| v.0)) && spans_zero(c.map(|v| v.1))) {
                continue;
            }
            let start = (region.x.0 + (i as f64 + 0.5) * dx, region.y.0 + (j as f64 + 0.5) * dy);
            match newton(pair, start) {
                Some(p) => {
                    if region.contains(p, 1e-12) && !out.points.iter().any(|q| (q.0 - p.0).hypot(q.1 - p.1) < 1e-8) {
                        out.points.push(p);
                    }
                }
                None => out.unresolved.push(start),
            }
        }
    }
    out.points.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    out
}

fn newton<P: RealPair + ?Sized>(pair: &P, start: (f64, f64)) -> Option<(f64, f64)> {
    let (mut x, mut y) = start;
    for _ in 0..100 {
        let (h, g) = pair.eval(x, y);
        if h.abs() + g.abs() < 1e-12 {
            return Some((x, y));
        }
        let [dh, dg] = pair.jacobian(x, y);
        let det = dh[0] * dg[1] - dh[1] * dg[0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        x -= (h * dg[1] - g * dh[1]) / det;
        y -= (g * dh[0] - h * dg[0]) / det;
        if !(x.is_finite() && y.is_finite()) {
            return None;
        }
    }
    None
}

/// Largest central-difference curl `∂_x A_y - ∂_y A_x` over an
/// `n_samples × n_samples` lattice in `region`, skipping points within
/// `exclusion` of any listed intersection.
pub fn curvature_check<G: AbelianGauge + ?Sized>(
    gauge: &G,
    region: Region,
    n_samples: usize,
    cis: &[(f64, f64)],
    exclusion: f64,
    fd_step: f64,
) -> Result<f64> {
    let n = n_samples.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = region.x.0 + (region.x.1 - region.x.0) * i as f64 / (n - 1) as f64;
            let y = region.y.0 + (region.y.1 - region.y.0) * j as f64 / (n - 1) as f64;
            if cis.iter().any(|&(cx, cy)| (x - cx).hypot(y - cy) < exclusion) {
                continue;
            }
            let d = fd_step;
            let ay_p = gauge.potential(x + d, y)?[1];
            let ay_m = gauge.potential(x - d, y)?[1];
            let ax_p = gauge.potential(x, y + d)?[0];
            let ax_m = gauge.potential(x, y - d)?[0];
            let curl = (ay_p - ay_m - ax_p + ax_m) / (2.0 * d);
            worst = worst.max(curl.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{u_c, u_d, u_general};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uc_at(x: f64, y: f64) -> Result<Mat2> {
        Ok(u_c(y.atan2(x)))
    }

    fn ud_at(x: f64, y: f64) -> Result<Mat2> {
        Ok(u_d(y.atan2(x)))
    }

    /// Potential of the two-intersection pair written out by hand.
    fn two_ci_closed_form(x0: f64, x: f64, y: f64) -> [f64; 2] {
        let h = x * (x0 - x);
        let den = 2.0 * (h * h + y * y);
        [-y * (x0 - 2.0 * x) / den, x * (x0 - x) / den]
    }

    #[test]
    fn linear_cone_projected_potential() {
        let a = projected_gauge(&Quadratic::linear_cone(), 1.0, 0.0).unwrap();
        assert_eq!(a, [0.0, 0.5]);
        let (r, phi) = (2.5f64, 0.9f64);
        let a = projected_gauge(&Quadratic::linear_cone(), r * phi.cos(), r * phi.sin()).unwrap();
        assert!((a[0] + phi.sin() / (2.0 * r)).abs() < 1e-15);
        assert!((a[1] - phi.cos() / (2.0 * r)).abs() < 1e-15);
        assert!(projected_gauge(&Quadratic::linear_cone(), 0.0, 0.0).is_err());
    }

    #[test]
    fn two_ci_potential_matches_hand_derivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pair = Quadratic::two_ci(3.0);
        for _ in 0..100 {
            let (x, y) = (rng.gen_range(-2.0..5.0), rng.gen_range(-2.0..2.0));
            let a = projected_gauge(&pair, x, y).unwrap();
            let b = two_ci_closed_form(3.0, x, y);
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_pair_agrees_with_analytic() {
        let f = PairFn(|x: f64, y: f64| (x * (3.0 - x), y));
        let a = projected_gauge(&f, 1.3, -0.4).unwrap();
        let b = projected_gauge(&Quadratic::two_ci(3.0), 1.3, -0.4).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
    }

    #[test]
    fn uc_matrix_potential_closed_form() {
        let (r, phi) = (1.7f64, 2.2f64);
        let (x, y) = (r * phi.cos(), r * phi.sin());
        let [ax, ay] = nonabelian_gauge(uc_at, x, y, 1e-5).unwrap();
        let e = C64::from_polar(1.0, phi);
        let m = Mat2::new((-1.0).into(), -C64::i() * e.conj(), C64::i() * e, 1.0.into()).scale((0.5 / r).into());
        assert!(ax.max_abs_diff(&m.scale((-phi.sin()).into())) < 1e-6);
        assert!(ay.max_abs_diff(&m.scale(phi.cos().into())) < 1e-6);
        assert!(ax.hermiticity_defect() < 1e-9);
    }

    #[test]
    fn ud_potential_has_no_diagonal() {
        for phi in [0.3f64, 1.0, 2.5, -2.0] {
            let [ax, ay] = nonabelian_gauge(ud_at, 0.8 * phi.cos(), 0.8 * phi.sin(), 1e-5).unwrap();
            for m in [ax, ay] {
                assert!(m.0[0][0].norm() < 1e-6 && m.0[1][1].norm() < 1e-6);
            }
        }
    }

    #[test]
    fn identity_frame_has_no_potential() {
        let [ax, ay] = nonabelian_gauge(|_, _| Ok(Mat2::IDENTITY), 0.3, 0.2, 1e-5).unwrap();
        assert_eq!(ax.max_abs() + ay.max_abs(), 0.0);
        assert_eq!(scalar_correction(|_, _| Ok(Mat2::IDENTITY), 0.3, 0.2, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn scalar_correction_scaling_and_shape() {
        let s1 = scalar_correction(uc_at, 1.0, 0.0, 1e-5).unwrap();
        let s2 = scalar_correction(uc_at, 0.0, 2.0, 1e-5).unwrap();
        assert!((s1 / s2 - 4.0).abs() < 1e-6);
        assert!((s1 - 0.25).abs() < 1e-8);
        let d0 = scalar_correction(ud_at, 1.0, 0.0, 1e-5).unwrap();
        let d90 = scalar_correction(ud_at, 0.0, 1.0, 1e-5).unwrap();
        assert!((d90 / d0 - 2.0).abs() < 1e-6);
    }

    #[test]
    fn projected_matches_ground_diagonal_of_matrix_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pair = Quadratic::two_ci(3.0);
        for _ in 0..50 {
            let (x, y) = (rng.gen_range(-2.0..5.0), rng.gen_range(-2.0..2.0));
            let [ax, ay] = nonabelian_gauge(
                |px, py| {
                    let (h, g) = pair.eval(px, py);
                    u_general(h, g)
                },
                x,
                y,
                1e-5,
            )
            .unwrap();
            let a = projected_gauge(&pair, x, y).unwrap();
            assert!((ax.0[1][1].re - a[0]).abs() < 1e-6 && (ay.0[1][1].re - a[1]).abs() < 1e-6);
            assert!((ax.0[0][0].re + a[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn model_gauge_refuses_intersection() {
        let m = TwoStatePotential::two_ci(3.0);
        assert!(matches!(model_gauge(&m, 3.0, 1e-7, 1e-5), Err(Error::Singularity { .. })));
        assert!(model_gauge(&m, 3.0, 0.5, 1e-5).is_ok());
    }

    #[test]
    fn wilson_loops_of_two_ci_field() {
        let a = Projected(Quadratic::two_ci(3.0));
        let inner = wilson_loop(&a, &LoopPath::circle(0.0, 0.0, 1.0)).unwrap();
        assert!((inner.value - C64::new(-1.0, 0.0)).norm() < 1e-6);
        let outer = wilson_loop(&a, &LoopPath::circle(0.0, 0.0, 5.0)).unwrap();
        assert!((outer.value - C64::new(1.0, 0.0)).norm() < 1e-6);
        let empty = wilson_loop(&a, &LoopPath::circle(1.5, 2.0, 1.0)).unwrap();
        assert!((empty.value - C64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn homotopic_loops_agree() {
        let a = Projected(Quadratic::two_ci(3.0));
        let square = LoopPath::polyline(vec![[-1.0, -1.0], [1.5, -1.0], [1.5, 1.0], [-1.0, 1.0]]).unwrap();
        let circle = LoopPath::circle(0.2, 0.1, 0.9);
        let s = wilson_loop(&a, &square).unwrap();
        let c = wilson_loop(&a, &circle).unwrap();
        assert!((s.value - c.value).norm() < 1e-6);
        assert!((s.value + 1.0).norm() < 1e-6);
        let both = LoopPath::polyline(vec![[-1.0, -1.0], [4.0, -1.0], [4.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap();
        assert!((wilson_loop(&a, &both).unwrap().value - 1.0).norm() < 1e-6);
    }

    #[test]
    fn uniform_field_loop_phase_is_area() {
        let a = GaugeFn(|x: f64, y: f64| [-0.5 * y, 0.5 * x]);
        let w = wilson_loop(&a, &LoopPath::circle(0.3, -0.2, 0.5)).unwrap();
        assert!((w.phase - PI * 0.25).abs() < 1e-10);
    }

    #[test]
    fn predicted_signs() {
        let cone = Quadratic::linear_cone();
        assert_eq!(wilson_sign_predicted(&cone, &[(0.0, 0.0)]).unwrap(), -1.0);
        let two = Quadratic::two_ci(3.0);
        assert_eq!(wilson_sign_predicted(&two, &[(0.0, 0.0), (3.0, 0.0)]).unwrap(), 1.0);
        assert_eq!(wilson_sign_predicted(&two, &[]).unwrap(), 1.0);
        assert_eq!(enclosed_orientation(&two, &[(0.0, 0.0), (3.0, 0.0)]).unwrap(), 0);
        let flat = Quadratic { h: [0.0, 0.0, 0.0, 1.0, 0.0, 0.0], g: [0.0, 0.0, 1.0, 0.0, 0.0, 0.0] };
        assert!(matches!(wilson_sign_predicted(&flat, &[(0.0, 0.0)]), Err(Error::DegenerateCi { .. })));
    }

    #[test]
    fn ci_search() {
        let r = find_cis(&Quadratic::linear_cone(), Region::new((-2.0, 2.0), (-2.0, 2.0)), (40, 40));
        assert_eq!(r.points.len(), 1);
        assert!(r.points[0].0.abs() < 1e-12 && r.points[0].1.abs() < 1e-12);
        let r = find_cis(&Quadratic::two_ci(3.0), Region::new((-1.0, 4.0), (-2.0, 2.0)), (50, 40));
        assert_eq!(r.points.len(), 2);
        assert!((r.points[1].0 - 3.0).abs() < 1e-10);
        let shifted = PairFn(|x: f64, y: f64| (x, y - 10.0));
        let r = find_cis(&shifted, Region::new((-2.0, 2.0), (-2.0, 2.0)), (20, 20));
        assert!(r.points.is_empty() && r.unresolved.is_empty());
    }

    #[test]
    fn curvature_away_from_intersections() {
        let a = Projected(Quadratic::two_ci(3.0));
        let c = curvature_check(&a, Region::new((-2.0, 5.0), (-2.0, 2.0)), 30, &[(0.0, 0.0), (3.0, 0.0)], 0.75, 1e-4)
            .unwrap();
        assert!(c < 1e-6, "curl {c}");
        let constant = GaugeFn(|_: f64, _: f64| [0.3, -1.0]);
        assert_eq!(curvature_check(&constant, Region::new((0.0, 1.0), (0.0, 1.0)), 5, &[], 0.0, 1e-4).unwrap(), 0.0);
        let uniform = GaugeFn(|x: f64, y: f64| [-0.5 * y, 0.5 * x]);
        let c = curvature_check(&uniform, Region::new((0.0, 1.0), (0.0, 1.0)), 5, &[], 0.0, 1e-4).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn loop_validation() {
        assert!(LoopPath::circle(0.0, 0.0, 1.0).validate(&[(1.0, 5e-7)]).is_err());
        assert!(LoopPath::circle(0.0, 0.0, 1.0).validate(&[(0.0, 0.0)]).is_ok());
        assert!(LoopPath::polyline(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        let sq = LoopPath::polyline(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(sq.encloses((0.5, 0.5)) && !sq.encloses((1.5, 0.5)));
    }
}
