//! Minimal 2×2 complex matrix algebra for the two-state problem.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

/// A 2×2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2::real(a, 0.0, 0.0, d)
    }

    /// The traceless Hermitian matrix `[[h, c], [conj(c), -h]]`.
    pub fn hermitian_traceless(h: f64, c: C64) -> Self {
        Mat2::new(h.into(), c, c.conj(), (-h).into())
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn column(&self, j: usize) -> [C64; 2] {
        [self.0[0][j], self.0[1][j]]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// Entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

/// `exp(-i·tau·H)` for the traceless Hermitian `H = [[h, c], [c*, -h]]`.
///
/// Uses `cos(E·tau)·I - i·tau·sinc(E·tau)·H` with `E = sqrt(h² + |c|²)`, so
/// the `E = 0` limit is the identity without a division by `E`.
pub fn expm_traceless(h: f64, c: C64, tau: f64) -> Mat2 {
    let e = (h * h + c.norm_sqr()).sqrt();
    let theta = e * tau;
    let cos = theta.cos();
    let s = tau * sinc(theta);
    let mi_s = C64::new(0.0, -s);
    Mat2::new(C64::new(cos, -s * h), mi_s * c, mi_s * c.conj(), C64::new(cos, s * h))
}

/// `sin(x)/x` with the series branch near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Wrap an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scaled Taylor series with repeated squaring.
    fn expm_series(m: Mat2, tau: f64) -> Mat2 {
        let a = m.scale(C64::new(0.0, -tau));
        let norm = a.max_abs().max(1e-300);
        let squarings = (norm.log2().ceil() + 1.0).max(0.0) as u32;
        let a = a.scale((0.5f64.powi(squarings as i32)).into());
        let mut term = Mat2::IDENTITY;
        let mut sum = Mat2::IDENTITY;
        for n in 1..30 {
            term = (term * a).scale((1.0 / n as f64).into());
            sum = sum + term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn closed_form_exponential_matches_series() {
        let cases = [
            (0.3, C64::new(0.4, -0.2), 0.7),
            (-2.0, C64::new(0.0, 1.5), 0.01),
            (5.0, C64::new(3.0, 4.0), 1.3),
            (0.0, C64::new(0.0, 0.0), 2.0),
        ];
        for (h, c, tau) in cases {
            let exact = expm_series(Mat2::hermitian_traceless(h, c), tau);
            let closed = expm_traceless(h, c, tau);
            assert!(closed.max_abs_diff(&exact) < 1e-12, "h={h} c={c} tau={tau}");
        }
    }

    #[test]
    fn exponential_is_unitary_at_zero_gap() {
        let u = expm_traceless(0.0, C64::new(0.0, 0.0), 3.0);
        assert_eq!(u, Mat2::IDENTITY);
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!(wrap_angle(0.1).abs() - 0.1 < 1e-16);
    }
}
