//! Complex error function on the whole plane.
//!
//! Three regions, after reducing to the first quadrant with
//! `erf(-z) = -erf(z)` and `erf(z*) = erf(z)*`:
//!
//! - `|z| <= 2`: Maclaurin series.
//! - `Re z >= 1.5`: Laplace continued fraction for `erfc`.
//! - otherwise: the Abramowitz-Stegun 7.1.29 series, whose error is about
//!   1e-16 relative to `|erf z|`.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// `erf(z)` for complex `z`.
pub fn erf(z: C64) -> C64 {
    let flip = z.re < 0.0;
    let conj = (if flip { -z.im } else { z.im }) < 0.0;
    let mut w = if flip { -z } else { z };
    if conj {
        w = w.conj();
    }
    let mut v = if w.norm() <= 2.0 {
        maclaurin(w)
    } else if w.re >= 1.5 {
        C64::new(1.0, 0.0) - erfc_continued_fraction(w)
    } else {
        strip_series(w.re, w.im)
    };
    if conj {
        v = v.conj();
    }
    if flip {
        -v
    } else {
        v
    }
}

/// Real `erf` via the complex routine.
pub fn erf_real(x: f64) -> f64 {
    erf(C64::new(x, 0.0)).re
}

fn maclaurin(z: C64) -> C64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..200 {
        term = -term * z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// `erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`,
/// evaluated with the modified Lentz method for `Re z > 0`.
fn erfc_continued_fraction(z: C64) -> C64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = C64::new(0.0, 0.0);
    for n in 1..5000 {
        let a = n as f64 / 2.0;
        d = z + d * a;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        c = z + a / c;
        if c.norm() < tiny {
            c = C64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (f * PI.sqrt())
}

/// Abramowitz-Stegun 7.1.29 for `x >= 0`, `y >= 0`.
fn strip_series(x: f64, y: f64) -> C64 {
    let ex2 = (-x * x).exp();
    let (s2, c2) = (2.0 * x * y).sin_cos();
    let lead = if x == 0.0 {
        C64::new(0.0, y / PI)
    } else {
        let sxy = (x * y).sin();
        C64::new(2.0 * sxy * sxy, s2) * (ex2 / (2.0 * PI * x))
    };
    let mut sum = C64::new(0.0, 0.0);
    let n_max = (2.0 * y).ceil() as usize + 14;
    for n in 1..=n_max {
        let nf = n as f64;
        let w = (-nf * nf / 4.0).exp() / (nf * nf + 4.0 * x * x);
        let (ch, sh) = ((nf * y).cosh(), (nf * y).sinh());
        let f = 2.0 * x - 2.0 * x * ch * c2 + nf * sh * s2;
        let g = 2.0 * x * ch * s2 + nf * sh * c2;
        sum += C64::new(f, g) * w;
    }
    C64::new(maclaurin(C64::new(x, 0.0)).re, 0.0) + lead + sum * (2.0 * ex2 / PI)
}
