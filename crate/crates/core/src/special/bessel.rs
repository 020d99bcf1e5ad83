//! Cylindrical Bessel functions of real order and positive real argument.
//!
//! Half-integer orders go through the spherical Bessel functions:
//! `Y` by upward recurrence (stable), `J` by a continued fraction for the
//! top ratio followed by downward recurrence normalized to `sin(x)/x`.
//! General orders use Steed's method with Temme's series for small `x`.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `J_{n+1/2}(x)` and `Y_{n+1/2}(x)` for `n = 0..=n_max`.
///
/// `Y` overflows to `-inf` for large orders at small `x`.
pub fn halfint_jy(n_max: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    let scale = (2.0 * x / PI).sqrt();
    let (s, c) = x.sin_cos();

    let mut y = Vec::with_capacity(n_max + 1);
    y.push(-c / x);
    if n_max >= 1 {
        y.push(-c / (x * x) - s / x);
    }
    for n in 1..n_max {
        let next = (2 * n + 1) as f64 / x * y[n] - y[n - 1];
        y.push(next);
    }

    let ratio = spherical_ratio(n_max, x);
    let mut j = vec![0.0; n_max + 1];
    let mut upper = ratio;
    j[n_max] = 1.0;
    let mut current = 1.0;
    for n in (1..=n_max).rev() {
        // j_{n-1} = (2n+1)/x·j_n - j_{n+1}
        let prev = (2 * n + 1) as f64 / x * current - upper;
        upper = current;
        current = prev;
        j[n - 1] = current;
        if current.abs() > 1e250 {
            for v in j[n - 1..].iter_mut() {
                *v *= 1e-250;
            }
            upper *= 1e-250;
            current *= 1e-250;
        }
    }
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let norm = if n_max >= 1 && j1.abs() > j0.abs() { j1 / j[1] } else { j0 / j[0] };

    let jv = j.iter().map(|v| v * norm * scale).collect();
    let yv = y.iter().map(|v| v * scale).collect();
    Ok((jv, yv))
}

/// `j_{n+1}(x)/j_n(x)` from the continued fraction
/// `x/(2n+3 - x²/(2n+5 - x²/(2n+7 - ...)))`.
fn spherical_ratio(n: usize, x: f64) -> f64 {
    let tiny = 1e-300;
    let x2 = x * x;
    let b0 = (2 * n + 3) as f64;
    let mut f = b0;
    let mut c = b0;
    let mut d = 0.0;
    for k in 1..200_000 {
        let b = (2 * (n + k) + 3) as f64;
        d = b - x2 * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b - x2 / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    x / f
}

fn check_halfint(order: f64) -> Result<usize> {
    let n = order - 0.5;
    if !(n >= 0.0) || n.fract() != 0.0 {
        return Err(Error::Domain(format!("order {order} is not a non-negative half-integer")));
    }
    Ok(n as usize)
}

/// `J_ν(x)` for half-integer `ν >= 1/2`.
pub fn bessel_j_halfint(order: f64, x: f64) -> Result<f64> {
    let n = check_halfint(order)?;
    Ok(halfint_jy(n, x)?.0[n])
}

/// `Y_ν(x)` for half-integer `ν >= 1/2`.
pub fn bessel_y_halfint(order: f64, x: f64) -> Result<f64> {
    let n = check_halfint(order)?;
    Ok(halfint_jy(n, x)?.1[n])
}

/// `H⁽¹⁾_ν(x) = J_ν(x) + i·Y_ν(x)` for half-integer `ν >= 1/2`.
pub fn hankel1_halfint(order: f64, x: f64) -> Result<C64> {
    let n = check_halfint(order)?;
    let (j, y) = halfint_jy(n, x)?;
    Ok(C64::new(j[n], y[n]))
}

/// Values and derivatives of `J_ν` and `Y_ν` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselJY {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

impl BesselJY {
    pub fn hankel1(&self) -> C64 {
        C64::new(self.j, self.y)
    }
    pub fn hankel1_prime(&self) -> C64 {
        C64::new(self.jp, self.yp)
    }
}

/// `J_ν, Y_ν` and derivatives for any real `ν >= 0` and `x > 0`.
///
/// Half-integer orders are routed through [`halfint_jy`].
pub fn bessel_jy(nu: f64, x: f64) -> Result<BesselJY> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("Bessel order must be non-negative, got {nu}")));
    }
    if (nu - 0.5).fract() == 0.0 {
        let n = (nu - 0.5) as usize;
        let (j, y) = halfint_jy(n, x)?;
        // Derivatives from J'_ν = J_{ν-1} - (ν/x)·J_ν with J_{-1/2}, Y_{-1/2}
        // in closed form for the lowest order.
        let (jm, ym) = if n == 0 {
            let s = (2.0 / (PI * x)).sqrt();
            (s * x.cos(), s * x.sin())
        } else {
            (j[n - 1], y[n - 1])
        };
        return Ok(BesselJY { j: j[n], y: y[n], jp: jm - nu / x * j[n], yp: ym - nu / x * y[n] });
    }
    steed(nu, x)
}

fn chebyshev(c: &[f64], t: f64) -> f64 {
    let (mut d, mut dd) = (0.0, 0.0);
    let t2 = 2.0 * t;
    for &cj in c[1..].iter().rev() {
        let sv = d;
        d = t2 * d - dd + cj;
        dd = sv;
    }
    t * d - dd + 0.5 * c[0]
}

/// `(Γ₁, Γ₂, 1/Γ(1+μ), 1/Γ(1-μ))` for `|μ| <= 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    const C1: [f64; 7] = [
        -1.142022680371168e0,
        6.5165112670737e-3,
        3.087090173086e-4,
        -3.4706269649e-6,
        6.9437664e-9,
        3.67795e-11,
        -1.356e-13,
    ];
    const C2: [f64; 8] = [
        1.843740587300905e0,
        -7.68528408447867e-2,
        1.2719271366546e-3,
        -4.9717367042e-6,
        -3.31261198e-8,
        2.423096e-10,
        -1.702e-13,
        -1.49e-15,
    ];
    let t = 8.0 * mu * mu - 1.0;
    let g1 = chebyshev(&C1, t);
    let g2 = chebyshev(&C2, t);
    (g1, g2, g2 - mu * g1, g2 + mu * g1)
}

fn steed(nu: f64, x: f64) -> Result<BesselJY> {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 100_000;
    const XMIN: f64 = 2.0;

    let nl = if x < XMIN { (nu + 0.5) as usize } else { ((nu - x + 1.5).max(0.0)) as usize };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_ν/J_ν.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy(format!("Bessel continued fraction failed at nu={nu}, x={x}")));
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Accuracy(format!("Temme series failed at nu={nu}, x={x}")));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2: p + iq = (J'_μ + iY'_μ)/(J_μ + iY_μ).
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..MAXIT {
            a += (2 * (i - 1)) as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Accuracy(format!("Bessel CF2 failed at nu={nu}, x={x}")));
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let fact = rjmu / rjl;
    let j = rjl1 * fact;
    let jp = rjp1 * fact;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok(BesselJY { j, y: rymu, jp, yp: nu * xi * rymu - ry1 })
}
