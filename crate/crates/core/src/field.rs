//! Uniform 2D grids, two-component complex fields and picture transforms.
//!
//! Nodes sit at cell centers, `min + (i + 1/2)·h`, so a node never lands
//! exactly on a conical intersection placed at a cell corner such as the
//! origin. Storage is row-major with the ξ index outer and η inner.
//!
//! The diabatic amplitudes `G` and the adiabatic amplitudes `F` are related
//! nodewise by `G = W F`, where the columns of `W` are the (excited, ground)
//! eigenvectors of the model matrix.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::models::TwoStatePotential;
use num_complex::Complex64 as C64;
use std::io::{BufRead, Write};

/// A uniform cell-centered grid over `[xi_min, xi_max) × [eta_min, eta_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n_xi: usize,
    n_eta: usize,
    xi_range: (f64, f64),
    eta_range: (f64, f64),
}

impl Grid2D {
    pub fn new(n_xi: usize, n_eta: usize, xi_range: (f64, f64), eta_range: (f64, f64)) -> Result<Self> {
        for (name, n) in [("n_xi", n_xi), ("n_eta", n_eta)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("{name} = {n} must be a power of two >= 8")));
            }
        }
        for (name, (lo, hi)) in [("xi_range", xi_range), ("eta_range", eta_range)] {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::InvalidGrid(format!("{name} ({lo}, {hi}) is not an increasing interval")));
            }
        }
        Ok(Grid2D { n_xi, n_eta, xi_range, eta_range })
    }

    /// Square grid of `n × n` nodes over `[-half, half]²`.
    pub fn square(n: usize, half: f64) -> Result<Self> {
        Grid2D::new(n, n, (-half, half), (-half, half))
    }

    pub fn n_xi(&self) -> usize {
        self.n_xi
    }
    pub fn n_eta(&self) -> usize {
        self.n_eta
    }
    pub fn xi_range(&self) -> (f64, f64) {
        self.xi_range
    }
    pub fn eta_range(&self) -> (f64, f64) {
        self.eta_range
    }
    pub fn len(&self) -> usize {
        self.n_xi * self.n_eta
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn h_xi(&self) -> f64 {
        (self.xi_range.1 - self.xi_range.0) / self.n_xi as f64
    }
    pub fn h_eta(&self) -> f64 {
        (self.eta_range.1 - self.eta_range.0) / self.n_eta as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.h_xi() * self.h_eta()
    }
    pub fn xi(&self, i: usize) -> f64 {
        self.xi_range.0 + (i as f64 + 0.5) * self.h_xi()
    }
    pub fn eta(&self, j: usize) -> f64 {
        self.eta_range.0 + (j as f64 + 0.5) * self.h_eta()
    }
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_eta + j
    }
    /// Coordinates of the node with flat index `k`.
    pub fn coords(&self, k: usize) -> (f64, f64) {
        (self.xi(k / self.n_eta), self.eta(k % self.n_eta))
    }
    /// Iterator over `(flat index, ξ, η)` in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.len()).map(move |k| {
            let (x, y) = self.coords(k);
            (k, x, y)
        })
    }
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xi_range.0 && x <= self.xi_range.1 && y >= self.eta_range.0 && y <= self.eta_range.1
    }
}

/// Two complex amplitudes on a grid at time `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: Grid2D,
    pub g1: Vec<C64>,
    pub g2: Vec<C64>,
    pub tau: f64,
}

impl SpinorField {
    pub fn zeros(grid: Grid2D) -> Self {
        let n = grid.len();
        SpinorField { grid, g1: vec![C64::new(0.0, 0.0); n], g2: vec![C64::new(0.0, 0.0); n], tau: 0.0 }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> [C64; 2]) -> Self {
        let mut out = SpinorField::zeros(grid);
        for (k, x, y) in grid.nodes() {
            let [a, b] = f(x, y);
            out.g1[k] = a;
            out.g2[k] = b;
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.g1.len() != n || self.g2.len() != n {
            return Err(Error::InvalidField(format!(
                "component lengths {} and {} do not match the grid ({n} nodes)",
                self.g1.len(),
                self.g2.len()
            )));
        }
        let bad = self.g1.iter().chain(&self.g2).position(|z| !(z.re.is_finite() && z.im.is_finite()));
        if let Some(k) = bad {
            return Err(Error::InvalidField(format!("non-finite amplitude at entry {k}")));
        }
        if !self.tau.is_finite() {
            return Err(Error::InvalidField("non-finite time".into()));
        }
        Ok(())
    }

    /// Total probability without validation.
    pub fn norm_unchecked(&self) -> f64 {
        let s: f64 = self.g1.iter().chain(&self.g2).map(|z| z.norm_sqr()).sum();
        s * self.grid.cell_area()
    }

    pub fn scale(&mut self, s: f64) {
        for z in self.g1.iter_mut().chain(self.g2.iter_mut()) {
            *z *= s;
        }
    }

    /// Per-node probability density `|g1|² + |g2|²`.
    pub fn density(&self) -> Vec<f64> {
        self.g1.iter().zip(&self.g2).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    }
}

/// `Σ (|g1|² + |g2|²)·h_ξ·h_η`.
pub fn norm(field: &SpinorField) -> Result<f64> {
    field.validate()?;
    Ok(field.norm_unchecked())
}

/// A 2×2 matrix per grid node.
#[derive(Debug, Clone)]
pub struct UnitaryField {
    pub grid: Grid2D,
    pub matrices: Vec<Mat2>,
}

impl UnitaryField {
    /// Build from a per-node function; every matrix must be unitary to 1e-12.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Result<Mat2>) -> Result<Self> {
        let mut matrices = Vec::with_capacity(grid.len());
        for (_, x, y) in grid.nodes() {
            matrices.push(f(x, y)?);
        }
        let out = UnitaryField { grid, matrices };
        out.check()?;
        Ok(out)
    }

    /// The eigenframe of `model` at every node.
    pub fn model_frame(grid: Grid2D, model: &TwoStatePotential) -> Result<Self> {
        UnitaryField::from_fn(grid, |x, y| model.frame(x, y))
    }

    pub fn check(&self) -> Result<()> {
        if self.matrices.len() != self.grid.len() {
            return Err(Error::InvalidField("unitary field does not match its grid".into()));
        }
        for (node, m) in self.matrices.iter().enumerate() {
            let deviation = m.unitarity_defect();
            if !(deviation <= 1e-12) {
                return Err(Error::NotUnitary { node, deviation });
            }
        }
        Ok(())
    }
}

fn apply_nodewise(field: &SpinorField, u: &UnitaryField, adjoint: bool) -> Result<SpinorField> {
    field.validate()?;
    if u.grid != field.grid {
        return Err(Error::InvalidField("unitary field grid differs from the spinor grid".into()));
    }
    u.check()?;
    let mut out = field.clone();
    for (k, m) in u.matrices.iter().enumerate() {
        let m = if adjoint { m.adjoint() } else { *m };
        let [a, b] = m.apply([field.g1[k], field.g2[k]]);
        out.g1[k] = a;
        out.g2[k] = b;
    }
    Ok(out)
}

/// `G = U F` at every node.
pub fn to_diabatic(f_adiabatic: &SpinorField, u: &UnitaryField) -> Result<SpinorField> {
    apply_nodewise(f_adiabatic, u, false)
}

/// `F = U† G` at every node.
pub fn to_adiabatic(g_diabatic: &SpinorField, u: &UnitaryField) -> Result<SpinorField> {
    apply_nodewise(g_diabatic, u, true)
}

/// Probability in the lower and upper adiabatic branches of `model`.
///
/// Returns `(p_ground, p_excited)`.
pub fn adiabatic_populations(field: &SpinorField, model: &TwoStatePotential) -> Result<(f64, f64)> {
    field.validate()?;
    let (mut ground, mut excited) = (0.0, 0.0);
    for (k, x, y) in field.grid.nodes() {
        let w = model.frame(x, y)?;
        let [fe, fg] = w.adjoint().apply([field.g1[k], field.g2[k]]);
        excited += fe.norm_sqr();
        ground += fg.norm_sqr();
    }
    let area = field.grid.cell_area();
    Ok((ground * area, excited * area))
}

/// A complex scalar field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub values: Vec<C64>,
}

impl ScalarField {
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let values = grid.nodes().map(|(_, x, y)| f(x, y)).collect();
        ScalarField { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Bilinear interpolation between node values; `None` outside the node hull.
    pub fn sample(&self, x: f64, y: f64) -> Option<C64> {
        let g = &self.grid;
        let u = (x - g.xi_range.0) / g.h_xi() - 0.5;
        let v = (y - g.eta_range.0) / g.h_eta() - 0.5;
        if !(u >= 0.0 && v >= 0.0 && u <= (g.n_xi - 1) as f64 && v <= (g.n_eta - 1) as f64) {
            return None;
        }
        let i = (u.floor() as usize).min(g.n_xi - 2);
        let j = (v.floor() as usize).min(g.n_eta - 2);
        let (s, t) = (u - i as f64, v - j as f64);
        Some(
            self.at(i, j) * ((1.0 - s) * (1.0 - t))
                + self.at(i + 1, j) * (s * (1.0 - t))
                + self.at(i, j + 1) * ((1.0 - s) * t)
                + self.at(i + 1, j + 1) * (s * t),
        )
    }
}

impl SpinorField {
    /// One component as a scalar field (0 → g1, 1 → g2).
    pub fn component(&self, which: usize) -> ScalarField {
        let values = if which == 0 { self.g1.clone() } else { self.g2.clone() };
        ScalarField { grid: self.grid, values }
    }
}

/// Payload encoding of a field dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Binary,
    Ascii,
}

const MAGIC: &str = "CISCAT-FIELD v1";

/// Write a field in the `CISCAT-FIELD v1` format.
pub fn write_dump<W: Write>(field: &SpinorField, encoding: Encoding, mut out: W) -> Result<()> {
    field.validate()?;
    let g = &field.grid;
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "{} {} {:?} {:?} {:?} {:?} {:?}",
        g.n_xi, g.n_eta, g.xi_range.0, g.xi_range.1, g.eta_range.0, g.eta_range.1, field.tau
    )?;
    match encoding {
        Encoding::Binary => {
            writeln!(out, "encoding binary")?;
            let mut buf = Vec::with_capacity(32 * g.len());
            for z in field.g1.iter().chain(&field.g2) {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Encoding::Ascii => {
            writeln!(out, "encoding ascii")?;
            for z in field.g1.iter().chain(&field.g2) {
                writeln!(out, "{:?} {:?}", z.re, z.im)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn header_line<R: BufRead>(input: &mut R, what: &str) -> Result<String> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    if line.is_empty() {
        return Err(Error::Format(format!("missing {what} line")));
    }
    Ok(line.trim_end_matches(['\n', '\r']).to_string())
}

/// Read a field written by [`write_dump`].
pub fn read_dump<R: BufRead>(mut input: R) -> Result<SpinorField> {
    let magic = header_line(&mut input, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format(format!("bad magic '{magic}'")));
    }
    let dims = header_line(&mut input, "dimension")?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    if parts.len() != 7 {
        return Err(Error::Format(format!("expected 7 header fields, found {}", parts.len())));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad integer '{s}'")));
    let real = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("bad number '{s}'")));
    let grid = Grid2D::new(
        int(parts[0])?,
        int(parts[1])?,
        (real(parts[2])?, real(parts[3])?),
        (real(parts[4])?, real(parts[5])?),
    )?;
    let tau = real(parts[6])?;
    let encoding = header_line(&mut input, "encoding")?;
    let n = grid.len();
    let mut values = Vec::with_capacity(2 * n);
    match encoding.as_str() {
        "encoding binary" => {
            let mut buf = vec![0u8; 32 * n];
            input.read_exact(&mut buf).map_err(|_| Error::Format("truncated binary payload".into()))?;
            for chunk in buf.chunks_exact(16) {
                let re = f64::from_le_bytes(chunk[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(chunk[8..].try_into().expect("8 bytes"));
                values.push(C64::new(re, im));
            }
        }
        "encoding ascii" => {
            let mut line = String::new();
            while values.len() < 2 * n {
                line.clear();
                if input.read_line(&mut line)? == 0 {
                    return Err(Error::Format("truncated ascii payload".into()));
                }
                let mut it = line.split_whitespace();
                let (Some(re), Some(im)) = (it.next(), it.next()) else {
                    return Err(Error::Format(format!("bad payload line '{}'", line.trim())));
                };
                values.push(C64::new(real(re)?, real(im)?));
            }
        }
        other => return Err(Error::Format(format!("unknown encoding line '{other}'"))),
    }
    let g2 = values.split_off(n);
    let field = SpinorField { grid, g1: values, g2, tau };
    field.validate()?;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::u_c;
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::new(16, 8, (-2.0, 2.0), (-1.0, 3.0)).unwrap()
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid2D::new(12, 8, (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Grid2D::new(4, 8, (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Grid2D::new(8, 8, (1.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Grid2D::new(8, 8, (0.0, 1.0), (2.0, -1.0)).is_err());
    }

    #[test]
    fn nodes_are_cell_centered() {
        let g = Grid2D::square(8, 4.0).unwrap();
        assert_eq!(g.h_xi(), 1.0);
        assert_eq!(g.xi(0), -3.5);
        assert_eq!(g.xi(7), 3.5);
        assert!(g.nodes().all(|(_, x, y)| x != 0.0 || y != 0.0));
        assert_eq!(g.coords(g.index(2, 5)), (g.xi(2), g.eta(5)));
    }

    #[test]
    fn single_cell_norm() {
        let g = Grid2D::new(8, 8, (0.0, 0.8), (0.0, 0.8)).unwrap();
        let mut f = SpinorField::zeros(g);
        f.g1[3] = C64::new(1.0, 0.0);
        assert!((norm(&f).unwrap() - 0.01).abs() < 1e-15);
        f.scale(2.0);
        assert!((norm(&f).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn norm_rejects_non_finite() {
        let mut f = SpinorField::zeros(grid());
        f.g2[7] = C64::new(f64::NAN, 0.0);
        assert!(matches!(norm(&f), Err(Error::InvalidField(_))));
    }

    #[test]
    fn identity_transform_is_noop() {
        let g = grid();
        let f = SpinorField::from_fn(g, |x, y| [C64::new(x, y), C64::new(y * x, 1.0)]);
        let u = UnitaryField::from_fn(g, |_, _| Ok(Mat2::IDENTITY)).unwrap();
        assert_eq!(to_diabatic(&f, &u).unwrap(), f);
    }

    #[test]
    fn ground_state_at_quarter_turn() {
        let g = u_c(PI / 2.0).apply([C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let phase = C64::from_polar(1.0, -PI / 4.0);
        let s = (PI / 4.0).sin();
        assert!((g[0] - (-phase * s)).norm() < 1e-15);
        assert!((g[1] - phase * s).norm() < 1e-15);
    }

    #[test]
    fn non_unitary_frame_rejected() {
        let r = UnitaryField::from_fn(grid(), |_, _| Ok(Mat2::diag(1.0, 1.0 + 1e-9)));
        assert!(matches!(r, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn dump_roundtrip_both_encodings() {
        let g = grid();
        let mut f = SpinorField::from_fn(g, |x, y| [C64::new(x.sin(), y / 3.0), C64::new(1e-300, -x * y)]);
        f.tau = 0.1 + 0.2;
        for enc in [Encoding::Binary, Encoding::Ascii] {
            let mut buf = Vec::new();
            write_dump(&f, enc, &mut buf).unwrap();
            let back = read_dump(&buf[..]).unwrap();
            assert_eq!(back, f, "{enc:?}");
        }
    }

    #[test]
    fn dump_layout_is_component_major() {
        let g = Grid2D::square(8, 1.0).unwrap();
        let mut f = SpinorField::zeros(g);
        f.g1[g.index(0, 1)] = C64::new(2.0, 3.0);
        f.g2[0] = C64::new(-1.0, 0.5);
        let mut buf = Vec::new();
        write_dump(&f, Encoding::Binary, &mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf[..60]).to_string();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("CISCAT-FIELD v1"));
        assert_eq!(lines.next(), Some("8 8 -1.0 1.0 -1.0 1.0 0.0"));
        assert_eq!(lines.next(), Some("encoding binary"));
        let header_len = buf.len() - 32 * 64;
        let payload = &buf[header_len..];
        let read = |k: usize| f64::from_le_bytes(payload[8 * k..8 * k + 8].try_into().unwrap());
        assert_eq!((read(2), read(3)), (2.0, 3.0));
        assert_eq!((read(128), read(129)), (-1.0, 0.5));
    }

    #[test]
    fn dump_rejects_garbage() {
        assert!(read_dump(&b"NOPE\n"[..]).is_err());
        assert!(read_dump(&b"CISCAT-FIELD v1\n8 8 0 1 0 1\nencoding binary\n"[..]).is_err());
        assert!(read_dump(&b"CISCAT-FIELD v1\n8 8 0 1 0 1 0\nencoding binary\n1234"[..]).is_err());
    }

    #[test]
    fn bilinear_sample_reproduces_linear_fields() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, y| C64::new(2.0 * x - y, x + 0.5));
        let z = f.sample(0.3, 1.1).unwrap();
        assert!((z - C64::new(0.6 - 1.1, 0.8)).norm() < 1e-12);
        assert!(f.sample(-1.99, 0.0).is_none());
    }
}
