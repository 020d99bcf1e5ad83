//! Unitary 2D discrete Fourier transform on a [`Grid2D`].
//!
//! The forward transform runs along η (contiguous rows), transposes, then
//! runs along ξ. The propagator works directly in that transposed spectral
//! layout to save two transposes per kinetic step; [`Spectral2::forward`]
//! and [`Spectral2::inverse`] restore the natural ξ-outer layout.

use crate::field::Grid2D;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub struct Spectral2 {
    n_xi: usize,
    n_eta: usize,
    fwd_eta: Arc<dyn Fft<f64>>,
    inv_eta: Arc<dyn Fft<f64>>,
    fwd_xi: Arc<dyn Fft<f64>>,
    inv_xi: Arc<dyn Fft<f64>>,
    work: Vec<C64>,
    scratch: Vec<C64>,
}

impl Spectral2 {
    pub fn new(grid: &Grid2D) -> Self {
        let (n_xi, n_eta) = (grid.n_xi(), grid.n_eta());
        let mut planner = FftPlanner::new();
        let fwd_eta = planner.plan_fft_forward(n_eta);
        let inv_eta = planner.plan_fft_inverse(n_eta);
        let fwd_xi = planner.plan_fft_forward(n_xi);
        let inv_xi = planner.plan_fft_inverse(n_xi);
        let scratch_len =
            [&fwd_eta, &inv_eta, &fwd_xi, &inv_xi].iter().map(|f| f.get_inplace_scratch_len()).max().unwrap_or(0);
        Spectral2 {
            n_xi,
            n_eta,
            fwd_eta,
            inv_eta,
            fwd_xi,
            inv_xi,
            work: vec![C64::new(0.0, 0.0); n_xi * n_eta],
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Unnormalized forward transform; `data` ends in η-outer layout.
    pub(crate) fn forward_transposed(&mut self, data: &mut [C64]) {
        self.fwd_eta.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.work, self.n_xi, self.n_eta);
        self.fwd_xi.process_with_scratch(&mut self.work, &mut self.scratch);
        data.copy_from_slice(&self.work);
    }

    /// Unnormalized inverse of [`Self::forward_transposed`].
    pub(crate) fn inverse_transposed(&mut self, data: &mut [C64]) {
        self.inv_xi.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.work, self.n_eta, self.n_xi);
        self.inv_eta.process_with_scratch(&mut self.work, &mut self.scratch);
        data.copy_from_slice(&self.work);
    }

    /// Unitary forward transform in natural layout (index `[p_ξ·n_eta + p_η]`).
    pub fn forward(&mut self, data: &mut [C64]) {
        self.forward_transposed(data);
        transpose(data, &mut self.work, self.n_eta, self.n_xi);
        let s = 1.0 / ((self.n_xi * self.n_eta) as f64).sqrt();
        for (d, w) in data.iter_mut().zip(&self.work) {
            *d = w * s;
        }
    }

    /// Unitary inverse transform in natural layout.
    pub fn inverse(&mut self, data: &mut [C64]) {
        transpose(data, &mut self.work, self.n_xi, self.n_eta);
        data.copy_from_slice(&self.work);
        self.inverse_transposed(data);
        let s = 1.0 / ((self.n_xi * self.n_eta) as f64).sqrt();
        for d in data.iter_mut() {
            *d *= s;
        }
    }
}

fn transpose(src: &[C64], dst: &mut [C64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Angular wavenumbers of the DFT bins for `n` samples spanning `length`.
pub fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|p| {
            let f = if p < n / 2 { p as f64 } else { p as f64 - n as f64 };
            2.0 * PI * f / length
        })
        .collect()
}

/// Forward-then-inverse unitary transform of both components.
pub fn spectral_roundtrip(field: &crate::field::SpinorField) -> crate::Result<crate::field::SpinorField> {
    field.validate()?;
    let mut out = field.clone();
    let mut plan = Spectral2::new(&field.grid);
    for comp in [&mut out.g1, &mut out.g2] {
        plan.forward(comp);
        plan.inverse(comp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpinorField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid2D, seed: u64) -> SpinorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpinorField::from_fn(grid, |_, _| {
            [C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), C64::new(rng.gen_range(-1.0..1.0), 0.0)]
        })
    }

    #[test]
    fn roundtrip_and_parseval() {
        let grid = Grid2D::new(32, 16, (-3.0, 5.0), (0.0, 2.0)).unwrap();
        let f = random_field(grid, 7);
        let back = spectral_roundtrip(&f).unwrap();
        let err =
            f.g1.iter()
                .chain(&f.g2)
                .zip(back.g1.iter().chain(&back.g2))
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
        assert!(err < 1e-12, "roundtrip error {err}");

        let mut data = f.g1.clone();
        Spectral2::new(&grid).forward(&mut data);
        let before: f64 = f.g1.iter().map(|z| z.norm_sqr()).sum();
        let after: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        assert!((before - after).abs() < 1e-12 * before);
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let grid = Grid2D::square(16, 1.0).unwrap();
        let mut data = vec![C64::new(1.0, 0.0); grid.len()];
        Spectral2::new(&grid).forward(&mut data);
        assert!((data[0] - C64::new(16.0, 0.0)).norm() < 1e-12);
        assert!(data[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn lattice_plane_wave_is_single_coefficient() {
        let grid = Grid2D::new(16, 32, (0.0, 4.0), (-1.0, 1.0)).unwrap();
        let k = wavenumbers(16, 4.0)[3];
        let mut data: Vec<C64> = grid.nodes().map(|(_, x, _)| C64::from_polar(1.0, k * x)).collect();
        Spectral2::new(&grid).forward(&mut data);
        let big: Vec<usize> = (0..data.len()).filter(|&i| data[i].norm() > 1e-10).collect();
        assert_eq!(big, vec![grid.index(3, 0)]);
    }

    #[test]
    fn wavenumber_ordering() {
        let k = wavenumbers(8, 2.0 * PI);
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }
}
