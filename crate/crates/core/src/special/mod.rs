//! Special functions: complex error function and Bessel functions.

pub mod bessel;
pub mod erf;

pub use bessel::{bessel_j_halfint, bessel_jy, bessel_y_halfint, halfint_jy, hankel1_halfint, BesselJY};
pub use erf::erf;
