//! Scattering of nuclear wave packets through conical intersections.
//!
//! The crate covers three complementary routes to the same physics:
//!
//! - [`propagator`]: split-operator propagation of a two-state diabatic
//!   wave packet on a uniform grid ([`field`], [`models`]).
//! - [`partialwave`]: analytic Aharonov-Bohm scattering and the partial-wave
//!   solution with a short-range potential.
//! - [`gauge`] and [`topo`]: gauge potentials, Wilson loops, topological
//!   charge and phase-dislocation detection.
//!
//! All quantities are dimensionless. Lengths are in units of the cone
//! scale, time in units of the inverse gap, and the kinetic operator is
//! `-∇²` (reduced mass one half).

pub mod error;
pub mod field;
pub mod gauge;
pub mod linalg;
pub mod models;
pub mod partialwave;
pub mod propagator;
pub mod special;
pub mod spectral;
pub mod topo;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
