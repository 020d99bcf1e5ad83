//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("eigenbasis undefined at ({x}, {y}): the point is a conical intersection")]
    SingularBasis { x: f64, y: f64 },

    #[error("matrix at node {node} is not unitary (deviation {deviation:e})")]
    NotUnitary { node: usize, deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gauge potential singular at ({x}, {y})")]
    Singularity { x: f64, y: f64 },

    #[error("degenerate conical intersection at ({x}, {y}): vanishing Jacobian determinant")]
    DegenerateCi { x: f64, y: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("norm drift {drift:e} at step {step} exceeds the stability bound")]
    Instability { step: usize, drift: f64 },

    #[error("cross section diverges at theta = {theta}")]
    Divergence { theta: f64 },

    #[error("ill-conditioned matching for order {nu}: denominator {denominator:e}")]
    IllConditioned { nu: f64, denominator: f64 },

    #[error("partial-wave sum not converged: tail magnitude {tail:e}")]
    Truncation { tail: f64 },

    #[error("radial integration failed: {0}")]
    Accuracy(String),

    #[error("loop crosses a near-zero of the field at ({x}, {y})")]
    NodalCrossing { x: f64, y: f64 },

    #[error("field dump format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
