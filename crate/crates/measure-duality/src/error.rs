//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An integrand returned NaN or an infinite value at a probe point.
    #[error("integrand returned a non-finite value at x={x:?}, z={z:?}")]
    NonFiniteEval { x: Vec<f64>, z: Vec<f64> },

    /// The recession limit did not stabilise within the dyadic schedule;
    /// the integrand likely lacks linear growth.
    #[error("recession limit did not converge (last increment {last_increment:.3e})")]
    NoConvergence { last_increment: f64 },

    /// Left and right difference quotients disagree beyond tolerance.
    #[error("integrand is not differentiable at z={z:?} (kink gap {gap:.3e})")]
    NotDifferentiable { z: Vec<f64>, gap: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A measure fails the distributional kernel membership test.
    #[error("measure is infeasible: kernel residual {residual:.3e} exceeds {tolerance:.3e}")]
    Infeasible { residual: f64, tolerance: f64 },

    /// A solver exhausted its iteration budget without a usable iterate.
    #[error("solver stalled: {0}")]
    Stalled(String),

    /// A brute-force scan was requested on a problem with too many degrees
    /// of freedom.
    #[error("brute-force scan refused: {dofs} degrees of freedom exceed the limit of {limit}")]
    TooLarge { dofs: usize, limit: usize },

    /// One of the three approximate-certificate bounds failed.
    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    /// The atom-halo exclusion removed every cell of the grid.
    #[error("halo exclusion of radius {radius:.3e} removed all cells")]
    HaloTooWide { radius: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
