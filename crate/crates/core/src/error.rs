use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("symmetric part is not positive definite (smallest eigenvalue {eigenvalue})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("operation requires a Hilbert space (s = p = 2), got s = {s}, p = {p}")]
    NotHilbert { s: f64, p: f64 },

    #[error("point is not a fixed point of the map (displacement {displacement})")]
    NotFixedPoint { displacement: f64 },

    #[error("map {index} failed the quasi-phi_p-nonexpansive check (worst residual {residual})")]
    NotQuasiNonexpansive { index: usize, residual: f64 },

    #[error("resolvent did not reach tolerance after {iterations} iterations (best residual {best_residual})")]
    ResolventFailed { iterations: usize, best_residual: f64 },

    #[error("regularization path failed at n = {index}: {source}")]
    PathFailed {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("oracle failed: {0}")]
    OracleFailed(String),

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn non_finite(context: impl Into<String>) -> Self {
        Error::NonFinite {
            context: context.into(),
        }
    }
}
