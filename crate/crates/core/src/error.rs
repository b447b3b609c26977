use thiserror::Error;

use crate::spin::Basis;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin sector: {0}")]
    InvalidSector(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A formula was evaluated outside the region where it holds.
    #[error("{0}")]
    Domain(String),

    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: Basis, right: Basis },

    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations (off-diagonal residual {residual:e})")]
    NoConvergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("level {level} out of range for dimension {dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("empty series")]
    EmptySeries,

    #[error("degenerate spectrum: E_max = E_0 = {0}")]
    DegenerateSpectrum(f64),

    #[error("need at least {needed} usable points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("normalization reference {0:e} is too small")]
    ReferenceTooSmall(f64),
}

impl Error {
    /// True for failures of the numerical kernels rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }

    /// True for violated preconditions on otherwise well-formed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::ReferenceTooSmall(_)
                | Error::InsufficientPoints { .. }
                | Error::DegenerateSpectrum(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
