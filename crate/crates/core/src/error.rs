//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the numerical routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Matrix dimensions do not agree.
    DimensionMismatch { left: usize, right: usize },
    /// A matrix (or corner block) is singular to working tolerance.
    Singular { detail: String },
    /// Eigenvalues closer than the separation tolerance.
    Defective { separation: f64 },
    /// An iteration failed to meet its tolerance within the step cap.
    NonConvergence { steps: usize, residual: f64 },
    /// Convergents overflowed despite renormalization.
    Overflow { index: usize },
    /// Both convergents of an approximant vanished, violating the element
    /// invariants (some `(a_n, b_n) = (0, 0)`).
    IndeterminateApproximant { index: usize },
    /// A lower parameter of a q-series hit a pole `b = q^{-k}`.
    SeriesPole { term: usize },
    /// A Bauer-Muir transform does not exist (`λ_n = 0`).
    TransformDoesNotExist { index: usize },
    /// Input outside the supported domain.
    InvalidParameter { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::Singular { detail } => write!(f, "singular matrix: {detail}"),
            Error::Defective { separation } => {
                write!(f, "eigenvalue separation {separation:e} below tolerance")
            }
            Error::NonConvergence { steps, residual } => {
                write!(
                    f,
                    "no convergence after {steps} steps (residual {residual:e})"
                )
            }
            Error::Overflow { index } => {
                write!(f, "convergent overflow at index {index}")
            }
            Error::IndeterminateApproximant { index } => {
                write!(f, "approximant {index} is 0/0; element invariants violated")
            }
            Error::SeriesPole { term } => {
                write!(f, "q-series pole encountered at term {term}")
            }
            Error::TransformDoesNotExist { index } => {
                write!(
                    f,
                    "Bauer-Muir transform does not exist (lambda_{index} = 0)"
                )
            }
            Error::InvalidParameter { detail } => write!(f, "invalid parameter: {detail}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub(crate) fn invalid(detail: &str) -> Self {
        Error::InvalidParameter {
            detail: String::from(detail),
        }
    }

    pub(crate) fn singular(detail: &str) -> Self {
        Error::Singular {
            detail: String::from(detail),
        }
    }
}
