use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::polynomial::MultiIndex;

/// Errors from polynomial ring and calculus operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
    #[error("domain scale factor must be positive")]
    NonPositiveScale,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sampling grid of {points} points exceeds the cap of {cap}")]
    GridCapExceeded { points: usize, cap: usize },
    #[error("non-finite sample {value} at {point:?}")]
    NonFiniteSample { point: Vec<f64>, value: f64 },
    #[error(
        "tolerance {tolerance:e} unachievable up to degree {degree_cap}: best sampled error {best_error:e} at degree {best_degree}"
    )]
    ToleranceUnachievable {
        tolerance: f64,
        degree_cap: u32,
        best_error: f64,
        best_degree: u32,
    },
    #[error(
        "post-hoc verification failed for partial {alpha}: error {error:e} > {tolerance:e} at {point:?}"
    )]
    VerificationFailed {
        alpha: MultiIndex,
        point: Vec<f64>,
        error: f64,
        tolerance: f64,
    },
    #[error("expression is not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("hypothesis check failed: {0}")]
    HypothesisFailed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
