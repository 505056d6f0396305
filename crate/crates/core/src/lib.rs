//! Polynomial approximation of smooth fields in Sobolev and weighted norms, and
//! conversion of smooth Lyapunov certificates into polynomial ones.

pub mod bernstein;
pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod grid;
pub mod kmap;
pub mod lyapunov;
pub mod polynomial;
pub mod region;
pub mod scalar;
pub mod sobolev;
mod tensor;
pub mod weighted;

pub use error::{Error, PolyError, Result};
pub use expr::Expression;
pub use polynomial::{MultiIndex, Polynomial};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Polynomial with exact rational coefficients.
pub type ExactPolynomial = Polynomial<Rational>;
/// Polynomial with double-precision coefficients.
pub type FloatPolynomial = Polynomial<f64>;
