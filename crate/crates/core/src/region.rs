use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

/// Axis-aligned box `[a_1,b_1] × … × [a_n,b_n]` with rational corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    lower: Vec<BigRational>,
    upper: Vec<BigRational>,
}

impl BoxRegion {
    pub fn new(lower: Vec<BigRational>, upper: Vec<BigRational>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidArgument(format!(
                "box corners must be non-empty and of equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(a, b)| a >= b) {
            return Err(Error::InvalidArgument(
                "box must have positive width on every axis".into(),
            ));
        }
        Ok(BoxRegion { lower, upper })
    }

    /// The sup-norm ball `{x : ‖x‖∞ ≤ r}`.
    pub fn centered(n: usize, radius: BigRational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "box radius must be positive, got {radius}"
            )));
        }
        Self::new(vec![-radius.clone(); n], vec![radius; n])
    }

    /// `[-1, 1]ⁿ`.
    pub fn unit(n: usize) -> Self {
        Self::centered(n, BigRational::one()).expect("unit box is valid")
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[BigRational] {
        &self.lower
    }

    pub fn upper(&self) -> &[BigRational] {
        &self.upper
    }

    pub fn contains_origin(&self) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .all(|(a, b)| !a.is_positive() && !b.is_negative())
    }

    /// Radius if the box is a centred sup-norm ball.
    pub fn radius(&self) -> Option<&BigRational> {
        let r = &self.upper[0];
        let centred = self
            .lower
            .iter()
            .zip(&self.upper)
            .all(|(a, b)| b == r && a == &-r);
        centred.then_some(r)
    }

    /// Largest coordinate magnitude over the box.
    pub fn max_abs(&self) -> BigRational {
        self.lower
            .iter()
            .chain(&self.upper)
            .map(|v| v.abs())
            .fold(BigRational::zero(), |acc, v| if v > acc { v } else { acc })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter().enumerate().all(|(i, &v)| {
                rational_to_f64(&self.lower[i]) <= v && v <= rational_to_f64(&self.upper[i])
            })
    }

    pub(crate) fn require_origin(&self) -> Result<()> {
        if self.contains_origin() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "the box must contain the origin".into(),
            ))
        }
    }

    pub(crate) fn require_dimension(&self, n: usize) -> Result<()> {
        if self.dimension() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "box has dimension {} but the field has dimension {n}",
                self.dimension()
            )))
        }
    }
}
