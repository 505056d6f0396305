//! Evaluable scalar fields and grid sampling.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{EvalError, Expression};
use crate::grid::Grid;
use crate::polynomial::MultiIndex;
use crate::tensor::unflatten;
use crate::ExactPolynomial;

/// A pure real-valued function on `ℝⁿ`, safe to evaluate from many threads.
pub trait ScalarField: Sync {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64, EvalError>;

    /// Exact value at a rational point when the field can provide one.
    fn exact_value(&self, _x: &[BigRational]) -> Option<BigRational> {
        None
    }
}

impl ScalarField for Expression {
    fn dimension(&self) -> usize {
        Expression::dimension(self)
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.eval(x)
    }

    fn exact_value(&self, x: &[BigRational]) -> Option<BigRational> {
        self.eval_rational(x)
    }
}

impl ScalarField for ExactPolynomial {
    fn dimension(&self) -> usize {
        ExactPolynomial::dimension(self)
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(self
            .eval_exact_f64(x)
            .expect("point dimension matches polynomial"))
    }

    fn exact_value(&self, x: &[BigRational]) -> Option<BigRational> {
        self.eval(x).ok()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        (**self).value(x)
    }

    fn exact_value(&self, x: &[BigRational]) -> Option<BigRational> {
        (**self).exact_value(x)
    }
}

/// Wraps a closure as a field.
pub struct FnField<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        FnField { dimension, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> ScalarField for FnField<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok((self.f)(x))
    }
}

/// Values of `f` on every grid point, row-major. Non-finite values are errors.
pub fn sample<F: ScalarField + ?Sized>(f: &F, grid: &Grid) -> Result<Vec<f64>> {
    if f.dimension() != grid.dimension() {
        return Err(Error::InvalidArgument(format!(
            "field has dimension {} but the grid has dimension {}",
            f.dimension(),
            grid.dimension()
        )));
    }
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            let v = f.value(&x)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteSample { point: x, value: v })
            }
        })
        .collect()
}

/// Exact values on every grid node, or `None` if the field cannot supply them
/// at some node.
pub fn sample_exact<F: ScalarField + ?Sized>(f: &F, grid: &Grid) -> Option<Vec<BigRational>> {
    if f.dimension() != grid.dimension() || grid.is_empty() {
        return None;
    }
    // Cheap probe so transcendental fields bail out before the parallel pass.
    let first: Vec<BigRational> = grid.axes().iter().map(|a| a[0].clone()).collect();
    f.exact_value(&first)?;
    let shape = grid.shape();
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x: Vec<BigRational> = unflatten(k, &shape)
                .into_iter()
                .enumerate()
                .map(|(axis, i)| grid.axes()[axis][i].clone())
                .collect();
            f.exact_value(&x)
        })
        .collect()
}

/// Either a symbolic expression or an exact polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Expression(Expression),
    Polynomial(ExactPolynomial),
}

impl Field {
    pub fn dimension(&self) -> usize {
        match self {
            Field::Expression(e) => e.dimension(),
            Field::Polynomial(p) => p.dimension(),
        }
    }

    /// Grid values; polynomials are evaluated exactly and rounded once.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Field::Expression(e) => sample(e, grid),
            Field::Polynomial(p) => Ok(p.eval_on_grid(grid.axes())?),
        }
    }
}

impl From<Expression> for Field {
    fn from(e: Expression) -> Self {
        Field::Expression(e)
    }
}

impl From<ExactPolynomial> for Field {
    fn from(p: ExactPolynomial) -> Self {
        Field::Polynomial(p)
    }
}

impl ScalarField for Field {
    fn dimension(&self) -> usize {
        Field::dimension(self)
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Field::Expression(e) => e.eval(x),
            Field::Polynomial(p) => ScalarField::value(p, x),
        }
    }

    fn exact_value(&self, x: &[BigRational]) -> Option<BigRational> {
        match self {
            Field::Expression(e) => e.exact_value(x),
            Field::Polynomial(p) => p.exact_value(x),
        }
    }
}

/// Fields whose mixed partials `D^α` are available exactly.
pub trait Differentiable: Sized {
    fn dimension(&self) -> usize;
    fn partial(&self, alpha: &MultiIndex) -> Result<Self>;
}

impl Differentiable for Expression {
    fn dimension(&self) -> usize {
        Expression::dimension(self)
    }

    fn partial(&self, alpha: &MultiIndex) -> Result<Self> {
        self.differentiate(alpha)
    }
}

impl Differentiable for ExactPolynomial {
    fn dimension(&self) -> usize {
        ExactPolynomial::dimension(self)
    }

    fn partial(&self, alpha: &MultiIndex) -> Result<Self> {
        Ok(self.diff_multi(alpha)?)
    }
}

impl Differentiable for Field {
    fn dimension(&self) -> usize {
        Field::dimension(self)
    }

    fn partial(&self, alpha: &MultiIndex) -> Result<Self> {
        Ok(match self {
            Field::Expression(e) => Field::Expression(e.differentiate(alpha)?),
            Field::Polynomial(p) => Field::Polynomial(p.diff_multi(alpha)?),
        })
    }
}

/// Largest entry of a sampled error and the grid point where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledMax {
    pub value: f64,
    pub point: Vec<f64>,
}

impl SampledMax {
    /// Max of `|values|` over the grid, skipping indices rejected by `keep`.
    pub fn of(values: &[f64], grid: &Grid, keep: impl Fn(usize) -> bool) -> SampledMax {
        let mut best: Option<(usize, f64)> = None;
        for (k, v) in values.iter().enumerate() {
            if keep(k) && best.is_none_or(|(_, b)| v.abs() > b) {
                best = Some((k, v.abs()));
            }
        }
        match best {
            Some((k, v)) => SampledMax {
                value: v,
                point: grid.point(k),
            },
            None => SampledMax {
                value: 0.0,
                point: vec![],
            },
        }
    }
}
