//! Approximation in the norm `sup |u(x)| / xᵀx`: a Taylor polynomial at the
//! origin absorbs the low-order part, and the quotient residual is approximated
//! by Bernstein-type polynomials.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::bernstein::{approx_to_tolerance, check_tolerance, ApproxOptions, Approximation};
use crate::error::{Error, Result};
use crate::expr::{EvalError, Expression};
use crate::field::{Field, ScalarField};
use crate::grid::{norm_sq, Grid};
use crate::kmap::{apply_k, DerivativeTuple};
use crate::polynomial::{MultiIndex, Polynomial};
use crate::region::BoxRegion;
use crate::scalar::{rational, rational_from_f64};
use crate::sobolev::{
    first_violation, max_error, partial_errors, per_component_tolerance, PartialError,
};
use crate::{ExactPolynomial, FloatPolynomial};

/// Radius of the origin ball on which the residual quotient is defined as 0 and
/// which weighted checks skip.
pub const ETA: f64 = 1e-6;

/// Derivative values `D^γ v(0)` for `|γ| ≤ order`: exact for rational
/// expressions, otherwise the double value converted exactly.
pub fn derivatives_at_origin(
    v: &Expression,
    order: u32,
) -> Result<BTreeMap<MultiIndex, BigRational>> {
    let n = v.dimension();
    let origin = vec![0.0; n];
    let exact_origin = vec![BigRational::zero(); n];
    let mut trees: BTreeMap<MultiIndex, Expression> = BTreeMap::new();
    let mut values = BTreeMap::new();
    for gamma in MultiIndex::up_to_degree(n, order) {
        let tree = match (0..n).find(|&i| gamma.get(i) > 0) {
            None => v.clone(),
            Some(i) => {
                let mut parent = gamma.clone();
                parent.set(i, gamma.get(i) - 1);
                trees[&parent].diff(i)
            }
        };
        let exact = match tree.eval_rational(&exact_origin) {
            Some(exact) => exact,
            None => {
                let value = tree.eval(&origin).map_err(|e| {
                    Error::HypothesisFailed(format!(
                        "D^{gamma} v is not defined at the origin: {e}"
                    ))
                })?;
                rational_from_f64(value).ok_or_else(|| {
                    Error::HypothesisFailed(format!("D^{gamma} v is not finite at the origin"))
                })?
            }
        };
        values.insert(gamma.clone(), exact);
        trees.insert(gamma, tree);
    }
    Ok(values)
}

/// Taylor polynomial of `v` at the origin up to total degree `order`.
pub fn taylor(v: &Expression, order: u32) -> Result<ExactPolynomial> {
    let terms = derivatives_at_origin(v, order)?
        .into_iter()
        .map(|(gamma, d)| {
            let f = rational(gamma.factorial() as i64, 1);
            (gamma, d / f)
        });
    Ok(Polynomial::from_terms(v.dimension(), terms)?)
}

/// Second-order Taylor polynomial at the origin.
pub fn taylor2(v: &Expression) -> Result<ExactPolynomial> {
    taylor(v, 2)
}

/// `h(x) = (v(x) − m(x)) / xᵀx`, with `h = 0` for `‖x‖₂ < η`.
#[derive(Debug, Clone)]
pub struct WeightedResidual {
    v: Expression,
    m: FloatPolynomial,
    // `v − m` when `v` is a polynomial, evaluated exactly instead.
    exact_difference: Option<ExactPolynomial>,
    eta: f64,
}

impl WeightedResidual {
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

impl ScalarField for WeightedResidual {
    fn dimension(&self) -> usize {
        self.v.dimension()
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        let s = norm_sq(x);
        if s.sqrt() < self.eta {
            return Ok(0.0);
        }
        if let Some(r) = &self.exact_difference {
            return Ok(r
                .eval_exact_f64(x)
                .expect("dimension checked at construction")
                / s);
        }
        let m = self
            .m
            .eval_f64(x)
            .expect("dimension checked at construction");
        Ok((self.v.eval(x)? - m) / s)
    }
}

pub fn weighted_residual_field(v: &Expression, m: &ExactPolynomial) -> Result<WeightedResidual> {
    if m.dimension() != v.dimension() {
        return Err(Error::InvalidArgument(format!(
            "Taylor polynomial has dimension {} but the field has dimension {}",
            m.dimension(),
            v.dimension()
        )));
    }
    let exact_difference = v.to_polynomial().ok().map(|p| p - m.clone());
    Ok(WeightedResidual {
        v: v.clone(),
        m: m.to_float(),
        exact_difference,
        eta: ETA,
    })
}

/// `max |(D^α u − D^α v)(x)| / xᵀx` over grid points with `‖x‖₂ ≥ η`, every binary `α`.
pub fn weighted_errors_on(
    u: &Field,
    v: &Field,
    grid: &Grid,
    eta: f64,
) -> Result<Vec<PartialError>> {
    partial_errors(
        u,
        v,
        grid,
        |_, x| norm_sq(x).sqrt() >= eta,
        |d, x| d / norm_sq(x),
    )
}

/// Sampled weighted Sobolev distance on the endpoint grid.
pub fn weighted_norm_sampled(
    u: &Field,
    v: &Field,
    region: &BoxRegion,
    grid_density: usize,
) -> Result<f64> {
    let grid = Grid::endpoint(region, grid_density)?;
    Ok(max_error(&weighted_errors_on(u, v, &grid, ETA)?))
}

/// Max of `|u(x) − v(x)| / xᵀx` alone (no derivatives) on `grid`, skipping the η-ball.
fn weighted_value_error(
    p: &ExactPolynomial,
    v: &Expression,
    grid: &Grid,
    eta: f64,
) -> Result<PartialError> {
    let a = p.eval_on_grid(grid.axes())?;
    let b = crate::field::sample(v, grid)?;
    let mut best = (0.0f64, Vec::new());
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        let point = grid.point(k);
        let s = norm_sq(&point);
        if s.sqrt() < eta {
            continue;
        }
        let e = ((x - y) / s).abs();
        if e > best.0 || best.1.is_empty() {
            best = (e, point);
        }
    }
    Ok(PartialError {
        alpha: MultiIndex::zeros(v.dimension()),
        error: crate::field::SampledMax {
            value: best.0,
            point: best.1,
        },
    })
}

#[derive(Debug, Clone)]
pub struct WeightedOptions {
    pub approx: ApproxOptions,
    /// Total degree of the Taylor polynomial subtracted before approximating; at least 2.
    pub taylor_order: u32,
    pub verify_density: usize,
    pub eta: f64,
}

impl Default for WeightedOptions {
    fn default() -> Self {
        WeightedOptions {
            approx: ApproxOptions::default(),
            taylor_order: 4,
            verify_density: 64,
            eta: ETA,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedApproximation {
    /// `p = m + q·xᵀx`.
    pub polynomial: ExactPolynomial,
    pub taylor: ExactPolynomial,
    /// The fit `q` of the residual quotient.
    pub residual: Approximation,
    /// `max |p − v| / xᵀx` on the verification grid.
    pub verification: PartialError,
}

fn check_setup(
    v: &Expression,
    epsilon: f64,
    region: &BoxRegion,
    options: &WeightedOptions,
) -> Result<()> {
    check_tolerance(epsilon)?;
    region.require_dimension(v.dimension())?;
    region.require_origin()?;
    if options.taylor_order < 2 {
        return Err(Error::InvalidArgument(format!(
            "Taylor order must be at least 2, got {}",
            options.taylor_order
        )));
    }
    Ok(())
}

/// Polynomial `p` with `|p(x) − v(x)| ≤ ε·xᵀx` on the sampled box.
pub fn approximate_weighted(
    v: &Expression,
    epsilon: f64,
    region: &BoxRegion,
    options: &WeightedOptions,
) -> Result<WeightedApproximation> {
    check_setup(v, epsilon, region, options)?;
    let n = v.dimension();
    let m = taylor(v, options.taylor_order)?;
    let h = weighted_residual_field(v, &m)?.with_eta(options.eta);
    let residual = approx_to_tolerance(&h, epsilon, region, &options.approx)?;
    let polynomial = &m + &(&residual.polynomial * &Polynomial::squared_norm(n));

    let grid = Grid::offset(region, options.verify_density)?;
    grid.check_cap(options.approx.grid_cap)?;
    let verification = weighted_value_error(&polynomial, v, &grid, options.eta)?;
    first_violation(std::slice::from_ref(&verification), epsilon)?;
    Ok(WeightedApproximation {
        polynomial,
        taylor: m,
        residual,
        verification,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSobolevApproximation {
    pub polynomial: ExactPolynomial,
    pub component_tolerance: f64,
    /// The weighted approximants `r_α`, graded-lex order of `α`.
    pub components: Vec<(MultiIndex, WeightedApproximation)>,
    pub verification: Vec<PartialError>,
}

impl WeightedSobolevApproximation {
    pub fn sampled_error(&self) -> f64 {
        max_error(&self.verification)
    }
}

/// Weighted approximants `r_α` of every `D^α v` assembled as `p = K({r_α})`,
/// checked against `max_α sup |D^α p − D^α v| / xᵀx ≤ ε` outside the η-ball.
pub fn approximate_weighted_sobolev(
    v: &Expression,
    epsilon: f64,
    region: &BoxRegion,
    options: &WeightedOptions,
) -> Result<WeightedSobolevApproximation> {
    check_setup(v, epsilon, region, options)?;
    let n = v.dimension();
    let component_tolerance = per_component_tolerance(epsilon, region);
    let partials = DerivativeTuple::of(v)?;
    let components: Vec<(MultiIndex, WeightedApproximation)> = partials
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(alpha, d)| {
            Ok((
                alpha,
                approximate_weighted(d, component_tolerance, region, options)?,
            ))
        })
        .collect::<Result<_>>()?;
    let tuple = DerivativeTuple::from_pairs(
        n,
        components
            .iter()
            .map(|(a, w)| (a.clone(), w.polynomial.clone())),
    )?;
    let polynomial = apply_k(&tuple)?;

    let grid = Grid::offset(region, options.verify_density)?;
    grid.check_cap(options.approx.grid_cap)?;
    let verification = weighted_errors_on(
        &Field::Polynomial(polynomial.clone()),
        &Field::Expression(v.clone()),
        &grid,
        options.eta,
    )?;
    first_violation(&verification, epsilon)?;
    Ok(WeightedSobolevApproximation {
        polynomial,
        component_tolerance,
        components,
        verification,
    })
}
