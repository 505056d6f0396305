//! Approximation in the norm `max_{α ∈ Zⁿ} ‖D^α u‖∞`, measured on sampling grids.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::{approx_to_tolerance, check_tolerance, ApproxOptions};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::field::{Differentiable, Field, SampledMax};
use crate::grid::Grid;
use crate::kmap::{apply_k, DerivativeTuple};
use crate::polynomial::MultiIndex;
use crate::region::BoxRegion;
use crate::ExactPolynomial;

/// Sampled sup-error of one mixed partial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialError {
    pub alpha: MultiIndex,
    pub error: SampledMax,
}

/// `max |D^α u − D^α v|` on `grid` for every binary `α`, graded-lex order.
pub fn sobolev_errors_on(u: &Field, v: &Field, grid: &Grid) -> Result<Vec<PartialError>> {
    partial_errors(u, v, grid, |_, _| true, |d, _| d)
}

pub(crate) fn partial_errors(
    u: &Field,
    v: &Field,
    grid: &Grid,
    keep: impl Fn(usize, &[f64]) -> bool + Sync,
    weight: impl Fn(f64, &[f64]) -> f64 + Sync,
) -> Result<Vec<PartialError>> {
    let n = u.dimension();
    if v.dimension() != n || grid.dimension() != n {
        return Err(Error::InvalidArgument(
            "fields and grid must share one dimension".into(),
        ));
    }
    let points: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| grid.point(k))
        .collect();
    MultiIndex::binary(n)
        .into_par_iter()
        .map(|alpha| {
            let a = u.partial(&alpha)?.sample(grid)?;
            let b = v.partial(&alpha)?.sample(grid)?;
            let diff: Vec<f64> = a
                .iter()
                .zip(&b)
                .zip(&points)
                .map(|((x, y), p)| weight(x - y, p))
                .collect();
            let error = SampledMax::of(&diff, grid, |k| keep(k, &points[k]));
            Ok(PartialError { alpha, error })
        })
        .collect()
}

/// Sampled Sobolev distance `max_α ‖D^α u − D^α v‖∞` on the endpoint grid with
/// `grid_density` points per axis.
pub fn sobolev_norm_sampled(
    u: &Field,
    v: &Field,
    region: &BoxRegion,
    grid_density: usize,
) -> Result<f64> {
    let grid = Grid::endpoint(region, grid_density)?;
    Ok(max_error(&sobolev_errors_on(u, v, &grid)?))
}

pub(crate) fn max_error(errors: &[PartialError]) -> f64 {
    errors.iter().map(|e| e.error.value).fold(0.0, f64::max)
}

/// Budget for each of the `2ⁿ` component approximations: `ε / (2·max(1, R))ⁿ`,
/// `R` the largest coordinate magnitude on the box (the gain of one integral).
pub fn per_component_tolerance(epsilon: f64, region: &BoxRegion) -> f64 {
    let r = region.max_abs().to_f64().unwrap_or(f64::INFINITY).max(1.0);
    epsilon / (2.0 * r).powi(region.dimension() as i32)
}

#[derive(Debug, Clone)]
pub struct SobolevOptions {
    pub approx: ApproxOptions,
    /// Points per axis of the cell-centre verification grid.
    pub verify_density: usize,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        SobolevOptions {
            approx: ApproxOptions::default(),
            verify_density: 64,
        }
    }
}

/// One `q_α` of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub alpha: MultiIndex,
    pub degree: u32,
    pub sampled_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevApproximation {
    pub polynomial: ExactPolynomial,
    pub component_tolerance: f64,
    pub components: Vec<Component>,
    /// Errors of every partial on the verification grid.
    pub verification: Vec<PartialError>,
}

impl SobolevApproximation {
    pub fn sampled_error(&self) -> f64 {
        max_error(&self.verification)
    }
}

pub(crate) fn first_violation(errors: &[PartialError], tolerance: f64) -> Result<()> {
    match errors.iter().find(|e| e.error.value > tolerance) {
        Some(e) => Err(Error::VerificationFailed {
            alpha: e.alpha.clone(),
            point: e.error.point.clone(),
            error: e.error.value,
            tolerance,
        }),
        None => Ok(()),
    }
}

/// Approximates every `D^α v` to the per-component budget with Bernstein-type
/// polynomials `q_α`, assembles `p = K({q_α})`, then checks
/// `max_α ‖D^α p − D^α v‖ ≤ ε` on the cell-centre grid.
pub fn approximate_sobolev(
    v: &Expression,
    epsilon: f64,
    region: &BoxRegion,
    options: &SobolevOptions,
) -> Result<SobolevApproximation> {
    check_tolerance(epsilon)?;
    let n = v.dimension();
    region.require_dimension(n)?;
    let component_tolerance = per_component_tolerance(epsilon, region);
    let partials = DerivativeTuple::of(v)?;
    let fitted: Vec<(MultiIndex, crate::bernstein::Approximation)> = partials
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(alpha, d)| {
            Ok((
                alpha,
                approx_to_tolerance(d, component_tolerance, region, &options.approx)?,
            ))
        })
        .collect::<Result<_>>()?;
    let components = fitted
        .iter()
        .map(|(alpha, a)| Component {
            alpha: alpha.clone(),
            degree: a.degree,
            sampled_error: a.sampled_error,
        })
        .collect();
    let tuple = DerivativeTuple::from_pairs(n, fitted.into_iter().map(|(a, f)| (a, f.polynomial)))?;
    let polynomial = apply_k(&tuple)?;

    let grid = Grid::offset(region, options.verify_density)?;
    grid.check_cap(options.approx.grid_cap)?;
    let verification = sobolev_errors_on(
        &Field::Polynomial(polynomial.clone()),
        &Field::Expression(v.clone()),
        &grid,
    )?;
    first_violation(&verification, epsilon)?;
    Ok(SobolevApproximation {
        polynomial,
        component_tolerance,
        components,
        verification,
    })
}
