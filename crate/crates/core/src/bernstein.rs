//! Tensor-product Bernstein approximation with exact expansion into the monomial
//! basis, and a degree-doubling driver that meets a sampled sup-error target.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{sample, sample_exact, ScalarField};
use crate::grid::{Grid, DEFAULT_GRID_CAP};
use crate::polynomial::{lcm_of_denominators, MultiIndex, Polynomial};
use crate::region::BoxRegion;
use crate::scalar::{rational, rational_from_f64};
use crate::tensor::{contract_axis, unflatten};
use crate::ExactPolynomial;

/// How samples are turned into a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BernsteinScheme {
    /// The plain operator `B_d`.
    Plain,
    /// Richardson combination `Σ_j w_j B_{d/2^j}`, `j = 0..=order`, cancelling
    /// the `1/d, …, 1/d^order` terms of the error expansion. Uses only the
    /// degree-`d` samples.
    Extrapolated { order: u32 },
}

impl Default for BernsteinScheme {
    fn default() -> Self {
        BernsteinScheme::Extrapolated { order: 2 }
    }
}

impl BernsteinScheme {
    /// Levels actually used at degree `d` (each level halves the degree, which must stay integral).
    fn levels(self, d: u32) -> u32 {
        match self {
            BernsteinScheme::Plain => 0,
            BernsteinScheme::Extrapolated { order } => order.min(d.trailing_zeros()),
        }
    }

    /// Combination weights for the levels used at degree `d`.
    pub fn weights(self, d: u32) -> Vec<BigRational> {
        let s = self.levels(d);
        let z: Vec<BigRational> = (0..=s)
            .map(|j| BigRational::from_integer(BigInt::one() << j))
            .collect();
        (0..z.len())
            .map(|j| {
                (0..z.len())
                    .filter(|&l| l != j)
                    .fold(BigRational::one(), |acc, l| acc * &z[l] / (&z[l] - &z[j]))
            })
            .collect()
    }

    /// `Σ_j |w_j|`; 1 for the plain operator.
    pub fn weight_norm(self, d: u32) -> f64 {
        self.weights(d)
            .iter()
            .map(|w| crate::scalar::rational_to_f64(&w.abs()))
            .sum()
    }
}

/// `N[j][k] = C(d,k)·[yʲ] (1+y)ᵏ(1−y)^{d−k}`: the basis change from Bernstein
/// coefficients on `[-1,1]` to monomials, up to the factor `2^{-d}`.
fn basis_matrix(d: usize) -> Vec<Vec<BigInt>> {
    let expand = |k: usize| {
        let mut poly = vec![BigInt::one()];
        for step in 0..d {
            let sign = if step < k { 1 } else { -1 };
            let mut next = vec![BigInt::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * sign;
            }
            poly = next;
        }
        poly
    };
    let columns: Vec<Vec<BigInt>> = (0..=d)
        .map(|k| {
            let c = binomial(BigInt::from(d), BigInt::from(k));
            expand(k).into_iter().map(|v| v * &c).collect()
        })
        .collect();
    (0..=d)
        .map(|j| (0..=d).map(|k| columns[k][j].clone()).collect())
        .collect()
}

/// Bernstein polynomial in `y ∈ [-1,1]ⁿ` from node samples `f(k/d)` (row-major, `(d+1)ⁿ`).
///
/// Samples are put over a common denominator and the whole basis change runs
/// in integers.
fn unit_bernstein(samples: &[BigRational], n: usize, d: usize) -> ExactPolynomial {
    let den = lcm_of_denominators(samples);
    let mut data: Vec<BigInt> = samples
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    let shape = vec![d + 1; n];
    let matrix = basis_matrix(d);
    for axis in 0..n {
        data = contract_axis(&data, &shape, axis, &matrix);
    }
    let scale = BigRational::new(BigInt::one(), den << (n * d));
    let terms = data
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(flat, c)| {
            let idx = unflatten(flat, &shape)
                .into_iter()
                .map(|k| k as u32)
                .collect();
            (MultiIndex::new(idx), BigRational::from_integer(c) * &scale)
        });
    Polynomial::from_terms(n, terms).expect("exponents have length n")
}

/// Samples on the degree-`d/step` node grid picked out of the degree-`d` samples.
fn subsample<T: Clone>(samples: &[T], n: usize, d: usize, step: usize) -> Vec<T> {
    let m = d / step + 1;
    let total = m.pow(n as u32);
    (0..total)
        .map(|flat| {
            let idx = unflatten(flat, &vec![m; n]);
            let src = idx.iter().fold(0, |acc, &k| acc * (d + 1) + k * step);
            samples[src].clone()
        })
        .collect()
}

/// Maps a polynomial in `y ∈ [-1,1]ⁿ` onto the box coordinates.
fn to_box(p: &ExactPolynomial, region: &BoxRegion) -> ExactPolynomial {
    let two = rational(2, 1);
    let (scale, shift): (Vec<_>, Vec<_>) = region
        .lower()
        .iter()
        .zip(region.upper())
        .map(|(a, b)| {
            let half = (b - a) / &two;
            let centre = (a + b) / &two;
            (half.recip(), -centre / half)
        })
        .unzip();
    p.affine_substitute(&scale, &shift)
        .expect("box dimension matches")
}

/// Plain tensor-product Bernstein polynomial of degree `degree` in every variable.
pub fn bernstein_approx<F: ScalarField + ?Sized>(
    f: &F,
    degree: u32,
    region: &BoxRegion,
) -> Result<ExactPolynomial> {
    bernstein_with(f, degree, region, BernsteinScheme::Plain, DEFAULT_GRID_CAP)
}

/// Bernstein-type approximant under `scheme`, with an explicit grid cap.
pub fn bernstein_with<F: ScalarField + ?Sized>(
    f: &F,
    degree: u32,
    region: &BoxRegion,
    scheme: BernsteinScheme,
    grid_cap: usize,
) -> Result<ExactPolynomial> {
    let n = region.dimension();
    region.require_dimension(f.dimension())?;
    if degree == 0 {
        return Err(Error::InvalidArgument(
            "Bernstein degree must be at least 1".into(),
        ));
    }
    let grid = Grid::bernstein_nodes(region, degree);
    grid.check_cap(grid_cap)?;
    let samples = match sample_exact(f, &grid) {
        Some(exact) => exact,
        None => sample(f, &grid)?
            .into_iter()
            .map(|v| rational_from_f64(v).expect("samples are finite"))
            .collect(),
    };
    let d = degree as usize;
    let mut unit = Polynomial::zero(n);
    for (j, w) in scheme.weights(degree).iter().enumerate() {
        let step = 1 << j;
        let level = if step == 1 {
            unit_bernstein(&samples, n, d)
        } else {
            unit_bernstein(&subsample(&samples, n, d, step), n, d / step)
        };
        unit = unit + level.scalar_mul(w);
    }
    Ok(to_box(&unit, region))
}

/// Per-variable degree cap used when none is given.
pub fn default_degree_cap(n: usize) -> u32 {
    if n <= 2 {
        64
    } else {
        16
    }
}

#[derive(Debug, Clone)]
pub struct ApproxOptions {
    /// Points per axis of the error-check grid.
    pub grid_density: usize,
    pub start_degree: u32,
    /// `None` means [`default_degree_cap`].
    pub degree_cap: Option<u32>,
    /// Accept once the error bound is at most `tol × safety`.
    pub safety: f64,
    pub scheme: BernsteinScheme,
    pub grid_cap: usize,
    /// Per-coordinate Lipschitz constant of the target. When set, acceptance uses
    /// `sampled + (1 + Σ|w_j|)·L·n·h/2` with `h` the check-grid pitch.
    pub lipschitz: Option<f64>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            grid_density: 64,
            start_degree: 4,
            degree_cap: None,
            safety: 0.5,
            scheme: BernsteinScheme::default(),
            grid_cap: DEFAULT_GRID_CAP,
            lipschitz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub polynomial: ExactPolynomial,
    pub degree: u32,
    /// Max `|p − f|` over the check grid.
    pub sampled_error: f64,
    /// Quantity compared against the tolerance (equals `sampled_error` unless the
    /// Lipschitz mode is on).
    pub error_bound: f64,
}

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

/// Doubles the degree from `start_degree` until the sampled sup-error on the
/// endpoint grid is within `tol × safety`.
pub fn approx_to_tolerance<F: ScalarField + ?Sized>(
    f: &F,
    tol: f64,
    region: &BoxRegion,
    options: &ApproxOptions,
) -> Result<Approximation> {
    check_tolerance(tol)?;
    let n = region.dimension();
    region.require_dimension(f.dimension())?;
    let cap = options.degree_cap.unwrap_or_else(|| default_degree_cap(n));
    if options.start_degree == 0 || options.start_degree > cap {
        return Err(Error::InvalidArgument(format!(
            "start degree {} must lie in 1..={cap}",
            options.start_degree
        )));
    }
    let grid = Grid::endpoint(region, options.grid_density)?;
    grid.check_cap(options.grid_cap)?;
    let target = sample(f, &grid)?;
    let target_value = tol * options.safety;

    let mut best: Option<Approximation> = None;
    let mut d = options.start_degree;
    loop {
        let polynomial = bernstein_with(f, d, region, options.scheme, options.grid_cap)?;
        let values = polynomial.eval_on_grid(grid.axes())?;
        let sampled_error = values
            .iter()
            .zip(&target)
            .map(|(p, v)| (p - v).abs())
            .fold(0.0, f64::max);
        let error_bound = match options.lipschitz {
            Some(l) => {
                sampled_error
                    + (1.0 + options.scheme.weight_norm(d)) * l * n as f64 * grid.pitch() / 2.0
            }
            None => sampled_error,
        };
        let candidate = Approximation {
            polynomial,
            degree: d,
            sampled_error,
            error_bound,
        };
        if error_bound <= target_value {
            return Ok(candidate);
        }
        if best.as_ref().is_none_or(|b| error_bound < b.error_bound) {
            best = Some(candidate);
        }
        if d >= cap {
            break;
        }
        d = (2 * d).min(cap);
    }
    let best = best.expect("at least one degree was tried");
    Err(Error::ToleranceUnachievable {
        tolerance: tol,
        degree_cap: cap,
        best_error: best.error_bound,
        best_degree: best.degree,
    })
}
