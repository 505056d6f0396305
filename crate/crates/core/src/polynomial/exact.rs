use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::PolyError;
use crate::polynomial::{MultiIndex, Polynomial};
use crate::scalar::rational_from_f64;
use crate::tensor::{contract_axis, flat_index, unflatten};
use crate::ExactPolynomial;

/// Least common multiple of the denominators.
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Exact rational image of a floating-point point. Panics on non-finite input.
pub fn dyadic_point(x: &[f64]) -> Vec<BigRational> {
    x.iter()
        .map(|&v| rational_from_f64(v).expect("non-finite coordinate"))
        .collect()
}

impl Polynomial<BigRational> {
    /// Exact evaluation at the binary value of `x`, rounded once to `f64`.
    pub fn eval_exact_f64(&self, x: &[f64]) -> Result<f64, PolyError> {
        let axes: Vec<Vec<BigRational>> = dyadic_point(x).into_iter().map(|v| vec![v]).collect();
        Ok(self.eval_on_grid(&axes)?[0])
    }

    /// Exact values on the tensor grid `axes[0] × … × axes[n-1]`, each rounded once
    /// to `f64`; row-major with axis 0 slowest.
    ///
    /// Works entirely in integers: coefficients are put over their common
    /// denominator, each axis over its own, and the dense coefficient tensor is
    /// contracted with power tables `aᵢᵉ·q^{D-e}` one axis at a time.
    pub fn eval_on_grid(&self, axes: &[Vec<BigRational>]) -> Result<Vec<f64>, PolyError> {
        let n = self.dimension();
        if axes.len() != n {
            return Err(PolyError::DimensionMismatch {
                expected: n,
                found: axes.len(),
            });
        }
        let points: usize = axes.iter().map(Vec::len).product();
        if self.is_zero() || points == 0 {
            return Ok(vec![0.0; points]);
        }

        let degrees = self.degrees();
        let coeff_den = lcm_of_denominators(self.terms().map(|(_, c)| c));
        let mut shape: Vec<usize> = degrees.iter().map(|&d| d as usize + 1).collect();
        let mut data = vec![BigInt::zero(); shape.iter().product()];
        for (e, c) in self.terms() {
            let idx: Vec<usize> = e.entries().iter().map(|&k| k as usize).collect();
            data[flat_index(&idx, &shape)] = c.numer() * (&coeff_den / c.denom());
        }

        let mut denominator = coeff_den;
        for axis in (0..n).rev() {
            let d = degrees[axis] as usize;
            let q = lcm_of_denominators(&axes[axis]);
            let table: Vec<Vec<BigInt>> = axes[axis]
                .iter()
                .map(|x| {
                    let a = x.numer() * (&q / x.denom());
                    (0..=d)
                        .map(|e| Pow::pow(&a, e) * Pow::pow(&q, d - e))
                        .collect()
                })
                .collect();
            data = contract_axis(&data, &shape, axis, &table);
            shape[axis] = axes[axis].len();
            denominator *= Pow::pow(&q, d);
        }

        Ok(data
            .into_iter()
            .map(|num| {
                crate::scalar::rational_to_f64(&BigRational::new_raw(num, denominator.clone()))
            })
            .collect())
    }

    /// Returns `q(x) = p(scale ⊙ x + shift)` with per-axis affine maps.
    pub fn affine_substitute(
        &self,
        scale: &[BigRational],
        shift: &[BigRational],
    ) -> Result<Self, PolyError> {
        let n = self.dimension();
        if scale.len() != n || shift.len() != n {
            return Err(PolyError::DimensionMismatch {
                expected: n,
                found: scale.len().min(shift.len()),
            });
        }
        if shift.iter().all(Zero::is_zero) {
            let max_deg = self.max_degree_per_var() as usize;
            let powers: Vec<Vec<BigRational>> = scale
                .iter()
                .map(|s| (0..=max_deg).map(|k| Pow::pow(s, k)).collect())
                .collect();
            let terms = self.terms().map(|(e, c)| {
                let f = e
                    .entries()
                    .iter()
                    .enumerate()
                    .fold(c.clone(), |acc, (i, &k)| acc * &powers[i][k as usize]);
                (e.clone(), f)
            });
            return Polynomial::from_terms(n, terms);
        }

        // General case: dense tensor contracted with the binomial expansion of
        // (s·x + t)^j along each axis.
        let degrees = self.degrees();
        let shape: Vec<usize> = degrees.iter().map(|&d| d as usize + 1).collect();
        let mut data = vec![BigRational::zero(); shape.iter().product()];
        for (e, c) in self.terms() {
            let idx: Vec<usize> = e.entries().iter().map(|&k| k as usize).collect();
            data[flat_index(&idx, &shape)] = c.clone();
        }
        for axis in 0..n {
            let d = degrees[axis] as usize;
            // matrix[l][j] = coefficient of x^l in (s x + t)^j
            let mut expansions: Vec<Vec<BigRational>> = Vec::with_capacity(d + 1);
            expansions.push(vec![BigRational::one()]);
            for j in 1..=d {
                let prev = &expansions[j - 1];
                let mut next = vec![BigRational::zero(); j + 1];
                for (l, c) in prev.iter().enumerate() {
                    next[l] += c * &shift[axis];
                    next[l + 1] += c * &scale[axis];
                }
                expansions.push(next);
            }
            let matrix: Vec<Vec<BigRational>> = (0..=d)
                .map(|l| {
                    (0..=d)
                        .map(|j| {
                            expansions[j]
                                .get(l)
                                .cloned()
                                .unwrap_or_else(BigRational::zero)
                        })
                        .collect()
                })
                .collect();
            data = contract_axis(&data, &shape, axis, &matrix);
        }
        let terms = data
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(flat, c)| {
                let idx = unflatten(flat, &shape);
                (
                    MultiIndex::new(idx.into_iter().map(|k| k as u32).collect()),
                    c,
                )
            });
        Polynomial::from_terms(n, terms)
    }

    /// Converts to double-precision coefficients.
    pub fn to_float(&self) -> Polynomial<f64> {
        self.map_coefficients(crate::scalar::rational_to_f64)
    }
}

impl From<&ExactPolynomial> for Polynomial<f64> {
    fn from(p: &ExactPolynomial) -> Self {
        p.to_float()
    }
}
