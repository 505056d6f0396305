//! Sparse multivariate polynomials and their exact calculus.
//!
//! [`Polynomial`] is generic over its coefficient field. The exact instance
//! [`ExactPolynomial`](crate::ExactPolynomial) uses arbitrary-precision rationals
//! and is what every construction in this crate produces; `f64` coefficients are
//! available for quick experiments.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, so the representation
//! is canonical: zero coefficients are never stored and equal polynomials have
//! identical term maps.

mod exact;
mod json;
mod multi_index;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use exact::{dyadic_point, lcm_of_denominators};
pub use json::PolynomialJson;
pub use multi_index::MultiIndex;

use crate::error::PolyError;
use crate::scalar::Coefficient;

#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zeros(nvars), c)
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(
            i < nvars,
            "variable index {i} out of range for dimension {nvars}"
        );
        Self::monomial(MultiIndex::unit(nvars, i), C::one())
    }

    pub fn monomial(exponent: MultiIndex, c: C) -> Self {
        let nvars = exponent.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        Polynomial { nvars, terms }
    }

    /// Sums the given terms; repeated exponents accumulate.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// `xᵀx = Σ x_i²`.
    pub fn squared_norm(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = MultiIndex::zeros(nvars);
            e.set(i, 2);
            p.add_term(e, C::one());
        }
        p
    }

    fn add_term(&mut self, e: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(e, sum);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &MultiIndex) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&MultiIndex::zeros(self.nvars))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(MultiIndex::one_norm)
            .max()
            .unwrap_or(0)
    }

    /// Highest exponent of each variable.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.nvars];
        for e in self.terms.keys() {
            for (i, di) in d.iter_mut().enumerate() {
                *di = (*di).max(e.get(i));
            }
        }
        d
    }

    /// `max_i deg_{x_i}`.
    pub fn max_degree_per_var(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    fn check_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<(), PolyError> {
        if i >= self.nvars {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                dimension: self.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), a.clone() * c.clone()))
            .collect();
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂p/∂x_i`.
    pub fn diff(&self, i: usize) -> Result<Self, PolyError> {
        self.check_index(i)?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.get(i);
            if k == 0 {
                continue;
            }
            let mut e = e.clone();
            e.set(i, k - 1);
            terms.insert(e, c.clone() * C::from_count(u64::from(k)));
        }
        Ok(Polynomial {
            nvars: self.nvars,
            terms,
        })
    }

    /// `D^α p`.
    pub fn diff_multi(&self, alpha: &MultiIndex) -> Result<Self, PolyError> {
        if alpha.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: alpha.len(),
            });
        }
        let mut p = self.clone();
        for i in 0..self.nvars {
            for _ in 0..alpha.get(i) {
                p = p.diff(i)?;
            }
        }
        Ok(p)
    }

    /// `∫₀^{x_i} p(…, s, …) ds`: the antiderivative in `x_i` vanishing on `x_i = 0`.
    pub fn integrate_from_zero(&self, i: usize) -> Result<Self, PolyError> {
        self.check_index(i)?;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let k = e.get(i);
                let mut e = e.clone();
                e.set(i, k + 1);
                (e, c.clone() / C::from_count(u64::from(k) + 1))
            })
            .collect();
        Ok(Polynomial {
            nvars: self.nvars,
            terms,
        })
    }

    /// `p(…, x_{i-1}, 0, x_{i+1}, …)`.
    pub fn substitute_zero(&self, i: usize) -> Result<Self, PolyError> {
        self.check_index(i)?;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.get(i) == 0)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Ok(Polynomial {
            nvars: self.nvars,
            terms,
        })
    }

    /// Returns `q` with `q(x) = p(x / r)`.
    pub fn scale_domain(&self, r: &C) -> Result<Self, PolyError> {
        if r.is_zero() || r.to_f64_lossy() <= 0.0 {
            return Err(PolyError::NonPositiveScale);
        }
        let inv = C::one() / r.clone();
        let max_deg = self.total_degree() as usize;
        let mut powers = Vec::with_capacity(max_deg + 1);
        powers.push(C::one());
        for k in 1..=max_deg {
            powers.push(powers[k - 1].clone() * inv.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.clone() * powers[e.one_norm() as usize].clone()))
            .collect();
        Ok(Polynomial {
            nvars: self.nvars,
            terms,
        })
    }

    /// Evaluation in the coefficient field (exact for rationals).
    pub fn eval(&self, x: &[C]) -> Result<C, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        let degrees = self.degrees();
        let powers: Vec<Vec<C>> = x
            .iter()
            .zip(&degrees)
            .map(|(xi, &d)| {
                let mut pw = Vec::with_capacity(d as usize + 1);
                pw.push(C::one());
                for k in 1..=d as usize {
                    pw.push(pw[k - 1].clone() * xi.clone());
                }
                pw
            })
            .collect();
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.entries().iter().enumerate() {
                if k > 0 {
                    term = term * powers[i][k as usize].clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Plain double-precision term-sum evaluation.
    ///
    /// Fine for low degrees. High-degree Bernstein expansions have huge, cancelling
    /// monomial coefficients; use the exact evaluators for those.
    pub fn eval_f64(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.entries()
                    .iter()
                    .zip(x)
                    .fold(c.to_f64_lossy(), |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum())
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// `Σ gᵢ²`.
    pub fn sum_of_squares(nvars: usize, squares: &[Self]) -> Result<Self, PolyError> {
        let mut acc = Self::zero(nvars);
        for g in squares {
            acc = acc.checked_add(&g.checked_mul(g)?)?;
        }
        Ok(acc)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> $trait<&Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$checked(rhs).expect("polynomial dimension mismatch")
            }
        }

        impl<C: Coefficient> $trait for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), -c.clone()))
            .collect();
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }
}

impl<C: Coefficient> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, &p) in e.entries().iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, p)?,
                }
            }
        }
        Ok(())
    }
}
