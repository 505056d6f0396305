//! The zero-slice and integral operators `g_{i,0}`, `g_{i,1}`, their compositions
//! `G_α`, and the assembly map `K({f_α}) = Σ_α G_α f_α` over binary `α`.

use rayon::prelude::*;

use crate::error::{Error, PolyError, Result};
use crate::field::Differentiable;
use crate::polynomial::{MultiIndex, Polynomial};
use crate::ExactPolynomial;

/// A `2ⁿ`-tuple indexed by binary multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTuple<T> {
    n: usize,
    // Indexed by `MultiIndex::mask`.
    entries: Vec<T>,
}

fn require_binary(alpha: &MultiIndex, n: usize) -> Result<usize> {
    if alpha.len() != n {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: alpha.len(),
        }
        .into());
    }
    alpha
        .mask()
        .ok_or_else(|| Error::InvalidArgument(format!("multi-index {alpha} is not binary")))
}

impl<T> DerivativeTuple<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        let entries = (0..1usize << n)
            .map(|m| f(&MultiIndex::from_mask(n, m)))
            .collect();
        DerivativeTuple { n, entries }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(&MultiIndex) -> Result<T>) -> Result<Self> {
        let entries = (0..1usize << n)
            .map(|m| f(&MultiIndex::from_mask(n, m)))
            .collect::<Result<_>>()?;
        Ok(DerivativeTuple { n, entries })
    }

    /// Builds a tuple from `(α, value)` pairs; every binary `α` must appear exactly once.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (MultiIndex, T)>) -> Result<Self> {
        let mut slots: Vec<Option<T>> = (0..1usize << n).map(|_| None).collect();
        for (alpha, value) in pairs {
            let m = require_binary(&alpha, n)?;
            if slots[m].replace(value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate entry for {alpha}"
                )));
            }
        }
        let entries = slots
            .into_iter()
            .enumerate()
            .map(|(m, v)| {
                v.ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "missing entry for {}",
                        MultiIndex::from_mask(n, m)
                    ))
                })
            })
            .collect::<Result<_>>()?;
        Ok(DerivativeTuple { n, entries })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&T> {
        require_binary(alpha, self.n).ok().map(|m| &self.entries[m])
    }

    /// Entries in graded-lex order of their index.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &T)> {
        MultiIndex::binary(self.n).into_iter().map(move |a| {
            let m = a.mask().expect("binary");
            (a, &self.entries[m])
        })
    }

    pub fn map<U>(&self, mut f: impl FnMut(&MultiIndex, &T) -> U) -> DerivativeTuple<U> {
        DerivativeTuple::from_fn(self.n, |a| f(a, &self.entries[a.mask().expect("binary")]))
    }
}

impl<T: Differentiable> DerivativeTuple<T> {
    /// All mixed partials `D^α v`, `α ∈ Zⁿ`.
    pub fn of(v: &T) -> Result<Self> {
        derivative_tuple_of(v)
    }
}

/// All `2ⁿ` mixed first partials of `v`, computed exactly.
pub fn derivative_tuple_of<T: Differentiable>(v: &T) -> Result<DerivativeTuple<T>> {
    DerivativeTuple::try_from_fn(v.dimension(), |alpha| v.partial(alpha))
}

/// `g_{i,0} h = h|_{x_i = 0}`, `g_{i,1} h = ∫₀^{x_i} h ds`. `i` is 0-based.
pub fn apply_g(h: &ExactPolynomial, i: usize, j: u8) -> Result<ExactPolynomial> {
    Ok(match j {
        0 => h.substitute_zero(i)?,
        1 => h.integrate_from_zero(i)?,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "g_(i,j) needs j in {{0,1}}, got {j}"
            )))
        }
    })
}

/// `G_α h = g_{1,α_1} ∘ … ∘ g_{n,α_n} h`, applied from coordinate `n` down to 1.
pub fn apply_g_multi(h: &ExactPolynomial, alpha: &MultiIndex) -> Result<ExactPolynomial> {
    require_binary(alpha, h.dimension())?;
    (0..h.dimension())
        .rev()
        .try_fold(h.clone(), |acc, i| apply_g(&acc, i, alpha.get(i) as u8))
}

/// `K({f_α}) = Σ_α G_α f_α`, summed in graded-lex order of `α`.
pub fn apply_k(tuple: &DerivativeTuple<ExactPolynomial>) -> Result<ExactPolynomial> {
    let n = tuple.dimension();
    if let Some((alpha, _)) = tuple.iter().find(|(_, p)| p.dimension() != n) {
        return Err(Error::InvalidArgument(format!(
            "entry {alpha} has the wrong dimension"
        )));
    }
    let pieces: Vec<(MultiIndex, &ExactPolynomial)> = tuple.iter().collect();
    let images = pieces
        .par_iter()
        .map(|(alpha, p)| apply_g_multi(p, alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(images
        .into_iter()
        .fold(Polynomial::zero(n), |acc, p| acc + p))
}

/// `D^β (G_α h)` without forming `G_α h`: zero when some `α_i < β_i`, otherwise
/// `G_α` with the factors at `β_i = 1` removed.
pub fn deriv_of_g(
    h: &ExactPolynomial,
    alpha: &MultiIndex,
    beta: &MultiIndex,
) -> Result<ExactPolynomial> {
    let n = h.dimension();
    require_binary(alpha, n)?;
    require_binary(beta, n)?;
    if (0..n).any(|i| alpha.get(i) < beta.get(i)) {
        return Ok(Polynomial::zero(n));
    }
    (0..n)
        .rev()
        .filter(|&i| beta.get(i) == 0)
        .try_fold(h.clone(), |acc, i| apply_g(&acc, i, alpha.get(i) as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expression;

    fn poly(text: &str, n: usize) -> ExactPolynomial {
        Expression::parse(text, n).unwrap().to_polynomial().unwrap()
    }

    fn idx(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn g_operators() {
        assert_eq!(apply_g(&poly("1", 2), 0, 1).unwrap(), poly("x1", 2));
        assert_eq!(apply_g(&poly("x1", 2), 0, 0).unwrap(), poly("0", 2));
        assert_eq!(apply_g(&poly("x2", 2), 0, 0).unwrap(), poly("x2", 2));
        assert!(apply_g(&poly("x2", 2), 0, 2).is_err());
        assert!(apply_g(&poly("x2", 2), 2, 0).is_err());
    }

    #[test]
    fn composite_g() {
        assert_eq!(
            apply_g_multi(&poly("1", 2), &idx(&[1, 1])).unwrap(),
            poly("x1*x2", 2)
        );
        assert_eq!(
            apply_g_multi(&poly("x1^2", 2), &idx(&[0, 0])).unwrap(),
            poly("0", 2)
        );
        assert_eq!(
            apply_g_multi(&poly("7/2", 2), &idx(&[0, 0])).unwrap(),
            poly("7/2", 2)
        );
        assert_eq!(
            apply_g_multi(&poly("2*x1", 2), &idx(&[1, 1])).unwrap(),
            poly("x1^2*x2", 2)
        );
        assert!(apply_g_multi(&poly("1", 2), &idx(&[2, 0])).is_err());
    }

    #[test]
    fn k_examples() {
        let single = DerivativeTuple::from_fn(2, |a| {
            if a == &idx(&[1, 1]) {
                poly("1", 2)
            } else {
                poly("0", 2)
            }
        });
        assert_eq!(apply_k(&single).unwrap(), poly("x1*x2", 2));
        let zero = DerivativeTuple::from_fn(2, |_| poly("0", 2));
        assert_eq!(apply_k(&zero).unwrap(), poly("0", 2));
        let tuple = DerivativeTuple::from_pairs(
            2,
            vec![
                (idx(&[1, 1]), poly("2*x1", 2)),
                (idx(&[1, 0]), poly("2*x1*x2", 2)),
                (idx(&[0, 1]), poly("x1^2", 2)),
                (idx(&[0, 0]), poly("x1^2*x2 + 3", 2)),
            ],
        )
        .unwrap();
        assert_eq!(apply_k(&tuple).unwrap(), poly("x1^2*x2 + 3", 2));
    }

    #[test]
    fn tuples_of_polynomials_and_expressions() {
        let t = derivative_tuple_of(&poly("x1*x2", 2)).unwrap();
        assert_eq!(t.get(&idx(&[1, 1])), Some(&poly("1", 2)));
        assert_eq!(t.get(&idx(&[1, 0])), Some(&poly("x2", 2)));
        assert_eq!(t.get(&idx(&[0, 1])), Some(&poly("x1", 2)));
        assert_eq!(t.get(&idx(&[0, 0])), Some(&poly("x1*x2", 2)));
        let c = derivative_tuple_of(&poly("5", 3)).unwrap();
        assert_eq!(c.iter().filter(|(_, p)| !p.is_zero()).count(), 1);
        let e = Expression::parse("exp(x1)*sin(x2)", 2).unwrap();
        let te = derivative_tuple_of(&e).unwrap();
        let expect = Expression::parse("exp(x1)*cos(x2)", 2).unwrap();
        for x in [[0.3, -0.2], [-0.9, 0.7]] {
            assert_eq!(
                te.get(&idx(&[1, 1])).unwrap().eval(&x).unwrap(),
                expect.eval(&x).unwrap()
            );
        }
        let order: Vec<MultiIndex> = te.iter().map(|(a, _)| a).collect();
        assert_eq!(
            order,
            vec![idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1]), idx(&[1, 1])]
        );
    }

    #[test]
    fn derivatives_of_composites() {
        let h = poly("3*x1^2 - x2 + 1/2", 2);
        assert_eq!(
            deriv_of_g(&h, &idx(&[0, 1]), &idx(&[1, 0])).unwrap(),
            poly("0", 2)
        );
        assert_eq!(deriv_of_g(&h, &idx(&[1, 1]), &idx(&[1, 1])).unwrap(), h);
        assert_eq!(
            deriv_of_g(&poly("1", 2), &idx(&[1, 1]), &idx(&[1, 0])).unwrap(),
            poly("x2", 2)
        );
        for a in MultiIndex::binary(2) {
            for b in MultiIndex::binary(2) {
                let direct = apply_g_multi(&h, &a).unwrap().diff_multi(&b).unwrap();
                assert_eq!(
                    deriv_of_g(&h, &a, &b).unwrap(),
                    direct,
                    "alpha {a} beta {b}"
                );
            }
        }
    }

    #[test]
    fn from_pairs_validates() {
        assert!(DerivativeTuple::from_pairs(1, vec![(idx(&[0]), 1)]).is_err());
        assert!(DerivativeTuple::from_pairs(1, vec![(idx(&[0]), 1), (idx(&[0]), 2)]).is_err());
        assert!(DerivativeTuple::from_pairs(1, vec![(idx(&[0]), 1), (idx(&[2]), 2)]).is_err());
    }
}
