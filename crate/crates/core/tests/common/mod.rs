#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use polycert::expr::Func;
use polycert::{ExactPolynomial, Expression, MultiIndex, Polynomial};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn random_rational(rng: &mut impl Rng) -> BigRational {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=8))
}

/// Up to `terms` random terms with every exponent at most `max_degree`.
pub fn random_polynomial(
    rng: &mut impl Rng,
    n: usize,
    max_degree: u32,
    terms: usize,
) -> ExactPolynomial {
    let terms = (0..terms).map(|_| {
        let e = (0..n).map(|_| rng.gen_range(0..=max_degree)).collect();
        (MultiIndex::new(e), random_rational(rng))
    });
    Polynomial::from_terms(n, terms).unwrap()
}

/// Random polynomial whose terms all have total degree at least 2.
pub fn random_vanishing(
    rng: &mut impl Rng,
    n: usize,
    max_degree: u32,
    terms: usize,
) -> ExactPolynomial {
    let p = random_polynomial(rng, n, max_degree, terms);
    let kept = p
        .terms()
        .filter(|(e, _)| e.one_norm() >= 2)
        .map(|(e, c)| (e.clone(), c.clone()));
    Polynomial::from_terms(n, kept.collect::<Vec<_>>()).unwrap()
}

/// Random polynomial without constant term, small coefficients.
fn random_argument(rng: &mut impl Rng, n: usize) -> Expression {
    let p = random_polynomial(rng, n, 2, 3);
    let kept: Vec<_> = p
        .terms()
        .filter(|(e, _)| !e.is_zero())
        .map(|(e, c)| (e.clone(), c / BigInt::from(4)))
        .collect();
    let p = if kept.is_empty() {
        Polynomial::var(n, 0)
    } else {
        Polynomial::from_terms(n, kept).unwrap()
    };
    Expression::from_polynomial(&p)
}

/// Random expression analytic on a neighbourhood of the closed unit box.
pub fn random_smooth(rng: &mut ChaCha8Rng, n: usize) -> Expression {
    let one = Expression::constant(n, q(1, 1));
    let piece = |rng: &mut ChaCha8Rng| {
        let a = random_argument(rng, n);
        match rng.gen_range(0..6) {
            0 => a.apply(Func::Exp),
            1 => a.apply(Func::Sin),
            2 => a.apply(Func::Cos),
            3 => (&one + &a.powi(2)).apply(Func::Ln),
            4 => (&one + &a.powi(2)).apply(Func::Sqrt),
            _ => &one / &(&one + &a.powi(2)),
        }
    };
    let first = piece(rng);
    let second = piece(rng);
    let weight = Expression::from_polynomial(&random_polynomial(rng, n, 1, 2));
    match rng.gen_range(0..3) {
        0 => &first + &second,
        1 => &first * &second,
        _ => &(&first * &weight) - &second,
    }
}

pub fn polynomial_strategy(
    n: usize,
    max_degree: u32,
    max_terms: usize,
) -> impl Strategy<Value = ExactPolynomial> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_degree, n),
            -20i64..=20,
            1i64..=12,
        ),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        Polynomial::from_terms(
            n,
            terms
                .into_iter()
                .map(|(e, a, b)| (MultiIndex::new(e), q(a, b))),
        )
        .unwrap()
    })
}

pub fn rational_strategy() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=16).prop_map(|(a, b)| q(a, b))
}
