use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent or derivative-order vector `α ∈ ℕⁿ`.
///
/// Ordered graded-lexicographically: lower total degree first, then larger
/// leading exponents first, so in two variables `1 < x1 < x2 < x1² < x1x2 < x2²`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit vector `e_i` (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    /// Binary index whose entry `i` is bit `i` of `mask`.
    pub fn from_mask(n: usize, mask: usize) -> Self {
        MultiIndex((0..n).map(|i| ((mask >> i) & 1) as u32).collect())
    }

    /// All `2ⁿ` binary indices of `Zⁿ`, graded-lex ordered.
    pub fn binary(n: usize) -> Vec<MultiIndex> {
        let mut all: Vec<_> = (0..1usize << n)
            .map(|m| MultiIndex::from_mask(n, m))
            .collect();
        all.sort();
        all
    }

    /// Every index with total degree at most `degree`, graded-lex ordered.
    pub fn up_to_degree(n: usize, degree: u32) -> Vec<MultiIndex> {
        fn fill(prefix: &mut Vec<u32>, n: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
            if prefix.len() == n {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for e in 0..=remaining {
                prefix.push(e);
                fill(prefix, n, remaining - e, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        fill(&mut Vec::with_capacity(n), n, degree, &mut out);
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: u32) {
        self.0[i] = value;
    }

    /// Membership in `Zⁿ`.
    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    /// Bitmask of a binary index; `None` if some entry exceeds 1.
    pub fn mask(&self) -> Option<usize> {
        if !self.is_binary() {
            return None;
        }
        Some(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &e)| (e as usize) << i)
                .sum(),
        )
    }

    /// `‖α‖₁ = Σ αᵢ`.
    pub fn one_norm(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `‖α‖∞ = max αᵢ`.
    pub fn inf_norm(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `α! = Π αᵢ!`
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>())
            .product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.one_norm()
            .cmp(&other.one_norm())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}
