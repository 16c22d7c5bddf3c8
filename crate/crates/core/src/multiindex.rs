//! Multi-indices: tuples in `ℕ^d` with the componentwise partial order and
//! the graded-lexicographic total order.
//!
//! The same type indexes monomials and derivative orders, and doubles as the
//! element type of a hypergroup on `ℕ^d`.

use core::cmp::Ordering;
use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The standard unit index `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim, "unit index {i} out of range for dimension {dim}");
        let mut entries = vec![0; dim];
        entries[i] = 1;
        MultiIndex(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|α| = Σ α_i`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise partial order `β ≤ α`.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other ≤ self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.leq(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `binomial(α, β) = Π_i binomial(α_i, β_i)`; zero unless `β ≤ α`.
    pub fn binomial(&self, beta: &MultiIndex) -> BigInt {
        assert_eq!(self.dim(), beta.dim(), "multi-index dimension mismatch");
        if !beta.leq(self) {
            return BigInt::ZERO;
        }
        let mut acc = BigInt::one();
        for (&a, &b) in self.0.iter().zip(&beta.0) {
            acc *= num_integer::binomial(BigInt::from(a), BigInt::from(b));
        }
        acc
    }

    /// All `β ≤ α` in graded-lexicographic order.
    pub fn downset(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(0)];
        for &cap in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (cap as usize + 1));
            for prefix in &out {
                for e in 0..=cap {
                    let mut entries = prefix.0.clone();
                    entries.push(e);
                    next.push(MultiIndex(entries));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Split into consecutive blocks of the given lengths (for product
    /// hypergroups, one block per factor).
    pub fn split(&self, lens: &[usize]) -> Vec<MultiIndex> {
        assert_eq!(lens.iter().sum::<usize>(), self.dim());
        let mut parts = Vec::with_capacity(lens.len());
        let mut start = 0;
        for &len in lens {
            parts.push(MultiIndex(self.0[start..start + len].to_vec()));
            start += len;
        }
        parts
    }

    pub fn concat(parts: &[MultiIndex]) -> MultiIndex {
        let mut entries = Vec::new();
        for p in parts {
            entries.extend_from_slice(&p.0);
        }
        MultiIndex(entries)
    }
}

impl core::ops::Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

/// Graded-lexicographic: lower total degree first, ties broken
/// lexicographically. This is the canonical term order of the crate.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
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

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(entries: &[u32]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    #[test]
    fn graded_lex_order() {
        let mut v = vec![
            mi(&[0, 2]),
            mi(&[1, 0]),
            mi(&[0, 1]),
            mi(&[2, 0]),
            mi(&[1, 1]),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                mi(&[0, 1]),
                mi(&[1, 0]),
                mi(&[0, 2]),
                mi(&[1, 1]),
                mi(&[2, 0])
            ]
        );
    }

    #[test]
    fn binomial_is_product_of_componentwise_binomials() {
        let alpha = mi(&[3, 2]);
        let beta = mi(&[1, 1]);
        assert_eq!(alpha.binomial(&beta), BigInt::from(6)); // C(3,1)*C(2,1)
        assert_eq!(alpha.binomial(&mi(&[4, 0])), BigInt::ZERO);
    }

    #[test]
    fn downset_size_and_order() {
        let d = mi(&[2, 1]).downset();
        assert_eq!(d.len(), 6);
        assert_eq!(d[0], mi(&[0, 0]));
        assert_eq!(*d.last().unwrap(), mi(&[2, 1]));
        assert!(d.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn split_concat_roundtrip() {
        let x = mi(&[1, 2, 3]);
        let parts = x.split(&[1, 2]);
        assert_eq!(parts[0], mi(&[1]));
        assert_eq!(parts[1], mi(&[2, 3]));
        assert_eq!(MultiIndex::concat(&parts), x);
    }
}
