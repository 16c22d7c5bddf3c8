//! Sparse multivariate polynomials over [`Scalar`] coefficients.
//!
//! Terms are stored in a `BTreeMap` keyed by multi-index in graded-lex
//! order, so iteration (and therefore every report built from it) is
//! deterministic. No zero coefficient is ever stored.

use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use alloc::collections::BTreeMap;

use crate::multiindex::MultiIndex;
use crate::scalar::{Complex64, Scalar};

#[derive(Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        MultiPoly::constant(dim, Scalar::one())
    }

    /// The variable `z_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut p = MultiPoly::zero(dim);
        p.add_term(MultiIndex::unit(dim, i), Scalar::one());
        p
    }

    pub fn monomial(dim: usize, alpha: MultiIndex, c: Scalar) -> Self {
        assert_eq!(alpha.dim(), dim, "monomial index dimension mismatch");
        let mut p = MultiPoly::zero(dim);
        p.add_term(alpha, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Scalar {
        self.terms.get(alpha).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Max total degree over the stored terms; `None` for the zero
    /// polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::total).max()
    }

    /// The graded-lex-largest term.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Adds `c` to the coefficient at `alpha`, dropping the entry if the sum
    /// vanishes.
    pub fn add_term(&mut self, alpha: MultiIndex, c: Scalar) {
        assert_eq!(alpha.dim(), self.dim, "term index dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.dim);
        }
        let mut out = MultiPoly::zero(self.dim);
        for (alpha, v) in &self.terms {
            out.add_term(alpha.clone(), v * c);
        }
        out
    }

    /// Exact mixed partial derivative `∂^α p`.
    pub fn derive(&self, alpha: &MultiIndex) -> MultiPoly {
        assert_eq!(alpha.dim(), self.dim, "derivative order dimension mismatch");
        let mut out = MultiPoly::zero(self.dim);
        for (beta, c) in &self.terms {
            let Some(gamma) = beta.checked_sub(alpha) else {
                continue;
            };
            // falling factorial Π_i β_i (β_i-1) ⋯ (β_i-α_i+1)
            let mut factor = Scalar::one();
            for i in 0..self.dim {
                for step in 0..alpha[i] {
                    factor = &factor * &Scalar::from_int((beta[i] - step) as i64);
                }
            }
            out.add_term(gamma, c * &factor);
        }
        out
    }

    /// Evaluation at a point. Exact throughout when the polynomial and the
    /// point are exact; otherwise everything promotes to floats and the
    /// terms are accumulated Horner-style.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.dim, "evaluation point dimension mismatch");
        if self.is_exact() && point.iter().all(Scalar::is_exact) {
            self.eval_powers(point)
        } else {
            let z: Vec<Complex64> = point.iter().map(Scalar::to_complex64).collect();
            Scalar::Float(self.eval_horner_f64(&z))
        }
    }

    fn eval_powers(&self, point: &[Scalar]) -> Scalar {
        // power tables per coordinate, up to the max exponent that occurs
        let mut max_exp = vec![0u32; self.dim];
        for alpha in self.terms.keys() {
            for i in 0..self.dim {
                max_exp[i] = max_exp[i].max(alpha[i]);
            }
        }
        let powers: Vec<Vec<Scalar>> = point
            .iter()
            .zip(&max_exp)
            .map(|(z, &m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                row.push(Scalar::one());
                for _ in 0..m {
                    row.push(row.last().unwrap() * z);
                }
                row
            })
            .collect();
        let mut acc = Scalar::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for i in 0..self.dim {
                if alpha[i] > 0 {
                    term = &term * &powers[i][alpha[i] as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Recursive multivariate Horner scheme on f64 coefficients.
    fn eval_horner_f64(&self, point: &[Complex64]) -> Complex64 {
        let terms: Vec<(Vec<u32>, Complex64)> = self
            .terms
            .iter()
            .map(|(alpha, c)| (alpha.entries().to_vec(), c.to_complex64()))
            .collect();
        horner_rec(&terms, 0, point)
    }

    /// Lift into a larger ambient dimension, placing the variables at
    /// `offset..offset+dim`. Used to build tensor products.
    pub fn embed(&self, ambient: usize, offset: usize) -> MultiPoly {
        assert!(offset + self.dim <= ambient, "embedding out of range");
        let mut out = MultiPoly::zero(ambient);
        for (alpha, c) in &self.terms {
            let mut entries = vec![0u32; ambient];
            entries[offset..offset + self.dim].copy_from_slice(alpha.entries());
            out.add_term(MultiIndex::new(entries), c.clone());
        }
        out
    }
}

/// Horner over the variable at `var`, recursing over the remaining ones.
fn horner_rec(terms: &[(Vec<u32>, Complex64)], var: usize, point: &[Complex64]) -> Complex64 {
    if terms.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    if var == point.len() {
        return terms.iter().map(|(_, c)| c).sum();
    }
    let max_e = terms.iter().map(|(a, _)| a[var]).max().unwrap();
    // bucket by exponent of this variable, then fold from the top power down
    let mut buckets: Vec<Vec<(Vec<u32>, Complex64)>> = vec![Vec::new(); max_e as usize + 1];
    for (a, c) in terms {
        buckets[a[var] as usize].push((a.clone(), *c));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for bucket in buckets.iter().rev() {
        acc = acc * point[var] + horner_rec(bucket, var + 1, point);
    }
    acc
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl core::ops::$trait<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$impl_fn(rhs)
            }
        }
        impl core::ops::$trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$impl_fn(&rhs)
            }
        }
    };
}

impl MultiPoly {
    fn add_impl(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (alpha, c) in &rhs.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        out
    }

    fn sub_impl(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (alpha, c) in &rhs.terms {
            out.add_term(alpha.clone(), -c);
        }
        out
    }

    fn mul_impl(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = MultiPoly::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }
}

poly_binop!(Add, add, add_impl);
poly_binop!(Sub, sub, sub_impl);
poly_binop!(Mul, mul, mul_impl);

impl core::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Scalar::one())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (alpha, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for j in 0..self.dim {
                match alpha[j] {
                    0 => {}
                    1 => write!(f, "*z{j}")?,
                    e => write!(f, "*z{j}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, q: i64) -> Scalar {
        Scalar::from_ratio(p, q)
    }

    #[test]
    fn monomial_product() {
        let x = MultiPoly::var(1, 0);
        let x2 = &x * &x;
        assert_eq!(x2.coeff(&MultiIndex::new(vec![2])), Scalar::one());
        assert_eq!(x2.num_terms(), 1);
    }

    #[test]
    fn one_is_multiplicative_identity() {
        let mut p = MultiPoly::var(2, 0);
        p.add_term(MultiIndex::new(vec![1, 2]), q(-7, 3));
        assert_eq!(&p * &MultiPoly::one(2), p);
    }

    #[test]
    fn degree_adds_under_product() {
        let mut p = MultiPoly::var(2, 0);
        p.add_term(MultiIndex::zero(2), q(1, 1));
        let mut r = MultiPoly::var(2, 1);
        r.add_term(MultiIndex::new(vec![2, 1]), q(5, 2));
        let prod = &p * &r;
        assert_eq!(
            prod.total_degree().unwrap(),
            p.total_degree().unwrap() + r.total_degree().unwrap()
        );
    }

    #[test]
    fn derivative_of_chebyshev_t2() {
        // T_2 = 2x^2 - 1, so T_2' = 4x
        let mut t2 = MultiPoly::zero(1);
        t2.add_term(MultiIndex::new(vec![2]), q(2, 1));
        t2.add_term(MultiIndex::zero(1), q(-1, 1));
        let d = t2.derive(&MultiIndex::new(vec![1]));
        let mut expected = MultiPoly::zero(1);
        expected.add_term(MultiIndex::new(vec![1]), q(4, 1));
        assert_eq!(d, expected);
    }

    #[test]
    fn zero_order_derivative_is_identity() {
        let mut p = MultiPoly::var(2, 1);
        p.add_term(MultiIndex::new(vec![3, 1]), q(2, 7));
        assert_eq!(p.derive(&MultiIndex::zero(2)), p);
    }

    #[test]
    fn derivative_past_degree_vanishes() {
        let x = MultiPoly::var(1, 0);
        assert!(x.derive(&MultiIndex::new(vec![2])).is_zero());
    }

    #[test]
    fn eval_t2_at_half() {
        // T_2 = 2x^2 - 1 evaluated at 1/2 gives -1/2
        let mut t2 = MultiPoly::zero(1);
        t2.add_term(MultiIndex::new(vec![2]), q(2, 1));
        t2.add_term(MultiIndex::zero(1), q(-1, 1));
        assert_eq!(t2.eval(&[q(1, 2)]), q(-1, 2));
    }

    #[test]
    fn eval_constant() {
        let p = MultiPoly::one(3);
        assert_eq!(p.eval(&[q(9, 7), q(-1, 3), q(0, 1)]), Scalar::one());
    }

    #[test]
    fn float_eval_matches_exact() {
        let mut p = MultiPoly::zero(2);
        p.add_term(MultiIndex::new(vec![2, 1]), q(3, 4));
        p.add_term(MultiIndex::new(vec![0, 2]), q(-1, 8));
        p.add_term(MultiIndex::zero(2), q(5, 1));
        let exact = p.eval(&[q(1, 3), q(-2, 5)]);
        let float = p.eval(&[Scalar::from_f64(1.0 / 3.0), Scalar::from_f64(-0.4)]);
        assert!(float.approx_eq(&exact, 1e-12));
    }

    #[test]
    fn embed_shifts_variables() {
        let x = MultiPoly::var(1, 0);
        let lifted = x.embed(3, 1);
        assert_eq!(lifted.coeff(&MultiIndex::new(vec![0, 1, 0])), Scalar::one());
    }
}
