//! The measure algebra: finitely supported measures on a hypergroup,
//! convolution, pairing against functions, and the Fourier–Laplace
//! transform onto the polynomial ring.
//!
//! The transform sends `μ ↦ μ̂ = Σ_x μ(x) Q_x`; it is linear, turns
//! convolution into polynomial multiplication, and is injective, so the
//! Fourier algebra of a hypergroup in `d` variables is the whole polynomial
//! ring in `d` variables. `inverse_fourier` is the degree-graded basis
//! conversion going the other way.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;

use crate::error::{Error, Result};
use crate::functions::HFunction;
use crate::hypergroup::{Element, Hypergroup};
use crate::polyring::MultiPoly;
use crate::scalar::Scalar;

/// A finitely supported measure `Σ_x μ(x) δ_x` with scalar weights.
/// No zero weight is ever stored.
#[derive(Clone)]
pub struct Measure {
    base: Arc<Hypergroup>,
    weights: BTreeMap<Element, Scalar>,
}

impl Measure {
    pub fn zero(base: Arc<Hypergroup>) -> Self {
        Measure {
            base,
            weights: BTreeMap::new(),
        }
    }

    /// The point mass `δ_x`.
    pub fn dirac(base: Arc<Hypergroup>, x: Element) -> Self {
        let mut m = Measure::zero(base);
        m.add_weight(x, Scalar::one());
        m
    }

    pub fn from_weights(
        base: Arc<Hypergroup>,
        weights: impl IntoIterator<Item = (Element, Scalar)>,
    ) -> Self {
        let mut m = Measure::zero(base);
        for (x, w) in weights {
            m.add_weight(x, w);
        }
        m
    }

    pub fn base(&self) -> &Arc<Hypergroup> {
        &self.base
    }

    pub fn weights(&self) -> impl Iterator<Item = (&Element, &Scalar)> {
        self.weights.iter()
    }

    pub fn weight(&self, x: &Element) -> Scalar {
        self.weights.get(x).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.weights.values().all(Scalar::is_exact)
    }

    /// Total mass `Σ_x μ(x)`.
    pub fn mass(&self) -> Scalar {
        self.weights
            .values()
            .fold(Scalar::zero(), |acc, w| &acc + w)
    }

    pub fn add_weight(&mut self, x: Element, w: Scalar) {
        assert_eq!(x.dim(), self.base.dim(), "element dimension mismatch");
        if w.is_zero() {
            return;
        }
        match self.weights.entry(x) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(w);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &w;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Measure {
        if c.is_zero() {
            return Measure::zero(self.base.clone());
        }
        Measure {
            base: self.base.clone(),
            weights: self
                .weights
                .iter()
                .map(|(x, w)| (x.clone(), w * c))
                .collect(),
        }
    }

    /// Convolution `μ * ν = Σ_{x,y} μ(x) ν(y) (δ_x * δ_y)`. Bilinear,
    /// commutative, associative; `δ_o` is the unit.
    pub fn convolve(&self, other: &Measure) -> Result<Measure> {
        assert_same_base(&self.base, &other.base);
        let mut out = Measure::zero(self.base.clone());
        for (x, wx) in &self.weights {
            for (y, wy) in &other.weights {
                let point = self.base.linearization(x, y)?;
                let w = wx * wy;
                for (t, c) in point.weights() {
                    out.add_weight(t.clone(), &w * c);
                }
            }
        }
        Ok(out)
    }

    /// The involution `μ̌`. The hypergroups here carry the identity
    /// involution, so this is the identity map; it exists to keep the
    /// measure-algebra interface complete.
    pub fn involution(&self) -> Measure {
        self.clone()
    }

    /// Fourier–Laplace transform `μ̂ = Σ_x μ(x) Q_x`, exact only.
    pub fn fourier(&self) -> Result<MultiPoly> {
        if !self.is_exact() {
            return Err(Error::NotExact);
        }
        let mut acc = MultiPoly::zero(self.base.dim());
        for (x, w) in &self.weights {
            acc = &acc + &self.base.basis_poly(x)?.scale(w);
        }
        Ok(acc)
    }

    /// `∫ f dμ = Σ_x μ(x) f(x)`.
    pub fn pair(&self, f: &HFunction) -> Result<Scalar> {
        assert_same_base(&self.base, f.base());
        let mut acc = Scalar::zero();
        for (x, w) in &self.weights {
            acc = &acc + &(w * &f.evaluate(x)?);
        }
        Ok(acc)
    }
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        base_eq(&self.base, &other.base) && self.weights == other.weights
    }
}

impl core::fmt::Debug for Measure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (x, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({w})δ_{x}")?;
        }
        Ok(())
    }
}

impl core::ops::Add<&Measure> for &Measure {
    type Output = Measure;
    fn add(self, rhs: &Measure) -> Measure {
        assert_same_base(&self.base, &rhs.base);
        let mut out = self.clone();
        for (x, w) in &rhs.weights {
            out.add_weight(x.clone(), w.clone());
        }
        out
    }
}

impl core::ops::Sub<&Measure> for &Measure {
    type Output = Measure;
    fn sub(self, rhs: &Measure) -> Measure {
        assert_same_base(&self.base, &rhs.base);
        let mut out = self.clone();
        for (x, w) in &rhs.weights {
            out.add_weight(x.clone(), -w);
        }
        out
    }
}

impl core::ops::Neg for &Measure {
    type Output = Measure;
    fn neg(self) -> Measure {
        self.scale(&-Scalar::one())
    }
}

pub(crate) fn base_eq(a: &Arc<Hypergroup>, b: &Arc<Hypergroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn assert_same_base(a: &Arc<Hypergroup>, b: &Arc<Hypergroup>) {
    assert!(base_eq(a, b), "values live on different hypergroups");
}

/// The unique measure with `fourier(μ) = p`; exists for every exact
/// polynomial because the basis polynomials span, and is unique because the
/// transform is injective.
pub fn inverse_fourier(p: &MultiPoly, base: &Arc<Hypergroup>) -> Result<Measure> {
    base.expand_in_basis(p)
}

/// The measure `δ_y − m(y) δ_o` realizing the modified difference: pairing
/// `f` against `δ_x * (δ_y − m(y)δ_o)` gives `f(x*y) − m(y)f(x)`.
pub fn mod_diff_measure(m: &HFunction, y: &Element) -> Result<Measure> {
    let Some(lambda) = m.exponential_point() else {
        return Err(Error::NotExponential);
    };
    let base = m.base().clone();
    let my = base.basis_deriv_eval(y, &MultiIndex::zero(base.dim()), lambda)?;
    let mut out = Measure::dirac(base.clone(), y.clone());
    out.add_weight(base.identity(), -my);
    Ok(out)
}

use crate::multiindex::MultiIndex;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergroup::Hypergroup;

    fn el(entries: &[u32]) -> Element {
        Element::new(entries.to_vec())
    }

    fn q(p: i64, den: i64) -> Scalar {
        Scalar::from_ratio(p, den)
    }

    #[test]
    fn dirac_convolution_on_chebyshev() {
        // δ_1 * δ_1 = ½δ_0 + ½δ_2 from xT_1 = ½(T_0 + T_2)
        let hg = Hypergroup::chebyshev(1);
        let d1 = Measure::dirac(hg.clone(), el(&[1]));
        let conv = d1.convolve(&d1).unwrap();
        let expected =
            Measure::from_weights(hg.clone(), [(el(&[0]), q(1, 2)), (el(&[2]), q(1, 2))]);
        assert_eq!(conv, expected);
    }

    #[test]
    fn identity_element_is_unit() {
        let hg = Hypergroup::chebyshev(2);
        let mu = Measure::from_weights(
            hg.clone(),
            [(el(&[3, 1]), q(2, 3)), (el(&[0, 2]), q(-1, 5))],
        );
        let unit = Measure::dirac(hg.clone(), hg.identity());
        assert_eq!(unit.convolve(&mu).unwrap(), mu);
    }

    #[test]
    fn cross_dirac_in_two_dims() {
        // δ_(1,0) * δ_(0,1) = δ_(1,1): all four closed-form terms coincide
        let hg = Hypergroup::chebyshev(2);
        let a = Measure::dirac(hg.clone(), el(&[1, 0]));
        let b = Measure::dirac(hg.clone(), el(&[0, 1]));
        assert_eq!(
            a.convolve(&b).unwrap(),
            Measure::dirac(hg.clone(), el(&[1, 1]))
        );
    }

    #[test]
    fn fourier_of_dirac_is_basis_poly() {
        let hg = Hypergroup::chebyshev(1);
        let d = Measure::dirac(hg.clone(), el(&[2]));
        assert_eq!(d.fourier().unwrap(), hg.basis_poly(&el(&[2])).unwrap());
    }

    #[test]
    fn fourier_of_half_half_is_x_squared() {
        // ½T_0 + ½T_2 = x²
        let hg = Hypergroup::chebyshev(1);
        let mu = Measure::from_weights(hg.clone(), [(el(&[0]), q(1, 2)), (el(&[2]), q(1, 2))]);
        let p = mu.fourier().unwrap();
        let x = MultiPoly::var(1, 0);
        assert_eq!(p, &x * &x);
    }

    #[test]
    fn inverse_fourier_round_trip() {
        let hg = Hypergroup::chebyshev(2);
        let mu = Measure::from_weights(
            hg.clone(),
            [
                (el(&[0, 0]), q(7, 2)),
                (el(&[2, 1]), q(-1, 3)),
                (el(&[4, 4]), q(5, 11)),
            ],
        );
        let back = inverse_fourier(&mu.fourier().unwrap(), &hg).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn fourier_rejects_float_weights() {
        let hg = Hypergroup::chebyshev(1);
        let mu = Measure::from_weights(hg.clone(), [(el(&[1]), Scalar::from_f64(0.5))]);
        assert_eq!(mu.fourier().unwrap_err(), Error::NotExact);
    }

    #[test]
    fn mass_of_convolution_of_probabilities_is_one() {
        let hg = Hypergroup::chebyshev(1);
        let a = Measure::from_weights(hg.clone(), [(el(&[3]), q(1, 4)), (el(&[5]), q(3, 4))]);
        let b = Measure::dirac(hg.clone(), el(&[7]));
        assert!(a.convolve(&b).unwrap().mass().is_one());
    }
}
