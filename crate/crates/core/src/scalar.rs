//! Scalar coefficients: exact Gaussian rationals with a float fallback.
//!
//! The exact variant is a pair of arbitrary-precision rationals (real and
//! imaginary part); it is the default everywhere and every structural
//! identity in this crate holds with zero tolerance on it. The float variant
//! (complex `f64`) exists only so that functions can be evaluated at
//! non-rational points; comparisons against floats take an explicit
//! tolerance. Mixing the two promotes to float.

use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;
pub type ComplexRational = Complex<Rational>;
pub type Complex64 = Complex<f64>;

/// Default relative tolerance for float-mode comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(ComplexRational),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ComplexRational::new(Rational::zero(), Rational::zero()))
    }

    pub fn one() -> Self {
        Scalar::Exact(ComplexRational::new(Rational::one(), Rational::zero()))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from_integer(n.into()))
    }

    /// Exact rational `p/q`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::from_rational(Rational::new(p.into(), q.into()))
    }

    pub fn from_rational(re: Rational) -> Self {
        Scalar::Exact(ComplexRational::new(re, Rational::zero()))
    }

    pub fn from_parts(re: Rational, im: Rational) -> Self {
        Scalar::Exact(ComplexRational::new(re, im))
    }

    pub fn from_f64(re: f64) -> Self {
        Scalar::Float(Complex64::new(re, 0.0))
    }

    pub fn from_f64_parts(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_zero() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_one() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&ComplexRational> {
        match self {
            Scalar::Exact(z) => Some(z),
            Scalar::Float(_) => None,
        }
    }

    /// The real rational value, if this is an exact real scalar.
    pub fn as_real_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => Some(&z.re),
            _ => None,
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => Complex64::new(
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Float(z) => *z,
        }
    }

    /// Sup-norm `max(|re|, |im|)` as f64; used for float-mode residuals.
    pub fn sup_norm(&self) -> f64 {
        let z = self.to_complex64();
        fabs(z.re).max(fabs(z.im))
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(ComplexRational::new(z.re.clone(), -z.im.clone())),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact scalars compare exactly; as soon as a float is involved the
    /// difference is measured in the sup-norm against `tol` relative to
    /// `max(1, |a|, |b|)`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let scale = self.sup_norm().max(other.sup_norm()).max(1.0);
                (self - other).sup_norm() <= tol * scale
            }
        }
    }

    /// Deterministic total order used only for canonical term ordering;
    /// exact scalars sort before floats, floats by `total_cmp`.
    pub fn canonical_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im)),
            (Scalar::Exact(_), Scalar::Float(_)) => Ordering::Less,
            (Scalar::Float(_), Scalar::Exact(_)) => Ordering::Greater,
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
            }
        }
    }
}

// f64::abs lives in std; keep the core build self-contained.
fn fabs(x: f64) -> f64 {
    if x.is_sign_negative() {
        -x
    } else {
        x
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl core::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    (a, b) => Scalar::Float(a.to_complex64().$method(b.to_complex64())),
                }
            }
        }
        impl core::ops::$trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl core::ops::$trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl core::ops::$trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl core::ops::Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!rhs.is_zero(), "division by zero scalar");
                Scalar::Exact(a / b)
            }
            (a, b) => Scalar::Float(a.to_complex64() / b.to_complex64()),
        }
    }
}

impl core::ops::Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        (&self) / (&rhs)
    }
}

impl core::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(-z.clone()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl core::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => {
                if z.im.is_zero() {
                    write!(f, "{}", z.re)
                } else if z.re.is_zero() {
                    write!(f, "{}i", z.im)
                } else if z.im.is_negative() {
                    write!(f, "{}{}i", z.re, z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.im < 0.0 {
                    write!(f, "{}{}i", z.re, z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}
