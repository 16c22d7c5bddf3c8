//! Exact computer algebra for discrete polynomial hypergroups.
//!
//! A polynomial hypergroup lives on the basic set `ℕ^d`: a family of
//! polynomials `Q_x` (one per point `x`), graded by degree and normalized by
//! `Q_x(1,…,1) = 1`, whose products expand back into the family with
//! nonnegative coefficients,
//!
//! ```text
//! Q_x · Q_y = Σ_w c(x,y,w) Q_w,        c(x,y,w) ≥ 0,  Σ_w c(x,y,w) = 1.
//! ```
//!
//! The coefficients `c(x,y,w)` define a probability-measure convolution
//! `δ_x * δ_y = Σ_w c(x,y,w) δ_w` and with it a whole harmonic-analysis
//! toolkit, all of which this crate implements with exact rational
//! arithmetic:
//!
//! * [`hypergroup`] — construct hypergroups from one-dimensional three-term
//!   recurrences, as presets (Chebyshev in `d` variables), or as products;
//!   certify the axioms on a finite box.
//! * [`polyring`] — sparse multivariate polynomials over the (Gaussian)
//!   rationals: the substrate for `Q_x`, derivatives, and basis conversion.
//! * [`measures`] — finitely supported measures, convolution, and the
//!   Fourier–Laplace transform onto the polynomial ring.
//! * [`functions`] — symbolic functions `x ↦ Σ_j c_j ∂^{α_j}Q_x(λ_j)`:
//!   exponentials, sine functions, moment families, translation, and
//!   modified differences.
//! * [`sweeps`] — exhaustive functional-equation checks over finite boxes.
//! * [`synthesis`] — finite-dimensional varieties of translates, exact rank
//!   and membership, sine-subspace dimension, and decomposition of
//!   exponential polynomials into moment functions.
//!
//! Everything is immutable after construction and safe to share across
//! threads. The crate is `no_std`-compatible (`alloc` required); the `std`
//! feature (default) only forwards to the arithmetic backends.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod functions;
pub mod hypergroup;
pub mod linalg;
pub mod measures;
pub mod multiindex;
pub mod polyring;
pub mod rng;
pub mod scalar;
pub mod sweeps;
pub mod synthesis;

pub use error::{Error, Result};
pub use functions::{HFunction, MomentFamily};
pub use hypergroup::{AxiomReport, Element, Hypergroup, Recurrence1D};
pub use measures::Measure;
pub use multiindex::MultiIndex;
pub use polyring::MultiPoly;
pub use scalar::{Rational, Scalar};
pub use synthesis::{Decomposition, Variety};
