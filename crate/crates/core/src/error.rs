//! Crate-wide error type.

use alloc::string::String;

use crate::scalar::Rational;

/// Errors produced by hypergroup construction and the exact operations.
///
/// Dimension and base-hypergroup mismatches between values that are combined
/// arithmetically are programmer errors and panic instead; the variants here
/// are the conditions a caller can legitimately run into with well-formed
/// code (rejected recurrences, missing tail rules, float input to exact-only
/// conversions, inconclusive rank stabilization).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A linearization coefficient came out negative: the family does not
    /// generate a hypergroup. Carries the exact witness.
    #[error(
        "negative linearization coefficient c({k},{l},{n}) = {value} in coordinate {coordinate}"
    )]
    NegativeCoefficient {
        coordinate: usize,
        k: usize,
        l: usize,
        n: usize,
        value: Rational,
    },
    /// A recurrence violates the structural invariants (a_n > 0,
    /// a_n + b_n + c_n = 1, c_0 = 0, nonempty coefficient coverage).
    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),
    /// Coefficients were requested past the explicit prefix of a recurrence
    /// that has no eventually-constant tail rule.
    #[error("recurrence coefficients for n = {needed} requested in coordinate {coordinate}, but only n < {available} are defined (no tail rule)")]
    TailRequired {
        coordinate: usize,
        needed: usize,
        available: usize,
    },
    /// Float-mode input to an operation that is defined for exact scalars
    /// only (basis conversion, Fourier transforms).
    #[error("operation requires exact (rational) scalars, got float-mode input")]
    NotExact,
    /// The function passed where an exponential is required is not one
    /// (an exponential is a single term: coefficient 1, order 0).
    #[error("function is not an exponential")]
    NotExponential,
    /// The rank of a sampled variety did not stabilize under box
    /// enlargement; the caller should retry with a larger box.
    #[error("variety rank did not stabilize on box {box_n} (dim {dim_small} vs {dim_large} with margin); retry with a larger box")]
    RankUnstable {
        box_n: usize,
        dim_small: usize,
        dim_large: usize,
    },
    /// `sine_dimension` was asked about an exponential that does not lie in
    /// the variety.
    #[error("the exponential does not belong to the variety")]
    NotInVariety,
}

pub type Result<T> = core::result::Result<T, Error>;
