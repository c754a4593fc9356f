//! Certified evaluation of the Takagi-Knopp function
//! `F(x) = sum_j 2^(-alpha j) L(2^j x)` (with `L` the distance to the
//! nearest integer) and rigorous estimation of the local geometry of the
//! region `{0 <= y <= F(x)}` under its graph: extrema classification,
//! accessibility exponents, p-exponents and the box dimension of the
//! boundary.
//!
//! Every numeric result is a bracket `[lower, upper]` produced by exact
//! big-integer arithmetic with directed rounding; no estimate is reported
//! as a bare floating-point number.

pub mod boxdim;
pub mod digits;
pub mod error;
pub mod extrema;
pub mod geometry;
pub mod real;
pub mod series;
pub mod tpoly;
pub mod verify;

pub use error::{Error, Result};
pub use real::{DyadicFloat, RealBound, Rounding};

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::Ratio<num_bigint::BigInt>;

/// Convenience constructor for small rationals.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
