//! Exact rational scalars used throughout the bound computations.
//!
//! Probabilities built from counts are exact; float inputs are converted to
//! exact rationals (every finite f64 is a rational) and validated against the
//! documented tolerances at construction time. Downstream arithmetic is then
//! exact, which is what lets the equality-based cross-checks between the
//! closed-form and LP routes assert `==` instead of "close enough".

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rat_u64(v: u64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact conversion; `None` for NaN or infinities.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    BigRational::from_float(x)
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a widening division for ratios whose parts overflow f64.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn is_zero(x: &Rat) -> bool {
    x.is_zero()
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn abs(x: &Rat) -> Rat {
    x.abs()
}
