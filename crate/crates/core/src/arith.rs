//! Exact integer and rational arithmetic shared by every recursion.
//!
//! Rationals are `num_rational::BigRational`, which keeps values in lowest
//! terms with a positive denominator after every operation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// `C(m, k)`, zero outside `0..=m`.
///
/// Uses the multiplicative formula; each partial product
/// `C(m, i) = C(m, i - 1) * (m - i + 1) / i` is an exact division.
pub fn binomial(m: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > m {
        return BigInt::zero();
    }
    let k = (k as u64).min(m - k as u64);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc *= m - k + i;
        acc /= i;
    }
    acc
}

/// Lift an integer into the rationals.
pub fn rational(value: impl Into<BigInt>) -> Rational {
    Rational::from_integer(value.into())
}

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

/// The integer value of `q`, or `None` when the denominator is not 1.
pub fn to_integer(q: &Rational) -> Option<BigInt> {
    q.is_integer().then(|| q.numer().clone())
}

/// Exact quotient `a / b`, or `None` when `b` does not divide `a`.
pub fn exact_div(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if b.is_zero() {
        return None;
    }
    let (q, r) = num_integer::Integer::div_rem(a, b);
    r.is_zero().then_some(q)
}

/// True when every prime factor of `q`'s denominator also divides `d`.
pub fn denominator_divides_power_of(q: &Rational, d: u64) -> bool {
    let mut den = q.denom().abs();
    let d = BigInt::from(d);
    loop {
        let g = num_integer::Integer::gcd(&den, &d);
        if g.is_one() {
            return den.is_one();
        }
        while (&den % &g).is_zero() {
            den /= &g;
        }
    }
}
