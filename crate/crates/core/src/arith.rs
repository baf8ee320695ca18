//! Exact integer and rational helpers.

use alloc::string::String;
use core::fmt::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// `n` choose `k`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial with signed arguments: zero outside `0 <= k <= n`.
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> ExactRational {
    BigRational::new(num.into(), den.into())
}

pub fn from_uint(n: &BigUint) -> ExactRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

pub fn from_int(n: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Ceiling of a rational.
pub fn ceil(r: &ExactRational) -> BigInt {
    r.ceil().to_integer()
}

/// Floor of a rational.
pub fn floor(r: &ExactRational) -> BigInt {
    r.floor().to_integer()
}

/// gcd of a non-empty list, or zero for an empty one.
pub fn gcd_all(values: &[BigUint]) -> BigUint {
    values.iter().fold(BigUint::zero(), |g, v| g.gcd(v))
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// `r` rounded half-to-even at `precision` decimal places.
pub fn round_half_even(r: &ExactRational, precision: u32) -> ExactRational {
    let scale = BigInt::from(10u32).pow(precision);
    let scaled = r * BigRational::from_integer(scale.clone());
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = rational(1, 2);
    let mut n = floor.to_integer();
    if frac > half || (frac == half && n.is_odd()) {
        n += 1;
    }
    BigRational::new(n, scale)
}

/// Decimal rendering with exactly `precision` places, rounded half-to-even.
pub fn to_decimal_string(r: &ExactRational, precision: u32) -> String {
    let rounded = round_half_even(r, precision);
    let scale = BigInt::from(10u32).pow(precision);
    let n = (rounded * BigRational::from_integer(scale)).to_integer();
    let mut out = String::new();
    if n.is_negative() {
        out.push('-');
    }
    let digits = n.abs().to_str_radix(10);
    let p = precision as usize;
    if p == 0 {
        out.push_str(&digits);
        return out;
    }
    let padded: String = if digits.len() <= p {
        let mut s = String::new();
        for _ in 0..=(p - digits.len()) {
            s.push('0');
        }
        s.push_str(&digits);
        s
    } else {
        digits
    };
    let split = padded.len() - p;
    let _ = write!(out, "{}.{}", &padded[..split], &padded[split..]);
    out
}

/// `num/den` in lowest terms, or just the integer when the denominator is 1.
pub fn to_fraction_string(r: &ExactRational) -> String {
    if r.denom().is_one() {
        alloc::format!("{}", r.numer())
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &ExactRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Product of a slice of big integers.
pub fn product(values: &[BigUint]) -> BigUint {
    values.iter().fold(BigUint::one(), |acc, v| acc * v)
}
