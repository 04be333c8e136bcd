//! Arbitrary precision rationals and a few helpers around them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{AlgebraError, Result};

pub type Rational = num_rational::BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Generalized binomial coefficient `binom(r, k)` for rational `r`.
pub fn binomial(r: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * (r - q(i as i64)) / q(i as i64 + 1);
    }
    acc
}

pub fn parse_rational(num: &str, den: &str) -> Result<Rational> {
    let n: BigInt = num
        .trim()
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("bad numerator `{num}`")))?;
    let d: BigInt = den
        .trim()
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("bad denominator `{den}`")))?;
    if d.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    Ok(Rational::new(n, d))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    match s.split_once('/') {
        Some((n, d)) => parse_rational(n, d),
        None => parse_rational(s, "1"),
    }
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    a.lcm(b).abs()
}

/// True when every prime factor of `d` divides `m`.
pub fn is_power_supported(d: &BigInt, m: &BigInt) -> bool {
    let mut d = d.abs();
    if d.is_zero() {
        return false;
    }
    loop {
        let g = d.gcd(m);
        if g.is_one() {
            return d.is_one();
        }
        d /= g;
    }
}
