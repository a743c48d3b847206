use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn pow(self, e: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.0), e as usize)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation of a rational; `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = p.to_bigint();
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Exponent of `p` in `x`, or `Infinite` when `x = 0`.
pub fn valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// Same as [`valuation`] but takes an unchecked modulus.
pub fn valuation_checked(x: &Rational, p: u64) -> Result<Valuation> {
    Ok(valuation(x, Prime::new(p)?))
}

/// `|x|_p = p^(-v(x))`, zero for zero.
pub fn abs_p(x: &Rational, p: Prime) -> Rational {
    match valuation(x, p) {
        Valuation::Infinite => Rational::zero(),
        Valuation::Finite(v) => p_power(p, -v),
    }
}

/// `p^e` as a rational, for any sign of `e`.
pub fn p_power(p: Prime, e: i64) -> Rational {
    let mag = BigInt::from(p.pow(e.unsigned_abs() as u32));
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// The p-adic fractional part: the unique `n / p^t` with `0 <= n < p^t`
/// such that `x - n/p^t` lies in the localization of the integers at `p`.
pub fn padic_fraction(x: &Rational, p: Prime) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let t = int_valuation(x.denom(), p);
    if t == 0 {
        return Rational::zero();
    }
    let modulus = BigInt::from(p.pow(t as u32));
    let unit_den = x.denom() / &modulus;
    let inv = mod_inverse(&unit_den, &modulus).expect("unit part of the denominator is invertible");
    let n = (x.numer() * inv).mod_floor(&modulus);
    Rational::new(n, modulus)
}

/// Canonical representative of `x` modulo `p^s` times the p-integers.
pub fn reduce_mod_power(x: &Rational, p: Prime, s: i64) -> Rational {
    let scale = p_power(p, s);
    padic_fraction(&(x / &scale), p) * scale
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Parses "a", "a/b" or "-a/b".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

/// "num/den" (or "num" for integers), matching [`parse_rational`].
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter: rationals as "num/den" strings.
pub mod rational_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: rational sequences as "num/den" strings.
pub mod rational_vec_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(c.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| parse_rational(x).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter: big unsigned integers as decimal strings.
pub mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact `log_p` of a power of `p`, if it is one.
pub fn log_p(x: &BigUint, p: Prime) -> Option<u32> {
    let pb = BigUint::from(p.get());
    let mut m = x.clone();
    let mut e = 0;
    if m.is_zero() {
        return None;
    }
    while !m.is_one() {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return None;
        }
        m = q;
        e += 1;
    }
    Some(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let p5 = Prime::new(5).unwrap();
        assert_eq!(valuation(&q("75"), p5), Valuation::Finite(2));
        assert_eq!(valuation(&q("1"), Prime::new(7).unwrap()), Valuation::Finite(0));
        assert_eq!(valuation(&q("1/25"), p5), Valuation::Finite(-2));
        assert_eq!(valuation(&q("0"), p5), Valuation::Infinite);
    }

    #[test]
    fn non_prime_rejected() {
        assert_eq!(valuation_checked(&q("3"), 6), Err(Error::NotPrime(6)));
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(0).is_err());
        assert!(Prime::new(2).is_ok());
    }

    #[test]
    fn absolute_value() {
        let p5 = Prime::new(5).unwrap();
        assert_eq!(abs_p(&q("50"), p5), q("1/25"));
        assert_eq!(abs_p(&q("3/125"), p5), q("125"));
    }

    #[test]
    fn fractional_part() {
        let p5 = Prime::new(5).unwrap();
        // 7/25 = 7/25 already reduced; 1/5 + 2/25 style digits
        assert_eq!(padic_fraction(&q("7/25"), p5), q("7/25"));
        // 1/(2*5) = 3/5 mod Z_(5) since 2*3 = 6 = 1 mod 5
        assert_eq!(padic_fraction(&q("1/10"), p5), q("3/5"));
        assert_eq!(padic_fraction(&q("-1/5"), p5), q("4/5"));
        assert_eq!(padic_fraction(&q("3/7"), p5), q("0"));
        let x = q("13/50");
        let r = padic_fraction(&x, p5);
        assert!(valuation(&(x - r), p5) >= Valuation::Finite(0));
    }

    #[test]
    fn reduce_mod_power_keeps_class() {
        let p3 = Prime::new(3).unwrap();
        let x = q("100/7");
        let r = reduce_mod_power(&x, p3, 2);
        assert!(valuation(&(x - &r), p3) >= Valuation::Finite(2));
        assert!(r >= q("0") && r < q("9"));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rational(&q("6/4")), "3/2");
        assert_eq!(format_rational(&q("-8/4")), "-2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
