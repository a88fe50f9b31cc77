//! Rational numbers with p-adic valuations and their textual encoding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

/// Build a rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Build the rational `a / b`; panics if `b == 0`.
pub fn qf(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// Build a rational from a big integer.
pub fn qi(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// `p`-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quo, rem) = n.div_rem(&pb);
        if !rem.is_zero() {
            return v;
        }
        n = quo;
        v += 1;
    }
}

/// `p`-adic valuation of a rational; `None` encodes `+infinity` (the value 0).
pub fn valuation(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
    }
}

/// Minimum valuation over a collection; `None` if every entry is zero.
pub fn min_valuation<'a>(xs: impl IntoIterator<Item = &'a Q>, p: u64) -> Option<i64> {
    xs.into_iter().filter_map(|x| valuation(x, p)).min()
}

/// Integer power of a rational (negative exponents allowed for nonzero bases).
pub fn qpow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `p^e` as a rational.
pub fn ppow(p: u64, e: i64) -> Q {
    qpow(&q(p as i64), e)
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient `C(n, k)` for nonnegative `n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Whether a rational lies in `Z_(p)` (denominator prime to `p`).
pub fn is_p_integral(x: &Q, p: u64) -> bool {
    valuation(x, p).map_or(true, |v| v >= 0)
}

/// Reduce a `p`-integral rational modulo `modulus` (a power of `p`), returning
/// a representative in `[0, modulus)`.
pub fn reduce_mod(x: &Q, p: u64, modulus: u64) -> Result<u64> {
    if !is_p_integral(x, p) {
        return Err(Error::Precision(format!("{} is not {}-integral", format_q(x), p)));
    }
    let m = BigInt::from(modulus);
    let num = x.numer().mod_floor(&m);
    let den = x.denom().mod_floor(&m);
    let inv = mod_inverse(&den, &m)
        .ok_or_else(|| Error::NotUnit(format!("denominator {} mod {}", den, m)))?;
    Ok(((num * inv).mod_floor(&m)).to_u64().expect("residue fits in u64"))
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

/// Format a rational as `"num/den"` (or `"num"` when the denominator is 1).
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `"num/den"`, `"num"`, or a decimal-free integer string.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(a, b))
        }
        None => Ok(qi(s.parse().map_err(|_| bad())?)),
    }
}

/// Serde adapter serializing [`Q`] as the string `"num/den"`.
pub mod qstr {
    use super::*;

    /// Serialize as `"num/den"`.
    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_q(x).serialize(s)
    }

    /// Deserialize from `"num/den"` or an integer string.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Q>` as a list of `"num/den"` strings.
pub mod qvec {
    use super::*;

    /// Serialize as a list of strings.
    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        x.iter().map(format_q).collect::<Vec<_>>().serialize(s)
    }

    /// Deserialize from a list of strings.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_q(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Absolute value helper (kept here so callers need not import `Signed`).
pub fn qabs(x: &Q) -> Q {
    x.abs()
}

/// A rational tagged with the prime used for its valuation.
///
/// This is the scalar type exchanged with the outside world; arithmetic is
/// exact, and [`PadicScalar::valuation`] reports `None` for zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicScalar {
    /// The prime.
    pub p: u64,
    /// The rational value.
    #[serde(with = "qstr")]
    pub value: Q,
}

impl PadicScalar {
    /// Wrap a rational.
    pub fn new(p: u64, value: Q) -> Self {
        PadicScalar { p, value }
    }

    /// `p`-adic valuation (`None` for zero).
    pub fn valuation(&self) -> Option<i64> {
        valuation(&self.value, self.p)
    }

    /// Normalized absolute value exponent: `|x| = p^{-v}`; `None` for zero.
    pub fn abs_exponent(&self) -> Option<i64> {
        self.valuation().map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&qf(18, 5), 3), Some(2));
        assert_eq!(valuation(&qf(5, 18), 3), Some(-2));
        assert_eq!(valuation(&q(0), 3), None);
        assert_eq!(valuation(&q(7), 3), Some(0));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3/4", "-7", "0", "12/5"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn residues() {
        assert_eq!(reduce_mod(&qf(1, 2), 3, 9).unwrap(), 5);
        assert!(reduce_mod(&qf(1, 3), 3, 9).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::from(0));
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
