//! Exact scalar fields.
//!
//! Every routine in the crate is generic over [`Scalar`], but the trait is
//! only implemented for exact rational types. Floating point would make the
//! identity checks meaningless, so there is deliberately no `f64` impl.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed};

/// An exact field of characteristic zero.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// The integer `n` embedded in the field.
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer embeds in an exact field")
    }

    /// The fraction `a/b`.
    fn frac(a: i64, b: i64) -> Self {
        assert!(b != 0, "zero denominator");
        Self::int(a) / Self::int(b)
    }

    /// Numerator and denominator as big integers, denominator positive.
    fn parts(&self) -> (BigInt, BigInt);

    /// Build from big integer parts.
    fn from_parts(n: BigInt, d: BigInt) -> Option<Self>;

    /// Canonical "p/q" rendering ("p" when the denominator is one).
    fn render(&self) -> String {
        let (n, d) = self.parts();
        if d == BigInt::from(1) {
            n.to_string()
        } else {
            format!("{n}/{d}")
        }
    }

    /// Parse "p/q" or "p".
    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
            None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
        };
        if d == BigInt::from(0) {
            return None;
        }
        Self::from_parts(n, d)
    }
}

impl Scalar for BigRational {
    fn parts(&self) -> (BigInt, BigInt) {
        (self.numer().clone(), self.denom().clone())
    }

    fn from_parts(n: BigInt, d: BigInt) -> Option<Self> {
        Some(Ratio::new(n, d))
    }
}

impl Scalar for Ratio<i64> {
    fn parts(&self) -> (BigInt, BigInt) {
        (BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn from_parts(n: BigInt, d: BigInt) -> Option<Self> {
        let n: i64 = n.try_into().ok()?;
        let d: i64 = d.try_into().ok()?;
        Some(Ratio::new(n, d))
    }
}

/// `(-1)^k` as a scalar.
pub fn sign<C: Scalar>(k: i64) -> C {
    if k.rem_euclid(2) == 0 {
        C::one()
    } else {
        -C::one()
    }
}

/// `n!` for `n >= 0`, `None` for negative `n`.
///
/// Callers that own a coefficient formula decide what a negative argument
/// means; here it is simply undefined.
pub fn factorial<C: Scalar>(n: i64) -> Option<C> {
    if n < 0 {
        return None;
    }
    let mut acc = C::one();
    for k in 2..=n {
        acc = acc * C::int(k);
    }
    Some(acc)
}

/// Binomial coefficient, zero outside `0 <= k <= n`.
pub fn binom<C: Scalar>(n: i64, k: i64) -> C {
    if k < 0 || n < 0 || k > n {
        return C::zero();
    }
    let k = k.min(n - k);
    let mut acc = C::one();
    for t in 0..k {
        acc = acc * C::int(n - t) / C::int(t + 1);
    }
    acc
}

/// `c^k` for `k >= 0`.
pub fn pow<C: Scalar>(c: &C, k: u32) -> C {
    let mut acc = C::one();
    for _ in 0..k {
        acc = acc * c.clone();
    }
    acc
}

/// Cheap sanity helper used by tests and the text renderer.
pub fn is_integer<C: Scalar>(c: &C) -> bool {
    c.parts().1 == BigInt::from(1)
}

/// Parse helper that accepts the usual `FromStr` spelling as a fallback.
pub fn parse_scalar<C: Scalar>(s: &str) -> Option<C> {
    C::parse(s).or_else(|| s.parse::<C>().ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    type Q = BigRational;

    #[test]
    fn render_round_trip() {
        for (a, b) in [(3, 4), (-3, 2), (0, 5), (10, 5)] {
            let x = Q::frac(a, b);
            assert_eq!(Q::parse(&x.render()).unwrap(), x);
        }
        assert_eq!(Q::frac(-3, 2).render(), "-3/2");
        assert_eq!(Q::int(1).render(), "1");
    }

    #[test]
    fn small_ratio_also_works() {
        let x: Ratio<i64> = Scalar::frac(2, 6);
        assert_eq!(x.render(), "1/3");
        assert_eq!(<Ratio<i64> as Scalar>::parse("1/3"), Some(x));
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binom::<Q>(5, 2), Q::int(10));
        assert_eq!(binom::<Q>(3, 4), Q::int(0));
        assert_eq!(factorial::<Q>(5), Some(Q::int(120)));
        assert_eq!(factorial::<Q>(-1), None);
        assert_eq!(sign::<Q>(-3), Q::int(-1));
    }
}
