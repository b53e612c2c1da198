//! Truncated series in `u^{-1}` and finite two-variable Laurent polynomials.
//!
//! Coefficients are anything implementing [`Coeff`]: plain scalars, algebra
//! elements (noncommutative, multiplied in the written order) or matrices.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::poly::UPoly;
use crate::scalar::{binom, Scalar};

/// A coefficient ring over an exact scalar field.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    type F: Scalar;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    /// Product in the written order (matters for noncommutative rings).
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, c: &Self::F) -> Self;
}

impl<C: Scalar> Coeff for C {
    type F = C;
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.clone() + other.clone();
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn scale(&self, c: &C) -> Self {
        self.clone() * c.clone()
    }
}

fn accumulate<K: Ord, E: Coeff>(map: &mut BTreeMap<K, E>, k: K, v: E) {
    if v.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(v);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            e.get_mut().add_assign_ref(&v);
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `sum_{n=0}^{D} a_n u^{-n}` with an explicit cutoff `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<E> {
    cutoff: u32,
    coeffs: BTreeMap<u32, E>,
}

impl<E> Series<E> {
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn coeff(&self, n: u32) -> Option<&E> {
        self.coeffs.get(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &E)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }
}

impl<E: Coeff> Series<E> {
    pub fn new(cutoff: u32) -> Self {
        Series { cutoff, coeffs: BTreeMap::new() }
    }

    /// Build from `(power, coefficient)` pairs; powers above the cutoff are dropped.
    pub fn from_terms(cutoff: u32, terms: impl IntoIterator<Item = (u32, E)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, v) in terms {
            if n <= cutoff {
                accumulate(&mut coeffs, n, v);
            }
        }
        Series { cutoff, coeffs }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.coeffs.clone();
        for (k, v) in &o.coeffs {
            accumulate(&mut out, *k, v.clone());
        }
        Ok(Series { cutoff: self.cutoff, coeffs: out })
    }

    pub fn scale(&self, c: &E::F) -> Self {
        Self::from_terms(self.cutoff, self.coeffs.iter().map(|(k, v)| (*k, v.scale(c))))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                if a + b <= self.cutoff {
                    accumulate(&mut out, a + b, x.mul_ref(y));
                }
            }
        }
        Ok(Series { cutoff: self.cutoff, coeffs: out })
    }

    /// Multiply by a scalar series (coefficients act by scaling).
    pub fn mul_scalar_series(&self, s: &Series<E::F>) -> Result<Self> {
        if s.cutoff != self.cutoff {
            return Err(Error::InvalidArgument(format!(
                "cutoff mismatch: {} vs {}",
                self.cutoff, s.cutoff
            )));
        }
        let mut out = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, c) in &s.coeffs {
                if a + b <= self.cutoff {
                    accumulate(&mut out, a + b, x.scale(c));
                }
            }
        }
        Ok(Series { cutoff: self.cutoff, coeffs: out })
    }

    /// `f(-u)`.
    pub fn negate_argument(&self) -> Self {
        Self::from_terms(
            self.cutoff,
            self.coeffs.iter().map(|(k, v)| {
                let v = if k % 2 == 1 { v.scale(&-<E::F as num_traits::One>::one()) } else { v.clone() };
                (*k, v)
            }),
        )
    }

    /// `f(u + c)`, re-expanded in `u^{-1}` and truncated at the same cutoff.
    pub fn substitute_shift(&self, c: &E::F) -> Self {
        let mut out = BTreeMap::new();
        for (n, v) in &self.coeffs {
            if *n == 0 {
                accumulate(&mut out, 0, v.clone());
                continue;
            }
            let sh = series_shift_expand(*n, c, self.cutoff).expect("n >= 1 and cutoff >= n");
            for (k, s) in sh.coeffs {
                accumulate(&mut out, k, v.scale(&s));
            }
        }
        Series { cutoff: self.cutoff, coeffs: out }
    }

    /// Map every coefficient.
    pub fn map<G: Coeff>(&self, f: impl Fn(&E) -> G) -> Series<G> {
        Series::from_terms(self.cutoff, self.coeffs.iter().map(|(k, v)| (*k, f(v))))
    }

    /// Same series at a smaller cutoff.
    pub fn truncate(&self, cutoff: u32) -> Self {
        Self::from_terms(cutoff, self.coeffs.iter().map(|(k, v)| (*k, v.clone())))
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.cutoff != o.cutoff {
            return Err(Error::InvalidArgument(format!(
                "cutoff mismatch: {} vs {}",
                self.cutoff, o.cutoff
            )));
        }
        Ok(())
    }
}

impl<C: Scalar> Series<C> {
    pub fn one(cutoff: u32) -> Self {
        Series::from_terms(cutoff, [(0, C::one())])
    }

    /// Scalar coefficient, zero if absent.
    pub fn at(&self, n: u32) -> C {
        self.coeffs.get(&n).cloned().unwrap_or_else(C::zero)
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.at(0);
        if num_traits::Zero::is_zero(&a0) {
            return Err(Error::Internal("series with zero constant term is not invertible".into()));
        }
        let mut b: Vec<C> = vec![C::one() / a0.clone()];
        for n in 1..=self.cutoff {
            let mut acc = C::zero();
            for k in 1..=n {
                acc = acc + self.at(k) * b[(n - k) as usize].clone();
            }
            b.push(-acc / a0.clone());
        }
        Ok(Series::from_terms(self.cutoff, b.into_iter().enumerate().map(|(k, v)| (k as u32, v))))
    }

    /// Series of a polynomial in `u^{-1}`: `sum_k c_k u^{-k}`.
    pub fn from_inverse_poly(cutoff: u32, p: &UPoly<C>) -> Self {
        Series::from_terms(cutoff, p.coeffs().iter().enumerate().map(|(k, c)| (k as u32, c.clone())))
    }
}

/// Expansion of `(u + c)^{-n}` in powers of `u^{-1}` up to `u^{-D}`.
pub fn series_shift_expand<C: Scalar>(n: u32, c: &C, d: u32) -> Result<Series<C>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if d < n {
        return Err(Error::InvalidArgument(format!("cutoff {d} below order {n}")));
    }
    let mut terms = Vec::new();
    let mut cp = C::one();
    let minus_c = -c.clone();
    for t in 0..=(d - n) {
        terms.push((n + t, binom::<C>((n + t - 1) as i64, t as i64) * cp.clone()));
        cp = cp * minus_c.clone();
    }
    Ok(Series::from_terms(d, terms))
}

/// Whether `A(u) P(u+1) = B(u) P(u)` holds to the accuracy the cutoff allows.
///
/// Both products are Laurent series whose top power is `u^{deg P}`. Only the
/// powers `u^e` with `deg P - D <= e <= deg P` are fully determined by
/// coefficients up to `u^{-D}`, so exactly those are compared.
pub fn ratio_condition_holds<C: Scalar>(a: &Series<C>, b: &Series<C>, p: &UPoly<C>, d: u32) -> Result<bool> {
    if a.cutoff() < d || b.cutoff() < d {
        return Err(Error::InvalidArgument(format!(
            "series cutoffs {} and {} must be at least {d}",
            a.cutoff(),
            b.cutoff()
        )));
    }
    let p1 = p.shift(&C::one());
    let deg = p.degree().unwrap_or(0) as i64;
    let coef = |s: &Series<C>, q: &UPoly<C>, e: i64| -> C {
        let mut acc = C::zero();
        for (k, qk) in q.coeffs().iter().enumerate() {
            let n = k as i64 - e;
            if n >= 0 && n <= d as i64 {
                acc = acc + qk.clone() * s.at(n as u32);
            }
        }
        acc
    };
    for e in (deg - d as i64)..=deg {
        if coef(a, &p1, e) != coef(b, p, e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite Laurent polynomial in two variables `u, v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent2<E> {
    terms: BTreeMap<(i32, i32), E>,
}

impl<E> Default for Laurent2<E> {
    fn default() -> Self {
        Laurent2 { terms: BTreeMap::new() }
    }
}

impl<E> Laurent2<E> {
    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &E)> {
        self.terms.iter()
    }

    pub fn get(&self, eu: i32, ev: i32) -> Option<&E> {
        self.terms.get(&(eu, ev))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<E: Coeff> Laurent2<E> {
    pub fn monomial(eu: i32, ev: i32, e: E) -> Self {
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, (eu, ev), e);
        Laurent2 { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((i32, i32), E)>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, v) in it {
            accumulate(&mut terms, k, v);
        }
        Laurent2 { terms }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (k, v) in &o.terms {
            accumulate(&mut self.terms, *k, v.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(&o.scale(&-<E::F as num_traits::One>::one()));
        out
    }

    pub fn scale(&self, c: &E::F) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.scale(c))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &o.terms {
                accumulate(&mut terms, (a + c, b + d), x.mul_ref(y));
            }
        }
        Laurent2 { terms }
    }

    /// Multiply by a scalar Laurent polynomial.
    pub fn mul_scalar(&self, s: &Laurent2<E::F>) -> Self {
        let mut terms = BTreeMap::new();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &s.terms {
                accumulate(&mut terms, (a + c, b + d), x.scale(y));
            }
        }
        Laurent2 { terms }
    }

    pub fn map<G: Coeff>(&self, f: impl Fn(&E) -> G) -> Laurent2<G> {
        Laurent2::from_terms(self.terms.iter().map(|(k, v)| (*k, f(v))))
    }
}

impl<E: Coeff> Coeff for Laurent2<E> {
    type F = E::F;
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.add_assign(other);
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scale(&self, c: &E::F) -> Self {
        Laurent2::scale(self, c)
    }
}

impl<C: Scalar> Laurent2<C> {
    /// `a u + b v + c` as a scalar Laurent polynomial.
    pub fn affine(a: C, b: C, c: C) -> Self {
        Self::from_terms([((1, 0), a), ((0, 1), b), ((0, 0), c)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    #[test]
    fn shift_expand_examples() {
        let s = series_shift_expand(1, &Q::int(-1), 3).unwrap();
        assert_eq!(s, Series::from_terms(3, [(1, Q::int(1)), (2, Q::int(1)), (3, Q::int(1))]));
        let s = series_shift_expand(2, &Q::int(0), 4).unwrap();
        assert_eq!(s, Series::from_terms(4, [(2, Q::int(1))]));
        let s = series_shift_expand(1, &Q::frac(1, 2), 3).unwrap();
        assert_eq!(s, Series::from_terms(3, [(1, Q::int(1)), (2, Q::frac(-1, 2)), (3, Q::frac(1, 4))]));
        assert!(series_shift_expand(0, &Q::int(1), 3).is_err());
        assert!(series_shift_expand(3, &Q::int(1), 2).is_err());
    }

    #[test]
    fn mixed_cutoff_is_an_error() {
        let a = Series::<Q>::one(3);
        let b = Series::<Q>::one(4);
        assert!(a.mul(&b).is_err());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let a = Series::from_terms(6, [(0, Q::int(2)), (1, Q::frac(1, 3)), (4, Q::int(-5))]);
        let prod = a.mul(&a.inverse().unwrap()).unwrap();
        assert_eq!(prod, Series::one(6));
    }

    #[test]
    fn ratio_examples() {
        let one = Series::<Q>::one(3);
        assert!(ratio_condition_holds(&one, &one, &UPoly::one(), 3).unwrap());
        let a = Series::from_terms(3, [(0, Q::int(1)), (1, Q::int(-2))]);
        let b = Series::from_terms(3, [(0, Q::int(1)), (1, Q::int(-1))]);
        let p = UPoly::linear_root(Q::int(1));
        // u - 2 against u - 2 + u^{-1}: agree on the powers a cutoff of one determines
        assert!(ratio_condition_holds(&a, &b, &p, 1).unwrap());
        assert!(!ratio_condition_holds(&a, &b, &p, 2).unwrap());
        let u = UPoly::linear_root(Q::int(0));
        // u - 1 - 2u^{-1} against u - 1
        assert!(!ratio_condition_holds(&a, &b, &u, 2).unwrap());
        assert!(ratio_condition_holds(&a, &b, &u, 1).unwrap());
    }
}
