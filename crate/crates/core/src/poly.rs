//! Univariate polynomials in `u` with exact coefficients.

use std::fmt;

use crate::scalar::{binom, Scalar};

/// Dense polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> UPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UPoly { coeffs: vec![C::one()] }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `u - r`
    pub fn linear_root(r: C) -> Self {
        Self::new(vec![-r, C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn eval(&self, x: &C) -> C {
        self.coeffs.iter().rev().fold(C::zero(), |acc, a| acc * x.clone() + a.clone())
    }

    /// `P(a u + b)`.
    pub fn compose_affine(&self, a: &C, b: &C) -> Self {
        let lin = Self::new(vec![b.clone(), a.clone()]);
        let mut out = Self::zero();
        let mut pw = Self::one();
        for c in &self.coeffs {
            out = out.add(&pw.scale(c));
            pw = pw.mul(&lin);
        }
        out
    }

    /// `P(u + c)`, via the binomial expansion.
    pub fn shift(&self, c: &C) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![C::zero(); n];
        for (k, a) in self.coeffs.iter().enumerate() {
            let mut cp = C::one();
            for t in 0..=k {
                // coefficient of u^{k-t} in (u+c)^k is binom(k,t) c^t
                out[k - t] = out[k - t].clone() + a.clone() * binom::<C>(k as i64, t as i64) * cp.clone();
                cp = cp * c.clone();
            }
        }
        Self::new(out)
    }

    /// Division with remainder by a nonzero polynomial.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![C::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (t, b) in d.coeffs.iter().enumerate() {
                    rem[k + t] = rem[k + t].clone() - c.clone() * b.clone();
                }
            }
            q[k] = c;
        }
        (Self::new(q), Self::new(rem))
    }

    /// Rational roots with multiplicity, by the rational root theorem.
    ///
    /// Only meant for the small polynomials produced by classification.
    pub fn rational_roots(&self) -> Vec<C> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        let mut out = Vec::new();
        let mut p = self.clone();
        // leading zeros: u divides p
        while p.degree().is_some_and(|d| d > 0) && p.coeff(0).is_zero() {
            out.push(C::zero());
            p = Self::new(p.coeffs[1..].to_vec());
        }
        if p.degree().unwrap_or(0) == 0 {
            return out;
        }
        // clear denominators
        let mut l = BigInt::one();
        for c in &p.coeffs {
            l = l.lcm(&c.parts().1);
        }
        let ints: Vec<BigInt> = p
            .coeffs
            .iter()
            .map(|c| {
                let (n, d) = c.parts();
                n * (&l / d)
            })
            .collect();
        let divisors = |x: &BigInt| -> Vec<BigInt> {
            let x = x.abs();
            let mut v = Vec::new();
            let mut k = BigInt::one();
            while &k * &k <= x {
                if (&x % &k).is_zero() {
                    v.push(k.clone());
                    v.push(&x / &k);
                }
                k += 1;
            }
            v
        };
        let num = divisors(&ints[0]);
        let den = divisors(ints.last().unwrap());
        let mut cands: Vec<C> = Vec::new();
        for a in &num {
            for b in &den {
                for s in [1i64, -1] {
                    let c = C::from_parts(a * BigInt::from(s), b.clone()).unwrap();
                    if !cands.contains(&c) {
                        cands.push(c);
                    }
                }
            }
        }
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for c in cands {
            loop {
                if p.degree().unwrap_or(0) == 0 || !p.eval(&c).is_zero() {
                    break;
                }
                out.push(c.clone());
                p = p.div_rem(&Self::linear_root(c.clone())).0;
            }
        }
        out
    }
}

/// `prod_k (u - gamma_k)`.
pub fn monic_from_roots<C: Scalar>(roots: &[C]) -> UPoly<C> {
    roots
        .iter()
        .fold(UPoly::one(), |acc, r| acc.mul(&UPoly::linear_root(r.clone())))
}

impl<C: Scalar> fmt::Display for UPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c.render())?,
                1 => write!(f, "({})u", c.render())?,
                _ => write!(f, "({})u^{k}", c.render())?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    #[test]
    fn roots_examples() {
        assert_eq!(monic_from_roots::<Q>(&[]), UPoly::one());
        assert_eq!(monic_from_roots(&[Q::int(0)]).coeffs(), &[Q::int(0), Q::int(1)]);
        let p = monic_from_roots(&[Q::int(1), Q::frac(-1, 2)]);
        assert_eq!(p.coeffs(), &[Q::frac(-1, 2), Q::frac(-1, 2), Q::int(1)]);
    }

    #[test]
    fn shift_matches_compose() {
        let p = monic_from_roots(&[Q::int(1), Q::frac(-1, 2), Q::int(3)]);
        let c = Q::frac(2, 3);
        assert_eq!(p.shift(&c), p.compose_affine(&Q::int(1), &c));
    }

    #[test]
    fn rational_roots_found() {
        let roots = [Q::frac(1, 2), Q::int(-2), Q::int(-2), Q::int(0)];
        let p = monic_from_roots(&roots).mul(&UPoly::new(vec![Q::int(1), Q::int(0), Q::int(1)]));
        let mut got = p.rational_roots();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, vec![Q::int(-2), Q::int(-2), Q::int(0), Q::frac(1, 2)]);
    }
}
