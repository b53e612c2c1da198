//! Twisted Yangians `Y^±(N)` realised inside `Y_p(N)` through
//! `S(u) = T(u) τ(T(u))`.
//!
//! S-modes are stored as T-family elements; every S-relation is a statement
//! checked after normal ordering in the T algebra.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pbw::{commutator, leibniz_bracket, normal_order, Element, Family, Gen, RelationTable};
use crate::report::Report;
use crate::scalar::{sign, Scalar};
use crate::series::{series_shift_expand, Laurent2, Series};
use crate::yangian::{qdet, QdetConvention};

/// Signs `θ^1..θ^N` with `θ^i θ^{N+1-i} = θ_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSignature {
    theta: Vec<i8>,
    theta0: i8,
}

impl ThetaSignature {
    pub fn validate(theta: &[i8]) -> Result<Self> {
        let n = theta.len();
        if n == 0 {
            return Err(Error::InvalidSignature("empty signature".into()));
        }
        if theta.iter().any(|&t| t != 1 && t != -1) {
            return Err(Error::InvalidSignature(format!("entries must be ±1: {theta:?}")));
        }
        let theta0 = theta[0] * theta[n - 1];
        for i in 0..n {
            if theta[i] * theta[n - 1 - i] != theta0 {
                return Err(Error::InvalidSignature(format!(
                    "θ^i θ^(N+1-i) is not constant for {theta:?}"
                )));
            }
        }
        if n % 2 == 1 && theta0 != 1 {
            return Err(Error::InvalidSignature("odd N forces θ_0 = +1".into()));
        }
        Ok(ThetaSignature { theta: theta.to_vec(), theta0 })
    }

    /// `θ^i = 1` for `θ_0 = +1`; `θ^i = sg((N+1)/2 - i)` for `θ_0 = -1`.
    pub fn standard(n: usize, theta0: i8) -> Result<Self> {
        match theta0 {
            1 => Self::validate(&vec![1; n]),
            -1 => {
                if n % 2 == 1 {
                    return Err(Error::InvalidSignature("θ_0 = -1 needs even N".into()));
                }
                Self::validate(&(1..=n).map(|i| if 2 * i < n + 1 { 1 } else { -1 }).collect::<Vec<_>>())
            }
            _ => Err(Error::InvalidSignature(format!("θ_0 must be ±1, got {theta0}"))),
        }
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn theta0(&self) -> i8 {
        self.theta0
    }

    pub fn signs(&self) -> &[i8] {
        &self.theta
    }

    /// `θ^i`, one-based.
    pub fn th<C: Scalar>(&self, i: usize) -> C {
        C::int(self.theta[i - 1] as i64)
    }

    pub fn th0<C: Scalar>(&self) -> C {
        C::int(self.theta0 as i64)
    }

    /// `N + 1 - i`.
    pub fn bar(&self, i: usize) -> usize {
        self.n() + 1 - i
    }
}

/// `τ(T_{(m)}^{ij}) = (-1)^m θ^{N+1-i} θ^{N+1-j} T_{(m)}^{N+1-j,N+1-i}`.
pub fn tau_on_t(m: u32, i: usize, j: usize, sig: &ThetaSignature) -> (i8, Gen) {
    let (bi, bj) = (sig.bar(i), sig.bar(j));
    let s = if m % 2 == 0 { 1 } else { -1 } * sig.theta[bi - 1] * sig.theta[bj - 1];
    (s, Gen::new(m, bj, bi))
}

/// τ applied to a T-family element as an algebra automorphism.
pub fn tau_element<C: Scalar>(e: &Element<C>, sig: &ThetaSignature) -> Element<C> {
    let (fam, p) = (e.family(), e.p());
    e.substitute(&|g: Gen| {
        let (s, h) = tau_on_t(g.level as u32, g.row as usize, g.col as usize, sig);
        Element::gen(fam, p, h.level as u32, h.row as usize, h.col as usize).scale(&C::int(s as i64))
    })
}

/// S-modes `S_{(0)} .. S_{(2p)}` expanded in T.
#[derive(Clone, Debug)]
pub struct TwistedFamily<C: Scalar> {
    pub n: usize,
    pub p: u32,
    pub sig: ThetaSignature,
    family: Family,
    modes: Vec<Vec<Element<C>>>,
}

impl<C: Scalar> TwistedFamily<C> {
    /// `S^{ij}_{(m)}`, one-based; zero above level `2p`.
    pub fn s(&self, m: u32, i: usize, j: usize) -> Element<C> {
        match self.modes.get(m as usize) {
            Some(row) => row[(i - 1) * self.n + (j - 1)].clone(),
            None => Element::zero(self.family, self.p),
        }
    }

    pub fn s_ref(&self, m: u32, i: usize, j: usize) -> Option<&Element<C>> {
        self.modes.get(m as usize).map(|row| &row[(i - 1) * self.n + (j - 1)])
    }

    /// Wrap precomputed modes; `modes[m]` holds `S_{(m)}^{ij}` row-major.
    pub fn from_modes(sig: &ThetaSignature, p: u32, family: Family, modes: Vec<Vec<Element<C>>>) -> Result<Self> {
        let n = sig.n();
        if modes.iter().any(|row| row.len() != n * n) {
            return Err(Error::InvalidArgument("each mode needs N^2 entries".into()));
        }
        Ok(TwistedFamily { n, p, sig: sig.clone(), family, modes })
    }

    pub fn max_mode(&self) -> u32 {
        2 * self.p
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Formal τ on S: `τ(S_{(k)})^{ij} = (-1)^k θ^{N+1-i} θ^{N+1-j} S_{(k)}^{N+1-j,N+1-i}`.
    pub fn tau_s(&self, k: u32, i: usize, j: usize) -> Element<C> {
        let (bi, bj) = (self.sig.bar(i), self.sig.bar(j));
        let c = sign::<C>(k as i64) * self.sig.th::<C>(bi) * self.sig.th::<C>(bj);
        self.s(k, bj, bi).scale(&c)
    }

    /// `S^{ij}(u)` as a Laurent polynomial in `u` (exponents `-m`).
    pub fn s_laurent_u(&self, i: usize, j: usize) -> Laurent2<Element<C>> {
        Laurent2::from_terms((0..=self.max_mode()).map(|m| ((-(m as i32), 0), self.s(m, i, j))))
    }

    pub fn s_laurent_v(&self, i: usize, j: usize) -> Laurent2<Element<C>> {
        Laurent2::from_terms((0..=self.max_mode()).map(|m| ((0, -(m as i32)), self.s(m, i, j))))
    }
}

/// Build the S-modes over the quantum T table (or a classical one).
pub fn build_s<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, sig: &ThetaSignature) -> Result<TwistedFamily<C>> {
    let (n, p, fam) = (rules.n(), rules.p(), rules.family());
    if sig.n() != n {
        return Err(Error::InvalidSignature(format!("signature length {} but N = {n}", sig.n())));
    }
    if !matches!(fam, Family::T | Family::ClassicalT) {
        return Err(Error::InvalidArgument("S is built over a T-family table".into()));
    }
    let t = |m: u32, i: usize, j: usize| Element::<C>::gen(fam, p, m, i, j);
    let mut jobs = Vec::new();
    for m in 0..=2 * p {
        for i in 1..=n {
            for j in 1..=n {
                jobs.push((m, i, j));
            }
        }
    }
    let built: Vec<Result<Element<C>>> = jobs
        .par_iter()
        .map(|&(m, i, j)| {
            let mut e = Element::zero(fam, p);
            let bj = sig.bar(j);
            for r in 0..=m {
                let s = m - r;
                for a in 1..=n {
                    let ba = sig.bar(a);
                    let c = sign::<C>(s as i64) * sig.th::<C>(bj) * sig.th::<C>(ba);
                    e.add_scaled(&t(r, i, a).mul(&t(s, bj, ba)), &c);
                }
            }
            normal_order(&e, rules)
        })
        .collect();
    let mut modes = Vec::new();
    let mut it = built.into_iter();
    for _ in 0..=2 * p {
        let mut row = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            row.push(it.next().expect("job count")?);
        }
        modes.push(row);
    }
    Ok(TwistedFamily { n, p, sig: sig.clone(), family: fam, modes })
}

/// `P = sum E_ij ⊗ E_ji` and `Q = sum θ^i θ^j E_ij ⊗ E_{N+1-i,N+1-j}`.
pub fn pq_matrices<C: Scalar>(sig: &ThetaSignature) -> (Matrix<C>, Matrix<C>) {
    let n = sig.n();
    let mut p = Matrix::zeros(n * n, n * n);
    let mut q = Matrix::zeros(n * n, n * n);
    for i in 1..=n {
        for j in 1..=n {
            p = p.add(&Matrix::unit(n, i, j).kron(&Matrix::unit(n, j, i)));
            let c = sig.th::<C>(i) * sig.th::<C>(j);
            q = q.add(&Matrix::unit(n, i, j).kron(&Matrix::unit(n, sig.bar(i), sig.bar(j))).scale(&c));
        }
    }
    (p, q)
}

pub fn verify_pq<C: Scalar>(sig: &ThetaSignature) -> Report {
    let n = sig.n();
    let (p, q) = pq_matrices::<C>(sig);
    let mut rep = Report::new("pq").param("N", n).param("theta0", sig.theta0());
    let id = Matrix::<C>::identity(n * n);
    let idx = vec![n as i64];
    rep.record("P^2=I", idx.clone(), p.mul(&p) == id, || "P^2 != I".into());
    rep.record("Q^2=NQ", idx.clone(), q.mul(&q) == q.scale(&C::int(n as i64)), || "Q^2 != N Q".into());
    let tq = q.scale(&sig.th0());
    rep.record("PQ=θ0Q", idx.clone(), p.mul(&q) == tq, || "PQ != θ0 Q".into());
    rep.record("QP=θ0Q", idx, q.mul(&p) == tq, || "QP != θ0 Q".into());
    rep
}

/// A formal word in S-symbols `(level, row, col)` with a coefficient.
pub type FormalTerm<C> = (C, Vec<(u32, usize, usize)>);

/// Which mode form of the S commutation relation to use.
///
/// `Printed` runs the θ-sum over `r < min(m,n)` with sign `(-1)^{n+r}`.
/// `Corrected` runs it over `r = 0..m-1` with sign `(-1)^{m+r}`, which is what
/// the cleared series relation gives coefficient by coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeForm {
    Printed,
    Corrected,
}

fn push_word<C: Scalar>(out: &mut Vec<FormalTerm<C>>, c: C, word: &[(u32, usize, usize)]) {
    let mut w = Vec::new();
    for &(m, i, j) in word {
        if m == 0 {
            if i != j {
                return;
            }
        } else {
            w.push((m, i, j));
        }
    }
    if !c.is_zero() {
        out.push((c, w));
    }
}

/// Right-hand side of `[S_{(m)}^{ij}, S_{(n)}^{kl}]` as formal S-words.
///
/// `with_correction` adds the trailing `θ_0 θ^j θ^i` sum (quantum only).
pub fn s_mode_rhs_formal<C: Scalar>(
    form: ModeForm,
    with_correction: bool,
    sig: &ThetaSignature,
    m: u32,
    n: u32,
    (i, j, k, l): (usize, usize, usize, usize),
) -> Vec<FormalTerm<C>> {
    let mut out = Vec::new();
    let (bi, bj, bk, bl) = (sig.bar(i), sig.bar(j), sig.bar(k), sig.bar(l));
    let th = |x: usize| sig.th::<C>(x);
    let t0 = sig.th0::<C>();
    for r in 0..m.min(n) {
        let b = m + n - r - 1;
        push_word(&mut out, C::one(), &[(r, k, j), (b, i, l)]);
        push_word(&mut out, -C::one(), &[(b, k, j), (r, i, l)]);
    }
    let range = match form {
        ModeForm::Printed => 0..m.min(n),
        ModeForm::Corrected => 0..m,
    };
    for r in range {
        let b = m + n - r - 1;
        let sg = match form {
            ModeForm::Printed => sign::<C>((n + r) as i64),
            ModeForm::Corrected => sign::<C>((m + r) as i64),
        } * t0.clone();
        push_word(&mut out, sg.clone() * th(k) * th(j), &[(r, i, bk), (b, bj, l)]);
        push_word(&mut out, -sg * th(i) * th(l), &[(b, k, bi), (r, bl, j)]);
    }
    if with_correction && m >= 2 {
        let c = t0 * th(j) * th(i);
        for s in 0..=(m - 2) / 2 {
            let lo = m - 2 * s - 2;
            let hi = n + 2 * s;
            push_word(&mut out, c.clone(), &[(lo, k, bi), (hi, bj, l)]);
            push_word(&mut out, -c.clone(), &[(hi, k, bi), (lo, bj, l)]);
        }
    }
    out
}

/// Realise formal S-words in the T algebra (products in the written order).
pub fn realise<C: Scalar>(fam: &TwistedFamily<C>, terms: &[FormalTerm<C>]) -> Element<C> {
    let mut e = Element::zero(fam.family, fam.p);
    for (c, w) in terms {
        let mut acc = Element::scalar(fam.family, fam.p, c.clone());
        for &(m, i, j) in w {
            acc = acc.mul(&fam.s(m, i, j));
            if acc.is_zero() {
                break;
            }
        }
        e.add_scaled(&acc, &C::one());
    }
    e
}

fn index_tuples(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    v.push((i, j, k, l));
                }
            }
        }
    }
    v
}

fn base_report<C: Scalar>(suite: &str, fam: &TwistedFamily<C>) -> Report {
    Report::new(suite).param("N", fam.n).param("p", fam.p).param("theta0", fam.sig.theta0())
}

/// Mode-by-mode check of the S commutation relation.
pub fn verify_rsrs_modes<C: Scalar, R: RelationTable<C> + ?Sized>(
    fam: &TwistedFamily<C>,
    rules: &R,
    max_m: u32,
    max_n: u32,
    form: ModeForm,
) -> Result<Report> {
    if max_m > fam.max_mode() || max_n > fam.max_mode() {
        return Err(Error::InvalidArgument(format!("modes above 2p = {}", fam.max_mode())));
    }
    let classical = fam.family.is_classical();
    let mut jobs = Vec::new();
    for m in 0..=max_m {
        for n in 0..=max_n {
            for t in index_tuples(fam.n) {
                jobs.push((m, n, t));
            }
        }
    }
    let res: Vec<Result<(Vec<i64>, Element<C>)>> = jobs
        .par_iter()
        .map(|&(m, n, (i, j, k, l))| {
            let a = fam.s(m, i, j);
            let b = fam.s(n, k, l);
            let lhs = if classical { leibniz_bracket(&a, &b, rules) } else { commutator(&a, &b, rules)? };
            let rhs = realise(fam, &s_mode_rhs_formal(form, !classical, &fam.sig, m, n, (i, j, k, l)));
            let rhs = if classical { rhs } else { normal_order(&rhs, rules)? };
            let idx = vec![m as i64, n as i64, i as i64, j as i64, k as i64, l as i64];
            Ok((idx, &lhs - &rhs))
        })
        .collect();
    let mut rep = base_report(if classical { "pb-s" } else { "rsrs" }, fam)
        .param("form", format!("{form:?}").to_lowercase())
        .param("max_m", max_m)
        .param("max_n", max_n);
    for r in res {
        let (idx, d) = r?;
        rep.record("mode", idx, d.is_zero(), || format!("lhs - rhs = {d}"));
    }
    rep.sort();
    Ok(rep)
}

/// The cleared series relation
/// `(u^2-v^2)[S^{ij}(u),S^{kl}(v)] = (u+v)E - θ_0(u-v)X + θ_0 θ^i θ^j Y`
/// checked as a finite Laurent polynomial identity.
pub fn verify_rsrs_series<C: Scalar, R: RelationTable<C> + ?Sized>(fam: &TwistedFamily<C>, rules: &R) -> Result<Report> {
    let sig = &fam.sig;
    let th = |x: usize| sig.th::<C>(x);
    let t0 = sig.th0::<C>();
    let one = C::one;
    let u2v2 = Laurent2::from_terms([((2, 0), one()), ((0, 2), -one())]);
    let upv = Laurent2::affine(one(), one(), C::zero());
    let umv = Laurent2::affine(one(), -one(), C::zero());
    let res: Vec<Result<(Vec<i64>, Option<String>)>> = index_tuples(fam.n)
        .par_iter()
        .map(|&(i, j, k, l)| {
            let (bi, bj, bk, bl) = (sig.bar(i), sig.bar(j), sig.bar(k), sig.bar(l));
            let su = |a, b| fam.s_laurent_u(a, b);
            let sv = |a, b| fam.s_laurent_v(a, b);
            // [S^{ij}(u), S^{kl}(v)] mode by mode through the engine
            let mut comm = Laurent2::default();
            for m in 1..=fam.max_mode() {
                for n in 1..=fam.max_mode() {
                    let c = commutator(&fam.s(m, i, j), &fam.s(n, k, l), rules)?;
                    comm.add_assign(&Laurent2::monomial(-(m as i32), -(n as i32), c));
                }
            }
            let lhs = comm.mul_scalar(&u2v2);
            let e = su(k, j).mul(&sv(i, l)).sub(&sv(k, j).mul(&su(i, l)));
            let x = su(i, bk)
                .mul(&sv(bj, l))
                .scale(&(th(k) * th(j)))
                .sub(&sv(k, bi).mul(&su(bl, j)).scale(&(th(i) * th(l))));
            let y = su(k, bi).mul(&sv(bj, l)).sub(&sv(k, bi).mul(&su(bj, l)));
            let mut rhs = e.mul_scalar(&upv);
            rhs.add_assign(&x.mul_scalar(&umv).scale(&-t0.clone()));
            rhs.add_assign(&y.scale(&(t0.clone() * th(i) * th(j))));
            let diff = lhs.sub(&rhs);
            let mut w = None;
            for (key, el) in diff.terms() {
                let z = normal_order(el, rules)?;
                if !z.is_zero() {
                    w = Some(format!("u^{} v^{}: {z}", key.0, key.1));
                    break;
                }
            }
            Ok((vec![i as i64, j as i64, k as i64, l as i64], w))
        })
        .collect();
    let mut rep = base_report("rsrs-series", fam);
    for r in res {
        let (idx, w) = r?;
        match w {
            None => rep.pass("series", idx),
            Some(w) => rep.fail("series", idx, w),
        }
    }
    rep.sort();
    Ok(rep)
}

type OpEntry<C> = Laurent2<Element<C>>;

/// Sign of `Q` in `R'(x) = 1 ∓ Q/x` for the matrix form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RPrimeSign {
    /// `1 - Q/x`
    Printed,
    /// `1 + Q/x`
    Flipped,
}

/// The matrix form `R(u-v) S_1(u) R'(u+v) S_2(v) = S_2(v) R'(u+v) S_1(u) R(u-v)`
/// with `R(x) = 1 - P/x`, `R'(x) = 1 - Q/x`, after clearing `(u-v)(u+v)`.
pub fn verify_rsrs_matrix<C: Scalar, R: RelationTable<C> + ?Sized>(
    fam: &TwistedFamily<C>,
    rules: &R,
    rprime: RPrimeSign,
) -> Result<Report> {
    let n = fam.n;
    let (pf, pp) = (fam.family, fam.p);
    let (p, q) = pq_matrices::<C>(&fam.sig);
    let lift = |m: &Matrix<C>, poly: Laurent2<C>| -> Matrix<OpEntry<C>> {
        // poly * I - m, entries as Laurent polynomials with scalar-element coefficients
        Matrix::from_fn(n * n, n * n, |a, b| {
            let mut e: OpEntry<C> = Laurent2::default();
            if a == b {
                e = poly.map(|c| Element::scalar(pf, pp, c.clone()));
            }
            let c = m.get(a, b);
            if !c.is_zero() {
                e.add_assign(&Laurent2::monomial(0, 0, Element::scalar(pf, pp, -c)));
            }
            e
        })
    };
    let one = C::one;
    let r = lift(&p, Laurent2::affine(one(), -one(), C::zero()));
    let q = match rprime {
        RPrimeSign::Printed => q,
        RPrimeSign::Flipped => q.scale(&-one()),
    };
    let rp = lift(&q, Laurent2::affine(one(), one(), C::zero()));
    // S_1(u) = S(u) ⊗ I, S_2(v) = I ⊗ S(v); basis index (a, b) -> a*n + b
    let s1 = Matrix::from_fn(n * n, n * n, |x, y| {
        let (a, b, c, d) = (x / n, x % n, y / n, y % n);
        if b == d {
            fam.s_laurent_u(a + 1, c + 1)
        } else {
            Laurent2::default()
        }
    });
    let s2 = Matrix::from_fn(n * n, n * n, |x, y| {
        let (a, b, c, d) = (x / n, x % n, y / n, y % n);
        if a == c {
            fam.s_laurent_v(b + 1, d + 1)
        } else {
            Laurent2::default()
        }
    });
    let z: OpEntry<C> = Laurent2::default();
    let lhs = r.mul_with(&s1, &z).mul_with(&rp, &z).mul_with(&s2, &z);
    let rhs = s2.mul_with(&rp, &z).mul_with(&s1, &z).mul_with(&r, &z);
    let diff = lhs.sub(&rhs);
    let cells: Vec<(usize, usize, OpEntry<C>)> = diff.entries().map(|(a, b, e)| (a, b, e.clone())).collect();
    let res: Vec<Result<(Vec<i64>, Option<String>)>> = cells
        .par_iter()
        .map(|(a, b, e)| {
            let mut w = None;
            for (key, el) in e.terms() {
                let z = normal_order(el, rules)?;
                if !z.is_zero() {
                    w = Some(format!("u^{} v^{}: {z}", key.0, key.1));
                    break;
                }
            }
            Ok((vec![*a as i64, *b as i64], w))
        })
        .collect();
    let mut rep = base_report("rsrs-matrix", fam).param("rprime", format!("{rprime:?}").to_lowercase());
    for x in res {
        let (idx, w) = x?;
        match w {
            None => rep.pass("matrix", idx),
            Some(w) => rep.fail("matrix", idx, w),
        }
    }
    rep.sort();
    Ok(rep)
}

/// Modewise symmetry relation: `τ(S_{(k)}) = S_{(k)} + θ_0 S_{(k-1)}` for even
/// `k >= 2`, `τ(S_{(k)}) = S_{(k)}` otherwise.
pub fn verify_symmetry<C: Scalar, R: RelationTable<C> + ?Sized>(fam: &TwistedFamily<C>, rules: &R) -> Result<Report> {
    let t0 = fam.sig.th0::<C>();
    let mut jobs = Vec::new();
    for k in 0..=fam.max_mode() + 1 {
        for i in 1..=fam.n {
            for j in 1..=fam.n {
                jobs.push((k, i, j));
            }
        }
    }
    let res: Vec<Result<(Vec<i64>, Element<C>)>> = jobs
        .par_iter()
        .map(|&(k, i, j)| {
            let mut want = fam.s(k, i, j);
            if k >= 2 && k % 2 == 0 {
                want.add_scaled(&fam.s(k - 1, i, j), &t0);
            }
            let d = &fam.tau_s(k, i, j) - &want;
            let d = if fam.family.is_classical() { d } else { normal_order(&d, rules)? };
            Ok((vec![k as i64, i as i64, j as i64], d))
        })
        .collect();
    let mut rep = base_report("symmetry", fam);
    for r in res {
        let (idx, d) = r?;
        rep.record("tau", idx, d.is_zero(), || d.to_string());
    }
    rep.sort();
    Ok(rep)
}

/// Diagonal rescaling `X^{ab} = d_a e_b S^{ab}` that removes every `θ^i`
/// except `θ_0`: `d = e = θ` on the first half, `e_{n+1} = θ^{n+1}` for odd
/// `N`, and `1` elsewhere. On the first half this is `J`, `K`, `K̄`; the
/// middle row and column give `J_0`, `L`, `L̄`.
pub fn theta_free_gauge(sig: &ThetaSignature) -> (Vec<i8>, Vec<i8>) {
    let n = sig.n();
    let h = n / 2;
    let mut d = vec![1i8; n];
    let mut e = vec![1i8; n];
    for a in 0..h {
        d[a] = sig.theta[a];
        e[a] = sig.theta[a];
    }
    if n % 2 == 1 {
        e[h] = sig.theta[h];
    }
    (d, e)
}

/// Structure constants of the S relation in the θ-free basis.
pub fn theta_free_constants<C: Scalar>(
    sig: &ThetaSignature,
    max_mode: u32,
    form: ModeForm,
) -> BTreeMap<(u32, u32, [usize; 4]), BTreeMap<Vec<(u32, usize, usize)>, C>> {
    let (d, e) = theta_free_gauge(sig);
    let g = |a: usize, b: usize| C::int((d[a - 1] * e[b - 1]) as i64);
    let mut out = BTreeMap::new();
    for m in 1..=max_mode {
        for n in 1..=max_mode {
            for (i, j, k, l) in index_tuples(sig.n()) {
                // [X^{ij}, X^{kl}] = g_ij g_kl [S^{ij}, S^{kl}], and S^{ab} = g_ab X^{ab}
                let pre = g(i, j) * g(k, l);
                let mut coeffs: BTreeMap<Vec<(u32, usize, usize)>, C> = BTreeMap::new();
                for (c, w) in s_mode_rhs_formal::<C>(form, true, sig, m, n, (i, j, k, l)) {
                    let c = w.iter().fold(c * pre.clone(), |acc, &(_, a, b)| acc * g(a, b));
                    let slot = coeffs.entry(w).or_insert_with(C::zero);
                    *slot = slot.clone() + c;
                }
                coeffs.retain(|_, v| !v.is_zero());
                out.insert((m, n, [i, j, k, l]), coeffs);
            }
        }
    }
    out
}

/// Compare θ-free structure constants of two signatures with equal `θ_0`,
/// and confirm the S relation holds in each realisation.
pub fn theta_free_basis<C: Scalar, R: RelationTable<C> + ?Sized>(
    rules: &R,
    a: &ThetaSignature,
    b: &ThetaSignature,
) -> Result<Report> {
    if a.theta0 != b.theta0 || a.n() != b.n() {
        return Err(Error::InvalidSignature("signatures must share N and θ_0".into()));
    }
    let p = rules.p();
    let mut rep = Report::new("theta-free")
        .param("N", a.n())
        .param("p", p)
        .param("theta_a", format!("{:?}", a.theta))
        .param("theta_b", format!("{:?}", b.theta));
    let ca = theta_free_constants::<C>(a, 2 * p, ModeForm::Corrected);
    let cb = theta_free_constants::<C>(b, 2 * p, ModeForm::Corrected);
    for (key, va) in &ca {
        let vb = &cb[key];
        let mut idx = vec![key.0 as i64, key.1 as i64];
        idx.extend(key.2.iter().map(|&x| x as i64));
        rep.record("constants", idx, va == vb, || format!("{va:?} vs {vb:?}"));
    }
    for sig in [a, b] {
        let fam = build_s(rules, sig)?;
        let mut r = verify_rsrs_modes(&fam, rules, 2 * p, 2 * p, ModeForm::Corrected)?;
        r.suite = format!("realisation{:?}", sig.theta);
        rep.absorb(r);
    }
    rep.sort();
    Ok(rep)
}

/// Which argument shift is applied to `sdet` before reading off `c_{2k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdetShift {
    /// `u -> u - (N+1)/2` for `Y^+`, `u -> u + n - 1/2` for `Y^-(2n)`.
    Printed,
    /// `u -> u + (N-1)/2` for both, the centre of the symmetry `u <-> N-1-u`.
    Symmetric,
}

#[derive(Clone, Debug)]
pub struct SdetResult<C: Scalar> {
    /// Shifted `sdet`, prefactor `(1 + n u^{-1})` removed for `Y^-`.
    pub shifted: Series<Element<C>>,
    /// `c_{2k}` for `2k <= D`.
    pub centre: Vec<Element<C>>,
}

/// `sdet[S(u)] = γ_N(u) qdet T(u) qdet T(N-1-u)`, shifted and normalised.
pub fn sdet<C: Scalar, R: RelationTable<C> + ?Sized>(
    rules: &R,
    sig: &ThetaSignature,
    d: u32,
    shift: SdetShift,
) -> Result<SdetResult<C>> {
    let (n, p, fam) = (rules.n(), rules.p(), rules.family());
    if sig.n() != n {
        return Err(Error::InvalidSignature("signature length differs from N".into()));
    }
    let guard = d + 2;
    let ds = qdet(rules, guard, QdetConvention::Column)?;
    let q = Series::from_terms(guard, ds.iter().enumerate().map(|(k, e)| (k as u32, e.clone())));
    // qdet T(N-1-u) = sum d_k (-1)^k (u - (N-1))^{-k}
    let c = C::int(-(n as i64 - 1));
    let mut qbar = Series::from_terms(guard, [(0, ds[0].clone())]);
    for (k, dk) in ds.iter().enumerate().skip(1) {
        let ex = series_shift_expand(k as u32, &c, guard)?;
        let sg = sign::<C>(k as i64);
        qbar = qbar.add(&Series::from_terms(guard, ex.iter().map(|(t, x)| (t, dk.scale(&(x.clone() * sg.clone()))))))?;
    }
    let mut s = q.mul(&qbar)?;
    let half = C::frac(1, 2);
    if sig.theta0 == -1 {
        // (2u+1)/(2u+1-N) = (1 + u^{-1}/2) / (1 + (1-N) u^{-1}/2)
        let num = Series::from_terms(guard, [(0, C::one()), (1, half.clone())]);
        let den = Series::from_terms(guard, [(0, C::one()), (1, C::int(1 - n as i64) * half.clone())]);
        s = s.mul_scalar_series(&num.mul(&den.inverse()?)?)?;
    }
    let amount = match (shift, sig.theta0) {
        (SdetShift::Printed, 1) => -C::int(n as i64 + 1) * half.clone(),
        _ => C::int(n as i64 - 1) * half.clone(),
    };
    let mut shifted = s.substitute_shift(&amount);
    if sig.theta0 == -1 {
        let nn = C::int((n / 2) as i64);
        let pre = Series::from_terms(guard, [(0, C::one()), (1, nn)]);
        shifted = shifted.mul_scalar_series(&pre.inverse()?)?;
    }
    let mut out = Vec::new();
    for (k, e) in shifted.truncate(d).iter() {
        out.push((k, normal_order(e, rules)?));
    }
    let shifted = Series::from_terms(d, out);
    let centre = (1..=d / 2)
        .map(|k| shifted.coeff(2 * k).cloned().unwrap_or_else(|| Element::zero(fam, p)))
        .collect();
    Ok(SdetResult { shifted, centre })
}

/// Odd shifted coefficients vanish and every `c_{2k}` commutes with every S-mode.
pub fn sdet_center<C: Scalar, R: RelationTable<C> + ?Sized>(
    rules: &R,
    fam: &TwistedFamily<C>,
    d: u32,
    shift: SdetShift,
) -> Result<Report> {
    let res = sdet(rules, &fam.sig, d, shift)?;
    let mut rep = base_report("sdet-center", fam)
        .param("order", d)
        .param("shift", format!("{shift:?}").to_lowercase());
    for k in (1..=d).step_by(2) {
        let z = res.shifted.coeff(k).cloned().unwrap_or_else(|| Element::zero(fam.family, fam.p));
        rep.record("odd-vanishes", vec![k as i64], z.is_zero(), || z.to_string());
    }
    let mut jobs = Vec::new();
    for (k, _) in res.centre.iter().enumerate() {
        for m in 1..=fam.max_mode() {
            for i in 1..=fam.n {
                for j in 1..=fam.n {
                    jobs.push((k, m, i, j));
                }
            }
        }
    }
    let out: Vec<Result<(Vec<i64>, Element<C>)>> = jobs
        .par_iter()
        .map(|&(k, m, i, j)| {
            let c = commutator(&res.centre[k], &fam.s(m, i, j), rules)?;
            Ok((vec![2 * (k as i64 + 1), m as i64, i as i64, j as i64], c))
        })
        .collect();
    for r in out {
        let (idx, c) = r?;
        rep.record("central", idx, c.is_zero(), || c.to_string());
    }
    rep.sort();
    Ok(rep)
}

/// Free generators at level `m`: `N^2` minus the rank of the linear parts
/// of the symmetry relation at that level.
pub fn count_free_modes(sig: &ThetaSignature, p: u32, m: u32) -> Result<usize> {
    if m == 0 || m > 2 * p - 1 {
        return Err(Error::InvalidArgument(format!("level {m} outside 1..=2p-1 = {}", 2 * p - 1)));
    }
    let n = sig.n();
    type Q = crate::Rational;
    let rows: Vec<Vec<Q>> = index_pairs(n)
        .map(|(i, j)| {
            let mut v = vec![Q::int(0); n * n];
            let (bi, bj) = (sig.bar(i), sig.bar(j));
            let c: Q = sign::<Q>(m as i64) * sig.th::<Q>(bi) * sig.th::<Q>(bj);
            v[(i - 1) * n + (j - 1)] += Q::int(1);
            v[(bj - 1) * n + (bi - 1)] -= c;
            v
        })
        .collect();
    Ok(n * n - crate::linalg::rank_of(&rows))
}

/// Cross-check for `m <= p`: rank of the linear parts of `S^{ij}_{(m)}` in T.
pub fn count_free_modes_realised<C: Scalar>(fam: &TwistedFamily<C>, m: u32) -> Result<usize> {
    if m == 0 || m > fam.p {
        return Err(Error::InvalidArgument(format!("level {m} outside 1..=p")));
    }
    let n = fam.n;
    let rows: Vec<Vec<C>> = index_pairs(n)
        .map(|(i, j)| {
            let e = fam.s(m, i, j);
            index_pairs(n).map(|(a, b)| e.coeff(&[Gen::new(m, a, b)])).collect()
        })
        .collect();
    Ok(crate::linalg::rank_of(&rows))
}

fn index_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (1..=n).map(move |j| (i, j)))
}

/// Expected dimension of level `m`: `N(N∓1)/2` for odd `m`, `N(N±1)/2` for even.
pub fn expected_level_dim(n: usize, theta0: i8, m: u32) -> usize {
    let plus = (m % 2 == 0) == (theta0 == 1);
    if plus {
        n * (n + 1) / 2
    } else {
        n * (n - 1) / 2
    }
}

/// Classical twisted checks over a classical T table.
///
/// Runs the mode brackets in both forms, then builds `S' = (S + τS)/2` and
/// re-runs them with `S'`, plus `S'(u) - S'(-u) = S(u) - S(-u)` and
/// `τ(S') = S'` modewise.
pub fn classical_twisted<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, sig: &ThetaSignature) -> Result<Report> {
    if rules.family() != Family::ClassicalT {
        return Err(Error::InvalidArgument("classical twisted checks need a classical T table".into()));
    }
    let fam = build_s(rules, sig)?;
    let mut rep = base_report("classical-twisted", &fam);
    let top = fam.max_mode();
    let corrected = verify_rsrs_modes(&fam, rules, top, top, ModeForm::Corrected)?;
    let printed = verify_rsrs_modes(&fam, rules, top, top, ModeForm::Printed)?;
    rep.note(format!(
        "printed mode form: {} of {} checks fail",
        printed.failure_count(),
        printed.checks.len()
    ));
    let mut c = corrected;
    c.suite = "S".into();
    rep.absorb(c);
    // S' = (S + τS)/2
    let half = C::frac(1, 2);
    let mut primed = fam.clone();
    for k in 0..=top {
        for i in 1..=fam.n {
            for j in 1..=fam.n {
                let e = (&fam.s(k, i, j) + &fam.tau_s(k, i, j)).scale(&half);
                primed.modes[k as usize][(i - 1) * fam.n + (j - 1)] = e;
            }
        }
    }
    let mut c2 = verify_rsrs_modes(&primed, rules, top, top, ModeForm::Corrected)?;
    c2.suite = "S'".into();
    rep.absorb(c2);
    let mut trivial = true;
    for k in 0..=top {
        for i in 1..=fam.n {
            for j in 1..=fam.n {
                let idx = vec![k as i64, i as i64, j as i64];
                let a = primed.s(k, i, j);
                let b = fam.s(k, i, j);
                trivial &= a == b;
                if k % 2 == 1 {
                    let d = &a - &b;
                    rep.record("invertible", idx.clone(), d.is_zero(), || d.to_string());
                }
                let d = &primed.tau_s(k, i, j) - &a;
                rep.record("tau-invariant", idx, d.is_zero(), || d.to_string());
            }
        }
    }
    if trivial {
        rep.note("τ(S) = S already holds for the classical S, so S' = S");
    }
    rep.sort();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yangian::t_relation_table;
    use num_rational::BigRational as Q;

    #[test]
    fn signatures() {
        assert_eq!(ThetaSignature::validate(&[1, 1, 1]).unwrap().theta0(), 1);
        assert_eq!(ThetaSignature::validate(&[1, 1, -1, -1]).unwrap().theta0(), -1);
        // (+,-,+,-) satisfies the constraint: both products are -1
        assert_eq!(ThetaSignature::validate(&[1, -1, 1, -1]).unwrap().theta0(), -1);
        assert!(ThetaSignature::validate(&[1, 1, 1, -1]).is_err());
        assert!(ThetaSignature::validate(&[1, 1, -1]).is_err());
        assert_eq!(ThetaSignature::standard(4, -1).unwrap().signs(), &[1, 1, -1, -1]);
    }

    #[test]
    fn tau_examples() {
        let s = ThetaSignature::validate(&[1, 1]).unwrap();
        assert_eq!(tau_on_t(1, 1, 2, &s), (-1, Gen::new(1, 1, 2)));
        let s = ThetaSignature::validate(&[1, -1]).unwrap();
        // θ^2 θ^2 = 1 and (-1)^2 = 1
        assert_eq!(tau_on_t(2, 1, 1, &s), (1, Gen::new(2, 2, 2)));
        for m in 0..=3 {
            for i in 1..=2 {
                for j in 1..=2 {
                    let (s1, g) = tau_on_t(m, i, j, &s);
                    let (s2, h) = tau_on_t(m, g.row as usize, g.col as usize, &s);
                    assert_eq!((s1 * s2, h), (1, Gen::new(m, i, j)));
                }
            }
        }
    }

    #[test]
    fn s_level_one() {
        let tab = t_relation_table::<Q>(2, 1).unwrap();
        let fam = build_s(&tab, &ThetaSignature::validate(&[1, 1]).unwrap()).unwrap();
        let want = &Element::gen(Family::T, 1, 1, 1, 1) - &Element::gen(Family::T, 1, 1, 2, 2);
        assert_eq!(fam.s(1, 1, 1), want);
        assert_eq!(fam.s(0, 1, 2), Element::zero(Family::T, 1));
        assert!(fam.s(3, 1, 1).is_zero());
    }

    #[test]
    fn pq_identities() {
        for n in 1..=4 {
            for t0 in [1, -1] {
                if let Ok(s) = ThetaSignature::standard(n, t0) {
                    assert!(verify_pq::<Q>(&s).is_pass());
                }
            }
        }
    }

    #[test]
    fn level_counts() {
        let s = ThetaSignature::standard(3, 1).unwrap();
        assert_eq!(count_free_modes(&s, 2, 1).unwrap(), 3);
        let s = ThetaSignature::standard(2, -1).unwrap();
        assert_eq!(count_free_modes(&s, 2, 1).unwrap(), 3);
        let s = ThetaSignature::standard(2, 1).unwrap();
        assert_eq!(count_free_modes(&s, 2, 2).unwrap(), 3);
        assert!(count_free_modes(&s, 2, 4).is_err());
    }
}
