//! The classical equivalence between folded W-algebras and truncated twisted
//! Yangians, checked in the Yangian basis.
//!
//! `K_{(s)} = (T_{(s)} + (-1)^s T^t_{(s)})/2` is built from the classical
//! table; brackets are taken in the full algebra and then restricted to the
//! fixed locus `T = τT` by substituting `T -> K`. A τ-odd function vanishes on
//! that locus, so no Dirac correction survives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pbw::{leibniz_bracket, Element, Family, Gen, RelationTable};
use crate::report::Report;
use crate::scalar::{pow, sign, Scalar};
use crate::twisted::{pq_matrices, realise, s_mode_rhs_formal, tau_on_t, ModeForm, ThetaSignature, TwistedFamily};

/// Summation ranges for the `P/Q` display of `2{K_1, K_2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoldDisplay {
    /// Both sums over `s < min(q, r)`.
    Printed,
    /// `P`-terms over `s < min(q, r)`, `Q`-terms over `s < q`.
    Corrected,
}

/// The folded generators `K_{(s)}^{ij}` as classical T-elements.
pub struct Folded<C: Scalar> {
    pub n: usize,
    pub p: u32,
    pub sig: ThetaSignature,
    k: Vec<Vec<Element<C>>>,
}

impl<C: Scalar> Folded<C> {
    pub fn new(n: usize, p: u32, sig: &ThetaSignature) -> Result<Self> {
        if sig.n() != n {
            return Err(Error::InvalidSignature(format!("signature length {} but N = {n}", sig.n())));
        }
        let half = C::frac(1, 2);
        let fam = Family::ClassicalT;
        let k = (0..=p)
            .map(|s| {
                let mut row = Vec::with_capacity(n * n);
                for i in 1..=n {
                    for j in 1..=n {
                        let (sg, g) = tau_on_t(s, i, j, sig);
                        let t = Element::gen(fam, p, s, i, j);
                        let tt = Element::gen(fam, p, s, g.row as usize, g.col as usize).scale(&C::int(sg as i64));
                        row.push((&t + &tt).scale(&half));
                    }
                }
                row
            })
            .collect();
        Ok(Folded { n, p, sig: sig.clone(), k })
    }

    /// `K_{(s)}^{ij}`, zero above level `p`.
    pub fn k(&self, s: u32, i: usize, j: usize) -> Element<C> {
        match self.k.get(s as usize) {
            Some(row) => row[(i - 1) * self.n + (j - 1)].clone(),
            None => Element::zero(Family::ClassicalT, self.p),
        }
    }

    /// Restriction to the fixed locus: every `T_{(s)}^{ij}` becomes `K_{(s)}^{ij}`.
    pub fn restrict(&self, e: &Element<C>) -> Element<C> {
        e.substitute(&|g: Gen| self.k(g.level as u32, g.row as usize, g.col as usize))
    }

    /// `K_{(s)} ⊗ I` or `I ⊗ K_{(s)}` on `C^N ⊗ C^N`.
    fn k_op(&self, s: u32, first: bool) -> Matrix<Element<C>> {
        let n = self.n;
        let z = Element::zero(Family::ClassicalT, self.p);
        Matrix::from_fn(n * n, n * n, |x, y| {
            let (a, b, c, d) = (x / n, x % n, y / n, y % n);
            if first && b == d {
                self.k(s, a + 1, c + 1)
            } else if !first && a == c {
                self.k(s, b + 1, d + 1)
            } else {
                z.clone()
            }
        })
    }

    /// `2{K_{(q)}^{ab}, K_{(r)}^{cd}}` restricted to the fixed locus, as an
    /// `N^2 x N^2` operator.
    pub fn bracket_matrix<R: RelationTable<C> + ?Sized>(&self, rules: &R, q: u32, r: u32) -> Matrix<Element<C>> {
        let n = self.n;
        let two = C::int(2);
        let cells: Vec<Element<C>> = (0..n * n * n * n)
            .into_par_iter()
            .map(|idx| {
                let (x, y) = (idx / (n * n), idx % (n * n));
                let (a, c, b, d) = (x / n + 1, x % n + 1, y / n + 1, y % n + 1);
                let br = leibniz_bracket(&self.k(q, a, b), &self.k(r, c, d), rules);
                self.restrict(&br).scale(&two)
            })
            .collect();
        Matrix::from_fn(n * n, n * n, |x, y| cells[x * n * n + y].clone())
    }

    /// The `P/Q` display evaluated on the folded generators.
    pub fn display_matrix(&self, q: u32, r: u32, form: FoldDisplay) -> Matrix<Element<C>> {
        let n = self.n;
        let (fam, p) = (Family::ClassicalT, self.p);
        let z = Element::zero(fam, p);
        let (pm, qm) = pq_matrices::<C>(&self.sig);
        let lift = |m: &Matrix<C>| m.map(|c| Element::scalar(fam, p, c.clone()));
        let (pm, qm) = (lift(&pm), lift(&qm));
        let mut out = Matrix::filled(n * n, n * n, z.clone());
        let total = q + r;
        for s in 0..q.min(r) {
            let (k1, k2) = (self.k_op(s, true), self.k_op(total - s - 1, false));
            let t = pm.mul_with(&k1, &z).mul_with(&k2, &z).sub(&k2.mul_with(&k1, &z).mul_with(&pm, &z));
            out = out.add(&t);
        }
        let qrange = match form {
            FoldDisplay::Printed => 0..q.min(r),
            FoldDisplay::Corrected => 0..q,
        };
        for s in qrange {
            let (k1, k2) = (self.k_op(s, true), self.k_op(total - s - 1, false));
            let t = k1.mul_with(&qm, &z).mul_with(&k2, &z).sub(&k2.mul_with(&qm, &z).mul_with(&k1, &z));
            out = out.add(&t.scale(&sign::<C>((q + s) as i64)));
        }
        out
    }

    /// `S_{(m)} = 2^m K_{(m)}` packaged as a twisted family.
    pub fn rescaled(&self) -> Result<TwistedFamily<C>> {
        let modes = (0..=self.p)
            .map(|m| {
                let c = pow(&C::int(2), m);
                self.k[m as usize].iter().map(|e| e.scale(&c)).collect()
            })
            .collect();
        TwistedFamily::from_modes(&self.sig, self.p, Family::ClassicalT, modes)
    }
}

/// The fold equivalence at `(N, p, θ)` over a classical T table.
///
/// Checks, for `1 <= q, r <= p`:
/// * `display`: `2{K_q, K_r}` against the printed `P/Q` display, entrywise;
/// * `rescaled`: `{S_m, S_n}` against the classical twisted relation with `S_m = 2^m K_m`;
/// * `constraint`: `S^t(-u) - S(u)` against `-2^m φ_{(m)}` modewise, and `φ = 0` on the fixed locus.
///
/// On the fixed locus the `Q`-terms with `min(q,r) <= s < q` cancel in pairs,
/// so both summation ranges agree; the corrected one is tallied in a note.
pub fn fold_equivalence<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, sig: &ThetaSignature) -> Result<Report> {
    if rules.family() != Family::ClassicalT {
        return Err(Error::InvalidArgument("the fold equivalence needs a classical T table".into()));
    }
    let (n, p) = (rules.n(), rules.p());
    let f = Folded::<C>::new(n, p, sig)?;
    let s = f.rescaled()?;
    let mut rep = Report::new("fold-equivalence").param("N", n).param("p", p).param("theta0", sig.theta0());
    let mut alt_fail = 0usize;
    let mut alt_total = 0usize;
    for q in 0..=p {
        for r in 0..=p {
            let lhs = f.bracket_matrix(rules, q, r);
            let rhs = f.display_matrix(q, r, FoldDisplay::Printed);
            let alt = f.display_matrix(q, r, FoldDisplay::Corrected);
            for (x, y, e) in lhs.entries() {
                let idx = vec![q as i64, r as i64, (x / n + 1) as i64, (y / n + 1) as i64, (x % n + 1) as i64, (y % n + 1) as i64];
                let d = e - rhs.at(x, y);
                rep.record("display", idx, d.is_zero(), || d.to_string());
                alt_total += 1;
                alt_fail += usize::from(e != alt.at(x, y));
            }
        }
    }
    rep.note(format!("display with Q-terms over s < q: {alt_fail} of {alt_total} entries differ"));
    // rescaled bracket against the classical twisted relation
    let mut tuples = Vec::new();
    for m in 0..=p {
        for k in 0..=p {
            for i in 1..=n {
                for j in 1..=n {
                    for a in 1..=n {
                        for b in 1..=n {
                            tuples.push((m, k, (i, j, a, b)));
                        }
                    }
                }
            }
        }
    }
    let res: Vec<(Vec<i64>, Option<String>)> = tuples
        .par_iter()
        .map(|&(m, k, ix)| {
            let (i, j, a, b) = ix;
            let lhs = f.restrict(&leibniz_bracket(&s.s(m, i, j), &s.s(k, a, b), rules));
            let terms = s_mode_rhs_formal::<C>(ModeForm::Corrected, false, sig, m, k, ix);
            let rhs = realise(&s, &terms);
            let d = &lhs - &rhs;
            let idx = vec![m as i64, k as i64, i as i64, j as i64, a as i64, b as i64];
            (idx, (!d.is_zero()).then(|| d.to_string()))
        })
        .collect();
    for (idx, w) in res {
        match w {
            None => rep.pass("rescaled", idx),
            Some(w) => rep.fail("rescaled", idx, w),
        }
    }
    // φ_(m) = T_(m) - (-1)^m T^t_(m); with S_(m) = 2^m T_(m) the modes of
    // S^t(-u) - S(u) are -2^m φ_(m)
    let fam = Family::ClassicalT;
    for m in 0..=p {
        let c = pow(&C::int(2), m);
        for i in 1..=n {
            for j in 1..=n {
                let (sg, g) = tau_on_t(m, i, j, sig);
                let tt = Element::gen(fam, p, m, g.row as usize, g.col as usize).scale(&C::int(sg as i64));
                let phi = &Element::gen(fam, p, m, i, j) - &tt;
                let st = tt.scale(&c);
                let lhs = &st - &Element::gen(fam, p, m, i, j).scale(&c);
                let d = &lhs + &phi.scale(&c);
                let idx = vec![m as i64, i as i64, j as i64];
                rep.record("constraint", idx.clone(), d.is_zero(), || d.to_string());
                let on = f.restrict(&phi);
                rep.record("constraint-on-locus", idx, on.is_zero(), || on.to_string());
            }
        }
    }
    rep.sort();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yangian::{classical_table_with, ClassicalIndex};
    use num_rational::BigRational as Q;

    #[test]
    fn level_zero_brackets_vanish() {
        let sig = ThetaSignature::standard(2, -1).unwrap();
        let rules = classical_table_with::<Q>(2, 2, ClassicalIndex::Limit).unwrap();
        let f = Folded::<Q>::new(2, 2, &sig).unwrap();
        assert!(f.bracket_matrix(&rules, 0, 2).is_zero());
        assert!(f.display_matrix(0, 2, FoldDisplay::Corrected).is_zero());
        assert!(f.bracket_matrix(&rules, 1, 0).is_zero());
    }

    #[test]
    fn restriction_is_idempotent() {
        let sig = ThetaSignature::standard(2, 1).unwrap();
        let f = Folded::<Q>::new(2, 2, &sig).unwrap();
        let e = f.k(1, 1, 2).mul(&f.k(2, 2, 2));
        assert_eq!(f.restrict(&e), e);
    }
}
