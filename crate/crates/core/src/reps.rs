//! Finite-dimensional representations: evaluation modules of `Y(N)`, tensor
//! products, restriction to the twisted Yangians, the `o(N)` evaluation map,
//! lowest weights and their classification data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pbw::{Element, Family};
use crate::poly::UPoly;
use crate::report::Report;
use crate::scalar::{binom, pow, sign, Scalar};
use crate::series::{Laurent2, Series};
use crate::twisted::{pq_matrices, s_mode_rhs_formal, FormalTerm, ModeForm, ThetaSignature};
use crate::yangian::{t_mode_rhs, QuantumOrdering};

/// How `T_{(1)}^{ij}` is matched with the `gl(N)` generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalConvention {
    /// `π(T_{(1)}^{ij}) = ρ(E^{ij})`; the one that satisfies the mode relations.
    Direct,
    /// `π(T_{(1)}^{ij}) = ρ(E^{ji})`
    Transposed,
}

/// Mode matrices of a T- or S-family representation, known up to `cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<C: Scalar> {
    pub family: Family,
    pub n: usize,
    pub dim: usize,
    pub cutoff: u32,
    pub sig: Option<ThetaSignature>,
    modes: BTreeMap<(u32, usize, usize), Matrix<C>>,
    pub provenance: Vec<String>,
}

impl<C: Scalar> Representation<C> {
    pub fn from_modes(
        family: Family,
        n: usize,
        dim: usize,
        cutoff: u32,
        sig: Option<ThetaSignature>,
        modes: BTreeMap<(u32, usize, usize), Matrix<C>>,
        provenance: Vec<String>,
    ) -> Result<Self> {
        if !matches!(family, Family::T | Family::S) {
            return Err(Error::InvalidArgument("representations are of the T or S family".into()));
        }
        if family == Family::S && sig.is_none() {
            return Err(Error::InvalidArgument("an S-family representation needs a signature".into()));
        }
        for m in 1..=cutoff {
            for i in 1..=n {
                for j in 1..=n {
                    match modes.get(&(m, i, j)) {
                        Some(x) if x.rows() == dim && x.cols() == dim => {}
                        _ => return Err(Error::InvalidInput(format!("mode ({m},{i},{j}) missing or of the wrong size"))),
                    }
                }
            }
        }
        Ok(Representation { family, n, dim, cutoff, sig, modes, provenance })
    }

    /// `π(X_{(m)}^{ij})`; level 0 is `δ^{ij}`. Panics above the cutoff.
    pub fn mode(&self, m: u32, i: usize, j: usize) -> Matrix<C> {
        if m == 0 {
            return if i == j { Matrix::identity(self.dim) } else { Matrix::zeros(self.dim, self.dim) };
        }
        assert!(m <= self.cutoff, "mode {m} above cutoff {}", self.cutoff);
        self.modes[&(m, i, j)].clone()
    }

    pub fn modes(&self) -> impl Iterator<Item = (&(u32, usize, usize), &Matrix<C>)> {
        self.modes.iter()
    }

    /// Whether every mode at `level` acts by zero.
    pub fn level_vanishes(&self, level: u32) -> bool {
        (1..=self.n).all(|i| (1..=self.n).all(|j| self.mode(level, i, j).is_zero()))
    }

    /// Same representation with modes above `cutoff` forgotten.
    pub fn truncate(&self, cutoff: u32) -> Self {
        let mut r = self.clone();
        r.cutoff = cutoff.min(self.cutoff);
        r.modes.retain(|k, _| k.0 <= r.cutoff);
        r
    }

    /// Evaluate a written element on the representation (words become products).
    pub fn eval_element(&self, e: &Element<C>) -> Matrix<C> {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (mono, c) in e.terms() {
            let mut acc = Matrix::identity(self.dim).scale(c);
            for g in mono.iter() {
                acc = acc.mul(&self.mode(g.level as u32, g.row as usize, g.col as usize));
            }
            out = out.add(&acc);
        }
        out
    }

    fn eval_formal(&self, terms: &[FormalTerm<C>]) -> Matrix<C> {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (c, w) in terms {
            let mut acc = Matrix::identity(self.dim).scale(c);
            for &(m, i, j) in w {
                acc = acc.mul(&self.mode(m, i, j));
            }
            out = out.add(&acc);
        }
        out
    }

    /// Apply `S^{ij} -> S^{i'j'}` with `i' = N+1-i` for `i ∈ {n, n+1}` (N = 2n).
    pub fn sharp(&self) -> Result<Self> {
        if self.family != Family::S || self.n % 2 == 1 {
            return Err(Error::InvalidArgument("the # automorphism acts on S-family representations with even N".into()));
        }
        let h = self.n / 2;
        let f = |i: usize| if i == h || i == h + 1 { self.n + 1 - i } else { i };
        let mut r = self.clone();
        r.modes = self.modes.keys().map(|&(m, i, j)| ((m, i, j), self.modes[&(m, f(i), f(j))].clone())).collect();
        r.provenance.push("#".into());
        Ok(r)
    }
}

/// `E^{ij}` on `C^N`, indexed `(i-1)*N + (j-1)`.
pub fn gl_fundamental<C: Scalar>(n: usize) -> Vec<Matrix<C>> {
    let mut v = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            v.push(Matrix::unit(n, i, j));
        }
    }
    v
}

/// The one-dimensional representation where every `E^{ij}` acts by zero.
pub fn gl_trivial<C: Scalar>(n: usize) -> Vec<Matrix<C>> {
    vec![Matrix::zeros(1, 1); n * n]
}

fn check_gl<C: Scalar>(n: usize, e: &[Matrix<C>]) -> Result<usize> {
    if e.len() != n * n {
        return Err(Error::InvalidInput(format!("expected {} gl(N) matrices, got {}", n * n, e.len())));
    }
    let d = e[0].rows();
    if e.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::InvalidInput("gl(N) matrices of unequal size".into()));
    }
    let at = |i: usize, j: usize| &e[(i - 1) * n + (j - 1)];
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    let lhs = at(i, j).commutator(at(k, l));
                    let mut rhs = Matrix::zeros(d, d);
                    if j == k {
                        rhs = rhs.add(at(i, l));
                    }
                    if l == i {
                        rhs = rhs.sub(at(k, j));
                    }
                    if lhs != rhs {
                        return Err(Error::InvalidInput(format!("gl(N) relation fails at ({i},{j},{k},{l})")));
                    }
                }
            }
        }
    }
    Ok(d)
}

/// `T(u) = I + ρ(E)/(u - a)`, so `π(T_{(m)}) = a^{m-1} ρ(E)`, kept up to `cutoff`.
pub fn eval_rep_y<C: Scalar>(n: usize, e: &[Matrix<C>], a: &C, cutoff: u32) -> Result<Representation<C>> {
    eval_rep_y_with(n, e, a, cutoff, EvalConvention::Direct)
}

pub fn eval_rep_y_with<C: Scalar>(n: usize, e: &[Matrix<C>], a: &C, cutoff: u32, conv: EvalConvention) -> Result<Representation<C>> {
    let d = check_gl(n, e)?;
    let mut modes = BTreeMap::new();
    for m in 1..=cutoff {
        let c = pow(a, m - 1);
        for i in 1..=n {
            for j in 1..=n {
                let src = match conv {
                    EvalConvention::Direct => &e[(i - 1) * n + (j - 1)],
                    EvalConvention::Transposed => &e[(j - 1) * n + (i - 1)],
                };
                modes.insert((m, i, j), src.scale(&c));
            }
        }
    }
    let prov = vec![format!("eval@{} ({:?})", a.render(), conv).to_lowercase()];
    Representation::from_modes(Family::T, n, d, cutoff, None, modes, prov)
}

/// Coproduct `Δ(T^{ij}(u)) = sum_a T^{ia}(u) ⊗ T^{aj}(u)`.
pub fn tensor_product<C: Scalar>(r1: &Representation<C>, r2: &Representation<C>) -> Result<Representation<C>> {
    if r1.family != Family::T || r2.family != Family::T {
        return Err(Error::InvalidArgument("the twisted Yangians carry no coproduct; tensor T-family representations".into()));
    }
    if r1.n != r2.n {
        return Err(Error::InvalidArgument("tensor factors need the same N".into()));
    }
    let n = r1.n;
    let cutoff = r1.cutoff.min(r2.cutoff);
    let mut modes = BTreeMap::new();
    for m in 1..=cutoff {
        for i in 1..=n {
            for j in 1..=n {
                let mut acc = Matrix::zeros(r1.dim * r2.dim, r1.dim * r2.dim);
                for r in 0..=m {
                    for a in 1..=n {
                        let x = r1.mode(r, i, a);
                        if x.is_zero() {
                            continue;
                        }
                        acc = acc.add(&x.kron(&r2.mode(m - r, a, j)));
                    }
                }
                modes.insert((m, i, j), acc);
            }
        }
    }
    let mut prov = r1.provenance.clone();
    prov.extend(r2.provenance.iter().cloned());
    Representation::from_modes(Family::T, n, r1.dim * r2.dim, cutoff, None, modes, prov)
}

/// `π(S_{(m)}^{ij}) = sum_{r+s=m} sum_a (-1)^s θ^{N+1-j} θ^{N+1-a} π(T_{(r)}^{ia}) π(T_{(s)}^{N+1-j,N+1-a})`.
pub fn restrict_to_twisted<C: Scalar>(r: &Representation<C>, sig: &ThetaSignature) -> Result<Representation<C>> {
    if r.family != Family::T {
        return Err(Error::InvalidArgument("restriction starts from a T-family representation".into()));
    }
    if sig.n() != r.n {
        return Err(Error::InvalidSignature(format!("signature length {} but N = {}", sig.n(), r.n)));
    }
    let n = r.n;
    let mut modes = BTreeMap::new();
    for m in 1..=r.cutoff {
        for i in 1..=n {
            for j in 1..=n {
                let bj = sig.bar(j);
                let mut acc = Matrix::zeros(r.dim, r.dim);
                for k in 0..=m {
                    let s = m - k;
                    for a in 1..=n {
                        let ba = sig.bar(a);
                        let x = r.mode(k, i, a);
                        if x.is_zero() {
                            continue;
                        }
                        let c = sign::<C>(s as i64) * sig.th::<C>(bj) * sig.th::<C>(ba);
                        acc = acc.add(&x.mul(&r.mode(s, bj, ba)).scale(&c));
                    }
                }
                modes.insert((m, i, j), acc);
            }
        }
    }
    let mut prov = r.provenance.clone();
    prov.push(format!("restricted θ0={}", sig.theta0()));
    Representation::from_modes(Family::S, n, r.dim, r.cutoff, Some(sig.clone()), modes, prov)
}

/// Coideal action `S(u) -> T(u) S(u) τ(T(u))`: a `Y(N)` module tensored with a twisted one.
pub fn coideal_product<C: Scalar>(t: &Representation<C>, s: &Representation<C>) -> Result<Representation<C>> {
    if t.family != Family::T || s.family != Family::S || t.n != s.n {
        return Err(Error::InvalidArgument("coideal product takes a T-family and an S-family representation of equal N".into()));
    }
    let sig = s.sig.clone().expect("S family carries a signature");
    let n = t.n;
    let cutoff = t.cutoff.min(s.cutoff);
    let dim = t.dim * s.dim;
    // τ(T)^{bj}_{(q)} = (-1)^q θ^{N+1-j} θ^{N+1-b} T_{(q)}^{N+1-j,N+1-b}
    let tau_t = |q: u32, b: usize, j: usize| -> Matrix<C> {
        let c = sign::<C>(q as i64) * sig.th::<C>(sig.bar(j)) * sig.th::<C>(sig.bar(b));
        t.mode(q, sig.bar(j), sig.bar(b)).scale(&c)
    };
    let mut modes = BTreeMap::new();
    for m in 1..=cutoff {
        for i in 1..=n {
            for j in 1..=n {
                let mut acc = Matrix::zeros(dim, dim);
                for a in 1..=n {
                    for b in 1..=n {
                        for x in 0..=m {
                            for y in 0..=(m - x) {
                                let z = m - x - y;
                                let l = t.mode(x, i, a);
                                if l.is_zero() {
                                    continue;
                                }
                                let rt = tau_t(z, b, j);
                                if rt.is_zero() {
                                    continue;
                                }
                                let sm = s.mode(y, a, b);
                                if sm.is_zero() {
                                    continue;
                                }
                                acc = acc.add(&l.mul(&rt).kron(&sm));
                            }
                        }
                    }
                }
                modes.insert((m, i, j), acc);
            }
        }
    }
    let mut prov = t.provenance.clone();
    prov.extend(s.provenance.iter().cloned());
    Representation::from_modes(Family::S, n, dim, cutoff, Some(sig), modes, prov)
}

/// Block-diagonal sum of two representations of the same kind.
pub fn direct_sum<C: Scalar>(r1: &Representation<C>, r2: &Representation<C>) -> Result<Representation<C>> {
    if r1.family != r2.family || r1.n != r2.n || r1.sig != r2.sig {
        return Err(Error::InvalidArgument("summands must be of the same family, N and signature".into()));
    }
    let cutoff = r1.cutoff.min(r2.cutoff);
    let dim = r1.dim + r2.dim;
    let mut modes = BTreeMap::new();
    for m in 1..=cutoff {
        for i in 1..=r1.n {
            for j in 1..=r1.n {
                let (a, b) = (r1.mode(m, i, j), r2.mode(m, i, j));
                let x = Matrix::from_fn(dim, dim, |p, q| match (p < r1.dim, q < r1.dim) {
                    (true, true) => a.get(p, q),
                    (false, false) => b.get(p - r1.dim, q - r1.dim),
                    _ => C::zero(),
                });
                modes.insert((m, i, j), x);
            }
        }
    }
    let mut prov = r1.provenance.clone();
    prov.push("⊕".into());
    prov.extend(r2.provenance.iter().cloned());
    Representation::from_modes(r1.family, r1.n, dim, cutoff, r1.sig.clone(), modes, prov)
}

/// The submodule generated by `v`, written in a basis of that span.
pub fn cyclic_subrep<C: Scalar>(rep: &Representation<C>, v: &[C]) -> Result<Representation<C>> {
    if v.len() != rep.dim || v.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidArgument("need a nonzero vector of the representation's dimension".into()));
    }
    let mut basis: Vec<Vec<C>> = vec![v.to_vec()];
    let mut frontier = basis.clone();
    while let Some(w) = frontier.pop() {
        for x in rep.modes.values() {
            let y = x.apply(&w);
            let mut trial = basis.clone();
            trial.push(y.clone());
            if crate::linalg::rank_of(&trial) > basis.len() {
                basis.push(y.clone());
                frontier.push(y);
            }
        }
    }
    let k = basis.len();
    // columns of `b` are the basis vectors
    let b = Matrix::from_fn(rep.dim, k, |i, j| basis[j][i].clone());
    let mut modes = BTreeMap::new();
    for (&key, x) in &rep.modes {
        let mut cols = Vec::with_capacity(k);
        for w in &basis {
            let coords = b.solve(&x.apply(w)).ok_or_else(|| Error::Internal("span not invariant".into()))?;
            cols.push(coords);
        }
        modes.insert(key, Matrix::from_fn(k, k, |i, j| cols[j][i].clone()));
    }
    let mut prov = rep.provenance.clone();
    prov.push("cyclic span".into());
    Representation::from_modes(rep.family, rep.n, k, rep.cutoff, rep.sig.clone(), modes, prov)
}

/// One-dimensional `o(2)` module `V(ε)`: `Φ^{11} = ε - 1/2 = -Φ^{22}`.
pub fn v_epsilon<C: Scalar>(eps: &C, cutoff: u32) -> Result<Representation<C>> {
    let sig = ThetaSignature::standard(2, 1)?;
    let w = eps.clone() - C::frac(1, 2);
    let one = |c: C| Matrix::from_rows(vec![vec![c]]);
    let phi = vec![one(w.clone()), one(C::zero()), one(C::zero()), one(-w)];
    let mut r = o_n_evaluation(&sig, &phi, cutoff)?;
    r.provenance = vec![format!("V(ε={})", eps.render())];
    Ok(r)
}

/// A twisted Yangian module at `N = 2` with data `(P, ε)`: the evaluation
/// modules at the roots of `P`, tensored, restricted, and for `Y^+(2)` with
/// `ε != 1/2` acting on `V(ε)` through the coideal map. Roots must be rational.
pub fn realize_two<C: Scalar>(p: &UPoly<C>, eps: Option<&C>, sig: &ThetaSignature, cutoff: u32) -> Result<Representation<C>> {
    if sig.n() != 2 {
        return Err(Error::InvalidArgument("realization is implemented for N = 2".into()));
    }
    let roots = p.rational_roots();
    if !p.is_monic() || roots.len() != p.degree().unwrap_or(0) {
        return Err(Error::InvalidArgument("P must be monic with rational roots".into()));
    }
    let mut t = eval_rep_y(2, &gl_trivial(2), &C::zero(), cutoff)?;
    t.provenance.clear();
    for g in &roots {
        let f = eval_rep_y(2, &gl_fundamental(2), g, cutoff)?;
        t = if t.dim == 1 && t.provenance.is_empty() { f } else { tensor_product(&t, &f)? };
    }
    match (sig.theta0(), eps) {
        (1, Some(e)) if *e != C::frac(1, 2) => coideal_product(&t, &v_epsilon(e, cutoff)?),
        (-1, Some(_)) => Err(Error::InvalidArgument("ε is not a parameter of Y^-(2)".into())),
        _ => restrict_to_twisted(&t, sig),
    }
}

/// Level-one S-matrices of the vector representation of `o(N)` (or `sp(N)`):
/// `Φ^{ij} = E^{ij} - θ^{N+1-i} θ^{N+1-j} E^{N+1-j,N+1-i}`.
pub fn on_vector<C: Scalar>(sig: &ThetaSignature) -> Vec<Matrix<C>> {
    let n = sig.n();
    let mut v = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let (bi, bj) = (sig.bar(i), sig.bar(j));
            let c = sig.th::<C>(bi) * sig.th::<C>(bj);
            v.push(Matrix::unit(n, i, j).sub(&Matrix::unit(n, bj, bi).scale(&c)));
        }
    }
    v
}

/// `Φ` satisfies the level-one S relations: τ-antisymmetry and the `m = n = 1` brackets.
pub fn check_on<C: Scalar>(sig: &ThetaSignature, phi: &[Matrix<C>]) -> Result<usize> {
    let n = sig.n();
    if phi.len() != n * n {
        return Err(Error::InvalidInput(format!("expected {} matrices, got {}", n * n, phi.len())));
    }
    let d = phi[0].rows();
    let mut modes = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            modes.insert((1, i, j), phi[(i - 1) * n + (j - 1)].clone());
        }
    }
    let r = Representation::from_modes(Family::S, n, d, 1, Some(sig.clone()), modes, vec![])?;
    for i in 1..=n {
        for j in 1..=n {
            let c = sig.th::<C>(sig.bar(i)) * sig.th::<C>(sig.bar(j));
            if r.mode(1, i, j).add(&r.mode(1, sig.bar(j), sig.bar(i)).scale(&c)) != Matrix::zeros(d, d) {
                return Err(Error::InvalidInput(format!("Φ is not τ-antisymmetric at ({i},{j})")));
            }
            for k in 1..=n {
                for l in 1..=n {
                    let lhs = r.mode(1, i, j).commutator(&r.mode(1, k, l));
                    let rhs = r.eval_formal(&s_mode_rhs_formal::<C>(ModeForm::Corrected, true, sig, 1, 1, (i, j, k, l)));
                    if lhs != rhs {
                        return Err(Error::InvalidInput(format!("o(N) relation fails at ({i},{j},{k},{l})")));
                    }
                }
            }
        }
    }
    Ok(d)
}

/// `S(u) = I + Φ/(u + θ0/2)`, so `π(S_{(m)}) = (-θ0/2)^{m-1} Φ`. For `o(N)`
/// this is the shift `u + 1/2`; the symplectic case needs `u - 1/2`.
pub fn o_n_evaluation<C: Scalar>(sig: &ThetaSignature, phi: &[Matrix<C>], cutoff: u32) -> Result<Representation<C>> {
    o_n_evaluation_shift(sig, phi, &C::frac(sig.theta0() as i64, 2), cutoff)
}

/// `S(u) = I + Φ/(u + c)`.
pub fn o_n_evaluation_shift<C: Scalar>(sig: &ThetaSignature, phi: &[Matrix<C>], c: &C, cutoff: u32) -> Result<Representation<C>> {
    let d = check_on(sig, phi)?;
    let n = sig.n();
    let mut modes = BTreeMap::new();
    let mc = -c.clone();
    for m in 1..=cutoff {
        let f = pow(&mc, m - 1);
        for i in 1..=n {
            for j in 1..=n {
                modes.insert((m, i, j), phi[(i - 1) * n + (j - 1)].scale(&f));
            }
        }
    }
    Representation::from_modes(Family::S, n, d, cutoff, Some(sig.clone()), modes, vec![format!("o(N) evaluation, shift {}", c.render())])
}

/// The matrix form `R(u-v) S_1(u) R'(u+v) S_2(v) = S_2(v) R'(u+v) S_1(u) R(u-v)`
/// for `S(u) = I + Φ/(u+c)`, cleared of all denominators and compared as a
/// polynomial identity in `u, v`.
pub fn on_evaluation_rational_check<C: Scalar>(sig: &ThetaSignature, phi: &[Matrix<C>], c: &C) -> Result<bool> {
    let d = check_on(sig, phi)?;
    let n = sig.n();
    let (p, q) = pq_matrices::<C>(sig);
    let id_d = Matrix::<C>::identity(d);
    let big = |m: &Matrix<C>| m.kron(&id_d);
    let dim = n * n * d;
    let id = Matrix::<C>::identity(dim);
    let mut phi1 = Matrix::zeros(dim, dim);
    let mut phi2 = Matrix::zeros(dim, dim);
    for i in 1..=n {
        for j in 1..=n {
            let f = &phi[(i - 1) * n + (j - 1)];
            phi1 = phi1.add(&Matrix::unit(n, i, j).kron(&Matrix::identity(n)).kron(f));
            phi2 = phi2.add(&Matrix::identity(n).kron(&Matrix::unit(n, i, j)).kron(f));
        }
    }
    // (au + bv + k) I + M
    let lin = |a: i64, b: i64, k: &C, m: &Matrix<C>| -> Laurent2<Matrix<C>> {
        let mut e = Laurent2::default();
        if a != 0 {
            e.add_assign(&Laurent2::monomial(1, 0, id.scale(&C::int(a))));
        }
        if b != 0 {
            e.add_assign(&Laurent2::monomial(0, 1, id.scale(&C::int(b))));
        }
        e.add_assign(&Laurent2::monomial(0, 0, id.scale(k).add(m)));
        e
    };
    let zero = C::zero();
    let r = lin(1, -1, &zero, &big(&p).scale(&-C::one()));
    let rp = lin(1, 1, &zero, &big(&q));
    let s1 = lin(1, 0, c, &phi1);
    let s2 = lin(0, 1, c, &phi2);
    let lhs = r.mul(&s1).mul(&rp).mul(&s2);
    let rhs = s2.mul(&rp).mul(&s1).mul(&r);
    Ok(lhs.sub(&rhs).is_empty())
}

/// Mode relations of a representation: RTT for T-family, the S commutation
/// and symmetry relations for S-family, over all `m + n - 1 <= cutoff`.
pub fn verify_rep<C: Scalar>(rep: &Representation<C>) -> Report {
    let n = rep.n;
    let mut report = Report::new("reps").param("N", n).param("dim", rep.dim).param("family", rep.family.tag());
    for m in 1..=rep.cutoff {
        for k in 1..=rep.cutoff {
            if m + k - 1 > rep.cutoff {
                continue;
            }
            for i in 1..=n {
                for j in 1..=n {
                    for a in 1..=n {
                        for b in 1..=n {
                            let idx = vec![m as i64, k as i64, i as i64, j as i64, a as i64, b as i64];
                            let lhs = rep.mode(m, i, j).commutator(&rep.mode(k, a, b));
                            let rhs = match rep.family {
                                Family::T => rep.eval_element(&t_mode_rhs::<C>(
                                    QuantumOrdering::Derived,
                                    Family::T,
                                    rep.cutoff,
                                    m,
                                    k,
                                    (i, j, a, b),
                                )),
                                _ => {
                                    let sig = rep.sig.as_ref().expect("S family carries a signature");
                                    rep.eval_formal(&s_mode_rhs_formal::<C>(ModeForm::Corrected, true, sig, m, k, (i, j, a, b)))
                                }
                            };
                            report.record("mode", idx, lhs == rhs, || format!("difference\n{}", lhs.sub(&rhs)));
                        }
                    }
                }
            }
        }
    }
    if rep.family == Family::S {
        let sig = rep.sig.as_ref().expect("S family carries a signature");
        let t0 = sig.th0::<C>();
        for k in 1..=rep.cutoff {
            for i in 1..=n {
                for j in 1..=n {
                    let (bi, bj) = (sig.bar(i), sig.bar(j));
                    let tau = rep.mode(k, bj, bi).scale(&(sign::<C>(k as i64) * sig.th::<C>(bi) * sig.th::<C>(bj)));
                    let mut want = rep.mode(k, i, j);
                    if k % 2 == 0 {
                        want = want.add(&rep.mode(k - 1, i, j).scale(&t0));
                    }
                    report.record("symmetry", vec![k as i64, i as i64, j as i64], tau == want, || "τ(S) mismatch".into());
                }
            }
        }
    }
    report.sort();
    report
}

/// Truncation biconditional: level `m` vanishes iff `m > bound`, for `1 <= m <= cutoff`.
pub fn truncation_report<C: Scalar>(rep: &Representation<C>, bound: u32, id: &str) -> Report {
    let mut r = Report::new("truncation").param("bound", bound).param("cutoff", rep.cutoff);
    for m in 1..=rep.cutoff {
        let vanishes = rep.level_vanishes(m);
        r.record(id, vec![m as i64], vanishes == (m > bound), || {
            format!("level {m}: vanishes = {vanishes}, expected {}", m > bound)
        });
    }
    r
}

/// Lowest weight vector and weight series.
#[derive(Clone, Debug, PartialEq)]
pub struct LowestWeightData<C: Scalar> {
    pub xi: Vec<C>,
    /// `μ^i(u)` for `i = 1..n̄`, cutoff equal to the representation's.
    pub mu: Vec<Series<C>>,
    /// Degree of the normal form of each `μ^i`, when it terminates within the cutoff.
    pub degrees: Vec<Option<usize>>,
    pub n: usize,
    pub theta0: i8,
}

/// Outcome of the lowest-vector search.
#[derive(Clone, Debug, PartialEq)]
pub enum Extraction<C: Scalar> {
    Lowest(LowestWeightData<C>),
    /// The joint kernel has this dimension (> 1).
    Reducible(usize),
    NoLowestVector,
}

pub fn nbar(n: usize) -> usize {
    n.div_ceil(2)
}

pub fn lowest_weight_extract<C: Scalar>(rep: &Representation<C>) -> Result<Extraction<C>> {
    if rep.family != Family::S {
        return Err(Error::InvalidArgument("lowest weights are read from S-family representations".into()));
    }
    let sig = rep.sig.as_ref().expect("S family carries a signature");
    let n = rep.n;
    let mut rows = Vec::new();
    for m in 1..=rep.cutoff {
        for i in 1..=n {
            for j in 1..i {
                rows.extend(rep.mode(m, i, j).to_rows());
            }
        }
    }
    let ker = if rows.is_empty() { Matrix::<C>::identity(rep.dim).to_rows() } else { Matrix::from_rows(rows).kernel() };
    match ker.len() {
        0 => return Ok(Extraction::NoLowestVector),
        1 => {}
        k => return Ok(Extraction::Reducible(k)),
    }
    let xi = ker.into_iter().next().unwrap();
    let pivot = xi.iter().position(|c| !c.is_zero()).expect("kernel vector is nonzero");
    let mut mu = Vec::new();
    for i in 1..=nbar(n) {
        let mut coeffs = vec![(0u32, C::one())];
        for m in 1..=rep.cutoff {
            let v = rep.mode(m, i, i).apply(&xi);
            let lam = v[pivot].clone() / xi[pivot].clone();
            if v.iter().zip(&xi).any(|(a, b)| *a != lam.clone() * b.clone()) {
                return Ok(Extraction::NoLowestVector);
            }
            coeffs.push((m, lam));
        }
        mu.push(Series::from_terms(rep.cutoff, coeffs));
    }
    let degrees = mu.iter().map(|s| normal_form_degree(s, sig)).collect();
    Ok(Extraction::Lowest(LowestWeightData { xi, mu, degrees, n, theta0: sig.theta0() }))
}

/// Degree `d_i` of the normal form: `μ` itself for `Y^-(2n)` and `Y^+(2n+1)`,
/// `(1 + u^{-1}/2) μ` of degree `2d+1` for `Y^+(2n)`.
fn normal_form_degree<C: Scalar>(mu: &Series<C>, sig: &ThetaSignature) -> Option<usize> {
    let even_plus = sig.n() % 2 == 0 && sig.theta0() == 1;
    let s = if even_plus {
        mu.mul(&Series::from_terms(mu.cutoff(), [(0, C::one()), (1, C::frac(1, 2))])).ok()?
    } else {
        mu.clone()
    };
    let top = (0..=s.cutoff()).rev().find(|&k| !s.at(k).is_zero())? as usize;
    if top as u32 >= s.cutoff() {
        return None;
    }
    if even_plus {
        (top % 2 == 1).then(|| (top - 1) / 2)
    } else {
        Some(top)
    }
}

/// Classification parameter `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Epsilon {
    Case(u8),
    /// Free parameter of `Y^+(2)`, rendered exactly.
    Value(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationData<C: Scalar> {
    /// Indices `i` of the polynomials in `p`.
    pub labels: Vec<usize>,
    pub p: Vec<UPoly<C>>,
    /// `dg(P_i)`; for a polynomial read off a `μ(-u)/μ(u)` rule this is half
    /// the degree of the symmetric solution `Q`.
    pub degrees: Vec<usize>,
    pub epsilon: Epsilon,
    /// Opaque overall scalar series; the first lowest-weight component.
    pub rho: Series<C>,
    pub notes: Vec<String>,
}

/// Which form of the `Y^+(2)` rule to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlusTwoRule {
    /// `μ(u)/μ(-u) = (2u+1)(u+ε)/((2u-1)(u-ε)) · P(u+1)/P(u)`
    Printed,
    /// `μ(-u)/μ(u) = (2u+1)(u-ε)/((2u-1)(u+ε)) · Q(u+1)/Q(u)`, oriented like
    /// the other `μ(-u)/μ(u)` rules; the trivial `V(ε)` has `ε = 1/2`.
    Corrected,
}

/// `(c0 + c1 u^{-1}) s(u)` at the same cutoff.
fn times_linear<C: Scalar>(s: &Series<C>, c0: C, c1: C) -> Series<C> {
    s.mul(&Series::from_terms(s.cutoff(), [(0, c0), (1, c1)])).expect("same cutoff")
}

/// Coefficient of `u^e` in `s(u) Q(u)`, for a polynomial `Q` in `u`, from the coefficients known up to the cutoff.
fn coef<C: Scalar>(s: &Series<C>, q: &[C], e: i64) -> C {
    let mut acc = C::zero();
    for (k, qk) in q.iter().enumerate() {
        let n = k as i64 - e;
        if n >= 0 && n <= s.cutoff() as i64 {
            acc = acc + qk.clone() * s.at(n as u32);
        }
    }
    acc
}

/// Row of the linear map `P -> coef_e(A P(u+1) - B P(u))` on the coefficient vector of `P` (degree `d`).
fn ratio_row<C: Scalar>(a: &Series<C>, b: &Series<C>, d: usize, e: i64) -> Vec<C> {
    (0..=d)
        .map(|k| {
            // P = u^k: P(u+1) = sum_t C(k,t) u^t
            let shifted: Vec<C> = (0..=k).map(|t| binom::<C>(k as i64, t as i64)).collect();
            let mut unit = vec![C::zero(); k + 1];
            unit[k] = C::one();
            coef(a, &shifted, e) - coef(b, &unit, e)
        })
        .collect()
}

/// Monic `P` of least degree `<= dmax` with `A(u) P(u+1) = B(u) P(u)` on every
/// power the cutoff determines; `None` when there is none or it is not unique.
pub fn solve_ratio<C: Scalar>(a: &Series<C>, b: &Series<C>, dmax: usize) -> Option<UPoly<C>> {
    let dc = a.cutoff().min(b.cutoff()) as i64;
    for d in 0..=dmax {
        if d as i64 > dc / 2 {
            break;
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for e in (d as i64 - dc)..=(d as i64) {
            let row = ratio_row(a, b, d, e);
            rhs.push(-row[d].clone());
            rows.push(row[..d].to_vec());
        }
        if d == 0 {
            if rhs.iter().all(|c| c.is_zero()) {
                return Some(UPoly::one());
            }
            continue;
        }
        let m = Matrix::from_rows(rows);
        if let Some(x) = m.solve(&rhs) {
            if m.rank() < d {
                return None;
            }
            let mut c = x;
            c.push(C::one());
            return Some(UPoly::new(c));
        }
    }
    None
}

/// `Y^+(2)`: find `(P, ε)` from `X(1 - ε u^{-1}) P(u) = Y(1 + ε u^{-1}) P(u+1)`.
fn solve_plus_two<C: Scalar>(mu: &Series<C>, rule: PlusTwoRule, dmax: usize) -> Option<(UPoly<C>, C)> {
    match rule {
        PlusTwoRule::Printed => solve_plus_two_printed(mu, dmax),
        // the corrected rule is the printed one for μ(-u) and -ε
        PlusTwoRule::Corrected => solve_plus_two_printed(&mu.negate_argument(), dmax).map(|(p, e)| (p, -e)),
    }
}

fn solve_plus_two_printed<C: Scalar>(mu: &Series<C>, dmax: usize) -> Option<(UPoly<C>, C)> {
    let neg = mu.negate_argument();
    // μ(u)(2u-1)(u-ε)P(u) = μ(-u)(2u+1)(u+ε)P(u+1), divided by u^2
    let x = times_linear(mu, C::int(2), -C::one());
    let y = times_linear(&neg, C::int(2), C::one());
    let dc = mu.cutoff() as i64;
    for d in 0..=dmax {
        if d as i64 > dc / 2 {
            break;
        }
        // unknowns: p_0..p_{d-1}, then q_0..q_d with q = ε p
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for e in (d as i64 - dc + 1)..=(d as i64) {
            // X P(u) - Y P(u+1)  -  u^{-1} (X q(u) + Y q(u+1))
            let mut row = Vec::with_capacity(2 * d + 1);
            let mut constant = C::zero();
            for k in 0..=d {
                let shifted: Vec<C> = (0..=k).map(|t| binom::<C>(k as i64, t as i64)).collect();
                let mut unit = vec![C::zero(); k + 1];
                unit[k] = C::one();
                let v = coef(&x, &unit, e) - coef(&y, &shifted, e);
                if k == d {
                    constant = v;
                } else {
                    row.push(v);
                }
            }
            for k in 0..=d {
                let shifted: Vec<C> = (0..=k).map(|t| binom::<C>(k as i64, t as i64)).collect();
                let mut unit = vec![C::zero(); k + 1];
                unit[k] = C::one();
                // u^{-1} shifts the exponent: coefficient of u^e in u^{-1} F is coef_{e+1}(F)
                row.push(-(coef(&x, &unit, e + 1) + coef(&y, &shifted, e + 1)));
            }
            rows.push(row);
            rhs.push(-constant);
        }
        let m = Matrix::from_rows(rows);
        if let Some(sol) = m.solve(&rhs) {
            if m.rank() < 2 * d + 1 {
                return None;
            }
            let eps = sol[2 * d].clone();
            let mut pc: Vec<C> = sol[..d].to_vec();
            pc.push(C::one());
            let consistent = (0..=d).all(|k| sol[d + k] == eps.clone() * pc[k].clone());
            if !consistent {
                return None;
            }
            return Some((UPoly::new(pc), eps));
        }
    }
    None
}

/// `μ_#` from `(1 + u^{-1}/2) μ = prod (1 - λ_k u^{-1})` by trading the factor
/// of `λ*` for `1 + (λ* + 1) u^{-1}`; one candidate per distinct rational root.
pub fn mu_sharp_candidates<C: Scalar>(mu: &Series<C>) -> Vec<Series<C>> {
    let nf = times_linear(mu, C::one(), C::frac(1, 2));
    let Some(top) = (0..=nf.cutoff()).rev().find(|&k| !nf.at(k).is_zero()) else { return vec![] };
    if top >= nf.cutoff() {
        return vec![];
    }
    // prod (u - λ) = u^top * nf(u)
    let poly = UPoly::new((0..=top).map(|k| nf.at(top - k)).collect());
    let mut roots = poly.rational_roots();
    if roots.len() != top as usize {
        return vec![];
    }
    roots.dedup();
    roots
        .into_iter()
        .filter_map(|lam| {
            let num = Series::from_terms(mu.cutoff(), [(0, C::one()), (1, lam.clone() + C::one())]);
            let den = Series::from_terms(mu.cutoff(), [(0, C::one()), (1, -lam)]).inverse().ok()?;
            mu.mul(&num).ok()?.mul(&den).ok()
        })
        .collect()
}

/// Split a solution `Q` of a `μ(-u)/μ(u)` rule, symmetric under `u -> 1-u`, as
/// `Q(u) = (-1)^d P(u) P(1-u)`. The roots pair off as `{γ, 1-γ}`; the
/// representative `γ >= 1/2` is kept. `None` when `Q` is not of that shape
/// over the scalars.
pub fn symmetric_half<C: Scalar>(q: &UPoly<C>) -> Option<UPoly<C>> {
    let deg = q.degree()?;
    if deg % 2 == 1 || q.compose_affine(&-C::one(), &C::one()) != *q {
        return None;
    }
    let mut roots = q.rational_roots();
    if roots.len() != deg {
        return None;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("rationals are ordered"));
    let half = C::frac(1, 2);
    let mid = roots.iter().filter(|r| **r == half).count();
    let mut kept: Vec<C> = roots.into_iter().filter(|r| *r > half).collect();
    kept.extend(std::iter::repeat_n(half, mid / 2));
    let p = crate::poly::monic_from_roots(&kept);
    let back = p.mul(&p.compose_affine(&-C::one(), &C::one())).scale(&sign::<C>((deg / 2) as i64));
    (back == *q).then_some(p)
}

/// Classification data from a lowest weight, per the ratio rules.
pub fn classify<C: Scalar>(lw: &LowestWeightData<C>, sig: &ThetaSignature) -> Result<ClassificationData<C>> {
    classify_with(lw, sig, PlusTwoRule::Corrected)
}

pub fn classify_with<C: Scalar>(lw: &LowestWeightData<C>, sig: &ThetaSignature, rule: PlusTwoRule) -> Result<ClassificationData<C>> {
    let n_full = sig.n();
    let n = n_full / 2;
    let mu = &lw.mu;
    let dmax = mu[0].cutoff() as usize / 2;
    let fail = |what: String| Error::InvalidInput(format!("classification failed: {what}"));
    let mut cd = ClassificationData {
        labels: vec![],
        p: vec![],
        degrees: vec![],
        epsilon: Epsilon::Case(1),
        rho: mu[0].clone(),
        notes: vec![],
    };
    let push_plain = |cd: &mut ClassificationData<C>, i: usize, p: UPoly<C>| {
        cd.labels.push(i);
        cd.degrees.push(p.degree().unwrap_or(0));
        cd.p.push(p);
    };
    let push_sym = |cd: &mut ClassificationData<C>, i: usize, q: UPoly<C>| {
        cd.labels.push(i);
        let d = q.degree().unwrap_or(0);
        cd.degrees.push(d.div_ceil(2));
        match symmetric_half(&q) {
            Some(h) => cd.p.push(h),
            None => {
                cd.notes.push(format!("P_{i} kept as the symmetric solution Q = (-1)^d P(u) P(1-u)"));
                cd.p.push(q);
            }
        }
    };
    // P_i from μ^{i+1}/μ^i = P_i(u+1)/P_i(u), i = 1..upto-1; `last` replaces μ^upto
    let base = |cd: &mut ClassificationData<C>, upto: usize, last: Option<&Series<C>>| -> Result<()> {
        for i in 1..upto {
            let hi = if i + 1 == upto { last.unwrap_or(&mu[i]) } else { &mu[i] };
            let p = solve_ratio(&mu[i - 1], hi, dmax).ok_or_else(|| fail(format!("no polynomial P_{i}")))?;
            push_plain(cd, i, p);
        }
        Ok(())
    };
    if n_full % 2 == 0 && sig.theta0() == -1 {
        base(&mut cd, n, None)?;
        let m = &mu[n - 1];
        let q = solve_ratio(m, &m.negate_argument(), dmax).ok_or_else(|| fail(format!("no polynomial P_{n}")))?;
        push_sym(&mut cd, n, q);
        return Ok(cd);
    }
    if n_full == 2 {
        let (q, eps) = solve_plus_two(&mu[0], rule, dmax).ok_or_else(|| fail("no (P, ε) for Y^+(2)".into()))?;
        if q.eval(&-eps.clone()).is_zero() {
            cd.notes.push("P(-ε) = 0".into());
        }
        match rule {
            PlusTwoRule::Corrected => push_sym(&mut cd, 1, q),
            PlusTwoRule::Printed => push_plain(&mut cd, 1, q),
        }
        cd.epsilon = Epsilon::Value(eps.render());
        return Ok(cd);
    }
    if n_full % 2 == 0 {
        // Y^+(2n), n > 1: ε = 1..4
        let m = &mu[n - 1];
        let sharps = mu_sharp_candidates(m);
        for eps in 1u8..=4 {
            let half = eps % 2 == 0;
            let cands: Vec<Series<C>> = if eps <= 2 { vec![m.clone()] } else { sharps.clone() };
            for mn in cands {
                let mut trial = cd.clone();
                if base(&mut trial, n, Some(&mn)).is_err() {
                    continue;
                }
                // (2u-1)/(2u+1) μ(-u)/μ(u) = Q(u+1)/Q(u), cleared of u
                let (a, b) = if half {
                    (times_linear(&mn, C::int(2), C::one()), times_linear(&mn.negate_argument(), C::int(2), -C::one()))
                } else {
                    (mn.clone(), mn.negate_argument())
                };
                let Some(q) = solve_ratio(&a, &b, dmax) else { continue };
                let mut e = eps;
                if eps == 3 && !q.eval(&C::frac(1, 2)).is_zero() {
                    trial.notes.push("ε = 3 identified with ε = 1 since P_n(1/2) != 0".into());
                    e = 1;
                }
                push_sym(&mut trial, n, q);
                trial.epsilon = Epsilon::Case(e);
                return Ok(trial);
            }
        }
        return Err(fail("no ε case matches".into()));
    }
    // Y^+(2n+1): P_1..P_{n-1} from the base ratios, P_{n̄} from μ^{n̄}/μ^n
    let nb = n + 1;
    base(&mut cd, n, None)?;
    for eps in 1u8..=2 {
        let num = if eps == 2 { times_linear(&mu[nb - 1], C::int(2), C::zero()) } else { mu[nb - 1].clone() };
        let den = if eps == 2 { times_linear(&mu[n - 1], C::int(2), C::one()) } else { mu[n - 1].clone() };
        if let Some(pl) = solve_ratio(&den, &num, dmax) {
            push_plain(&mut cd, nb, pl);
            cd.epsilon = Epsilon::Case(eps);
            return Ok(cd);
        }
    }
    Err(fail("no ε case matches".into()))
}

/// `u^s λ_i(u) = prod_{k<=i} P_k(u) prod_{k>i} P_k(u+1)` for `i <= n`, and
/// `prod_k P_k(u+1)` for `i > n`; returns the `N` series (cutoff `s+2`) and `s`.
pub fn build_lambda<C: Scalar>(ps: &[UPoly<C>], n_full: usize) -> Result<(Vec<Series<C>>, usize)> {
    if ps.iter().any(|p| !p.is_monic()) {
        return Err(Error::InvalidArgument("polynomials must be monic".into()));
    }
    let n = ps.len();
    let s: usize = ps.iter().map(|p| p.degree().unwrap_or(0)).sum();
    let one = C::one();
    let mut out = Vec::new();
    for i in 1..=n_full {
        let mut prod = UPoly::one();
        for (k, p) in ps.iter().enumerate() {
            let k = k + 1;
            prod = prod.mul(&if i <= n && k <= i { p.clone() } else { p.shift(&one) });
        }
        // u^{-s} prod(u) as a series in u^{-1}
        let cut = s as u32 + 2;
        let terms = (0..=s).map(|t| (t as u32, prod.coeff(s - t)));
        out.push(Series::from_terms(cut, terms));
    }
    Ok((out, s))
}

/// Whether the classification data descends to the truncated algebra at level `p`.
pub fn w_admissibility<C: Scalar>(cd: &ClassificationData<C>, sig: &ThetaSignature, p: u32) -> bool {
    let total: usize = cd.degrees.iter().sum();
    let within = 2 * total <= p as usize;
    if sig.n() == 2 && sig.theta0() == 1 {
        return within && cd.epsilon == Epsilon::Value(C::frac(1, 2).render());
    }
    within && matches!(cd.epsilon, Epsilon::Case(1) | Epsilon::Case(3))
}

/// Representation checks at `N` with signature `sig`: mode relations of
/// evaluation modules and their restrictions, the truncation biconditionals
/// for 1- and 2-fold products at the origin, the `o(N)` evaluation map, and
/// for `N = 2` the round trip `P -> module -> P` at each `γ` in `gammas`
/// together with admissibility for `p = 1..=max_p`.
pub fn reps_battery<C: Scalar>(sig: &ThetaSignature, gammas: &[C], max_p: u32) -> Result<Report> {
    let n = sig.n();
    let mut rep = Report::new("reps").param("N", n).param("theta0", sig.theta0());
    let fund = gl_fundamental::<C>(n);
    for a in [C::zero(), C::one()] {
        let t = eval_rep_y(n, &fund, &a, 4)?;
        let mut r = verify_rep(&t);
        r.suite = format!("eval@{}", a.render());
        rep.absorb(r);
        let mut r = verify_rep(&restrict_to_twisted(&t, sig)?);
        r.suite = format!("restricted@{}", a.render());
        rep.absorb(r);
    }
    let one = eval_rep_y(n, &fund, &C::zero(), 6)?;
    let two = tensor_product(&one, &one)?;
    for (k, t) in [(1u32, &one), (2, &two)] {
        let mut r = truncation_report(t, k, "T");
        r.suite = format!("{k}-fold");
        rep.absorb(r);
        let mut r = truncation_report(&restrict_to_twisted(t, sig)?, 2 * k, "S");
        r.suite = format!("{k}-fold");
        rep.absorb(r);
    }
    let mut r = verify_rep(&restrict_to_twisted(&two.truncate(3), sig)?);
    r.suite = "2-fold".into();
    rep.absorb(r);
    let phi = on_vector::<C>(sig);
    let shift = C::frac(sig.theta0() as i64, 2);
    rep.record("evaluation/rational", vec![], on_evaluation_rational_check(sig, &phi, &shift)?, || "cleared RSRS identity fails".into());
    let ev = o_n_evaluation(sig, &phi, 6)?;
    for m in 1..=ev.cutoff {
        rep.record("evaluation/nonvanishing", vec![m as i64], !ev.level_vanishes(m), || format!("level {m} vanishes"));
    }
    let mut r = verify_rep(&ev.truncate(3));
    r.suite = "evaluation".into();
    rep.absorb(r);
    if n == 2 {
        for g in gammas {
            let idx = |extra: i64| {
                let (num, den) = g.parts();
                vec![i64::try_from(num).unwrap_or(i64::MAX), i64::try_from(den).unwrap_or(i64::MAX), extra]
            };
            let p = UPoly::linear_root(g.clone());
            let module = realize_two(&p, None, sig, 8)?;
            let cd = match lowest_weight_extract(&module)? {
                Extraction::Lowest(lw) => classify(&lw, sig),
                other => Err(Error::InvalidInput(format!("{other:?}"))),
            };
            let want = symmetric_half(&p.mul(&p.compose_affine(&-C::one(), &C::one())).scale(&-C::one()));
            match cd {
                Ok(cd) => {
                    rep.record("round-trip/P", idx(0), Some(&cd.p[0]) == want.as_ref(), || format!("got {} for γ = {}", cd.p[0], g.render()));
                    rep.record("round-trip/degree", idx(0), cd.degrees == vec![1], || format!("degrees {:?}", cd.degrees));
                    let odd = match &cd.epsilon {
                        Epsilon::Case(k) => k % 2 == 1,
                        Epsilon::Value(v) => *v == C::frac(1, 2).render(),
                    };
                    for pp in 1..=max_p {
                        let adm = w_admissibility(&cd, sig, pp);
                        rep.record("round-trip/admissible", idx(pp as i64), adm == (pp >= 2 && odd), || format!("p = {pp}: {adm}"));
                    }
                }
                Err(e) => rep.fail("round-trip/P", idx(0), e.to_string()),
            }
        }
    }
    rep.sort();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    #[test]
    fn trivial_rep() {
        let r = eval_rep_y::<Q>(2, &gl_trivial(2), &Q::int(0), 3).unwrap();
        assert!((1..=3).all(|m| r.level_vanishes(m)));
        let adm: Vec<bool> = (0..3).map(|p| w_admissibility(&classify(&extract(&restrict_to_twisted(&r, &ThetaSignature::standard(2, 1).unwrap()).unwrap()), &ThetaSignature::standard(2, 1).unwrap()).unwrap(), &ThetaSignature::standard(2, 1).unwrap(), p)).collect();
        assert_eq!(adm, vec![true; 3]);
        let sig = ThetaSignature::standard(2, -1).unwrap();
        let s = restrict_to_twisted(&r, &sig).unwrap();
        let Extraction::Lowest(lw) = lowest_weight_extract(&s).unwrap() else { panic!() };
        assert_eq!(lw.mu[0], Series::one(3));
        let cd = classify(&lw, &sig).unwrap();
        assert_eq!(cd.p, vec![UPoly::one()]);
        assert_eq!(cd.epsilon, Epsilon::Case(1));
        assert!(w_admissibility(&cd, &sig, 0));
    }

    fn extract(r: &Representation<Q>) -> LowestWeightData<Q> {
        match lowest_weight_extract(r).unwrap() {
            Extraction::Lowest(lw) => lw,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn battery_passes() {
        for (n, t0) in [(2, 1), (2, -1), (3, 1)] {
            let sig = ThetaSignature::standard(n, t0).unwrap();
            let r = reps_battery::<Q>(&sig, &[Q::int(1), Q::frac(7, 3)], 4).unwrap();
            assert!(r.is_pass(), "{r}");
        }
    }

    #[test]
    fn fundamental_relations() {
        let r = eval_rep_y::<Q>(2, &gl_fundamental(2), &Q::int(0), 4).unwrap();
        assert!(verify_rep(&r).is_pass());
        let t = eval_rep_y_with::<Q>(2, &gl_fundamental(2), &Q::int(0), 4, EvalConvention::Transposed).unwrap();
        assert!(!verify_rep(&t).is_pass());
        assert!(!r.level_vanishes(1) && (2..=4).all(|m| r.level_vanishes(m)));
    }

    #[test]
    fn lambda_examples() {
        let g = Q::int(3);
        let (l, s) = build_lambda(&[UPoly::linear_root(g.clone())], 2).unwrap();
        assert_eq!(s, 1);
        assert_eq!(l[0].at(1), -g.clone());
        assert_eq!(l[1].at(1), -(g - Q::int(1)));
        let (l, s) = build_lambda::<Q>(&[UPoly::one()], 2).unwrap();
        assert_eq!((l[0].clone(), s), (Series::one(2), 0));
    }
}
