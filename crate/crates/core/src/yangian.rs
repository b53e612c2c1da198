//! The truncated Yangian `Y_p(N)`: relation tables, RTT checks, quantum
//! determinant, and the classical Poisson variant.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pbw::{commutator, leibniz_bracket, normal_order, DenseTable, Element, Family, Gen, RelationTable};
use crate::report::Report;
use crate::scalar::{sign, Scalar};
use crate::series::{series_shift_expand, Coeff, Laurent2, Series};

/// Order of the two factors in the second term of the quantum mode formula.
///
/// `Derived` is `T_{(r)}^{kj} T_{(b)}^{il} - T_{(b)}^{kj} T_{(r)}^{il}`, which is
/// what the RTT relation gives. `Printed` writes the second term as
/// `T_{(r)}^{il} T_{(b)}^{kj}` and only survives as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumOrdering {
    Derived,
    Printed,
}

/// Level index used by the classical truncated bracket.
///
/// `Printed`: `T_{(m+n-r)}` summed over `r < min(m,n,p)`.
/// `Limit`: `T_{(m+n-r-1)}` over `r < min(m,n)`, the classical limit of the
/// quantum relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalIndex {
    Printed,
    Limit,
}

fn check_np(n: usize, p: u32) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidArgument(format!("need N >= 1 and p >= 1, got N={n}, p={p}")));
    }
    if n > 255 || p > 255 {
        return Err(Error::InvalidArgument("N and p must fit in a byte".into()));
    }
    Ok(())
}

/// `T_{(level)}^{ij}` in family `fam`.
pub fn t<C: Scalar>(fam: Family, p: u32, level: u32, i: usize, j: usize) -> Element<C> {
    Element::gen(fam, p, level, i, j)
}

/// Right-hand side of the quantum mode relation as written products (not normal-ordered).
#[allow(clippy::too_many_arguments)]
pub fn t_mode_rhs<C: Scalar>(
    ord: QuantumOrdering,
    fam: Family,
    p: u32,
    m: u32,
    n: u32,
    (i, j, k, l): (usize, usize, usize, usize),
) -> Element<C> {
    let mut e = Element::zero(fam, p);
    for r in 0..m.min(n) {
        let b = m + n - r - 1;
        e.add_scaled(&t::<C>(fam, p, r, k, j).mul(&t(fam, p, b, i, l)), &C::one());
        let second = match ord {
            QuantumOrdering::Derived => t::<C>(fam, p, b, k, j).mul(&t(fam, p, r, i, l)),
            QuantumOrdering::Printed => t::<C>(fam, p, r, i, l).mul(&t(fam, p, b, k, j)),
        };
        e.add_scaled(&second, &-C::one());
    }
    e
}

/// The quantum table of `Y_p(N)` with the RTT-consistent ordering.
pub fn t_relation_table<C: Scalar>(n: usize, p: u32) -> Result<DenseTable<C>> {
    t_relation_table_with(n, p, QuantumOrdering::Derived)
}

pub fn t_relation_table_with<C: Scalar>(n: usize, p: u32, ord: QuantumOrdering) -> Result<DenseTable<C>> {
    check_np(n, p)?;
    DenseTable::build(Family::T, n, p, |a, b| {
        t_mode_rhs(ord, Family::T, p, a.level as u32, b.level as u32, idx4(a, b))
    })
}

fn idx4(a: Gen, b: Gen) -> (usize, usize, usize, usize) {
    (a.row as usize, a.col as usize, b.row as usize, b.col as usize)
}

/// Classical bracket `{T_{(m)}^{ij}, T_{(n)}^{kl}}` from the chosen presentation.
pub fn classical_mode_rhs<C: Scalar>(
    idx: ClassicalIndex,
    fam: Family,
    p: u32,
    m: u32,
    n: u32,
    (i, j, k, l): (usize, usize, usize, usize),
) -> Element<C> {
    let (bound, shift) = match idx {
        ClassicalIndex::Printed => (m.min(n).min(p), 0),
        ClassicalIndex::Limit => (m.min(n), 1),
    };
    let mut e = Element::zero(fam, p);
    for r in 0..bound {
        let b = m + n - r - shift;
        e.add_scaled(&t::<C>(fam, p, r, k, j).mul(&t(fam, p, b, i, l)), &C::one());
        e.add_scaled(&t::<C>(fam, p, r, i, l).mul(&t(fam, p, b, k, j)), &-C::one());
    }
    e
}

/// Classical table as printed for the truncated presentation.
pub fn classical_table<C: Scalar>(n: usize, p: u32) -> Result<DenseTable<C>> {
    classical_table_with(n, p, ClassicalIndex::Printed)
}

pub fn classical_table_with<C: Scalar>(n: usize, p: u32, idx: ClassicalIndex) -> Result<DenseTable<C>> {
    check_np(n, p)?;
    DenseTable::build(Family::ClassicalT, n, p, |a, b| {
        classical_mode_rhs(idx, Family::ClassicalT, p, a.level as u32, b.level as u32, idx4(a, b))
    })
}

/// `T^{ij}(u + c)` expanded to order `u^{-d}`.
pub fn t_series<C: Scalar>(fam: Family, p: u32, i: usize, j: usize, c: &C, d: u32) -> Result<Series<Element<C>>> {
    let mut s = Series::from_terms(d, [(0, t(fam, p, 0, i, j))]);
    for m in 1..=p.min(d) {
        let g = t::<C>(fam, p, m, i, j);
        let ex = series_shift_expand(m, c, d)?;
        s = s.add(&Series::from_terms(d, ex.iter().map(|(k, x)| (k, g.scale(x)))))?;
    }
    Ok(s)
}

/// `T(u)` as an `N x N` matrix of series; entry `(i, j)` zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSeries<C: Scalar> {
    pub n: usize,
    pub cutoff: u32,
    pub entries: Vec<Series<Element<C>>>,
}

impl<C: Scalar> MatrixSeries<C> {
    pub fn of_t(fam: Family, n: usize, p: u32, d: u32) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                entries.push(t_series(fam, p, i, j, &C::zero(), d)?);
            }
        }
        Ok(MatrixSeries { n, cutoff: d, entries })
    }

    /// One-based entry.
    pub fn entry(&self, i: usize, j: usize) -> &Series<Element<C>> {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }
}

fn report_idx(v: &[usize]) -> Vec<i64> {
    v.iter().map(|&x| x as i64).collect()
}

/// RTT checks for the quantum table `rules`.
///
/// `mode`: the engine commutator of two generators equals the normal-ordered
/// mode formula. `series`: both sides of
/// `(u-v)[T^{ij}(u), T^{kl}(v)] = T^{kj}(u)T^{il}(v) - T^{kj}(v)T^{il}(u)`
/// agree as a finite Laurent polynomial in `u, v`.
pub fn verify_rtt_modes<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, max_level: u32) -> Result<Report> {
    let (n, p) = (rules.n(), rules.p());
    if rules.family() != Family::T {
        return Err(Error::InvalidArgument("RTT check needs the quantum T table".into()));
    }
    if max_level > p + 2 {
        return Err(Error::InvalidArgument(format!("max_level {max_level} exceeds p + 2")));
    }
    let mut rep = Report::new("rtt").param("N", n).param("p", p).param("max_level", max_level);
    let mut tuples = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    tuples.push((i, j, k, l));
                }
            }
        }
    }
    let fam = Family::T;
    let results: Vec<Result<Vec<(String, Vec<i64>, Option<String>)>>> = tuples
        .par_iter()
        .map(|&(i, j, k, l)| {
            let mut out = Vec::new();
            for m in 1..=max_level {
                for nn in 1..=max_level {
                    let lhs = commutator(&t::<C>(fam, p, m, i, j), &t(fam, p, nn, k, l), rules)?;
                    let rhs = normal_order(&t_mode_rhs(QuantumOrdering::Derived, fam, p, m, nn, (i, j, k, l)), rules)?;
                    let d = &lhs - &rhs;
                    let w = (!d.is_zero()).then(|| format!("lhs - rhs = {d}"));
                    out.push(("mode".to_string(), report_idx(&[m as usize, nn as usize, i, j, k, l]), w));
                }
            }
            let diff = rtt_series_difference(rules, (i, j, k, l))?;
            let w = diff.terms().next().map(|((a, b), e)| format!("u^{a} v^{b}: {e}"));
            out.push(("series".to_string(), report_idx(&[i, j, k, l]), w));
            Ok(out)
        })
        .collect();
    for r in results {
        for (id, idx, w) in r? {
            match w {
                None => rep.pass(&id, idx),
                Some(w) => rep.fail(&id, idx, w),
            }
        }
    }
    rep.sort();
    Ok(rep)
}

/// LHS minus RHS of the cleared RTT relation, coefficients normal-ordered.
pub fn rtt_series_difference<C: Scalar, R: RelationTable<C> + ?Sized>(
    rules: &R,
    (i, j, k, l): (usize, usize, usize, usize),
) -> Result<Laurent2<Element<C>>> {
    let (fam, p) = (Family::T, rules.p());
    let mut lhs = Laurent2::default();
    for m in 1..=p {
        for nn in 1..=p {
            let c = commutator(&t::<C>(fam, p, m, i, j), &t(fam, p, nn, k, l), rules)?;
            if c.is_zero() {
                continue;
            }
            let (mi, ni) = (m as i32, nn as i32);
            lhs.add_assign(&Laurent2::from_terms([((1 - mi, -ni), c.clone()), ((-mi, 1 - ni), -&c)]));
        }
    }
    let mut rhs = Laurent2::default();
    for m in 0..=p {
        for nn in 0..=p {
            let prod = t::<C>(fam, p, m, k, j).mul(&t(fam, p, nn, i, l));
            if prod.is_zero() {
                continue;
            }
            let (mi, ni) = (m as i32, nn as i32);
            rhs.add_assign(&Laurent2::from_terms([((-mi, -ni), prod.clone()), ((-ni, -mi), -&prod)]));
        }
    }
    let diff = lhs.sub(&rhs);
    let mut out = Laurent2::default();
    for (key, e) in diff.terms() {
        out.add_assign(&Laurent2::monomial(key.0, key.1, normal_order(e, rules)?));
    }
    Ok(out)
}

/// Which matrix entries the shifted factors of the quantum determinant read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdetConvention {
    /// `sum sgn(s) T^{1 s(1)}(u) T^{2 s(2)}(u-1) ... T^{N s(N)}(u-N+1)`
    Row,
    /// `sum sgn(s) T^{s(1) 1}(u) T^{s(2) 2}(u-1) ... T^{s(N) N}(u-N+1)`
    Column,
}

/// Coefficients `d_0 .. d_D` of the quantum determinant, normal-ordered.
pub fn qdet<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, d: u32, conv: QdetConvention) -> Result<Vec<Element<C>>> {
    if d == 0 {
        return Err(Error::InvalidArgument("qdet order must be at least 1".into()));
    }
    let (n, p, fam) = (rules.n(), rules.p(), rules.family());
    let perms = permutations(n);
    let partial: Vec<Result<Series<Element<C>>>> = perms
        .par_iter()
        .map(|(perm, sgn)| {
            let mut acc = Series::from_terms(d, [(0, Element::scalar(fam, p, sign::<C>(*sgn)))]);
            for (k, &s) in perm.iter().enumerate() {
                let (row, col) = match conv {
                    QdetConvention::Row => (k + 1, s + 1),
                    QdetConvention::Column => (s + 1, k + 1),
                };
                acc = acc.mul(&t_series(fam, p, row, col, &C::int(-(k as i64)), d)?)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Series::new(d);
    for s in partial {
        total = total.add(&s?)?;
    }
    (0..=d)
        .map(|k| match total.coeff(k) {
            Some(e) => normal_order(e, rules),
            None => Ok(Element::zero(fam, p)),
        })
        .collect()
}

/// All permutations of `0..n` with the parity of their inversion count.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if prefix.len() == n {
            let inv = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| prefix[a] > prefix[b]).count();
            out.push((prefix.clone(), inv as i64));
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Centrality of `d_1..d_D` against every generator, mutual commutativity,
/// and `d_1 = sum_i T_{(1)}^{ii}`.
pub fn qdet_centrality<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, d: u32, conv: QdetConvention) -> Result<Report> {
    let (n, p, fam) = (rules.n(), rules.p(), rules.family());
    let ds = qdet(rules, d, conv)?;
    let mut rep = Report::new("qdet-center")
        .param("N", n)
        .param("p", p)
        .param("order", d)
        .param("convention", format!("{conv:?}").to_lowercase());
    let mut trace = Element::zero(fam, p);
    for i in 1..=n {
        trace.add_scaled(&t(fam, p, 1, i, i), &C::one());
    }
    let diff = &ds[1] - &trace;
    rep.record("d1-trace", vec![1], diff.is_zero(), || diff.to_string());
    rep.record("d0-one", vec![0], ds[0] == Element::one(fam, p), || ds[0].to_string());
    let gens = rules.generators(p);
    let jobs: Vec<(usize, Gen)> = (1..=d as usize).flat_map(|k| gens.iter().map(move |g| (k, *g))).collect();
    let res: Vec<Result<(Vec<i64>, Element<C>)>> = jobs
        .par_iter()
        .map(|&(k, g)| {
            let c = commutator(&ds[k], &t(fam, p, g.level as u32, g.row as usize, g.col as usize), rules)?;
            Ok((vec![k as i64, g.level as i64, g.row as i64, g.col as i64], c))
        })
        .collect();
    for r in res {
        let (idx, c) = r?;
        rep.record("central", idx, c.is_zero(), || c.to_string());
    }
    for a in 1..=d as usize {
        for b in a + 1..=d as usize {
            let c = commutator(&ds[a], &ds[b], rules)?;
            rep.record("commuting", vec![a as i64, b as i64], c.is_zero(), || c.to_string());
        }
    }
    rep.sort();
    Ok(rep)
}

/// Compare the printed classical table against the classical limit of the
/// quantum relation, and Jacobi-check both.
pub fn classical_presentations<C: Scalar>(n: usize, p: u32) -> Result<Report> {
    let printed = classical_table_with::<C>(n, p, ClassicalIndex::Printed)?;
    let limit = classical_table_with::<C>(n, p, ClassicalIndex::Limit)?;
    let mut rep = Report::new("classical").param("N", n).param("p", p);
    let mut differing = 0usize;
    for a in printed.generators(p) {
        for b in printed.generators(p) {
            if printed.bracket(a, b) != limit.bracket(a, b) {
                differing += 1;
            }
        }
    }
    rep.note(format!("printed and limit presentations differ on {differing} ordered generator pairs"));
    for (name, tab) in [("limit", &limit), ("printed", &printed)] {
        let mut r = crate::pbw::check_consistency(tab, p)?;
        r.suite = name.to_string();
        rep.absorb(r);
    }
    Ok(rep)
}

/// Leibniz bracket of two classical elements under `rules`.
pub fn poisson<C: Scalar, R: RelationTable<C> + ?Sized>(a: &Element<C>, b: &Element<C>, rules: &R) -> Element<C> {
    leibniz_bracket(a, b, rules)
}

/// Coefficient-wise normal ordering of a series.
pub fn normal_order_series<C: Scalar, R: RelationTable<C> + ?Sized>(s: &Series<Element<C>>, rules: &R) -> Result<Series<Element<C>>> {
    let mut out = Vec::new();
    for (k, e) in s.iter() {
        let x = normal_order(e, rules)?;
        if !Coeff::is_zero(&x) {
            out.push((k, x));
        }
    }
    Ok(Series::from_terms(s.cutoff(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbw::SignFlipped;
    use num_rational::BigRational as Q;

    #[test]
    fn small_brackets() {
        let tab = t_relation_table::<Q>(2, 2).unwrap();
        assert!(tab.bracket(Gen::new(1, 1, 2), Gen::new(1, 1, 2)).is_zero());
        let want = &t::<Q>(Family::T, 2, 1, 1, 1) - &t(Family::T, 2, 1, 2, 2);
        assert_eq!(*tab.bracket(Gen::new(1, 1, 2), Gen::new(1, 2, 1)), want);
        // level-3 product from r = 0 is truncated away
        let b = tab.bracket(Gen::new(2, 1, 1), Gen::new(2, 1, 2));
        assert!(!b.is_zero() && b.max_total_level() <= 3);
    }

    #[test]
    fn rtt_passes_and_flip_is_located() {
        let tab = t_relation_table::<Q>(2, 1).unwrap();
        assert!(verify_rtt_modes(&tab, 1).unwrap().is_pass());
        let bad = SignFlipped::new(&tab, Gen::new(1, 2, 1), Gen::new(1, 1, 2));
        let rep = verify_rtt_modes(&bad, 1).unwrap();
        assert!(rep.failures().any(|c| c.id == "mode" && c.index == vec![1, 1, 1, 2, 2, 1]));
    }

    #[test]
    fn printed_quantum_ordering_breaks_rtt() {
        let tab = t_relation_table_with::<Q>(2, 2, QuantumOrdering::Printed).unwrap();
        let rep = verify_rtt_modes(&tab, 2).unwrap();
        assert!(rep.failures().any(|c| c.id == "series"));
    }

    #[test]
    fn qdet_n1_is_t() {
        let tab = t_relation_table::<Q>(1, 2).unwrap();
        let d = qdet(&tab, 3, QdetConvention::Row).unwrap();
        assert_eq!(d[1], t(Family::T, 2, 1, 1, 1));
        assert_eq!(d[2], t(Family::T, 2, 2, 1, 1));
        assert!(d[3].is_zero());
    }

    #[test]
    fn permutation_signs() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps.iter().filter(|(_, s)| s % 2 == 1).count(), 3);
    }
}
