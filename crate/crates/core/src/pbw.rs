//! PBW words over level-graded generators and normal ordering.
//!
//! Quantum families are rewritten with `ab -> ba + [a,b]` at the first
//! inversion. Classical families keep their monomials sorted (the product is
//! commutative) and brackets are extended as biderivations.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalar::Scalar;
use crate::series::Coeff;

/// `T_{(level)}^{row,col}`, ordered by `(level, row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub level: u8,
    pub row: u8,
    pub col: u8,
}

impl Gen {
    pub fn new(level: u32, row: usize, col: usize) -> Self {
        Gen { level: level as u8, row: row as u8, col: col as u8 }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]^{{{},{}}}", self.level, self.row, self.col)
    }
}

pub type Mono = SmallVec<[Gen; 6]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    T,
    S,
    ClassicalT,
    ClassicalK,
}

impl Family {
    pub fn is_classical(self) -> bool {
        matches!(self, Family::ClassicalT | Family::ClassicalK)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::T => "T",
            Family::S => "S",
            Family::ClassicalT => "classical-T",
            Family::ClassicalK => "classical-K",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Some(match s {
            "T" => Family::T,
            "S" => Family::S,
            "classical-T" => Family::ClassicalT,
            "classical-K" => Family::ClassicalK,
            _ => return None,
        })
    }

    /// Letter used in the text rendering of generators.
    fn letter(self) -> &'static str {
        match self {
            Family::T | Family::ClassicalT => "T",
            Family::S => "S",
            Family::ClassicalK => "K",
        }
    }
}

/// Exact linear combination of monomials, truncated at level `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Element<C> {
    family: Family,
    p: u32,
    terms: BTreeMap<Mono, C>,
}

impl<C: Scalar> Element<C> {
    pub fn zero(family: Family, p: u32) -> Self {
        Element { family, p, terms: BTreeMap::new() }
    }

    pub fn scalar(family: Family, p: u32, c: C) -> Self {
        let mut e = Self::zero(family, p);
        e.push(Mono::new(), c);
        e
    }

    pub fn one(family: Family, p: u32) -> Self {
        Self::scalar(family, p, C::one())
    }

    /// The generator `T_{(level)}^{ij}`: level 0 is `delta^{ij}`, levels above `p` vanish.
    pub fn gen(family: Family, p: u32, level: u32, i: usize, j: usize) -> Self {
        if level == 0 {
            return if i == j { Self::one(family, p) } else { Self::zero(family, p) };
        }
        if level > p {
            return Self::zero(family, p);
        }
        let mut e = Self::zero(family, p);
        e.push(std::iter::once(Gen::new(level, i, j)).collect(), C::one());
        e
    }

    /// Build from raw words. Words with a level above `p` are dropped, and
    /// classical words are sorted.
    pub fn from_terms(family: Family, p: u32, it: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut e = Self::zero(family, p);
        for (m, c) in it {
            e.push(m, c);
        }
        e
    }

    fn push(&mut self, mut m: Mono, c: C) {
        if c.is_zero() || m.iter().any(|g| g.level as u32 > self.p) {
            return;
        }
        if self.family.is_classical() {
            m.sort_unstable();
        }
        add_term(&mut self.terms, m, c);
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[Gen]) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Relabel the family tag without touching the terms.
    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.family, self.p);
        }
        Element {
            family: self.family,
            p: self.p,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    pub fn add_scaled(&mut self, o: &Self, c: &C) {
        for (m, v) in &o.terms {
            add_term(&mut self.terms, m.clone(), v.clone() * c.clone());
        }
    }

    /// Product in the written order; classical words are re-sorted.
    pub fn mul(&self, o: &Self) -> Self {
        let mut e = Self::zero(self.family, self.p.max(o.p));
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let mut m: Mono = a.clone();
                m.extend(b.iter().copied());
                e.push(m, x.clone() * y.clone());
            }
        }
        e
    }

    /// Apply a linear substitution to every generator (used for automorphisms
    /// and projections). Products are taken in the original order.
    pub fn substitute(&self, f: &impl Fn(Gen) -> Self) -> Self {
        let mut out = Self::zero(self.family, self.p);
        for (m, c) in &self.terms {
            let mut acc = Self::scalar(self.family, self.p, c.clone());
            for g in m {
                acc = acc.mul(&f(*g));
            }
            out.add_scaled(&acc, &C::one());
        }
        out
    }

    /// Highest total level among the terms.
    pub fn max_total_level(&self) -> u32 {
        self.terms.keys().map(|m| total_level(m)).max().unwrap_or(0)
    }

    pub fn is_sorted(&self) -> bool {
        self.terms.keys().all(|m| m.windows(2).all(|w| w[0] <= w[1]))
    }
}

fn add_term<C: Scalar>(terms: &mut BTreeMap<Mono, C>, m: Mono, c: C) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let v = e.get().clone() + c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

pub fn total_level(m: &[Gen]) -> u32 {
    m.iter().map(|g| g.level as u32).sum()
}

impl<C: Scalar> Add for &Element<C> {
    type Output = Element<C>;
    fn add(self, o: &Element<C>) -> Element<C> {
        let mut e = self.clone();
        e.p = e.p.max(o.p);
        e.add_scaled(o, &C::one());
        e
    }
}

impl<C: Scalar> Sub for &Element<C> {
    type Output = Element<C>;
    fn sub(self, o: &Element<C>) -> Element<C> {
        let mut e = self.clone();
        e.p = e.p.max(o.p);
        e.add_scaled(o, &-C::one());
        e
    }
}

impl<C: Scalar> Mul for &Element<C> {
    type Output = Element<C>;
    fn mul(self, o: &Element<C>) -> Element<C> {
        Element::mul(self, o)
    }
}

impl<C: Scalar> Neg for &Element<C> {
    type Output = Element<C>;
    fn neg(self) -> Element<C> {
        self.scale(&-C::one())
    }
}

impl<C: Scalar> Coeff for Element<C> {
    type F = C;
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.p = self.p.max(other.p);
        self.add_scaled(other, &C::one());
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scale(&self, c: &C) -> Self {
        Element::scale(self, c)
    }
}

impl<C: Scalar> fmt::Display for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let letter = self.family.letter();
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let word: Vec<String> = m.iter().map(|g| format!("{letter}{g}")).collect();
            match (mag.is_one(), word.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", word.join(" "))?,
                (false, true) => write!(f, "{}", mag.render())?,
                (false, false) => write!(f, "{} {}", mag.render(), word.join(" "))?,
            }
        }
        Ok(())
    }
}

/// Bracket oracle for one algebra family.
pub trait RelationTable<C: Scalar>: Sync + Send {
    fn family(&self) -> Family;
    fn n(&self) -> usize;
    fn p(&self) -> u32;
    /// `[a, b]` for quantum families, `{a, b}` for classical ones.
    fn bracket(&self, a: Gen, b: Gen) -> Cow<'_, Element<C>>;

    /// All generators of level `1..=max_level`, in increasing order.
    fn generators(&self, max_level: u32) -> Vec<Gen> {
        let n = self.n();
        let mut v = Vec::new();
        for l in 1..=max_level.min(self.p()) {
            for i in 1..=n {
                for j in 1..=n {
                    v.push(Gen::new(l, i, j));
                }
            }
        }
        v
    }
}

/// Step budget for one normal-ordering call.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

type Key = (u32, u32, Mono);

fn key(m: Mono) -> Key {
    (total_level(&m), m.len() as u32, m)
}

/// Normal-order `e` with the default step budget.
pub fn normal_order<C: Scalar, R: RelationTable<C> + ?Sized>(e: &Element<C>, rules: &R) -> Result<Element<C>> {
    normal_order_with_budget(e, rules, DEFAULT_BUDGET)
}

/// Rewrite every word into sorted form.
///
/// Pending words are processed from the largest key `(total level, degree,
/// word)` down. A swap keeps the level and degree and makes the word
/// lexicographically smaller; bracket terms have strictly smaller total
/// level. So every popped word is final for its key and the loop terminates
/// for any table whose brackets lower the level.
pub fn normal_order_with_budget<C: Scalar, R: RelationTable<C> + ?Sized>(
    e: &Element<C>,
    rules: &R,
    budget: u64,
) -> Result<Element<C>> {
    if e.family != rules.family() {
        return Err(Error::InvalidArgument(format!(
            "element family {} does not match table family {}",
            e.family.tag(),
            rules.family().tag()
        )));
    }
    if e.family.is_classical() {
        return Ok(e.clone());
    }
    let mut pending: BTreeMap<Key, C> = BTreeMap::new();
    for (m, c) in &e.terms {
        push_key(&mut pending, key(m.clone()), c.clone());
    }
    let mut out = Element::zero(e.family, rules.p().max(e.p));
    let mut steps: u64 = 0;
    while let Some(((_, _, w), c)) = pending.pop_last() {
        steps += 1;
        if steps > budget {
            return Err(Error::Watchdog(budget));
        }
        let Some(t) = (0..w.len().saturating_sub(1)).find(|&t| w[t] > w[t + 1]) else {
            add_term(&mut out.terms, w, c);
            continue;
        };
        let mut swapped = w.clone();
        swapped.swap(t, t + 1);
        push_key(&mut pending, key(swapped), c.clone());
        let br = rules.bracket(w[t], w[t + 1]);
        for (m, d) in &br.terms {
            let mut nw: Mono = SmallVec::with_capacity(w.len() + m.len());
            nw.extend_from_slice(&w[..t]);
            nw.extend_from_slice(m);
            nw.extend_from_slice(&w[t + 2..]);
            push_key(&mut pending, key(nw), c.clone() * d.clone());
        }
    }
    Ok(out)
}

fn push_key<C: Scalar>(pending: &mut BTreeMap<Key, C>, k: Key, c: C) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match pending.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let v = e.get().clone() + c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

/// `[a, b]` normal-ordered, or the Leibniz bracket for classical families.
pub fn commutator<C: Scalar, R: RelationTable<C> + ?Sized>(a: &Element<C>, b: &Element<C>, rules: &R) -> Result<Element<C>> {
    if a.family != rules.family() || b.family != rules.family() {
        return Err(Error::InvalidArgument("family mismatch in commutator".into()));
    }
    if rules.family().is_classical() {
        return Ok(leibniz_bracket(a, b, rules));
    }
    normal_order(&(&a.mul(b) - &b.mul(a)), rules)
}

/// Biderivation extension of the generator bracket.
pub fn leibniz_bracket<C: Scalar, R: RelationTable<C> + ?Sized>(a: &Element<C>, b: &Element<C>, rules: &R) -> Element<C> {
    let p = rules.p();
    let mut out = Element::zero(a.family, p);
    for (x, cx) in &a.terms {
        for (y, cy) in &b.terms {
            let c = cx.clone() * cy.clone();
            for s in 0..x.len() {
                for t in 0..y.len() {
                    let br = rules.bracket(x[s], y[t]);
                    if br.is_zero() {
                        continue;
                    }
                    let mut rest: Mono = SmallVec::new();
                    rest.extend(x.iter().enumerate().filter(|(k, _)| *k != s).map(|(_, g)| *g));
                    rest.extend(y.iter().enumerate().filter(|(k, _)| *k != t).map(|(_, g)| *g));
                    for (m, d) in &br.terms {
                        let mut w = rest.clone();
                        w.extend_from_slice(m);
                        out.push(w, c.clone() * d.clone());
                    }
                }
            }
        }
    }
    out
}

fn gen_index(g: Gen, n: usize) -> usize {
    ((g.level as usize - 1) * n + (g.row as usize - 1)) * n + (g.col as usize - 1)
}

/// Precomputed bracket table, every ordered pair stored independently.
#[derive(Clone, Debug)]
pub struct DenseTable<C> {
    family: Family,
    n: usize,
    p: u32,
    entries: Vec<Element<C>>,
}

struct Partial<'a, C> {
    family: Family,
    n: usize,
    p: u32,
    entries: &'a [Option<Element<C>>],
}

impl<C: Scalar> RelationTable<C> for Partial<'_, C> {
    fn family(&self) -> Family {
        self.family
    }
    fn n(&self) -> usize {
        self.n
    }
    fn p(&self) -> u32 {
        self.p
    }
    fn bracket(&self, a: Gen, b: Gen) -> Cow<'_, Element<C>> {
        let g = self.n * self.n * self.p as usize;
        match &self.entries[gen_index(a, self.n) * g + gen_index(b, self.n)] {
            Some(e) => Cow::Borrowed(e),
            None => panic!("bracket {a} {b} requested before it was built"),
        }
    }
}

impl<C: Scalar> DenseTable<C> {
    /// Fill the table from a raw bracket formula.
    ///
    /// Quantum formulas may emit unsorted quadratic words; they are
    /// normal-ordered with entries of strictly lower level sum, which is why
    /// pairs are processed in increasing order of `level(a) + level(b)`.
    pub fn build(family: Family, n: usize, p: u32, raw: impl Fn(Gen, Gen) -> Element<C> + Sync) -> Result<Self> {
        let g = n * n * p as usize;
        let mut entries: Vec<Option<Element<C>>> = vec![None; g * g];
        let gens: Vec<Gen> = {
            let mut v = Vec::new();
            for l in 1..=p {
                for i in 1..=n {
                    for j in 1..=n {
                        v.push(Gen::new(l, i, j));
                    }
                }
            }
            v
        };
        for sum in 2..=2 * p {
            let pairs: Vec<(Gen, Gen)> = gens
                .iter()
                .flat_map(|a| gens.iter().map(move |b| (*a, *b)))
                .filter(|(a, b)| (a.level + b.level) as u32 == sum)
                .collect();
            let view = Partial { family, n, p, entries: &entries };
            let built: Vec<Result<Element<C>>> = pairs
                .par_iter()
                .map(|(a, b)| {
                    let e = raw(*a, *b);
                    if family.is_classical() {
                        Ok(e)
                    } else {
                        normal_order(&e, &view)
                    }
                })
                .collect();
            for ((a, b), e) in pairs.iter().zip(built) {
                entries[gen_index(*a, n) * g + gen_index(*b, n)] = Some(e?);
            }
        }
        Ok(DenseTable { family, n, p, entries: entries.into_iter().map(|e| e.expect("all pairs built")).collect() })
    }
}

impl<C: Scalar> RelationTable<C> for DenseTable<C> {
    fn family(&self) -> Family {
        self.family
    }
    fn n(&self) -> usize {
        self.n
    }
    fn p(&self) -> u32 {
        self.p
    }
    fn bracket(&self, a: Gen, b: Gen) -> Cow<'_, Element<C>> {
        let g = self.n * self.n * self.p as usize;
        Cow::Borrowed(&self.entries[gen_index(a, self.n) * g + gen_index(b, self.n)])
    }
}

/// A table with the sign of one ordered bracket flipped. Negative control.
pub struct SignFlipped<'a, C: Scalar, R: RelationTable<C> + ?Sized> {
    pub inner: &'a R,
    pub target: (Gen, Gen),
    _c: std::marker::PhantomData<C>,
}

impl<'a, C: Scalar, R: RelationTable<C> + ?Sized> SignFlipped<'a, C, R> {
    pub fn new(inner: &'a R, a: Gen, b: Gen) -> Self {
        SignFlipped { inner, target: (a, b), _c: std::marker::PhantomData }
    }
}

impl<C: Scalar, R: RelationTable<C> + ?Sized> RelationTable<C> for SignFlipped<'_, C, R> {
    fn family(&self) -> Family {
        self.inner.family()
    }
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn p(&self) -> u32 {
        self.inner.p()
    }
    fn bracket(&self, a: Gen, b: Gen) -> Cow<'_, Element<C>> {
        let e = self.inner.bracket(a, b);
        if (a, b) == self.target {
            Cow::Owned(-e.as_ref())
        } else {
            e
        }
    }
}

fn gen_index_vec(g: Gen) -> Vec<i64> {
    vec![g.level as i64, g.row as i64, g.col as i64]
}

/// Antisymmetry of the oracle, plus overlap confluence (quantum) or the
/// Jacobi identity (classical) over all triples of generators up to `max_level`.
pub fn check_consistency<C: Scalar, R: RelationTable<C> + ?Sized>(rules: &R, max_level: u32) -> Result<Report> {
    if max_level > rules.p() {
        return Err(Error::InvalidArgument(format!("max_level {max_level} exceeds p = {}", rules.p())));
    }
    let mut rep = Report::new("consistency")
        .param("family", rules.family().tag())
        .param("N", rules.n())
        .param("p", rules.p())
        .param("max_level", max_level);
    let gens = rules.generators(max_level);
    let fam = rules.family();
    let p = rules.p();
    for &a in &gens {
        for &b in &gens {
            let s = &*rules.bracket(a, b) + &*rules.bracket(b, a);
            let mut idx = gen_index_vec(a);
            idx.extend(gen_index_vec(b));
            rep.record("antisymmetry", idx, s.is_zero(), || s.to_string());
        }
    }
    let mut triples = Vec::new();
    for (x, &a) in gens.iter().enumerate() {
        for (y, &b) in gens.iter().enumerate().skip(x + 1) {
            for &c in gens.iter().skip(y + 1) {
                let _ = (x, y);
                triples.push((a, b, c));
            }
        }
    }
    let checks: Vec<Result<(Vec<i64>, Element<C>)>> = triples
        .par_iter()
        .map(|&(a, b, c)| {
            let ea = Element::gen(fam, p, a.level as u32, a.row as usize, a.col as usize);
            let eb = Element::gen(fam, p, b.level as u32, b.row as usize, b.col as usize);
            let ec = Element::gen(fam, p, c.level as u32, c.row as usize, c.col as usize);
            let mut idx = gen_index_vec(a);
            idx.extend(gen_index_vec(b));
            idx.extend(gen_index_vec(c));
            let diff = if fam.is_classical() {
                let j1 = leibniz_bracket(&ea, &leibniz_bracket(&eb, &ec, rules), rules);
                let j2 = leibniz_bracket(&eb, &leibniz_bracket(&ec, &ea, rules), rules);
                let j3 = leibniz_bracket(&ec, &leibniz_bracket(&ea, &eb, rules), rules);
                &(&j1 + &j2) + &j3
            } else {
                // the word c b a reduced starting from either overlap
                let left = normal_order(&ec.mul(&normal_order(&eb.mul(&ea), rules)?), rules)?;
                let right = normal_order(&normal_order(&ec.mul(&eb), rules)?.mul(&ea), rules)?;
                &left - &right
            };
            Ok((idx, diff))
        })
        .collect();
    let id = if fam.is_classical() { "jacobi" } else { "overlap" };
    for r in checks {
        let (idx, diff) = r?;
        rep.record(id, idx, diff.is_zero(), || diff.to_string());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    /// gl(2) at level one, enough to exercise the rewriting loop.
    fn gl2(family: Family) -> DenseTable<Q> {
        DenseTable::build(family, 2, 1, |a, b| {
            let (i, j, k, l) = (a.row as usize, a.col as usize, b.row as usize, b.col as usize);
            let mut e = Element::zero(family, 1);
            if k == j {
                e.add_scaled(&Element::gen(family, 1, 1, i, l), &Q::int(1));
            }
            if i == l {
                e.add_scaled(&Element::gen(family, 1, 1, k, j), &Q::int(-1));
            }
            e
        })
        .unwrap()
    }

    #[test]
    fn single_rewrite() {
        let t = gl2(Family::T);
        let x = Element::<Q>::gen(Family::T, 1, 1, 2, 1).mul(&Element::gen(Family::T, 1, 1, 1, 2));
        let got = normal_order(&x, &t).unwrap();
        let want = &(&Element::gen(Family::T, 1, 1, 1, 2).mul(&Element::gen(Family::T, 1, 1, 2, 1))
            + &Element::gen(Family::T, 1, 1, 2, 2))
            - &Element::gen(Family::T, 1, 1, 1, 1);
        assert_eq!(got, want);
        assert_eq!(normal_order(&got, &t).unwrap(), got);
    }

    #[test]
    fn family_mismatch_rejected() {
        let t = gl2(Family::T);
        let x = Element::<Q>::gen(Family::ClassicalT, 1, 1, 1, 1);
        assert!(matches!(normal_order(&x, &t), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn watchdog_fires_on_tiny_budget() {
        let t = gl2(Family::T);
        let x = Element::<Q>::gen(Family::T, 1, 1, 2, 1).mul(&Element::gen(Family::T, 1, 1, 1, 2));
        assert!(matches!(normal_order_with_budget(&x, &t, 1), Err(Error::Watchdog(1))));
    }

    #[test]
    fn gl2_consistent_and_flip_detected() {
        let t = gl2(Family::T);
        assert!(check_consistency(&t, 1).unwrap().is_pass());
        let bad = SignFlipped::new(&t, Gen::new(1, 1, 2), Gen::new(1, 2, 1));
        let rep = check_consistency(&bad, 1).unwrap();
        assert!(rep.failures().any(|c| c.id == "antisymmetry"));
    }

    #[test]
    fn text_rendering() {
        let x = Element::<Q>::gen(Family::T, 2, 1, 1, 2).scale(&Q::frac(-3, 2));
        assert_eq!(x.to_string(), "-3/2 T[1]^{1,2}");
    }
}
