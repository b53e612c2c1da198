use proptest::prelude::*;

use wyang::glnp::{CgNorm, GlnpBasis};
use wyang::json::{rep_from_json, rep_to_json};
use wyang::pbw::{commutator, Element, Family, Gen, RelationTable};
use wyang::reps::{eval_rep_y, gl_fundamental, restrict_to_twisted, tensor_product, verify_rep};
use wyang::twisted::{build_s, sdet_center, tau_element, SdetShift, ThetaSignature};
use wyang::yangian::{qdet, qdet_centrality, t_relation_table, QdetConvention};
use wyang::{Rational as Q, Scalar};

#[test]
fn tables_are_antisymmetric_and_graded() {
    for n in 1..=3 {
        for p in 1..=3 {
            let rules = t_relation_table::<Q>(n, p).unwrap();
            let gens = rules.generators(p);
            for &a in &gens {
                for &b in &gens {
                    let x = Element::gen(Family::T, p, a.level as u32, a.row as usize, a.col as usize);
                    let y = Element::gen(Family::T, p, b.level as u32, b.row as usize, b.col as usize);
                    let ab = commutator(&x, &y, &rules).unwrap();
                    let ba = commutator(&y, &x, &rules).unwrap();
                    assert!((&ab + &ba).is_zero(), "N={n} p={p} {a} {b}");
                    assert!(ab.max_total_level() < (a.level + b.level) as u32, "N={n} p={p} {a} {b} raises the level");
                }
            }
        }
    }
}

#[test]
fn qdet_coefficients_commute() {
    let rules = t_relation_table::<Q>(2, 2).unwrap();
    let ds = qdet(&rules, 4, QdetConvention::Column).unwrap();
    for x in &ds {
        for y in &ds {
            assert!(commutator(x, y, &rules).unwrap().is_zero());
        }
    }
    assert!(qdet_centrality(&rules, 3, QdetConvention::Column).unwrap().is_pass());
}

#[test]
fn sdet_odd_coefficients_vanish() {
    let rules = t_relation_table::<Q>(2, 1).unwrap();
    for t0 in [1, -1] {
        let sig = ThetaSignature::standard(2, t0).unwrap();
        let r = sdet_center(&rules, &build_s(&rules, &sig).unwrap(), 3, SdetShift::Symmetric).unwrap();
        assert!(r.is_pass(), "θ0 = {t0}: {:?}", r.failures().collect::<Vec<_>>());
    }
}

fn signature() -> impl Strategy<Value = ThetaSignature> {
    prop_oneof![
        Just(vec![1i8, 1]),
        Just(vec![-1, -1]),
        Just(vec![1, -1]),
        Just(vec![-1, 1]),
        Just(vec![1, 1, 1]),
        Just(vec![-1, 1, -1]),
        Just(vec![1, -1, 1, -1]),
        Just(vec![1, 1, -1, -1]),
    ]
    .prop_map(|t| ThetaSignature::validate(&t).unwrap())
}

fn word(n: usize) -> impl Strategy<Value = Vec<Gen>> {
    proptest::collection::vec((1u32..=3, 1..=n, 1..=n).prop_map(|(l, i, j)| Gen::new(l, i, j)), 0..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tau_is_an_involution(sig in signature(), ws in proptest::collection::vec(word(4), 1..=4), cs in proptest::collection::vec(-5i64..=5, 4)) {
        let n = sig.n();
        let terms = ws.into_iter().zip(cs).map(|(w, c)| {
            let w: Vec<Gen> = w.into_iter().map(|g| Gen::new(g.level as u32, (g.row as usize - 1) % n + 1, (g.col as usize - 1) % n + 1)).collect();
            (w.into_iter().collect(), Q::int(c))
        });
        let x = Element::from_terms(Family::T, 3, terms);
        prop_assert_eq!(tau_element(&tau_element(&x, &sig), &sig), x);
    }

    #[test]
    fn cg_does_not_depend_on_flavours(j in 0i64..3, l in 0i64..3, r in 0i64..5, m0 in 0i64..5, n0 in 0i64..5, a in 1usize..=3, b in 1usize..=3, c in 1usize..=3) {
        let basis = GlnpBasis::<Q>::new(3, 3, CgNorm::Trace).unwrap();
        let (m, n) = (m0 % (2 * j + 1) - j, n0 % (2 * l + 1) - l);
        let s = m + n;
        let base = basis.cg(j, m, l, n, r, s);
        let other = basis.cg_at(j, m, l, n, r, s, (a, b, c));
        prop_assert_eq!(base.ok(), other.ok());
    }

    #[test]
    fn evaluation_modules_satisfy_rtt(num in -12i64..=12, den in 1i64..=4) {
        let a = Q::frac(num, den);
        let one = eval_rep_y::<Q>(2, &gl_fundamental(2), &a, 3).unwrap();
        prop_assert!(verify_rep(&one).is_pass());
        let two = tensor_product(&one, &eval_rep_y::<Q>(2, &gl_fundamental(2), &Q::int(1), 3).unwrap()).unwrap();
        prop_assert!(verify_rep(&two).is_pass());
        for t0 in [1, -1] {
            let sig = ThetaSignature::standard(2, t0).unwrap();
            let s = restrict_to_twisted(&two, &sig).unwrap();
            prop_assert!(verify_rep(&s).is_pass());
            prop_assert_eq!(rep_from_json::<Q>(&rep_to_json(&s)).unwrap(), s);
        }
        prop_assert_eq!(rep_from_json::<Q>(&rep_to_json(&one)).unwrap(), one);
    }
}
