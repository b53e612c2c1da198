use num_traits::{One, Zero};
use proptest::prelude::*;

use wyang::json::{element_from_json, element_to_json};
use wyang::pbw::{normal_order, Element, Family, Gen};
use wyang::scalar::binom;
use wyang::series::{series_shift_expand, Series};
use wyang::yangian::t_relation_table;
use wyang::{Rational as Q, Scalar};

fn small() -> impl Strategy<Value = i64> {
    -9i64..=9
}

fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(a, b)| Q::frac(a, b))
}

fn series(cutoff: u32) -> impl Strategy<Value = Series<Q>> {
    proptest::collection::vec(small(), cutoff as usize + 1)
        .prop_map(move |cs| Series::from_terms(cutoff, cs.into_iter().enumerate().map(|(k, c)| (k as u32, Q::int(c)))))
}

// Random words over the generators of Y_2(2), at most three letters each.
fn element() -> impl Strategy<Value = Element<Q>> {
    let gen = (1u32..=2, 1usize..=2, 1usize..=2).prop_map(|(l, i, j)| Gen::new(l, i, j));
    let term = (proptest::collection::vec(gen, 0..=3), rational());
    proptest::collection::vec(term, 0..=4).prop_map(|ts| Element::from_terms(Family::T, 2, ts.into_iter().map(|(w, c)| (w.into_iter().collect(), c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rationals_are_exact(x in rational(), y in rational()) {
        prop_assert_eq!((x.clone() + y.clone()) - y.clone(), x.clone());
        if !y.is_zero() {
            prop_assert_eq!((x.clone() * y.clone()) / y.clone(), x.clone());
        }
        let (n, d) = x.parts();
        prop_assert_eq!(Q::from_parts(n, d), Some(x.clone()));
        prop_assert_eq!(x.render().parse::<Q>().ok(), Some(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn series_product_is_commutative_and_associative(a in series(5), b in series(5), c in series(5)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn shift_expansion_inverts_the_power(n in 1u32..=4, c in rational(), extra in 0u32..=5) {
        let d = n + extra;
        let e = series_shift_expand(n, &c, d).unwrap();
        // u^n (u+c)^{-n} times (1 + c/u)^n is 1
        let lifted = Series::from_terms(d - n, (0..=d - n).map(|k| (k, e.at(k + n))));
        let mut pw = Q::one();
        let mut bin = Vec::new();
        for k in 0..=n.min(d - n) {
            bin.push((k, binom::<Q>(n as i64, k as i64) * pw.clone()));
            pw = pw * c.clone();
        }
        let poly = Series::from_terms(d - n, bin);
        prop_assert_eq!(lifted.mul(&poly).unwrap(), Series::one(d - n));
        prop_assert!((0..n).all(|k| e.at(k).is_zero()));
    }

    #[test]
    fn series_inverse_round_trips(a in series(6), lead in 1i64..=5) {
        let a = Series::from_terms(6, (0..=6).map(|k| (k, if k == 0 { Q::int(lead) } else { a.at(k) })));
        prop_assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), Series::one(6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normal_order_is_linear_and_idempotent(x in element(), y in element(), a in rational(), b in rational()) {
        let rules = t_relation_table::<Q>(2, 2).unwrap();
        // the default budget must never trip on these inputs
        let nx = normal_order(&x, &rules).unwrap();
        let ny = normal_order(&y, &rules).unwrap();
        let comb = &x.scale(&a) + &y.scale(&b);
        prop_assert_eq!(normal_order(&comb, &rules).unwrap(), &nx.scale(&a) + &ny.scale(&b));
        prop_assert!(nx.is_sorted());
        prop_assert_eq!(normal_order(&nx, &rules).unwrap(), nx);
    }

    #[test]
    fn element_json_round_trips(x in element()) {
        let v = element_to_json(&x);
        prop_assert_eq!(element_from_json::<Q>(&v).unwrap(), x.clone());
        let text = serde_json::to_string(&v).unwrap();
        let again: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(element_from_json::<Q>(&again).unwrap(), x);
    }
}

#[test]
fn normal_order_respects_the_product() {
    let rules = t_relation_table::<Q>(2, 2).unwrap();
    let g = |l, i, j| Element::<Q>::gen(Family::T, 2, l, i, j);
    let x = &g(2, 2, 1) * &g(1, 1, 2);
    let y = &g(1, 2, 2) * &g(2, 1, 1);
    let lhs = normal_order(&(&x * &y), &rules).unwrap();
    let rhs = normal_order(&(&normal_order(&x, &rules).unwrap() * &normal_order(&y, &rules).unwrap()), &rules).unwrap();
    assert_eq!(lhs, rhs);
}
