use std::collections::BTreeSet;
use std::sync::LazyLock;

use lrsnet::gf::{Elem, Field, FieldTower};
use lrsnet::lrs::LrsCode;
use lrsnet::skewpoly::{Degree, SkewPoly, SkewRing};
use lrsnet::sumrank::OrderedPartition;
use proptest::prelude::*;

static R81: LazyLock<SkewRing> = LazyLock::new(|| SkewRing::new(FieldTower::new(3, 4).unwrap()));
static R64: LazyLock<SkewRing> = LazyLock::new(|| SkewRing::new(FieldTower::new(4, 3).unwrap()));

fn elem(order: u64) -> impl Strategy<Value = Elem> {
    (0..order).prop_map(Elem)
}

fn poly(order: u64, max_len: usize) -> impl Strategy<Value = SkewPoly> {
    prop::collection::vec(elem(order), 0..=max_len).prop_map(SkewPoly::new)
}

fn nonzero_poly(order: u64, max_len: usize) -> impl Strategy<Value = SkewPoly> {
    poly(order, max_len).prop_filter("nonzero", |p| !p.is_zero())
}

/// `a^c = sigma(c) a c^-1`.
fn conjugate(f: &FieldTower, a: Elem, c: Elem) -> Elem {
    f.mul(f.mul(f.frobenius(c), a), f.inv(c))
}

proptest! {
    #[test]
    fn remainder_evaluation_matches_division(f in poly(81, 8), a in elem(81)) {
        let r = &*R81;
        prop_assert_eq!(r.evaluate(&f, a), r.evaluate_by_division(&f, a));
    }

    #[test]
    fn multiplication_is_associative_and_distributive(
        f in poly(64, 4), g in poly(64, 4), h in poly(64, 4)
    ) {
        let r = &*R64;
        prop_assert_eq!(r.mul(&r.mul(&f, &g), &h), r.mul(&f, &r.mul(&g, &h)));
        prop_assert_eq!(r.mul(&f, &r.add(&g, &h)), r.add(&r.mul(&f, &g), &r.mul(&f, &h)));
        prop_assert_eq!(r.mul(&r.add(&f, &g), &h), r.add(&r.mul(&f, &h), &r.mul(&g, &h)));
    }

    #[test]
    fn x_commutes_through_frobenius(a in elem(81)) {
        let r = &*R81;
        let lhs = r.mul(&SkewPoly::x_pow(1), &SkewPoly::constant(a));
        let rhs = r.mul(&SkewPoly::constant(r.field().frobenius(a)), &SkewPoly::x_pow(1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn division_identities(f in poly(81, 8), g in nonzero_poly(81, 4)) {
        let r = &*R81;
        let (q, rem) = r.right_div(&f, &g).unwrap();
        prop_assert_eq!(r.add(&r.mul(&q, &g), &rem), f.clone());
        prop_assert!(rem.degree() < g.degree());
        let (q, rem) = r.left_div(&f, &g).unwrap();
        prop_assert_eq!(r.add(&r.mul(&g, &q), &rem), f);
        prop_assert!(rem.degree() < g.degree());
    }

    #[test]
    fn gcrd_and_lclm_degrees_add_up(f in nonzero_poly(81, 5), g in nonzero_poly(81, 5)) {
        let r = &*R81;
        let d = r.gcrd(&f, &g);
        let l = r.lclm(&f, &g).unwrap();
        prop_assert_eq!(d.deg() + l.deg(), f.deg() + g.deg());
        prop_assert!(d.is_monic() && l.is_monic());
        prop_assert!(r.right_div(&f, &d).unwrap().1.is_zero());
        prop_assert!(r.right_div(&g, &d).unwrap().1.is_zero());
        prop_assert!(r.right_div(&l, &f).unwrap().1.is_zero());
        prop_assert!(r.right_div(&l, &g).unwrap().1.is_zero());
    }

    #[test]
    fn product_rule(f in poly(81, 5), g in poly(81, 5), a in elem(81)) {
        let r = &*R81;
        let fld = r.field();
        let ga = r.evaluate(&g, a);
        let expected = if ga == Elem(0) {
            Elem(0)
        } else {
            fld.mul(r.evaluate(&f, conjugate(fld, a, ga)), ga)
        };
        prop_assert_eq!(r.evaluate(&r.mul(&f, &g), a), expected);
    }

    #[test]
    fn minimal_polynomial_degree_is_vandermonde_rank(points in prop::collection::vec(elem(81), 0..6)) {
        let r = &*R81;
        let f = r.minimal_polynomial(&points);
        prop_assert!(f.is_monic());
        for &a in &points {
            prop_assert_eq!(r.evaluate(&f, a), Elem(0));
        }
        let rank = r.theta_vandermonde(&points, points.len()).rank(r.field());
        prop_assert_eq!(f.degree(), Degree::Finite(rank));
    }

    #[test]
    fn minimal_polynomials_of_locator_subsets_form_a_lattice(
        z1 in prop::collection::btree_set(0usize..8, 0..=8),
        z2 in prop::collection::btree_set(0usize..8, 0..=8),
    ) {
        let r = &*R81;
        let part = OrderedPartition::new(vec![4, 4]).unwrap();
        let code = LrsCode::with_defaults(r.field(), &part, 1).unwrap();
        let loc = code.locators();
        let min = |z: &BTreeSet<usize>| {
            let pts: Vec<Elem> = z.iter().map(|&j| loc[j]).collect();
            r.minimal_polynomial(&pts)
        };
        let (f1, f2) = (min(&z1), min(&z2));
        prop_assert_eq!(f1.deg(), z1.len());
        prop_assert_eq!(r.gcrd(&f1, &f2), min(&z1.intersection(&z2).copied().collect()));
        prop_assert_eq!(r.lclm(&f1, &f2).unwrap(), min(&z1.union(&z2).copied().collect()));
    }
}

#[test]
fn roots_lie_in_the_spans_of_the_chosen_multipliers() {
    // Each class holds (q^r - 1)/(q - 1) roots: beta and c*beta give the same a*beta^(q-1).
    let field = FieldTower::new(3, 3).unwrap();
    let r = SkewRing::new(field.clone());
    let part = OrderedPartition::new(vec![3, 3]).unwrap();
    let code = LrsCode::with_defaults(&field, &part, 1).unwrap();
    let loc = code.locators();
    for mask in 0u32..64 {
        let z: Vec<usize> = (0..6).filter(|j| mask >> j & 1 == 1).collect();
        let pts: Vec<Elem> = z.iter().map(|&j| loc[j]).collect();
        let f = r.minimal_polynomial(&pts);
        let roots = r.roots_in_field(&f).unwrap();
        let expected: u64 = [0..3, 3..6]
            .into_iter()
            .map(|blk| {
                let k = z.iter().filter(|j| blk.contains(*j)).count() as u32;
                (3u64.pow(k) - 1) / 2
            })
            .sum();
        assert_eq!(roots.len() as u64, expected, "zero set {z:?}");
        for &a in &pts {
            assert!(roots.contains(&a));
        }
    }
}
