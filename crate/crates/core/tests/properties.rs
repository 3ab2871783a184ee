use proptest::prelude::*;

use uniserial_lab::aronszajn::Tree;
use uniserial_lab::field::{rational, Q};
use uniserial_lab::gamma::build_cauchy;
use uniserial_lab::series::{expand_prefix, truncation_equal, truncation_key};
use uniserial_lab::uniserial::{self, verify_presentation};
use uniserial_lab::valuation::{congruent_mod, divides, is_member, TypeSpec};
use uniserial_lab::{GroupElement, Ladder, Ordinal, Poly, Quotient};

fn ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec((0u64..4, 1u64..4), 0..4).prop_map(|terms| {
        let mut terms = terms;
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        terms.iter().fold(Ordinal::zero(), |acc, (e, c)| acc.add(&Ordinal::monomial(Ordinal::nat(*e), *c)))
    })
}

fn limit() -> impl Strategy<Value = Ordinal> {
    (ordinal(), 1u64..4).prop_map(|(a, k)| a.add(&Ordinal::omega_pow(Ordinal::nat(k))))
}

fn index() -> impl Strategy<Value = Ordinal> {
    prop::sample::select(vec!["0", "1", "2", "w", "w+1", "w*2"]).prop_map(|s| s.parse().unwrap())
}

fn group_element() -> impl Strategy<Value = GroupElement> {
    prop::collection::vec((index(), -3i64..=3), 0..4).prop_map(GroupElement::from_pairs)
}

fn scalar() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| rational(n, d))
}

fn poly() -> impl Strategy<Value = Poly<Q>> {
    prop::collection::vec((group_element(), scalar()), 1..5)
        .prop_map(Poly::from_terms)
        .prop_filter("nonzero", |p| !p.is_zero())
}

/// A ring member: a quotient shifted to valuation `shift >= 0`.
fn member() -> impl Strategy<Value = Quotient<Q>> {
    (poly(), poly(), prop::collection::vec((index(), 0i64..=2), 0..3)).prop_map(|(a, b, shift)| {
        let q = Quotient::new(a, b).unwrap();
        let v = q.valuation().unwrap();
        let target = GroupElement::from_pairs(shift);
        q.mul(&Quotient::x(&target - &v))
    })
}

/// A polynomial member, to keep products small.
fn poly_member() -> impl Strategy<Value = Quotient<Q>> {
    (poly(), prop::collection::vec((index(), 0i64..=2), 0..3)).prop_map(|(a, shift)| {
        let v = a.valuation().unwrap();
        Quotient::from_poly(a.mul_monomial(&(&GroupElement::from_pairs(shift) - &v), &Q::from_integer(1.into())))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ordinal_addition_is_associative(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn ordinal_order_and_successor(a in ordinal(), x in ordinal()) {
        let s = a.succ();
        prop_assert!(a < s);
        prop_assert!(!(a < x && x < s));
        prop_assert_eq!(a.cmp(&x), x.cmp(&a).reverse());
        prop_assert_eq!(s.predecessor(), Some(a.clone()));
    }

    #[test]
    fn ordinal_strings_round_trip(a in ordinal()) {
        prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
    }

    #[test]
    fn ladders_are_cofinal(d in limit(), b in ordinal()) {
        let ladder = Ladder::canonical(&d).unwrap();
        let prefix = ladder.prefix(12).unwrap();
        prop_assert!(prefix.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(prefix.iter().all(|x| x < &d));
        if b < d {
            prop_assert!(ladder.first_above(&b, 10_000).is_some());
        }
    }

    #[test]
    fn group_order_is_translation_invariant(g in group_element(), h in group_element(), f in group_element()) {
        prop_assert_eq!(g.cmp(&h), (&g + &f).cmp(&(&h + &f)));
        prop_assert_eq!(g.is_positive(), g > GroupElement::zero());
        if g.is_nonnegative() && h.is_nonnegative() {
            prop_assert!((&g + &h).is_nonnegative());
        }
    }

    #[test]
    fn valuation_is_additive(a in poly(), b in poly(), c in poly()) {
        let q1 = Quotient::new(a, b.clone()).unwrap();
        let q2 = Quotient::new(c, b).unwrap();
        prop_assert_eq!(q1.mul(&q2).valuation().unwrap(), &q1.valuation().unwrap() + &q2.valuation().unwrap());
    }

    #[test]
    fn inverse_truncates_to_one(a in poly(), b in poly(), beta in group_element()) {
        let q = Quotient::new(a, b).unwrap();
        prop_assert!(truncation_equal(&q.mul(&q.inv().unwrap()), &Quotient::one(), &beta));
    }

    #[test]
    fn long_division_remainder_moves_up(a in poly(), b in poly(), n in 1usize..8) {
        let q = Quotient::new(a.clone(), b.clone()).unwrap();
        let terms = expand_prefix(&q, n);
        prop_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        let rem = a.sub(&b.mul(&Poly::from_terms(terms.iter().cloned())));
        if let (Ok(v), Some((last, _))) = (rem.valuation(), terms.last()) {
            prop_assert!(&(&v - &b.valuation().unwrap()) > last);
        }
    }

    #[test]
    fn equal_keys_mean_equal_truncations(a in poly(), b in poly(), c in poly(), d in poly(), cut in index()) {
        let beta = GroupElement::generator(cut);
        let q1 = Quotient::new(a, b).unwrap();
        let q2 = Quotient::new(c, d).unwrap();
        let k1 = truncation_key(&q1, &beta).unwrap();
        if k1 == truncation_key(&q2, &beta).unwrap() {
            prop_assert!(truncation_equal(&q1, &q2, &beta));
        }
        prop_assert_eq!(k1, truncation_key(&q1, &beta).unwrap());
    }

    #[test]
    fn divisibility_is_total(a in member(), b in member()) {
        prop_assert!(is_member(&a) && is_member(&b));
        prop_assert!(divides(&a, &b) || divides(&b, &a));
    }

    #[test]
    fn congruence_respects_ring_operations(a in member(), c in poly_member(), t in poly_member(), r in poly_member()) {
        let b = a.add(&r.mul(&t));
        prop_assert!(congruent_mod(&a, &b, &r));
        prop_assert!(congruent_mod(&b, &a, &r));
        prop_assert!(congruent_mod(&a.add(&c), &b.add(&c), &r));
        prop_assert!(congruent_mod(&a.mul(&c), &b.mul(&c), &r));
    }

    #[test]
    fn generators_divide_upwards_only(s in index(), t in index()) {
        let spec = TypeSpec::new("w^2".parse().unwrap());
        if s < t {
            prop_assert!(divides(&spec.r::<Q>(&s), &spec.r::<Q>(&t)));
            prop_assert!(!divides(&spec.r::<Q>(&t), &spec.r::<Q>(&s)));
        }
    }

    #[test]
    fn cauchy_families_are_congruent(zeta in prop::collection::vec(any::<bool>(), 1..7), two in any::<bool>()) {
        let d: Ordinal = if two { "w*2" } else { "w" }.parse().unwrap();
        let spec = TypeSpec::new(d.clone());
        let fam = build_cauchy::<Q>(&zeta, &Ladder::canonical(&d).unwrap(), &spec).unwrap();
        prop_assert!(fam.check_congruences(&spec).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tree_witnesses_and_restrictions(budget in 2usize..5, k in 1i64..20, pick in any::<prop::sample::Index>()) {
        let mut tree = Tree::build_levels("w+2".parse().unwrap(), budget).unwrap();
        let low = tree.level(&Ordinal::one()).to_vec();
        let x = low[pick.index(low.len())];
        let rho: Ordinal = "w+1".parse().unwrap();
        let y = tree.star_witness(x, &rho, &rational(1, k)).unwrap();
        prop_assert!(tree.is_below(x, y).unwrap());
        prop_assert!(tree.label(y) > tree.label(x));
        prop_assert!(tree.label(y) < &(tree.label(x) + rational(1, k)));
        let z = tree.restrict(y, &Ordinal::omega()).unwrap();
        prop_assert!(tree.label(z) < tree.label(y));
    }

    #[test]
    fn small_presentations_verify(budget in 1usize..6, which in 0usize..3) {
        let bound: Ordinal = ["2", "w", "w+1"][which].parse().unwrap();
        let c = uniserial::build::<Q>(&TypeSpec::new("w^2".parse().unwrap()), &bound, budget).unwrap();
        let rep = verify_presentation(&c.presentation, &c.labels).unwrap();
        prop_assert!(rep.pass(), "{:?}", rep.violations);
        prop_assert!(c.instance_violations().is_empty());
        prop_assert_eq!(c.bridge_failures(), 0);
    }
}
