//! Property tests for the module invariants: set algebra against every
//! measure, enclosure discipline, martingale identities and bounds,
//! heavy-union and trimming ledgers, and test-construction integrals.

use proptest::prelude::*;

use cantorlab_core::bits::{BitString, Rect};
use cantorlab_core::conditional::{
    conditional_martingale, exceed_set, follower_martingale, martingale_check,
    upcrossing_measure,
};
use cantorlab_core::heavy::{discard_equivalence, enumerate_heavy};
use cantorlab_core::measures::{
    default_sequence, set_mass, BernoulliSeq, MarginalSeq, Measure, OscillatingMeasure,
    ProductMeasure, SegmentsMeasure, StaircaseMeasure, UniformMeasure, UniformSeq,
};
use cantorlab_core::rat::Rat;
use cantorlab_core::sets::BasicSet;
use cantorlab_core::testcalc::{
    fiber_integral, integral, product_construction, ratio_trim, sum_construction,
};
use cantorlab_core::trimming::{
    trim, verify_bounds, CoverSequence, HonestGamma, Slowdown, TrimConfig,
};

fn example_measure(which: usize) -> Box<dyn Measure> {
    match which % 5 {
        0 => Box::new(UniformMeasure),
        1 => Box::new(OscillatingMeasure),
        2 => Box::new(StaircaseMeasure::new(default_sequence(8))),
        3 => Box::new(SegmentsMeasure::new(default_sequence(8))),
        _ => Box::new(ProductMeasure::new(
            Box::new(BernoulliSeq::new(Rat::new(1, 3)).unwrap()),
            Box::new(UniformSeq),
        )),
    }
}

fn bitstring(maxdepth: usize) -> impl Strategy<Value = BitString> {
    (0..=maxdepth, any::<u64>())
        .prop_map(|(d, bits)| BitString::from_index(d, bits & ((1u64 << d) - 1)))
}

fn rect(maxdepth: usize) -> impl Strategy<Value = Rect> {
    (bitstring(maxdepth), bitstring(maxdepth)).prop_map(|(a1, a2)| Rect::new(a1, a2))
}

fn basic_set(maxdepth: usize, maxrects: usize) -> impl Strategy<Value = BasicSet> {
    prop::collection::vec(rect(maxdepth), 0..=maxrects).prop_map(BasicSet::from_rects)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn union_intersection_additivity(
        a in basic_set(4, 4),
        b in basic_set(4, 4),
        which in 0usize..5,
    ) {
        let p = example_measure(which);
        let lhs = set_mass(&*p, &a.union(&b)).unwrap()
            + set_mass(&*p, &a.intersect(&b)).unwrap();
        let rhs = set_mass(&*p, &a).unwrap() + set_mass(&*p, &b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn set_algebra_identities(a in basic_set(4, 4), b in basic_set(4, 4)) {
        let diff = a.difference(&b);
        prop_assert!(diff.intersect(&b).is_empty());
        prop_assert_eq!(diff.union(&a.intersect(&b)), a.clone());
        prop_assert!(a.is_subset_of(&a.union(&b)));
        prop_assert!(a.intersect(&b).is_subset_of(&a));
    }

    #[test]
    fn martingale_identity_holds(which in 0usize..5, a2 in bitstring(3)) {
        let p = example_measure(which);
        let m = conditional_martingale(&*p, &a2, 4).unwrap();
        let report = martingale_check(&m, &MarginalSeq(&*p)).unwrap();
        prop_assert!(report.ok());
    }

    #[test]
    fn maximal_inequality(which in 0usize..5, a2 in bitstring(2), c_pow in -2i64..=2) {
        let p = example_measure(which);
        let m = conditional_martingale(&*p, &a2, 6).unwrap();
        let c = Rat::pow2(c_pow);
        let hit = exceed_set(&m, &c, &MarginalSeq(&*p)).unwrap();
        let bound = m.root().cloned().unwrap_or_else(Rat::zero) / c;
        prop_assert!(hit.measure <= bound);
    }

    #[test]
    fn upcrossing_inequality(which in 0usize..5, a2 in bitstring(2), n in 1u32..=3) {
        let p = example_measure(which);
        let m = conditional_martingale(&*p, &a2, 6).unwrap();
        let (u, v) = (Rat::new(2, 5), Rat::new(3, 5));
        let run = follower_martingale(&m, &u, &v);
        let crossed = upcrossing_measure(&run, &MarginalSeq(&*p), n).unwrap();
        let bound = (u / v).pow(n as i32);
        prop_assert!(crossed <= bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heavy_union_bound(seed in any::<u64>(), n in 1u32..=2, which in 0usize..3) {
        let p = example_measure(which);
        let bound = Rat::pow2(-2 * n as i64);
        let mut r = cantorlab_core::sampling::rng(seed);
        let u = cantorlab_core::sampling::random_set_with_mass_at_most(
            &mut r, &*p, &bound, 5, 8,
        ).unwrap();
        let scan = enumerate_heavy(&*p, &u, n, 8).unwrap();
        prop_assert!(scan.ok);
        prop_assert!(scan.union_measure <= Rat::pow2(-(n as i64)));
    }

    #[test]
    fn discard_makes_segments_uniform(seed in any::<u64>()) {
        let cfg = default_sequence(8);
        let mut r = cantorlab_core::sampling::rng(seed);
        let u = cantorlab_core::sampling::random_basic_set(&mut r, 6, 4);
        let report = discard_equivalence(&u, &cfg).unwrap();
        prop_assert!(report.ok);
    }

    #[test]
    fn constructions_stay_tests(seed in any::<u64>(), which in 0usize..5) {
        let p = example_measure(which);
        let mut r = cantorlab_core::sampling::rng(seed);
        let t1 = cantorlab_core::sampling::random_test1(&mut r, &*p, 2).unwrap();
        let fam = cantorlab_core::sampling::random_family(&mut r, &*p, 2, 2, 3).unwrap();
        let prod = product_construction(&t1, &fam);
        let sum = sum_construction(&t1, &fam);
        let ip = integral(&prod, &*p).unwrap();
        let is = integral(&sum, &*p).unwrap();
        prop_assert!(ip <= Rat::one());
        prop_assert!(is <= t1.integral);
    }

    #[test]
    fn ratio_trim_untouched_contract(seed in any::<u64>(), d in -2i64..=4, c in 0i64..=2) {
        let p = UniformMeasure;
        let mut r = cantorlab_core::sampling::rng(seed);
        let mut values = Vec::new();
        for _ in 0..1u64 << 2 {
            values.extend(cantorlab_core::sampling::random_cylfn(&mut r, 1, 8)
                .values().to_vec());
        }
        let f = cantorlab_core::cylfn::ProductFn::new(2, 1, values).unwrap();
        let tp = cantorlab_core::testcalc::make_product_test(f, &p).unwrap();
        let scale = Rat::pow2(-(d + c));
        let trimmed = ratio_trim(&tp, d, c, &p).unwrap();
        for i1 in 0..1u64 << 2 {
            let prefix = BitString::from_index(2, i1);
            let plain = tp.f().fiber(i1).scale(&scale);
            let iv = fiber_integral(&p, &prefix, &plain).unwrap().unwrap();
            let kept = trimmed.fiber(&prefix);
            if iv <= Rat::one() {
                prop_assert!(trimmed.untouched[i1 as usize]);
                prop_assert_eq!(kept, &plain);
            } else {
                prop_assert!(!trimmed.untouched[i1 as usize]);
                for (trimmed_v, plain_v) in kept.values().iter().zip(plain.values()) {
                    prop_assert!(trimmed_v <= plain_v);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trim_structure_and_ledger(seed in any::<u64>(), which in 0usize..2) {
        let p = example_measure(which * 4);
        let arc: std::sync::Arc<dyn Measure> = std::sync::Arc::from(example_measure(which * 4));
        let mut r = cantorlab_core::sampling::rng(seed);
        let covers = cantorlab_core::sampling::random_cover_sequence(&mut r, 2, 3, 2);
        let cfg = TrimConfig::with_default_deltas(Rat::new(1, 4), 2, 4);
        let gamma = HonestGamma::new(arc, Slowdown::Pow2);
        let result = trim(&*p, &gamma, &covers, &cfg).unwrap();
        prop_assert!(result.g(2).is_subset_of(result.g(1)));
        for k in 1..=2usize {
            prop_assert!(result.u_hat(k).is_subset_of(result.covers.get(k)));
        }
        prop_assert!(result.u_hat(1).is_subset_of(result.u_hat(2)));
        let report = verify_bounds(&result, &*p).unwrap();
        prop_assert!(report.ok());
    }

    #[test]
    fn enclosures_nest_and_narrow(r in rect(4), p_pow in 2i64..=6) {
        let inner = example_measure(2);
        let p = cantorlab_core::measures::ApproximateMeasure::new(inner);
        let coarse = Rat::pow2(-p_pow);
        let fine = Rat::pow2(-p_pow - 2);
        let wide = p.mass_enclosure(&r, &coarse).unwrap();
        let narrow = p.mass_enclosure(&r, &fine).unwrap();
        prop_assert!(wide.width() <= coarse);
        prop_assert!(narrow.width() <= fine);
        prop_assert!(wide.contains_interval(&narrow));
        let exact = example_measure(2).mass(&r).unwrap();
        prop_assert!(wide.contains(&exact));
    }

    #[test]
    fn cover_sequences_validate(sets in prop::collection::vec(basic_set(3, 3), 1..4)) {
        let increasing = sets.windows(2).all(|w| w[0].is_subset_of(&w[1]));
        let built = CoverSequence::new(sets);
        prop_assert_eq!(built.is_ok(), increasing);
    }
}
