use num_traits::Signed;
use ideals::natset::{ApSet, BlockSet, ExactSet, PairSet, Schedule};
use proptest::prelude::*;

const N: u64 = 3000;

fn ap_strategy() -> impl Strategy<Value = ApSet> {
    (1u64..7, prop::collection::vec(0u64..7, 0..4), prop::collection::vec(1u64..40, 0..4), prop::collection::vec(1u64..40, 0..3))
        .prop_map(|(m, rs, inc, exc)| {
            let exc: Vec<u64> = exc.into_iter().filter(|e| !inc.contains(e)).collect();
            ApSet::new(m, rs, inc, exc).unwrap()
        })
}

fn exact_strategy() -> impl Strategy<Value = ExactSet> {
    (ap_strategy(), prop::collection::vec((2u32..5, ap_strategy()), 0..3)).prop_map(|(d, ts)| {
        let mut acc: ExactSet = d.into();
        for (e, sel) in ts {
            acc = acc.symmetric_difference(&ExactSet::power(e, &sel).unwrap()).unwrap();
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ap_algebra_is_pointwise(a in ap_strategy(), b in ap_strategy()) {
        let (u, i, d, c) = (a.union(&b), a.intersect(&b), a.difference(&b), a.complement());
        for n in 1..300 {
            prop_assert_eq!(u.contains(n), a.contains(n) || b.contains(n));
            prop_assert_eq!(i.contains(n), a.contains(n) && b.contains(n));
            prop_assert_eq!(d.contains(n), a.contains(n) && !b.contains(n));
            prop_assert_eq!(c.contains(n), !a.contains(n));
        }
    }

    #[test]
    fn ap_count_and_enumerate(a in ap_strategy()) {
        let mut acc = 0;
        for n in 1..300 {
            if a.contains(n) {
                acc += 1;
                prop_assert_eq!(a.enumerate(acc).unwrap(), n);
            }
            prop_assert_eq!(a.count(n), acc);
        }
    }

    #[test]
    fn reindex_matches_definition(a in ap_strategy(), b in ap_strategy()) {
        prop_assume!(!a.is_finite());
        let r = a.reindex(&b).unwrap();
        for k in 1..120 {
            let ak = a.enumerate(k).unwrap();
            prop_assert_eq!(r.contains(ak), b.contains(k));
        }
        for n in 1..300 {
            if r.contains(n) { prop_assert!(a.contains(n)); }
        }
    }

    #[test]
    fn exact_algebra_is_pointwise(a in exact_strategy(), b in exact_strategy()) {
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        let d = a.difference(&b).unwrap();
        let c = a.complement();
        for n in 1..N {
            prop_assert_eq!(u.contains(n), a.contains(n) || b.contains(n), "union at {}", n);
            prop_assert_eq!(i.contains(n), a.contains(n) && b.contains(n), "inter at {}", n);
            prop_assert_eq!(d.contains(n), a.contains(n) && !b.contains(n), "diff at {}", n);
            prop_assert_eq!(c.contains(n), !a.contains(n));
        }
    }

    #[test]
    fn exact_canonical_equality(a in exact_strategy(), b in exact_strategy()) {
        let lhs = a.union(&b).unwrap().complement();
        let rhs = a.complement().intersect(&b.complement()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_count_and_enumerate(a in exact_strategy()) {
        let mut acc = 0;
        for n in 1..1000 {
            if a.contains(n) {
                acc += 1;
                prop_assert_eq!(a.enumerate(acc).unwrap(), n);
            }
            prop_assert_eq!(a.count(n), acc);
        }
    }

    #[test]
    fn exact_count_far_out(a in exact_strategy(), b in exact_strategy()) {
        let s = a.symmetric_difference(&b).unwrap();
        let mut acc = 0;
        for n in 1..=40_000u64 {
            acc += s.contains(n) as u64;
            if n % 1999 == 0 {
                prop_assert_eq!(s.count(n), acc, "count at {}", n);
            }
        }
    }

    #[test]
    fn product_density_is_the_grid_limit(r1 in ap_strategy(), c1 in ap_strategy(), r2 in ap_strategy(), c2 in ap_strategy()) {
        let a = PairSet::new(vec![(r1, c1), (r2, c2)]);
        // every modulus divides 420, so full periods give the density exactly
        let n = 420 * 4;
        let inside = a.count(n, n) as i64;
        let d = a.product_density();
        let corr = 40 * 2 * n as i64;
        let want = d * num_rational::BigRational::from_integer((n * n).into());
        let diff = (want - num_rational::BigRational::from_integer(inside.into())).abs();
        prop_assert!(diff <= num_rational::BigRational::from_integer(corr.into()));
    }

    #[test]
    fn block_count_matches_scan(b0 in 1u64..4, r in 2u64..4, sel in ap_strategy()) {
        let b = BlockSet::new(Schedule::Geometric { b0, r }, sel).unwrap();
        let mut acc = 0;
        for n in 1..2000 {
            acc += b.contains(n) as u64;
            prop_assert_eq!(b.count(n), acc);
        }
    }

    #[test]
    fn pair_algebra_is_pointwise(r1 in ap_strategy(), c1 in ap_strategy(), r2 in ap_strategy(), c2 in ap_strategy()) {
        let a = PairSet::rect(r1, c1).with_corrections([(1, 2)], [(3, 3)]);
        let b = PairSet::rect(r2, c2);
        let (u, i, d, c) = (a.union(&b), a.intersect(&b), a.difference(&b), a.complement());
        for x in 1..25 {
            for y in 1..25 {
                let (pa, pb) = (a.contains((x, y)), b.contains((x, y)));
                prop_assert_eq!(u.contains((x, y)), pa || pb);
                prop_assert_eq!(i.contains((x, y)), pa && pb);
                prop_assert_eq!(d.contains((x, y)), pa && !pb);
                prop_assert_eq!(c.contains((x, y)), !pa);
            }
        }
        let mut acc = 0;
        for x in 1..25u64 {
            for y in 1..25u64 {
                acc += a.contains((x, y)) as u64;
            }
        }
        prop_assert_eq!(a.count(24, 24), acc);
    }
}
