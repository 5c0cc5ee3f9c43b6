use ideals::density::{lower_density, polya_upper, prefix_oracle, upper_density, weighted_upper_density, OracleConfig};
use ideals::ideals::{member, IdealDesc};
use ideals::natset::{ApSet, BlockSet, GeneralSet, NatSet, Schedule};
use ideals::rational::{q, qi};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn ap() -> impl Strategy<Value = ApSet> {
    (1u64..24, prop::collection::vec(any::<bool>(), 24), prop::collection::btree_set(1u64..200, 0..4))
        .prop_map(|(m, bits, extra)| {
            let residues: Vec<u64> = (0..m).filter(|&r| bits[r as usize]).collect();
            let base = ApSet::new(m, residues, [], []).unwrap();
            let mut s = base.clone();
            for n in extra {
                s.toggle(n);
            }
            s
        })
}

fn ideals() -> Vec<IdealDesc> {
    vec![IdealDesc::fin(), IdealDesc::z(), IdealDesc::logz(), IdealDesc::density(qi(1)), IdealDesc::polya(), IdealDesc::summable()]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exact_density_is_additive(a in ap(), b in ap()) {
        let d = |s: &ApSet| s.density();
        prop_assert_eq!(d(&a.union(&b)) + d(&a.intersect(&b)), d(&a) + d(&b));
        prop_assert_eq!(d(&a) + d(&a.complement()), Q1::one());
        prop_assert!(d(&a.intersect(&b)) <= d(&a));
    }

    #[test]
    fn functionals_agree_on_periodic_sets(a in ap()) {
        let cfg = OracleConfig::default();
        let s: NatSet = a.clone().into();
        let d = a.density();
        for r in [upper_density(&s, &cfg), lower_density(&s, &cfg), polya_upper(&s, &cfg), weighted_upper_density(&s, &q(-1, 2), &cfg).unwrap()] {
            prop_assert!(r.exact);
            prop_assert_eq!(&r.lo, &d);
        }
    }

    #[test]
    fn ideals_on_periodic_sets(a in ap()) {
        let cfg = OracleConfig::default();
        let s: NatSet = a.clone().into();
        for i in ideals() {
            let m = member(&i, &s, &cfg).unwrap();
            let want = if i == IdealDesc::fin() || i == IdealDesc::summable() { a.is_finite() } else { a.density().is_zero() };
            prop_assert_eq!(m, want, "{}", i.name());
        }
        // every ideal here sits between Fin and the density ideals
        if a.is_finite() {
            for i in ideals() {
                prop_assert!(member(&i, &s, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn block_sets_have_ordered_functionals(r in 2u64..5, m in 1u64..5, bits in prop::collection::vec(any::<bool>(), 5)) {
        let residues: Vec<u64> = (0..m).filter(|&k| bits[k as usize]).collect();
        let sel = ApSet::new(m, residues, [], []).unwrap();
        let b = BlockSet::new(Schedule::Geometric { b0: 1, r }, sel.clone()).unwrap();
        let cfg = OracleConfig::default();
        let s: NatSet = b.clone().into();
        let (lo, hi) = (lower_density(&s, &cfg), upper_density(&s, &cfg));
        let p = polya_upper(&s, &cfg);
        prop_assert!(lo.exact && hi.exact && p.exact);
        prop_assert!(lo.lo <= hi.lo && hi.lo <= p.lo);
        prop_assert_eq!(weighted_upper_density(&s, &-Q1::one(), &cfg).unwrap().lo, sel.density());
        // the prefix oracle on an opaque copy sees part of the oscillation,
        // all of it when a selector cycle fits in its tail window (a factor 4)
        let (x, y) = (b.clone(), b);
        let opaque: NatSet = GeneralSet::new("b", move |n| x.contains(n)).with_counter(move |n| y.count(n)).into();
        let o = prefix_oracle(&opaque, &OracleConfig::with_budget(1 << 22));
        let tol = q(1, 50);
        prop_assert!(&lo.lo - &tol <= o.lo && o.hi <= &hi.lo + &tol, "{} vs [{}, {}]", o, lo, hi);
        if r.pow(m as u32) <= 4 {
            prop_assert!(o.lo <= &lo.lo + &tol && &hi.lo - &tol <= o.hi, "{} vs [{}, {}]", o, lo, hi);
        }
    }
}

type Q1 = ideals::rational::Q;
