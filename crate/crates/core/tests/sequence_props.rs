use ideals::ideals::IdealDesc;
use ideals::rational::qi;
use ideals::sequences::{cluster_points, fin_limit, ideal_lim, istar_lim, limit_points, SymSeq};
use ideals::theorems::{Gen, Instance, Profile};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let inst = g.instance(Profile::Generic);
        let back = SymSeq::from_json(&inst.seq.to_json()).unwrap();
        prop_assert_eq!(back.values(200).unwrap(), inst.seq.values(200).unwrap());
        let again = Instance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(again.ideal, inst.ideal);
    }

    #[test]
    fn convergent_sequences_cluster_at_the_limit(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let inst = g.instance(Profile::Convergent);
        let (x, i) = (&inst.seq, &inst.ideal);
        let l = ideal_lim(x, i).unwrap().limit;
        prop_assert!(l.is_some(), "{}", x);
        let l = l.unwrap();
        let gamma = cluster_points(x, i).unwrap();
        prop_assert_eq!(gamma.points, vec![l.clone()]);
        prop_assert_eq!(limit_points(x, i).unwrap().points, vec![l.clone()]);
        if let Some(s) = istar_lim(x, i).unwrap() {
            prop_assert_eq!(s.limit, l);
        }
    }

    #[test]
    fn fin_limits_survive_every_ideal(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let x = g.generic_seq(0.1);
        if let Some(l) = fin_limit(&x).unwrap() {
            for i in [IdealDesc::z(), IdealDesc::logz(), IdealDesc::polya(), IdealDesc::summable()] {
                prop_assert_eq!(ideal_lim(&x, &i).unwrap().limit, Some(l.clone()), "{}", i.name());
            }
        }
        let gf = cluster_points(&x, &IdealDesc::fin()).unwrap().points;
        for p in cluster_points(&x, &IdealDesc::z()).unwrap().points {
            prop_assert!(gf.contains(&p), "Γ(Z) ⊄ Γ(Fin)");
        }
    }

    #[test]
    fn limits_add(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let i = g.omega_ideal();
        let (x, y) = (g.generic_seq(0.1), g.generic_seq(0.1));
        let x = g.make_convergent(&x, &i, None);
        let y = g.make_convergent(&y, &i, Some(qi(2)));
        let lx = ideal_lim(&x, &i).unwrap().limit.unwrap();
        let s = x.add(&y).unwrap();
        prop_assert_eq!(ideal_lim(&s, &i).unwrap().limit, Some(lx + qi(2)));
        for n in 1..100 {
            prop_assert_eq!(s.eval(n).unwrap(), x.eval(n).unwrap() + y.eval(n).unwrap());
        }
    }
}
