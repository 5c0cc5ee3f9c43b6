//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines are printed even when everything passes.

use std::process::ExitCode;
use std::time::Instant;

use ideals::density::{lower_density, polya_upper, prefix_oracle, upper_density, OracleConfig};
use ideals::ideals::{member_pairs, IdealDesc};
use ideals::natset::{ApSet, BlockSet, GeneralSet, NatSet};
use ideals::rational::{format_q, q, qi, to_f64, Q};
use ideals::sequences::{
    cluster_points, decompose, decompose_double, fin_limit, ideal_lim, limit_points, set_member, DoubleSeq, GenTerm,
    SymSeq, POINTWISE_CHECK,
};
use ideals::theorems::{self, Gen};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn squares_example() -> Result<SymSeq, String> {
    let sq = ideals::natset::ExactSet::squares();
    let rest = sq.complement();
    SymSeq::from_parts([(sq, GenTerm::constant(qi(1))), (rest, GenTerm::constant(qi(0)))]).map_err(e)
}

fn c1() -> Outcome {
    let x = squares_example()?;
    let z = ideal_lim(&x, &IdealDesc::z()).map_err(e)?;
    ensure(z.limit == Some(qi(0)), || format!("Z-limit {:?}", z.limit))?;
    let f = ideal_lim(&x, &IdealDesc::fin()).map_err(e)?;
    ensure(f.limit.is_none(), || format!("Fin-limit {:?}", f.limit))?;
    let d = decompose(&x, &IdealDesc::fin(), &qi(0));
    ensure(d.is_err(), || "Fin decomposition should be refused".into())?;
    Ok("Z-limit 0, Fin: NotConvergent".into())
}

fn c2() -> Outcome {
    let x = SymSeq::from_parts([
        (ApSet::evens().into(), GenTerm::unbounded(qi(1))),
        (ApSet::odds().into(), GenTerm::constant(qi(0))),
    ])
    .map_err(e)?;
    let z = IdealDesc::z();
    let g = cluster_points(&x, &z).map_err(e)?;
    let l = limit_points(&x, &z).map_err(e)?;
    ensure(g.points == vec![qi(0)] && l.points == vec![qi(0)], || format!("Γ {:?}, Λ {:?}", g.points, l.points))?;
    let lim = ideal_lim(&x, &z).map_err(e)?;
    ensure(lim.limit.is_none(), || format!("limit {:?}", lim.limit))?;
    Ok("Γ = Λ = {0}, no Z-limit".into())
}

fn within(r: &ideals::density::DensityReport, want: &Q, lo: bool) -> bool {
    let end = if lo { &r.lo } else { &r.hi };
    (to_f64(end) - to_f64(want)).abs() <= 1e-2
}

fn c3() -> Outcome {
    let cfg = OracleConfig::default();
    let evens: NatSet = ApSet::evens().into();
    let d = upper_density(&evens, &cfg);
    ensure(d.exact && d.lo == q(1, 2), || format!("d*(evens) = {d}"))?;
    let g = BlockSet::even_octaves();
    let gs: NatSet = g.clone().into();
    let exact = (lower_density(&gs, &cfg), upper_density(&gs, &cfg), polya_upper(&gs, &cfg));
    let want = (q(1, 3), q(2, 3), qi(1));
    ensure(
        exact.0.exact && exact.1.exact && exact.2.exact && (&exact.0.lo, &exact.1.lo, &exact.2.lo) == (&want.0, &want.1, &want.2),
        || format!("exact G triple ({}, {}, {})", exact.0, exact.1, exact.2),
    )?;
    // the same set seen only through membership and counting
    let (a, b) = (g.clone(), g);
    let opaque: NatSet = GeneralSet::new("G", move |n| a.contains(n)).with_counter(move |n| b.count(n)).into();
    let big = OracleConfig::with_budget(10_000_000);
    let lo = lower_density(&opaque, &big);
    let hi = upper_density(&opaque, &big);
    let p = polya_upper(&opaque, &big);
    let both = prefix_oracle(&opaque, &big);
    ensure(within(&lo, &want.0, true) && within(&lo, &want.0, false), || format!("oracle d_* {lo}"))?;
    ensure(within(&hi, &want.1, true) && within(&hi, &want.1, false), || format!("oracle d* {hi}"))?;
    ensure(p.contains(&want.2) && within(&p, &want.2, true), || format!("oracle 𝔭* {p}"))?;
    ensure(within(&both, &want.0, true) && within(&both, &want.1, false), || format!("oracle range {both}"))?;
    Ok(format!("exact (1/3, 2/3, 1); oracle d_* {lo}, d* {hi}, 𝔭* {p}"))
}

fn c4() -> Outcome {
    let mut report = vec![];
    for seed in [42, 7, 1] {
        let t = Instant::now();
        let vs = theorems::run_all(seed);
        let bad: Vec<String> = vs
            .iter()
            .filter(|v| !v.pass)
            .map(|v| format!("{} ({})", v.id, v.counterexample.as_ref().map_or("", |c| c.explanation.as_str())))
            .collect();
        ensure(bad.is_empty(), || format!("seed {seed}: {}", bad.join(", ")))?;
        ensure(vs.len() == theorems::catalog().len(), || "catalog incomplete".into())?;
        report.push(format!("seed {seed}: {} checks in {:.1}s", vs.len(), t.elapsed().as_secs_f64()));
    }
    Ok(report.join("; "))
}

fn c5() -> Outcome {
    let mut report = vec![];
    for id in ["NC.nonG", "NC.L3.vi"] {
        let v = theorems::check(id, Some(500), 42).map_err(e)?;
        let c = v.counterexample.ok_or_else(|| format!("{id} found no counterexample"))?;
        report.push(format!("{id} fails at trial {}", c.trial));
    }
    Ok(report.join(", "))
}

fn c6() -> Outcome {
    let z = IdealDesc::z();
    let mut resets = 0;
    for t in 0..200 {
        let mut g = Gen::for_trial(42, "acceptance.decompose", t);
        let x = g.generic_seq(0.15);
        let x = g.make_convergent(&x, &z, None);
        let l = ideal_lim(&x, &z).map_err(e)?.limit.ok_or_else(|| format!("instance {t} has no Z-limit"))?;
        let d = decompose(&x, &z, &l).map_err(|err| format!("instance {t}: {err}"))?;
        ensure(x.first_sum_mismatch(&d.y, &d.z, POINTWISE_CHECK).map_err(e)?.is_none(), || format!("instance {t}: x ≠ y + z"))?;
        ensure(fin_limit(&d.y).map_err(e)?.as_ref() == Some(&l), || format!("instance {t}: y does not Fin-converge"))?;
        ensure(set_member(&z, &d.z_support).map_err(e)?, || format!("instance {t}: support of z not in Z"))?;
        for n in 1..=POINTWISE_CHECK {
            ensure(d.z.is_zero_at(n).map_err(e)? != d.z_support.contains(n), || format!("instance {t}: support wrong at {n}"))?;
        }
        resets += usize::from(!d.z_support.is_finite());
    }
    Ok(format!("200 instances, {resets} with infinite support of z"))
}

fn c7() -> Outcome {
    let zpr = IdealDesc::density_pr();
    let (mut done, mut t) = (0, 0);
    while done < 50 {
        let mut g = Gen::for_trial(42, "acceptance.double", t);
        t += 1;
        ensure(t < 5000, || "too few convergent double instances".into())?;
        let x: DoubleSeq = g.double_seq();
        let cands: Vec<Q> = x.piece_values().chain([x.default_value()]).cloned().collect();
        let mut l = None;
        for v in cands {
            if x.converges_to(&zpr, &v).map_err(e)? {
                l = Some(v);
                break;
            }
        }
        let Some(l) = l else { continue };
        let d = decompose_double(&x, &l).map_err(|err| format!("instance {t}: {err}"))?;
        ensure(d.y.converges_to(&IdealDesc::pringsheim(), &l).map_err(e)?, || format!("instance {t}: y"))?;
        ensure(member_pairs(&zpr, &d.z_support).map_err(e)?, || format!("instance {t}: support of z"))?;
        for n in 1..=40 {
            for m in 1..=40 {
                let sum = d.y.eval(n, m).map_err(e)? + d.z.eval(n, m).map_err(e)?;
                ensure(x.eval(n, m).map_err(e)? == sum, || format!("instance {t}: x ≠ y + z at ({n},{m})"))?;
            }
        }
        done += 1;
    }
    Ok(format!("50 convergent instances out of {t} drawn"))
}

fn c8() -> Outcome {
    let v = theorems::check("T-fb", Some(500), 42).map_err(e)?;
    match v.counterexample {
        None => Ok("500 instances, closures contain Γ, every other piece-limit separated".into()),
        Some(c) => Err(format!("trial {}: {}", c.trial, c.explanation)),
    }
}

fn c9() -> Outcome {
    let cfg = OracleConfig::with_budget(1_000_000);
    let mut widest = 0.0f64;
    for t in 0..500 {
        let mut g = Gen::for_trial(42, "acceptance.oracle", t);
        let m = g.below(60) + 1;
        let residues: Vec<u64> = (0..m).filter(|_| g.chance(0.4)).collect();
        let inc: Vec<u64> = (0..g.below(6)).map(|_| g.below(5000) + 1).collect();
        let exc: Vec<u64> = (0..g.below(6)).map(|_| g.below(5000) + 1).filter(|n| !inc.contains(n)).collect();
        let s = ApSet::new(m, residues, inc, exc).map_err(e)?;
        let exact = s.density();
        let r = prefix_oracle(&NatSet::from(s.clone()), &cfg);
        ensure(r.contains(&exact), || format!("{s}: oracle {r} misses {}", format_q(&exact)))?;
        widest = widest.max(to_f64(&r.width()));
    }
    Ok(format!("500 sets, widest interval {widest:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden example on the squares", c1),
        ("growing evens", c2),
        ("density engine", c3),
        ("theorem catalog", c4),
        ("negative controls", c5),
        ("decomposition round trip", c6),
        ("double decomposition", c7),
        ("filter base characterization", c8),
        ("oracle against exact densities", c9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of 9 passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
