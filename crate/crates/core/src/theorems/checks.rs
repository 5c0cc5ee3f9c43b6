//! The catalog. Each entry pairs an instance generator with a property.
//!
//! Quantifiers over all neighbourhoods or all open supersets reduce to the
//! finitely many critical radii around piece-limits: level-set membership is
//! constant between consecutive distances from a piece-limit.

use std::collections::BTreeSet;
use std::fmt::Display;

use num_traits::{Signed, Zero};

use super::gen::{Gen, Profile};
use super::{Instance, DEFAULT_EXACT_TRIALS, DEFAULT_ORACLE_TRIALS};
use crate::ideals::IdealDesc;
use crate::natset::{ApSet, ExactSet};
use crate::rational::{format_q, q, qi, Q};
use crate::sequences::{
    closure_contains, cluster_points, compress, critical_radii, decompose, decompose_double, equivalent,
    far_set, filter_base_closures, fin_converges_on, fin_limit, ideal_lim, ideal_included, istar_lim, join_q,
    limit_points, near_set, piece_infos, piece_limits, separating_witness, set_member,
    smallest_closed_attractor_check, GenTerm, SeqError, SymSeq, TermLimit, POINTWISE_CHECK,
};

type Outcome = Result<(), String>;

pub struct Entry {
    pub id: &'static str,
    pub generate: fn(&mut Gen) -> Instance,
    pub property: fn(&Instance) -> Outcome,
    /// Relies on the numeric density oracle.
    pub oracle: bool,
}

impl Entry {
    pub fn default_trials(&self) -> u64 {
        if self.oracle { DEFAULT_ORACLE_TRIALS } else { DEFAULT_EXACT_TRIALS }
    }
}

fn s<E: Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond { Ok(()) } else { Err(msg()) }
}

fn gamma(x: &SymSeq, i: &IdealDesc) -> Result<Vec<Q>, String> {
    cluster_points(x, i).map(|c| c.points).map_err(s)
}

fn lambda(x: &SymSeq, i: &IdealDesc) -> Result<Vec<Q>, String> {
    limit_points(x, i).map(|c| c.points).map_err(s)
}

fn set_of(v: &[Q]) -> BTreeSet<Q> {
    v.iter().cloned().collect()
}

fn show(v: &[Q]) -> String {
    format!("{{{}}}", join_q(v))
}

fn universe(x: &SymSeq) -> ExactSet {
    x.frame().map_or_else(ExactSet::full, |f| f.clone().into())
}

// generators

fn generic(g: &mut Gen) -> Instance {
    g.instance(Profile::Generic)
}

fn convergent(g: &mut Gen) -> Instance {
    g.instance(Profile::Convergent)
}

fn mixed(g: &mut Gen) -> Instance {
    if g.chance(0.5) { convergent(g) } else { generic(g) }
}

fn with_ideal(mut inst: Instance, i: IdealDesc, g: &mut Gen, converge: bool) -> Instance {
    inst.ideal = i;
    if converge {
        inst.seq = g.make_convergent(&inst.seq, &inst.ideal, None);
    }
    inst
}

fn convergent_p(g: &mut Gen) -> Instance {
    let i = g.p_ideal();
    let inst = generic(g);
    with_ideal(inst, i, g, true)
}

fn mixed_g(g: &mut Gen) -> Instance {
    let i = g.g_ideal();
    let c = g.chance(0.5);
    let mut inst = with_ideal(generic(g), i, g, c);
    inst.sets.push(g.small_finite());
    inst
}

fn mixed_z(g: &mut Gen) -> Instance {
    let c = g.chance(0.5);
    let mut inst = with_ideal(generic(g), IdealDesc::z(), g, c);
    inst.sets.push(g.small_finite());
    inst
}

fn with_members(g: &mut Gen) -> Instance {
    let mut inst = generic(g);
    for _ in 0..3 {
        let m = g.member_of(&inst.ideal);
        inst.sets.push(m);
    }
    inst
}

fn mutated(g: &mut Gen) -> Instance {
    let mut inst = generic(g);
    let m = g.member_of(&inst.ideal);
    let t = g.term(&m, 0.2);
    inst.other = Some(inst.seq.overwrite(&m, t).expect("unframed"));
    inst.sets.push(m);
    inst
}

fn avoid(limits: &[Q], mut v: Q) -> Q {
    while limits.contains(&v) {
        v += q(1, 97);
    }
    v
}

fn compact_window(g: &mut Gen) -> Instance {
    let mut inst = mixed(g);
    let limits = piece_limits(&piece_infos(&inst.seq, &inst.ideal).expect("exact"));
    let centre = if !limits.is_empty() && g.chance(0.6) {
        limits[g.below(limits.len() as u64) as usize].clone()
    } else {
        g.rat()
    };
    let a = avoid(&limits, &centre - g.rat().abs() - q(1, 3));
    let b = avoid(&limits, &centre + g.rat().abs() + q(1, 3));
    inst.intervals.push((a, b));
    inst
}

fn double(g: &mut Gen) -> Instance {
    let mut inst = Instance::new(SymSeq::constant(qi(0)), IdealDesc::density_pr());
    let d = g.double_seq();
    let vals: Vec<Q> = d.piece_values().cloned().collect();
    let l = if !vals.is_empty() && g.chance(0.3) {
        vals[g.below(vals.len() as u64) as usize].clone()
    } else {
        d.default_value().clone()
    };
    inst.values.push(l);
    inst.double = Some(d);
    inst
}

fn intervals(g: &mut Gen) -> Vec<(Q, Q)> {
    let k = g.below(3) + 1;
    let mut out = vec![];
    let mut lo = -qi(10) + g.rat().abs();
    for _ in 0..k {
        let a = lo.clone();
        let b = &a + g.rat().abs() / qi(2);
        lo = &b + q(1, 2) + g.rat().abs() / qi(3);
        out.push((a, b));
    }
    out
}

fn easy(g: &mut Gen) -> Instance {
    let mut inst = generic(g);
    inst.intervals = intervals(g);
    for _ in 0..3 {
        let (a, b) = inst.intervals[g.below(inst.intervals.len() as u64) as usize].clone();
        let f = g.rat_in(&a, &b);
        inst.values.push(f);
    }
    inst
}

fn f_valued(g: &mut Gen) -> Instance {
    let ivs = intervals(g);
    let parts = g.supports();
    let terms: Vec<GenTerm> = parts
        .iter()
        .map(|p| {
            let (a, b) = ivs[g.below(ivs.len() as u64) as usize].clone();
            g.bounded_term(p, &a, &b)
        })
        .collect();
    let x = SymSeq::from_parts(parts.into_iter().zip(terms)).expect("partition");
    let mut inst = Instance::new(x, g.omega_ideal());
    inst.intervals = ivs;
    inst
}

fn bounded_mostly(g: &mut Gen) -> Instance {
    let i = g.omega_ideal();
    Instance::new(g.generic_seq(0.05), i)
}

fn partition_only(g: &mut Gen) -> Instance {
    let parts = g.partition();
    let terms: Vec<GenTerm> = parts.iter().map(|p| g.term(p, 0.0)).collect();
    let x = SymSeq::from_parts(parts.into_iter().zip(terms)).expect("partition");
    Instance::new(x, IdealDesc::fin())
}

// properties

fn passing_candidates(x: &SymSeq, i: &IdealDesc) -> Result<Vec<Q>, String> {
    let infos = piece_infos(x, i).map_err(s)?;
    let limits = piece_limits(&infos);
    let mut out = vec![];
    for l in &limits {
        let mut ok = true;
        for eps in critical_radii(&limits, l) {
            ok &= set_member(i, &far_set(x, &infos, l, &eps).map_err(s)?).map_err(s)?;
        }
        if ok {
            out.push(l.clone());
        }
    }
    Ok(out)
}

fn t1_i(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let winners = passing_candidates(x, i)?;
    ensure(winners.len() <= 1, || format!("several {}-limits {}", i.name(), show(&winners)))?;
    let lim = ideal_lim(x, i).map_err(s)?.limit;
    ensure(lim.as_ref() == winners.first(), || "ideal_lim disagrees with the candidate scan".into())?;
    if let Some(st) = istar_lim(x, i).map_err(s)? {
        let infos = piece_infos(x, i).map_err(s)?;
        for l in piece_limits(&infos) {
            if l != st.limit {
                ensure(!fin_converges_on(&infos, &st.witness, &l).map_err(s)?, || {
                    format!("witness converges to both {} and {}", format_q(&st.limit), format_q(&l))
                })?;
            }
        }
        ensure(winners == vec![st.limit.clone()], || "I*-limit is not the I-limit".into())?;
    }
    Ok(())
}

fn verify_istar(x: &SymSeq, i: &IdealDesc, l: &Q, a: &ExactSet) -> Outcome {
    let small = universe(x).difference(a).map_err(s)?;
    ensure(set_member(i, &small).map_err(s)?, || format!("complement of the witness {small} is not in {}", i.name()))?;
    let infos = piece_infos(x, i).map_err(s)?;
    ensure(fin_converges_on(&infos, a, l).map_err(s)?, || format!("restriction to {a} does not converge"))
}

fn t1_ii(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    if let Some(st) = istar_lim(x, i).map_err(s)? {
        verify_istar(x, i, &st.limit, &st.witness)?;
        let l = ideal_lim(x, i).map_err(s)?.limit;
        ensure(l.as_ref() == Some(&st.limit), || "I*-limit without matching I-limit".into())?;
    }
    Ok(())
}

fn t1_iii(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    ensure(i.is_p(), || format!("{} is not a P-ideal", i.name()))?;
    let Some(l) = ideal_lim(x, i).map_err(s)?.limit else {
        return Err("convergent instance has no limit".into());
    };
    let st = istar_lim(x, i).map_err(s)?.ok_or_else(|| format!("no I*-limit although the {}-limit is {}", i.name(), format_q(&l)))?;
    ensure(st.limit == l, || "I*-limit differs".into())?;
    verify_istar(x, i, &l, &st.witness)
}

fn cofinite(inst: &Instance) -> Result<ApSet, String> {
    let f = inst.sets.first().and_then(ExactSet::as_ap).cloned().unwrap_or_else(ApSet::empty);
    Ok(ApSet::full().difference(&f))
}

fn t1_iv(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    ensure(i.is_g(), || format!("{} is not a G-ideal", i.name()))?;
    let a = cofinite(inst)?;
    let y = x.subseq_on(&a).map_err(s)?;
    let lx = ideal_lim(x, i).map_err(s)?.limit;
    let ly = ideal_lim(&y, i).map_err(s)?.limit;
    ensure(lx == ly, || format!("limit {lx:?} but {ly:?} along {a}"))
}

fn c1(inst: &Instance) -> Outcome {
    let (x, z) = (&inst.seq, &IdealDesc::z());
    let l = ideal_lim(x, z).map_err(s)?.limit;
    let st = istar_lim(x, z).map_err(s)?;
    ensure(l.is_some() == st.is_some(), || "statistical convergence without a dense convergent subsequence".into())?;
    if let Some(st) = st {
        verify_istar(x, z, &st.limit, &st.witness)?;
    }
    let a = cofinite(inst)?;
    let la = ideal_lim(&x.subseq_on(&a).map_err(s)?, z).map_err(s)?.limit;
    ensure(la == l, || format!("subsequence along {a} has limit {la:?}"))
}

fn c2(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let l = ideal_lim(x, i).map_err(s)?.limit.ok_or("convergent instance has no limit")?;
    let d = decompose(x, i, &l).map_err(s)?;
    let y = SymSeq::from_json(&d.y.to_json()).map_err(s)?;
    let z = SymSeq::from_json(&d.z.to_json()).map_err(s)?;
    if let Some(n) = x.first_sum_mismatch(&y, &z, POINTWISE_CHECK).map_err(s)? {
        return Err(format!("x ≠ y + z at {n}"));
    }
    for n in 1..=POINTWISE_CHECK {
        ensure(z.is_zero_at(n).map_err(s)? != d.z_support.contains(n), || format!("support of z is wrong at {n}"))?;
    }
    ensure(fin_limit(&y).map_err(s)? == Some(l), || "y does not converge to the limit".into())?;
    ensure(set_member(i, &d.z_support).map_err(s)?, || format!("support of z is not in {}", i.name()))
}

fn d_double(inst: &Instance) -> Outcome {
    let x = inst.double.as_ref().ok_or("missing double sequence")?;
    let l = inst.values.first().ok_or("missing target")?;
    let zpr = IdealDesc::density_pr();
    let conv = x.converges_to(&zpr, l).map_err(s)?;
    if x.converges_to(&IdealDesc::pringsheim(), l).map_err(s)? {
        ensure(conv, || "Pringsheim convergence without statistical convergence".into())?;
    }
    match decompose_double(x, l) {
        Ok(d) => {
            ensure(conv, || "decomposed a non-convergent double sequence".into())?;
            ensure(d.y.converges_to(&IdealDesc::pringsheim(), l).map_err(s)?, || "y does not converge".into())?;
            ensure(crate::ideals::member_pairs(&zpr, &d.z_support).map_err(s)?, || "support of z is not in zpr".into())?;
            for n in 1..=24 {
                for m in 1..=24 {
                    let (xv, yv, zv) = (x.eval(n, m).map_err(s)?, d.y.eval(n, m).map_err(s)?, d.z.eval(n, m).map_err(s)?);
                    ensure(xv == &yv + &zv, || format!("x ≠ y + z at ({n},{m})"))?;
                    ensure(zv.is_zero() != d.z_support.contains((n, m)), || format!("support of z is wrong at ({n},{m})"))?;
                }
            }
            Ok(())
        }
        Err(SeqError::NotConvergent(_)) => ensure(!conv, || "convergent double sequence was not decomposed".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn l3_i(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let j = inst.ideal2.as_ref().ok_or("missing smaller ideal")?;
    let (gi, gj) = (set_of(&gamma(x, i)?), set_of(&gamma(x, j)?));
    let (li, lj) = (set_of(&lambda(x, i)?), set_of(&lambda(x, j)?));
    ensure(gi.is_subset(&gj), || format!("Γ({}) ⊄ Γ({})", i.name(), j.name()))?;
    ensure(li.is_subset(&lj), || format!("Λ({}) ⊄ Λ({})", i.name(), j.name()))
}

fn l3_ii(inst: &Instance) -> Outcome {
    let fin = IdealDesc::fin();
    let (g, l) = (gamma(&inst.seq, &fin)?, lambda(&inst.seq, &fin)?);
    ensure(g == l, || format!("Γ(fin) = {} but Λ(fin) = {}", show(&g), show(&l)))
}

fn l3_iii(inst: &Instance) -> Outcome {
    let (g, l) = (gamma(&inst.seq, &inst.ideal)?, lambda(&inst.seq, &inst.ideal)?);
    ensure(set_of(&l).is_subset(&set_of(&g)), || format!("Λ = {} ⊄ Γ = {}", show(&l), show(&g)))
}

fn l3_iv(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let g = gamma(x, i)?;
    let infos = piece_infos(x, i).map_err(s)?;
    let limits = piece_limits(&infos);
    ensure(g.iter().all(|p| limits.contains(p)), || "cluster point that is not a piece-limit".into())?;
    for l in limits.iter().filter(|l| !g.contains(l)) {
        let eps = critical_radii(&limits, l).remove(0);
        let near = near_set(x, &infos, l, &eps).map_err(s)?;
        ensure(set_member(i, &near).map_err(s)?, || format!("no small neighbourhood of {}", format_q(l)))?;
        ensure(g.iter().all(|p| (p - l).abs() >= eps), || format!("cluster points accumulate at {}", format_q(l)))?;
    }
    Ok(())
}

fn l3_v(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let y = inst.other.as_ref().ok_or("missing mutated sequence")?;
    ensure(equivalent(x, y, i).map_err(s)?, || "mutation on a member of the ideal is not equivalent".into())?;
    ensure(gamma(x, i)? == gamma(y, i)?, || "Γ changed under mutation".into())?;
    ensure(lambda(x, i)? == lambda(y, i)?, || "Λ changed under mutation".into())
}

/// Union of the supports whose tail lies in `K`, as decided by `inside`.
fn tail_mass(x: &SymSeq, i: &IdealDesc, inside: impl Fn(&Option<TermLimit>, &GenTerm) -> bool) -> Result<bool, String> {
    let infos = piece_infos(x, i).map_err(s)?;
    let sets: Vec<&ExactSet> = infos.iter().filter(|p| inside(&p.limit, &p.term)).map(|p| &p.support).collect();
    let u = ExactSet::union_all(sets).map_err(s)?;
    Ok(!set_member(i, &u).map_err(s)?)
}

fn l3_vi(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let (a, b) = inst.intervals.first().ok_or("missing interval")?;
    let positive = tail_mass(x, i, |l, _| matches!(l, Some(TermLimit::Finite(v)) if a < v && v < b))?;
    if positive {
        let g = gamma(x, i)?;
        ensure(g.iter().any(|p| a <= p && p <= b), || {
            format!("{{x_n ∈ [{}, {}]}} is positive but Γ = {}", format_q(a), format_q(b), show(&g))
        })?;
    }
    Ok(())
}

fn l3_vii(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    if let Some(st) = istar_lim(x, i).map_err(s)? {
        let want = vec![st.limit.clone()];
        ensure(gamma(x, i)? == want && lambda(x, i)? == want, || "I*-limit does not collapse Γ and Λ".into())?;
    }
    Ok(())
}

fn l_conv(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    for n in 1..=64 {
        let v = x.eval(n).map_err(s)?;
        ensure(v >= qi(0) && v <= qi(1), || format!("x_{n} = {} leaves [0, 1]", format_q(&v)))?;
    }
    let infos = piece_infos(x, i).map_err(s)?;
    ensure(!infos.iter().any(|p| p.is_unbounded()), || "unbounded piece in a compact-valued instance".into())?;
    let g = gamma(x, i)?;
    ensure(!g.is_empty(), || "compact-valued sequence without cluster points".into())?;
    if let [l] = g.as_slice() {
        let lim = ideal_lim(x, i).map_err(s)?.limit;
        ensure(lim.as_ref() == Some(l), || format!("Γ = {{{}}} but the limit is {lim:?}", format_q(l)))?;
        if i.is_p() {
            let st = istar_lim(x, i).map_err(s)?;
            ensure(st.is_some_and(|st| &st.limit == l), || "no I*-limit".into())?;
        }
    }
    Ok(())
}

fn c_k(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let escapes = tail_mass(x, i, |l, _| matches!(l, Some(TermLimit::Unbounded)))?;
    if escapes {
        return Ok(());
    }
    let g = gamma(x, i)?;
    let lim = ideal_lim(x, i).map_err(s)?.limit;
    let single = if g.len() == 1 { g.first().cloned() } else { None };
    ensure(lim == single, || format!("limit {lim:?} but Γ = {}", show(&g)))
}

fn group_pair(inst: &Instance) -> Result<(&SymSeq, &SymSeq, SymSeq), String> {
    let y = inst.other.as_ref().ok_or("missing second sequence")?;
    let d = inst.seq.sub(y).map_err(s)?;
    Ok((&inst.seq, y, d))
}

fn l_grp_i(inst: &Instance) -> Outcome {
    let i = &inst.ideal;
    let (x, y, d) = group_pair(inst)?;
    if ideal_lim(&d, i).map_err(s)?.limit == Some(Q::zero()) {
        ensure(gamma(x, i)? == gamma(y, i)?, || "Γ differs although x − y → 0".into())?;
    }
    Ok(())
}

fn l_grp_ii(inst: &Instance) -> Outcome {
    let i = &inst.ideal;
    let (x, y, d) = group_pair(inst)?;
    if istar_lim(&d, i).map_err(s)?.is_some_and(|st| st.limit.is_zero()) {
        ensure(lambda(x, i)? == lambda(y, i)?, || "Λ differs although x − y →* 0".into())?;
    }
    Ok(())
}

fn l_cl(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let j = inst.ideal2.as_ref().ok_or("missing smaller ideal")?;
    ensure(ideal_included(j, i), || "pair is not nested".into())?;
    let c = compress(x, i, j).map_err(s)?;
    let (gx, gy) = (gamma(x, i)?, gamma(&c.y, j)?);
    ensure(gx == gy, || format!("Γ_x({}) = {} but Γ_y({}) = {}", i.name(), show(&gx), j.name(), show(&gy)))?;
    ensure(equivalent(x, &c.y, i).map_err(s)?, || "compressed sequence is not equivalent".into())?;
    ensure(set_member(i, &c.overwritten).map_err(s)?, || "overwritten set is not small".into())
}

fn in_union(f: &[(Q, Q)], v: &Q) -> bool {
    f.iter().any(|(a, b)| a <= v && v <= b)
}

fn l_easy(inst: &Instance) -> Outcome {
    let i = &inst.ideal;
    for f in &inst.values {
        ensure(in_union(&inst.intervals, f), || "sampled point outside F".into())?;
        let c = SymSeq::constant(f.clone());
        let want = vec![f.clone()];
        ensure(gamma(&c, i)? == want && lambda(&c, i)? == want, || format!("constant {} has other cluster points", format_q(f)))?;
    }
    Ok(())
}

fn t_top(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let f = &inst.intervals;
    for n in 1..=128 {
        let v = x.eval(n).map_err(s)?;
        ensure(in_union(f, &v), || format!("x_{n} = {} is outside F", format_q(&v)))?;
    }
    let g = gamma(x, i)?;
    ensure(g.iter().all(|p| in_union(f, p)), || format!("Γ = {} leaves F", show(&g)))?;
    let ordinary = set_of(&gamma(x, &IdealDesc::fin())?);
    ensure(g.iter().all(|p| ordinary.contains(p)), || "cluster point that is not an ordinary limit point".into())
}

fn separations(x: &SymSeq, i: &IdealDesc, g: &[Q]) -> Outcome {
    let limits = piece_limits(&piece_infos(x, i).map_err(s)?);
    for l in limits.iter().filter(|l| !g.contains(l)) {
        let j = separating_witness(x, i, l).map_err(s)?.ok_or_else(|| format!("no separating witness for {}", format_q(l)))?;
        ensure(set_member(i, &j).map_err(s)?, || "separating witness is not in the ideal".into())?;
        ensure(!closure_contains(x, i, &j, l).map_err(s)?, || format!("{} still in the closure off {j}", format_q(l)))?;
    }
    Ok(())
}

fn l_fb(inst: &Instance) -> Outcome {
    let g = gamma(&inst.seq, &inst.ideal)?;
    separations(&inst.seq, &inst.ideal, &g)
}

fn t_fb(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let g = gamma(x, i)?;
    let closures = filter_base_closures(x, i, &inst.sets).map_err(s)?;
    ensure(set_of(&g).is_subset(&set_of(&closures.points)), || "Γ is not inside the closures".into())?;
    for j in &inst.sets {
        for p in &g {
            ensure(closure_contains(x, i, j, p).map_err(s)?, || format!("{} missing from the closure off {j}", format_q(p)))?;
        }
    }
    separations(x, i, &g)
}

fn t_attr(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let g = gamma(x, i)?;
    let points: Vec<(Q, Q)> = g.iter().map(|p| (p.clone(), p.clone())).collect();
    let v = match smallest_closed_attractor_check(x, i, &points) {
        Err(SeqError::HypothesisViolated(_)) => return Ok(()),
        other => other.map_err(s)?,
    };
    ensure(v.holds && v.minimal, || "Γ does not attract".into())?;
    for k in 0..points.len() {
        let mut fewer = points.clone();
        fewer.remove(k);
        let w = smallest_closed_attractor_check(x, i, &fewer).map_err(s)?;
        ensure(!w.holds, || format!("Γ minus {} still attracts", format_q(&points[k].0)))?;
    }
    let wide: Vec<(Q, Q)> = g.iter().map(|p| (p - q(1, 7), p + q(1, 5))).collect();
    let w = smallest_closed_attractor_check(x, i, &wide).map_err(s)?;
    ensure(w.holds && w.contains_gamma && (g.is_empty() || !w.minimal), || "a neighbourhood of Γ fails".into())
}

// negative controls

/// `{S : S ∩ evens finite}`, an ideal that does not survive re-indexing.
fn even_trace_small(s: &ExactSet) -> Result<bool, String> {
    Ok(s.intersect(&ApSet::evens().into()).map_err(s_err)?.is_finite())
}

fn s_err<E: Display>(e: E) -> String {
    e.to_string()
}

fn lim_by(x: &SymSeq, small: fn(&ExactSet) -> Result<bool, String>) -> Result<Option<Q>, String> {
    let infos = piece_infos(x, &IdealDesc::fin()).map_err(s)?;
    let limits = piece_limits(&infos);
    for l in &limits {
        let mut ok = true;
        for eps in critical_radii(&limits, l) {
            ok &= small(&far_set(x, &infos, l, &eps).map_err(s)?)?;
        }
        if ok {
            return Ok(Some(l.clone()));
        }
    }
    Ok(None)
}

fn nc_non_g(inst: &Instance) -> Outcome {
    let x = &inst.seq;
    let y = x.subseq_on(&ApSet::evens()).map_err(s)?;
    let (lx, ly) = (lim_by(x, even_trace_small)?, lim_by(&y, even_trace_small)?);
    ensure(lx == ly, || format!("limit {lx:?} but {ly:?} along the evens"))
}

fn nc_l3_vi(inst: &Instance) -> Outcome {
    let (x, i) = (&inst.seq, &inst.ideal);
    let infos = piece_infos(x, i).map_err(s)?;
    let a = piece_limits(&infos).last().cloned().unwrap_or_else(Q::zero) + qi(1);
    // K = [a, ∞) is closed but not compact
    let positive = tail_mass(x, i, |l, t| {
        matches!(l, Some(TermLimit::Unbounded)) && t.growth.first().is_some_and(|g| g.c.is_positive())
    })?;
    if positive {
        let g = gamma(x, i)?;
        ensure(g.iter().any(|p| p >= &a), || format!("{{x_n ≥ {}}} is positive but Γ = {}", format_q(&a), show(&g)))?;
    }
    Ok(())
}

fn unbounded_heavy(g: &mut Gen) -> Instance {
    let i = g.omega_ideal();
    Instance::new(g.generic_seq(0.5), i)
}

fn dual(g: &mut Gen) -> Instance {
    g.instance(Profile::DualPair)
}

fn compact(g: &mut Gen) -> Instance {
    g.instance(Profile::CompactValued)
}

fn group(g: &mut Gen) -> Instance {
    g.instance(Profile::GroupPair)
}

macro_rules! entry {
    ($id:expr, $gen:expr, $prop:expr) => {
        Entry { id: $id, generate: $gen, property: $prop, oracle: false }
    };
}

static CATALOG: [Entry; 24] = [
    entry!("T1.i", mixed, t1_i),
    entry!("T1.ii", mixed, t1_ii),
    entry!("T1.iii", convergent_p, t1_iii),
    entry!("T1.iv", mixed_g, t1_iv),
    entry!("C1", mixed_z, c1),
    entry!("C2", convergent_p, c2),
    entry!("D-double", double, d_double),
    entry!("L3.i", dual, l3_i),
    entry!("L3.ii", generic, l3_ii),
    entry!("L3.iii", generic, l3_iii),
    entry!("L3.iv", generic, l3_iv),
    entry!("L3.v", mutated, l3_v),
    entry!("L3.vi", compact_window, l3_vi),
    entry!("L3.vii", mixed, l3_vii),
    entry!("L-conv", compact, l_conv),
    entry!("C-K", mixed, c_k),
    entry!("L-grp.i", group, l_grp_i),
    entry!("L-grp.ii", group, l_grp_ii),
    entry!("L-Cl", dual, l_cl),
    entry!("L-easy", easy, l_easy),
    entry!("T-top", f_valued, t_top),
    entry!("L-fb", generic, l_fb),
    entry!("T-fb", with_members, t_fb),
    entry!("T-attr", bounded_mostly, t_attr),
];

static CONTROLS: [Entry; 2] = [entry!("NC.nonG", partition_only, nc_non_g), entry!("NC.L3.vi", unbounded_heavy, nc_l3_vi)];

pub fn catalog() -> &'static [Entry] {
    &CATALOG
}

/// Deliberately falsified variants that must fail.
pub fn controls() -> &'static [Entry] {
    &CONTROLS
}
