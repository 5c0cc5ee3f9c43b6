//! Limits, cluster points and limit points of symbolic sequences.
//!
//! Every bounded piece converges to its piece-limit, so level sets
//! `{n : |x_n − ℓ| ≥ ε}` are unions of supports up to finitely many points,
//! and their ideal membership only changes when `ε` crosses a distance between
//! piece-limits. The finite exceptions are computed exactly: a term settles
//! within `δ` of its limit past an index obtained by inverting its index
//! chain, and the points below that index are scanned.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::symseq::{Piece, SymSeq};
use super::term::{GenTerm, TermLimit};
use super::SeqError;
use crate::density::OracleConfig;
use crate::ideals::{member, pideal_witness, Family, IdealDesc, IdealKind};
use crate::natset::{ApSet, ExactSet, NatSet};
use crate::rational::{format_q, qi, Q};

/// Most points a scan for finite exceptions may visit.
pub const EXCEPTION_SCAN_CAP: u64 = 5_000_000;

pub fn set_member(i: &IdealDesc, s: &ExactSet) -> Result<bool, SeqError> {
    Ok(member(i, &NatSet::Exact(s.clone()), &OracleConfig::default())?)
}

/// A piece with its asymptotics; `limit` is `None` for finite supports.
#[derive(Clone, Debug)]
pub struct PieceInfo {
    pub support: ExactSet,
    pub term: GenTerm,
    pub limit: Option<TermLimit>,
    pub in_ideal: bool,
}

impl PieceInfo {
    pub fn bounded_limit(&self) -> Option<&Q> {
        match &self.limit {
            Some(TermLimit::Finite(q)) => Some(q),
            _ => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self.limit, Some(TermLimit::Unbounded))
    }
}

pub fn piece_infos(x: &SymSeq, i: &IdealDesc) -> Result<Vec<PieceInfo>, SeqError> {
    x.effective_pieces()?
        .into_iter()
        .map(|Piece { support, term }| {
            let limit = if support.is_finite() { None } else { Some(term.limit()?) };
            let in_ideal = set_member(i, &support)?;
            Ok(PieceInfo { support, term, limit, in_ideal })
        })
        .collect()
}

/// Distinct limits of the infinite bounded pieces, ascending.
pub fn piece_limits(infos: &[PieceInfo]) -> Vec<Q> {
    let s: BTreeSet<Q> = infos.iter().filter_map(|p| p.bounded_limit().cloned()).collect();
    s.into_iter().collect()
}

/// The index universe in base coordinates.
fn universe(x: &SymSeq) -> ExactSet {
    match x.frame() {
        Some(f) => f.clone().into(),
        None => ExactSet::full(),
    }
}

pub(crate) fn scan_support(s: &ExactSet, below: u64) -> Result<Vec<u64>, SeqError> {
    let last = below.saturating_sub(1);
    if s.count(last) > EXCEPTION_SCAN_CAP {
        return Err(SeqError::Unsupported(format!("exception scan up to {below} exceeds the cap")));
    }
    Ok(s.elements_upto(below.saturating_sub(1)))
}

/// Points `n` of a piece passing `test`, given that it passes only on a
/// finite head.
fn head_points(p: &PieceInfo, center: &Q, eps: &Q, test: Dev) -> Result<Vec<u64>, SeqError> {
    let bound = match &p.limit {
        None => {
            let top = p.support.dense().max_correction() + 1;
            top.max(1)
        }
        Some(TermLimit::Unbounded) => p.term.escape_index(&(center.abs() + eps))?,
        Some(TermLimit::Finite(l)) => {
            let d = (l - center).abs();
            let delta = (&d - eps).abs();
            if delta.is_zero() {
                return Err(SeqError::Undecidable(format!("radius {} equals a piece distance", format_q(eps))));
            }
            p.term.settle_index(&delta)?
        }
    };
    let mut out = vec![];
    let pts = if p.limit.is_none() { p.support.elements_upto(bound) } else { scan_support(&p.support, bound)? };
    for n in pts {
        if holds_at(&p.term, n, center, test)? {
            out.push(n);
        }
    }
    Ok(out)
}

/// Tests on the deviation `|x_n − center|`.
#[derive(Clone, Copy)]
enum Dev<'a> {
    AtLeast(&'a Q),
    Below(&'a Q),
    Zero,
}

impl Dev<'_> {
    fn holds(self, d: &Q) -> bool {
        match self {
            Dev::AtLeast(e) => d >= e,
            Dev::Below(e) => d < e,
            Dev::Zero => d.is_zero(),
        }
    }

    fn threshold(self) -> Q {
        match self {
            Dev::AtLeast(e) | Dev::Below(e) => e.clone(),
            Dev::Zero => Q::zero(),
        }
    }
}

/// Decided on an enclosure when possible, since `ρ^k` far out is huge to write down.
fn holds_at(t: &GenTerm, n: u64, center: &Q, test: Dev) -> Result<bool, SeqError> {
    let (m, r) = t.enclose(n)?;
    let off = &m - center;
    if r.is_zero() {
        return Ok(test.holds(&off.abs()));
    }
    let near_dev = if off.abs() <= r { Q::zero() } else { off.abs() - &r };
    let far_dev = off.abs() + &r;
    if test.holds(&near_dev) == test.holds(&far_dev) {
        return Ok(test.holds(&near_dev));
    }
    // the exact part sits on the threshold and the tail's sign decides
    if off.abs() == test.threshold() {
        if let Some(sg) = t.far_tail_sign(n)? {
            if sg != 0 && (off.is_zero() || off.abs() > r) {
                let outward = off.is_zero() || (sg > 0) == off.is_positive();
                let dev = if outward { &far_dev } else { &near_dev };
                return Ok(test.holds(dev));
            }
        }
    }
    Ok(test.holds(&(t.eval(n)? - center).abs()))
}

/// Exact `{n : |x_n − center| ≥ eps}` in base coordinates.
pub fn far_set(x: &SymSeq, infos: &[PieceInfo], center: &Q, eps: &Q) -> Result<ExactSet, SeqError> {
    let _ = x;
    level_side(infos, center, eps, true)
}

/// Exact `{n : |x_n − center| < eps}` in base coordinates.
pub fn near_set(x: &SymSeq, infos: &[PieceInfo], center: &Q, eps: &Q) -> Result<ExactSet, SeqError> {
    let near = level_side(infos, center, eps, false)?;
    match x.frame() {
        Some(f) => Ok(near.intersect(&f.clone().into())?),
        None => Ok(near),
    }
}

/// The pieces partition ω, so one side of the level set is the union of the
/// pieces whose tails fall on that side, corrected on finitely many heads.
fn level_side(infos: &[PieceInfo], center: &Q, eps: &Q, far: bool) -> Result<ExactSet, SeqError> {
    let mut acc = ExactSet::empty();
    let mut add = BTreeSet::new();
    let mut remove = BTreeSet::new();
    for p in infos {
        let tail_far = match &p.limit {
            None => false,
            Some(TermLimit::Unbounded) => true,
            Some(TermLimit::Finite(l)) => (l - center).abs() > *eps,
        };
        let (keep, flip) = if far { (Dev::AtLeast(eps), Dev::Below(eps)) } else { (Dev::Below(eps), Dev::AtLeast(eps)) };
        if tail_far == far {
            acc = acc.union(&p.support)?;
            remove.extend(head_points(p, center, eps, flip)?);
        } else {
            add.extend(head_points(p, center, eps, keep)?);
        }
    }
    Ok(acc.with_points(&add, &remove)?)
}

/// Radii at which level-set membership can change around `center`: half the
/// smallest positive distance to a piece-limit, and the midpoints between
/// consecutive distances.
pub fn critical_radii(limits: &[Q], center: &Q) -> Vec<Q> {
    let d: BTreeSet<Q> = limits.iter().map(|l| (l - center).abs()).filter(|d| !d.is_zero()).collect();
    let d: Vec<Q> = d.into_iter().collect();
    if d.is_empty() {
        return vec![qi(1)];
    }
    let mut out = vec![&d[0] / qi(2)];
    for w in d.windows(2) {
        out.push((&w[0] + &w[1]) / qi(2));
    }
    out
}

#[derive(Clone, Debug)]
pub struct LevelCert {
    pub center: Q,
    pub eps: Q,
    /// `true` for `{|x_n − center| ≥ eps}`, `false` for `{|x_n − center| < eps}`.
    pub far: bool,
    pub set: ExactSet,
    pub in_ideal: bool,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub limit: Option<Q>,
    pub certificates: Vec<LevelCert>,
    pub reason: Option<String>,
}

/// The `I`-limit, with the level sets that certify it or rule out each candidate.
pub fn ideal_lim(x: &SymSeq, i: &IdealDesc) -> Result<LimitReport, SeqError> {
    let infos = piece_infos(x, i)?;
    let limits = piece_limits(&infos);
    let positive: Vec<&PieceInfo> = infos.iter().filter(|p| !p.in_ideal).collect();
    if let Some(p) = positive.iter().find(|p| p.is_unbounded()) {
        let reason = format!("unbounded piece on {} is {}-positive", p.support, i.name());
        return Ok(LimitReport { limit: None, certificates: vec![], reason: Some(reason) });
    }
    let positive_limits: BTreeSet<Q> = positive.iter().filter_map(|p| p.bounded_limit().cloned()).collect();
    let mut certificates = vec![];
    for l in &limits {
        let radii = critical_radii(&limits, l);
        let mut ok = true;
        for eps in radii {
            let set = far_set(x, &infos, l, &eps)?;
            let in_ideal = set_member(i, &set)?;
            ok &= in_ideal;
            if positive_limits.len() == 1 || !in_ideal {
                certificates.push(LevelCert { center: l.clone(), eps, far: true, set, in_ideal });
            }
            if !in_ideal {
                break;
            }
        }
        if ok {
            let certificates = certificates.into_iter().filter(|c| &c.center == l).collect();
            return Ok(LimitReport { limit: Some(l.clone()), certificates, reason: None });
        }
    }
    let reason = format!("{}-positive pieces have limits {{{}}}", i.name(), join_q(&positive_limits));
    Ok(LimitReport { limit: None, certificates, reason: Some(reason) })
}

pub fn join_q<'a>(it: impl IntoIterator<Item = &'a Q>) -> String {
    it.into_iter().map(format_q).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug)]
pub struct IStar {
    pub limit: Q,
    /// `A ∈ I*` along which the sequence converges; base coordinates when framed.
    pub witness: ExactSet,
}

/// `I*`-limit with a witness `A ∈ I*`. For P-ideals the witness is the
/// complement of the pseudo-union of the level family; otherwise the
/// complement of the widest single level set is tried.
pub fn istar_lim(x: &SymSeq, i: &IdealDesc) -> Result<Option<IStar>, SeqError> {
    let rep = ideal_lim(x, i)?;
    let Some(l) = rep.limit else { return Ok(None) };
    let infos = piece_infos(x, i)?;
    let sets: Vec<ExactSet> = rep.certificates.iter().filter(|c| c.far).map(|c| c.set.clone()).collect();
    let small: ExactSet = if i.is_p() {
        let fam = Family::Stabilizing(sets.into_iter().map(NatSet::Exact).collect());
        match pideal_witness(i, &fam, &OracleConfig::default())? {
            NatSet::Exact(e) => e,
            other => return Err(SeqError::Unsupported(format!("witness {} left the exact class", other.describe()))),
        }
    } else {
        sets.into_iter().next().unwrap_or_else(ExactSet::empty)
    };
    let witness = universe(x).difference(&small)?;
    if !fin_converges_on(&infos, &witness, &l)? {
        return Ok(None);
    }
    Ok(Some(IStar { limit: l, witness }))
}

/// The restriction to `a` converges to `l` in the ordinary sense.
pub fn fin_converges_on(infos: &[PieceInfo], a: &ExactSet, l: &Q) -> Result<bool, SeqError> {
    for p in infos {
        let s = p.support.intersect(a)?;
        if s.is_finite() {
            continue;
        }
        if p.bounded_limit() != Some(l) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ordinary limit of the whole sequence.
pub fn fin_limit(x: &SymSeq) -> Result<Option<Q>, SeqError> {
    let infos = piece_infos(x, &IdealDesc::fin())?;
    let limits = piece_limits(&infos);
    if infos.iter().any(PieceInfo::is_unbounded) || limits.len() != 1 {
        return Ok(None);
    }
    Ok(limits.into_iter().next())
}

#[derive(Clone, Debug)]
pub struct DivergentMass {
    pub support: ExactSet,
    pub in_ideal: bool,
}

#[derive(Clone, Debug)]
pub struct ClusterReport {
    pub points: Vec<Q>,
    pub divergent: Option<DivergentMass>,
    pub exact: bool,
    pub certificates: Vec<LevelCert>,
}

fn divergent_mass(infos: &[PieceInfo], i: &IdealDesc) -> Result<Option<DivergentMass>, SeqError> {
    let unb: Vec<&ExactSet> = infos.iter().filter(|p| p.is_unbounded()).map(|p| &p.support).collect();
    if unb.is_empty() {
        return Ok(None);
    }
    let support = ExactSet::union_all(unb)?;
    let in_ideal = set_member(i, &support)?;
    Ok(Some(DivergentMass { support, in_ideal }))
}

/// `Γ_x(I)`: piece-limits whose small balls have `I`-positive index sets.
pub fn cluster_points(x: &SymSeq, i: &IdealDesc) -> Result<ClusterReport, SeqError> {
    let infos = piece_infos(x, i)?;
    let limits = piece_limits(&infos);
    let mut points = vec![];
    let mut certificates = vec![];
    for l in &limits {
        let eps = critical_radii(&limits, l).into_iter().next().expect("nonempty");
        let set = near_set(x, &infos, l, &eps)?;
        let in_ideal = set_member(i, &set)?;
        if !in_ideal {
            points.push(l.clone());
        }
        certificates.push(LevelCert { center: l.clone(), eps, far: false, set, in_ideal });
    }
    Ok(ClusterReport { points, divergent: divergent_mass(&infos, i)?, exact: true, certificates })
}

/// `Λ_x(I)`: limits of subsequences along `I`-positive index sets. Each
/// positive bounded piece is such a subsequence; conversely a convergent
/// subsequence with positive index set must meet some piece with the same
/// limit in a positive set.
pub fn limit_points(x: &SymSeq, i: &IdealDesc) -> Result<ClusterReport, SeqError> {
    let infos = piece_infos(x, i)?;
    let mut points = BTreeSet::new();
    let mut certificates = vec![];
    for p in &infos {
        if let Some(l) = p.bounded_limit() {
            if !p.in_ideal {
                points.insert(l.clone());
                certificates.push(LevelCert { center: l.clone(), eps: Q::zero(), far: false, set: p.support.clone(), in_ideal: false });
            }
        }
    }
    Ok(ClusterReport {
        points: points.into_iter().collect(),
        divergent: divergent_mass(&infos, i)?,
        exact: true,
        certificates,
    })
}

/// `{n : x_n ≠ y_n} ∈ I`.
pub fn equivalent(x: &SymSeq, y: &SymSeq, i: &IdealDesc) -> Result<bool, SeqError> {
    if x.frame().is_some() || y.frame().is_some() {
        if x == y {
            return Ok(true);
        }
        return Err(SeqError::Unsupported("equivalence of framed subsequences".into()));
    }
    for a in x.pieces() {
        for b in y.pieces() {
            let cell = a.support.intersect(&b.support)?;
            if cell.is_empty() || set_member(i, &cell)? {
                continue;
            }
            let d = a.term.sub(&b.term);
            if d.is_zero() {
                continue;
            }
            let differs_cofinitely = match d.limit()? {
                TermLimit::Unbounded => true,
                TermLimit::Finite(q) if !q.is_zero() => true,
                // a single nonzero decay never vanishes
                TermLimit::Finite(_) => d.decays.len() == 1 && d.growth.is_empty(),
            };
            if differs_cofinitely {
                return Ok(false);
            }
            return Err(SeqError::Undecidable(format!("zeros of {d} on {cell}")));
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closures {
    /// Bounded accumulation values common to every closure.
    pub points: Vec<Q>,
    /// Every closure is unbounded.
    pub unbounded: bool,
}

fn accumulation(infos: &[PieceInfo], j: &ExactSet) -> Result<(BTreeSet<Q>, bool), SeqError> {
    let mut pts = BTreeSet::new();
    let mut unbounded = false;
    for p in infos {
        if p.support.difference(j)?.is_finite() {
            continue;
        }
        match &p.limit {
            Some(TermLimit::Finite(l)) => {
                pts.insert(l.clone());
            }
            Some(TermLimit::Unbounded) => unbounded = true,
            None => {}
        }
    }
    Ok((pts, unbounded))
}

/// Accumulation values of `{x_n : n ∉ J}` intersected over the witnesses.
pub fn filter_base_closures(x: &SymSeq, i: &IdealDesc, witnesses: &[ExactSet]) -> Result<Closures, SeqError> {
    let infos = piece_infos(x, i)?;
    let empty = [ExactSet::empty()];
    let ws: &[ExactSet] = if witnesses.is_empty() { &empty } else { witnesses };
    let mut common: Option<BTreeSet<Q>> = None;
    let mut unbounded = true;
    for j in ws {
        if !set_member(i, j)? {
            return Err(SeqError::Precondition(format!("witness {j} is not in {}", i.name())));
        }
        let (pts, unb) = accumulation(&infos, j)?;
        unbounded &= unb;
        common = Some(match common {
            None => pts,
            Some(c) => c.intersection(&pts).cloned().collect(),
        });
    }
    Ok(Closures { points: common.unwrap_or_default().into_iter().collect(), unbounded })
}

/// `v` lies in the closure of `{x_n : n ∉ J}`.
pub fn closure_contains(x: &SymSeq, i: &IdealDesc, j: &ExactSet, v: &Q) -> Result<bool, SeqError> {
    let infos = piece_infos(x, i)?;
    let (pts, _) = accumulation(&infos, j)?;
    if pts.contains(v) {
        return Ok(true);
    }
    for p in &infos {
        let off = PieceInfo { support: p.support.difference(j)?, ..p.clone() };
        let off = PieceInfo { limit: if off.support.is_finite() { None } else { off.limit.clone() }, ..off };
        let radius = match off.bounded_limit() {
            Some(l) => (l - v).abs() / qi(2),
            None => qi(1),
        };
        if !head_points(&off, v, &radius, Dev::Zero)?.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// For `ℓ ∉ Γ_x(I)`, some `J ∈ I` with `ℓ` outside the closure of `{x_n : n ∉ J}`.
pub fn separating_witness(x: &SymSeq, i: &IdealDesc, l: &Q) -> Result<Option<ExactSet>, SeqError> {
    let infos = piece_infos(x, i)?;
    let limits = piece_limits(&infos);
    let eps = critical_radii(&limits, l).into_iter().next().expect("nonempty");
    let j = near_set(x, &infos, l, &eps)?;
    if !set_member(i, &j)? {
        return Ok(None);
    }
    Ok(Some(j))
}

#[derive(Clone, Debug)]
pub struct AttractorVerdict {
    pub holds: bool,
    pub contains_gamma: bool,
    pub minimal: bool,
    pub gamma: Vec<Q>,
    /// The tested fattening radius.
    pub eps: Q,
}

fn dist_to(c: &[(Q, Q)], v: &Q) -> Option<Q> {
    c.iter()
        .map(|(a, b)| {
            if v < a {
                a - v
            } else if v > b {
                v - b
            } else {
                Q::zero()
            }
        })
        .min()
}

/// Whether `C` absorbs the sequence modulo `I`: `{n : x_n ∉ U} ∈ I` for every
/// open `U ⊇ C`. Level sets only change at the distances from piece-limits
/// to `C`, so the fattening by half the smallest positive distance decides it.
pub fn smallest_closed_attractor_check(x: &SymSeq, i: &IdealDesc, c: &[(Q, Q)]) -> Result<AttractorVerdict, SeqError> {
    if let Some((a, b)) = c.iter().find(|(a, b)| a > b) {
        return Err(SeqError::Invalid(format!("empty interval [{}, {}]", format_q(a), format_q(b))));
    }
    let infos = piece_infos(x, i)?;
    if let Some(m) = divergent_mass(&infos, i)? {
        if !m.in_ideal {
            return Err(SeqError::HypothesisViolated(format!(
                "unbounded mass on {} is not in {}",
                m.support,
                i.name()
            )));
        }
    }
    let gamma = cluster_points(x, i)?.points;
    let dists: Vec<Q> = infos
        .iter()
        .filter_map(|p| p.bounded_limit())
        .filter_map(|l| dist_to(c, l))
        .filter(|d| !d.is_zero())
        .collect();
    let eps = dists.iter().min().map(|d| d / qi(2)).unwrap_or_else(|| qi(1));
    let mut escaping = vec![];
    for p in &infos {
        let escapes = match &p.limit {
            None => false,
            Some(TermLimit::Unbounded) => true,
            Some(TermLimit::Finite(l)) => dist_to(c, l).is_none_or(|d| d > eps),
        };
        if escapes {
            escaping.push(&p.support);
        }
    }
    let holds = set_member(i, &ExactSet::union_all(escaping)?)?;
    let contains_gamma = gamma.iter().all(|g| dist_to(c, g).is_some_and(|d| d.is_zero()));
    let degenerate: BTreeSet<&Q> = c.iter().filter(|(a, b)| a == b).map(|(a, _)| a).collect();
    let minimal = holds
        && c.iter().all(|(a, b)| a == b)
        && degenerate.len() == gamma.len()
        && gamma.iter().all(|g| degenerate.contains(g));
    Ok(AttractorVerdict { holds, contains_gamma, minimal, gamma, eps })
}

/// Known inclusions `J ⊆ I` among the supported ideals on ω.
pub fn ideal_included(j: &IdealDesc, i: &IdealDesc) -> bool {
    use IdealKind::*;
    if j == i || j.kind == Fin {
        return j.ambient == i.ambient || j.kind == Fin;
    }
    match (&j.kind, &i.kind) {
        (SummableHarmonic, Density(_) | Polya) => true,
        (Polya, Density(b)) => b <= &Q::zero() && b >= &-qi(1),
        (Density(a), Density(b)) => b <= a,
        _ => false,
    }
}

/// Subsequence index sets for the reindexing checks must be exact and infinite.
pub fn require_infinite(s: &ApSet) -> Result<(), SeqError> {
    if s.is_finite() {
        return Err(SeqError::Invalid(format!("{s} is finite")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn ex2(a: i64, b: i64) -> SymSeq {
        let sq = ExactSet::squares();
        SymSeq::from_parts([(sq.complement(), GenTerm::constant(qi(a))), (sq, GenTerm::constant(qi(b)))]).unwrap()
    }

    fn ex3() -> SymSeq {
        SymSeq::from_parts([
            (ApSet::evens().into(), GenTerm::unbounded(qi(1))),
            (ApSet::odds().into(), GenTerm::constant(qi(0))),
        ])
        .unwrap()
    }

    fn residues3() -> SymSeq {
        SymSeq::from_parts((0..3).map(|r| (ApSet::residue_class(r, 3).into(), GenTerm::constant(qi(r as i64))))).unwrap()
    }

    #[test]
    fn golden_limits() {
        let x = ex2(0, 1);
        assert_eq!(ideal_lim(&x, &IdealDesc::z()).unwrap().limit, Some(qi(0)));
        assert_eq!(ideal_lim(&x, &IdealDesc::fin()).unwrap().limit, None);
        assert_eq!(ideal_lim(&ex3(), &IdealDesc::z()).unwrap().limit, None);
        let c = cluster_points(&ex3(), &IdealDesc::z()).unwrap();
        assert_eq!(c.points, vec![qi(0)]);
        assert!(!c.divergent.as_ref().unwrap().in_ideal);
        assert_eq!(limit_points(&ex3(), &IdealDesc::z()).unwrap().points, vec![qi(0)]);
        assert_eq!(cluster_points(&residues3(), &IdealDesc::z()).unwrap().points, vec![qi(0), qi(1), qi(2)]);
    }

    #[test]
    fn istar_witnesses() {
        let x = ex2(0, 1);
        let s = istar_lim(&x, &IdealDesc::z()).unwrap().unwrap();
        assert_eq!(s.limit, qi(0));
        assert_eq!(s.witness, ExactSet::squares().complement());
        let full = ExactSet::full();
        let h = SymSeq::from_parts([(full.clone(), GenTerm::harmonic(qi(0), qi(1), &full))]).unwrap();
        let s = istar_lim(&h, &IdealDesc::fin()).unwrap().unwrap();
        let _ = &full;
        assert_eq!(s.limit, qi(0));
        assert!(s.witness.complement().is_finite());
        let c = istar_lim(&SymSeq::constant(qi(3)), &IdealDesc::polya()).unwrap().unwrap();
        assert_eq!(c.limit, qi(3));
    }

    #[test]
    fn level_sets_are_exact() {
        let full = ExactSet::full();
        let evens: ExactSet = ApSet::evens().into();
        let x = SymSeq::from_parts([
            (evens.clone(), GenTerm::harmonic(qi(0), qi(3), &evens)),
            (evens.complement(), GenTerm::geometric(qi(1), qi(-2), q(1, 2), &evens.complement()).unwrap()),
        ])
        .unwrap();
        let infos = piece_infos(&x, &IdealDesc::z()).unwrap();
        for (c, e) in [(qi(0), q(1, 2)), (qi(1), q(1, 4)), (q(1, 2), q(1, 3))] {
            let f = far_set(&x, &infos, &c, &e).unwrap();
            for n in 1..400 {
                let v = x.eval(n).unwrap();
                assert_eq!(f.contains(n), (v - &c).abs() >= e, "n={n}");
            }
        }
        let _ = full;
    }

    #[test]
    fn equivalence() {
        let x = ex3();
        assert!(equivalent(&x, &x, &IdealDesc::z()).unwrap());
        assert!(!equivalent(&x, &SymSeq::constant(qi(0)), &IdealDesc::z()).unwrap());
        let m = x.overwrite(&ExactSet::squares(), GenTerm::constant(qi(9))).unwrap();
        assert!(equivalent(&x, &m, &IdealDesc::z()).unwrap());
        assert!(!equivalent(&x, &m, &IdealDesc::fin()).unwrap());
    }

    #[test]
    fn closures() {
        let z = IdealDesc::z();
        let x = ex2(0, 1);
        let sq = ExactSet::squares();
        let c = filter_base_closures(&x, &z, std::slice::from_ref(&sq)).unwrap();
        assert_eq!(c.points, vec![qi(0)]);
        let all = filter_base_closures(&x, &z, &[]).unwrap();
        assert_eq!(all.points, vec![qi(0), qi(1)]);
        let c3 = filter_base_closures(&ex3(), &z, std::slice::from_ref(&sq)).unwrap();
        assert_eq!((c3.points, c3.unbounded), (vec![qi(0)], true));
        let j = separating_witness(&x, &z, &qi(1)).unwrap().unwrap();
        assert!(!closure_contains(&x, &z, &j, &qi(1)).unwrap());
        assert!(closure_contains(&x, &z, &ExactSet::empty(), &qi(1)).unwrap());
        assert!(separating_witness(&x, &z, &qi(0)).unwrap().is_none());
        assert!(filter_base_closures(&x, &z, &[ApSet::evens().into()]).is_err());
    }

    #[test]
    fn attractors() {
        let z = IdealDesc::z();
        let x = residues3();
        let g: Vec<(Q, Q)> = (0..3).map(|k| (qi(k), qi(k))).collect();
        let v = smallest_closed_attractor_check(&x, &z, &g).unwrap();
        assert!(v.holds && v.minimal);
        assert!(!smallest_closed_attractor_check(&x, &z, &[]).unwrap().holds);
        let wide = smallest_closed_attractor_check(&x, &z, &[(qi(0), qi(2))]).unwrap();
        assert!(wide.holds && wide.contains_gamma && !wide.minimal);
        assert!(matches!(smallest_closed_attractor_check(&ex3(), &z, &g), Err(SeqError::HypothesisViolated(_))));
    }
}
