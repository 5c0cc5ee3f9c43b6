//! The decomposition `x = y + z` and the compression of `I`-cluster points
//! into `J`-cluster points.

use std::collections::BTreeSet;

use num_traits::Signed;

use super::analysis::{
    cluster_points, equivalent, fin_limit, ideal_included, ideal_lim, piece_infos, scan_support, set_member, PieceInfo,
};
use super::symseq::SymSeq;
use super::term::{GenTerm, Step, TermLimit};
use super::SeqError;
use crate::density::OracleConfig;
use crate::ideals::{pideal_witness, Family, IdealDesc, IdealError};
use crate::natset::{ExactSet, NatSet};
use crate::rational::{format_q, qi, Q};

/// Pointwise agreement `x = y + z` is checked on this prefix.
pub const POINTWISE_CHECK: u64 = 1000;

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub y: SymSeq,
    pub z: SymSeq,
    /// Where `y` was reset to the limit.
    pub reset: ExactSet,
    /// Exact `{n : z_n ≠ 0}`.
    pub z_support: ExactSet,
}

fn zeros_of(p: &PieceInfo, target: &Q) -> Result<BTreeSet<u64>, SeqError> {
    let bound = match &p.limit {
        Some(TermLimit::Unbounded) => p.term.escape_index(&(target.abs() + qi(1)))?,
        Some(TermLimit::Finite(l)) if l != target => {
            p.term.settle_index(&((l - target).abs() / qi(2)))?
        }
        _ => return Err(SeqError::Undecidable("zeros of a piece converging to its target".into())),
    };
    let mut out = BTreeSet::new();
    for n in scan_support(&p.support, bound)? {
        if &p.term.eval(n)? == target {
            out.insert(n);
        }
    }
    Ok(out)
}

/// `x = y + z` with `y → ℓ` and `{n : z_n ≠ 0} ∈ I`. The bad set is the union
/// of the supports whose piece-limit differs from `ℓ`; `y` is `ℓ` there.
pub fn decompose(x: &SymSeq, i: &IdealDesc, l: &Q) -> Result<Decomposition, SeqError> {
    if !i.is_p() {
        return Err(IdealError::NotAPIdeal(i.name()).into());
    }
    let rep = ideal_lim(x, i)?;
    if rep.limit.as_ref() != Some(l) {
        return Err(SeqError::NotConvergent(match rep.limit {
            Some(m) => format!("the {}-limit is {}, not {}", i.name(), format_q(&m), format_q(l)),
            None => rep.reason.unwrap_or_else(|| format!("no {}-limit", i.name())),
        }));
    }
    let infos = piece_infos(x, i)?;
    let bad: Vec<&PieceInfo> =
        infos.iter().filter(|p| p.limit.is_some() && p.bounded_limit() != Some(l)).collect();
    let reset = ExactSet::union_all(bad.iter().map(|p| &p.support))?;
    let mut zeros = BTreeSet::new();
    for p in &bad {
        zeros.extend(zeros_of(p, l)?);
    }
    let z_support = reset.with_points(&BTreeSet::new(), &zeros)?;

    let y = x.overwrite(&reset, GenTerm::constant(l.clone()))?;
    let z = x.sub(&y)?;

    if fin_limit(&y)?.as_ref() != Some(l) {
        return Err(SeqError::Undecidable("y does not converge to the limit".into()));
    }
    if !set_member(i, &z_support)? {
        return Err(SeqError::Undecidable(format!("support of z is not in {}", i.name())));
    }
    if let Some(n) = x.first_sum_mismatch(&y, &z, POINTWISE_CHECK)? {
        return Err(SeqError::Undecidable(format!("x ≠ y + z at {n}")));
    }
    for n in 1..=POINTWISE_CHECK {
        if z.is_zero_at(n)? == z_support.contains(n) {
            return Err(SeqError::Undecidable(format!("decomposition check failed at {n}")));
        }
    }
    Ok(Decomposition { y, z, reset, z_support })
}

#[derive(Clone, Debug)]
pub struct Compression {
    pub y: SymSeq,
    /// The `I`-small set where `x` was overwritten.
    pub overwritten: ExactSet,
}

/// An `I`-equivalent `y` with `Γ_y(J) = Γ_x(I)`.
///
/// The pieces that are `J`-positive but `I`-small and whose limit is not an
/// `I`-cluster point are merged into one `I`-small set, on which `y` replays
/// the values of an `I`-positive piece in order.
pub fn compress(x: &SymSeq, i: &IdealDesc, j: &IdealDesc) -> Result<Compression, SeqError> {
    if !i.is_p() {
        return Err(IdealError::NotAPIdeal(i.name()).into());
    }
    if !ideal_included(j, i) {
        return Err(SeqError::Precondition(format!("{} is not known to be contained in {}", j.name(), i.name())));
    }
    let gamma: BTreeSet<_> = cluster_points(x, i)?.points.into_iter().collect();
    let infos = piece_infos(x, i)?;
    let jinfos = piece_infos(x, j)?;
    let mut bad: Vec<(&PieceInfo, &PieceInfo)> = infos
        .iter()
        .zip(&jinfos)
        .filter(|(p, pj)| p.in_ideal && !pj.in_ideal && p.bounded_limit().is_some_and(|l| !gamma.contains(l)))
        .collect();
    bad.sort_by(|a, b| a.0.bounded_limit().cmp(&b.0.bounded_limit()));
    if bad.is_empty() {
        return Ok(Compression { y: x.clone(), overwritten: ExactSet::empty() });
    }
    let fam = Family::Finite(bad.iter().map(|(p, _)| NatSet::Exact(p.support.clone())).collect());
    let overwritten = match pideal_witness(i, &fam, &OracleConfig::default())? {
        NatSet::Exact(e) => e,
        other => return Err(SeqError::Unsupported(format!("witness {} left the exact class", other.describe()))),
    };
    let source = infos
        .iter()
        .filter(|p| !p.in_ideal && p.bounded_limit().is_some())
        .min_by(|a, b| a.bounded_limit().cmp(&b.bounded_limit()))
        .or_else(|| infos.iter().find(|p| !p.in_ideal && p.limit.is_some()))
        .ok_or_else(|| SeqError::Precondition(format!("x has no {}-positive piece", i.name())))?;
    let term = source
        .term
        .precompose(&[Step::Count(overwritten.clone()), Step::Enumerate(source.support.clone())]);
    let y = x.overwrite(&overwritten, term)?;

    let gy: BTreeSet<_> = cluster_points(&y, j)?.points.into_iter().collect();
    if gy != gamma {
        return Err(SeqError::Undecidable("compressed cluster set differs".into()));
    }
    if !equivalent(x, &y, i)? {
        return Err(SeqError::Undecidable("compressed sequence is not equivalent".into()));
    }
    Ok(Compression { y, overwritten })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::ApSet;

    fn on_squares(v: i64, off: GenTerm) -> SymSeq {
        let sq = ExactSet::squares();
        SymSeq::from_parts([(sq.clone(), GenTerm::constant(qi(v))), (sq.complement(), off)]).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let z = IdealDesc::z();
        let rest = ExactSet::squares().complement();
        let x = on_squares(5, GenTerm::harmonic(qi(0), qi(1), &rest));
        let d = decompose(&x, &z, &qi(0)).unwrap();
        assert_eq!(d.z_support, ExactSet::squares());
        assert_eq!(fin_limit(&d.y).unwrap(), Some(qi(0)));

        let h = SymSeq::from_parts([(ExactSet::full(), GenTerm::harmonic(qi(0), qi(1), &ExactSet::full()))]).unwrap();
        let d = decompose(&h, &z, &qi(0)).unwrap();
        assert!(d.z_support.is_empty());
        assert!(d.z.pieces().iter().all(|p| p.term.is_zero()));

        let e = on_squares(1, GenTerm::constant(qi(0)));
        let d = decompose(&e, &z, &qi(0)).unwrap();
        assert_eq!(d.y, SymSeq::constant(qi(0)));
        assert_eq!(d.z, e);
        assert!(matches!(decompose(&e, &IdealDesc::fin(), &qi(0)), Err(SeqError::NotConvergent(_))));
        assert!(matches!(decompose(&e, &IdealDesc::polya(), &qi(0)), Err(SeqError::Ideal(_))));
    }

    #[test]
    fn decompose_removes_exact_zeros() {
        let sq = ExactSet::squares();
        let t = GenTerm::geometric(qi(2), qi(-4), Q::new(1.into(), 2.into()), &sq).unwrap();
        let x = SymSeq::from_parts([(sq.clone(), t), (sq.complement(), GenTerm::constant(qi(0)))]).unwrap();
        let d = decompose(&x, &IdealDesc::z(), &qi(0)).unwrap();
        assert!(!d.z_support.contains(1));
        assert!(d.z_support.contains(4));
    }

    #[test]
    fn compress_examples() {
        let (z, fin) = (IdealDesc::z(), IdealDesc::fin());
        let x = on_squares(7, GenTerm::constant(qi(0)));
        let c = compress(&x, &z, &fin).unwrap();
        assert_eq!(cluster_points(&c.y, &fin).unwrap().points, vec![qi(0)]);

        let r: Vec<ExactSet> = (0..3).map(|k| ApSet::residue_class(k, 3).into()).collect();
        let plain = SymSeq::from_parts((0..3).map(|k| (r[k].clone(), GenTerm::constant(qi(k as i64))))).unwrap();
        assert_eq!(compress(&plain, &z, &fin).unwrap().y, plain);

        let sq = ExactSet::squares();
        let thin = SymSeq::from_parts([
            (r[0].difference(&sq).unwrap(), GenTerm::constant(qi(0))),
            (r[1].union(&r[2]).unwrap().difference(&sq).unwrap(), GenTerm::constant(qi(1))),
            (sq, GenTerm::constant(qi(2))),
        ])
        .unwrap();
        let c = compress(&thin, &z, &fin).unwrap();
        assert_eq!(cluster_points(&c.y, &fin).unwrap().points, vec![qi(0), qi(1)]);
        assert!(compress(&thin, &fin, &z).is_err());
    }
}
