//! Concrete ideals on ω and on ω×ω.
//!
//! Each [`IdealDesc`] decides membership exactly on the exact set classes and
//! falls back to the density oracle elsewhere, where only positivity can be
//! certified. The P- and G-ideal flags are recorded classifications.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::density::{polya_upper, weighted_upper_density, DensityReport, OracleConfig};
use crate::natset::{ApSet, NatSet, PairSet};
use crate::rational::{format_q, parse_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("{0} is not a P-ideal")]
    NotAPIdeal(String),
    #[error("{0} is not a G-ideal")]
    NotAGIdeal(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown ideal `{0}`")]
    UnknownIdeal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ambient {
    Omega,
    OmegaSquared,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IdealKind {
    Fin,
    /// Zero sets of the `α`-density; `α = 0` is `Z`, `α = −1` is logarithmic.
    Density(Q),
    /// Zero sets of the upper Pólya density.
    Polya,
    /// Sets with `Σ_{n ∈ S} 1/n < ∞`.
    SummableHarmonic,
    Pringsheim,
    DensityPr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealDesc {
    pub kind: IdealKind,
    pub ambient: Ambient,
}

impl IdealDesc {
    pub fn fin() -> Self {
        IdealDesc { kind: IdealKind::Fin, ambient: Ambient::Omega }
    }

    pub fn z() -> Self {
        Self::density(Q::zero())
    }

    pub fn logz() -> Self {
        Self::density(-Q::one())
    }

    pub fn density(alpha: Q) -> Self {
        IdealDesc { kind: IdealKind::Density(alpha), ambient: Ambient::Omega }
    }

    pub fn polya() -> Self {
        IdealDesc { kind: IdealKind::Polya, ambient: Ambient::Omega }
    }

    pub fn summable() -> Self {
        IdealDesc { kind: IdealKind::SummableHarmonic, ambient: Ambient::Omega }
    }

    pub fn pringsheim() -> Self {
        IdealDesc { kind: IdealKind::Pringsheim, ambient: Ambient::OmegaSquared }
    }

    pub fn density_pr() -> Self {
        IdealDesc { kind: IdealKind::DensityPr, ambient: Ambient::OmegaSquared }
    }

    pub fn is_p(&self) -> bool {
        matches!(self.kind, IdealKind::Fin | IdealKind::Density(_) | IdealKind::SummableHarmonic | IdealKind::DensityPr)
    }

    pub fn is_g(&self) -> bool {
        match &self.kind {
            IdealKind::Fin | IdealKind::Polya => true,
            IdealKind::Density(a) => a >= &-Q::one(),
            _ => false,
        }
    }

    /// The CLI name.
    pub fn name(&self) -> String {
        let base = match &self.kind {
            IdealKind::Fin => "fin".to_string(),
            IdealKind::Density(a) if a.is_zero() => "z".to_string(),
            IdealKind::Density(a) if *a == -Q::one() => "logz".to_string(),
            IdealKind::Density(a) => format!("alpha:{}", format_q(a)),
            IdealKind::Polya => "polya".to_string(),
            IdealKind::SummableHarmonic => "sum:1/n".to_string(),
            IdealKind::Pringsheim => "pr".to_string(),
            IdealKind::DensityPr => "zpr".to_string(),
        };
        match (&self.kind, self.ambient) {
            (IdealKind::Pringsheim | IdealKind::DensityPr, Ambient::Omega) => format!("{base}@omega"),
            _ => base,
        }
    }

    /// The same ideal transported to ω through the Cantor pairing.
    pub fn to_omega_ideal(&self) -> Result<IdealDesc, IdealError> {
        match self.kind {
            IdealKind::Pringsheim | IdealKind::DensityPr => {
                Ok(IdealDesc { kind: self.kind.clone(), ambient: Ambient::Omega })
            }
            _ => Err(IdealError::Precondition(format!("{} already lives on ω", self.name()))),
        }
    }

    pub fn is_double(&self) -> bool {
        matches!(self.kind, IdealKind::Pringsheim | IdealKind::DensityPr)
    }
}

impl fmt::Display for IdealDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for IdealDesc {
    type Err = IdealError;
    fn from_str(s: &str) -> Result<Self, IdealError> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "fin" => IdealDesc::fin(),
            "z" => IdealDesc::z(),
            "logz" => IdealDesc::logz(),
            "polya" => IdealDesc::polya(),
            "sum:1/n" => IdealDesc::summable(),
            "pr" => IdealDesc::pringsheim(),
            "zpr" => IdealDesc::density_pr(),
            "pr@omega" => IdealDesc::pringsheim().to_omega_ideal()?,
            "zpr@omega" => IdealDesc::density_pr().to_omega_ideal()?,
            "sum:1/n^2" | "sum:1/n2" => {
                return Err(IdealError::UnknownIdeal(format!(
                    "{s} (every subset of ω is summable under 1/n², so it is not a proper ideal)"
                )))
            }
            _ => match t.strip_prefix("alpha:") {
                Some(a) => {
                    let a = parse_q(a).map_err(|_| IdealError::UnknownIdeal(s.into()))?;
                    if a < -Q::one() {
                        return Err(IdealError::UnknownIdeal(format!("{s} (α must be at least -1)")));
                    }
                    IdealDesc::density(a)
                }
                None => return Err(IdealError::UnknownIdeal(s.into())),
            },
        })
    }
}

fn undecidable(i: &IdealDesc, s: &NatSet, why: &str) -> IdealError {
    IdealError::Undecidable(format!("membership of {} in {}: {why}", s.describe(), i.name()))
}

/// The planar set behind an ω-set for the Pringsheim ideals.
fn as_pairs(s: &NatSet) -> Option<PairSet> {
    match s {
        NatSet::Paired(p) => Some(p.clone()),
        NatSet::Exact(e) => {
            let ap = e.as_ap()?;
            if ap.is_full() {
                Some(PairSet::full())
            } else if ap.is_finite() {
                let pts: Vec<_> = ap.includes().iter().map(|&n| crate::natset::pairing(n)).collect();
                Some(PairSet::empty().with_corrections(pts, []))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn oracle_zero(r: &DensityReport, i: &IdealDesc, s: &NatSet) -> Result<bool, IdealError> {
    r.is_zero().ok_or_else(|| {
        undecidable(i, s, &format!("oracle interval [{}, {}] touches 0", format_q(&r.lo), format_q(&r.hi)))
    })
}

/// Membership of a planar set.
pub fn member_pairs(i: &IdealDesc, a: &PairSet) -> Result<bool, IdealError> {
    match i.kind {
        IdealKind::Pringsheim => Ok(a.rows_eventually_bounded()),
        IdealKind::DensityPr => Ok(a.product_density().is_zero()),
        _ => Err(IdealError::Precondition(format!("{} is not an ideal on ω×ω", i.name()))),
    }
}

/// `S ∈ I`.
pub fn member(i: &IdealDesc, s: &NatSet, cfg: &OracleConfig) -> Result<bool, IdealError> {
    if i.is_double() {
        let p = as_pairs(s).ok_or_else(|| undecidable(i, s, "the set is not the image of a rectangle union"))?;
        return member_pairs(i, &p);
    }
    // block sets carry a positive share of every functional as soon as
    // infinitely many blocks are selected
    if let NatSet::Block(b) = s {
        return Ok(!b.is_infinite());
    }
    match &i.kind {
        IdealKind::Fin => s.is_finite().ok_or_else(|| undecidable(i, s, "finiteness of a predicate set")),
        IdealKind::Density(a) => match s {
            NatSet::Exact(e) => Ok(e.density().is_zero()),
            _ => {
                let r = weighted_upper_density(s, a, cfg).map_err(|e| IdealError::Precondition(e.to_string()))?;
                oracle_zero(&r, i, s)
            }
        },
        IdealKind::Polya => match s {
            NatSet::Exact(e) => Ok(e.density().is_zero()),
            _ => oracle_zero(&polya_upper(s, cfg), i, s),
        },
        IdealKind::SummableHarmonic => match s {
            // power tracks converge under 1/n; an infinite periodic part diverges
            NatSet::Exact(e) => Ok(e.dense().is_finite()),
            _ => {
                let r = crate::density::upper_density(s, cfg);
                if r.is_zero() == Some(false) {
                    Ok(false)
                } else {
                    Err(undecidable(i, s, "divergence of Σ 1/n cannot be read from a prefix"))
                }
            }
        },
        IdealKind::Pringsheim | IdealKind::DensityPr => unreachable!("handled above"),
    }
}

/// `S ∈ I*`.
pub fn in_dual(i: &IdealDesc, s: &NatSet, cfg: &OracleConfig) -> Result<bool, IdealError> {
    member(i, &s.complement(), cfg)
}

/// `S ∈ I⁺`.
pub fn positive(i: &IdealDesc, s: &NatSet, cfg: &OracleConfig) -> Result<bool, IdealError> {
    member(i, s, cfg).map(|m| !m)
}

/// Families handed to [`pideal_witness`].
#[derive(Debug, Clone)]
pub enum Family {
    Finite(Vec<NatSet>),
    /// `A_j = S ∩ [j, ∞)` for `j = 1, 2, ...`.
    Tails(NatSet),
    /// A leveled family with finitely many distinct members past some level.
    Stabilizing(Vec<NatSet>),
    /// An infinite family given only by description.
    Opaque(String),
}

/// Some `A ∈ I` with every member of the family contained in `A` up to a finite set.
pub fn pideal_witness(i: &IdealDesc, family: &Family, cfg: &OracleConfig) -> Result<NatSet, IdealError> {
    if !i.is_p() {
        return Err(IdealError::NotAPIdeal(i.name()));
    }
    let sets: Vec<NatSet> = match family {
        Family::Finite(v) | Family::Stabilizing(v) => v.clone(),
        Family::Tails(s) => vec![s.clone()],
        Family::Opaque(d) => return Err(IdealError::UnsupportedFamily(d.clone())),
    };
    let mut acc: NatSet = ApSet::empty().into();
    for s in &sets {
        if !member(i, s, cfg)? {
            return Err(IdealError::Precondition(format!("{} is not in {}", s.describe(), i.name())));
        }
        acc = acc.union(s);
    }
    Ok(acc)
}

/// Outcome of testing `A_B ∈ I* ⇔ B ∈ I*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReindexCheck {
    pub a_in_dual: bool,
    pub b_in_dual: bool,
    pub ab_in_dual: bool,
    pub ab: ApSet,
    pub pass: bool,
}

pub fn gideal_reindex_check(
    i: &IdealDesc,
    a: &ApSet,
    b: &ApSet,
    cfg: &OracleConfig,
) -> Result<ReindexCheck, IdealError> {
    if !i.is_g() {
        return Err(IdealError::NotAGIdeal(i.name()));
    }
    reindex_facts(i, a, b, cfg)
}

/// The three membership facts, without the G-ideal guard.
pub fn reindex_facts(i: &IdealDesc, a: &ApSet, b: &ApSet, cfg: &OracleConfig) -> Result<ReindexCheck, IdealError> {
    let a_in_dual = in_dual(i, &a.clone().into(), cfg)?;
    if !a_in_dual {
        return Err(IdealError::Precondition(format!("{a} is not in the dual filter of {}", i.name())));
    }
    let ab = a.reindex(b).map_err(|e| IdealError::Precondition(e.to_string()))?;
    let b_in_dual = in_dual(i, &b.clone().into(), cfg)?;
    let ab_in_dual = in_dual(i, &ab.clone().into(), cfg)?;
    Ok(ReindexCheck { a_in_dual, b_in_dual, ab_in_dual, pass: b_in_dual == ab_in_dual, ab })
}
