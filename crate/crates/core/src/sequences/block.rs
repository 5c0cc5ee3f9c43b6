//! Sequences constant on the blocks of a schedule, cycling through values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SeqError;
use crate::ideals::IdealDesc;
use crate::natset::{ApSet, BlockSet, NatSet, Schedule};
use crate::rational::{serde_q_vec, Q};

/// `x_n = values[k mod len]` where `n` lies in block `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSeq {
    pub schedule: Schedule,
    #[serde(with = "serde_q_vec")]
    pub values: Vec<Q>,
}

impl BlockSeq {
    pub fn new(schedule: Schedule, values: Vec<Q>) -> Result<Self, SeqError> {
        schedule.validate()?;
        if values.is_empty() {
            return Err(SeqError::Invalid("a block sequence needs at least one value".into()));
        }
        if let Schedule::Geometric { b0, .. } = schedule {
            if b0 != 1 {
                return Err(SeqError::Invalid("geometric blocks must start at 1 to cover ω".into()));
            }
        }
        Ok(BlockSeq { schedule, values })
    }

    pub fn eval(&self, n: u64) -> Result<Q, SeqError> {
        let k = self.schedule.block_of(n).ok_or_else(|| SeqError::Invalid(format!("{n} lies in no block")))?;
        Ok(self.values[(k % self.values.len() as u64) as usize].clone())
    }

    /// Each distinct value with the exact set of indices carrying it.
    pub fn level_sets(&self) -> Result<BTreeMap<Q, BlockSet>, SeqError> {
        let m = self.values.len() as u64;
        let mut sel: BTreeMap<Q, ApSet> = BTreeMap::new();
        for (r, v) in self.values.iter().enumerate() {
            let cls = ApSet::residue_class(r as u64, m);
            let e = sel.entry(v.clone()).or_insert_with(ApSet::empty);
            *e = e.union(&cls);
        }
        sel.into_iter().map(|(v, s)| Ok((v, BlockSet::new(self.schedule, s)?))).collect()
    }

    /// Values whose index sets are `I`-positive. Each value recurs on
    /// infinitely many blocks, so for the ideals on ω this is every value.
    pub fn cluster_points(&self, i: &IdealDesc) -> Result<Vec<Q>, SeqError> {
        let cfg = crate::density::OracleConfig::default();
        let mut out = vec![];
        for (v, s) in self.level_sets()? {
            if !crate::ideals::member(i, &NatSet::Block(s), &cfg)? {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Lower and upper asymptotic density of each value's index set.
    pub fn frequencies(&self) -> Result<Vec<(Q, Q, Q)>, SeqError> {
        Ok(self.level_sets()?.into_iter().map(|(v, s)| {
            let (lo, hi) = s.densities();
            (v, lo, hi)
        }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn octave_alternation() {
        let x = BlockSeq::new(Schedule::Geometric { b0: 1, r: 2 }, vec![qi(0), qi(1)]).unwrap();
        assert_eq!(x.eval(1).unwrap(), qi(0));
        assert_eq!(x.eval(2).unwrap(), qi(1));
        assert_eq!(x.eval(4).unwrap(), qi(0));
        assert_eq!(x.cluster_points(&IdealDesc::z()).unwrap(), vec![qi(0), qi(1)]);
        let f = x.frequencies().unwrap();
        assert_eq!((f[0].1.clone(), f[0].2.clone()), (q(1, 3), q(2, 3)));
        assert!(BlockSeq::new(Schedule::Geometric { b0: 3, r: 2 }, vec![qi(0)]).is_err());
    }
}
