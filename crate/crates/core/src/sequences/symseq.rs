use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::term::{GenTerm, Step};
use super::SeqError;
use crate::natset::{exact_json, ApSet, ExactSet, NatSet};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub support: ExactSet,
    pub term: GenTerm,
}

/// A sequence `ω → ℚ` given piecewise over a finite exact partition of ω.
///
/// A sequence may carry a frame `F`: then its `k`-th term is the base
/// sequence at `f_k`, the `k`-th element of `F`. Frames appear only when a
/// subsequence cannot be re-expressed over exact supports, which happens when
/// a support contains power tracks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSeq {
    pieces: Vec<Piece>,
    frame: Option<ApSet>,
}

impl SymSeq {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, SeqError> {
        Self::build(pieces, true)
    }

    /// Pieces of a refinement or overwrite are disjoint and cover ω already.
    fn partitioned(pieces: Vec<Piece>) -> Result<Self, SeqError> {
        Self::build(pieces, false)
    }

    fn build(pieces: Vec<Piece>, validate: bool) -> Result<Self, SeqError> {
        let mut merged: Vec<Piece> = vec![];
        for p in pieces.into_iter().filter(|p| !p.support.is_empty()) {
            match merged.iter_mut().find(|m| m.term == p.term) {
                Some(m) => {
                    if validate && !m.support.intersect(&p.support)?.is_empty() {
                        return Err(SeqError::Invalid(format!("supports {} and {} overlap", m.support, p.support)));
                    }
                    m.support = m.support.union(&p.support)?;
                }
                None => merged.push(p),
            }
        }
        let pieces = merged;
        if !validate {
            return Ok(SymSeq { pieces, frame: None });
        }
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                if !a.support.intersect(&b.support)?.is_empty() {
                    return Err(SeqError::Invalid(format!("supports {} and {} overlap", a.support, b.support)));
                }
            }
            if !a.support.is_finite() {
                if let Some(s) = a.term.chain_sets().find(|s| s.is_finite()) {
                    return Err(SeqError::Invalid(format!("index chain through the finite set {s}")));
                }
            }
        }
        let cover = ExactSet::union_all(pieces.iter().map(|p| &p.support))?;
        if cover != ExactSet::full() {
            return Err(SeqError::Invalid(format!("supports do not cover ω (union is {cover})")));
        }
        Ok(SymSeq { pieces, frame: None })
    }

    pub fn constant(c: Q) -> Self {
        SymSeq { pieces: vec![Piece { support: ExactSet::full(), term: GenTerm::constant(c) }], frame: None }
    }

    /// Convenience builder from `(support, term)` pairs.
    pub fn from_parts(parts: impl IntoIterator<Item = (ExactSet, GenTerm)>) -> Result<Self, SeqError> {
        Self::new(parts.into_iter().map(|(support, term)| Piece { support, term }).collect())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn frame(&self) -> Option<&ApSet> {
        self.frame.as_ref()
    }

    /// Supports in base coordinates, cut to the frame.
    pub fn effective_pieces(&self) -> Result<Vec<Piece>, SeqError> {
        match &self.frame {
            None => Ok(self.pieces.clone()),
            Some(f) => {
                let f: ExactSet = f.clone().into();
                let mut out = vec![];
                for p in &self.pieces {
                    let s = p.support.intersect(&f)?;
                    if !s.is_empty() {
                        out.push(Piece { support: s, term: p.term.clone() });
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn base_index(&self, k: u64) -> Result<u64, SeqError> {
        match &self.frame {
            None => Ok(k),
            Some(f) => Ok(f.enumerate(k)?),
        }
    }

    pub fn piece_at(&self, n: u64) -> &Piece {
        self.pieces.iter().find(|p| p.support.contains(n)).expect("supports cover ω")
    }

    pub fn eval(&self, k: u64) -> Result<Q, SeqError> {
        if k == 0 {
            return Err(SeqError::Invalid("sequences are indexed from 1".into()));
        }
        let n = self.base_index(k)?;
        self.piece_at(n).term.eval(n)
    }

    fn term_at(&self, k: u64) -> Result<(&GenTerm, u64), SeqError> {
        if k == 0 {
            return Err(SeqError::Invalid("sequences are indexed from 1".into()));
        }
        let n = self.base_index(k)?;
        Ok((&self.piece_at(n).term, n))
    }

    /// `x_k = a_k + b_k`, settled on the terms when they match symbolically.
    pub fn is_sum_at(&self, a: &SymSeq, b: &SymSeq, k: u64) -> Result<bool, SeqError> {
        let ((tx, nx), (ta, na), (tb, nb)) = (self.term_at(k)?, a.term_at(k)?, b.term_at(k)?);
        if nx == na && na == nb && ta.add(tb) == *tx {
            return Ok(true);
        }
        Ok(self.eval(k)? == a.eval(k)? + b.eval(k)?)
    }

    /// First `k ≤ upto` with `x_k ≠ a_k + b_k`. Symbolic matches are
    /// remembered per triple of pieces.
    pub fn first_sum_mismatch(&self, a: &SymSeq, b: &SymSeq, upto: u64) -> Result<Option<u64>, SeqError> {
        let unframed = self.frame.is_none() && a.frame.is_none() && b.frame.is_none();
        let mut matched = std::collections::HashSet::new();
        for k in 1..=upto {
            if unframed {
                let idx = |s: &SymSeq| s.pieces.iter().position(|p| p.support.contains(k)).expect("supports cover ω");
                let key = (idx(self), idx(a), idx(b));
                if matched.contains(&key) {
                    continue;
                }
                if a.pieces[key.1].term.add(&b.pieces[key.2].term) == self.pieces[key.0].term {
                    matched.insert(key);
                    continue;
                }
            }
            if !self.is_sum_at(a, b, k)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// `x_k = 0`, avoiding the exact value when an enclosure already excludes 0.
    pub fn is_zero_at(&self, k: u64) -> Result<bool, SeqError> {
        let (t, n) = self.term_at(k)?;
        let (m, r) = t.enclose(n)?;
        if m.abs() > r {
            return Ok(false);
        }
        Ok(t.eval(n)?.is_zero())
    }

    pub fn values(&self, upto: u64) -> Result<Vec<Q>, SeqError> {
        (1..=upto).map(|k| self.eval(k)).collect()
    }

    fn require_unframed(&self, what: &str) -> Result<(), SeqError> {
        if self.frame.is_some() {
            return Err(SeqError::Unsupported(format!("{what} on a framed subsequence")));
        }
        Ok(())
    }

    /// `k ↦ x_{s_k}` for an infinite `S`.
    pub fn subseq_on(&self, s: &ApSet) -> Result<SymSeq, SeqError> {
        if s.is_finite() {
            return Err(SeqError::Invalid(format!("subsequence index set {s} is finite")));
        }
        let frame = match &self.frame {
            Some(f) => f.reindex(s)?,
            None => s.clone(),
        };
        if self.pieces.iter().all(|p| p.support.as_ap().is_some()) {
            let step = [Step::Enumerate(frame.clone().into())];
            let mut pieces = vec![];
            for p in &self.pieces {
                let support = frame.enumeration_preimage(p.support.as_ap().expect("checked"))?;
                pieces.push(Piece { support: support.into(), term: p.term.precompose(&step) });
            }
            return SymSeq::new(pieces);
        }
        Ok(SymSeq { pieces: self.pieces.clone(), frame: Some(frame) })
    }

    fn combine(&self, other: &SymSeq, op: impl Fn(&GenTerm, &GenTerm) -> GenTerm) -> Result<SymSeq, SeqError> {
        self.require_unframed("pointwise arithmetic")?;
        other.require_unframed("pointwise arithmetic")?;
        let mut pieces = vec![];
        for a in &self.pieces {
            for b in &other.pieces {
                let cell = a.support.intersect(&b.support)?;
                if !cell.is_empty() {
                    pieces.push(Piece { support: cell, term: op(&a.term, &b.term) });
                }
            }
        }
        SymSeq::partitioned(pieces)
    }

    /// Pointwise `self − other` on the common refinement.
    pub fn sub(&self, other: &SymSeq) -> Result<SymSeq, SeqError> {
        self.combine(other, GenTerm::sub)
    }

    pub fn add(&self, other: &SymSeq) -> Result<SymSeq, SeqError> {
        self.combine(other, GenTerm::add)
    }

    /// Replaces the values on `m` by `term`.
    pub fn overwrite(&self, m: &ExactSet, term: GenTerm) -> Result<SymSeq, SeqError> {
        self.require_unframed("overwriting")?;
        let mut pieces = vec![];
        for p in &self.pieces {
            pieces.push(Piece { support: p.support.difference(m)?, term: p.term.clone() });
        }
        pieces.push(Piece { support: m.clone(), term });
        SymSeq::partitioned(pieces)
    }

    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> =
            self.pieces.iter().map(|p| json!({"support": exact_json(&p.support), "term": p.term.to_json()})).collect();
        match &self.frame {
            None => json!({ "pieces": pieces }),
            Some(f) => json!({ "pieces": pieces, "frame": serde_json::to_value(f).expect("serializable") }),
        }
    }

    pub fn from_json(v: &Value) -> Result<SymSeq, SeqError> {
        let arr = v
            .get("pieces")
            .and_then(Value::as_array)
            .ok_or_else(|| SeqError::Schema("sequence needs a `pieces` array".into()))?;
        let mut pieces = vec![];
        for p in arr {
            let sv = p.get("support").ok_or_else(|| SeqError::Schema("piece needs `support`".into()))?;
            let support = match NatSet::from_json(sv)? {
                NatSet::Exact(e) => e,
                other => {
                    return Err(SeqError::Unsupported(format!("piece support {} is not an exact set", other.describe())))
                }
            };
            let tv = p.get("term").ok_or_else(|| SeqError::Schema("piece needs `term`".into()))?;
            let term = GenTerm::from_json(tv, &support)?;
            pieces.push(Piece { support, term });
        }
        let mut s = SymSeq::new(pieces)?;
        if let Some(f) = v.get("frame") {
            let f: ApSet = serde_json::from_value(f.clone()).map_err(|e| SeqError::Schema(e.to_string()))?;
            if f.is_finite() {
                return Err(SeqError::Invalid("frame must be infinite".into()));
            }
            s.frame = Some(f);
        }
        Ok(s)
    }
}

impl fmt::Display for SymSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|p| format!("{} on {}", p.term, p.support)).collect();
        write!(f, "{}", parts.join("; "))?;
        if let Some(fr) = &self.frame {
            write!(f, " along {fr}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn evens_identity() -> SymSeq {
        SymSeq::from_parts([
            (ApSet::evens().into(), GenTerm::unbounded(qi(1))),
            (ApSet::odds().into(), GenTerm::constant(qi(0))),
        ])
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(SymSeq::constant(qi(5)).eval(17).unwrap(), qi(5));
        let x = evens_identity();
        assert_eq!(x.eval(6).unwrap(), qi(6));
        assert_eq!(x.eval(7).unwrap(), qi(0));
        let sq = ExactSet::squares();
        let h = SymSeq::from_parts([
            (sq.clone(), GenTerm::harmonic(qi(1), qi(1), &sq)),
            (sq.complement(), GenTerm::constant(qi(0))),
        ])
        .unwrap();
        assert_eq!(h.eval(9).unwrap(), q(4, 3));
    }

    #[test]
    fn partition_is_checked() {
        let bad = SymSeq::from_parts([(ApSet::evens().into(), GenTerm::constant(qi(0)))]);
        assert!(bad.is_err());
        let overlap = SymSeq::from_parts([
            (ApSet::full().into(), GenTerm::constant(qi(0))),
            (ApSet::evens().into(), GenTerm::constant(qi(1))),
        ]);
        assert!(overlap.is_err());
    }

    #[test]
    fn subsequences() {
        let x = evens_identity();
        let y = x.subseq_on(&ApSet::evens()).unwrap();
        assert_eq!(y.pieces().len(), 1);
        for k in 1..1000 {
            assert_eq!(y.eval(k).unwrap(), qi(2 * k as i64));
        }
        assert_eq!(x.subseq_on(&ApSet::full()).unwrap().values(50).unwrap(), x.values(50).unwrap());
        let sq = ExactSet::squares();
        let z = SymSeq::from_parts([
            (sq.clone(), GenTerm::harmonic(qi(1), qi(1), &sq)),
            (sq.complement(), GenTerm::unbounded(qi(1))),
        ])
        .unwrap();
        let a = ApSet::residue_class(1, 3);
        let w = z.subseq_on(&a).unwrap();
        assert!(w.frame().is_some());
        let b = ApSet::evens();
        let ww = w.subseq_on(&b).unwrap();
        for k in 1..300 {
            assert_eq!(w.eval(k).unwrap(), z.eval(a.enumerate(k).unwrap()).unwrap());
            let ab = a.enumerate(b.enumerate(k).unwrap()).unwrap();
            assert_eq!(ww.eval(k).unwrap(), z.eval(ab).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let x = evens_identity();
        let back = SymSeq::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        let src = r#"{"pieces":[{"support":{"kind":"squares"},"term":{"harm":["1","1"]}},
            {"support":{"kind":"not","of":{"kind":"squares"}},"term":{"geom":["0","1","1/2"]}}]}"#;
        let s = SymSeq::from_json(&serde_json::from_str(src).unwrap()).unwrap();
        assert_eq!(s.eval(9).unwrap(), q(4, 3));
        assert_eq!(s.eval(2).unwrap(), q(1, 2));
        assert_eq!(SymSeq::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn subtraction_and_overwrite() {
        let x = evens_identity();
        let d = x.sub(&x).unwrap();
        assert!(d.pieces().iter().all(|p| p.term.is_zero()));
        let sq = ExactSet::squares();
        let m = x.overwrite(&sq, GenTerm::constant(qi(7))).unwrap();
        assert_eq!(m.eval(4).unwrap(), qi(7));
        assert_eq!(m.eval(6).unwrap(), qi(6));
    }
}
