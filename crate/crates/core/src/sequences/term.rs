//! Piece terms.
//!
//! A [`GenTerm`] is `q + Σ c·g(n) + Σ decay(k(n))` where every `g` and `k` is an
//! index chain: a composition of counting and enumeration maps through exact
//! sets. Plain JSON terms use the chain `[count(support)]` for their decays and
//! the identity for growth. Chains let a term keep its original indexing when
//! its support is cut, re-enumerated or restricted to a subsequence.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::SeqError;
use crate::natset::{exact_json, ExactSet, NatSet};
use crate::rational::{format_q, parse_q, q_u64, Q};

/// Largest exponent used when evaluating `ρ^k` exactly.
const MAX_GEOM_INDEX: u64 = 1 << 16;
/// Past this exponent an enclosure bounds `|ρ^k|` by `|ρ|^ENCLOSURE_INDEX`.
const ENCLOSURE_INDEX: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    /// `m ↦ |S ∩ [1, m]|`.
    Count(ExactSet),
    /// `m ↦ s_m`, the `m`-th element of `S`.
    Enumerate(ExactSet),
}

pub type Chain = Vec<Step>;

pub fn apply_chain(chain: &[Step], n: u64) -> Result<u64, SeqError> {
    let mut m = n;
    for s in chain {
        m = match s {
            Step::Count(set) => set.count(m),
            Step::Enumerate(set) => set.enumerate(m)?,
        };
    }
    Ok(m)
}

/// Smallest `n ≥ 1` with `chain(n) ≥ k`. Every step is non-decreasing, so the
/// bound is pulled back through the steps in reverse.
pub fn first_reaching(chain: &[Step], k: u64) -> Result<u64, SeqError> {
    let mut target = k;
    for s in chain.iter().rev() {
        target = match s {
            Step::Count(set) => {
                if target == 0 {
                    0
                } else {
                    set.enumerate(target)?
                }
            }
            Step::Enumerate(set) => {
                if target <= 1 {
                    1
                } else {
                    set.count(target - 1) + 1
                }
            }
        };
    }
    Ok(target.max(1))
}

fn chain_json(chain: &[Step]) -> Value {
    Value::Array(
        chain
            .iter()
            .map(|s| match s {
                Step::Count(set) => json!({"count": exact_json(set)}),
                Step::Enumerate(set) => json!({"enum": exact_json(set)}),
            })
            .collect(),
    )
}

fn exact_from(v: &Value) -> Result<ExactSet, SeqError> {
    match NatSet::from_json(v)? {
        NatSet::Exact(e) => Ok(e),
        other => Err(SeqError::Invalid(format!("index chains need exact sets, got {}", other.describe()))),
    }
}

fn chain_from(v: Option<&Value>) -> Result<Chain, SeqError> {
    let Some(v) = v else { return Ok(vec![]) };
    let arr = v.as_array().ok_or_else(|| SeqError::Schema("chain must be an array".into()))?;
    arr.iter()
        .map(|s| {
            if let Some(x) = s.get("count") {
                Ok(Step::Count(exact_from(x)?))
            } else if let Some(x) = s.get("enum") {
                Ok(Step::Enumerate(exact_from(x)?))
            } else {
                Err(SeqError::Schema(format!("bad chain step {s}")))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecayKind {
    /// `c / k`.
    Harmonic,
    /// `c · ρ^k` with `|ρ| < 1`.
    Geometric(Q),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decay {
    pub kind: DecayKind,
    pub c: Q,
    pub chain: Chain,
}

impl Decay {
    pub fn value_at_index(&self, k: u64) -> Result<Q, SeqError> {
        match &self.kind {
            DecayKind::Harmonic => {
                if k == 0 {
                    return Err(SeqError::Invalid("harmonic term evaluated at index 0".into()));
                }
                Ok(&self.c / q_u64(k))
            }
            DecayKind::Geometric(rho) => {
                if rho.is_zero() {
                    return Ok(Q::zero());
                }
                if k > MAX_GEOM_INDEX {
                    return Err(SeqError::Unsupported(format!("ρ^k with k = {k} is too large to evaluate exactly")));
                }
                Ok(&self.c * pow_q(rho, k))
            }
        }
    }

    /// Index from which `|decay| < delta`.
    fn index_below(&self, delta: &Q) -> Result<u64, SeqError> {
        let c = self.c.abs();
        match &self.kind {
            DecayKind::Harmonic => {
                let bound = (&c / delta).floor().to_integer() + BigInt::one();
                bound.to_u64().ok_or(SeqError::Unsupported("decay threshold overflow".into()))
            }
            DecayKind::Geometric(rho) => {
                if rho.is_zero() {
                    return Ok(1);
                }
                let r = rho.abs();
                let mut k = 1u64;
                let mut v = &c * &r;
                while &v >= delta {
                    k += 1;
                    v *= &r;
                    if k > MAX_GEOM_INDEX {
                        return Err(SeqError::Unsupported("geometric decay threshold too large".into()));
                    }
                }
                Ok(k)
            }
        }
    }

    /// Largest absolute value over indices `k ≥ 1`.
    fn sup_abs(&self) -> Q {
        match &self.kind {
            DecayKind::Harmonic => self.c.abs(),
            DecayKind::Geometric(rho) => self.c.abs() * rho.abs(),
        }
    }
}

pub fn pow_q(base: &Q, e: u64) -> Q {
    // a reduced fraction stays reduced under powers, so skip the gcds
    let e = u32::try_from(e).expect("exponent fits in u32");
    Q::new_raw(base.numer().pow(e), base.denom().pow(e))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Growth {
    pub c: Q,
    pub chain: Chain,
}

/// Asymptotic behaviour of a term on an infinite support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermLimit {
    Finite(Q),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenTerm {
    pub q: Q,
    pub growth: Vec<Growth>,
    pub decays: Vec<Decay>,
}

impl GenTerm {
    pub fn constant(q: Q) -> Self {
        GenTerm { q, growth: vec![], decays: vec![] }
    }

    /// `q + c/k`, `k` the position of `n` in `support`.
    pub fn harmonic(q: Q, c: Q, support: &ExactSet) -> Self {
        GenTerm { q, growth: vec![], decays: vec![Decay { kind: DecayKind::Harmonic, c, chain: vec![Step::Count(support.clone())] }] }
            .normalized()
    }

    /// `q + c ρ^k`, `k` the position of `n` in `support`.
    pub fn geometric(q: Q, c: Q, rho: Q, support: &ExactSet) -> Result<Self, SeqError> {
        if rho.abs() >= Q::one() {
            return Err(SeqError::Invalid(format!("geometric ratio {} must satisfy |ρ| < 1", format_q(&rho))));
        }
        Ok(GenTerm {
            q,
            growth: vec![],
            decays: vec![Decay { kind: DecayKind::Geometric(rho), c, chain: vec![Step::Count(support.clone())] }],
        }
        .normalized())
    }

    /// `c · n`.
    pub fn unbounded(c: Q) -> Self {
        GenTerm { q: Q::zero(), growth: vec![Growth { c, chain: vec![] }], decays: vec![] }.normalized()
    }

    /// Merges like terms and drops zero coefficients.
    pub fn normalized(mut self) -> Self {
        self.growth.sort_by(|a, b| a.chain.cmp(&b.chain));
        let mut growth: Vec<Growth> = vec![];
        for g in self.growth {
            match growth.last_mut() {
                Some(last) if last.chain == g.chain => last.c += g.c,
                _ => growth.push(g),
            }
        }
        growth.retain(|g| !g.c.is_zero());
        self.decays.sort_by(|a, b| (&a.kind, &a.chain).cmp(&(&b.kind, &b.chain)));
        let mut decays: Vec<Decay> = vec![];
        for d in self.decays {
            match decays.last_mut() {
                Some(last) if last.kind == d.kind && last.chain == d.chain => last.c += d.c,
                _ => decays.push(d),
            }
        }
        decays.retain(|d| !d.c.is_zero() && d.kind != DecayKind::Geometric(Q::zero()));
        GenTerm { q: self.q, growth, decays }
    }

    pub fn is_constant(&self) -> bool {
        self.growth.is_empty() && self.decays.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.q.is_zero()
    }

    /// `(m, r)` with `|x_n − m| ≤ r`; `r = 0` unless a geometric decay is
    /// evaluated far out.
    pub fn enclose(&self, n: u64) -> Result<(Q, Q), SeqError> {
        let mut v = self.q.clone();
        let mut r = Q::zero();
        for g in &self.growth {
            v += &g.c * q_u64(apply_chain(&g.chain, n)?);
        }
        for d in &self.decays {
            let k = apply_chain(&d.chain, n)?;
            match &d.kind {
                DecayKind::Geometric(rho) if k > ENCLOSURE_INDEX => r += d.c.abs() * pow_q(&rho.abs(), ENCLOSURE_INDEX),
                _ => v += d.value_at_index(k)?,
            }
        }
        Ok((v, r))
    }

    /// Sign of the geometric decays that [`GenTerm::enclose`] bounds rather
    /// than evaluates, when the largest ratio provably dominates.
    pub fn far_tail_sign(&self, n: u64) -> Result<Option<i8>, SeqError> {
        let mut far = vec![];
        for d in &self.decays {
            if let DecayKind::Geometric(rho) = &d.kind {
                let k = apply_chain(&d.chain, n)?;
                if k > ENCLOSURE_INDEX && !rho.is_zero() {
                    far.push((rho.abs(), if rho.is_negative() && k % 2 == 1 { -d.c.clone() } else { d.c.clone() }, k));
                }
            }
        }
        let Some(top) = far.iter().map(|(r, _, _)| r.clone()).max() else { return Ok(Some(0)) };
        // at a common k the lead sum is Σ c over the largest ratio; different
        // chains may sit at different k, so only a single index is handled
        if far.iter().any(|(_, _, k)| *k != far[0].2) {
            return Ok(None);
        }
        let lead: Q = far.iter().filter(|(r, _, _)| *r == top).map(|(_, c, _)| c.clone()).sum();
        let rest: Q = far
            .iter()
            .filter(|(r, _, _)| *r != top)
            .map(|(r, c, _)| c.abs() * pow_q(&(r / &top), ENCLOSURE_INDEX))
            .sum();
        if lead.abs() <= rest {
            return Ok(None);
        }
        Ok(Some(if lead.is_positive() { 1 } else { -1 }))
    }

    pub fn eval(&self, n: u64) -> Result<Q, SeqError> {
        let mut v = self.q.clone();
        for g in &self.growth {
            v += &g.c * q_u64(apply_chain(&g.chain, n)?);
        }
        for d in &self.decays {
            v += d.value_at_index(apply_chain(&d.chain, n)?)?;
        }
        Ok(v)
    }

    /// Limit along an infinite support. Growth terms on distinct chains could
    /// cancel, so they are refused rather than guessed.
    pub fn limit(&self) -> Result<TermLimit, SeqError> {
        match self.growth.len() {
            0 => Ok(TermLimit::Finite(self.q.clone())),
            1 => Ok(TermLimit::Unbounded),
            _ => Err(SeqError::Undecidable("growth terms on different index chains".into())),
        }
    }

    pub fn neg(&self) -> GenTerm {
        GenTerm {
            q: -self.q.clone(),
            growth: self.growth.iter().map(|g| Growth { c: -g.c.clone(), chain: g.chain.clone() }).collect(),
            decays: self.decays.iter().map(|d| Decay { c: -d.c.clone(), ..d.clone() }).collect(),
        }
    }

    pub fn add(&self, other: &GenTerm) -> GenTerm {
        GenTerm {
            q: &self.q + &other.q,
            growth: self.growth.iter().chain(&other.growth).cloned().collect(),
            decays: self.decays.iter().chain(&other.decays).cloned().collect(),
        }
        .normalized()
    }

    pub fn sub(&self, other: &GenTerm) -> GenTerm {
        self.add(&other.neg())
    }

    /// The same term read through `prefix` first: `t'(n) = t(prefix(n))` for
    /// the index-dependent parts.
    pub fn precompose(&self, prefix: &[Step]) -> GenTerm {
        let pre = |c: &Chain| prefix.iter().cloned().chain(c.iter().cloned()).collect::<Chain>();
        GenTerm {
            q: self.q.clone(),
            growth: self.growth.iter().map(|g| Growth { c: g.c.clone(), chain: pre(&g.chain) }).collect(),
            decays: self.decays.iter().map(|d| Decay { chain: pre(&d.chain), ..d.clone() }).collect(),
        }
    }

    /// Some `N` with `|t(n) − limit| < delta` for every `n ≥ N`.
    pub fn settle_index(&self, delta: &Q) -> Result<u64, SeqError> {
        assert!(self.growth.is_empty(), "settle_index needs a bounded term");
        if self.decays.is_empty() {
            return Ok(1);
        }
        let share = delta / q_u64(self.decays.len() as u64);
        let mut n = 1;
        for d in &self.decays {
            let k = d.index_below(&share)?;
            n = n.max(first_reaching(&d.chain, k)?);
        }
        Ok(n)
    }

    /// Some `N` with `|t(n)| ≥ radius` for every `n ≥ N`, for a single growth chain.
    pub fn escape_index(&self, radius: &Q) -> Result<u64, SeqError> {
        let [g] = self.growth.as_slice() else {
            return Err(SeqError::Undecidable("escape of a term without a single growth chain".into()));
        };
        let slack: Q = self.decays.iter().map(Decay::sup_abs).fold(self.q.abs(), |a, b| a + b);
        let need = ((radius + slack) / g.c.abs()).ceil().to_integer() + BigInt::one();
        let k = need.to_u64().ok_or(SeqError::Unsupported("escape threshold overflow".into()))?;
        first_reaching(&g.chain, k)
    }

    pub fn to_json(&self) -> Value {
        let simple_chain = |c: &Chain| c.is_empty();
        if self.is_constant() {
            return json!({"const": format_q(&self.q)});
        }
        if self.decays.is_empty() && self.q.is_zero() {
            if let [g] = self.growth.as_slice() {
                if simple_chain(&g.chain) {
                    return json!({"unbounded": format_q(&g.c)});
                }
            }
        }
        json!({"general": {
            "q": format_q(&self.q),
            "growth": self.growth.iter().map(|g| json!({"c": format_q(&g.c), "chain": chain_json(&g.chain)})).collect::<Vec<_>>(),
            "decays": self.decays.iter().map(|d| match &d.kind {
                DecayKind::Harmonic => json!({"harm": format_q(&d.c), "chain": chain_json(&d.chain)}),
                DecayKind::Geometric(r) => json!({"geom": [format_q(&d.c), format_q(r)], "chain": chain_json(&d.chain)}),
            }).collect::<Vec<_>>(),
        }})
    }

    /// Parses a term; `support` anchors the positional index of `harm`/`geom`.
    pub fn from_json(v: &Value, support: &ExactSet) -> Result<GenTerm, SeqError> {
        let rat = |x: &Value| -> Result<Q, SeqError> {
            match x {
                Value::String(s) => parse_q(s).map_err(|e| SeqError::Schema(e.to_string())),
                Value::Number(n) => n
                    .as_i64()
                    .map(|i| Q::from_integer(i.into()))
                    .ok_or_else(|| SeqError::Schema(format!("non-integer number {n}; use \"p/q\" strings"))),
                other => Err(SeqError::Schema(format!("expected a rational, got {other}"))),
            }
        };
        let list = |x: &Value, len: usize| -> Result<Vec<Q>, SeqError> {
            let a = x.as_array().filter(|a| a.len() == len).ok_or_else(|| SeqError::Schema(format!("expected {len} rationals, got {x}")))?;
            a.iter().map(rat).collect()
        };
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| SeqError::Schema(format!("term must have exactly one key: {v}")))?;
        let (key, body) = obj.iter().next().expect("one key");
        match key.as_str() {
            "const" => Ok(GenTerm::constant(rat(body)?)),
            "harm" => {
                let p = list(body, 2)?;
                Ok(GenTerm::harmonic(p[0].clone(), p[1].clone(), support))
            }
            "geom" => {
                let p = list(body, 3)?;
                GenTerm::geometric(p[0].clone(), p[1].clone(), p[2].clone(), support)
            }
            "unbounded" => Ok(GenTerm::unbounded(rat(body)?)),
            "general" => {
                let q = rat(body.get("q").unwrap_or(&json!("0")))?;
                let mut growth = vec![];
                for g in body.get("growth").and_then(Value::as_array).cloned().unwrap_or_default() {
                    growth.push(Growth {
                        c: rat(g.get("c").ok_or_else(|| SeqError::Schema("growth needs c".into()))?)?,
                        chain: chain_from(g.get("chain"))?,
                    });
                }
                let mut decays = vec![];
                for d in body.get("decays").and_then(Value::as_array).cloned().unwrap_or_default() {
                    let chain = chain_from(d.get("chain"))?;
                    if let Some(c) = d.get("harm") {
                        decays.push(Decay { kind: DecayKind::Harmonic, c: rat(c)?, chain });
                    } else if let Some(p) = d.get("geom") {
                        let p = list(p, 2)?;
                        if p[1].abs() >= Q::one() {
                            return Err(SeqError::Invalid("geometric ratio must satisfy |ρ| < 1".into()));
                        }
                        decays.push(Decay { kind: DecayKind::Geometric(p[1].clone()), c: p[0].clone(), chain });
                    } else {
                        return Err(SeqError::Schema(format!("bad decay {d}")));
                    }
                }
                Ok(GenTerm { q, growth, decays }.normalized())
            }
            other => Err(SeqError::Schema(format!("unknown term kind `{other}`"))),
        }
    }

    /// Every set an index chain passes through.
    pub fn chain_sets(&self) -> impl Iterator<Item = &ExactSet> {
        self.growth.iter().flat_map(|g| g.chain.iter()).chain(self.decays.iter().flat_map(|d| d.chain.iter())).map(|s| match s {
            Step::Count(x) | Step::Enumerate(x) => x,
        })
    }
}

impl fmt::Display for GenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_q(&self.q))?;
        for g in &self.growth {
            write!(f, " + {}·n{}", format_q(&g.c), if g.chain.is_empty() { "" } else { "'" })?;
        }
        for d in &self.decays {
            match &d.kind {
                DecayKind::Harmonic => write!(f, " + {}/k", format_q(&d.c))?,
                DecayKind::Geometric(r) => write!(f, " + {}·({})^k", format_q(&d.c), format_q(r))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::ApSet;
    use crate::rational::{q, qi};

    #[test]
    fn harmonic_on_squares() {
        let sq = ExactSet::squares();
        let t = GenTerm::harmonic(qi(1), qi(1), &sq);
        assert_eq!(t.eval(9).unwrap(), q(4, 3));
        assert_eq!(t.limit().unwrap(), TermLimit::Finite(qi(1)));
    }

    #[test]
    fn chain_inversion() {
        let evens: ExactSet = ApSet::evens().into();
        let chain = vec![Step::Count(ExactSet::squares()), Step::Enumerate(evens)];
        for k in 1..40 {
            let n = first_reaching(&chain, k).unwrap();
            assert!(apply_chain(&chain, n).unwrap() >= k);
            if n > 1 {
                assert!(apply_chain(&chain, n - 1).unwrap() < k);
            }
        }
    }

    #[test]
    fn settle_and_escape() {
        let full = ExactSet::full();
        let t = GenTerm::harmonic(qi(0), qi(3), &full).add(&GenTerm::geometric(qi(0), qi(5), q(1, 2), &full).unwrap());
        let d = q(1, 10);
        let n0 = t.settle_index(&d).unwrap();
        for n in n0..n0 + 200 {
            assert!(t.eval(n).unwrap().abs() < d);
        }
        let u = GenTerm::unbounded(qi(-2)).add(&GenTerm::constant(qi(7)));
        let n1 = u.escape_index(&qi(100)).unwrap();
        for n in n1..n1 + 100 {
            assert!(u.eval(n).unwrap().abs() >= qi(100));
        }
    }

    #[test]
    fn like_terms_cancel() {
        let s = ExactSet::squares();
        let t = GenTerm::harmonic(qi(1), qi(2), &s);
        assert!(t.sub(&t).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let s: ExactSet = ApSet::odds().into();
        let t = GenTerm::harmonic(q(1, 2), qi(3), &s).precompose(&[Step::Enumerate(ApSet::evens().into())]);
        let back = GenTerm::from_json(&t.to_json(), &s).unwrap();
        assert_eq!(back, t);
        assert!(GenTerm::from_json(&json!({"geom": ["0", "1", "2"]}), &s).is_err());
    }
}
