//! Subsets of ω = {1, 2, ...}.
//!
//! [`NatSet`] is the common face of the representations: exact eventually
//! periodic sets with power tracks, block sets with a schedule, images of
//! planar rectangle sets under the Cantor pairing, and opaque predicates.
//! Operations stay exact when both operands share a representation and fall
//! back to a predicate otherwise.

mod ap;
mod block;
mod general;
mod pair;
mod power;

use serde_json::{json, Value};

pub use ap::ApSet;
pub use block::{floor_root, BlockSet, Schedule};
pub use general::GeneralSet;
pub use pair::{pairing, unpairing, PairSet};
pub use power::{integer_root, ExactSet, PowerTrack, MAX_EXPONENT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("invalid set: {0}")]
    Invalid(String),
    #[error("enumeration index {index} exceeds the size {size} of a finite set")]
    FiniteSetExhausted { index: u64, size: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("schema error: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for SetError {
    fn from(e: serde_json::Error) -> Self {
        SetError::Schema(e.to_string())
    }
}

/// Scans past this many integers are refused.
pub const SCAN_LIMIT: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub enum NatSet {
    Exact(ExactSet),
    Block(BlockSet),
    /// `{unpairing(i, j) : (i, j) ∈ P}`.
    Paired(PairSet),
    General(GeneralSet),
}

impl From<ApSet> for NatSet {
    fn from(s: ApSet) -> Self {
        NatSet::Exact(s.into())
    }
}

impl From<ExactSet> for NatSet {
    fn from(s: ExactSet) -> Self {
        NatSet::Exact(s)
    }
}

impl From<BlockSet> for NatSet {
    fn from(s: BlockSet) -> Self {
        NatSet::Block(s)
    }
}

impl From<PairSet> for NatSet {
    fn from(s: PairSet) -> Self {
        NatSet::Paired(s)
    }
}

impl From<GeneralSet> for NatSet {
    fn from(s: GeneralSet) -> Self {
        NatSet::General(s)
    }
}

impl NatSet {
    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            NatSet::Exact(s) => s.contains(n),
            NatSet::Block(s) => s.contains(n),
            NatSet::Paired(p) => p.contains(pairing(n)),
            NatSet::General(g) => g.contains(n),
        }
    }

    /// True when `count` does not need a scan.
    pub fn has_fast_count(&self) -> bool {
        match self {
            NatSet::Exact(_) | NatSet::Block(_) => true,
            NatSet::General(g) => g.has_counter(),
            NatSet::Paired(_) => false,
        }
    }

    pub fn count(&self, n: u64) -> u64 {
        match self {
            NatSet::Exact(s) => s.count(n),
            NatSet::Block(s) => s.count(n),
            NatSet::General(g) => g.count(n),
            NatSet::Paired(_) => (1..=n).filter(|&k| self.contains(k)).count() as u64,
        }
    }

    /// Counts at ascending checkpoints with a single pass when no closed form exists.
    pub fn counts_at(&self, checkpoints: &[u64]) -> Vec<u64> {
        if self.has_fast_count() {
            return checkpoints.iter().map(|&n| self.count(n)).collect();
        }
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut acc = 0u64;
        let mut k = 0u64;
        for &n in checkpoints {
            while k < n {
                k += 1;
                acc += self.contains(k) as u64;
            }
            out.push(acc);
        }
        out
    }

    pub fn as_exact(&self) -> Option<&ExactSet> {
        match self {
            NatSet::Exact(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_ap(&self) -> Option<&ApSet> {
        self.as_exact().and_then(ExactSet::as_ap)
    }

    /// `None` when finiteness cannot be decided from the representation.
    pub fn is_finite(&self) -> Option<bool> {
        match self {
            NatSet::Exact(s) => Some(s.is_finite()),
            NatSet::Block(b) => Some(!b.is_infinite()),
            NatSet::Paired(p) => Some(p.is_finite()),
            NatSet::General(_) => None,
        }
    }

    /// The `k`-th element (1-based).
    pub fn enumerate(&self, k: u64) -> Result<u64, SetError> {
        if k == 0 {
            return Err(SetError::Invalid("enumeration index starts at 1".into()));
        }
        if let NatSet::Exact(s) = self {
            return s.enumerate(k);
        }
        let mut seen = 0;
        for n in 1..=SCAN_LIMIT {
            if self.contains(n) {
                seen += 1;
                if seen == k {
                    return Ok(n);
                }
            }
        }
        if self.is_finite() == Some(true) {
            return Err(SetError::FiniteSetExhausted { index: k, size: seen });
        }
        Err(SetError::Unsupported(format!("element {k} lies beyond the scan limit")))
    }

    pub fn describe(&self) -> String {
        match self {
            NatSet::Exact(s) => s.to_string(),
            NatSet::Block(b) => format!("{b:?}"),
            NatSet::Paired(p) => format!("paired({p:?})"),
            NatSet::General(g) => format!("{g:?}"),
        }
    }

    fn to_general(&self, a: &NatSet, b: Option<&NatSet>, op: fn(bool, bool) -> bool, tag: &str) -> NatSet {
        let a2 = a.clone();
        let b2 = b.cloned();
        let name = match b {
            Some(b) => format!("{tag}({}, {})", a.describe(), b.describe()),
            None => format!("{tag}({})", a.describe()),
        };
        NatSet::General(GeneralSet::new(name, move |n| {
            op(a2.contains(n), b2.as_ref().is_some_and(|b| b.contains(n)))
        }))
    }

    pub fn complement(&self) -> NatSet {
        match self {
            NatSet::Exact(s) => NatSet::Exact(s.complement()),
            NatSet::Paired(p) => NatSet::Paired(p.complement()),
            NatSet::Block(b) => match b.complement() {
                Some(c) => NatSet::Block(c),
                None => self.to_general(self, None, |a, _| !a, "not"),
            },
            NatSet::General(_) => self.to_general(self, None, |a, _| !a, "not"),
        }
    }

    fn binary(
        &self,
        other: &NatSet,
        op: fn(bool, bool) -> bool,
        tag: &str,
        exact: fn(&ExactSet, &ExactSet) -> Result<ExactSet, SetError>,
        block: fn(&BlockSet, &BlockSet) -> Option<BlockSet>,
        pair: fn(&PairSet, &PairSet) -> PairSet,
    ) -> NatSet {
        match (self, other) {
            (NatSet::Exact(a), NatSet::Exact(b)) => {
                if let Ok(s) = exact(a, b) {
                    return NatSet::Exact(s);
                }
            }
            (NatSet::Block(a), NatSet::Block(b)) => {
                if let Some(s) = block(a, b) {
                    return NatSet::Block(s);
                }
            }
            (NatSet::Paired(a), NatSet::Paired(b)) => return NatSet::Paired(pair(a, b)),
            _ => {}
        }
        self.to_general(self, Some(other), op, tag)
    }

    pub fn union(&self, other: &NatSet) -> NatSet {
        self.binary(other, |a, b| a || b, "union", ExactSet::union, BlockSet::union, PairSet::union)
    }

    pub fn intersect(&self, other: &NatSet) -> NatSet {
        self.binary(other, |a, b| a && b, "inter", ExactSet::intersect, BlockSet::intersect, PairSet::intersect)
    }

    pub fn difference(&self, other: &NatSet) -> NatSet {
        self.binary(other, |a, b| a && !b, "diff", ExactSet::difference, BlockSet::difference, PairSet::difference)
    }

    /// Parses the JSON set language.
    pub fn from_json(v: &Value) -> Result<NatSet, SetError> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| SetError::Schema(format!("set without a `kind`: {v}")))?;
        let field = |name: &str| v.get(name).ok_or_else(|| SetError::Schema(format!("`{kind}` set needs `{name}`")));
        let ap = |x: &Value| -> Result<ApSet, SetError> { Ok(serde_json::from_value(x.clone())?) };
        let list = |name: &str| -> Result<Vec<NatSet>, SetError> {
            field(name)?
                .as_array()
                .ok_or_else(|| SetError::Schema(format!("`{name}` must be an array")))?
                .iter()
                .map(NatSet::from_json)
                .collect()
        };
        Ok(match kind {
            "ap" => ap(v)?.into(),
            "full" => ApSet::full().into(),
            "empty" => ApSet::empty().into(),
            "evens" => ApSet::evens().into(),
            "odds" => ApSet::odds().into(),
            "squares" => ExactSet::squares().into(),
            "cubes" => ExactSet::cubes().into(),
            "finite" => ApSet::finite(serde_json::from_value::<Vec<u64>>(field("elems")?.clone())?).into(),
            "power" => {
                let e: u32 = serde_json::from_value(field("exp")?.clone())?;
                ExactSet::power(e, &ap(field("sel")?)?)?.into()
            }
            "exact" => {
                let mut acc: ExactSet = ap(field("dense")?)?.into();
                if let Some(tracks) = v.get("tracks") {
                    let tracks: Vec<PowerTrack> = serde_json::from_value(tracks.clone())?;
                    for t in tracks {
                        acc = acc.symmetric_difference(&ExactSet::power(t.exp, &t.sel)?)?;
                    }
                }
                acc.into()
            }
            "block" => {
                let sched: Schedule = serde_json::from_value(field("schedule")?.clone())?;
                BlockSet::new(sched, ap(field("selector")?)?)?.into()
            }
            "pair" | "paired" => {
                let raw: PairSet = serde_json::from_value(v.clone())?;
                PairSet::new(raw.rects).with_corrections(raw.inc, raw.exc).into()
            }
            "union" | "inter" => {
                let sets = list("of")?;
                let mut acc: NatSet = if kind == "union" { ApSet::empty() } else { ApSet::full() }.into();
                for s in &sets {
                    acc = if kind == "union" { acc.union(s) } else { acc.intersect(s) };
                }
                acc
            }
            "diff" => {
                let sets = list("of")?;
                let [a, b] = <[NatSet; 2]>::try_from(sets)
                    .map_err(|_| SetError::Schema("`diff` takes exactly two sets".into()))?;
                a.difference(&b)
            }
            "not" => NatSet::from_json(field("of")?)?.complement(),
            other => return Err(SetError::Schema(format!("unknown set kind `{other}`"))),
        })
    }

    pub fn to_json(&self) -> Result<Value, SetError> {
        Ok(match self {
            NatSet::Exact(s) => exact_json(s),
            NatSet::Block(b) => json!({
                "kind": "block",
                "schedule": serde_json::to_value(b.schedule)?,
                "selector": serde_json::to_value(&b.selector)?,
            }),
            NatSet::Paired(p) => {
                let mut v = serde_json::to_value(p)?;
                v["kind"] = json!("pair");
                v
            }
            NatSet::General(g) => {
                return Err(SetError::Unsupported(format!("{} has no JSON form", g.name())));
            }
        })
    }
}

pub fn exact_json(s: &ExactSet) -> Value {
    match s.as_ap() {
        Some(ap) => serde_json::to_value(ap).expect("serializable"),
        None => json!({
            "kind": "exact",
            "dense": serde_json::to_value(s.dense()).expect("serializable"),
            "tracks": serde_json::to_value(s.tracks()).expect("serializable"),
        }),
    }
}
