use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::SetError;
use crate::rational::Q;

/// An eventually periodic subset of ω = {1, 2, ...}: the residue classes
/// `residues` modulo `modulus`, plus the finite `includes`, minus the finite
/// `excludes`.
///
/// Values are always canonical: the modulus is the least period of the
/// residue pattern and the corrections are exactly the points where the set
/// disagrees with its periodic part, so `==` is set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ApSetRepr", into = "ApSetRepr")]
pub struct ApSet {
    modulus: u64,
    residues: Vec<u64>,
    includes: BTreeSet<u64>,
    excludes: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct ApSetRepr {
    #[serde(default)]
    kind: Option<String>,
    #[serde(rename = "mod")]
    modulus: u64,
    residues: Vec<u64>,
    #[serde(default)]
    inc: Vec<u64>,
    #[serde(default)]
    exc: Vec<u64>,
}

impl TryFrom<ApSetRepr> for ApSet {
    type Error = SetError;
    fn try_from(r: ApSetRepr) -> Result<Self, SetError> {
        if let Some(k) = r.kind.as_deref() {
            if k != "ap" {
                return Err(SetError::Schema(format!("expected an ap set, got kind `{k}`")));
            }
        }
        ApSet::new(r.modulus, r.residues, r.inc, r.exc)
    }
}

impl From<ApSet> for ApSetRepr {
    fn from(s: ApSet) -> Self {
        ApSetRepr {
            kind: Some("ap".into()),
            modulus: s.modulus,
            residues: s.residues,
            inc: s.includes.into_iter().collect(),
            exc: s.excludes.into_iter().collect(),
        }
    }
}

impl ApSet {
    /// Builds and canonicalizes. Residues are taken modulo `modulus`;
    /// corrections that agree with the periodic part and the point 0 are dropped.
    pub fn new(
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
        includes: impl IntoIterator<Item = u64>,
        excludes: impl IntoIterator<Item = u64>,
    ) -> Result<Self, SetError> {
        if modulus == 0 {
            return Err(SetError::Invalid("modulus must be positive".into()));
        }
        let residues: BTreeSet<u64> = residues.into_iter().map(|r| r % modulus).collect();
        let mut s = ApSet {
            modulus,
            residues: residues.into_iter().collect(),
            includes: BTreeSet::new(),
            excludes: BTreeSet::new(),
        };
        let includes: BTreeSet<u64> = includes.into_iter().filter(|&n| n >= 1).collect();
        let excludes: BTreeSet<u64> = excludes.into_iter().filter(|&n| n >= 1).collect();
        if let Some(both) = includes.intersection(&excludes).next() {
            return Err(SetError::Invalid(format!("{both} is both included and excluded")));
        }
        s.includes = includes.into_iter().filter(|&n| !s.periodic_contains(n)).collect();
        s.excludes = excludes.into_iter().filter(|&n| s.periodic_contains(n)).collect();
        s.reduce_modulus();
        Ok(s)
    }

    pub fn empty() -> Self {
        ApSet { modulus: 1, residues: vec![], includes: BTreeSet::new(), excludes: BTreeSet::new() }
    }

    /// ω itself.
    pub fn full() -> Self {
        ApSet { modulus: 1, residues: vec![0], includes: BTreeSet::new(), excludes: BTreeSet::new() }
    }

    /// `{n ≥ 1 : n ≡ r (mod m)}`.
    pub fn residue_class(r: u64, m: u64) -> Self {
        Self::new(m, [r], [], []).expect("positive modulus")
    }

    pub fn evens() -> Self {
        Self::residue_class(0, 2)
    }

    pub fn odds() -> Self {
        Self::residue_class(1, 2)
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Self {
        Self::new(1, [], elems, []).expect("valid")
    }

    /// `{n : n ≥ start}`.
    pub fn tail_from(start: u64) -> Self {
        Self::new(1, [0], [], 1..start.max(1)).expect("valid")
    }

    /// Builds the set whose membership is `f` on `1..threshold` and follows
    /// the `period`-periodic pattern of `f` on `[threshold, threshold + period)`
    /// from there on. The caller guarantees `f` really is periodic past `threshold`.
    pub fn from_eventually_periodic(period: u64, threshold: u64, f: impl Fn(u64) -> bool) -> Self {
        let period = period.max(1);
        let threshold = threshold.max(1);
        let mut residues = BTreeSet::new();
        for n in threshold..threshold + period {
            if f(n) {
                residues.insert(n % period);
            }
        }
        let mut s = ApSet {
            modulus: period,
            residues: residues.into_iter().collect(),
            includes: BTreeSet::new(),
            excludes: BTreeSet::new(),
        };
        for n in 1..threshold {
            match (f(n), s.periodic_contains(n)) {
                (true, false) => {
                    s.includes.insert(n);
                }
                (false, true) => {
                    s.excludes.insert(n);
                }
                _ => {}
            }
        }
        s.reduce_modulus();
        s
    }

    fn reduce_modulus(&mut self) {
        let m = self.modulus;
        if self.residues.is_empty() {
            self.modulus = 1;
            return;
        }
        let set: BTreeSet<u64> = self.residues.iter().copied().collect();
        for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
            if set.iter().all(|&r| set.contains(&((r + d) % m))) {
                if d < m {
                    let reduced: BTreeSet<u64> = set.iter().map(|r| r % d).collect();
                    self.modulus = d;
                    self.residues = reduced.into_iter().collect();
                }
                return;
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn includes(&self) -> &BTreeSet<u64> {
        &self.includes
    }

    pub fn excludes(&self) -> &BTreeSet<u64> {
        &self.excludes
    }

    /// Membership in the periodic part only. Also meaningful at 0.
    pub fn periodic_contains(&self, n: u64) -> bool {
        self.residues.binary_search(&(n % self.modulus)).is_ok()
    }

    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        if self.periodic_contains(n) {
            !self.excludes.contains(&n)
        } else {
            self.includes.contains(&n)
        }
    }

    /// Flips membership of `n ≥ 1`.
    pub fn toggle(&mut self, n: u64) {
        if !self.includes.remove(&n) && !self.excludes.remove(&n) && n >= 1 {
            if self.periodic_contains(n) {
                self.excludes.insert(n);
            } else {
                self.includes.insert(n);
            }
        }
    }

    /// Largest correction point, 0 if none.
    pub fn max_correction(&self) -> u64 {
        let a = self.includes.iter().next_back().copied().unwrap_or(0);
        let b = self.excludes.iter().next_back().copied().unwrap_or(0);
        a.max(b)
    }

    /// `|S ∩ [1, n]|`.
    pub fn count(&self, n: u64) -> u64 {
        let m = self.modulus;
        let (cycles, rem) = (n / m, n % m);
        let partial = self.residues.iter().filter(|&&r| r >= 1 && r <= rem).count() as u64;
        let periodic = cycles * self.residues.len() as u64 + partial;
        let inc = self.includes.range(..=n).count() as u64;
        let exc = self.excludes.range(..=n).count() as u64;
        periodic + inc - exc
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.modulus == 1 && !self.residues.is_empty() && self.excludes.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.includes.is_empty()
    }

    /// Number of elements when finite.
    pub fn len(&self) -> Option<u64> {
        self.is_finite().then_some(self.includes.len() as u64)
    }

    /// Natural density `|residues| / modulus`; corrections vanish in the limit.
    pub fn density(&self) -> Q {
        crate::rational::q(self.residues.len() as i64, self.modulus as i64)
    }

    /// Elements per period.
    pub fn per_period(&self) -> u64 {
        self.residues.len() as u64
    }

    /// The `k`-th smallest element (1-based).
    pub fn enumerate(&self, k: u64) -> Result<u64, SetError> {
        if k == 0 {
            return Err(SetError::Invalid("enumeration index starts at 1".into()));
        }
        if self.is_finite() {
            return self
                .includes
                .iter()
                .nth((k - 1) as usize)
                .copied()
                .ok_or(SetError::FiniteSetExhausted { index: k, size: self.includes.len() as u64 });
        }
        let per = self.per_period();
        let mut hi = (k / per + 1) * self.modulus + self.max_correction() + self.modulus;
        while self.count(hi) < k {
            hi *= 2;
        }
        let mut lo = 0u64;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.count(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Ascending iterator over elements up to and including `n`.
    pub fn iter_upto(&self, n: u64) -> Box<dyn Iterator<Item = u64> + '_> {
        if self.residues.is_empty() {
            return Box::new(self.includes.range(..=n).copied());
        }
        // walk the periodic part class by class, then merge the corrections in
        let m = self.modulus;
        let periodic = (0..=n / m)
            .flat_map(move |b| self.residues.iter().map(move |&r| b * m + r))
            .filter(move |&i| i >= 1 && i <= n && !self.excludes.contains(&i));
        let mut extra = self.includes.range(..=n).copied().peekable();
        let mut periodic = periodic.peekable();
        Box::new(std::iter::from_fn(move || match (periodic.peek(), extra.peek()) {
            (Some(&a), Some(&b)) if b < a => extra.next(),
            (Some(_), _) => periodic.next(),
            (None, _) => extra.next(),
        }))
    }

    /// Off both operands' corrections the result follows the periodic rule,
    /// so only the correction points are checked.
    pub(crate) fn combine(&self, other: &ApSet, op: impl Fn(bool, bool) -> bool) -> ApSet {
        let m = self.modulus.lcm(&other.modulus);
        let residues: Vec<u64> =
            (0..m).filter(|&r| op(self.periodic_contains(r), other.periodic_contains(r))).collect();
        let mut out = ApSet { modulus: m, residues, includes: BTreeSet::new(), excludes: BTreeSet::new() };
        let points: BTreeSet<u64> = [self, other].iter().flat_map(|s| s.includes.iter().chain(s.excludes.iter())).copied().collect();
        for n in points {
            match (op(self.contains(n), other.contains(n)), out.periodic_contains(n)) {
                (true, false) => {
                    out.includes.insert(n);
                }
                (false, true) => {
                    out.excludes.insert(n);
                }
                _ => {}
            }
        }
        out.reduce_modulus();
        out
    }

    pub fn union(&self, other: &ApSet) -> ApSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &ApSet) -> ApSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &ApSet) -> ApSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &ApSet) -> ApSet {
        self.combine(other, |a, b| a != b)
    }

    pub fn complement(&self) -> ApSet {
        let residues: Vec<u64> =
            (0..self.modulus).filter(|r| self.residues.binary_search(r).is_err()).collect();
        let mut s = ApSet {
            modulus: self.modulus,
            residues,
            includes: self.excludes.clone(),
            excludes: self.includes.clone(),
        };
        s.reduce_modulus();
        s
    }

    pub fn is_subset(&self, other: &ApSet) -> bool {
        self.difference(other).is_empty()
    }

    /// `A_B = {a_b : b ∈ B}` where `(a_n)` enumerates `self`.
    ///
    /// Uses `A_B = {n ∈ A : count(A, n) ∈ B}`. Past the corrections of both
    /// sets, `count(A, n + M') = count(A, n) + L` with `L = lcm(P, M_B)` and
    /// `M' = (L / P) · M_A`, so the result is periodic with period `M'`.
    pub fn reindex(&self, b: &ApSet) -> Result<ApSet, SetError> {
        if self.is_finite() {
            return Err(SetError::Invalid("reindex needs an infinite enumerating set".into()));
        }
        let p = self.per_period();
        let l = p.lcm(&b.modulus);
        let period = (l / p) * self.modulus;
        let start = self.enumerate(b.max_correction() + 1)?;
        let threshold = self.max_correction().max(start) + 1;
        Ok(ApSet::from_eventually_periodic(period, threshold, |n| {
            self.contains(n) && b.contains(self.count(n))
        }))
    }

    /// `{k : a_k ∈ U}` where `(a_k)` enumerates `self`: the positions of the
    /// enumeration that land in `U`.
    pub fn enumeration_preimage(&self, u: &ApSet) -> Result<ApSet, SetError> {
        if self.is_finite() {
            return Err(SetError::Invalid("preimage needs an infinite enumerating set".into()));
        }
        let period = self.per_period() * (u.modulus / u.modulus.gcd(&self.modulus));
        let past = self.max_correction().max(u.max_correction());
        let threshold = self.count(past) + 1;
        Ok(ApSet::from_eventually_periodic(period, threshold, |k| {
            u.contains(self.enumerate(k).expect("infinite set"))
        }))
    }

    /// `{t ≥ 1 : t^e ∈ self}`. `t^e mod M` has period `M` in `t`.
    pub fn power_preimage(&self, e: u32) -> ApSet {
        let bound = self.max_correction();
        let mut threshold = 1u64;
        while pow_sat(threshold, e) <= bound {
            threshold += 1;
        }
        let m = self.modulus;
        ApSet::from_eventually_periodic(m, threshold, |t| {
            if t < threshold {
                match checked_pow(t, e) {
                    Some(v) => self.contains(v),
                    None => self.periodic_contains(pow_mod(t, e, m)),
                }
            } else {
                self.periodic_contains(pow_mod(t, e, m))
            }
        })
    }
}

pub(crate) fn checked_pow(t: u64, e: u32) -> Option<u64> {
    t.checked_pow(e)
}

pub(crate) fn pow_sat(t: u64, e: u32) -> u64 {
    t.checked_pow(e).unwrap_or(u64::MAX)
}

pub(crate) fn pow_mod(t: u64, e: u32, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        let mut acc = 1 % m;
        let mut base = t % m;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        return acc;
    }
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut base = (t as u128) % m128;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

impl fmt::Debug for ApSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ApSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.is_empty() {
            write!(f, "{{")?;
        } else if self.modulus == 1 {
            write!(f, "ω")?;
        } else {
            let rs: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
            write!(f, "{{{} mod {}}}", rs.join(","), self.modulus)?;
        }
        if self.residues.is_empty() {
            let xs: Vec<String> = self.includes.iter().map(|r| r.to_string()).collect();
            return write!(f, "{}}}", xs.join(","));
        }
        if !self.includes.is_empty() {
            write!(f, " ∪ {:?}", self.includes)?;
        }
        if !self.excludes.is_empty() {
            write!(f, " \\ {:?}", self.excludes)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(s: &ApSet, n: u64) -> u64 {
        (1..=n).filter(|&i| s.contains(i)).count() as u64
    }

    #[test]
    fn membership_basics() {
        assert!(!ApSet::evens().contains(7));
        assert!(ApSet::residue_class(1, 3).contains(7));
        assert!(!ApSet::full().contains(0));
    }

    #[test]
    fn count_examples() {
        assert_eq!(ApSet::evens().count(10), 5);
        let s = ApSet::new(3, [0], [1], []).unwrap();
        assert_eq!(s.count(9), 4);
        assert_eq!(s.count(9), brute_count(&s, 9));
        assert_eq!(ApSet::full().count(0), 0);
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(ApSet::evens().complement(), ApSet::odds());
        let six = ApSet::evens().intersect(&ApSet::residue_class(0, 3));
        assert_eq!(six, ApSet::residue_class(0, 6));
        let u = ApSet::residue_class(1, 4).union(&ApSet::residue_class(3, 4));
        assert_eq!(u, ApSet::odds());
        assert_eq!(u.modulus(), 2);
        for n in 1..=100 {
            assert_eq!(u.contains(n), n % 2 == 1);
        }
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = ApSet::new(6, [1, 3, 5], [2], [3]).unwrap();
        let b = ApSet::new(2, [1], [2], [3]).unwrap();
        assert_eq!(a, b);
        // An include that is already periodic is redundant.
        let c = ApSet::new(2, [0], [4], []).unwrap();
        assert_eq!(c, ApSet::evens());
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(ApSet::evens().enumerate(3).unwrap(), 6);
        assert_eq!(ApSet::odds().enumerate(1).unwrap(), 1);
        let s = ApSet::new(3, [0], [], [3]).unwrap();
        assert_eq!(s.enumerate(2).unwrap(), 9);
        let f = ApSet::finite([2, 5]);
        assert_eq!(f.enumerate(2).unwrap(), 5);
        assert!(matches!(f.enumerate(3), Err(SetError::FiniteSetExhausted { .. })));
    }

    #[test]
    fn reindex_examples() {
        let e = ApSet::evens();
        assert_eq!(e.reindex(&e).unwrap(), ApSet::residue_class(0, 4));
        let b = ApSet::new(5, [1, 4], [2], [4]).unwrap();
        assert_eq!(ApSet::full().reindex(&b).unwrap(), b);
        assert_eq!(b.reindex(&ApSet::full()).unwrap(), b);
        assert_eq!(ApSet::odds().reindex(&e).unwrap(), ApSet::residue_class(3, 4));
    }

    #[test]
    fn preimages() {
        let a = ApSet::new(3, [0, 1], [2], [3]).unwrap();
        let u = ApSet::new(4, [1], [6], []).unwrap();
        let pre = a.enumeration_preimage(&u).unwrap();
        for k in 1..300 {
            assert_eq!(pre.contains(k), u.contains(a.enumerate(k).unwrap()), "k={k}");
        }
        let sq = ApSet::new(5, [1, 4], [2], [4]).unwrap().power_preimage(2);
        for t in 1..200u64 {
            assert_eq!(sq.contains(t), ApSet::new(5, [1, 4], [2], [4]).unwrap().contains(t * t));
        }
    }

    #[test]
    fn json_shape() {
        let s = ApSet::new(3, [0], [1], []).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"ap","mod":3,"residues":[0],"inc":[1],"exc":[]}"#);
        let back: ApSet = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
