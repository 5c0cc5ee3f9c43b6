//! Eventually periodic sets perturbed by power tracks.
//!
//! An [`ExactSet`] is `D ⊕ T₁ ⊕ … ⊕ T_r` where `D` is an [`ApSet`] and each
//! `T_i = {t^{e_i} : t ∈ S_i}` is a power track with exponent `e_i ≥ 2` and
//! a purely periodic selector `S_i`. The class is a Boolean algebra: the
//! intersection of an `e`-track and an `f`-track is an `lcm(e, f)`-track, and
//! pulling a periodic set back along `t ↦ t^e` is again periodic.
//!
//! Tracks have zero density of every kind used here and are summable under
//! the weight `1/n`, so every density of an `ExactSet` equals that of `D`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ap::{checked_pow, pow_mod};
use super::block::floor_root;
use super::{ApSet, SetError};
use crate::rational::Q;

type CombineKey = (u8, ExactSet, ExactSet);
const COMBINE_CACHE_CAP: usize = 4096;

thread_local! {
    static COMBINE_CACHE: RefCell<HashMap<CombineKey, ExactSet>> = RefCell::new(HashMap::new());
}

/// Largest exponent a track may carry; `2^MAX_EXPONENT` must fit in `u64`.
pub const MAX_EXPONENT: u32 = 62;

/// `{t^exp : t ∈ sel}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerTrack {
    pub exp: u32,
    pub sel: ApSet,
}

impl PowerTrack {
    pub fn contains(&self, n: u64) -> bool {
        match integer_root(n, self.exp) {
            Some(t) => self.sel.contains(t),
            None => false,
        }
    }

    /// Track points `t^exp ≤ n` with `t ∈ sel`, ascending.
    pub fn points_upto(&self, n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut t = 1u64;
        while let Some(v) = checked_pow(t, self.exp) {
            if v > n {
                break;
            }
            if self.sel.contains(t) {
                out.push(v);
            }
            t += 1;
        }
        out
    }
}

/// `r ↦ [r^k mod m ∈ S]` over one period `m` of `S`'s periodic part.
fn power_table(s: &ApSet, k: u32) -> Vec<bool> {
    let m = s.modulus();
    (0..m).map(|r| s.periodic_contains(pow_mod(r, k, m))).collect()
}

/// Exact `t` with `t^e = n`, if any.
pub fn integer_root(n: u64, e: u32) -> Option<u64> {
    if n == 0 {
        return None;
    }
    if e == 1 {
        return Some(n);
    }
    let guess = (n as f64).powf(1.0 / e as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&t| t >= 1 && checked_pow(t, e) == Some(n))
}

/// Exact member of the power-track class. Canonical: tracks sorted by
/// exponent, distinct exponents, selectors purely periodic and infinite.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactSet {
    dense: ApSet,
    tracks: Vec<PowerTrack>,
}

impl From<ApSet> for ExactSet {
    fn from(dense: ApSet) -> Self {
        ExactSet { dense, tracks: vec![] }
    }
}

impl ExactSet {
    pub fn dense(&self) -> &ApSet {
        &self.dense
    }

    pub fn tracks(&self) -> &[PowerTrack] {
        &self.tracks
    }

    pub fn as_ap(&self) -> Option<&ApSet> {
        self.tracks.is_empty().then_some(&self.dense)
    }

    pub fn full() -> Self {
        ApSet::full().into()
    }

    pub fn empty() -> Self {
        ApSet::empty().into()
    }

    /// `{t^e : t ∈ sel}`.
    pub fn power(e: u32, sel: &ApSet) -> Result<Self, SetError> {
        if !(2..=MAX_EXPONENT).contains(&e) {
            if e == 1 {
                return Ok(sel.clone().into());
            }
            return Err(SetError::Invalid(format!("track exponent {e} out of range 1..={MAX_EXPONENT}")));
        }
        let periodic = ApSet::new(sel.modulus(), sel.residues().iter().copied(), [], [])?;
        let flips: BTreeSet<u64> = sel
            .includes()
            .iter()
            .chain(sel.excludes().iter())
            .filter_map(|&t| checked_pow(t, e))
            .collect();
        let mut tracks = vec![];
        if !periodic.is_finite() {
            tracks.push(PowerTrack { exp: e, sel: periodic });
        }
        Ok(ExactSet { dense: ApSet::finite(flips), tracks })
    }

    pub fn squares() -> Self {
        Self::power(2, &ApSet::full()).expect("valid")
    }

    pub fn cubes() -> Self {
        Self::power(3, &ApSet::full()).expect("valid")
    }

    fn track_parity(&self, n: u64) -> bool {
        self.tracks.iter().filter(|t| t.contains(n)).count() % 2 == 1
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && (self.dense.contains(n) ^ self.track_parity(n))
    }

    /// Distinct track points up to `n`.
    fn track_points_upto(&self, n: u64) -> Vec<u64> {
        let mut pts: Vec<u64> = self.tracks.iter().flat_map(|t| t.points_upto(n)).collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    pub fn count(&self, n: u64) -> u64 {
        let base = self.dense.count(n) as i64;
        let few = self.tracks.iter().map(|t| floor_root(n, t.exp)).sum::<u64>() <= 64;
        let delta = if few {
            self.track_points_upto(n).into_iter().map(|p| self.contains(p) as i64 - self.dense.contains(p) as i64).sum()
        } else {
            self.track_delta(n)
        };
        (base + delta) as u64
    }

    /// `Σ_{p ≤ n} (contains(p) − dense.contains(p))` without visiting every
    /// track point. A point in `c` tracks flips membership iff `c` is odd,
    /// and then moves the count by `1 − 2·D(p)`.
    fn track_delta(&self, n: u64) -> i64 {
        let d = &self.dense;
        let weight = |p: u64| 1 - 2 * d.contains(p) as i64;
        let mut total = 0i64;
        for tr in &self.tracks {
            // t ↦ [t ∈ sel]·(1 − 2·D_per(t^e)) is periodic in t
            let period = tr.sel.modulus().lcm(&d.modulus());
            let w: Vec<i64> = (0..period)
                .map(|c| {
                    if tr.sel.periodic_contains(c) {
                        1 - 2 * d.periodic_contains(pow_mod(c, tr.exp, d.modulus())) as i64
                    } else {
                        0
                    }
                })
                .collect();
            let r = floor_root(n, tr.exp);
            let full: i64 = w.iter().sum();
            total += (r / period) as i64 * full + w[1..=(r % period) as usize].iter().sum::<i64>();
            for &p in d.includes().range(..=n).chain(d.excludes().range(..=n)) {
                if tr.contains(p) {
                    total += weight(p) - (1 - 2 * d.periodic_contains(p) as i64);
                }
            }
        }
        // points on several tracks were counted once per track
        let mut shared = BTreeSet::new();
        for (i, a) in self.tracks.iter().enumerate() {
            for b in &self.tracks[i + 1..] {
                let l = a.exp.lcm(&b.exp);
                let mut u = 1u64;
                while let Some(p) = checked_pow(u, l).filter(|&p| p <= n) {
                    shared.insert(p);
                    u += 1;
                }
            }
        }
        for p in shared {
            let c = self.tracks.iter().filter(|t| t.contains(p)).count() as i64;
            total += ((c % 2) - c) * weight(p);
        }
        total
    }

    pub fn is_finite(&self) -> bool {
        self.dense.is_finite() && self.tracks.is_empty()
    }

    /// Natural density; it exists for every set in the class.
    pub fn density(&self) -> Q {
        self.dense.density()
    }

    pub fn enumerate(&self, k: u64) -> Result<u64, SetError> {
        if let Some(ap) = self.as_ap() {
            return ap.enumerate(k);
        }
        if k == 0 {
            return Err(SetError::Invalid("enumeration index starts at 1".into()));
        }
        if self.is_finite() {
            return self.dense.enumerate(k);
        }
        let mut hi = 2 * k + self.dense.max_correction() + 2;
        while self.count(hi) < k {
            hi = hi.checked_mul(2).ok_or(SetError::Overflow)?;
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

    /// Elements up to `n`, ascending.
    pub fn elements_upto(&self, n: u64) -> Vec<u64> {
        if self.tracks.is_empty() {
            return self.dense.iter_upto(n).collect();
        }
        let odd: BTreeSet<u64> = self.track_points_upto(n).into_iter().filter(|&p| self.track_parity(p)).collect();
        let mut out: Vec<u64> = self.dense.iter_upto(n).filter(|p| !odd.contains(p)).collect();
        out.extend(odd.iter().copied().filter(|&p| !self.dense.contains(p)));
        out.sort_unstable();
        out
    }

    /// Largest point where the set is not described by periodic rules alone.
    pub fn max_correction(&self) -> u64 {
        self.dense.max_correction()
    }

    pub fn complement(&self) -> Self {
        ExactSet { dense: self.dense.complement(), tracks: self.tracks.clone() }
    }

    pub fn union(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a != b)
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, SetError> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty() && self.dense.is_empty()
    }

    /// Union of a finite list.
    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a ExactSet>) -> Result<Self, SetError> {
        let mut acc = ExactSet::empty();
        for s in sets {
            acc = acc.union(s)?;
        }
        Ok(acc)
    }

    /// Adds or removes finitely many points.
    pub fn with_points(&self, add: &BTreeSet<u64>, remove: &BTreeSet<u64>) -> Result<Self, SetError> {
        let mut dense = self.dense.clone();
        let flips = add
            .iter()
            .filter(|&&p| !remove.contains(&p) && !self.contains(p))
            .chain(remove.iter().filter(|&&p| self.contains(p)));
        for &p in flips {
            dense.toggle(p);
        }
        Ok(ExactSet { dense, tracks: self.tracks.clone() })
    }

    /// Applies a pointwise Boolean operation.
    ///
    /// The result's periodic part is `op` applied to the periodic parts. Its
    /// tracks live on the lcm-closure of both exponent sets; the selector of
    /// exponent `e` is read off at a generic (non perfect power) `t` in each
    /// residue class, where `t^e` is an `e'`-th power exactly when `e' | e`.
    /// Corrections of the periodic part are then recomputed below the largest
    /// operand correction.
    pub fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self, SetError> {
        if self.tracks.is_empty() && other.tracks.is_empty() {
            return Ok(self.dense.combine(&other.dense, op).into());
        }
        // the sequence layer repeats the same operations many times over
        let table = [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &(a, b))| acc | ((op(a, b) as u8) << i));
        let key = (table, self.clone(), other.clone());
        if let Some(hit) = COMBINE_CACHE.with(|c| c.borrow().get(&key).cloned()) {
            return Ok(hit);
        }
        let out = self.combine_tracks(other, op)?;
        COMBINE_CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= COMBINE_CACHE_CAP {
                c.clear();
            }
            c.insert(key, out.clone());
        });
        Ok(out)
    }

    fn combine_tracks(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self, SetError> {
        let mut exps: BTreeSet<u32> =
            self.tracks.iter().chain(other.tracks.iter()).map(|t| t.exp).collect();
        loop {
            let mut grown = exps.clone();
            for &a in &exps {
                for &b in &exps {
                    grown.insert(a.lcm(&b));
                }
            }
            if grown.len() == exps.len() {
                break;
            }
            exps = grown;
        }
        if let Some(&big) = exps.iter().next_back() {
            if big > MAX_EXPONENT {
                return Err(SetError::Unsupported(format!("track exponent {big} exceeds {MAX_EXPONENT}")));
            }
        }
        let mut mt = self.dense.modulus().lcm(&other.dense.modulus());
        for t in self.tracks.iter().chain(other.tracks.iter()) {
            mt = mt.lcm(&t.sel.modulus());
        }
        let dm = mt;
        // Periodic value of one operand at t^e for generic t ≡ c (mod mt),
        // tabulated over the operand's own moduli.
        let generic_table = |s: &ExactSet, e: u32| -> Vec<bool> {
            let dense = power_table(&s.dense, e);
            let parts: Vec<Vec<bool>> =
                s.tracks.iter().filter(|tr| e.is_multiple_of(tr.exp)).map(|tr| power_table(&tr.sel, e / tr.exp)).collect();
            (0..mt as usize)
                .map(|c| parts.iter().fold(dense[c % dense.len()], |v, t| v ^ t[c % t.len()]))
                .collect()
        };
        let mut sels: BTreeMap<u32, ApSet> = BTreeMap::new();
        for &e in &exps {
            let (ga, gb) = (generic_table(self, e), generic_table(other, e));
            let (da, db) = (power_table(&self.dense, e), power_table(&other.dense, e));
            let lower: Vec<Vec<bool>> =
                sels.iter().filter(|(&e2, _)| e % e2 == 0).map(|(&e2, s2)| power_table(s2, e / e2)).collect();
            let mut residues = vec![];
            for c in 0..mt as usize {
                let target = op(ga[c], gb[c]);
                let rep = lower.iter().fold(op(da[c % da.len()], db[c % db.len()]), |v, t| v ^ t[c % t.len()]);
                if target != rep {
                    residues.push(c as u64);
                }
            }
            let sel = ApSet::new(mt, residues, [], [])?;
            if !sel.is_finite() {
                sels.insert(e, sel);
            }
        }
        let tracks: Vec<PowerTrack> =
            sels.into_iter().map(|(exp, sel)| PowerTrack { exp, sel }).collect();
        let probe = ExactSet { dense: ApSet::empty(), tracks: tracks.clone() };
        let periodic = ApSet::from_eventually_periodic(dm, 1, |n| {
            op(self.dense.periodic_contains(n), other.dense.periodic_contains(n))
        });
        // A track point lies on the tracks whose exponents divide its largest
        // exponent in the closure, so the generic rule is exact there too.
        // Only the operands' corrections need checking.
        let mut candidates: BTreeSet<u64> = BTreeSet::new();
        for s in [self, other] {
            candidates.extend(s.dense.includes().iter().copied());
            candidates.extend(s.dense.excludes().iter().copied());
        }
        let mut inc = vec![];
        let mut exc = vec![];
        for n in candidates {
            let want = op(self.contains(n), other.contains(n)) ^ probe.track_parity(n);
            match (want, periodic.periodic_contains(n)) {
                (true, false) => inc.push(n),
                (false, true) => exc.push(n),
                _ => {}
            }
        }
        let dense = ApSet::new(periodic.modulus(), periodic.residues().iter().copied(), inc, exc)?;
        Ok(ExactSet { dense, tracks })
    }
}

impl fmt::Debug for ExactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dense)?;
        for t in &self.tracks {
            write!(f, " ⊕ {{t^{} : t ∈ {}}}", t.exp, t.sel)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(s: &ExactSet, n: u64) -> Vec<u64> {
        (1..=n).filter(|&i| s.contains(i)).collect()
    }

    #[test]
    fn fast_count_matches_brute_force() {
        let a = ExactSet::from(ApSet::new(6, [1, 4], [7, 100, 121], [4, 16, 64]).unwrap());
        let sq = ExactSet::power(2, &ApSet::residue_class(1, 3)).unwrap();
        let qu = ExactSet::power(4, &ApSet::full()).unwrap();
        let cu = ExactSet::power(3, &ApSet::odds()).unwrap();
        let s = a.symmetric_difference(&sq).unwrap().union(&qu).unwrap().symmetric_difference(&cu).unwrap();
        let mut c = 0;
        for n in 1..=200_000u64 {
            c += s.contains(n) as u64;
            if n % 997 == 0 || n < 300 {
                assert_eq!(s.track_delta(n) + s.dense.count(n) as i64, c as i64, "at {n}");
                assert_eq!(s.count(n), c);
            }
        }
    }

    #[test]
    fn squares_basics() {
        let sq = ExactSet::squares();
        assert!(sq.contains(9) && !sq.contains(10));
        assert_eq!(sq.count(100), 10);
        assert_eq!(sq.enumerate(3).unwrap(), 9);
        assert!(!sq.is_finite());
        assert_eq!(sq.density(), crate::rational::qi(0));
    }

    #[test]
    fn squares_and_cubes() {
        let sq = ExactSet::squares();
        let cu = ExactSet::cubes();
        let both = sq.intersect(&cu).unwrap();
        let sixth = ExactSet::power(6, &ApSet::full()).unwrap();
        assert_eq!(both, sixth);
        let u = sq.union(&cu).unwrap();
        for n in 1..5000 {
            assert_eq!(u.contains(n), sq.contains(n) || cu.contains(n), "n={n}");
        }
        assert_eq!(u.count(4096), brute(&u, 4096).len() as u64);
    }

    #[test]
    fn track_against_dense() {
        let sq = ExactSet::squares();
        let odd: ExactSet = ApSet::odds().into();
        let x = sq.difference(&odd).unwrap();
        // even squares = {(2u)^2}
        let even_sq = ExactSet::power(2, &ApSet::evens()).unwrap();
        assert_eq!(x, even_sq);
        let y = odd.union(&sq).unwrap();
        for n in 1..3000 {
            assert_eq!(y.contains(n), n % 2 == 1 || sq.contains(n));
        }
        assert_eq!(sq.complement().complement(), sq);
    }

    #[test]
    fn power_with_corrections() {
        let sel = ApSet::new(3, [1], [3], [4]).unwrap();
        let s = ExactSet::power(2, &sel).unwrap();
        for t in 1..60u64 {
            assert_eq!(s.contains(t * t), sel.contains(t));
        }
        assert_eq!(s.count(3600), (1..=60u64).filter(|&t| sel.contains(t)).count() as u64);
    }

    #[test]
    fn finiteness() {
        let sq = ExactSet::squares();
        let none = sq.intersect(&ApSet::residue_class(2, 3).into()).unwrap();
        assert!(none.is_empty());
        let fin: ExactSet = ApSet::finite([4, 7]).into();
        assert!(sq.intersect(&fin).unwrap().is_finite());
    }
}
