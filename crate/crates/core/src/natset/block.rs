use std::fmt;

use serde::{Deserialize, Serialize};

use super::power::integer_root;
use super::{ApSet, SetError};
use crate::rational::{q_u64, Q};
use num_traits::{One, Zero};

/// Block boundaries `b_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Schedule {
    /// `b_k = b0 · r^k`, blocks indexed from 0.
    #[serde(rename = "geom")]
    Geometric { b0: u64, r: u64 },
    /// `b_k = k^p`, blocks indexed from 1.
    #[serde(rename = "poly")]
    Polynomial { p: u32 },
}

impl Schedule {
    pub fn validate(&self) -> Result<(), SetError> {
        match *self {
            Schedule::Geometric { b0, r } if b0 >= 1 && r >= 2 => Ok(()),
            Schedule::Polynomial { p } if (1..=8).contains(&p) => Ok(()),
            _ => Err(SetError::Invalid(format!("bad block schedule {self:?}"))),
        }
    }

    pub fn first_index(&self) -> u64 {
        match self {
            Schedule::Geometric { .. } => 0,
            Schedule::Polynomial { .. } => 1,
        }
    }

    /// Left end of block `k`, `None` on overflow.
    pub fn boundary(&self, k: u64) -> Option<u64> {
        match *self {
            Schedule::Geometric { b0, r } => r.checked_pow(k.try_into().ok()?)?.checked_mul(b0),
            Schedule::Polynomial { p } => k.checked_pow(p),
        }
    }

    /// Index of the block containing `n`, if any.
    pub fn block_of(&self, n: u64) -> Option<u64> {
        match *self {
            Schedule::Geometric { b0, r } => {
                if n < b0 {
                    return None;
                }
                let mut k = 0;
                let mut hi = b0;
                while let Some(next) = hi.checked_mul(r) {
                    if next > n {
                        break;
                    }
                    hi = next;
                    k += 1;
                }
                Some(k)
            }
            Schedule::Polynomial { p } => {
                if n == 0 {
                    return None;
                }
                let mut k = (n as f64).powf(1.0 / p as f64).floor() as u64;
                while k > 1 && k.checked_pow(p).is_none_or(|v| v > n) {
                    k -= 1;
                }
                while (k + 1).checked_pow(p).is_some_and(|v| v <= n) {
                    k += 1;
                }
                Some(k.max(1))
            }
        }
    }
}

/// Union of the blocks `[b_k, b_{k+1})` whose index `k` is chosen by an
/// eventually periodic selector. Index 0 (geometric schedules) is selected
/// by the selector's periodic rule.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSet {
    pub schedule: Schedule,
    pub selector: ApSet,
}

impl BlockSet {
    pub fn new(schedule: Schedule, selector: ApSet) -> Result<Self, SetError> {
        schedule.validate()?;
        Ok(BlockSet { schedule, selector })
    }

    /// `∪_k [2^{2k}, 2^{2k+1})`.
    pub fn even_octaves() -> Self {
        BlockSet::new(Schedule::Geometric { b0: 1, r: 2 }, ApSet::evens()).expect("valid")
    }

    pub fn selected(&self, k: u64) -> bool {
        if k == 0 {
            self.selector.periodic_contains(0)
        } else {
            self.selector.contains(k)
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.schedule.block_of(n).is_some_and(|k| self.selected(k))
    }

    pub fn count(&self, n: u64) -> u64 {
        if let Schedule::Polynomial { p: 1 } = self.schedule {
            return self.selector.count(n);
        }
        let Some(last) = self.schedule.block_of(n) else { return 0 };
        let mut total = 0u64;
        for k in self.schedule.first_index()..last {
            if self.selected(k) {
                let a = self.schedule.boundary(k).expect("below n");
                let b = self.schedule.boundary(k + 1).expect("below n");
                total += b - a;
            }
        }
        if self.selected(last) {
            total += n - self.schedule.boundary(last).expect("below n") + 1;
        }
        total
    }

    /// Infinitely many selected blocks.
    pub fn is_infinite(&self) -> bool {
        !self.selector.is_finite()
    }

    /// Exact `(lower, upper)` asymptotic density.
    ///
    /// For a geometric schedule the extremes of `|S ∩ [1, n]| / n` occur at
    /// block ends. Along block ends `b_K` with `K ≡ c (mod M)` the ratio tends to
    /// `(r − 1) Σ_{j=1..M} sel(c − j) r^{−j} / (1 − r^{−M})`. Polynomial blocks
    /// have vanishing relative length, so both densities equal the selector's.
    pub fn densities(&self) -> (Q, Q) {
        if !self.is_infinite() {
            return (Q::zero(), Q::zero());
        }
        match self.schedule {
            Schedule::Polynomial { .. } => {
                let d = self.selector.density();
                (d.clone(), d)
            }
            Schedule::Geometric { r, .. } => {
                let m = self.selector.modulus();
                let rq = q_u64(r);
                let inv_r = Q::one() / &rq;
                let geo_tail = Q::one() - pow_q(&inv_r, m);
                let mut lo: Option<Q> = None;
                let mut hi: Option<Q> = None;
                for c in 0..m {
                    let mut acc = Q::zero();
                    for j in 1..=m {
                        let idx = (c + m * 2 - j) % m;
                        if self.selector.periodic_contains(idx) {
                            acc += pow_q(&inv_r, j);
                        }
                    }
                    let f = (&rq - Q::one()) * acc / &geo_tail;
                    lo = Some(match lo {
                        Some(l) if l <= f => l,
                        _ => f.clone(),
                    });
                    hi = Some(match hi {
                        Some(h) if h >= f => h,
                        _ => f,
                    });
                }
                (lo.unwrap(), hi.unwrap())
            }
        }
    }

    /// Exact upper Pólya density. Windows `[ns, n]` with `s → 1` fit inside a
    /// single geometric block, so any infinite selection gives 1; polynomial
    /// windows span many blocks and average out to the selector density.
    pub fn polya_upper(&self) -> Q {
        if !self.is_infinite() {
            return Q::zero();
        }
        match self.schedule {
            Schedule::Geometric { .. } => Q::one(),
            Schedule::Polynomial { .. } => self.selector.density(),
        }
    }

    fn combine(&self, other: &BlockSet, op: impl Fn(&ApSet, &ApSet) -> ApSet) -> Option<BlockSet> {
        (self.schedule == other.schedule)
            .then(|| BlockSet { schedule: self.schedule, selector: op(&self.selector, &other.selector) })
    }

    pub fn union(&self, other: &BlockSet) -> Option<BlockSet> {
        self.combine(other, ApSet::union)
    }

    pub fn intersect(&self, other: &BlockSet) -> Option<BlockSet> {
        self.combine(other, ApSet::intersect)
    }

    pub fn difference(&self, other: &BlockSet) -> Option<BlockSet> {
        self.combine(other, ApSet::difference)
    }

    /// Only when the blocks cover ω, i.e. they start at 1.
    pub fn complement(&self) -> Option<BlockSet> {
        let covers = match self.schedule {
            Schedule::Geometric { b0, .. } => b0 == 1,
            Schedule::Polynomial { .. } => true,
        };
        if !covers {
            return None;
        }
        let sel = self.selector.complement();
        Some(BlockSet { schedule: self.schedule, selector: sel })
    }
}

fn pow_q(base: &Q, e: u64) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// Integer `p`-th root rounded down.
pub fn floor_root(n: u64, p: u32) -> u64 {
    if let Some(t) = integer_root(n, p) {
        return t;
    }
    let mut k = (n as f64).powf(1.0 / p as f64).floor() as u64;
    while k > 0 && k.checked_pow(p).is_none_or(|v| v > n) {
        k -= 1;
    }
    while (k + 1).checked_pow(p).is_some_and(|v| v <= n) {
        k += 1;
    }
    k
}

impl fmt::Debug for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "blocks({:?}, selector {})", self.schedule, self.selector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn geometric_membership() {
        let g = BlockSet::even_octaves();
        assert!(g.contains(5));
        assert!(g.contains(1));
        assert!(!g.contains(2) && !g.contains(3));
        assert!(g.contains(16) && !g.contains(32));
    }

    #[test]
    fn count_matches_scan() {
        let g = BlockSet::even_octaves();
        let poly = BlockSet::new(Schedule::Polynomial { p: 2 }, ApSet::residue_class(1, 3)).unwrap();
        for s in [&g, &poly] {
            let mut acc = 0;
            for n in 1..=5000 {
                acc += s.contains(n) as u64;
                assert_eq!(s.count(n), acc, "n={n}");
            }
        }
    }

    #[test]
    fn octave_densities() {
        let (lo, hi) = BlockSet::even_octaves().densities();
        assert_eq!(lo, q(1, 3));
        assert_eq!(hi, q(2, 3));
        assert_eq!(BlockSet::even_octaves().polya_upper(), q(1, 1));
    }

    #[test]
    fn block_complement() {
        let g = BlockSet::even_octaves();
        let c = g.complement().unwrap();
        for n in 1..2000 {
            assert_eq!(c.contains(n), !g.contains(n));
        }
    }

    #[test]
    fn roots() {
        assert_eq!(floor_root(26, 2), 5);
        assert_eq!(floor_root(27, 3), 3);
        assert_eq!(floor_root(1, 5), 1);
    }
}
