use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ApSet;
use crate::rational::Q;

/// Cantor diagonal bijection ω → ω×ω, 1-based: `1 ↦ (1,1)`, `2 ↦ (1,2)`,
/// `3 ↦ (2,1)`, `4 ↦ (1,3)`, …
pub fn pairing(n: u64) -> (u64, u64) {
    assert!(n >= 1, "pairing is defined on ω = {{1, 2, ...}}");
    // diagonal s holds the cells with i + j = s + 1
    let mut s = (((8.0 * n as f64).sqrt() - 1.0) / 2.0).floor() as u64;
    while s * (s + 1) / 2 >= n {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 < n {
        s += 1;
    }
    let s = s + 1;
    let i = n - (s - 1) * s / 2;
    (i, s + 1 - i)
}

pub fn unpairing(i: u64, j: u64) -> u64 {
    assert!(i >= 1 && j >= 1, "pairing is defined on ω × ω");
    let s = i + j - 1;
    (s - 1) * s / 2 + i
}

/// A finite union of rectangles `rows × cols` with finitely many corrected cells.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairSet {
    pub rects: Vec<(ApSet, ApSet)>,
    #[serde(default)]
    pub inc: BTreeSet<(u64, u64)>,
    #[serde(default)]
    pub exc: BTreeSet<(u64, u64)>,
}

impl PairSet {
    pub fn new(rects: Vec<(ApSet, ApSet)>) -> Self {
        let rects = rects.into_iter().filter(|(r, c)| !r.is_empty() && !c.is_empty()).collect();
        PairSet { rects, inc: BTreeSet::new(), exc: BTreeSet::new() }
    }

    pub fn rect(rows: ApSet, cols: ApSet) -> Self {
        Self::new(vec![(rows, cols)])
    }

    pub fn empty() -> Self {
        Self::new(vec![])
    }

    pub fn full() -> Self {
        Self::rect(ApSet::full(), ApSet::full())
    }

    pub fn with_corrections(
        mut self,
        inc: impl IntoIterator<Item = (u64, u64)>,
        exc: impl IntoIterator<Item = (u64, u64)>,
    ) -> Self {
        for p in inc {
            self.exc.remove(&p);
            if !self.in_rects(p) {
                self.inc.insert(p);
            }
        }
        for p in exc {
            self.inc.remove(&p);
            if self.in_rects(p) {
                self.exc.insert(p);
            }
        }
        self
    }

    fn in_rects(&self, (i, j): (u64, u64)) -> bool {
        self.rects.iter().any(|(r, c)| r.contains(i) && c.contains(j))
    }

    pub fn contains(&self, p: (u64, u64)) -> bool {
        if p.0 == 0 || p.1 == 0 {
            return false;
        }
        if self.in_rects(p) {
            !self.exc.contains(&p)
        } else {
            self.inc.contains(&p)
        }
    }

    /// Union of the column sets of the rectangles whose rows pass `row`.
    fn columns_where(&self, row: impl Fn(&ApSet) -> bool) -> ApSet {
        self.rects.iter().filter(|(r, _)| row(r)).fold(ApSet::empty(), |acc, (_, c)| acc.union(c))
    }

    fn row_period(&self) -> u64 {
        self.rects.iter().fold(1u64, |l, (r, _)| l.lcm(&r.modulus()))
    }

    /// `|A ∩ [1,n] × [1,m]|`. Rows past the last correction repeat with the
    /// lcm of the row moduli.
    pub fn count(&self, n: u64, m: u64) -> u64 {
        let tail = self.rects.iter().map(|(r, _)| r.max_correction()).max().unwrap_or(0);
        let mut total: i128 = 0;
        for i in 1..=n.min(tail) {
            total += self.columns_where(|r| r.contains(i)).count(m) as i128;
        }
        if n > tail {
            let l = self.row_period();
            let mut cache: HashMap<Vec<bool>, u64> = HashMap::new();
            for rho in 0..l.min(n - tail) {
                let first = tail + 1 + rho;
                let rows = (n - first) / l + 1;
                let key: Vec<bool> = self.rects.iter().map(|(r, _)| r.periodic_contains(first)).collect();
                let per_row = *cache.entry(key).or_insert_with(|| self.columns_where(|r| r.periodic_contains(first)).count(m));
                total += rows as i128 * per_row as i128;
            }
        }
        total += self.inc.iter().filter(|&&(i, j)| i <= n && j <= m).count() as i128;
        total -= self.exc.iter().filter(|&&(i, j)| i <= n && j <= m).count() as i128;
        total as u64
    }

    /// Pringsheim limit of `μ_{n,m}(A)`: the mean over row residues of the
    /// density of the columns covered there.
    pub fn product_density(&self) -> Q {
        let l = self.row_period();
        let mut cache: HashMap<Vec<bool>, Q> = HashMap::new();
        let mut total = Q::zero();
        for rho in 0..l {
            let key: Vec<bool> = self.rects.iter().map(|(r, _)| r.periodic_contains(rho)).collect();
            total += cache.entry(key).or_insert_with(|| self.columns_where(|r| r.periodic_contains(rho)).density()).clone();
        }
        total / Q::from_integer(l.into())
    }

    /// `limsup_n sup{k : (n,k) ∈ A} < ∞`: no rectangle has both infinitely
    /// many rows and infinitely many columns.
    pub fn rows_eventually_bounded(&self) -> bool {
        self.rects.iter().all(|(r, c)| r.is_finite() || c.is_finite())
    }

    pub fn is_finite(&self) -> bool {
        self.rects.iter().all(|(r, c)| r.is_finite() && c.is_finite())
    }

    fn refix(rects: Vec<(ApSet, ApSet)>, a: &PairSet, b: &PairSet, op: impl Fn(bool, bool) -> bool) -> PairSet {
        let base = PairSet::new(rects);
        let pts: BTreeSet<(u64, u64)> = a
            .inc
            .iter()
            .chain(a.exc.iter())
            .chain(b.inc.iter())
            .chain(b.exc.iter())
            .copied()
            .collect();
        let mut inc = vec![];
        let mut exc = vec![];
        for p in pts {
            let want = op(a.contains(p), b.contains(p));
            if want && !base.contains(p) {
                inc.push(p);
            } else if !want && base.contains(p) {
                exc.push(p);
            }
        }
        base.with_corrections(inc, exc)
    }

    fn rects_only(&self) -> PairSet {
        PairSet::new(self.rects.clone())
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        let rects = self.rects.iter().chain(other.rects.iter()).cloned().collect();
        Self::refix(rects, self, other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &PairSet) -> PairSet {
        let mut rects = vec![];
        for (r1, c1) in &self.rects {
            for (r2, c2) in &other.rects {
                rects.push((r1.intersect(r2), c1.intersect(c2)));
            }
        }
        Self::refix(rects, self, other, |a, b| a && b)
    }

    /// `(∪ R_i × C_i)^c = ∩ (R_i^c × ω ∪ ω × C_i^c)`.
    pub fn complement(&self) -> PairSet {
        let mut acc = PairSet::full();
        for (r, c) in &self.rects {
            let piece = PairSet::new(vec![(r.complement(), ApSet::full()), (ApSet::full(), c.complement())]);
            acc = acc.intersect(&piece);
            acc = acc.simplify();
        }
        let inc = self.exc.iter().copied();
        let exc = self.inc.iter().copied();
        let mut out = acc.rects_only().with_corrections(inc, exc);
        out.rects.dedup();
        out
    }

    pub fn difference(&self, other: &PairSet) -> PairSet {
        self.intersect(&other.complement())
    }

    /// Drops rectangles contained in another one.
    fn simplify(mut self) -> PairSet {
        self.rects.sort();
        self.rects.dedup();
        let rects = self.rects.clone();
        self.rects = rects
            .iter()
            .enumerate()
            .filter(|(i, (r, c))| {
                !rects.iter().enumerate().any(|(j, (r2, c2))| {
                    j != *i && r.is_subset(r2) && c.is_subset(c2) && !(r == r2 && c == c2 && j > *i)
                })
            })
            .map(|(_, rc)| rc.clone())
            .collect();
        self
    }
}

impl fmt::Debug for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rs: Vec<String> = self.rects.iter().map(|(r, c)| format!("{r}×{c}")).collect();
        write!(f, "{}", if rs.is_empty() { "∅".to_string() } else { rs.join(" ∪ ") })?;
        if !self.inc.is_empty() {
            write!(f, " ∪ {:?}", self.inc)?;
        }
        if !self.exc.is_empty() {
            write!(f, " \\ {:?}", self.exc)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn pairing_round_trip() {
        assert_eq!(unpairing(1, 1), 1);
        assert_eq!(pairing(unpairing(3, 5)), (3, 5));
        for n in 1..5000 {
            let (i, j) = pairing(n);
            assert_eq!(unpairing(i, j), n);
        }
        let cells: BTreeSet<u64> =
            (1..4u64).flat_map(|i| (1..4u64).filter(move |j| i + j <= 4).map(move |j| unpairing(i, j))).collect();
        assert_eq!(cells.len(), 6);
    }

    #[test]
    fn counting_and_density() {
        let a = PairSet::rect(ApSet::evens(), ApSet::full());
        assert_eq!(a.count(10, 10), 50);
        let b = PairSet::rect(ApSet::finite(1..=5), ApSet::full());
        assert_eq!(q(b.count(10, 4) as i64, 40), q(1, 2));
        let ee = PairSet::rect(ApSet::evens(), ApSet::evens());
        assert_eq!(ee.product_density(), q(1, 4));
        let u = a.union(&PairSet::rect(ApSet::full(), ApSet::evens()));
        assert_eq!(u.product_density(), q(3, 4));
    }

    #[test]
    fn algebra_matches_membership() {
        let a = PairSet::rect(ApSet::evens(), ApSet::residue_class(1, 3)).with_corrections([(1, 1)], [(2, 1)]);
        let b = PairSet::rect(ApSet::finite([1, 2, 3]), ApSet::full());
        let c = a.complement();
        let u = a.union(&b);
        let i = a.intersect(&b);
        let d = a.difference(&b);
        for x in 1..20 {
            for y in 1..20 {
                let (pa, pb) = (a.contains((x, y)), b.contains((x, y)));
                assert_eq!(c.contains((x, y)), !pa);
                assert_eq!(u.contains((x, y)), pa || pb);
                assert_eq!(i.contains((x, y)), pa && pb);
                assert_eq!(d.contains((x, y)), pa && !pb);
            }
        }
    }

    #[test]
    fn bounded_rows() {
        assert!(PairSet::rect(ApSet::full(), ApSet::finite(1..=5)).rows_eventually_bounded());
        assert!(!PairSet::full().rows_eventually_bounded());
        assert!(PairSet::rect(ApSet::finite([1, 2, 3]), ApSet::full()).rows_eventually_bounded());
    }
}
