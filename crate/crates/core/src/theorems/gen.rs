//! Seeded random instances.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::ideals::IdealDesc;
use crate::natset::{ApSet, ExactSet, PairSet};
use crate::rational::{q, qi, Q};
use crate::sequences::{piece_infos, DoubleSeq, GenTerm, SymSeq, TermLimit};

/// Instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Generic,
    Convergent,
    CompactValued,
    DualPair,
    GroupPair,
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "generic" => Profile::Generic,
            "convergent" => Profile::Convergent,
            "compact-valued" => Profile::CompactValued,
            "dual-pair" => Profile::DualPair,
            "group-pair" => Profile::GroupPair,
            _ => return Err(format!("unknown profile `{s}`")),
        })
    }
}

pub struct Gen {
    pub rng: ChaCha8Rng,
}

/// FNV-1a, stable across platforms and releases.
fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for one trial of one check.
    pub fn for_trial(seed: u64, id: &str, trial: u64) -> Self {
        let mix = seed ^ fnv(id).rotate_left(17) ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        Gen::new(mix)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.gen_range(0..n)
    }

    /// Rational with numerator and denominator of height at most 10.
    pub fn rat(&mut self) -> Q {
        q(self.rng.gen_range(-10..=10), self.rng.gen_range(1..=10))
    }

    pub fn rat_in(&mut self, lo: &Q, hi: &Q) -> Q {
        let t = q(self.rng.gen_range(0..=10), 10);
        lo + (hi - lo) * t
    }

    pub fn nonzero_rat(&mut self) -> Q {
        loop {
            let r = self.rat();
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// `0 < |ρ| < 1`.
    pub fn ratio(&mut self) -> Q {
        let d: i64 = self.rng.gen_range(2..=10);
        let n: i64 = self.rng.gen_range(1..d);
        if self.chance(0.3) { q(-n, d) } else { q(n, d) }
    }

    pub fn omega_ideal(&mut self) -> IdealDesc {
        let all = [
            IdealDesc::fin(),
            IdealDesc::z(),
            IdealDesc::z(),
            IdealDesc::logz(),
            IdealDesc::density(qi(1)),
            IdealDesc::density(q(1, 2)),
            IdealDesc::polya(),
            IdealDesc::summable(),
        ];
        all.choose(&mut self.rng).expect("nonempty").clone()
    }

    pub fn p_ideal(&mut self) -> IdealDesc {
        loop {
            let i = self.omega_ideal();
            if i.is_p() {
                return i;
            }
        }
    }

    pub fn g_ideal(&mut self) -> IdealDesc {
        loop {
            let i = self.omega_ideal();
            if i.is_g() {
                return i;
            }
        }
    }

    pub fn small_finite(&mut self) -> ExactSet {
        let k = self.below(4) + 1;
        ApSet::finite((0..k).map(|_| self.below(40) + 1)).into()
    }

    fn selector(&mut self) -> ApSet {
        let m = self.below(3) + 1;
        let r = self.below(m);
        ApSet::residue_class(r, m)
    }

    /// An infinite set of zero density: a union of power tracks.
    pub fn sparse(&mut self) -> ExactSet {
        let e = [2u32, 2, 3, 4][self.below(4) as usize];
        let sel = self.selector();
        let mut s = ExactSet::power(e, &sel).expect("valid");
        if self.chance(0.3) {
            let t = ExactSet::power(e + 1, &self.selector()).expect("valid");
            s = s.union(&t).expect("exact");
        }
        if s.is_finite() {
            ExactSet::squares()
        } else {
            s
        }
    }

    /// A random member of `i`.
    pub fn member_of(&mut self, i: &IdealDesc) -> ExactSet {
        let mut s = if self.chance(0.7) { self.small_finite() } else { ExactSet::empty() };
        if i != &IdealDesc::fin() && self.chance(0.7) {
            s = s.union(&self.sparse()).expect("exact");
        }
        s
    }

    pub fn partition(&mut self) -> Vec<ExactSet> {
        let m = self.below(24) + 1;
        let k = (self.below(5) + 1).min(m) as usize;
        let mut groups: Vec<Vec<u64>> = vec![vec![]; k];
        for r in 0..m {
            let g = if (r as usize) < k { r as usize } else { self.below(k as u64) as usize };
            groups[g].push(r);
        }
        groups.shuffle(&mut self.rng);
        groups.into_iter().map(|g| ApSet::new(m, g, [], []).expect("valid").into()).collect()
    }

    pub fn term(&mut self, support: &ExactSet, unbounded_weight: f64) -> GenTerm {
        if support.is_finite() {
            return GenTerm::constant(self.rat());
        }
        let u: f64 = self.rng.gen();
        if u < unbounded_weight {
            return GenTerm::unbounded(self.nonzero_rat());
        }
        match self.below(10) {
            0..=3 => GenTerm::constant(self.rat()),
            4..=6 => GenTerm::harmonic(self.rat(), self.nonzero_rat(), support),
            _ => GenTerm::geometric(self.rat(), self.nonzero_rat(), self.ratio(), support).expect("|ρ| < 1"),
        }
    }

    /// A term with every value in `[lo, hi]`.
    pub fn bounded_term(&mut self, support: &ExactSet, lo: &Q, hi: &Q) -> GenTerm {
        let a = self.rat_in(lo, hi);
        let b = self.rat_in(lo, hi);
        if support.is_finite() || a == b {
            return GenTerm::constant(a);
        }
        // values q + c/k run from b (k = 1) towards a
        if self.chance(0.5) {
            return GenTerm::harmonic(a.clone(), &b - &a, support);
        }
        let rho = self.ratio().abs();
        GenTerm::geometric(a.clone(), (&b - &a) / &rho, rho, support).expect("|ρ| < 1")
    }

    /// Supports with optional sparse and finite carve-outs.
    pub fn supports(&mut self) -> Vec<ExactSet> {
        let mut parts = self.partition();
        if self.chance(0.5) {
            let t = self.sparse();
            parts = parts.iter().map(|p| p.difference(&t).expect("exact")).collect();
            parts.push(t);
        }
        if self.chance(0.3) {
            let f = self.small_finite();
            parts = parts.iter().map(|p| p.difference(&f).expect("exact")).collect();
            parts.push(f);
        }
        parts.retain(|p| !p.is_empty());
        parts
    }

    pub fn generic_seq(&mut self, unbounded_weight: f64) -> SymSeq {
        let parts = self.supports();
        let terms: Vec<GenTerm> = parts.iter().map(|s| self.term(s, unbounded_weight)).collect();
        SymSeq::from_parts(parts.into_iter().zip(terms)).expect("partition")
    }

    /// Values in `[lo, hi]` on every piece.
    pub fn bounded_seq(&mut self, lo: &Q, hi: &Q) -> SymSeq {
        let parts = self.supports();
        let terms: Vec<GenTerm> = parts.iter().map(|s| self.bounded_term(s, lo, hi)).collect();
        SymSeq::from_parts(parts.into_iter().zip(terms)).expect("partition")
    }

    /// Shifts every `i`-positive piece so that it converges to one value.
    pub fn make_convergent(&mut self, x: &SymSeq, i: &IdealDesc, target: Option<Q>) -> SymSeq {
        let infos = piece_infos(x, i).expect("exact class");
        let l = target.unwrap_or_else(|| {
            infos
                .iter()
                .find(|p| !p.in_ideal && p.bounded_limit().is_some())
                .and_then(|p| p.bounded_limit().cloned())
                .unwrap_or_else(|| self.rat())
        });
        let parts: Vec<(ExactSet, GenTerm)> = infos
            .into_iter()
            .map(|p| {
                let term = match (&p.limit, p.in_ideal) {
                    (_, true) | (None, _) => p.term,
                    (Some(TermLimit::Unbounded), false) => GenTerm::harmonic(l.clone(), self.nonzero_rat(), &p.support),
                    (Some(TermLimit::Finite(m)), false) => p.term.add(&GenTerm::constant(&l - m)),
                };
                (p.support, term)
            })
            .collect();
        SymSeq::from_parts(parts).expect("partition")
    }

    pub fn double_seq(&mut self) -> DoubleSeq {
        let k = self.below(3) + 1;
        let mut pieces = vec![];
        for _ in 0..k {
            let small: ApSet = ApSet::finite((0..self.below(3) + 1).map(|_| self.below(8) + 1));
            let big = {
                let m = self.below(4) + 1;
                ApSet::residue_class(self.below(m), m)
            };
            let rect = match self.below(5) {
                0 | 1 => PairSet::rect(small, big),
                2 | 3 => PairSet::rect(big, small),
                _ => PairSet::rect(big, {
                    let m = self.below(3) + 1;
                    ApSet::residue_class(self.below(m), m)
                }),
            };
            pieces.push((rect, self.rat()));
        }
        DoubleSeq::new(pieces, self.rat())
    }

    pub fn instance(&mut self, profile: Profile) -> Instance {
        match profile {
            Profile::Generic => {
                let ideal = self.omega_ideal();
                Instance::new(self.generic_seq(0.15), ideal)
            }
            Profile::Convergent => {
                let ideal = self.omega_ideal();
                let x = self.generic_seq(0.15);
                Instance::new(self.make_convergent(&x, &ideal, None), ideal)
            }
            Profile::CompactValued => {
                let ideal = self.omega_ideal();
                let x = self.bounded_seq(&qi(0), &qi(1));
                let x = if self.chance(0.5) { self.make_convergent_within(&x, &ideal) } else { x };
                Instance::new(x, ideal)
            }
            Profile::DualPair => {
                let (j, i) = self.dual_pair();
                let mut inst = Instance::new(self.generic_seq(0.1), i);
                inst.ideal2 = Some(j);
                inst
            }
            Profile::GroupPair => {
                let ideal = self.omega_ideal();
                let x = self.generic_seq(0.15);
                let w = self.generic_seq(0.15);
                let w = self.make_convergent(&w, &ideal, Some(Q::zero()));
                let y = x.add(&w).expect("unframed");
                let mut inst = Instance::new(x, ideal);
                inst.other = Some(y);
                inst
            }
        }
    }

    /// Convergent variant keeping values in `[0, 1]`: positive pieces are
    /// replaced by bounded terms sharing one limit.
    fn make_convergent_within(&mut self, x: &SymSeq, i: &IdealDesc) -> SymSeq {
        let l = self.rat_in(&qi(0), &qi(1));
        let infos = piece_infos(x, i).expect("exact class");
        let parts: Vec<(ExactSet, GenTerm)> = infos
            .into_iter()
            .map(|p| {
                let term = if p.in_ideal || p.limit.is_none() {
                    p.term
                } else {
                    let b = self.rat_in(&qi(0), &qi(1));
                    GenTerm::harmonic(l.clone(), &b - &l, &p.support)
                };
                (p.support, term)
            })
            .collect();
        SymSeq::from_parts(parts).expect("partition")
    }

    /// `(J, I)` with `J ⊆ I` and `I` a P-ideal.
    pub fn dual_pair(&mut self) -> (IdealDesc, IdealDesc) {
        let pairs = [
            (IdealDesc::fin(), IdealDesc::z()),
            (IdealDesc::fin(), IdealDesc::logz()),
            (IdealDesc::fin(), IdealDesc::density(qi(1))),
            (IdealDesc::z(), IdealDesc::z()),
            (IdealDesc::z(), IdealDesc::logz()),
            (IdealDesc::summable(), IdealDesc::z()),
            (IdealDesc::polya(), IdealDesc::z()),
            (IdealDesc::density(qi(1)), IdealDesc::z()),
        ];
        pairs.choose(&mut self.rng).expect("nonempty").clone()
    }
}
