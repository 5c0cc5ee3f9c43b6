//! Density functionals: asymptotic, weighted (α-) and Pólya densities.
//!
//! Exact sets and block sets get closed forms. Everything else goes through
//! [`prefix_oracle`], which samples `|S ∩ [1,n]|` at a checkpoint schedule and
//! always reports an interval flagged as approximate.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::natset::{BlockSet, NatSet, PairSet, Schedule};
use crate::rational::{format_q, q_u64, to_f64, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DensityError {
    #[error("weight exponent {0} is below -1")]
    InvalidAlpha(String),
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Checkpoints {
    #[default]
    Geometric,
    Linear,
}

impl std::str::FromStr for Checkpoints {
    type Err = DensityError;
    fn from_str(s: &str) -> Result<Self, DensityError> {
        match s {
            "geometric" => Ok(Checkpoints::Geometric),
            "linear" => Ok(Checkpoints::Linear),
            _ => Err(DensityError::InvalidConfig(format!("unknown checkpoint schedule `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Largest `n` sampled.
    pub budget: u64,
    pub checkpoints: Checkpoints,
    /// Fraction of checkpoints, counted from the end, that enter the estimate.
    pub tail: f64,
    /// Tolerated `n · |ratio(n) − limit|` per checkpoint. Covers periodic sets
    /// whose modulus and corrections stay below it.
    pub allowance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { budget: 1_000_000, checkpoints: Checkpoints::Geometric, tail: 0.5, allowance: 64.0 }
    }
}

impl OracleConfig {
    pub fn with_budget(budget: u64) -> Self {
        OracleConfig { budget, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), DensityError> {
        if self.budget < 16 {
            return Err(DensityError::InvalidConfig("budget must be at least 16".into()));
        }
        if !(self.tail > 0.0 && self.tail <= 1.0) {
            return Err(DensityError::InvalidConfig("tail fraction must lie in (0, 1]".into()));
        }
        if self.allowance.is_nan() || self.allowance < 0.0 {
            return Err(DensityError::InvalidConfig("allowance must be non-negative".into()));
        }
        Ok(())
    }

    /// Increasing checkpoints ending at the budget.
    pub fn schedule(&self) -> Vec<u64> {
        let mut out: Vec<u64> = match self.checkpoints {
            Checkpoints::Geometric => {
                // eight checkpoints per doubling over [budget / 16, budget]
                let mut v = vec![];
                let mut x = (self.budget / 16) as f64;
                while (x as u64) < self.budget {
                    v.push(x.round() as u64);
                    x *= 2f64.powf(0.125);
                }
                // block ends of dyadic schedules
                for k in 1..64 {
                    let p = 1u64 << k;
                    if p > self.budget {
                        break;
                    }
                    if p >= self.budget / 16 {
                        v.extend([p - 1, p]);
                    }
                }
                v.sort_unstable();
                v
            }
            Checkpoints::Linear => (1..64).map(|i| self.budget * i / 64).collect(),
        };
        out.push(self.budget);
        out.dedup();
        out
    }

    fn tail_start(&self, len: usize) -> usize {
        let keep = ((len as f64) * self.tail).ceil() as usize;
        len - keep.clamp(1, len)
    }

    pub fn describe(&self) -> String {
        let kind = match self.checkpoints {
            Checkpoints::Geometric => "geometric",
            Checkpoints::Linear => "linear",
        };
        format!("{kind} checkpoints up to {}, tail {}, allowance {}", self.budget, self.tail, self.allowance)
    }
}

/// A density value, exact or an interval from the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub lo: Q,
    pub hi: Q,
    pub exact: bool,
    /// Prefix schedule behind an approximate value.
    pub window: Option<String>,
}

impl DensityReport {
    pub fn exact(v: Q) -> Self {
        DensityReport { lo: v.clone(), hi: v, exact: true, window: None }
    }

    fn approx(lo: f64, hi: f64, window: String) -> Self {
        let lo = lo.clamp(0.0, 1.0);
        let hi = hi.clamp(0.0, 1.0).max(lo);
        DensityReport { lo: round_grid(lo, false), hi: round_grid(hi, true), exact: false, window: Some(window) }
    }

    pub fn value(&self) -> Option<&Q> {
        self.exact.then_some(&self.lo)
    }

    pub fn contains(&self, v: &Q) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn overlaps(&self, other: &DensityReport) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `self ≤ other`: exact values compared exactly, intervals by overlap.
    pub fn le(&self, other: &DensityReport) -> bool {
        if self.exact && other.exact {
            self.lo <= other.lo
        } else {
            self.lo <= other.hi
        }
    }

    /// Certainly zero, certainly positive, or unknown.
    pub fn is_zero(&self) -> Option<bool> {
        if self.exact {
            Some(self.lo.is_zero())
        } else if self.lo.is_positive() {
            Some(false)
        } else {
            None
        }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn to_json(&self) -> Value {
        if self.exact {
            json!({"value": format_q(&self.lo), "exact": true})
        } else {
            json!({
                "lo": format_q(&self.lo),
                "hi": format_q(&self.hi),
                "exact": false,
                "window": self.window,
            })
        }
    }
}

impl fmt::Display for DensityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{} (exact)", format_q(&self.lo))
        } else {
            write!(f, "[{}, {}] (approx: {})", to_f64(&self.lo), to_f64(&self.hi), self.window.as_deref().unwrap_or(""))
        }
    }
}

const GRID: i64 = 1_000_000_000;

/// Outward rounding to a 10⁻⁹ grid keeps approximate endpoints readable.
fn round_grid(x: f64, up: bool) -> Q {
    let scaled = x * GRID as f64;
    let k = if up { scaled.ceil() } else { scaled.floor() };
    Q::new(BigInt::from(k as i64), BigInt::from(GRID))
}

/// Summary of the running ratio over the tail: the intersection of the
/// per-checkpoint allowance intervals when they agree. Otherwise the raw
/// extremes, with the one-sided estimates widened by their own allowance.
struct TailStats {
    meet: Option<(f64, f64)>,
    min: (f64, f64),
    max: (f64, f64),
}

fn tail_stats(samples: &[(f64, f64)]) -> TailStats {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut min = (f64::INFINITY, 0.0);
    let mut max = (f64::NEG_INFINITY, 0.0);
    for &(r, slack) in samples {
        lo = lo.max(r - slack);
        hi = hi.min(r + slack);
        if r < min.0 {
            min = (r, slack);
        }
        if r > max.0 {
            max = (r, slack);
        }
    }
    TailStats { meet: (lo <= hi).then_some((lo, hi)), min, max }
}

#[derive(Clone, Copy)]
enum Which {
    Upper,
    Lower,
    Both,
}

fn summarize(samples: &[(f64, f64)], which: Which, window: String) -> DensityReport {
    let st = tail_stats(samples);
    if let Some((lo, hi)) = st.meet {
        return DensityReport::approx(lo, hi, window);
    }
    match which {
        Which::Upper => DensityReport::approx(st.max.0 - st.max.1, st.max.0 + st.max.1, window),
        Which::Lower => DensityReport::approx(st.min.0 - st.min.1, st.min.0 + st.min.1, window),
        Which::Both => DensityReport::approx(st.min.0, st.max.0, window),
    }
}

fn ratio_samples(s: &NatSet, cfg: &OracleConfig) -> Vec<(f64, f64)> {
    let cps = cfg.schedule();
    let counts = s.counts_at(&cps);
    let start = cfg.tail_start(cps.len());
    cps[start..]
        .iter()
        .zip(&counts[start..])
        .map(|(&n, &c)| (c as f64 / n as f64, cfg.allowance / n as f64))
        .collect()
}

/// Tail interval of `|S ∩ [1,n]| / n` over the checkpoint schedule.
pub fn prefix_oracle(s: &NatSet, cfg: &OracleConfig) -> DensityReport {
    summarize(&ratio_samples(s, cfg), Which::Both, cfg.describe())
}

pub fn upper_density(s: &NatSet, cfg: &OracleConfig) -> DensityReport {
    match s {
        NatSet::Exact(e) => DensityReport::exact(e.density()),
        NatSet::Block(b) => DensityReport::exact(b.densities().1),
        _ => summarize(&ratio_samples(s, cfg), Which::Upper, cfg.describe()),
    }
}

pub fn lower_density(s: &NatSet, cfg: &OracleConfig) -> DensityReport {
    match s {
        NatSet::Exact(e) => DensityReport::exact(e.density()),
        NatSet::Block(b) => DensityReport::exact(b.densities().0),
        _ => summarize(&ratio_samples(s, cfg), Which::Lower, cfg.describe()),
    }
}

/// Limsup of `Σ_{k ∈ S, k ≤ n} k^α / Σ_{k ≤ n} k^α` for `α ≥ −1`.
pub fn weighted_upper_density(s: &NatSet, alpha: &Q, cfg: &OracleConfig) -> Result<DensityReport, DensityError> {
    if alpha < &-Q::one() {
        return Err(DensityError::InvalidAlpha(format_q(alpha)));
    }
    if alpha.is_zero() {
        return Ok(upper_density(s, cfg));
    }
    if let NatSet::Exact(e) = s {
        return Ok(DensityReport::exact(e.density()));
    }
    if let NatSet::Block(BlockSet { schedule: Schedule::Geometric { .. }, selector }) = s {
        // every block has log-mass ln r in the limit
        if *alpha == -Q::one() {
            return Ok(DensityReport::exact(selector.density()));
        }
    }
    if let NatSet::Block(BlockSet { schedule: Schedule::Polynomial { .. }, selector }) = s {
        // blocks of vanishing relative length carry their index density under every weight
        if !BlockSet::new(Schedule::Polynomial { p: 1 }, selector.clone()).is_ok_and(|b| b.is_infinite()) {
            return Ok(DensityReport::exact(Q::zero()));
        }
    }
    let a = to_f64(alpha);
    let cps = cfg.schedule();
    let start = cfg.tail_start(cps.len());
    let mut samples = Vec::new();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    let mut k = 0u64;
    for (i, &n) in cps.iter().enumerate() {
        while k < n {
            k += 1;
            let w = (k as f64).powf(a);
            den += w;
            if s.contains(k) {
                num += w;
            }
        }
        if i >= start {
            let slack = cfg.allowance * (n as f64).powf(a).max(1.0) / den;
            samples.push((num / den, slack));
        }
    }
    Ok(summarize(&samples, Which::Upper, format!("{}, weight k^{}", cfg.describe(), format_q(alpha))))
}

/// Dispatch on the CLI names `d*`, `d_*`, `log`, `alpha:<q>` and `polya`.
pub fn by_name(s: &NatSet, functional: &str, cfg: &OracleConfig) -> Result<DensityReport, DensityError> {
    match functional {
        "d*" | "upper" => Ok(upper_density(s, cfg)),
        "d_*" | "lower" => Ok(lower_density(s, cfg)),
        "log" => weighted_upper_density(s, &-Q::one(), cfg),
        "polya" => Ok(polya_upper(s, cfg)),
        f => match f.strip_prefix("alpha:") {
            Some(a) => {
                let a = crate::rational::parse_q(a).map_err(|e| DensityError::InvalidConfig(e.to_string()))?;
                weighted_upper_density(s, &a, cfg)
            }
            None => Err(DensityError::InvalidConfig(format!("unknown functional `{f}`"))),
        },
    }
}

/// The Pólya window schedule `s_j = 1 − 2^{−j}`.
pub const POLYA_STEPS: u32 = 12;

/// Upper Pólya density `lim_{s→1⁻} limsup_n |S ∩ [ns, n]| / ((1 − s) n)`.
pub fn polya_upper(s: &NatSet, cfg: &OracleConfig) -> DensityReport {
    match s {
        NatSet::Exact(e) => return DensityReport::exact(e.density()),
        NatSet::Block(b) => return DensityReport::exact(b.polya_upper()),
        _ => {}
    }
    let cps = cfg.schedule();
    let start = cfg.tail_start(cps.len());
    let tail = &cps[start..];
    // counts at n and just below each window start
    let mut points: Vec<u64> = tail.to_vec();
    for j in 1..=POLYA_STEPS {
        let sj = 1.0 - 2f64.powi(-(j as i32));
        points.extend(tail.iter().map(|&n| ((n as f64 * sj).ceil() as u64).saturating_sub(1)));
    }
    points.sort_unstable();
    points.dedup();
    let counts = s.counts_at(&points);
    let count_at = |n: u64| counts[points.binary_search(&n).expect("sampled")];
    let mut best: Option<DensityReport> = None;
    let mut floor = 0.0f64;
    for j in 1..=POLYA_STEPS {
        let sj = 1.0 - 2f64.powi(-(j as i32));
        let samples: Vec<(f64, f64)> = tail
            .iter()
            .map(|&n| {
                let a = ((n as f64 * sj).ceil() as u64).saturating_sub(1);
                let width = (1.0 - sj) * n as f64;
                ((count_at(n) - count_at(a)) as f64 / width, cfg.allowance / width)
            })
            .collect();
        let smallest_window = (1.0 - sj) * tail[0] as f64;
        if j > 1 && cfg.allowance / smallest_window > 0.05 {
            break;
        }
        let rep = summarize(&samples, Which::Upper, String::new());
        // the inner limsup grows as the windows shrink
        floor = floor.max(to_f64(&rep.lo));
        best = Some(rep);
    }
    let best = best.expect("at least one window");
    DensityReport::approx(floor.min(to_f64(&best.hi)), to_f64(&best.hi), format!("{}, Pólya s = 1 - 2^-j", cfg.describe()))
}

/// `|A ∩ [1,n] × [1,m]| / (n m)`.
pub fn mu(a: &PairSet, n: u64, m: u64) -> Q {
    assert!(n >= 1 && m >= 1, "mu needs n, m >= 1");
    Q::new(BigInt::from(a.count(n, m)), BigInt::from(n) * BigInt::from(m))
}

/// `1 − x`, used for complements of exact values.
pub fn one_minus(x: &Q) -> Q {
    Q::one() - x
}

pub fn density_of_count(c: u64, n: u64) -> Q {
    q_u64(c) / q_u64(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::{ApSet, ExactSet, GeneralSet};
    use crate::rational::q;

    fn oracle_only(s: NatSet) -> NatSet {
        NatSet::General(GeneralSet::new("wrapped", move |n| s.contains(n)))
    }

    #[test]
    fn exact_values() {
        let cfg = OracleConfig::default();
        let evens: NatSet = ApSet::evens().into();
        assert_eq!(upper_density(&evens, &cfg), DensityReport::exact(q(1, 2)));
        assert_eq!(upper_density(&ApSet::finite([1, 5]).into(), &cfg).value(), Some(&Q::zero()));
        let g: NatSet = BlockSet::even_octaves().into();
        assert_eq!(upper_density(&g, &cfg).value(), Some(&q(2, 3)));
        assert_eq!(lower_density(&g, &cfg).value(), Some(&q(1, 3)));
        assert_eq!(polya_upper(&g, &cfg).value(), Some(&q(1, 1)));
        assert_eq!(weighted_upper_density(&evens, &q(-1, 1), &cfg).unwrap().value(), Some(&q(1, 2)));
        assert!(matches!(weighted_upper_density(&evens, &q(-2, 1), &cfg), Err(DensityError::InvalidAlpha(_))));
        let sq: NatSet = ExactSet::squares().into();
        assert_eq!(weighted_upper_density(&sq, &q(0, 1), &cfg).unwrap().value(), Some(&Q::zero()));
    }

    #[test]
    fn oracle_examples() {
        let cfg = OracleConfig { budget: 1 << 20, ..Default::default() };
        let evens = oracle_only(ApSet::evens().into());
        let r = prefix_oracle(&evens, &cfg);
        assert!(!r.exact && r.contains(&q(1, 2)) && r.width() < q(1, 1000), "{r}");
        let full = prefix_oracle(&oracle_only(ApSet::full().into()), &cfg);
        assert!(full.contains(&q(1, 1)));
        let sq = prefix_oracle(&oracle_only(ExactSet::squares().into()), &cfg);
        assert!(sq.hi <= q(2, 1000), "{sq}");
    }

    #[test]
    fn oracle_agrees_with_blocks() {
        let cfg = OracleConfig { budget: 10_000_000, ..Default::default() };
        let g = oracle_only(BlockSet::even_octaves().into());
        let hi = upper_density(&g, &cfg);
        let lo = lower_density(&g, &cfg);
        assert!(hi.contains(&q(2, 3)), "{hi}");
        assert!(lo.contains(&q(1, 3)), "{lo}");
        let p = polya_upper(&g, &cfg);
        assert!(p.contains(&q(1, 1)), "{p}");
        let ap = polya_upper(&oracle_only(ApSet::residue_class(2, 5).into()), &cfg);
        assert!(ap.contains(&q(1, 5)), "{ap}");
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&PairSet::rect(ApSet::evens(), ApSet::full()), 10, 10), q(1, 2));
        assert_eq!(mu(&PairSet::empty(), 3, 7), Q::zero());
        assert_eq!(mu(&PairSet::rect(ApSet::finite(1..=5), ApSet::full()), 10, 4), q(1, 2));
    }
}
