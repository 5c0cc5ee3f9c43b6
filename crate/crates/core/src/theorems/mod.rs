//! Seeded property checks, one per result about ideal convergence, run over
//! random instances of the exact sequence class.

mod checks;
mod gen;

use serde_json::{json, Value};

pub use checks::{catalog, controls, Entry};
pub use gen::{Gen, Profile};

use crate::ideals::IdealDesc;
use crate::natset::{exact_json, ExactSet, NatSet};
use crate::rational::{format_q, parse_q, Q};
use crate::sequences::{DoubleSeq, SymSeq};

pub const DEFAULT_EXACT_TRIALS: u64 = 500;
pub const DEFAULT_ORACLE_TRIALS: u64 = 100;

/// Everything a property needs; serializable so failures can be replayed.
#[derive(Clone, Debug)]
pub struct Instance {
    pub seq: SymSeq,
    pub ideal: IdealDesc,
    pub ideal2: Option<IdealDesc>,
    pub other: Option<SymSeq>,
    pub sets: Vec<ExactSet>,
    pub intervals: Vec<(Q, Q)>,
    pub values: Vec<Q>,
    pub double: Option<DoubleSeq>,
}

#[derive(Debug, thiserror::Error)]
#[error("bad instance: {0}")]
pub struct InstanceError(pub String);

impl Instance {
    pub fn new(seq: SymSeq, ideal: IdealDesc) -> Self {
        Instance {
            seq,
            ideal,
            ideal2: None,
            other: None,
            sets: vec![],
            intervals: vec![],
            values: vec![],
            double: None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sequence": self.seq.to_json(),
            "ideal": self.ideal.name(),
            "ideal2": self.ideal2.as_ref().map(IdealDesc::name),
            "other": self.other.as_ref().map(SymSeq::to_json),
            "sets": self.sets.iter().map(exact_json).collect::<Vec<_>>(),
            "intervals": self.intervals.iter().map(|(a, b)| json!([format_q(a), format_q(b)])).collect::<Vec<_>>(),
            "values": self.values.iter().map(format_q).collect::<Vec<_>>(),
            "double": self.double.as_ref().map(DoubleSeq::to_json),
        })
    }

    pub fn from_json(v: &Value) -> Result<Instance, InstanceError> {
        let err = |e: &dyn std::fmt::Display| InstanceError(e.to_string());
        let ideal_of = |k: &str| -> Result<Option<IdealDesc>, InstanceError> {
            match v.get(k).and_then(Value::as_str) {
                None => Ok(None),
                Some(s) => s.parse().map(Some).map_err(|e| err(&e)),
            }
        };
        let rat = |x: &Value| -> Result<Q, InstanceError> {
            parse_q(x.as_str().ok_or_else(|| InstanceError("rationals are strings".into()))?).map_err(|e| err(&e))
        };
        let arr = |k: &str| v.get(k).and_then(Value::as_array).cloned().unwrap_or_default();
        let seq = SymSeq::from_json(v.get("sequence").ok_or_else(|| InstanceError("missing sequence".into()))?)
            .map_err(|e| err(&e))?;
        let ideal = ideal_of("ideal")?.ok_or_else(|| InstanceError("missing ideal".into()))?;
        let other = match v.get("other") {
            Some(o) if !o.is_null() => Some(SymSeq::from_json(o).map_err(|e| err(&e))?),
            _ => None,
        };
        let double = match v.get("double") {
            Some(o) if !o.is_null() => Some(DoubleSeq::from_json(o).map_err(|e| err(&e))?),
            _ => None,
        };
        let mut sets = vec![];
        for s in arr("sets") {
            match NatSet::from_json(&s).map_err(|e| err(&e))? {
                NatSet::Exact(e) => sets.push(e),
                other => return Err(InstanceError(format!("{} is not exact", other.describe()))),
            }
        }
        let mut intervals = vec![];
        for p in arr("intervals") {
            let p = p.as_array().filter(|p| p.len() == 2).ok_or_else(|| InstanceError("intervals are pairs".into()))?;
            intervals.push((rat(&p[0])?, rat(&p[1])?));
        }
        let values = arr("values").iter().map(rat).collect::<Result<_, _>>()?;
        Ok(Instance { seq, ideal, ideal2: ideal_of("ideal2")?, other, sets, intervals, values, double })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub trial: u64,
    pub instance: Value,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub id: String,
    pub pass: bool,
    pub trials: u64,
    pub seed: u64,
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "pass": self.pass,
            "trials": self.trials,
            "seed": self.seed,
            "counterexample": self.counterexample.as_ref().map(|c| json!({
                "trial": c.trial,
                "instance": c.instance,
                "explanation": c.explanation,
            })),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("unknown check id `{0}`")]
    UnknownCheckId(String),
    #[error("trials must be positive")]
    NoTrials,
}

pub fn find(id: &str) -> Result<&'static Entry, CheckError> {
    catalog().iter().chain(controls()).find(|e| e.id == id).ok_or_else(|| CheckError::UnknownCheckId(id.to_string()))
}

/// Runs `trials` trials of one check. Trials are spread over threads; the
/// reported counterexample is the one with the smallest trial index.
pub fn check(id: &str, trials: Option<u64>, seed: u64) -> Result<Verdict, CheckError> {
    let entry = find(id)?;
    let trials = trials.unwrap_or(entry.default_trials());
    if trials == 0 {
        return Err(CheckError::NoTrials);
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(trials as usize).max(1) as u64;
    let first_failure = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut t = w;
                    while t < trials {
                        let mut g = Gen::for_trial(seed, entry.id, t);
                        let inst = (entry.generate)(&mut g);
                        if let Err(e) = (entry.property)(&inst) {
                            return Some(Counterexample { trial: t, instance: inst.to_json(), explanation: e });
                        }
                        t += workers;
                    }
                    None
                })
            })
            .collect();
        handles.into_iter().filter_map(|h| h.join().expect("trial thread")).min_by_key(|c| c.trial)
    });
    Ok(Verdict { id: entry.id.to_string(), pass: first_failure.is_none(), trials, seed, counterexample: first_failure })
}

/// Re-runs a check's property on a serialized instance.
pub fn recheck(id: &str, instance: &Value) -> Result<Result<(), String>, CheckError> {
    let entry = find(id)?;
    Ok(match Instance::from_json(instance) {
        Ok(inst) => (entry.property)(&inst),
        Err(e) => Err(e.to_string()),
    })
}

/// The whole catalog with default trial counts. Negative controls are not included.
pub fn run_all(seed: u64) -> Vec<Verdict> {
    catalog().iter().map(|e| check(e.id, None, seed).expect("catalog ids are known")).collect()
}
