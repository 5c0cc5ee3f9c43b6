//! Double sequences with constant values on unions of rectangles.

use num_traits::Zero;
use serde_json::{json, Value};

use super::SeqError;
use crate::ideals::{member_pairs, IdealDesc};
use crate::natset::PairSet;
use crate::rational::{format_q, parse_q, Q};

/// `x_{n,m}` is the value of the first piece containing `(n,m)`, else `default`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleSeq {
    pieces: Vec<(PairSet, Q)>,
    default: Q,
}

impl DoubleSeq {
    pub fn new(pieces: Vec<(PairSet, Q)>, default: Q) -> Self {
        DoubleSeq { pieces, default }
    }

    pub fn constant(c: Q) -> Self {
        DoubleSeq { pieces: vec![], default: c }
    }

    pub fn default_value(&self) -> &Q {
        &self.default
    }

    /// Values of the listed pieces, in order.
    pub fn piece_values(&self) -> impl Iterator<Item = &Q> {
        self.pieces.iter().map(|(_, v)| v)
    }

    pub fn eval(&self, n: u64, m: u64) -> Result<Q, SeqError> {
        if n == 0 || m == 0 {
            return Err(SeqError::Invalid("double sequences are indexed from (1,1)".into()));
        }
        Ok(self.pieces.iter().find(|(s, _)| s.contains((n, m))).map_or(&self.default, |(_, v)| v).clone())
    }

    /// The disjoint sets on which each value is taken.
    pub fn level_pieces(&self) -> Vec<(PairSet, Q)> {
        let mut seen = PairSet::empty();
        let mut out = vec![];
        for (s, v) in &self.pieces {
            out.push((s.difference(&seen), v.clone()));
            seen = seen.union(s);
        }
        out.push((seen.complement(), self.default.clone()));
        out
    }

    /// `{(n,m) : x_{n,m} ≠ l}`, exact.
    pub fn off_level(&self, l: &Q) -> PairSet {
        self.level_pieces().into_iter().filter(|(_, v)| v != l).fold(PairSet::empty(), |a, (s, _)| a.union(&s))
    }

    /// Convergence to `l` along the double ideal `i`: the values form a finite
    /// set, so every small level set is the off-level set.
    pub fn converges_to(&self, i: &IdealDesc, l: &Q) -> Result<bool, SeqError> {
        Ok(member_pairs(i, &self.off_level(l))?)
    }

    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> = self
            .pieces
            .iter()
            .map(|(s, v)| json!({"support": serde_json::to_value(s).expect("serializable"), "value": format_q(v)}))
            .collect();
        json!({"pieces": pieces, "default": format_q(&self.default)})
    }

    pub fn from_json(v: &Value) -> Result<DoubleSeq, SeqError> {
        let schema = |m: &str| SeqError::Schema(m.to_string());
        let arr = v.get("pieces").and_then(Value::as_array).ok_or_else(|| schema("double sequence needs `pieces`"))?;
        let value = |x: Option<&Value>| -> Result<Q, SeqError> {
            let s = x.and_then(Value::as_str).ok_or_else(|| schema("values are rational strings"))?;
            parse_q(s).map_err(|e| SeqError::Schema(e.to_string()))
        };
        let mut pieces = vec![];
        for p in arr {
            let s = p.get("support").ok_or_else(|| schema("piece needs `support`"))?;
            let s: PairSet = serde_json::from_value(s.clone()).map_err(|e| SeqError::Schema(e.to_string()))?;
            pieces.push((s, value(p.get("value"))?));
        }
        let default = match v.get("default") {
            None => Q::zero(),
            d => value(d)?,
        };
        Ok(DoubleSeq { pieces, default })
    }
}

#[derive(Clone, Debug)]
pub struct DoubleDecomposition {
    pub y: DoubleSeq,
    pub z: DoubleSeq,
    pub z_support: PairSet,
}

/// `x = y + z` with `y →_{I_Pr} ℓ` and `{z ≠ 0} ∈ Z_Pr`, for `x` converging
/// to `ℓ` along `Z_Pr`.
pub fn decompose_double(x: &DoubleSeq, l: &Q) -> Result<DoubleDecomposition, SeqError> {
    let zpr = IdealDesc::density_pr();
    if !x.converges_to(&zpr, l)? {
        return Err(SeqError::NotConvergent(format!(
            "{{x ≠ {}}} has Pringsheim density {}",
            format_q(l),
            format_q(&x.off_level(l).product_density())
        )));
    }
    let pieces: Vec<(PairSet, Q)> =
        x.level_pieces().into_iter().filter(|(_, v)| v != l).map(|(s, v)| (s, v - l)).collect();
    let z = DoubleSeq::new(pieces, Q::zero());
    let y = DoubleSeq::constant(l.clone());
    let z_support = z.off_level(&Q::zero());
    if !y.converges_to(&IdealDesc::pringsheim(), l)? || !member_pairs(&zpr, &z_support)? {
        return Err(SeqError::Undecidable("double decomposition failed verification".into()));
    }
    Ok(DoubleDecomposition { y, z, z_support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::ApSet;
    use crate::rational::qi;

    #[test]
    fn examples() {
        let rows = PairSet::rect(ApSet::finite([1, 2, 3]), ApSet::full());
        let x = DoubleSeq::new(vec![(rows.clone(), qi(1))], qi(0));
        let d = decompose_double(&x, &qi(0)).unwrap();
        assert_eq!(d.y, DoubleSeq::constant(qi(0)));
        for n in 1..20 {
            for m in 1..20 {
                assert_eq!(x.eval(n, m).unwrap(), d.y.eval(n, m).unwrap() + d.z.eval(n, m).unwrap());
                assert_eq!(d.z_support.contains((n, m)), n <= 3);
            }
        }
        let c = decompose_double(&DoubleSeq::constant(qi(4)), &qi(4)).unwrap();
        assert!(c.z_support.is_finite());
        let ee = DoubleSeq::new(vec![(PairSet::rect(ApSet::evens(), ApSet::evens()), qi(1))], qi(0));
        assert!(matches!(decompose_double(&ee, &qi(0)), Err(SeqError::NotConvergent(_))));
        assert_eq!(DoubleSeq::from_json(&x.to_json()).unwrap(), x);
    }
}
