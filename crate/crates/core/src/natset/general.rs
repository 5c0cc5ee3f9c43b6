use std::fmt;
use std::sync::Arc;

type Pred = Arc<dyn Fn(u64) -> bool + Send + Sync>;
type Counter = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

/// A set known only through its membership predicate. Densities of such sets
/// come from the prefix oracle, never from closed forms.
#[derive(Clone)]
pub struct GeneralSet {
    name: String,
    pred: Pred,
    counter: Option<Counter>,
}

impl GeneralSet {
    pub fn new(name: impl Into<String>, pred: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        GeneralSet { name: name.into(), pred: Arc::new(pred), counter: None }
    }

    /// Supplies a fast `|S ∩ [1, n]|`; it must agree with the predicate.
    pub fn with_counter(mut self, counter: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        self.counter = Some(Arc::new(counter));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && (self.pred)(n)
    }

    pub fn has_counter(&self) -> bool {
        self.counter.is_some()
    }

    pub fn count(&self, n: u64) -> u64 {
        match &self.counter {
            Some(c) => c(n),
            None => (1..=n).filter(|&k| (self.pred)(k)).count() as u64,
        }
    }
}

impl fmt::Debug for GeneralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "general({})", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_and_scan_agree() {
        let s = GeneralSet::new("mult3", |n| n % 3 == 0);
        let fast = s.clone().with_counter(|n| n / 3);
        for n in 0..100 {
            assert_eq!(s.count(n), fast.count(n));
        }
        assert!(!s.contains(0));
    }
}
