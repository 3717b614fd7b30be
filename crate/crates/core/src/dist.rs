//! Normalized finite distributions stored as log weights.
//!
//! Zero probability is represented as `f64::NEG_INFINITY` and carried through
//! exactly; no flooring happens here.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vocab::TokenId;

/// Tolerance on the total probability mass of every distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `ln Σ exp(x)`, exact for empty or all-`-inf` input (returns `-inf`).
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Distribution over a finite, ordered support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDistribution<K = TokenId> {
    entries: Vec<(K, f64)>,
}

/// Normalizes arbitrary log weights. Later duplicates of a key replace
/// earlier ones.
pub fn log_normalize<K, I>(weights: I) -> Result<LogDistribution<K>>
where
    K: Ord + Clone,
    I: IntoIterator<Item = (K, f64)>,
{
    let map: BTreeMap<K, f64> = weights.into_iter().collect();
    if map.values().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::Normalization { table: "log weights".into(), sum: f64::NAN });
    }
    let logs: Vec<f64> = map.values().copied().collect();
    let total = log_sum_exp(&logs);
    if total == f64::NEG_INFINITY {
        return Err(Error::AllZeroSupport);
    }
    let entries = map.into_iter().map(|(k, w)| (k, w - total)).collect();
    let dist = LogDistribution { entries };
    hygiene::record(&dist);
    Ok(dist)
}

/// Key with the largest log weight; ties go to the lowest key.
pub fn argmax<K: Ord + Clone>(dist: &LogDistribution<K>) -> K {
    dist.argmax()
}

impl<K: Ord + Clone> LogDistribution<K> {
    pub fn point_mass(key: K) -> Self {
        let dist = Self { entries: vec![(key, 0.0)] };
        hygiene::record(&dist);
        dist
    }

    /// Wraps log weights that already sum to one (within
    /// [`NORMALIZATION_TOLERANCE`]) without shifting them.
    pub fn from_normalized<I: IntoIterator<Item = (K, f64)>>(weights: I) -> Result<Self> {
        let map: BTreeMap<K, f64> = weights.into_iter().collect();
        if map.values().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::Normalization { table: "log weights".into(), sum: f64::NAN });
        }
        let dist = Self { entries: map.into_iter().collect() };
        if dist.entries.iter().all(|(_, w)| *w == f64::NEG_INFINITY) {
            return Err(Error::AllZeroSupport);
        }
        if !dist.is_normalized(NORMALIZATION_TOLERANCE) {
            return Err(Error::Normalization { table: "log weights".into(), sum: 1.0 + dist.mass_error() });
        }
        hygiene::record(&dist);
        Ok(dist)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> + '_ {
        self.entries.iter().map(|(k, w)| (k, *w))
    }

    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.entries.iter().map(|(k, _)| k)
    }

    /// Log weight of `key`, `-inf` when it lies outside the support.
    pub fn logweight(&self, key: &K) -> f64 {
        self.entries.binary_search_by(|(k, _)| k.cmp(key)).map(|i| self.entries[i].1).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn prob(&self, key: &K) -> f64 {
        self.logweight(key).exp()
    }

    pub fn argmax(&self) -> K {
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if e.1 > best.1 {
                best = e;
            }
        }
        best.0.clone()
    }

    /// Keys with finite weight, ordered by weight descending then key ascending.
    pub fn ranked(&self) -> Vec<(K, f64)> {
        let mut ranked: Vec<(K, f64)> = self.entries.iter().filter(|(_, w)| w.is_finite()).cloned().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked
    }

    /// Total probability mass minus one.
    pub fn mass_error(&self) -> f64 {
        let logs: Vec<f64> = self.entries.iter().map(|(_, w)| *w).collect();
        log_sum_exp(&logs).exp() - 1.0
    }

    pub fn is_normalized(&self, tolerance: f64) -> bool {
        !self.entries.is_empty()
            && self.entries.iter().any(|(_, w)| w.is_finite())
            && self.mass_error().abs() <= tolerance
    }

    pub fn map_keys<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> LogDistribution<J> {
        let mut entries: Vec<(J, f64)> = self.entries.iter().map(|(k, w)| (f(k), *w)).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        LogDistribution { entries }
    }
}

/// Process-wide audit of every distribution this crate constructs.
///
/// Each construction checks the normalization invariant and bumps a counter;
/// test suites read the counters to assert that no violation ever occurred.
pub mod hygiene {
    use std::sync::atomic::{AtomicU64, Ordering};

    use super::{LogDistribution, NORMALIZATION_TOLERANCE};

    static CHECKED: AtomicU64 = AtomicU64::new(0);
    static VIOLATIONS: AtomicU64 = AtomicU64::new(0);

    pub(crate) fn record<K: Ord + Clone>(dist: &LogDistribution<K>) {
        CHECKED.fetch_add(1, Ordering::Relaxed);
        if !dist.is_normalized(NORMALIZATION_TOLERANCE) {
            VIOLATIONS.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// `(checked, violations)` since process start.
    pub fn counts() -> (u64, u64) {
        (CHECKED.load(Ordering::Relaxed), VIOLATIONS.load(Ordering::Relaxed))
    }
}
