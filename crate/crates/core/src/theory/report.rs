use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Absolute tolerance on lemma margins.
pub const LEMMA_TOL: f64 = 1e-8;

/// Outcome of a falsification sweep for one inequality. A nonnegative
/// `worst_margin` means the inequality held on every instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub seed: Option<u64>,
    pub grid: Option<Grid>,
    pub instances: usize,
    pub skipped: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub witness: Value,
    /// Named scalar side results (constants, fitted slopes, ...).
    pub details: BTreeMap<String, f64>,
}

impl LemmaReport {
    pub fn summary_row(&self) -> Vec<String> {
        vec![
            self.lemma.clone(),
            self.instances.to_string(),
            self.skipped.to_string(),
            self.worst_margin.to_string(),
            self.tolerance.to_string(),
            self.passed.to_string(),
        ]
    }

    pub const SUMMARY_HEADER: [&'static str; 6] = ["lemma", "instances", "skipped", "worst_margin", "tolerance", "passed"];
}

/// Accumulates per-instance margins, keeping the worst one and its witness.
#[derive(Debug, Clone)]
pub struct MarginTracker {
    lemma: String,
    tolerance: f64,
    instances: usize,
    skipped: usize,
    worst: f64,
    witness: Value,
    details: BTreeMap<String, f64>,
}

impl MarginTracker {
    pub fn new(lemma: impl Into<String>, tolerance: f64) -> Self {
        Self {
            lemma: lemma.into(),
            tolerance,
            instances: 0,
            skipped: 0,
            worst: f64::INFINITY,
            witness: Value::Null,
            details: BTreeMap::new(),
        }
    }

    /// Records one instance; the witness is only built when it is the new
    /// worst case. Ties keep the earlier instance.
    pub fn record(&mut self, margin: f64, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        if margin < self.worst || margin.is_nan() {
            self.worst = margin;
            self.witness = witness();
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn detail(&mut self, key: impl Into<String>, value: f64) {
        self.details.insert(key.into(), value);
    }

    pub fn worst(&self) -> f64 {
        self.worst
    }

    pub fn merge(&mut self, other: MarginTracker) {
        self.instances += other.instances;
        self.skipped += other.skipped;
        if other.worst < self.worst || other.worst.is_nan() {
            self.worst = other.worst;
            self.witness = other.witness;
        }
        self.details.extend(other.details);
    }

    pub fn finish(self, seed: Option<u64>, grid: Option<Grid>) -> Result<LemmaReport> {
        if self.instances == 0 {
            return Err(Error::Precondition(format!("{}: every instance was skipped", self.lemma)));
        }
        if !self.worst.is_finite() {
            return Err(Error::Numerical(format!("{}: non-finite margin {}", self.lemma, self.worst)));
        }
        Ok(LemmaReport {
            passed: self.worst >= -self.tolerance,
            lemma: self.lemma,
            seed,
            grid,
            instances: self.instances,
            skipped: self.skipped,
            worst_margin: self.worst,
            tolerance: self.tolerance,
            witness: self.witness,
            details: self.details,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keeps_first_worst_witness() {
        let mut t = MarginTracker::new("demo", LEMMA_TOL);
        t.record(0.5, || json!(0));
        t.record(-0.1, || json!(1));
        t.record(-0.1, || json!(2));
        t.skip();
        let r = t.finish(Some(7), None).unwrap();
        assert_eq!(r.witness, json!(1));
        assert_eq!((r.instances, r.skipped), (3, 1));
        assert!(!r.passed);
    }

    #[test]
    fn all_skipped_is_an_error() {
        let mut t = MarginTracker::new("demo", LEMMA_TOL);
        t.skip();
        assert!(t.finish(None, None).is_err());
    }
}
