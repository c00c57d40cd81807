//! Accuracy, precision, recall and F-score, kept as integer counts so the
//! ratios are exact until they are printed.

use std::ops::AddAssign;

/// `(β² + 1)·P·R / (β²·P + R)`; 0 when both P and R are 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (b2 + 1.0) * precision * recall / denom
    }
}

/// Formats a ratio in [0, 1] as a percentage with one decimal.
pub fn percent(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Accuracy {
    pub correct: u64,
    pub total: u64,
}

impl Accuracy {
    pub fn value(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    pub fn record(&mut self, correct: bool) {
        self.total += 1;
        if correct {
            self.correct += 1;
        }
    }
}

impl AddAssign for Accuracy {
    fn add_assign(&mut self, rhs: Self) {
        self.correct += rhs.correct;
        self.total += rhs.total;
    }
}

/// Matched, predicted and gold item counts.
///
/// With nothing predicted, precision is 1 if there was also nothing to
/// find and 0 otherwise; recall mirrors this.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrfCounts {
    pub correct: u64,
    pub predicted: u64,
    pub gold: u64,
}

impl PrfCounts {
    pub fn precision(&self) -> f64 {
        match (self.predicted, self.gold) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (p, _) => self.correct as f64 / p as f64,
        }
    }

    pub fn recall(&self) -> f64 {
        match (self.gold, self.predicted) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (g, _) => self.correct as f64 / g as f64,
        }
    }

    pub fn f_score(&self, beta: f64) -> f64 {
        f_beta(self.precision(), self.recall(), beta)
    }
}

impl AddAssign for PrfCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.correct += rhs.correct;
        self.predicted += rhs.predicted;
        self.gold += rhs.gold;
    }
}
