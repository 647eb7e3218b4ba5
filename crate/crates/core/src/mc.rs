//! Monte Carlo estimates and mergeable moment accumulators.

use serde::{Deserialize, Serialize};

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }

    /// Distance to `value` in units of standard error (infinite if the
    /// estimate has zero variance and differs from `value`).
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Running mean and sum of squared deviations (Welford), mergeable with
/// Chan's pairwise update. Merging in a fixed order is deterministic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        let stderr = if self.count == 0 { 0.0 } else { (self.variance() / self.count as f64).sqrt() };
        MCEstimate { mean: self.mean, stderr, samples: self.count, seed }
    }
}

/// Frequency estimate of a Bernoulli event from `hits` out of `total` trials.
pub fn proportion(hits: u64, total: u64, seed: u64) -> MCEstimate {
    let p = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
    let stderr = if total < 2 { 0.0 } else { (p * (1.0 - p) / total as f64).sqrt() };
    MCEstimate { mean: p, stderr, samples: total, seed }
}
