//! Expected read latency when requests fail over to more distant sites.
//!
//! Latencies are abstract per-site scalars. A replicated read goes to the
//! nearest reachable replica. An erasure-coded read keeps `m` fragments at
//! the nearest site and has to reach out to the second site as soon as one
//! of those local fragments is unavailable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::Probability;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatencyError {
    #[error("latency profile is empty")]
    Empty,
    #[error("latency {0} is not a positive finite number")]
    NotPositive(f64),
    #[error("latencies must be sorted nearest first")]
    Unsorted,
}

/// Per-site read latencies, nearest site first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LatencyProfile(Vec<f64>);

impl LatencyProfile {
    pub fn new(latencies: Vec<f64>) -> Result<Self, LatencyError> {
        if latencies.is_empty() {
            return Err(LatencyError::Empty);
        }
        if let Some(&bad) = latencies.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(LatencyError::NotPositive(bad));
        }
        if latencies.windows(2).any(|w| w[0] > w[1]) {
            return Err(LatencyError::Unsorted);
        }
        Ok(Self(latencies))
    }

    pub fn latencies(&self) -> &[f64] {
        &self.0
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    pub fn nearest(&self) -> f64 {
        self.0[0]
    }

    /// Latency of the second-nearest site, or the nearest if there is only one.
    pub fn second(&self) -> f64 {
        *self.0.get(1).unwrap_or(&self.0[0])
    }

    pub fn farthest(&self) -> f64 {
        *self.0.last().expect("non-empty")
    }

    /// The `k` nearest sites.
    pub fn truncated(&self, k: usize) -> Self {
        Self(self.0[..k.clamp(1, self.0.len())].to_vec())
    }
}

impl TryFrom<Vec<f64>> for LatencyProfile {
    type Error = LatencyError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<LatencyProfile> for Vec<f64> {
    fn from(p: LatencyProfile) -> Vec<f64> {
        p.0
    }
}

/// `sum_i p^(i-1) (1-p) L_i` over the profile's sites.
///
/// The weights add up to `1 - p^k`: a request that finds no replica
/// contributes nothing. See [`expected_latency_replication_conditional`]
/// for the latency of served requests only.
pub fn expected_latency_replication(profile: &LatencyProfile, p: Probability) -> f64 {
    let p = p.value();
    let mut reach = 1.0;
    let mut total = 0.0;
    for &latency in profile.latencies() {
        total += reach * (1.0 - p) * latency;
        reach *= p;
    }
    total
}

/// Expected latency given that some replica answered. `None` when no
/// request can be served (`p = 1`).
pub fn expected_latency_replication_conditional(profile: &LatencyProfile, p: Probability) -> Option<f64> {
    let served = 1.0 - p.value().powi(profile.sites() as i32);
    (served > 0.0).then(|| expected_latency_replication(profile, p) / served)
}

/// First-order approximation `(1-p) L1 + p L2`.
pub fn approx_latency_replication(l1: f64, l2: f64, p: Probability) -> f64 {
    let p = p.value();
    (1.0 - p) * l1 + p * l2
}

/// First-order approximation `(1-p) L1 + m p L2` for an `m+n` code with `m`
/// fragments at the nearest site.
pub fn approx_latency_ec(l1: f64, l2: f64, p: Probability, m: u32) -> f64 {
    let p = p.value();
    let mp = f64::from(m) * p;
    if mp >= 1.0 {
        log::warn!("m*p = {mp} >= 1: the first-order latency approximation is meaningless here");
    }
    (1.0 - p) * l1 + mp * l2
}

/// Exact expectation of the model behind [`approx_latency_ec`]: the read
/// costs `L1` when all `m` local fragments are up and `L2` otherwise.
pub fn expected_latency_ec(l1: f64, l2: f64, p: Probability, m: u32) -> f64 {
    let all_local = (f64::from(m) * (-p.value()).ln_1p()).exp();
    all_local * l1 + (1.0 - all_local) * l2
}

/// Bound `p^2 L_k` on the gap between the exact replicated latency and its
/// first-order approximation.
pub fn replication_approx_error_bound(profile: &LatencyProfile, p: Probability) -> f64 {
    p.value().powi(2) * profile.farthest()
}
