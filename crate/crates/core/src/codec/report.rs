//! Exhaustive recoverability profiles: for each number of simultaneous
//! fragment failures, how many of the failure patterns still decode.

use serde::{Deserialize, Serialize};

use super::lrc::lrc_recoverable;
use super::CodecError;
use crate::prob::{binomial_coefficient, CompensatedSum, Probability};
use crate::scheme::Scheme;

/// Largest fragment count whose patterns are enumerated one by one.
pub const ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverabilityRow {
    pub failures: usize,
    pub total_patterns: u64,
    pub recoverable: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverabilityReport {
    pub scheme: Scheme,
    pub total_fragments: usize,
    pub rows: Vec<RecoverabilityRow>,
}

impl RecoverabilityReport {
    pub fn row(&self, failures: usize) -> Option<&RecoverabilityRow> {
        self.rows.iter().find(|r| r.failures == failures)
    }

    /// Loss probability when each fragment fails independently with `p`.
    /// Needs a complete report (every failure count up to the total).
    pub fn loss_probability(&self, p: Probability) -> Option<Probability> {
        if self.rows.len() != self.total_fragments + 1 {
            return None;
        }
        let p = p.value();
        let n = self.total_fragments as i32;
        let mut acc = CompensatedSum::default();
        for row in &self.rows {
            let t = row.failures as i32;
            let lost = (row.total_patterns - row.recoverable) as f64;
            acc.add(lost * p.powi(t) * (1.0 - p).powi(n - t));
        }
        Some(Probability::saturating(acc.total()))
    }
}

fn row(failures: usize, total_patterns: u64, recoverable: u64) -> RecoverabilityRow {
    RecoverabilityRow {
        failures,
        total_patterns,
        recoverable,
        fraction: recoverable as f64 / total_patterns as f64,
    }
}

/// Calls `f` with every `size`-element subset of `0..total`, as a bitmask.
fn for_each_pattern(total: usize, size: usize, mut f: impl FnMut(u64)) {
    if size > total {
        return;
    }
    if size == 0 {
        f(0);
        return;
    }
    // Gosper's hack: next bitmask with the same popcount
    let mut mask: u64 = (1 << size) - 1;
    let limit: u64 = 1 << total;
    while mask < limit {
        f(mask);
        let lowest = mask & mask.wrapping_neg();
        let ripple = mask + lowest;
        mask = (((ripple ^ mask) >> 2) / lowest) | ripple;
    }
}

fn enumerate(total: usize, max_t: usize, recoverable: impl Fn(u64) -> bool) -> Vec<RecoverabilityRow> {
    (0..=max_t)
        .map(|t| {
            let mut count = 0u64;
            let mut ok = 0u64;
            for_each_pattern(total, t, |mask| {
                count += 1;
                ok += u64::from(recoverable(mask));
            });
            row(t, count, ok)
        })
        .collect()
}

/// Recoverable fraction of every failure pattern of size `0..=max_t`.
///
/// Maximum-distance codes (replication and plain `m+n`) are tabulated
/// directly: every pattern of at most `n` failures decodes, none beyond.
/// The 6+2+2 code and the hybrid are enumerated pattern by pattern.
pub fn recoverability_report(scheme: &Scheme, max_t: usize) -> Result<RecoverabilityReport, CodecError> {
    let total = scheme.fragment_count() as usize;
    if max_t > total {
        return Err(CodecError::Unsupported(format!(
            "{scheme} has only {total} fragments, cannot fail {max_t}"
        )));
    }
    let rows = match scheme {
        Scheme::Replication(_) | Scheme::Erasure(_) => {
            let tolerated = total - scheme.data_fragments() as usize;
            (0..=max_t)
                .map(|t| {
                    let patterns = binomial_coefficient(total as u32, t as u32) as u64;
                    row(t, patterns, if t <= tolerated { patterns } else { 0 })
                })
                .collect()
        }
        Scheme::Lrc => enumerate(total, max_t, |mask| {
            let failed: Vec<usize> = (0..total).filter(|i| mask >> i & 1 == 1).collect();
            lrc_recoverable(&failed)
        }),
        Scheme::Hybrid(h) => {
            if total > ENUMERATION_CAP {
                return Err(CodecError::Unsupported(format!(
                    "{scheme} has {total} fragments; enumeration is capped at {ENUMERATION_CAP}"
                )));
            }
            let width = h.inner().total() as usize;
            let copies = h.copies() as usize;
            let tolerated = h.inner().parity() as usize;
            enumerate(total, max_t, |mask| {
                // copy c of fragment j sits at index c * width + j
                let lost = (0..width)
                    .filter(|j| (0..copies).all(|c| mask >> (c * width + j) & 1 == 1))
                    .count();
                lost <= tolerated
            })
        }
    };
    Ok(RecoverabilityReport {
        scheme: *scheme,
        total_fragments: total,
        rows,
    })
}
