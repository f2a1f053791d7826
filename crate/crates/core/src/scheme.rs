//! Redundancy scheme descriptors shared by the probability, placement and
//! codec modules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Data fragments in the 6+2+2 local reconstruction code.
pub const LRC_DATA: u32 = 6;
/// Local parities in the 6+2+2 local reconstruction code (one per group).
pub const LRC_LOCAL: u32 = 2;
/// Global parities in the 6+2+2 local reconstruction code.
pub const LRC_GLOBAL: u32 = 2;
/// Total fragment count of the 6+2+2 code.
pub const LRC_TOTAL: u32 = LRC_DATA + LRC_LOCAL + LRC_GLOBAL;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("replication needs at least one copy")]
    NoCopies,
    #[error("erasure coding needs at least one data fragment")]
    NoDataFragments,
    #[error("cannot parse scheme {0:?} (expected rep:K, ec:M+N, lrc:6+2+2 or hybrid:KxM+N)")]
    Parse(String),
}

/// `k` full copies of every object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplicationScheme {
    k: u32,
}

impl ReplicationScheme {
    pub fn new(k: u32) -> Result<Self, SchemeError> {
        if k == 0 {
            return Err(SchemeError::NoCopies);
        }
        Ok(Self { k })
    }

    pub fn copies(&self) -> u32 {
        self.k
    }

    /// The equivalent `1 + (k-1)` erasure code.
    pub fn as_erasure(&self) -> ErasureScheme {
        ErasureScheme { m: 1, n: self.k - 1 }
    }
}

/// `m` data fragments plus `n` parity fragments; any `m` reconstruct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErasureScheme {
    m: u32,
    n: u32,
}

impl ErasureScheme {
    pub fn new(m: u32, n: u32) -> Result<Self, SchemeError> {
        if m == 0 {
            return Err(SchemeError::NoDataFragments);
        }
        Ok(Self { m, n })
    }

    pub fn data(&self) -> u32 {
        self.m
    }

    pub fn parity(&self) -> u32 {
        self.n
    }

    pub fn total(&self) -> u32 {
        self.m + self.n
    }

    /// Storage multiplier `(m+n)/m`.
    pub fn redundancy_factor(&self) -> f64 {
        f64::from(self.total()) / f64::from(self.m)
    }

    /// The same code with both parameters multiplied by `scale`.
    pub fn scaled(&self, scale: u32) -> Self {
        Self {
            m: self.m * scale,
            n: self.n * scale,
        }
    }
}

/// `k` replicas of each fragment of an inner erasure code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HybridScheme {
    k: u32,
    inner: ErasureScheme,
}

impl HybridScheme {
    pub fn new(k: u32, inner: ErasureScheme) -> Result<Self, SchemeError> {
        if k == 0 {
            return Err(SchemeError::NoCopies);
        }
        Ok(Self { k, inner })
    }

    pub fn copies(&self) -> u32 {
        self.k
    }

    pub fn inner(&self) -> ErasureScheme {
        self.inner
    }
}

/// Any of the redundancy schemes the toolkit models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Replication(ReplicationScheme),
    Erasure(ErasureScheme),
    /// The fixed 6+2+2 local reconstruction code.
    Lrc,
    Hybrid(HybridScheme),
}

impl Scheme {
    pub fn replication(k: u32) -> Result<Self, SchemeError> {
        ReplicationScheme::new(k).map(Scheme::Replication)
    }

    pub fn erasure(m: u32, n: u32) -> Result<Self, SchemeError> {
        ErasureScheme::new(m, n).map(Scheme::Erasure)
    }

    pub fn hybrid(k: u32, m: u32, n: u32) -> Result<Self, SchemeError> {
        HybridScheme::new(k, ErasureScheme::new(m, n)?).map(Scheme::Hybrid)
    }

    /// Number of disks (fragments or replicas) a single object occupies.
    pub fn fragment_count(&self) -> u32 {
        match self {
            Scheme::Replication(r) => r.k,
            Scheme::Erasure(e) => e.total(),
            Scheme::Lrc => LRC_TOTAL,
            Scheme::Hybrid(h) => h.k * h.inner.total(),
        }
    }

    /// Fragments that must be read to serve an object in the common case.
    pub fn data_fragments(&self) -> u32 {
        match self {
            Scheme::Replication(_) => 1,
            Scheme::Erasure(e) => e.m,
            Scheme::Lrc => LRC_DATA,
            Scheme::Hybrid(h) => h.inner.m,
        }
    }

    /// Storage multiplier: `k` for replication, `(m+n)/m` for erasure
    /// coding, `k(m+n)/m` for the hybrid.
    pub fn redundancy_factor(&self) -> f64 {
        match self {
            Scheme::Replication(r) => f64::from(r.k),
            Scheme::Erasure(e) => e.redundancy_factor(),
            Scheme::Lrc => f64::from(LRC_TOTAL) / f64::from(LRC_DATA),
            Scheme::Hybrid(h) => f64::from(h.k) * h.inner.redundancy_factor(),
        }
    }

    /// Disk space used relative to `baseline` for the same amount of data.
    pub fn relative_space(&self, baseline: &Scheme) -> f64 {
        self.redundancy_factor() / baseline.redundancy_factor()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Replication(r) => write!(f, "rep:{}", r.k),
            Scheme::Erasure(e) => write!(f, "ec:{}+{}", e.m, e.n),
            Scheme::Lrc => write!(f, "lrc:{LRC_DATA}+{LRC_LOCAL}+{LRC_GLOBAL}"),
            Scheme::Hybrid(h) => write!(f, "hybrid:{}x{}+{}", h.k, h.inner.m, h.inner.n),
        }
    }
}

fn parse_pair(s: &str) -> Option<(u32, u32)> {
    let (a, b) = s.split_once(['+', '-'])?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for Scheme {
    type Err = SchemeError;

    /// Accepts `rep:3`, `ec:8+3` (also `rs:8+3`, `rs-8-3`), `lrc:6+2+2`
    /// (also `lrc-6-2-2`, `lrc`) and `hybrid:2x4+1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SchemeError::Parse(s.to_owned());
        let lower = s.trim().to_ascii_lowercase();
        let (kind, rest) = match lower.split_once([':', '-']) {
            Some((kind, rest)) => (kind, rest),
            None => (lower.as_str(), ""),
        };
        match kind {
            "rep" | "replication" => Scheme::replication(rest.parse().map_err(|_| bad())?),
            "ec" | "rs" => {
                let (m, n) = parse_pair(rest).ok_or_else(bad)?;
                Scheme::erasure(m, n)
            }
            "lrc" => match rest {
                "" | "6+2+2" | "6-2-2" => Ok(Scheme::Lrc),
                _ => Err(bad()),
            },
            "hybrid" => {
                let (k, inner) = rest.split_once(['x', '*']).ok_or_else(bad)?;
                let (m, n) = parse_pair(inner.trim_matches(['(', ')'])).ok_or_else(bad)?;
                Scheme::hybrid(k.trim().parse().map_err(|_| bad())?, m, n)
            }
            _ => Err(bad()),
        }
    }
}
