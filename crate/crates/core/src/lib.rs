//! Cost, durability and performance models for replicated and erasure-coded
//! storage.
//!
//! - [`prob`]: loss probabilities and scheme-sizing solvers.
//! - [`placement`]: data-center placement, correlated unavailability and
//!   catalog sizing.
//! - [`latency`]: expected read latency under failover.
//! - [`codec`]: a systematic Reed-Solomon codec over GF(256), the 6+2+2
//!   local reconstruction code, recoverability enumeration and repair plans.
//! - [`sim`]: a deterministic Monte Carlo engine that cross-checks the
//!   analytic models.

pub mod codec;
pub mod latency;
pub mod placement;
pub mod prob;
pub mod scheme;
pub mod sim;

pub use prob::{DiskFailureModel, Probability};
pub use scheme::{ErasureScheme, HybridScheme, ReplicationScheme, Scheme};
