//! Loss probabilities for replicated and erasure-coded objects, and the
//! solvers that size a scheme for a target loss probability.
//!
//! Disk states are independent with a common failure probability. An `m+n`
//! code loses data when more than `n` of its `m+n` disks are dead at once,
//! so every loss computation reduces to an upper binomial tail.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::scheme::{ErasureScheme, HybridScheme, ReplicationScheme};

/// Largest parity count the solvers will try before giving up.
pub const DEFAULT_PARITY_CAP: u32 = 64;

/// Fractional distance from an integer below which `log ε / log p` is
/// confirmed by direct powering rather than trusted.
const INTEGER_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("{name} must lie strictly between 0 and 1, got {value}")]
    NotInterior { name: &'static str, value: f64 },
    #[error("dead probability {p_dead} exceeds unavailable probability {p_unavail}")]
    DeadExceedsUnavailable { p_dead: f64, p_unavail: f64 },
    #[error("no parity count up to {cap} meets the target")]
    SolverCapExceeded { cap: u32 },
    #[error("normal approximation needs p < n/(m+n) = {bound}, got p = {p}")]
    AboveMeanThreshold { p: f64, bound: f64 },
    #[error("scale must be at least 1")]
    ZeroScale,
}

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self, ProbError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(ProbError::OutOfRange(value))
        }
    }

    /// Clamps rounding spill-over (e.g. `1 + 1e-16`) back into range.
    pub(crate) fn saturating(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }

    fn interior(self, name: &'static str) -> Result<f64, ProbError> {
        if self.0 > 0.0 && self.0 < 1.0 {
            Ok(self.0)
        } else {
            Err(ProbError::NotInterior { name, value: self.0 })
        }
    }
}

impl TryFrom<f64> for Probability {
    type Error = ProbError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Per-disk steady-state probabilities of being dead and of being
/// unreachable. A dead disk is also unreachable, so `p_dead <= p_unavail`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskFailureModel {
    p_dead: Probability,
    p_unavail: Probability,
}

impl DiskFailureModel {
    pub fn new(p_dead: f64, p_unavail: f64) -> Result<Self, ProbError> {
        let p_dead = Probability::new(p_dead)?;
        let p_unavail = Probability::new(p_unavail)?;
        if p_dead > p_unavail {
            return Err(ProbError::DeadExceedsUnavailable {
                p_dead: p_dead.0,
                p_unavail: p_unavail.0,
            });
        }
        Ok(Self { p_dead, p_unavail })
    }

    pub fn p_dead(&self) -> Probability {
        self.p_dead
    }

    pub fn p_unavail(&self) -> Probability {
        self.p_unavail
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `C(n, k)` as the nearest `f64`. Computed exactly in `u128` up to `n = 120`.
pub fn binomial_coefficient(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 120 {
        let mut c: u128 = 1;
        for i in 0..k {
            // c * (n - i) is divisible by (i + 1) at every step
            c = c * u128::from(n - i) / u128::from(i + 1);
        }
        c as f64
    } else {
        (0..k).fold(1.0, |c, i| c * f64::from(n - i) / f64::from(i + 1))
    }
}

/// `P(X > threshold)` for `X ~ Binomial(trials, p)`.
///
/// Terms are formed as `C * p^i * exp((trials-i) * ln(1-p))` so that tiny
/// `p` never passes through `1 - p`, and summed from the far tail inward
/// with compensation.
pub fn binomial_upper_tail(trials: u32, threshold: u32, p: f64) -> f64 {
    if threshold >= trials || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_q = (-p).ln_1p();
    let mut acc = CompensatedSum::default();
    for i in (threshold + 1..=trials).rev() {
        let survivors = trials - i;
        let q_pow = if survivors == 0 {
            1.0
        } else {
            (f64::from(survivors) * ln_q).exp()
        };
        acc.add(binomial_coefficient(trials, i) * p.powi(i as i32) * q_pow);
    }
    acc.total().min(1.0)
}

/// Loss probability of `k`-way replication: `p_dead^k`.
pub fn prob_loss_replication(model: &DiskFailureModel, scheme: ReplicationScheme) -> Probability {
    Probability(model.p_dead.0.powi(scheme.copies() as i32))
}

/// Smallest `k` with `p^k <= epsilon`, i.e. `ceil(log ε / log p)`.
pub fn replicas_needed(epsilon: Probability, p: Probability) -> Result<u32, ProbError> {
    let eps = epsilon.interior("epsilon")?;
    let p = p.interior("p")?;
    let ratio = eps.ln() / p.ln();
    let nearest = ratio.round();
    let mut k = if (ratio - nearest).abs() < INTEGER_GUARD {
        nearest
    } else {
        ratio.ceil()
    }
    .max(1.0) as u32;

    // Near an integer the log ratio cannot be trusted to the last ulp; confirm
    // against the power itself, allowing the same relative slack.
    let fits = |k: u32| p.powi(k as i32) <= eps * (1.0 + INTEGER_GUARD);
    while !fits(k) {
        k += 1;
    }
    while k > 1 && fits(k - 1) {
        k -= 1;
    }
    Ok(k)
}

/// Probability that more than `n` of the `m+n` disks are dead.
pub fn prob_loss_ec(p: Probability, scheme: ErasureScheme) -> Probability {
    Probability::saturating(binomial_upper_tail(scheme.total(), scheme.parity(), p.0))
}

/// Loss probability of `k` replicas of each `m+n` fragment: a fragment is
/// gone only when all its copies are, and the object when more than `n`
/// fragments are gone.
pub fn prob_loss_hybrid(p: Probability, scheme: HybridScheme) -> Probability {
    let fragment_loss = Probability(p.0.powi(scheme.copies() as i32));
    prob_loss_ec(fragment_loss, scheme.inner())
}

/// Smallest `n >= 1` with `prob_loss_ec(p, m+n) < epsilon`, searching up to
/// [`DEFAULT_PARITY_CAP`].
pub fn parity_needed(epsilon: Probability, p: Probability, m: u32) -> Result<u32, ProbError> {
    parity_needed_with_cap(epsilon, p, m, DEFAULT_PARITY_CAP)
}

pub fn parity_needed_with_cap(epsilon: Probability, p: Probability, m: u32, cap: u32) -> Result<u32, ProbError> {
    epsilon.interior("epsilon")?;
    p.interior("p")?;
    solve_parity(epsilon, m, cap, |scheme| Ok(prob_loss_ec(p, scheme)))
}

fn solve_parity(
    epsilon: Probability,
    m: u32,
    cap: u32,
    loss: impl Fn(ErasureScheme) -> Result<Probability, ProbError>,
) -> Result<u32, ProbError> {
    for n in 1..=cap {
        let scheme = ErasureScheme::new(m.max(1), n).expect("m >= 1");
        if loss(scheme)? < epsilon {
            return Ok(n);
        }
    }
    Err(ProbError::SolverCapExceeded { cap })
}

/// Exact probability that at least one of `disks` disks has failed.
pub fn prob_any_failure(p: Probability, disks: u32) -> Probability {
    Probability::saturating(-(f64::from(disks) * (-p.0).ln_1p()).exp_m1())
}

/// The small-`p` approximation `disks * p` of [`prob_any_failure`]. Not a
/// probability once `disks * p > 1`.
pub fn prob_any_failure_approx(p: Probability, disks: u32) -> f64 {
    f64::from(disks) * p.0
}

/// Upper tail `P(Z > z)` of the standard normal.
pub fn normal_upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Standardized loss threshold `(kn - k(m+n)p) / sqrt(k(m+n)p(1-p))` of the
/// scaled `km+kn` code. No range check on `p` beyond `0 < p < 1`.
pub fn standardized_threshold(p: Probability, scheme: ErasureScheme, scale: u32) -> Result<f64, ProbError> {
    if scale == 0 {
        return Err(ProbError::ZeroScale);
    }
    let p = p.interior("p")?;
    let k = f64::from(scale);
    let total = f64::from(scheme.total());
    let mean = k * total * p;
    let sd = (k * total * p * (1.0 - p)).sqrt();
    Ok((k * f64::from(scheme.parity()) - mean) / sd)
}

/// Normal approximation to `prob_loss_ec(p, km + kn)`.
///
/// Requires `p < n/(m+n)`, the regime in which the approximate loss falls to
/// zero as `scale` grows.
pub fn gaussian_tail_loss(p: Probability, scheme: ErasureScheme, scale: u32) -> Result<Probability, ProbError> {
    if scale == 0 {
        return Err(ProbError::ZeroScale);
    }
    let bound = f64::from(scheme.parity()) / f64::from(scheme.total());
    if p.0 >= bound {
        return Err(ProbError::AboveMeanThreshold { p: p.0, bound });
    }
    if p.0 == 0.0 {
        return Ok(Probability::ZERO);
    }
    let z = standardized_threshold(p, scheme, scale)?;
    Ok(Probability::saturating(normal_upper_tail(z)))
}

/// Parity count the normal approximation would call sufficient: smallest
/// `n >= 1` whose approximate loss is below `epsilon`.
pub fn gaussian_parity_needed(epsilon: Probability, p: Probability, m: u32) -> Result<u32, ProbError> {
    epsilon.interior("epsilon")?;
    p.interior("p")?;
    solve_parity(epsilon, m, DEFAULT_PARITY_CAP, |scheme| {
        match gaussian_tail_loss(p, scheme, 1) {
            // below the mean the approximation has nothing to say; keep going
            Err(ProbError::AboveMeanThreshold { .. }) => Ok(Probability::ONE),
            other => other,
        }
    })
}
