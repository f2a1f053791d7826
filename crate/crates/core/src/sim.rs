//! Monte Carlo cross-checks for the analytic loss, availability and latency
//! models.
//!
//! Each trial samples the steady state once: which disks are dead or
//! unreachable, which data centers are out. Trials are grouped into fixed
//! chunks of [`CHUNK_TRIALS`]; chunk `c` draws from a ChaCha8 stream keyed by
//! `(seed, c)`, so the randomness of every trial depends only on the seed and
//! the trial index. Chunks may run on any number of threads and are reduced
//! in chunk order, which makes results bit-identical across thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::lrc_recoverable;
use crate::latency::{expected_latency_ec, expected_latency_replication, LatencyProfile};
use crate::placement::{
    ec_unavailability, replication_unavailability, unavailability_by_enumeration, Placement, PlacementError, Topology,
};
use crate::prob::{prob_loss_ec, DiskFailureModel, Probability};
use crate::scheme::{ErasureScheme, Scheme};

/// Trials per RNG stream.
pub const CHUNK_TRIALS: u64 = 1 << 14;

/// Minimum expected number of events before a probability estimate is
/// considered meaningful.
pub const MIN_EXPECTED_EVENTS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error(
        "analytic probability {analytic:e} is below {min_events}/trials; \
         {trials} trials would mostly report zero events. Use at least {suggested} trials \
         or validate at a larger p"
    )]
    RareEvent {
        analytic: f64,
        trials: u64,
        suggested: u64,
        min_events: f64,
    },
    #[error("latency simulation needs p < 1")]
    CertainFailure,
    #[error("could not start a thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Placement(#[from] PlacementError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LatencyMode {
    /// Walk replicas nearest first until one answers.
    Replication,
    /// `m` fragments at the nearest site; any local failure costs a trip to
    /// the second site.
    Erasure { m: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum Scenario {
    Loss {
        p: Probability,
        scheme: ErasureScheme,
    },
    Availability {
        model: DiskFailureModel,
        topology: Topology,
        placement: Placement,
    },
    Latency {
        profile: LatencyProfile,
        p: Probability,
        mode: LatencyMode,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub trials: u64,
    /// Loss/availability: trials in which the object was unreadable.
    /// Latency: trials the nearest site could not serve on its own.
    pub event_count: u64,
    /// Event frequency, or mean latency for the latency scenario.
    pub point_estimate: f64,
    pub standard_error: f64,
    /// The analytic counterpart, when one can be computed.
    pub analytic: Option<f64>,
    pub z_score: Option<f64>,
    /// Replicated latency only: trials in which no replica answered. They
    /// count as zero latency in the mean, matching the analytic sum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unserved: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    events: u64,
    unserved: u64,
    sum: f64,
    sum_sq: f64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.events += other.events;
        self.unserved += other.unserved;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }
}

/// Runs `trial` for every trial index, chunked and reduced in chunk order.
fn run_trials<F>(trials: u64, seed: u64, trial: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng, &mut Tally) + Sync,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut tally = Tally::default();
            let len = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            for _ in 0..len {
                trial(&mut rng, &mut tally);
            }
            tally
        })
        .collect();
    tallies.into_iter().fold(Tally::default(), Tally::merge)
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    rng.random::<f64>() < p
}

fn guard_rare(analytic: f64, trials: u64) -> Result<(), SimError> {
    if analytic > 0.0 && analytic * (trials as f64) < MIN_EXPECTED_EVENTS {
        return Err(SimError::RareEvent {
            analytic,
            trials,
            suggested: (MIN_EXPECTED_EVENTS / analytic).ceil() as u64,
            min_events: MIN_EXPECTED_EVENTS,
        });
    }
    Ok(())
}

fn z_score(estimate: f64, se: f64, analytic: Option<f64>) -> Option<f64> {
    let analytic = analytic?;
    if se > 0.0 {
        Some((estimate - analytic) / se)
    } else if (estimate - analytic).abs() <= 1e-12 * analytic.abs().max(1.0) {
        Some(0.0)
    } else {
        None
    }
}

fn proportion_result(trials: u64, tally: Tally, analytic: Option<f64>) -> SimulationResult {
    let n = trials as f64;
    let estimate = tally.events as f64 / n;
    let se = (estimate * (1.0 - estimate) / n).sqrt();
    SimulationResult {
        trials,
        event_count: tally.events,
        point_estimate: estimate,
        standard_error: se,
        analytic,
        z_score: z_score(estimate, se, analytic),
        unserved: None,
    }
}

/// Disk-loss scenario: event = more than `n` of `m+n` disks dead.
pub fn simulate_loss(
    trials: u64,
    seed: u64,
    p: Probability,
    scheme: ErasureScheme,
) -> Result<SimulationResult, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let analytic = prob_loss_ec(p, scheme).value();
    guard_rare(analytic, trials)?;
    let (disks, tolerated, p) = (scheme.total(), scheme.parity(), p.value());
    let tally = run_trials(trials, seed, |rng, t| {
        let dead = (0..disks).filter(|_| bernoulli(rng, p)).count() as u32;
        t.events += u64::from(dead > tolerated);
    });
    Ok(proportion_result(trials, tally, Some(analytic)))
}

/// Whether an object is readable given which of its fragments are reachable.
fn readable(scheme: Scheme, up: &[bool]) -> bool {
    match scheme {
        Scheme::Replication(_) => up.iter().any(|&u| u),
        Scheme::Erasure(ec) => up.iter().filter(|&&u| u).count() >= ec.data() as usize,
        Scheme::Lrc => {
            let failed: Vec<usize> = (0..up.len()).filter(|&i| !up[i]).collect();
            lrc_recoverable(&failed)
        }
        Scheme::Hybrid(h) => {
            let width = h.inner().total() as usize;
            let present = (0..width)
                .filter(|j| up.iter().skip(*j).step_by(width).any(|&u| u))
                .count();
            present >= h.inner().data() as usize
        }
    }
}

/// Exact unavailability for the placement, when it can be enumerated.
pub fn analytic_unavailability(
    model: &DiskFailureModel,
    topology: &Topology,
    placement: &Placement,
) -> Result<Option<Probability>, PlacementError> {
    let scheme = placement.scheme();
    let exact = match scheme {
        Scheme::Replication(r) if placement.assignment().iter().enumerate().all(|(i, &dc)| i == dc) => {
            replication_unavailability(model, topology, r.copies())
        }
        Scheme::Erasure(_) => ec_unavailability(model, topology, placement),
        _ => unavailability_by_enumeration(model, topology, placement, |up| readable(scheme, up)),
    };
    match exact {
        Ok(p) => Ok(Some(p)),
        Err(PlacementError::TooManyDataCenters { .. } | PlacementError::TooManyFragments { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Availability scenario: data-center outages first, then per-disk
/// unavailability inside the surviving data centers.
pub fn simulate_availability(
    trials: u64,
    seed: u64,
    model: &DiskFailureModel,
    topology: &Topology,
    placement: &Placement,
) -> Result<SimulationResult, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    placement.check(topology)?;
    let analytic = analytic_unavailability(model, topology, placement)?.map(Probability::value);
    if let Some(a) = analytic {
        guard_rare(a, trials)?;
    }
    let scheme = placement.scheme();
    let outage: Vec<f64> = (0..topology.dc_count()).map(|d| topology.outage(d).value()).collect();
    let pu = model.p_unavail().value();
    let assignment = placement.assignment();
    let tally = run_trials(trials, seed, |rng, t| {
        // DCs that are never or always out consume no randomness
        let down: Vec<bool> = outage
            .iter()
            .map(|&q| {
                if q <= 0.0 {
                    false
                } else if q >= 1.0 {
                    true
                } else {
                    bernoulli(rng, q)
                }
            })
            .collect();
        let up: Vec<bool> = assignment.iter().map(|&dc| !down[dc] && !bernoulli(rng, pu)).collect();
        t.events += u64::from(!readable(scheme, &up));
    });
    Ok(proportion_result(trials, tally, analytic))
}

/// Failover latency scenario.
pub fn simulate_latency(
    trials: u64,
    seed: u64,
    profile: &LatencyProfile,
    p: Probability,
    mode: LatencyMode,
) -> Result<SimulationResult, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if p.value() >= 1.0 {
        return Err(SimError::CertainFailure);
    }
    let pv = p.value();
    let sites = profile.latencies();
    let (tally, analytic) = match mode {
        LatencyMode::Replication => {
            let tally = run_trials(trials, seed, |rng, t| {
                match sites.iter().position(|_| !bernoulli(rng, pv)) {
                    Some(i) => {
                        t.events += u64::from(i > 0);
                        t.sum += sites[i];
                        t.sum_sq += sites[i] * sites[i];
                    }
                    None => {
                        t.events += 1;
                        t.unserved += 1;
                    }
                }
            });
            (tally, expected_latency_replication(profile, p))
        }
        LatencyMode::Erasure { m } => {
            let (near, far) = (profile.nearest(), profile.second());
            let tally = run_trials(trials, seed, |rng, t| {
                // draw all m so every trial consumes the same randomness
                let local_failures = (0..m).filter(|_| bernoulli(rng, pv)).count();
                let latency = if local_failures == 0 { near } else { far };
                t.events += u64::from(local_failures > 0);
                t.sum += latency;
                t.sum_sq += latency * latency;
            });
            (tally, expected_latency_ec(near, far, p, m))
        }
    };
    let n = trials as f64;
    let mean = tally.sum / n;
    let variance = if trials > 1 {
        ((tally.sum_sq - tally.sum * tally.sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let se = (variance / n).sqrt();
    Ok(SimulationResult {
        trials,
        event_count: tally.events,
        point_estimate: mean,
        standard_error: se,
        analytic: Some(analytic),
        z_score: z_score(mean, se, Some(analytic)),
        unserved: matches!(mode, LatencyMode::Replication).then_some(tally.unserved),
    })
}

/// Runs a configured scenario on the current rayon pool.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationResult, SimError> {
    let SimulationConfig { trials, seed, scenario } = config;
    match scenario {
        Scenario::Loss { p, scheme } => simulate_loss(*trials, *seed, *p, *scheme),
        Scenario::Availability {
            model,
            topology,
            placement,
        } => simulate_availability(*trials, *seed, model, topology, placement),
        Scenario::Latency { profile, p, mode } => simulate_latency(*trials, *seed, profile, *p, *mode),
    }
}

/// Runs a configured scenario on a dedicated pool of `threads` workers.
pub fn simulate_with_threads(config: &SimulationConfig, threads: usize) -> Result<SimulationResult, SimError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))?;
    pool.install(|| simulate(config))
}
