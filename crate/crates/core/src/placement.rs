//! Assignment of replicas and fragments to data centers, and the
//! availability of an object when whole data centers can go offline.
//!
//! Data-center outages are independent with per-DC probability `q`. Within a
//! reachable data center each disk is independently unavailable with the
//! model's `p_unavail`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::{binomial_upper_tail, CompensatedSum, DiskFailureModel, ProbError, Probability};
use crate::scheme::{Scheme, LRC_DATA, LRC_LOCAL};

/// Largest topology enumerated exactly by default (`2^d` outage subsets).
pub const DEFAULT_DC_CAP: usize = 6;
/// Largest fragment count whose availability patterns are enumerated.
pub const PATTERN_FRAGMENT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("need at least {min} data centers, got {got}")]
    TooFewDataCenters { min: usize, got: usize },
    #[error("{dcs} data centers exceeds the exact-enumeration cap of {cap}; use the simulator")]
    TooManyDataCenters { dcs: usize, cap: usize },
    #[error("{fragments} fragments exceeds the pattern-enumeration cap of {cap}")]
    TooManyFragments { fragments: usize, cap: usize },
    #[error("{replicas} one-per-DC replicas do not fit in {dcs} data centers")]
    ReplicasExceedDataCenters { replicas: u32, dcs: usize },
    #[error("placement covers {got} fragments but the scheme has {expected}")]
    WrongFragmentCount { expected: usize, got: usize },
    #[error("fragment {fragment} assigned to data center {dc}, topology has {dcs}")]
    DataCenterOutOfRange { fragment: usize, dc: usize, dcs: usize },
    #[error("{0} is not a plain m+n erasure code")]
    NotErasure(Scheme),
    #[error("record size must be at least one byte")]
    ZeroRecordSize,
    #[error(transparent)]
    Probability(#[from] ProbError),
}

/// Minimum storage overhead that keeps every object readable with any one of
/// `d` data centers offline: each DC must hold `1/(d-1)` of the data.
pub fn min_overhead_for_availability(d: u32) -> Result<Ratio<u32>, PlacementError> {
    if d < 2 {
        return Err(PlacementError::TooFewDataCenters {
            min: 2,
            got: d as usize,
        });
    }
    Ok(Ratio::new(1, d - 1))
}

/// A set of data centers with independent outage probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    dc_outage: Vec<Probability>,
}

impl Topology {
    pub fn new(dc_outage: Vec<Probability>) -> Result<Self, PlacementError> {
        if dc_outage.is_empty() {
            return Err(PlacementError::TooFewDataCenters { min: 1, got: 0 });
        }
        Ok(Self { dc_outage })
    }

    /// `d` data centers sharing outage probability `q`.
    pub fn uniform(d: usize, q: Probability) -> Result<Self, PlacementError> {
        Self::new(vec![q; d])
    }

    pub fn dc_count(&self) -> usize {
        self.dc_outage.len()
    }

    pub fn outage(&self, dc: usize) -> Probability {
        self.dc_outage[dc]
    }
}

/// Which data center holds each fragment (or replica) of an object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    scheme: Scheme,
    assignment: Vec<usize>,
}

impl Placement {
    pub fn new(scheme: Scheme, assignment: Vec<usize>) -> Result<Self, PlacementError> {
        let expected = scheme.fragment_count() as usize;
        if assignment.len() != expected {
            return Err(PlacementError::WrongFragmentCount {
                expected,
                got: assignment.len(),
            });
        }
        Ok(Self { scheme, assignment })
    }

    /// Fragment `i` goes to data center `i mod d`.
    pub fn round_robin(scheme: Scheme, d: usize) -> Result<Self, PlacementError> {
        if d == 0 {
            return Err(PlacementError::TooFewDataCenters { min: 1, got: 0 });
        }
        let total = scheme.fragment_count() as usize;
        Self::new(scheme, (0..total).map(|i| i % d).collect())
    }

    /// Consecutive runs of fragments: the first `loads[0]` fragments in DC 0,
    /// the next `loads[1]` in DC 1, and so on.
    pub fn grouped(scheme: Scheme, loads: &[usize]) -> Result<Self, PlacementError> {
        let assignment = loads
            .iter()
            .enumerate()
            .flat_map(|(dc, &count)| std::iter::repeat_n(dc, count))
            .collect();
        Self::new(scheme, assignment)
    }

    /// The 6+2+2 layout: each local group (three data fragments and their
    /// local parity) in its own data center, both global parities in a third.
    pub fn lrc_default() -> Self {
        let group = (LRC_DATA / LRC_LOCAL) as usize;
        let mut assignment = Vec::new();
        for g in 0..LRC_LOCAL as usize {
            assignment.extend(std::iter::repeat_n(g, group));
        }
        // local parities follow the data fragments
        assignment.extend(0..LRC_LOCAL as usize);
        assignment.extend([LRC_LOCAL as usize; 2]);
        Self::new(Scheme::Lrc, assignment).expect("fixed layout")
    }

    /// The layout used when none is given: the grouped 6+2+2 layout for the
    /// LRC over three data centers, round robin otherwise.
    pub fn spread(scheme: Scheme, d: usize) -> Result<Self, PlacementError> {
        match scheme {
            Scheme::Lrc if d == 3 => Ok(Self::lrc_default()),
            _ => Self::round_robin(scheme, d),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn dc_of(&self, fragment: usize) -> usize {
        self.assignment[fragment]
    }

    /// Number of fragments held by each of `d` data centers.
    pub fn dc_loads(&self, d: usize) -> Vec<usize> {
        let mut loads = vec![0; d.max(self.assignment.iter().max().map_or(0, |m| m + 1))];
        for &dc in &self.assignment {
            loads[dc] += 1;
        }
        loads
    }

    pub fn check(&self, topology: &Topology) -> Result<(), PlacementError> {
        let dcs = topology.dc_count();
        match self.assignment.iter().position(|&dc| dc >= dcs) {
            Some(fragment) => Err(PlacementError::DataCenterOutOfRange {
                fragment,
                dc: self.assignment[fragment],
                dcs,
            }),
            None => Ok(()),
        }
    }
}

/// Probability that none of `k` replicas, one in each of the first `k` data
/// centers, is reachable. A replica is unreachable when its DC is out or,
/// the DC being up, its disk is unavailable.
pub fn replication_unavailability(
    model: &DiskFailureModel,
    topology: &Topology,
    k: u32,
) -> Result<Probability, PlacementError> {
    let dcs = topology.dc_count();
    if k as usize > dcs {
        return Err(PlacementError::ReplicasExceedDataCenters { replicas: k, dcs });
    }
    let pu = model.p_unavail().value();
    let unavailable = topology.dc_outage[..k as usize]
        .iter()
        .map(|q| q.value() + (1.0 - q.value()) * pu)
        .product();
    Ok(Probability::saturating(unavailable))
}

/// Calls `f(mask, weight)` for every subset of data centers that are out,
/// where bit `i` of `mask` set means DC `i` is down.
fn for_each_outage(topology: &Topology, cap: usize, mut f: impl FnMut(u32, f64)) -> Result<(), PlacementError> {
    let dcs = topology.dc_count();
    if dcs > cap {
        return Err(PlacementError::TooManyDataCenters { dcs, cap });
    }
    for mask in 0u32..(1 << dcs) {
        let weight: f64 = topology
            .dc_outage
            .iter()
            .enumerate()
            .map(|(i, q)| if mask >> i & 1 == 1 { q.value() } else { 1.0 - q.value() })
            .product();
        if weight > 0.0 {
            f(mask, weight);
        }
    }
    Ok(())
}

/// Probability that fewer than `m` fragments of an `m+n` object are
/// reachable, by exact enumeration of data-center outages.
pub fn ec_unavailability(
    model: &DiskFailureModel,
    topology: &Topology,
    placement: &Placement,
) -> Result<Probability, PlacementError> {
    ec_unavailability_with_cap(model, topology, placement, DEFAULT_DC_CAP)
}

pub fn ec_unavailability_with_cap(
    model: &DiskFailureModel,
    topology: &Topology,
    placement: &Placement,
    dc_cap: usize,
) -> Result<Probability, PlacementError> {
    let Scheme::Erasure(ec) = placement.scheme else {
        return Err(PlacementError::NotErasure(placement.scheme));
    };
    placement.check(topology)?;
    let m = ec.data();
    let loads = placement.dc_loads(topology.dc_count());
    let pu = model.p_unavail().value();
    let mut acc = CompensatedSum::default();
    for_each_outage(topology, dc_cap, |down, weight| {
        let reachable: u32 = loads
            .iter()
            .enumerate()
            .filter(|(dc, _)| down >> dc & 1 == 0)
            .map(|(_, &count)| count as u32)
            .sum();
        let unreadable = if reachable < m {
            1.0
        } else {
            // more than reachable - m of the reachable disks unavailable
            binomial_upper_tail(reachable, reachable - m, pu)
        };
        acc.add(weight * unreadable);
    })?;
    Ok(Probability::saturating(acc.total()))
}

/// Unavailability of an object under an arbitrary recoverability rule.
///
/// `readable` receives one flag per fragment (true = reachable) and decides
/// whether the object can be served. Every outage subset and every disk
/// pattern among the reachable fragments is enumerated, so this is meant for
/// small layouts such as the 6+2+2 code or a small hybrid.
pub fn unavailability_by_enumeration(
    model: &DiskFailureModel,
    topology: &Topology,
    placement: &Placement,
    readable: impl Fn(&[bool]) -> bool,
) -> Result<Probability, PlacementError> {
    placement.check(topology)?;
    let total = placement.assignment.len();
    if total > PATTERN_FRAGMENT_CAP {
        return Err(PlacementError::TooManyFragments {
            fragments: total,
            cap: PATTERN_FRAGMENT_CAP,
        });
    }
    let pu = model.p_unavail().value();
    let mut acc = CompensatedSum::default();
    let mut flags = vec![false; total];
    for_each_outage(topology, DEFAULT_DC_CAP, |down, weight| {
        let up: Vec<usize> = (0..total)
            .filter(|&f| down >> placement.assignment[f] & 1 == 0)
            .collect();
        for pattern in 0u32..(1 << up.len()) {
            let lost = pattern.count_ones() as i32;
            let pattern_weight = pu.powi(lost) * (1.0 - pu).powi(up.len() as i32 - lost);
            if pattern_weight == 0.0 {
                continue;
            }
            flags.fill(false);
            for (bit, &f) in up.iter().enumerate() {
                flags[f] = pattern >> bit & 1 == 0;
            }
            if !readable(&flags) {
                acc.add(weight * pattern_weight);
            }
        }
    })?;
    Ok(Probability::saturating(acc.total()))
}

/// How many fixed-size fragment records fit in an in-memory catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEstimate {
    pub memory_budget: u64,
    pub record_size: u64,
    pub max_fragments: u64,
}

pub fn catalog_capacity(memory_budget: u64, record_size: u64) -> Result<CatalogEstimate, PlacementError> {
    if record_size == 0 {
        return Err(PlacementError::ZeroRecordSize);
    }
    Ok(CatalogEstimate {
        memory_budget,
        record_size,
        max_fragments: memory_budget / record_size,
    })
}
