//! Which fragments a rebuild reads, and how many of them cross data-center
//! boundaries.

use serde::{Deserialize, Serialize};

use super::lrc::Lrc;
use super::{row_span_contains, CodecError};
use crate::placement::Placement;
use crate::scheme::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSource {
    pub fragment: usize,
    pub dc: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairPlan {
    pub failed: usize,
    pub sources: Vec<RepairSource>,
    pub local_transfers: usize,
    pub remote_transfers: usize,
}

impl RepairPlan {
    fn new(placement: &Placement, failed: usize, fragments: Vec<usize>) -> Self {
        let home = placement.dc_of(failed);
        let sources: Vec<RepairSource> = fragments
            .into_iter()
            .map(|fragment| RepairSource {
                fragment,
                dc: placement.dc_of(fragment),
            })
            .collect();
        let local_transfers = sources.iter().filter(|s| s.dc == home).count();
        Self {
            failed,
            local_transfers,
            remote_transfers: sources.len() - local_transfers,
            sources,
        }
    }

    pub fn total_transfers(&self) -> usize {
        self.sources.len()
    }
}

/// Plans the rebuild of fragment `failed`, reading as few fragments from
/// other data centers as possible. Fragments listed in `unavailable` (besides
/// `failed` itself) cannot serve as sources.
pub fn repair_plan(placement: &Placement, failed: usize, unavailable: &[usize]) -> Result<RepairPlan, CodecError> {
    let total = placement.assignment().len();
    if failed >= total {
        return Err(CodecError::Unsupported(format!(
            "fragment {failed} does not exist in a {total}-fragment placement"
        )));
    }
    let home = placement.dc_of(failed);
    // survivors, same-DC ones first
    let mut survivors: Vec<usize> = (0..total)
        .filter(|&f| f != failed && !unavailable.contains(&f))
        .collect();
    survivors.sort_by_key(|&f| (placement.dc_of(f) != home, f));
    let unrepairable = || CodecError::Unrepairable { failed };

    let sources = match placement.scheme() {
        Scheme::Replication(_) => vec![*survivors.first().ok_or_else(unrepairable)?],
        Scheme::Erasure(ec) => {
            let m = ec.data() as usize;
            if survivors.len() < m {
                return Err(unrepairable());
            }
            survivors.truncate(m);
            survivors
        }
        Scheme::Hybrid(h) => {
            let width = h.inner().total() as usize;
            let m = h.inner().data() as usize;
            if let Some(&copy) = survivors.iter().find(|&&f| f % width == failed % width) {
                vec![copy]
            } else {
                // no copy left: decode from m distinct fragments, best copy of each
                let mut seen = vec![false; width];
                let mut picked = Vec::new();
                for &f in &survivors {
                    if !seen[f % width] {
                        seen[f % width] = true;
                        picked.push(f);
                    }
                }
                if picked.len() < m {
                    return Err(unrepairable());
                }
                picked.truncate(m);
                picked
            }
        }
        Scheme::Lrc => lrc_sources(placement, failed, &survivors).ok_or_else(unrepairable)?,
    };
    Ok(RepairPlan::new(placement, failed, sources))
}

/// Smallest-remote, then smallest, subset of survivors whose generator rows
/// span the failed fragment's row. At most 2^9 subsets.
fn lrc_sources(placement: &Placement, failed: usize, survivors: &[usize]) -> Option<Vec<usize>> {
    let generator = Lrc.generator();
    let home = placement.dc_of(failed);
    let mut best: Option<((usize, usize), Vec<usize>)> = None;
    for mask in 1u32..(1 << survivors.len()) {
        let subset: Vec<usize> = survivors
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &f)| f)
            .collect();
        let remote = subset.iter().filter(|&&f| placement.dc_of(f) != home).count();
        let cost = (remote, subset.len());
        if best.as_ref().is_some_and(|(b, _)| *b <= cost) {
            continue;
        }
        if row_span_contains(generator, &subset, failed) {
            best = Some((cost, subset));
        }
    }
    best.map(|(_, s)| s)
}
