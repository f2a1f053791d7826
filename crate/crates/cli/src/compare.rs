//! Comparison rows: every column comes straight from a core operation.

use ecplan_core::codec::{recoverability_report, repair_plan};
use ecplan_core::latency::{
    approx_latency_ec, approx_latency_replication, expected_latency_ec, expected_latency_replication,
    expected_latency_replication_conditional, LatencyProfile,
};
use ecplan_core::placement::{Placement, Topology};
use ecplan_core::prob::{prob_any_failure, prob_loss_ec, prob_loss_hybrid, prob_loss_replication};
use ecplan_core::sim::analytic_unavailability;
use ecplan_core::{DiskFailureModel, Probability, Scheme};
use serde::{Deserialize, Serialize};

use crate::args::ScenarioArgs;
use crate::error::CliError;

/// Column order here is the column order of every output format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub scheme: String,
    /// Storage multiplier k_c.
    pub redundancy_factor: f64,
    /// Space relative to the first scheme in the list.
    pub relative_space: f64,
    pub loss: f64,
    /// Whether `loss` is at most the requested epsilon.
    pub meets_target: Option<bool>,
    /// Unreadable probability with the given data-center outages.
    pub unavailability: Option<f64>,
    /// Probability that at least one of the scheme's disks fails.
    pub any_failure: f64,
    pub latency: Option<f64>,
    pub latency_approx: Option<f64>,
    /// Fragments read from other data centers to rebuild fragment 0.
    pub repair_remote: Option<usize>,
    pub repair_total: Option<usize>,
}

/// Validated model inputs shared by every row.
pub struct Setting {
    pub p: Probability,
    pub epsilon: Option<Probability>,
    pub model: DiskFailureModel,
    pub topology: Topology,
    pub dcs: usize,
    pub latency: Option<LatencyProfile>,
    pub conditional: bool,
}

impl Setting {
    pub fn from_args(args: &ScenarioArgs) -> Result<Self, CliError> {
        let p = Probability::new(args.p)?;
        let model = DiskFailureModel::new(args.p, args.p_unavail.unwrap_or(args.p))?;
        Ok(Self {
            p,
            epsilon: args.epsilon.map(Probability::new).transpose()?,
            model,
            topology: Topology::uniform(args.dcs, Probability::new(args.q)?)?,
            dcs: args.dcs,
            latency: args.latency.clone().map(LatencyProfile::new).transpose()?,
            conditional: args.conditional,
        })
    }
}

pub fn loss(scheme: &Scheme, p: Probability) -> Result<Probability, CliError> {
    Ok(match scheme {
        Scheme::Replication(r) => prob_loss_replication(&DiskFailureModel::new(p.value(), p.value())?, *r),
        Scheme::Erasure(e) => prob_loss_ec(p, *e),
        Scheme::Hybrid(h) => prob_loss_hybrid(p, *h),
        Scheme::Lrc => {
            let total = scheme.fragment_count() as usize;
            recoverability_report(scheme, total)?
                .loss_probability(p)
                .expect("complete report")
        }
    })
}

fn latencies(scheme: &Scheme, setting: &Setting) -> (Option<f64>, Option<f64>) {
    let Some(profile) = &setting.latency else {
        return (None, None);
    };
    let p = setting.p;
    let (l1, l2) = (profile.nearest(), profile.second());
    match scheme {
        Scheme::Replication(r) => {
            let sites = profile.truncated(r.copies() as usize);
            let exact = if setting.conditional {
                expected_latency_replication_conditional(&sites, p)
            } else {
                Some(expected_latency_replication(&sites, p))
            };
            (exact, Some(approx_latency_replication(l1, l2, p)))
        }
        Scheme::Erasure(_) | Scheme::Lrc => {
            let m = scheme.data_fragments();
            (
                Some(expected_latency_ec(l1, l2, p, m)),
                Some(approx_latency_ec(l1, l2, p, m)),
            )
        }
        Scheme::Hybrid(_) => (None, None),
    }
}

pub fn comparison_row(scheme: &Scheme, baseline: &Scheme, setting: &Setting) -> Result<ComparisonRow, CliError> {
    let loss = loss(scheme, setting.p)?;
    let placement = Placement::spread(*scheme, setting.dcs)?;
    let unavailability = analytic_unavailability(&setting.model, &setting.topology, &placement)?;
    let repair = repair_plan(&placement, 0, &[]).ok();
    let (latency, latency_approx) = latencies(scheme, setting);
    Ok(ComparisonRow {
        scheme: scheme.to_string(),
        redundancy_factor: scheme.redundancy_factor(),
        relative_space: scheme.relative_space(baseline),
        loss: loss.value(),
        meets_target: setting.epsilon.map(|eps| loss <= eps),
        unavailability: unavailability.map(Probability::value),
        any_failure: prob_any_failure(setting.p, scheme.fragment_count()).value(),
        latency,
        latency_approx,
        repair_remote: repair.as_ref().map(|r| r.remote_transfers),
        repair_total: repair.as_ref().map(|r| r.total_transfers()),
    })
}

pub fn comparison(schemes: &[Scheme], setting: &Setting) -> Result<Vec<ComparisonRow>, CliError> {
    let baseline = schemes.first().ok_or_else(|| CliError::usage("no schemes given"))?;
    schemes.iter().map(|s| comparison_row(s, baseline, setting)).collect()
}
