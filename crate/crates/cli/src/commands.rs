//! One function per subcommand.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ecplan_core::codec::{
    lrc_decode, lrc_encode, recoverability_report, rs_decode, rs_encode, Fragment, ObjectId, SchemeTag,
};
use ecplan_core::latency::LatencyProfile;
use ecplan_core::placement::{Placement, Topology};
use ecplan_core::prob::{parity_needed_with_cap, prob_loss_ec, prob_loss_replication, replicas_needed};
use ecplan_core::sim::{simulate, simulate_with_threads, LatencyMode, Scenario, SimulationConfig, SimulationResult};
use ecplan_core::{DiskFailureModel, ErasureScheme, Probability, ReplicationScheme, Scheme};
use serde::{Deserialize, Serialize};

use crate::args::{
    Axis, CodecCommand, CompareArgs, CurveArgs, GlobalOpts, LatencyKind, PlanArgs, PlanMode, SimScenario, SimulateArgs,
};
use crate::compare::{comparison, ComparisonRow, Setting};
use crate::error::{CliError, Failure};
use crate::output::{emit, format_significant};

/// Bound on `|z|` that `--check` accepts.
const CHECK_Z: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutput {
    pub scheme: String,
    /// Replica count (replication mode).
    pub k: Option<u32>,
    pub m: Option<u32>,
    /// Parity count (ec mode).
    pub n: Option<u32>,
    pub loss: f64,
    pub redundancy_factor: f64,
}

pub fn plan(global: &GlobalOpts, args: &PlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let epsilon = Probability::new(args.epsilon)?;
    let p = Probability::new(args.p)?;
    let result = match args.mode {
        PlanMode::Replication => {
            let k = replicas_needed(epsilon, p)?;
            let scheme = ReplicationScheme::new(k)?;
            PlanOutput {
                scheme: Scheme::Replication(scheme).to_string(),
                k: Some(k),
                m: None,
                n: None,
                loss: prob_loss_replication(&DiskFailureModel::new(args.p, args.p)?, scheme).value(),
                redundancy_factor: Scheme::Replication(scheme).redundancy_factor(),
            }
        }
        PlanMode::Ec => {
            let m = args.m.expect("clap requires --m in ec mode");
            let n = parity_needed_with_cap(epsilon, p, m, args.cap)?;
            let scheme = ErasureScheme::new(m, n)?;
            PlanOutput {
                scheme: Scheme::Erasure(scheme).to_string(),
                k: None,
                m: Some(m),
                n: Some(n),
                loss: prob_loss_ec(p, scheme).value(),
                redundancy_factor: scheme.redundancy_factor(),
            }
        }
    };
    emit(out, global.format, global.precision, &result, &[])
}

fn space_notes(rows: &[ComparisonRow], precision: u8) -> Vec<String> {
    let Some((first, rest)) = rows.split_first() else {
        return Vec::new();
    };
    rest.iter()
        .filter(|r| r.scheme != first.scheme)
        .map(|r| {
            format!(
                "{} uses {}% of the disk space of {}",
                r.scheme,
                format_significant(r.relative_space * 100.0, precision),
                first.scheme
            )
        })
        .collect()
}

pub fn compare(global: &GlobalOpts, args: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.schemes.len() < 2 {
        return Err(CliError::usage("compare needs at least two schemes"));
    }
    let setting = Setting::from_args(&args.scenario)?;
    let rows = comparison(&args.schemes, &setting)?;
    let notes = space_notes(&rows, global.precision);
    emit(out, global.format, global.precision, &rows, &notes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub scenario: String,
    pub seed: u64,
    #[serde(flatten)]
    pub result: SimulationResult,
}

fn scenario_label(scenario: &Scenario) -> String {
    match scenario {
        Scenario::Loss { p, scheme } => format!("loss ec:{}+{} p={}", scheme.data(), scheme.parity(), p),
        Scenario::Availability {
            model,
            topology,
            placement,
        } => format!(
            "availability {} dcs={} p_unavail={}",
            placement.scheme(),
            topology.dc_count(),
            model.p_unavail()
        ),
        Scenario::Latency { p, mode, .. } => match mode {
            LatencyMode::Replication => format!("latency replication p={p}"),
            LatencyMode::Erasure { m } => format!("latency ec m={m} p={p}"),
        },
    }
}

pub fn simulation_config(args: &SimulateArgs, seed: u64) -> Result<SimulationConfig, CliError> {
    let scenario = match &args.scenario {
        SimScenario::Loss { p, m, n } => Scenario::Loss {
            p: Probability::new(*p)?,
            scheme: ErasureScheme::new(*m, *n)?,
        },
        SimScenario::Availability {
            scheme,
            dcs,
            q,
            p_unavail,
        } => Scenario::Availability {
            model: DiskFailureModel::new(0.0, *p_unavail)?,
            topology: Topology::uniform(*dcs, Probability::new(*q)?)?,
            placement: Placement::spread(*scheme, *dcs)?,
        },
        SimScenario::Latency { mode, p, latency, m } => Scenario::Latency {
            profile: LatencyProfile::new(latency.clone())?,
            p: Probability::new(*p)?,
            mode: match mode {
                LatencyKind::Replication => LatencyMode::Replication,
                LatencyKind::Ec => LatencyMode::Erasure {
                    m: m.expect("clap requires --m in ec mode"),
                },
            },
        },
    };
    Ok(SimulationConfig {
        trials: args.trials,
        seed,
        scenario,
    })
}

pub fn simulate_cmd(global: &GlobalOpts, args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = simulation_config(args, global.seed)?;
    let result = match global.threads {
        Some(threads) => simulate_with_threads(&config, threads as usize)?,
        None => simulate(&config)?,
    };
    let output = SimulationOutput {
        scenario: scenario_label(&config.scenario),
        seed: config.seed,
        result,
    };
    emit(out, global.format, global.precision, &output, &[])?;
    if global.check {
        let r = &output.result;
        match (r.analytic, r.z_score) {
            (None, _) => eprintln!("warning: no analytic value to check against"),
            (Some(_), Some(z)) if z.abs() <= CHECK_Z => {}
            (Some(a), z) => {
                return Err(CliError::new(
                    Failure::Solver,
                    anyhow::anyhow!(
                        "estimate {} disagrees with analytic {a} (z = {})",
                        r.point_estimate,
                        z.map_or("undefined".to_owned(), |z| z.to_string())
                    ),
                ))
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentEntry {
    pub index: u8,
    pub role: String,
    pub path: String,
    pub payload_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutput {
    pub output: String,
    pub object_id: String,
    pub scheme: String,
    pub bytes: usize,
    pub fragments_read: usize,
    pub fragments_corrupt: usize,
}

fn codec_tag(scheme: &Scheme) -> Result<(usize, usize, bool), CliError> {
    match scheme {
        Scheme::Replication(r) => Ok((1, r.copies() as usize - 1, false)),
        Scheme::Erasure(e) => Ok((e.data() as usize, e.parity() as usize, false)),
        Scheme::Lrc => Ok((0, 0, true)),
        Scheme::Hybrid(_) => Err(CliError::usage("the codec handles rs:M+N, rep:K and lrc-6-2-2")),
    }
}

fn fragment_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut inside: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(|e| CliError::new(Failure::Io, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            inside.sort();
            files.extend(inside);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| CliError::new(Failure::Io, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(|e| CliError::new(Failure::Io, e))
}

pub fn codec(global: &GlobalOpts, command: &CodecCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        CodecCommand::Encode { input, out_dir, scheme } => {
            let (m, n, lrc) = codec_tag(scheme)?;
            let data = read_file(input)?;
            let id = ObjectId::from_content(&data);
            let fragments = if lrc {
                lrc_encode(id, &data)?
            } else {
                rs_encode(id, &data, m, n)?
            };
            fs::create_dir_all(out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))
                .map_err(|e| CliError::new(Failure::Io, e))?;
            let stem = input.file_name().map_or("object".into(), |s| s.to_string_lossy());
            let mut entries = Vec::new();
            for fragment in &fragments {
                let path = out_dir.join(format!("{stem}.{:03}.frag", fragment.index));
                write_file(&path, &fragment.to_bytes())?;
                entries.push(FragmentEntry {
                    index: fragment.index,
                    role: format!("{:?}", fragment.role()),
                    path: path.display().to_string(),
                    payload_len: fragment.payload_len(),
                });
            }
            emit(out, global.format, global.precision, &entries, &[])
        }
        CodecCommand::Decode { fragments, output } => {
            let mut parsed = Vec::new();
            for path in fragment_files(fragments)? {
                let bytes = read_file(&path)?;
                let fragment = Fragment::from_bytes(&bytes)
                    .map_err(|e| CliError::from(e).with_context(format!("parsing {}", path.display())))?;
                parsed.push(fragment);
            }
            let first = parsed
                .first()
                .ok_or_else(|| CliError::usage("no fragment files found"))?;
            let corrupt = parsed.iter().filter(|f| !f.is_intact()).count();
            for f in parsed.iter().filter(|f| !f.is_intact()) {
                eprintln!("warning: fragment {} failed its checksum and is ignored", f.index);
            }
            let data = match first.scheme {
                SchemeTag::Rs { m, n } => rs_decode(&parsed, m as usize, n as usize)?,
                SchemeTag::Lrc => lrc_decode(&parsed)?,
            };
            write_file(output, &data)?;
            let result = DecodeOutput {
                output: output.display().to_string(),
                object_id: first.object_id.to_string(),
                scheme: first.scheme.to_string(),
                bytes: data.len(),
                fragments_read: parsed.len(),
                fragments_corrupt: corrupt,
            };
            emit(out, global.format, global.precision, &result, &[])
        }
        CodecCommand::Report { scheme, max_t } => {
            let report = recoverability_report(scheme, *max_t)?;
            emit(out, global.format, global.precision, &report.rows, &[])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    #[serde(flatten)]
    pub row: ComparisonRow,
}

fn sweep_points(args: &CurveArgs) -> Result<Vec<f64>, CliError> {
    if let Some(values) = &args.values {
        return Ok(values.clone());
    }
    let range = args.range.as_deref().expect("clap requires --values or --range");
    let bad = || CliError::usage(format!("bad --range {range:?}"));
    let parts: Vec<&str> = range.split(':').collect();
    match (args.axis, parts.as_slice()) {
        (Axis::M | Axis::N | Axis::Scale, [lo, hi]) => {
            let lo: u32 = lo.parse().map_err(|_| bad())?;
            let hi: u32 = hi.parse().map_err(|_| bad())?;
            Ok((lo..=hi).map(f64::from).collect())
        }
        (Axis::P | Axis::Q, [lo, hi, count]) => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let count: usize = count.parse().map_err(|_| bad())?;
            if !(lo > 0.0 && hi >= lo && count >= 1) {
                return Err(bad());
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            let step = (hi / lo).ln() / (count - 1) as f64;
            Ok((0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        lo * (step * i as f64).exp()
                    }
                })
                .collect())
        }
        _ => Err(bad()),
    }
}

fn integer_point(x: f64) -> Result<u32, CliError> {
    if x >= 0.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX) {
        Ok(x as u32)
    } else {
        Err(CliError::usage(format!("{x} is not a valid integer sweep point")))
    }
}

fn swept_scheme(scheme: &Scheme, axis: Axis, x: f64) -> Result<Scheme, CliError> {
    let ec = match (axis, scheme) {
        (Axis::P | Axis::Q, _) => return Ok(*scheme),
        (_, Scheme::Erasure(ec)) => *ec,
        _ => {
            return Err(CliError::usage(format!(
                "axis {axis:?} applies to ec:M+N schemes, not {scheme}"
            )))
        }
    };
    let x = integer_point(x)?;
    let swept = match axis {
        Axis::M => ErasureScheme::new(x, ec.parity())?,
        Axis::N => ErasureScheme::new(ec.data(), x)?,
        _ => {
            if x == 0 {
                return Err(CliError::usage("scale must be at least 1"));
            }
            ec.scaled(x)
        }
    };
    Ok(Scheme::Erasure(swept))
}

pub fn curve(global: &GlobalOpts, args: &CurveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for x in sweep_points(args)? {
        let mut scenario = args.scenario.clone();
        match args.axis {
            Axis::P => scenario.p = x,
            Axis::Q => scenario.q = x,
            _ => {}
        }
        let setting = Setting::from_args(&scenario)?;
        let schemes = args
            .schemes
            .iter()
            .map(|s| swept_scheme(s, args.axis, x))
            .collect::<Result<Vec<_>, _>>()?;
        rows.extend(
            comparison(&schemes, &setting)?
                .into_iter()
                .map(|row| CurveRow { x, row }),
        );
    }
    emit(out, global.format, global.precision, &rows, &[])
}
