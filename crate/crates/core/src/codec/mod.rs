//! Systematic erasure codes over GF(256).
//!
//! Both codes here are linear: fragment `i` is row `i` of a generator matrix
//! applied to the `k` equal-sized data shards of the zero-padded object.
//! The first `k` rows are the identity, so data fragments hold the object
//! verbatim.

use std::collections::BTreeMap;

use thiserror::Error;

pub mod fragment;
pub mod gf256;
pub mod lrc;
pub mod matrix;
pub mod repair;
pub mod report;
pub mod rs;

pub use fragment::{Fragment, FragmentRole, ObjectId, SchemeTag};
pub use lrc::{lrc_decode, lrc_encode, lrc_recoverable, Lrc};
pub use repair::{repair_plan, RepairPlan, RepairSource};
pub use report::{recoverability_report, RecoverabilityReport, RecoverabilityRow};
pub use rs::{rs_decode, rs_encode, ReedSolomon};

use gf256::mul_add_slice;
use matrix::{independent_rows, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("cannot encode an empty object")]
    EmptyObject,
    #[error("{0} fragments exceed the GF(256) limit of 255")]
    TooManyFragments(usize),
    #[error("a code needs at least one data fragment")]
    NoDataFragments,
    #[error("need {needed} independent fragments to decode, only {available} usable")]
    InsufficientFragments { needed: usize, available: usize },
    #[error("fragment {index} failed its checksum")]
    ChecksumMismatch { index: u8 },
    #[error("fragment payload lengths are inconsistent")]
    InconsistentLengths,
    #[error("fragments do not belong together: {0}")]
    MismatchedFragments(String),
    #[error("malformed fragment: {0}")]
    Malformed(String),
    #[error("fragment {failed} cannot be rebuilt from the surviving fragments")]
    Unrepairable { failed: usize },
    #[error("{0}")]
    Unsupported(String),
}

/// A systematic linear code given by its generator matrix.
#[derive(Debug, Clone)]
pub(crate) struct LinearCode {
    tag: SchemeTag,
    generator: Matrix,
}

impl LinearCode {
    pub(crate) fn new(tag: SchemeTag, generator: Matrix) -> Self {
        debug_assert_eq!(generator.rows(), tag.total_fragments());
        debug_assert_eq!(generator.cols(), tag.data_fragments());
        Self { tag, generator }
    }

    pub(crate) fn generator(&self) -> &Matrix {
        &self.generator
    }

    fn k(&self) -> usize {
        self.generator.cols()
    }

    pub(crate) fn encode(&self, object_id: ObjectId, object: &[u8]) -> Result<Vec<Fragment>, CodecError> {
        if object.is_empty() {
            return Err(CodecError::EmptyObject);
        }
        let k = self.k();
        let shard_len = object.len().div_ceil(k);
        let mut shards: Vec<Vec<u8>> = object.chunks(shard_len).map(<[u8]>::to_vec).collect();
        shards.resize_with(k, Vec::new);
        for shard in &mut shards {
            shard.resize(shard_len, 0);
        }
        let original_len = object.len() as u64;
        let fragments = (0..self.generator.rows())
            .map(|r| {
                let payload = if r < k {
                    shards[r].clone()
                } else {
                    let mut out = vec![0u8; shard_len];
                    for (j, shard) in shards.iter().enumerate() {
                        mul_add_slice(&mut out, shard, self.generator[(r, j)]);
                    }
                    out
                };
                Fragment::new(object_id, self.tag, r as u8, original_len, payload)
            })
            .collect();
        Ok(fragments)
    }

    /// Reconstructs the object from any fragments whose generator rows span
    /// the data. Corrupt fragments are dropped as erasures; the checksum error
    /// is reported only when their loss leaves too little to decode.
    pub(crate) fn decode(&self, fragments: &[Fragment]) -> Result<Vec<u8>, CodecError> {
        let k = self.k();
        let Some(first) = fragments.first() else {
            return Err(CodecError::InsufficientFragments {
                needed: k,
                available: 0,
            });
        };
        for f in fragments {
            if f.scheme != self.tag {
                return Err(CodecError::MismatchedFragments(format!(
                    "fragment {} is {}, expected {}",
                    f.index, f.scheme, self.tag
                )));
            }
            if f.object_id != first.object_id || f.original_len != first.original_len {
                return Err(CodecError::MismatchedFragments(format!(
                    "fragment {} belongs to a different object",
                    f.index
                )));
            }
            if f.index as usize >= self.generator.rows() {
                return Err(CodecError::MismatchedFragments(format!(
                    "index {} out of range",
                    f.index
                )));
            }
        }

        let mut corrupt = None;
        let mut usable: BTreeMap<usize, &[u8]> = BTreeMap::new();
        for f in fragments {
            if !f.is_intact() {
                corrupt.get_or_insert(f.index);
                continue;
            }
            usable.entry(f.index as usize).or_insert(&f.payload);
        }

        let original_len = first.original_len as usize;
        let shard_len = original_len.div_ceil(k);
        if usable.values().any(|p| p.len() != shard_len) {
            return Err(CodecError::InconsistentLengths);
        }

        let rows = independent_rows(&self.generator, usable.keys().copied());
        if rows.len() < k {
            return Err(match corrupt {
                Some(index) => CodecError::ChecksumMismatch { index },
                None => CodecError::InsufficientFragments {
                    needed: k,
                    available: rows.len(),
                },
            });
        }

        let mut object = Vec::with_capacity(shard_len * k);
        if rows.iter().enumerate().all(|(i, &r)| i == r) {
            for r in &rows {
                object.extend_from_slice(usable[r]);
            }
        } else {
            let decoder = self
                .generator
                .select_rows(&rows)
                .inverse()
                .expect("independent rows form an invertible matrix");
            for j in 0..k {
                if let Some(data) = usable.get(&j) {
                    object.extend_from_slice(data);
                    continue;
                }
                let mut shard = vec![0u8; shard_len];
                for (i, r) in rows.iter().enumerate() {
                    mul_add_slice(&mut shard, usable[r], decoder[(j, i)]);
                }
                object.extend_from_slice(&shard);
            }
        }
        object.truncate(original_len);
        Ok(object)
    }

    /// True when the rows outside `failed` span the full data space.
    pub(crate) fn survives(&self, failed: &[usize]) -> bool {
        let survivors = (0..self.generator.rows()).filter(|r| !failed.contains(r));
        independent_rows(&self.generator, survivors).len() == self.k()
    }
}

/// True when row `target` lies in the span of the `sources` rows.
pub(crate) fn row_span_contains(generator: &Matrix, sources: &[usize], target: usize) -> bool {
    let base = generator.select_rows(sources).rank();
    let mut with = sources.to_vec();
    with.push(target);
    generator.select_rows(&with).rank() == base
}
