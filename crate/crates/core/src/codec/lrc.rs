//! The 6+2+2 local reconstruction code.
//!
//! Fragment indices: 0..6 data (group 0 is 0..3, group 1 is 3..6), 6 and 7
//! the XOR parities of groups 0 and 1, 8 and 9 the global parities
//! `sum c_j d_j` and `sum c_j^2 d_j` with `c_j = 2^j`.
//!
//! With these coefficients the code is maximally recoverable: every pattern
//! the group structure allows to be decoded is decoded. The conditions are
//! that the `c_j` are distinct and nonzero and that a pair sum from one group
//! never equals a pair sum from the other; powers of two have disjoint bit
//! patterns so all three hold.

use std::sync::LazyLock;

use super::gf256::Gf256;
use super::matrix::Matrix;
use super::{CodecError, Fragment, LinearCode, ObjectId, SchemeTag};
use crate::scheme::{LRC_DATA, LRC_LOCAL, LRC_TOTAL};

const DATA: usize = LRC_DATA as usize;
const GROUPS: usize = LRC_LOCAL as usize;
const GROUP_SIZE: usize = DATA / GROUPS;
const TOTAL: usize = LRC_TOTAL as usize;

static CODE: LazyLock<LinearCode> = LazyLock::new(|| {
    let mut g = Matrix::zeros(TOTAL, DATA);
    for j in 0..DATA {
        g[(j, j)] = Gf256::ONE;
        g[(DATA + j / GROUP_SIZE, j)] = Gf256::ONE;
        let c = Gf256::GENERATOR.pow(j as u32);
        g[(DATA + GROUPS, j)] = c;
        g[(DATA + GROUPS + 1, j)] = c * c;
    }
    LinearCode::new(SchemeTag::Lrc, g)
});

/// Handle to the fixed 6+2+2 code.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lrc;

impl Lrc {
    pub fn generator(&self) -> &'static Matrix {
        CODE.generator()
    }

    /// Local group of a data or local-parity fragment; `None` for globals.
    pub fn group_of(index: usize) -> Option<usize> {
        match index {
            i if i < DATA => Some(i / GROUP_SIZE),
            i if i < DATA + GROUPS => Some(i - DATA),
            _ => None,
        }
    }

    /// The other members of a fragment's local group.
    pub fn group_members(group: usize) -> Vec<usize> {
        let mut members: Vec<usize> = (group * GROUP_SIZE..(group + 1) * GROUP_SIZE).collect();
        members.push(DATA + group);
        members
    }

    pub fn encode(&self, object_id: ObjectId, object: &[u8]) -> Result<Vec<Fragment>, CodecError> {
        CODE.encode(object_id, object)
    }

    pub fn decode(&self, fragments: &[Fragment]) -> Result<Vec<u8>, CodecError> {
        CODE.decode(fragments)
    }
}

pub fn lrc_encode(object_id: ObjectId, object: &[u8]) -> Result<Vec<Fragment>, CodecError> {
    Lrc.encode(object_id, object)
}

pub fn lrc_decode(fragments: &[Fragment]) -> Result<Vec<u8>, CodecError> {
    Lrc.decode(fragments)
}

/// Whether the object survives losing the fragments in `failed`: the
/// remaining generator rows must have full rank.
pub fn lrc_recoverable(failed: &[usize]) -> bool {
    CODE.survives(failed)
}
