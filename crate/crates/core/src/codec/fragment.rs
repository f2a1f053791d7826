//! Fragments and their on-disk encoding.
//!
//! A fragment file is little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "ECFR"
//!      4     1  version (1)
//!      5     1  scheme tag: 0 = Reed-Solomon m+n, 1 = 6+2+2 LRC
//!      6     1  m (data fragments)
//!      7     1  n (parity count; for LRC local<<4 | global)
//!      8     1  fragment index
//!      9     1  reserved, zero
//!     10    16  object id
//!     26     8  original object length
//!     34     8  payload length
//!     42     p  payload
//!   42+p     4  CRC-32 of the payload
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use super::CodecError;
use crate::scheme::{LRC_DATA, LRC_GLOBAL, LRC_LOCAL};

pub const MAGIC: &[u8; 4] = b"ECFR";
pub const FORMAT_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 42;
const TRAILER_LEN: usize = 4;

const TAG_RS: u8 = 0;
const TAG_LRC: u8 = 1;
const LRC_DESCRIPTOR: u8 = ((LRC_LOCAL as u8) << 4) | LRC_GLOBAL as u8;

/// Opaque 16-byte object identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ObjectId(pub [u8; 16]);

impl ObjectId {
    /// Deterministic identifier derived from the object bytes.
    pub fn from_content(data: &[u8]) -> Self {
        let mut id = [0u8; 16];
        for (lane, chunk) in id.chunks_mut(4).enumerate() {
            let mut h = crc32fast::Hasher::new_with_initial(0x9E37_79B9u32.wrapping_mul(lane as u32 + 1));
            h.update(&(data.len() as u64).to_le_bytes());
            h.update(data);
            chunk.copy_from_slice(&h.finalize().to_le_bytes());
        }
        Self(id)
    }
}

impl fmt::Debug for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ObjectId({self})")
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{b:02x}"))
    }
}

/// Which code produced a fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeTag {
    Rs { m: u8, n: u8 },
    Lrc,
}

impl SchemeTag {
    pub fn data_fragments(self) -> usize {
        match self {
            SchemeTag::Rs { m, .. } => m as usize,
            SchemeTag::Lrc => LRC_DATA as usize,
        }
    }

    pub fn total_fragments(self) -> usize {
        match self {
            SchemeTag::Rs { m, n } => m as usize + n as usize,
            SchemeTag::Lrc => (LRC_DATA + LRC_LOCAL + LRC_GLOBAL) as usize,
        }
    }

    fn to_bytes(self) -> [u8; 3] {
        match self {
            SchemeTag::Rs { m, n } => [TAG_RS, m, n],
            SchemeTag::Lrc => [TAG_LRC, LRC_DATA as u8, LRC_DESCRIPTOR],
        }
    }

    fn from_bytes(tag: u8, m: u8, n: u8) -> Result<Self, CodecError> {
        match (tag, m, n) {
            (TAG_RS, 1.., _) if m as usize + n as usize <= 255 => Ok(SchemeTag::Rs { m, n }),
            (TAG_LRC, m, LRC_DESCRIPTOR) if u32::from(m) == LRC_DATA => Ok(SchemeTag::Lrc),
            _ => Err(CodecError::Malformed(format!(
                "unknown scheme descriptor tag={tag} m={m} n={n}"
            ))),
        }
    }
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeTag::Rs { m, n } => write!(f, "rs:{m}+{n}"),
            SchemeTag::Lrc => write!(f, "lrc:6+2+2"),
        }
    }
}

/// What a fragment holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FragmentRole {
    Data,
    LocalParity { group: u8 },
    GlobalParity,
}

/// One stored piece of an encoded object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub object_id: ObjectId,
    pub scheme: SchemeTag,
    pub index: u8,
    pub original_len: u64,
    pub payload: Vec<u8>,
    /// CRC-32 of `payload` as recorded when the fragment was written.
    pub checksum: u32,
}

impl Fragment {
    pub fn new(object_id: ObjectId, scheme: SchemeTag, index: u8, original_len: u64, payload: Vec<u8>) -> Self {
        let checksum = crc32fast::hash(&payload);
        Self {
            object_id,
            scheme,
            index,
            original_len,
            payload,
            checksum,
        }
    }

    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }

    pub fn role(&self) -> FragmentRole {
        let i = u32::from(self.index);
        match self.scheme {
            SchemeTag::Rs { m, .. } if self.index < m => FragmentRole::Data,
            SchemeTag::Rs { .. } => FragmentRole::GlobalParity,
            SchemeTag::Lrc if i < LRC_DATA => FragmentRole::Data,
            SchemeTag::Lrc if i < LRC_DATA + LRC_LOCAL => FragmentRole::LocalParity {
                group: (i - LRC_DATA) as u8,
            },
            SchemeTag::Lrc => FragmentRole::GlobalParity,
        }
    }

    pub fn is_intact(&self) -> bool {
        crc32fast::hash(&self.payload) == self.checksum
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len() + TRAILER_LEN);
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&self.scheme.to_bytes());
        out.push(self.index);
        out.push(0);
        out.extend_from_slice(&self.object_id.0);
        out.extend_from_slice(&self.original_len.to_le_bytes());
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(&self.checksum.to_le_bytes());
        out
    }

    /// Parses a fragment file. The checksum is read, not verified; corrupt
    /// payloads surface when decoding.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let malformed = |what: &str| CodecError::Malformed(what.to_owned());
        if bytes.len() < HEADER_LEN + TRAILER_LEN {
            return Err(malformed("file shorter than fragment header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(malformed("bad magic"));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(CodecError::Malformed(format!("unsupported version {}", bytes[4])));
        }
        let scheme = SchemeTag::from_bytes(bytes[5], bytes[6], bytes[7])?;
        let index = bytes[8];
        if index as usize >= scheme.total_fragments() {
            return Err(CodecError::Malformed(format!(
                "index {index} out of range for {scheme}"
            )));
        }
        if bytes[9] != 0 {
            return Err(malformed("reserved byte is not zero"));
        }
        let object_id = ObjectId(bytes[10..26].try_into().expect("16 bytes"));
        let original_len = u64::from_le_bytes(bytes[26..34].try_into().expect("8 bytes"));
        let payload_len = u64::from_le_bytes(bytes[34..42].try_into().expect("8 bytes"));
        if payload_len != (bytes.len() - HEADER_LEN - TRAILER_LEN) as u64 {
            return Err(malformed("payload length does not match file size"));
        }
        let end = HEADER_LEN + payload_len as usize;
        let payload = bytes[HEADER_LEN..end].to_vec();
        let checksum = u32::from_le_bytes(bytes[end..].try_into().expect("4 bytes"));
        Ok(Self {
            object_id,
            scheme,
            index,
            original_len,
            payload,
            checksum,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Fragment {
        Fragment::new(
            ObjectId([7; 16]),
            SchemeTag::Rs { m: 8, n: 3 },
            9,
            1000,
            b"payload".to_vec(),
        )
    }

    #[test]
    fn layout_is_fixed() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..4], b"ECFR");
        assert_eq!(&bytes[4..10], &[1, 0, 8, 3, 9, 0]);
        assert_eq!(&bytes[10..26], &[7; 16]);
        assert_eq!(&bytes[26..34], &1000u64.to_le_bytes());
        assert_eq!(&bytes[34..42], &7u64.to_le_bytes());
        assert_eq!(&bytes[42..49], b"payload");
        assert_eq!(&bytes[49..], &crc32fast::hash(b"payload").to_le_bytes());
        // standard CRC-32 check value
        assert_eq!(crc32fast::hash(b"123456789"), 0xCBF4_3926);
    }

    #[test]
    fn lrc_descriptor() {
        let f = Fragment::new(ObjectId::default(), SchemeTag::Lrc, 7, 5, vec![1]);
        let bytes = f.to_bytes();
        assert_eq!(&bytes[5..8], &[1, 6, 0x22]);
        assert_eq!(Fragment::from_bytes(&bytes).unwrap(), f);
        assert_eq!(f.role(), FragmentRole::LocalParity { group: 1 });
    }

    #[test]
    fn roles() {
        let mk = |scheme, index| Fragment::new(ObjectId::default(), scheme, index, 1, vec![0]).role();
        assert_eq!(mk(SchemeTag::Rs { m: 2, n: 1 }, 1), FragmentRole::Data);
        assert_eq!(mk(SchemeTag::Rs { m: 2, n: 1 }, 2), FragmentRole::GlobalParity);
        assert_eq!(mk(SchemeTag::Lrc, 5), FragmentRole::Data);
        assert_eq!(mk(SchemeTag::Lrc, 6), FragmentRole::LocalParity { group: 0 });
        assert_eq!(mk(SchemeTag::Lrc, 8), FragmentRole::GlobalParity);
    }

    #[test]
    fn rejects_malformed() {
        let good = sample().to_bytes();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(Fragment::from_bytes(&bad), Err(CodecError::Malformed(_))));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(Fragment::from_bytes(&bad), Err(CodecError::Malformed(_))));
        let mut bad = good.clone();
        bad[8] = 11;
        assert!(matches!(Fragment::from_bytes(&bad), Err(CodecError::Malformed(_))));
        let mut bad = good.clone();
        bad[9] = 1;
        assert!(matches!(Fragment::from_bytes(&bad), Err(CodecError::Malformed(_))));
        assert!(Fragment::from_bytes(&good[..good.len() - 1]).is_err());
        assert!(Fragment::from_bytes(&good[..20]).is_err());
        let mut bad = good.clone();
        bad[6] = 0;
        assert!(Fragment::from_bytes(&bad).is_err());
    }

    #[test]
    fn corruption_is_detected_not_rejected_at_parse() {
        let mut bytes = sample().to_bytes();
        bytes[HEADER_LEN] ^= 1;
        let f = Fragment::from_bytes(&bytes).unwrap();
        assert!(!f.is_intact());
    }

    proptest! {
        #[test]
        fn bit_exact_round_trip(
            id in any::<[u8; 16]>(),
            m in 1u8..=20, n in 0u8..=20, idx in any::<u8>(),
            len in any::<u64>(),
            payload in proptest::collection::vec(any::<u8>(), 0..300),
        ) {
            let scheme = SchemeTag::Rs { m, n };
            let index = idx % (m + n);
            let f = Fragment::new(ObjectId(id), scheme, index, len, payload);
            let bytes = f.to_bytes();
            let back = Fragment::from_bytes(&bytes).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_bytes(), bytes);
        }
    }
}
