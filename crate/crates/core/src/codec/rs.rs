//! Systematic Reed-Solomon erasure code with a Cauchy parity block.
//!
//! Parity row `i` over data column `j` starts as `1 / (x_i + y_j)` with
//! `x_i = m + i`, `y_j = j`. Every square submatrix of a Cauchy matrix is
//! nonsingular, and scaling rows or columns by nonzero constants keeps it
//! that way, so any `m` of the `m+n` fragments decode. The block is scaled
//! so its first row and first column are all ones: the first parity is the
//! XOR of the data, and with `m = 1` every parity is a plain copy.

use super::gf256::Gf256;
use super::matrix::Matrix;
use super::{CodecError, Fragment, LinearCode, ObjectId, SchemeTag};

/// Field-size bound on `m + n`.
pub const MAX_FRAGMENTS: usize = 255;

#[derive(Debug, Clone)]
pub struct ReedSolomon {
    m: usize,
    n: usize,
    code: LinearCode,
}

impl ReedSolomon {
    pub fn new(m: usize, n: usize) -> Result<Self, CodecError> {
        if m == 0 {
            return Err(CodecError::NoDataFragments);
        }
        if m + n > MAX_FRAGMENTS {
            return Err(CodecError::TooManyFragments(m + n));
        }
        let mut generator = Matrix::zeros(m + n, m);
        for j in 0..m {
            generator[(j, j)] = Gf256::ONE;
        }
        let cauchy = |i: usize, j: usize| {
            (Gf256((m + i) as u8) + Gf256(j as u8))
                .inverse()
                .expect("x_i and y_j are distinct")
        };
        for i in 0..n {
            for j in 0..m {
                // column j scaled by 1/c(0,j), row i by c(0,0)/c(i,0)
                generator[(m + i, j)] = cauchy(i, j) * cauchy(0, 0) / (cauchy(0, j) * cauchy(i, 0));
            }
        }
        Ok(Self {
            m,
            n,
            code: LinearCode::new(SchemeTag::Rs { m: m as u8, n: n as u8 }, generator),
        })
    }

    pub fn data_fragments(&self) -> usize {
        self.m
    }

    pub fn parity_fragments(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> &Matrix {
        self.code.generator()
    }

    pub fn encode(&self, object_id: ObjectId, object: &[u8]) -> Result<Vec<Fragment>, CodecError> {
        self.code.encode(object_id, object)
    }

    pub fn decode(&self, fragments: &[Fragment]) -> Result<Vec<u8>, CodecError> {
        self.code.decode(fragments)
    }
}

/// Splits `object` into `m` data fragments plus `n` parity fragments.
pub fn rs_encode(object_id: ObjectId, object: &[u8], m: usize, n: usize) -> Result<Vec<Fragment>, CodecError> {
    ReedSolomon::new(m, n)?.encode(object_id, object)
}

/// Recovers the object from any `m` intact fragments of an `m+n` encoding.
pub fn rs_decode(fragments: &[Fragment], m: usize, n: usize) -> Result<Vec<u8>, CodecError> {
    ReedSolomon::new(m, n)?.decode(fragments)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn object(len: usize, seed: u32) -> Vec<u8> {
        (0..len as u32)
            .map(|i| (i.wrapping_mul(2_654_435_761).wrapping_add(seed) >> 13) as u8)
            .collect()
    }

    fn subsets(total: usize, size: usize) -> Vec<Vec<usize>> {
        (0u32..1 << total)
            .filter(|mask| mask.count_ones() as usize == size)
            .map(|mask| (0..total).filter(|i| mask >> i & 1 == 1).collect())
            .collect()
    }

    #[test]
    fn every_square_submatrix_of_generator_is_invertible() {
        let rs = ReedSolomon::new(5, 4).unwrap();
        for rows in subsets(9, 5) {
            assert!(rs.generator().select_rows(&rows).inverse().is_some(), "{rows:?}");
        }
    }

    #[test]
    fn first_parity_is_xor() {
        let data = object(64, 3);
        let frags = rs_encode(ObjectId::default(), &data, 4, 2).unwrap();
        let mut xor = vec![0u8; 16];
        for f in &frags[..4] {
            xor.iter_mut().zip(&f.payload).for_each(|(x, y)| *x ^= y);
        }
        assert_eq!(frags[4].payload, xor);
    }

    #[test]
    fn eight_plus_three_all_subsets() {
        let data = object(1000, 11);
        let frags = rs_encode(ObjectId([1; 16]), &data, 8, 3).unwrap();
        assert_eq!(frags.len(), 11);
        assert!(frags.iter().all(|f| f.payload_len() == 125));
        let all = subsets(11, 8);
        assert_eq!(all.len(), 165);
        for subset in all {
            let picked: Vec<Fragment> = subset.iter().map(|&i| frags[i].clone()).collect();
            assert_eq!(rs_decode(&picked, 8, 3).unwrap(), data, "{subset:?}");
        }
    }

    #[test]
    fn scaled_sizing() {
        let data = object(8 << 20, 5);
        let frags = rs_encode(ObjectId::default(), &data, 8, 3).unwrap();
        assert!(frags.iter().all(|f| f.payload_len() == 1 << 20));
        let stored: usize = frags.iter().map(Fragment::payload_len).sum();
        assert_eq!(stored as f64 / data.len() as f64, 1.375);
    }

    #[test]
    fn replication_special_case() {
        let data = object(77, 9);
        let frags = rs_encode(ObjectId::default(), &data, 1, 3).unwrap();
        assert_eq!(frags.len(), 4);
        for f in &frags {
            assert_eq!(f.payload, data);
        }
        assert_eq!(rs_decode(&frags[3..], 1, 3).unwrap(), data);
    }

    #[test]
    fn no_parity_is_a_split() {
        let data = object(30, 1);
        let frags = rs_encode(ObjectId::default(), &data, 3, 0).unwrap();
        assert_eq!(frags.concat_payloads(), data);
        assert_eq!(rs_decode(&frags, 3, 0).unwrap(), data);
    }

    trait Concat {
        fn concat_payloads(&self) -> Vec<u8>;
    }

    impl Concat for Vec<Fragment> {
        fn concat_payloads(&self) -> Vec<u8> {
            self.iter().flat_map(|f| f.payload.clone()).collect()
        }
    }

    #[test]
    fn errors() {
        assert_eq!(rs_encode(ObjectId::default(), &[], 4, 2), Err(CodecError::EmptyObject));
        assert_eq!(
            rs_encode(ObjectId::default(), &[1], 200, 56).unwrap_err(),
            CodecError::TooManyFragments(256)
        );
        assert!(ReedSolomon::new(200, 55).is_ok());
        assert!(ReedSolomon::new(0, 3).is_err());

        let data = object(100, 2);
        let frags = rs_encode(ObjectId::default(), &data, 4, 2).unwrap();
        assert_eq!(
            rs_decode(&frags[..3], 4, 2),
            Err(CodecError::InsufficientFragments {
                needed: 4,
                available: 3
            })
        );
        assert_eq!(
            rs_decode(&[], 4, 2),
            Err(CodecError::InsufficientFragments {
                needed: 4,
                available: 0
            })
        );
        // duplicates do not count twice
        let dup = vec![frags[0].clone(), frags[0].clone(), frags[1].clone(), frags[2].clone()];
        assert!(matches!(
            rs_decode(&dup, 4, 2),
            Err(CodecError::InsufficientFragments { .. })
        ));

        let mut short = frags.clone();
        short[5].payload.pop();
        short[5].checksum = crc32fast::hash(&short[5].payload);
        assert_eq!(rs_decode(&short, 4, 2), Err(CodecError::InconsistentLengths));

        assert!(matches!(
            rs_decode(&frags, 3, 3),
            Err(CodecError::MismatchedFragments(_))
        ));
        let mut foreign = frags.clone();
        foreign[1].object_id = ObjectId([9; 16]);
        assert!(matches!(
            rs_decode(&foreign, 4, 2),
            Err(CodecError::MismatchedFragments(_))
        ));
    }

    #[test]
    fn corruption_becomes_erasure() {
        let data = object(100, 2);
        let mut frags = rs_encode(ObjectId::default(), &data, 4, 2).unwrap();
        frags[1].payload[0] ^= 0xFF;
        // five intact fragments remain: still decodable
        assert_eq!(rs_decode(&frags, 4, 2).unwrap(), data);
        // with only four supplied, the corrupt one is named
        assert_eq!(
            rs_decode(&frags[..4], 4, 2),
            Err(CodecError::ChecksumMismatch { index: 1 })
        );
    }
}
