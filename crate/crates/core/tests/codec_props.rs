use ecplan_core::codec::{
    lrc_decode, lrc_encode, lrc_recoverable, rs_decode, rs_encode, CodecError, Fragment, ObjectId,
};
use proptest::prelude::*;

fn subset_masks(total: usize, size: usize) -> impl Iterator<Item = u32> {
    (0u32..1 << total).filter(move |m| m.count_ones() as usize == size)
}

fn pick(fragments: &[Fragment], mask: u32) -> Vec<Fragment> {
    fragments
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, f)| f.clone())
        .collect()
}

#[test]
fn lrc_rank_test_agrees_with_decoding() {
    let data: Vec<u8> = (0..997u32).map(|i| (i * 7919 % 251) as u8).collect();
    let fragments = lrc_encode(ObjectId::from_content(&data), &data).unwrap();
    let mut checked = 0;
    for t in 0..=4 {
        for mask in subset_masks(10, t) {
            let failed: Vec<usize> = (0..10).filter(|i| mask >> i & 1 == 1).collect();
            let survivors = pick(&fragments, !mask & 0x3FF);
            let decoded = lrc_decode(&survivors);
            assert_eq!(lrc_recoverable(&failed), decoded.is_ok(), "{failed:?}");
            if let Ok(bytes) = decoded {
                assert_eq!(bytes, data);
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1 + 10 + 45 + 120 + 210);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rs_round_trip_from_sampled_subsets(
        m in 1usize..=10,
        n in 0usize..=6,
        data in proptest::collection::vec(any::<u8>(), 1..=4096),
        seeds in proptest::collection::vec(any::<u32>(), 8),
    ) {
        let fragments = rs_encode(ObjectId::from_content(&data), &data, m, n).unwrap();
        prop_assert_eq!(fragments.len(), m + n);
        let len = fragments[0].payload_len();
        prop_assert!(fragments.iter().all(|f| f.payload_len() == len));
        for seed in seeds {
            // a pseudo-random m-subset: rotate the index list, keep m
            let mut order: Vec<usize> = (0..m + n).collect();
            order.sort_by_key(|&i| (i as u32).wrapping_mul(2_654_435_761) ^ seed);
            let chosen: Vec<Fragment> = order[..m].iter().map(|&i| fragments[i].clone()).collect();
            prop_assert_eq!(rs_decode(&chosen, m, n).unwrap(), data.clone());
        }
    }

    #[test]
    fn any_corruption_is_caught(
        data in proptest::collection::vec(any::<u8>(), 1..512),
        victim in 0usize..6,
        byte in any::<prop::sample::Index>(),
        flip in 1u8..=255,
    ) {
        let mut fragments = rs_encode(ObjectId::default(), &data, 4, 2).unwrap();
        let at = byte.index(fragments[victim].payload_len());
        fragments[victim].payload[at] ^= flip;
        prop_assert!(!fragments[victim].is_intact());
        // handing over exactly m fragments including the corrupt one fails loudly
        let mut subset: Vec<Fragment> = fragments.iter().filter(|f| f.index as usize != victim).take(3).cloned().collect();
        subset.push(fragments[victim].clone());
        prop_assert_eq!(rs_decode(&subset, 4, 2), Err(CodecError::ChecksumMismatch { index: victim as u8 }));
        // with a spare, the corrupt fragment is skipped and the data comes back
        prop_assert_eq!(rs_decode(&fragments, 4, 2).unwrap(), data);
    }
}
