use ecplan_core::placement::{ec_unavailability, Placement, Topology};
use ecplan_core::prob::{binomial_upper_tail, prob_loss_ec, DiskFailureModel, Probability};
use ecplan_core::scheme::{ErasureScheme, Scheme};
use proptest::prelude::*;

fn pr(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

/// A random (m, n, d, assignment) with every DC id in range.
fn layout() -> impl Strategy<Value = (u32, u32, usize, Vec<usize>)> {
    (1u32..7, 0u32..5, 1usize..=4).prop_flat_map(|(m, n, d)| {
        let total = (m + n) as usize;
        (Just(m), Just(n), Just(d), proptest::collection::vec(0..d, total))
    })
}

proptest! {
    #[test]
    fn colocation_only_hurts((m, n, d, assignment) in layout(), q in 1e-4f64..0.3, pu in 0.0f64..0.2) {
        let model = DiskFailureModel::new(0.0, pu).unwrap();
        let topology = Topology::uniform(d, pr(q)).unwrap();
        let placement = Placement::new(Scheme::erasure(m, n).unwrap(), assignment).unwrap();
        let with_outages = ec_unavailability(&model, &topology, &placement).unwrap().value();
        let plain = prob_loss_ec(pr(pu), ErasureScheme::new(m, n).unwrap()).value();
        prop_assert!(with_outages + 1e-15 >= plain);

        let calm = Topology::uniform(d, pr(0.0)).unwrap();
        prop_assert_eq!(ec_unavailability(&model, &calm, &placement).unwrap().value(), plain);
    }

    #[test]
    fn relabelling_dcs_changes_nothing(
        (m, n, d, assignment) in layout(),
        qs in proptest::collection::vec(0.0f64..0.3, 4),
        pu in 0.0f64..0.2,
        rotate in 0usize..4,
    ) {
        let model = DiskFailureModel::new(0.0, pu).unwrap();
        let topology = Topology::new(qs[..d].iter().map(|&q| pr(q)).collect()).unwrap();
        let scheme = Scheme::erasure(m, n).unwrap();
        let base = ec_unavailability(&model, &topology, &Placement::new(scheme, assignment.clone()).unwrap())
            .unwrap()
            .value();

        // rotate DC labels together with their outage probabilities
        let perm: Vec<usize> = (0..d).map(|i| (i + rotate) % d).collect();
        let mut rotated_q = vec![pr(0.0); d];
        for (old, &new) in perm.iter().enumerate() {
            rotated_q[new] = pr(qs[old]);
        }
        let relabelled: Vec<usize> = assignment.iter().map(|&dc| perm[dc]).collect();
        let moved = ec_unavailability(
            &model,
            &Topology::new(rotated_q).unwrap(),
            &Placement::new(scheme, relabelled).unwrap(),
        )
        .unwrap()
        .value();
        prop_assert!((base - moved).abs() <= 1e-14 * base.max(1e-300));

        // shuffling which fragment index sits where (same per-DC loads)
        let mut reversed = assignment.clone();
        reversed.reverse();
        let shuffled = ec_unavailability(&model, &topology, &Placement::new(scheme, reversed).unwrap())
            .unwrap()
            .value();
        prop_assert_eq!(base, shuffled);
    }

    #[test]
    fn one_fragment_per_dc_is_a_binomial_over_dcs(m in 1u32..4, n in 0u32..3, q in 0.0f64..0.5) {
        let d = (m + n) as usize;
        let model = DiskFailureModel::new(0.0, 0.0).unwrap();
        let topology = Topology::uniform(d, pr(q)).unwrap();
        let placement = Placement::round_robin(Scheme::erasure(m, n).unwrap(), d).unwrap();
        let got = ec_unavailability(&model, &topology, &placement).unwrap().value();
        let expected = binomial_upper_tail(m + n, n, q);
        prop_assert!((got - expected).abs() <= 1e-14 * expected.max(1e-300) + 1e-300);
    }
}

#[test]
fn minimum_overhead_placements_survive_any_single_dc() {
    // spread m+n fragments so that the busiest DC holds at most n of them
    for d in 2..=5usize {
        for m in 1..=8u32 {
            let per_dc = (m as usize).div_ceil(d - 1);
            let n = per_dc as u32;
            let total = (m + n) as usize;
            if total.div_ceil(d) > per_dc {
                continue;
            }
            let placement = Placement::round_robin(Scheme::erasure(m, n).unwrap(), d).unwrap();
            let max_load = *placement.dc_loads(d).iter().max().unwrap();
            assert!(max_load as u32 <= n, "d={d} {m}+{n}");
            let model = DiskFailureModel::new(0.0, 0.0).unwrap();
            let mut last = f64::INFINITY;
            for q in [1e-2, 1e-3, 1e-4, 1e-5] {
                let topology = Topology::uniform(d, pr(q)).unwrap();
                let u = ec_unavailability(&model, &topology, &placement).unwrap().value();
                // single outages are harmless, so unavailability falls like q^2
                assert!(u <= (d * d) as f64 * q * q, "d={d} {m}+{n} q={q}: {u}");
                assert!(u < last);
                last = u;
            }
        }
    }
}
