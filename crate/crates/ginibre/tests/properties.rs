//! Property tests for the structural invariants: accumulator merge algebra,
//! count monotonicity, and the special-function ground rules.

use ginibre::finite_n::EnsembleKind;
use ginibre::sampler::{count_in_discs, CountScale, CountVector, EigenSample, C64};
use ginibre::specfun::{polylog_negorder, reg_gamma_p, reg_gamma_q};
use ginibre::stats::MomentAccumulator;
use proptest::prelude::*;

fn arb_counts(radii: &'static [f64]) -> impl Strategy<Value = CountVector> {
    let nr = radii.len();
    (
        proptest::collection::vec(0u32..12, nr),
        proptest::collection::vec(0u32..5, nr),
    )
        .prop_map(move |(mut complex, mut real)| {
            // enforce the monotone-in-radius invariant by cumulative sums
            for i in 1..complex.len() {
                complex[i] += complex[i - 1];
                real[i] += real[i - 1];
            }
            let total: Vec<u32> = complex.iter().zip(&real).map(|(c, r)| c + r).collect();
            CountVector {
                radii: radii.to_vec(),
                total,
                real,
                complex,
            }
        })
}

static RADII: [f64; 3] = [0.5, 1.0, 2.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // Merging any 3-way partition of a stream reproduces the sequential
    // accumulator bit-for-bit, in any merge order.
    #[test]
    fn merge_is_partition_invariant(
        draws in proptest::collection::vec(arb_counts(&RADII), 16..120),
        assign in proptest::collection::vec(0usize..3, 120),
        order in Just(()).prop_perturb(|_, mut rng| {
            let mut idx = [0usize, 1, 2];
            for i in (1..3).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                idx.swap(i, j);
            }
            idx
        }),
    ) {
        let n = draws.len() as u64;
        let mut sequential = MomentAccumulator::new(&RADII, CountScale::FiniteN, n);
        let mut parts: Vec<MomentAccumulator> = (0..3)
            .map(|_| MomentAccumulator::new(&RADII, CountScale::FiniteN, n))
            .collect();
        for (i, c) in draws.iter().enumerate() {
            sequential.accumulate_indexed(i as u64, c).unwrap();
            parts[assign[i % assign.len()]].accumulate_indexed(i as u64, c).unwrap();
        }
        let mut merged = MomentAccumulator::new(&RADII, CountScale::FiniteN, n);
        for &k in &order {
            merged.merge(&parts[k]).unwrap();
        }
        prop_assert_eq!(merged.to_bytes(), sequential.to_bytes());
    }

    // Checkpoint blobs round-trip exactly.
    #[test]
    fn checkpoint_roundtrip(draws in proptest::collection::vec(arb_counts(&RADII), 1..64)) {
        let mut acc = MomentAccumulator::new(&RADII, CountScale::Origin, draws.len() as u64);
        for (i, c) in draws.iter().enumerate() {
            acc.accumulate_indexed(i as u64, c).unwrap();
        }
        let back = MomentAccumulator::from_bytes(&acc.to_bytes()).unwrap();
        prop_assert_eq!(back, acc);
    }

    // Counting rules: totals are additive and nondecreasing in the radius on
    // arbitrary spectra, in both scales.
    #[test]
    fn counts_monotone_and_additive(
        reals in proptest::collection::vec(-2.0f64..2.0, 0..6),
        uppers in proptest::collection::vec((-2.0f64..2.0, 1e-9f64..2.0), 0..8),
        extra in 0.0f64..1.5,
        origin in any::<bool>(),
    ) {
        let n = reals.len() + 2 * uppers.len();
        prop_assume!(n > 0);
        let sample = EigenSample {
            reals,
            uppers: uppers.into_iter().map(|(re, im)| C64::new(re, im)).collect(),
            n,
            kind: EnsembleKind::GinOE,
        };
        let radii = [0.2, 0.2 + extra, 2.0 + extra, 1e9];
        let scale = if origin { CountScale::Origin } else { CountScale::FiniteN };
        let counts = count_in_discs(&sample, &radii, scale).unwrap();
        for i in 0..radii.len() {
            prop_assert_eq!(counts.total[i], counts.real[i] + counts.complex[i]);
            if i > 0 {
                prop_assert!(counts.total[i] >= counts.total[i - 1]);
                prop_assert!(counts.real[i] >= counts.real[i - 1]);
                prop_assert!(counts.complex[i] >= counts.complex[i - 1]);
            }
        }
        // everything is inside the huge disc
        prop_assert_eq!(counts.total[3] as usize, n);
    }

    // P + Q = 1 and monotonicity of Q in x across the series/continued-fraction
    // switch.
    #[test]
    fn gamma_complement_and_monotonicity(s in 0.1f64..200.0, x in 0.0f64..400.0) {
        let p = reg_gamma_p(s, x).unwrap();
        let q = reg_gamma_q(s, x).unwrap();
        prop_assert!((p + q - 1.0).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&p));
        let q2 = reg_gamma_q(s, x + 0.25).unwrap();
        prop_assert!(q2 <= q + 1e-15);
    }

    // Polylog inversion parity for negative arguments.
    #[test]
    fn polylog_inversion(m in 1u32..=8, x in -50.0f64..-0.02) {
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let lhs = polylog_negorder(m, x).unwrap();
        let rhs = sign * polylog_negorder(m, 1.0 / x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }
}
