mod common;

use blockline::blocks::{oracle_min_spread, partition, BlockInstance};
use blockline::sets1d::ClosedSet1D;
use blockline::transversal1d::{propagate, solve, solve_exact_finite, GridSequence1D};
use common::dense_sequence;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spread(points: &[f64]) -> f64 {
    let z: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
    z.iter().cloned().fold(f64::MIN, f64::max) - z.iter().cloned().fold(f64::MAX, f64::min)
}

/// Smallest spread over every transversal of finite sets.
fn brute_min_spread(sets: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; sets.len()];
    loop {
        let pts: Vec<f64> = idx.iter().zip(sets).map(|(&k, s)| s[k]).collect();
        best = best.min(spread(&pts));
        let mut j = 0;
        while j < sets.len() && idx[j] + 1 == sets[j].len() {
            idx[j] = 0;
            j += 1;
        }
        if j == sets.len() {
            return best;
        }
        idx[j] += 1;
    }
}

#[test]
fn exact_finite_solver_against_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..300 {
        let n = rng.gen_range(2..=5);
        let target: f64 = rng.gen_range(-3.0..6.0);
        let mut sets = vec![vec![0.0]];
        for _ in 1..n {
            // points with gaps at most 1 between the far ends of the path
            let lo = target.min(0.0) - rng.gen_range(1.0..3.0);
            let hi = target.max(0.0) + rng.gen_range(1.0..3.0);
            let mut pts = vec![lo];
            while *pts.last().unwrap() < hi {
                let next = pts.last().unwrap() + rng.gen_range(0.2..=1.0);
                pts.push(next.min(hi));
            }
            sets.push(pts);
        }
        sets.push(vec![target]);
        let seq = GridSequence1D::new(
            sets.iter()
                .map(|s| ClosedSet1D::points(s.iter().copied()).unwrap())
                .collect(),
            target,
            false,
        )
        .unwrap();
        let brute = brute_min_spread(&sets);
        let t = solve_exact_finite(&seq).unwrap_or_else(|e| panic!("instance {k}: {e}"));
        t.verify(&seq).unwrap();
        let got = spread(&t.points);
        assert!(got <= 1.0 + 1e-12, "instance {k}: spread {got}");
        assert!(
            brute <= got + 1e-12,
            "instance {k}: brute {brute} above solver {got}"
        );
    }
}

#[test]
fn dense_solver_is_valid_on_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..300 {
        let seq = dense_sequence(&mut rng, 12, false);
        let t = solve(&seq, 1e-9).unwrap_or_else(|e| panic!("sequence {k}: {e}"));
        t.verify(&seq).unwrap();
        assert!(spread(&t.points) <= 1.0 + 1e-9, "sequence {k}");
        let (x_lo, x_hi) = t.offset_window.expect("dense solve records its offsets");
        assert!(x_hi - x_lo <= 1e-9);
        // every step lies in the relaxed band [x_lo, x_hi + 1]
        for w in t.points.windows(2) {
            let z = w[1] - w[0];
            assert!(
                x_lo - 1e-9 <= z && z <= x_hi + 1.0 + 1e-9,
                "sequence {k}: step {z}"
            );
        }
    }
}

#[test]
fn windows_sandwich_the_extracted_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let seq = dense_sequence(&mut rng, 10, false);
        let t = solve(&seq, 1e-9).unwrap();
        let (x_lo, x_hi) = t.offset_window.unwrap();
        let state = propagate(&seq, x_lo, x_hi).unwrap();
        for i in 1..seq.n() {
            let (l, r) = state.window(i).unwrap();
            assert!(l - 1e-9 <= t.points[i] && t.points[i] <= r + 1e-9);
        }
    }
}

#[test]
fn normalization_keeps_solutions_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let seq = dense_sequence(&mut rng, 8, false);
        let t = solve(&seq.normalized(), 1e-9).unwrap();
        assert_eq!(*t.points.last().unwrap(), 0.0);
        assert!(spread(&t.points) <= 1.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_never_exceeds_one(values in prop::collection::vec(0.0..=1.0f64, 0..40), n in 1usize..9) {
        let inst = BlockInstance::new(values.clone(), n).unwrap();
        let part = partition(&inst).unwrap();
        prop_assert!(part.spread <= 1.0);
        prop_assert_eq!(part.boundaries.first(), Some(&0));
        prop_assert_eq!(part.boundaries.last(), Some(&values.len()));
        prop_assert!(part.boundaries.windows(2).all(|w| w[0] <= w[1]));
        let total: f64 = part.sizes.iter().sum();
        let want: f64 = values.iter().sum();
        prop_assert!((total - want).abs() < 1e-9);
    }

    #[test]
    fn oracle_lower_bounds_solver(values in prop::collection::vec(0.0..=1.0f64, 0..10), n in 1usize..5) {
        let inst = BlockInstance::new(values, n).unwrap();
        let (best, witness) = oracle_min_spread(&inst, 1_000_000).unwrap();
        prop_assert!(best <= partition(&inst).unwrap().spread);
        prop_assert_eq!(best, witness.spread);
    }
}
