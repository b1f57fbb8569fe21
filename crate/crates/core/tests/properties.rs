//! Cross-module invariants, driven by proptest where randomization helps.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use envarium::bipartite::{partial_trace_over_e, schmidt_decompose};
use envarium::envariance::{check_envariance, DEFAULT_TOLERANCE};
use envarium::sampling::{bhattacharyya, exact_distribution, sample};
use envarium::testing::{random_state, random_unitary};
use envarium::{Bipartition, GateMatrix};

fn named_gates() -> Vec<GateMatrix> {
    ["i", "x", "y", "z", "h", "s", "sdg", "t", "tdg"]
        .iter()
        .map(|n| GateMatrix::by_name(n).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_the_norm(seed in any::<u64>(), picks in prop::collection::vec(0usize..9, 1..12)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = named_gates();
        let mut state = random_state(&mut rng, 3);
        for (step, &pick) in picks.iter().enumerate() {
            state = state.apply_single_qubit_gate(&gates[pick], step % 3).unwrap();
            prop_assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn random_unitary_round_trips(seed in any::<u64>(), qubits in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let state = random_state(&mut rng, n);
        let targets: Vec<usize> = (0..qubits).collect();
        let g = random_unitary(&mut rng, 1 << qubits);
        let there = state.apply_unitary_on_subset(&g, &targets).unwrap();
        let back = there.apply_unitary_on_subset(&g.dagger(), &targets).unwrap();
        prop_assert!(back.global_phase_distance(&state).unwrap() < 1e-10);
        prop_assert!((there.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_has_unit_trace(seed in any::<u64>(), split in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let state = random_state(&mut rng, n);
        let part = Bipartition::new((0..split).collect(), (split..n).collect()).unwrap();
        let rho = partial_trace_over_e(&state, &part).unwrap();
        let tr = rho.matrix().trace();
        prop_assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-10);
    }

    #[test]
    fn reduced_spectrum_is_squared_schmidt(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&mut rng, 4);
        for part in [
            Bipartition::new(vec![3, 1], vec![2, 0]).unwrap(),
            Bipartition::new(vec![0], vec![3, 2, 1]).unwrap(),
        ] {
            // Two independent routes: one-sided Jacobi SVD of the reshaped
            // state vs the Hermitian eigensolver on ρ_S = M M†.
            let sd = schmidt_decompose(&state, &part).unwrap();
            let rho = partial_trace_over_e(&state, &part).unwrap();
            let eigs = rho.eigenvalues();
            for (k, &lambda) in sd.coefficients().iter().enumerate() {
                prop_assert!((eigs[k] - lambda * lambda).abs() < 1e-8,
                    "component {k}: {} vs {}", eigs[k], lambda * lambda);
            }
        }
    }

    #[test]
    fn schmidt_coefficients_survive_local_unitaries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&mut rng, 3);
        let part = Bipartition::new(vec![2, 1], vec![0]).unwrap();
        let u_s = random_unitary(&mut rng, 4);
        let u_e = random_unitary(&mut rng, 2);
        let rotated = state
            .apply_unitary_on_subset(&u_s, part.s_qubits())
            .unwrap()
            .apply_unitary_on_subset(&u_e, part.e_qubits())
            .unwrap();
        let before = schmidt_decompose(&state, &part).unwrap();
        let after = schmidt_decompose(&rotated, &part).unwrap();
        for (a, b) in before.coefficients().iter().zip(after.coefficients()) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn bhattacharyya_bounded_and_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state_p = random_state(&mut rng, 3);
        let state_q = random_state(&mut rng, 3);
        let order = [2, 1, 0];
        let p = exact_distribution(&state_p, &order).unwrap();
        let q = exact_distribution(&state_q, &order).unwrap();
        let b_pq = bhattacharyya(p.probs(), q.probs()).unwrap();
        let b_qp = bhattacharyya(q.probs(), p.probs()).unwrap();
        prop_assert!(b_pq <= 1.0 + 1e-12);
        prop_assert!((b_pq - b_qp).abs() < 1e-12);
        prop_assert!((bhattacharyya(p.probs(), p.probs()).unwrap() - 1.0).abs() < 1e-12);
        // strictly below 1 unless the distributions coincide
        let max_gap = p
            .probs()
            .iter()
            .map(|(k, v)| (v - q.get(k)).abs())
            .fold(0.0f64, f64::max);
        if max_gap > 1e-3 {
            prop_assert!(b_pq < 1.0 - 1e-9);
        }
    }

    #[test]
    fn counts_always_sum_to_shots(seed in any::<u64>(), shots in 1u64..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&mut rng, 2);
        let h = sample(&state, shots, seed, &[1, 0]).unwrap();
        prop_assert_eq!(h.total(), shots);
        prop_assert_eq!(h.shots, shots);
    }

    #[test]
    fn envariance_decision_is_stable_under_e_relabeling(seed in any::<u64>()) {
        // Permute the E qubit labels physically and in the partition lists;
        // decision and residual must not move.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&mut rng, 3);
        let u_s = random_unitary(&mut rng, 2);
        let part = Bipartition::new(vec![2], vec![1, 0]).unwrap();

        // swap qubits 0 and 1 with three CNOTs
        let swapped = state
            .apply_cnot(0, 1)
            .unwrap()
            .apply_cnot(1, 0)
            .unwrap()
            .apply_cnot(0, 1)
            .unwrap();
        let part_swapped = Bipartition::new(vec![2], vec![0, 1]).unwrap();

        let a = check_envariance(&state, &u_s, &part, DEFAULT_TOLERANCE).unwrap();
        let b = check_envariance(&swapped, &u_s, &part_swapped, DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(a.envariant, b.envariant);
        prop_assert!((a.residual_condition - b.residual_condition).abs() < 1e-8);
        prop_assert!((a.residual_restore - b.residual_restore).abs() < 1e-8);
    }
}

#[test]
fn zero_noise_fidelity_beats_0999_for_every_test_seed() {
    let circuit = envarium::builtins::builtin_experiment("fig1").unwrap();
    let state = circuit.execute().unwrap();
    let theory = exact_distribution(&state, circuit.display_order()).unwrap();
    for seed in [0u64, 1, 2, 3, 4, 99, 2024] {
        let h = envarium::noise::run_noisy(&circuit, &envarium::NoiseParams::zero(), 8192, seed)
            .unwrap();
        let b = bhattacharyya(&h.frequencies(), theory.probs()).unwrap();
        assert!(b > 0.999, "seed {seed}: B = {b}");
    }
}

#[test]
fn sampling_consistency_golden_deviations() {
    // Fixed seeded streams at growing shot counts; the worst-case deviation
    // from the exact probabilities must come down as shots grow. The golden
    // values pin the documented generator across platforms and versions.
    let circuit = envarium::builtins::builtin_experiment("fig1").unwrap();
    let state = circuit.execute().unwrap();
    let exact = exact_distribution(&state, circuit.display_order()).unwrap();

    let max_dev = |shots: u64, seed: u64| -> f64 {
        let h = sample(&state, shots, seed, circuit.display_order()).unwrap();
        let freqs: BTreeMap<String, f64> = h.frequencies();
        let mut dev = 0.0f64;
        for key in exact.probs().keys().chain(freqs.keys()) {
            let f = freqs.get(key).copied().unwrap_or(0.0);
            dev = dev.max((f - exact.get(key)).abs());
        }
        dev
    };

    // golden_deviations[seed][i] belongs to shots = 2^10, 2^13, 2^16
    let golden: [(u64, [f64; 3]); 4] = [
        (
            11,
            [
                0.010742187500000111,
                0.007934570312500111,
                0.001312255859375111,
            ],
        ),
        (
            42,
            [
                0.006835937500000111,
                0.002319335937500111,
                0.001281738281250111,
            ],
        ),
        (
            77,
            [
                0.009765625000000111,
                0.000854492187500111,
                0.002075195312500111,
            ],
        ),
        (
            1234,
            [
                0.009765625000000111,
                0.005493164062500111,
                0.001312255859375111,
            ],
        ),
    ];
    let mut averages = [0.0f64; 3];
    for (seed, expect) in golden {
        for (i, &shots) in [1u64 << 10, 1 << 13, 1 << 16].iter().enumerate() {
            let dev = max_dev(shots, seed);
            assert!(
                (dev - expect[i]).abs() < 1e-15,
                "seed {seed} shots {shots}: deviation {dev:?} vs golden {:?}",
                expect[i]
            );
            averages[i] += dev / golden.len() as f64;
        }
    }
    // monotone convergence holds on the seed average (not per seed)
    assert!(averages[0] >= averages[1] && averages[1] >= averages[2]);
}
