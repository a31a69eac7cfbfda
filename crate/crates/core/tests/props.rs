//! Property tests for the structural invariants.

use proptest::collection::vec;
use proptest::prelude::*;

use fairsamp_core::circuit::{Circuit, GateKind};
use fairsamp_core::gmqaoa::{fast_statevector, QaoaParams};
use fairsamp_core::ising::{IsingModel, ProblemId};
use fairsamp_core::metrics::gsp;
use fairsamp_core::sim::{sample, simulate, Statevector};
use fairsamp_core::unitary::unitary_of;

fn arb_model() -> impl Strategy<Value = IsingModel> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            let count = pairs.len();
            (
                Just(n),
                Just(pairs),
                vec(-2.0f64..2.0, count),
                vec(-2.0f64..2.0, n),
            )
        })
        .prop_map(|(n, pairs, js, hs)| {
            let quadratic = pairs
                .into_iter()
                .zip(js)
                .map(|((i, j), v)| (i, j, v))
                .collect();
            let linear = hs.into_iter().enumerate().collect();
            IsingModel::new(n, quadratic, linear).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Scaling all coefficients scales every energy; minimizers are unchanged.
    #[test]
    fn energy_linear_in_coefficients(model in arb_model(), scale in 0.1f64..4.0) {
        let scaled = IsingModel::new(
            model.n,
            model.quadratic.iter().map(|&(i, j, v)| (i, j, v * scale)).collect(),
            model.linear.iter().map(|&(i, v)| (i, v * scale)).collect(),
        ).unwrap();
        for x in 0..(1usize << model.n) {
            let a = model.energy_of_index(x) * scale;
            let b = scaled.energy_of_index(x);
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
        let g1 = model.enumerate_ground_states().unwrap();
        let g2 = scaled.enumerate_ground_states().unwrap();
        prop_assert_eq!(g1.states, g2.states);
    }

    // The mixer keeps QAOA states normalized and GSP within [0, 1].
    #[test]
    fn qaoa_state_is_normalized(model in arb_model(), beta in -3.1f64..3.1, gamma in -3.1f64..3.1) {
        let state = fast_statevector(&model, &QaoaParams::single(beta, gamma)).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-10);
        let ground = model.enumerate_ground_states().unwrap();
        let counts = sample(&state, 512, 3);
        let g = gsp(&counts, &ground);
        prop_assert!((0.0..=1.0).contains(&g));
    }

    // Sampling always conserves shots.
    #[test]
    fn sample_conserves_shots(n in 1usize..5, shots in 1u64..4096, seed in any::<u64>()) {
        let state = Statevector::uniform(n);
        let counts = sample(&state, shots, seed);
        prop_assert_eq!(counts.counts.values().sum::<u64>(), shots);
        prop_assert_eq!(counts.shots, shots);
    }
}

fn arb_gate(n: usize) -> impl Strategy<Value = (GateKind, Vec<usize>)> {
    let q = 0..n;
    prop_oneof![
        q.clone().prop_map(|a| (GateKind::H, vec![a])),
        q.clone().prop_map(|a| (GateKind::SqrtX, vec![a])),
        (q.clone(), -3.0f64..3.0).prop_map(|(a, t)| (GateKind::Rz(t), vec![a])),
        (q.clone(), -1.0f64..1.0).prop_map(|(a, t)| (GateKind::Phase(t), vec![a])),
        (q.clone(), q.clone())
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(a, b)| (GateKind::Cnot, vec![a, b])),
        (q.clone(), q.clone(), -1.0f64..1.0)
            .prop_filter("distinct", |(a, b, _)| a != b)
            .prop_map(|(a, b, t)| (GateKind::ControlledPhase(t), vec![a, b])),
        (q.clone(), q)
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(a, b)| (GateKind::Swap, vec![a, b])),
    ]
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=4)
        .prop_flat_map(|n| (Just(n), vec(arb_gate(n), 0..12)))
        .prop_map(|(n, gates)| {
            let mut circuit = Circuit::new(n);
            for (kind, qubits) in gates {
                circuit.push(kind, &qubits).unwrap();
            }
            circuit
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Text serialization round-trips losslessly.
    #[test]
    fn circuit_text_round_trip(circuit in arb_circuit()) {
        let text = circuit.to_text();
        let back = Circuit::from_text(&text).unwrap();
        prop_assert_eq!(&circuit, &back);
        prop_assert_eq!(text, back.to_text());
    }

    // dagger() inverts the action on every circuit the IR can express.
    #[test]
    fn dagger_inverts(circuit in arb_circuit()) {
        let mut state = simulate(&circuit).unwrap();
        for gate in &circuit.dagger().unwrap().gates {
            fairsamp_core::sim::apply_gate(&mut state.amps, gate);
        }
        prop_assert!((state.probability(0) - 1.0).abs() < 1e-9);
    }

    // Unitarity of every produced matrix.
    #[test]
    fn circuits_produce_unitaries(circuit in arb_circuit()) {
        let u = unitary_of(&circuit).unwrap();
        prop_assert!(u.is_unitary(1e-10));
    }
}

// The fairness theorem in its sharpest per-problem form: states of equal
// energy keep exactly equal probabilities through any round count.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn equal_energy_probabilities(
        idx in 0usize..5,
        angles in vec((-3.1f64..3.1, -3.1f64..3.1), 1..4)
    ) {
        let model = IsingModel::builtin(ProblemId::ALL[idx]);
        let (betas, gammas) = angles.into_iter().unzip();
        let state = fast_statevector(&model, &QaoaParams::new(betas, gammas).unwrap()).unwrap();
        for x in 0..(1usize << model.n) {
            for y in (x + 1)..(1usize << model.n) {
                if model.energy_of_index(x) == model.energy_of_index(y) {
                    prop_assert!(
                        (state.probability(x) - state.probability(y)).abs() <= 1e-9
                    );
                }
            }
        }
    }
}
