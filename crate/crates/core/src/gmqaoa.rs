//! Grover-mixer QAOA: circuit construction, a matrix-free statevector path,
//! and the grid-search angle optimizer.
//!
//! The prepared state is `U_M(β_p)·U_P(γ_p)···U_M(β_1)·U_P(γ_1)·U_S|↑^n⟩`
//! with the feasible set being all basis states, so `U_S = H^⊗n` and the
//! mixer is the rank-one update `Id − (1−e^{−iβ})|F⟩⟨F|`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};
use crate::ising::{GroundSet, IsingModel};
use crate::sim::{Statevector, MAX_SIM_QUBITS};
use crate::{Error, Result};

/// Grid resolution used throughout for angle searches.
pub const DEFAULT_GRID_RESOLUTION: f64 = PI / 60.0;

/// Per-round mixing and phase-separation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<QaoaParams> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(Error::Invalid {
                what: "qaoa params",
                reason: format!(
                    "need equal-length non-empty angle lists, got {} betas and {} gammas",
                    betas.len(),
                    gammas.len()
                ),
            });
        }
        Ok(QaoaParams { betas, gammas })
    }

    pub fn single(beta: f64, gamma: f64) -> QaoaParams {
        QaoaParams {
            betas: vec![beta],
            gammas: vec![gamma],
        }
    }

    pub fn rounds(&self) -> usize {
        self.betas.len()
    }
}

/// `U_S = H^⊗n`: equal superposition over all basis states.
pub fn build_state_prep(n: usize) -> Circuit {
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.push(GateKind::H, &[q]).expect("valid qubit");
    }
    circuit
}

/// `U_P(γ) = e^{-iγH}` for `H = -Σ J_ij Z_i Z_j - Σ h_i Z_i`, exactly
/// (no global phase slack): per coupling a CNOT–Rz(−2Jγ)–CNOT sandwich,
/// per field a single Rz(−2hγ).
pub fn build_phase_separator(model: &IsingModel, gamma: f64) -> Circuit {
    let mut circuit = Circuit::new(model.n);
    for &(i, j, coupling) in &model.quadratic {
        circuit.push(GateKind::Cnot, &[i, j]).expect("valid");
        circuit
            .push(GateKind::Rz(-2.0 * coupling * gamma), &[j])
            .expect("valid");
        circuit.push(GateKind::Cnot, &[i, j]).expect("valid");
    }
    for &(i, field) in &model.linear {
        circuit
            .push(GateKind::Rz(-2.0 * field * gamma), &[i])
            .expect("valid");
    }
    circuit
}

/// `U_M(β) = e^{-iβ|F⟩⟨F|} = Id − (1−e^{-iβ})|F⟩⟨F|`.
///
/// Built as `U_S · X^⊗n · MCPhase(−β/π) · X^⊗n · U_S†`: the X layer moves
/// the phase from |↓^n⟩ to |↑^n⟩, and conjugation by `U_S` moves it to |F⟩.
pub fn build_grover_mixer(n: usize, beta: f64) -> Circuit {
    let mut circuit = build_state_prep(n).dagger().expect("no measure");
    for q in 0..n {
        circuit.push(GateKind::X, &[q]).expect("valid");
    }
    circuit
        .push(
            GateKind::MultiControlledPhase(-beta / PI),
            &(0..n).collect::<Vec<_>>(),
        )
        .expect("valid");
    for q in 0..n {
        circuit.push(GateKind::X, &[q]).expect("valid");
    }
    circuit.extend(&build_state_prep(n));
    circuit
}

/// The full GM-QAOA circuit, ending in measurement on all qubits.
/// Round `k` applies `U_P(γ_k)` then `U_M(β_k)`.
pub fn assemble_qaoa(model: &IsingModel, params: &QaoaParams) -> Circuit {
    let mut circuit = build_state_prep(model.n);
    for round in 0..params.rounds() {
        circuit.extend(&build_phase_separator(model, params.gammas[round]));
        circuit.extend(&build_grover_mixer(model.n, params.betas[round]));
    }
    for q in 0..model.n {
        circuit.push(GateKind::Measure, &[q]).expect("valid");
    }
    circuit
}

/// Matrix-free evaluation of the GM-QAOA state.
///
/// Starts uniform; each round multiplies amplitude `a_x` by `e^{-iγE(x)}`
/// and then subtracts `(1−e^{-iβ})·mean(a)` from every amplitude. Identical
/// to simulating [`assemble_qaoa`] (measurements aside).
pub fn fast_statevector(model: &IsingModel, params: &QaoaParams) -> Result<Statevector> {
    if model.n > MAX_SIM_QUBITS {
        return Err(Error::TooManyQubits {
            op: "fast_statevector",
            max: MAX_SIM_QUBITS,
            n: model.n,
        });
    }
    let energies: Vec<f64> = (0..(1usize << model.n))
        .map(|x| model.energy_of_index(x))
        .collect();
    let mut amps = vec![
        Complex64::new(1.0 / ((1usize << model.n) as f64).sqrt(), 0.0);
        1 << model.n
    ];
    apply_rounds(&mut amps, &energies, params);
    Ok(Statevector { n: model.n, amps })
}

fn apply_rounds(amps: &mut [Complex64], energies: &[f64], params: &QaoaParams) {
    let dim = amps.len() as f64;
    for round in 0..params.rounds() {
        let gamma = params.gammas[round];
        let beta = params.betas[round];
        for (a, &e) in amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
        let mean = amps.iter().sum::<Complex64>() / dim;
        let weight = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -beta)) * mean;
        for a in amps.iter_mut() {
            *a -= weight;
        }
    }
}

/// Result of a grid search: the arg-min angles, the minimum expected energy,
/// and the ground-state probability at that point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub params: QaoaParams,
    pub energy: f64,
    pub gsp: f64,
}

/// Scan `β, γ ∈ [−π, π)` at the given resolution (p = 1 only) with the
/// matrix-free evaluator; ties break to the lexicographically smallest
/// `(β, γ)`. The GSP is taken against the model's own ground set.
pub fn grid_search(model: &IsingModel, resolution: f64, rounds: usize) -> Result<GridSearchResult> {
    if rounds != 1 {
        return Err(Error::Invalid {
            what: "grid_search",
            reason: format!("only p=1 searches are supported, got p={rounds}"),
        });
    }
    if resolution.is_nan() || resolution <= 0.0 || resolution > PI {
        return Err(Error::Invalid {
            what: "grid_search",
            reason: format!("resolution {resolution} out of range"),
        });
    }
    let ground = model.enumerate_ground_states()?;
    let energies: Vec<f64> = (0..(1usize << model.n))
        .map(|x| model.energy_of_index(x))
        .collect();
    let steps = (2.0 * PI / resolution).round() as usize;
    let angle = |k: usize| -PI + k as f64 * resolution;

    let uniform = Complex64::new(1.0 / ((1usize << model.n) as f64).sqrt(), 0.0);
    let mut amps = vec![uniform; 1 << model.n];
    let mut best: Option<(f64, f64, f64, f64)> = None; // (energy, beta, gamma, gsp)
    for bi in 0..steps {
        let beta = angle(bi);
        for gi in 0..steps {
            let gamma = angle(gi);
            amps.fill(uniform);
            apply_rounds(&mut amps, &energies, &QaoaParams::single(beta, gamma));
            let energy: f64 = amps
                .iter()
                .zip(&energies)
                .map(|(a, &e)| a.norm_sqr() * e)
                .sum();
            let better = match best {
                None => true,
                Some((be, bb, bg, _)) => (energy, beta, gamma) < (be, bb, bg),
            };
            if better {
                let gsp: f64 = ground.states.iter().map(|&s| amps[s].norm_sqr()).sum();
                best = Some((energy, beta, gamma, gsp));
            }
        }
    }
    let (energy, beta, gamma, gsp) = best.expect("at least one grid point");
    Ok(GridSearchResult {
        params: QaoaParams::single(beta, gamma),
        energy,
        gsp,
    })
}

/// Probability mass on a ground set.
pub fn ground_state_probability(state: &Statevector, ground: &GroundSet) -> f64 {
    (0..state.amps.len())
        .filter(|&x| ground.contains(x))
        .map(|x| state.probability(x))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::ProblemId;
    use crate::sim::simulate;
    use crate::unitary::{unitary_of, Matrix};

    #[test]
    fn state_prep_uniform() {
        for n in [1usize, 4] {
            let state = simulate(&build_state_prep(n)).unwrap();
            let want = 1.0 / (1usize << n) as f64;
            for x in 0..(1 << n) {
                assert!((state.probability(x) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_separator_identity_at_zero_gamma() {
        let model = IsingModel::builtin(ProblemId::E);
        let u = unitary_of(&build_phase_separator(&model, 0.0)).unwrap();
        assert!(u.max_abs_diff(&Matrix::identity(8)) < 1e-12);
    }

    #[test]
    fn phase_separator_matches_diagonal_exponential() {
        // Exact equality, not just up to global phase.
        let model = IsingModel::new(2, vec![(0, 1, 1.0)], vec![]).unwrap();
        let gamma = PI / 4.0;
        let u = unitary_of(&build_phase_separator(&model, gamma)).unwrap();
        let mut expect = Matrix::identity(4);
        for x in 0..4usize {
            expect.set(
                x,
                x,
                Complex64::from_polar(1.0, -gamma * model.energy_of_index(x)),
            );
        }
        assert!(u.max_abs_diff(&expect) < 1e-12);

        // With linear terms too.
        let reduced = IsingModel::builtin_reduced(ProblemId::D);
        let gamma = -0.613;
        let u = unitary_of(&build_phase_separator(&reduced, gamma)).unwrap();
        let dim = 1usize << reduced.n;
        let mut expect = Matrix::identity(dim);
        for x in 0..dim {
            expect.set(
                x,
                x,
                Complex64::from_polar(1.0, -gamma * reduced.energy_of_index(x)),
            );
        }
        assert!(u.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn phase_separator_gate_count() {
        let model = IsingModel::builtin_reduced(ProblemId::C);
        let circuit = build_phase_separator(&model, 0.3);
        assert_eq!(
            circuit.gates.len(),
            3 * model.quadratic.len() + model.linear.len()
        );
    }

    #[test]
    fn grover_mixer_is_projector_update() {
        for n in [1usize, 2, 4, 6] {
            let beta = 0.77;
            let u = unitary_of(&build_grover_mixer(n, beta)).unwrap();
            let dim = 1usize << n;
            let mut expect = Matrix::identity(dim);
            let coeff =
                (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -beta)) / dim as f64;
            for row in 0..dim {
                for col in 0..dim {
                    let cur = expect.get(row, col);
                    expect.set(row, col, cur - coeff);
                }
            }
            assert!(
                u.equal_up_to_global_phase(&expect, 1e-10),
                "n={n} mixer mismatch"
            );
        }
    }

    #[test]
    fn grover_mixer_eigenstates() {
        let n = 3;
        let beta = 1.1;
        let circuit = build_grover_mixer(n, beta);
        // On |F⟩ itself: picks up e^{-iβ}.
        let mut state = Statevector::uniform(n);
        for gate in &circuit.gates {
            crate::sim::apply_gate(&mut state.amps, gate);
        }
        let expect = Complex64::from_polar(1.0 / (8f64).sqrt(), -beta);
        for a in &state.amps {
            assert!((a - expect).norm() < 1e-12);
        }
        // Orthogonal states are untouched.
        let mut ortho = Statevector::zero_state(n);
        ortho.amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ortho.amps[1] = Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let before = ortho.clone();
        for gate in &circuit.gates {
            crate::sim::apply_gate(&mut ortho.amps, gate);
        }
        for (a, b) in ortho.amps.iter().zip(&before.amps) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mixer_identity_at_zero_beta() {
        let u = unitary_of(&build_grover_mixer(2, 0.0)).unwrap();
        assert!(u.equal_up_to_global_phase(&Matrix::identity(4), 1e-12));
    }

    #[test]
    fn zero_angles_give_uniform_sampling() {
        let model = IsingModel::builtin(ProblemId::E);
        let circuit = assemble_qaoa(&model, &QaoaParams::single(0.0, 0.0));
        let state = simulate(&circuit).unwrap();
        for x in 0..8 {
            assert!((state.probability(x) - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_statevector_equals_circuit_simulation() {
        let params = QaoaParams::new(vec![0.9, -0.4], vec![0.31, 1.7]).unwrap();
        for id in ProblemId::ALL {
            let model = IsingModel::builtin(id);
            let fast = fast_statevector(&model, &params).unwrap();
            let slow = simulate(&assemble_qaoa(&model, &params)).unwrap();
            assert!(
                fast.max_amp_diff_up_to_phase(&slow) < 1e-12,
                "problem {id:?} fast/slow disagree"
            );
        }
    }

    #[test]
    fn constant_energy_model_is_angle_independent() {
        // All couplings zero: every state has energy 0.
        let model = IsingModel::new(3, vec![(0, 1, 0.0)], vec![]).unwrap();
        let result = grid_search(&model, PI / 6.0, 1).unwrap();
        assert!(result.energy.abs() < 1e-12);
    }

    #[test]
    fn grid_search_rejects_multi_round() {
        let model = IsingModel::builtin(ProblemId::E);
        assert!(grid_search(&model, PI / 6.0, 2).is_err());
    }
}
