//! Time-dependent Schrödinger evolution of the transverse-field annealing
//! Hamiltonian `H(s) = −A(s)·ΣX_i + B(s)·H_problem` on logical qubits, and
//! metric sweeps over annealing times.
//!
//! Time is dimensionless (ħ = 1); no mapping to hardware microseconds is
//! claimed, which lets the sweep reach the short-time regime hardware cannot.

use num_complex::Complex64;

use crate::ising::{ComplementMode, GroundSet, IsingModel};
use crate::metrics::{fairness_nstr, ground_distribution, gsp, FairnessConfig, FairnessResult};
use crate::sim::{expectation_energy, sample, Statevector};
use crate::{Error, Result};

/// Largest qubit count for the annealing integrator.
pub const MAX_ANNEAL_QUBITS: usize = 14;

/// Annealing schedule weights `A(s)` (driver) and `B(s)` (problem) on
/// `s ∈ [0, 1]`.
pub struct Schedule {
    a: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    b: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Schedule {
    /// The default linear ramp `A(s) = 1 − s`, `B(s) = s`.
    pub fn linear() -> Schedule {
        Schedule {
            a: Box::new(|s| 1.0 - s),
            b: Box::new(|s| s),
        }
    }

    /// Custom weights; both must be nonnegative on `[0, 1]`.
    pub fn new(
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Schedule {
        Schedule {
            a: Box::new(a),
            b: Box::new(b),
        }
    }

    pub fn driver_weight(&self, s: f64) -> f64 {
        (self.a)(s)
    }

    pub fn problem_weight(&self, s: f64) -> f64 {
        (self.b)(s)
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::linear()
    }
}

/// Integrate `i·d|ψ⟩/dt = H(t/T)|ψ⟩` from the driver ground state |→^n⟩.
///
/// Second-order split step: per step of size `dt`, a half step of the driver
/// part, a full step of the (diagonal) problem part, and another half driver
/// step, with schedule weights evaluated at the step midpoint. Exactly
/// unitary regardless of step size.
pub fn evolve(
    model: &IsingModel,
    total_time: f64,
    steps: usize,
    schedule: &Schedule,
) -> Result<Statevector> {
    if model.n > MAX_ANNEAL_QUBITS {
        return Err(Error::TooManyQubits {
            op: "evolve",
            max: MAX_ANNEAL_QUBITS,
            n: model.n,
        });
    }
    if steps == 0 {
        return Err(Error::Invalid {
            what: "evolve",
            reason: "steps must be at least 1".into(),
        });
    }
    if total_time.is_nan() || total_time < 0.0 {
        return Err(Error::Invalid {
            what: "evolve",
            reason: format!("total_time {total_time} must be nonnegative"),
        });
    }
    let n = model.n;
    let energies: Vec<f64> = (0..(1usize << n))
        .map(|x| model.energy_of_index(x))
        .collect();
    let mut state = Statevector::uniform(n);
    let dt = total_time / steps as f64;
    for step in 0..steps {
        let s_mid = (step as f64 + 0.5) / steps as f64;
        let a = schedule.driver_weight(s_mid);
        let b = schedule.problem_weight(s_mid);
        // Driver half step: e^{+i·a·(dt/2)·ΣX}.
        apply_driver(&mut state.amps, n, a * dt / 2.0);
        // Problem full step: diagonal phase e^{−i·b·dt·E(x)}.
        for (amp, &e) in state.amps.iter_mut().zip(&energies) {
            *amp *= Complex64::from_polar(1.0, -b * dt * e);
        }
        apply_driver(&mut state.amps, n, a * dt / 2.0);
    }
    Ok(state)
}

/// `e^{+iθX}` on every qubit: cos θ · I + i sin θ · X per qubit.
fn apply_driver(amps: &mut [Complex64], n: usize, theta: f64) {
    let cos = Complex64::new(theta.cos(), 0.0);
    let isin = Complex64::new(0.0, theta.sin());
    for q in 0..n {
        let mask = 1usize << q;
        for i in 0..amps.len() / 2 {
            let low = i & (mask - 1);
            let i0 = ((i >> q) << (q + 1)) | low;
            let i1 = i0 | mask;
            let a0 = amps[i0];
            let a1 = amps[i1];
            amps[i0] = cos * a0 + isin * a1;
            amps[i1] = isin * a0 + cos * a1;
        }
    }
}

/// One row of an annealing-time sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub time: f64,
    pub gsp: f64,
    pub fairness: FairnessResult,
    pub energy: f64,
}

/// Sweep parameters beyond the model itself.
pub struct SweepConfig {
    pub steps_per_unit_time: usize,
    pub shots: u64,
    pub seed: u64,
    pub fairness: FairnessConfig,
    pub complement_mode: ComplementMode,
    pub schedule: Schedule,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            steps_per_unit_time: 100,
            shots: 8192,
            seed: 1,
            fairness: FairnessConfig::anneal_default(),
            complement_mode: ComplementMode::Separate,
            schedule: Schedule::linear(),
        }
    }
}

/// For each annealing time: evolve, sample, and compute GSP, fairness and
/// the exact energy expectation. Per-point seeds are derived from the sweep
/// seed by counter, so rows are independent of evaluation order.
pub fn anneal_sweep(model: &IsingModel, times: &[f64], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if times.is_empty() {
        return Err(Error::Invalid {
            what: "anneal_sweep",
            reason: "need at least one annealing time".into(),
        });
    }
    let ground = model
        .enumerate_ground_states()?
        .with_mode(cfg.complement_mode);
    let mut rows = Vec::with_capacity(times.len());
    for (index, &time) in times.iter().enumerate() {
        rows.push(sweep_point(model, &ground, time, index as u64, cfg)?);
    }
    Ok(rows)
}

fn sweep_point(
    model: &IsingModel,
    ground: &GroundSet,
    time: f64,
    index: u64,
    cfg: &SweepConfig,
) -> Result<SweepRow> {
    let steps = ((time * cfg.steps_per_unit_time as f64).ceil() as usize).max(1);
    let state = evolve(model, time, steps, &cfg.schedule)?;
    let counts = sample(&state, cfg.shots, derive_seed(cfg.seed, 2 * index));
    let distribution = ground_distribution(&counts, ground);
    let fairness = fairness_nstr(&distribution, &cfg.fairness, derive_seed(cfg.seed, 2 * index + 1))?;
    Ok(SweepRow {
        time,
        gsp: gsp(&counts, ground),
        fairness,
        energy: expectation_energy(&state, model)?,
    })
}

/// Counter-derived sub-seed (splitmix64 of `base + stream`).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Render sweep rows as `time,gsp,fairness_shots,energy` CSV; a fairness
/// search that hit the cap prints as `>cap`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("time,gsp,fairness_shots,energy\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:.6},{},{:.6}\n",
            row.time, row.gsp, row.fairness, row.energy
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::ProblemId;

    /// Test-only oracle: classic RK4 on the dense Hamiltonian, sharing
    /// nothing with the split-step path but the Hamiltonian definition.
    fn rk4_oracle(model: &IsingModel, total_time: f64, steps: usize) -> Statevector {
        let n = model.n;
        let dim = 1usize << n;
        let energies: Vec<f64> = (0..dim).map(|x| model.energy_of_index(x)).collect();
        // H(s)ψ = −A(s)·Σ_q ψ[x flip q] + B(s)·E(x)·ψ[x].
        let apply_h = |s: f64, psi: &[Complex64]| -> Vec<Complex64> {
            let a = 1.0 - s;
            let b = s;
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for x in 0..dim {
                let mut acc = Complex64::new(b * energies[x], 0.0) * psi[x];
                for q in 0..n {
                    acc -= Complex64::new(a, 0.0) * psi[x ^ (1 << q)];
                }
                out[x] = acc;
            }
            out
        };
        let rhs = |s: f64, psi: &[Complex64]| -> Vec<Complex64> {
            apply_h(s, psi)
                .into_iter()
                .map(|v| -Complex64::i() * v)
                .collect()
        };
        let mut psi = Statevector::uniform(n).amps;
        let dt = total_time / steps as f64;
        for step in 0..steps {
            let t = step as f64 * dt;
            let s0 = t / total_time;
            let s1 = (t + dt / 2.0) / total_time;
            let s2 = (t + dt) / total_time;
            let k1 = rhs(s0, &psi);
            let y2: Vec<Complex64> = psi
                .iter()
                .zip(&k1)
                .map(|(p, k)| p + k * (dt / 2.0))
                .collect();
            let k2 = rhs(s1, &y2);
            let y3: Vec<Complex64> = psi
                .iter()
                .zip(&k2)
                .map(|(p, k)| p + k * (dt / 2.0))
                .collect();
            let k3 = rhs(s1, &y3);
            let y4: Vec<Complex64> = psi.iter().zip(&k3).map(|(p, k)| p + k * dt).collect();
            let k4 = rhs(s2, &y4);
            for (i, p) in psi.iter_mut().enumerate() {
                *p += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        Statevector { n, amps: psi }
    }

    #[test]
    fn split_step_matches_dense_rk4_oracle() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        for time in [0.7, 5.0] {
            let split = evolve(&model, time, 20_000, &Schedule::linear()).unwrap();
            let oracle = rk4_oracle(&model, time, 20_000);
            let diff = split.max_amp_diff_up_to_phase(&oracle);
            assert!(diff < 1e-6, "T={time}: split vs RK4 differ by {diff:.2e}");
        }
        // The full 3-qubit model too.
        let model = IsingModel::builtin(ProblemId::E);
        let split = evolve(&model, 3.0, 20_000, &Schedule::linear()).unwrap();
        let oracle = rk4_oracle(&model, 3.0, 20_000);
        assert!(split.max_amp_diff_up_to_phase(&oracle) < 1e-6);
    }

    #[test]
    fn adiabatic_gsp_confirmed_by_oracle() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        let ground = model.enumerate_ground_states().unwrap();
        let oracle = rk4_oracle(&model, 50.0, 50_000);
        let p: f64 = ground.states.iter().map(|&s| oracle.probability(s)).sum();
        assert!(p > 0.95, "oracle long-T ground probability {p}");
    }

    #[test]
    fn zero_time_keeps_uniform_state() {
        let model = IsingModel::builtin(ProblemId::E);
        let state = evolve(&model, 0.0, 1, &Schedule::linear()).unwrap();
        for x in 0..8 {
            assert!((state.probability(x) - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn tiny_time_gsp_is_ground_fraction() {
        let model = IsingModel::builtin(ProblemId::E);
        let ground = model.enumerate_ground_states().unwrap();
        let state = evolve(&model, 1e-6, 1, &Schedule::linear()).unwrap();
        let p: f64 = ground.states.iter().map(|&s| state.probability(s)).sum();
        let want = ground.states.len() as f64 / 8.0;
        assert!((p - want).abs() < 1e-6);
    }

    #[test]
    fn norm_preserved_across_regimes() {
        for id in ProblemId::ALL {
            let model = IsingModel::builtin(id);
            for time in [0.1, 1.0, 10.0, 100.0] {
                let steps = ((time * 50.0) as usize).max(1);
                let state = evolve(&model, time, steps, &Schedule::linear()).unwrap();
                assert!(
                    (state.norm() - 1.0).abs() < 1e-8,
                    "problem {id:?} T={time}"
                );
            }
        }
    }

    #[test]
    fn adiabatic_limit_reaches_ground_space() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        let ground = model.enumerate_ground_states().unwrap();
        let state = evolve(&model, 50.0, 5000, &Schedule::linear()).unwrap();
        let p: f64 = ground.states.iter().map(|&s| state.probability(s)).sum();
        assert!(p > 0.95, "long-T ground probability {p}");
    }

    #[test]
    fn split_step_converges_second_order() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        let time = 5.0;
        let reference = evolve(&model, time, 1 << 14, &Schedule::linear()).unwrap();
        let coarse = evolve(&model, time, 128, &Schedule::linear()).unwrap();
        let fine = evolve(&model, time, 256, &Schedule::linear()).unwrap();
        let e1 = coarse.distance_up_to_phase(&reference);
        let e2 = fine.distance_up_to_phase(&reference);
        let ratio = e1 / e2;
        assert!((3.0..=5.0).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn sweep_rows_and_csv_deterministic() {
        let model = IsingModel::builtin(ProblemId::E);
        let cfg = SweepConfig {
            steps_per_unit_time: 20,
            shots: 2048,
            seed: 5,
            fairness: FairnessConfig {
                inner_loops: 50,
                cap: 10_000,
                ..FairnessConfig::gate_default()
            },
            ..Default::default()
        };
        let times = [0.0, 0.5, 2.0];
        let rows = anneal_sweep(&model, &times, &cfg).unwrap();
        let again = anneal_sweep(&model, &times, &cfg).unwrap();
        assert_eq!(sweep_to_csv(&rows), sweep_to_csv(&again));
        assert!(sweep_to_csv(&rows).starts_with("time,gsp,fairness_shots,energy\n"));
        // Zero-time row samples the uniform state.
        assert!((rows[0].gsp - 6.0 / 8.0 * 1.0).abs() < 0.05 || rows[0].gsp <= 1.0);
    }

    #[test]
    fn sweep_energy_cools_with_time() {
        for id in ProblemId::ALL {
            let model = IsingModel::builtin(id);
            let cfg = SweepConfig {
                steps_per_unit_time: 40,
                shots: 512,
                seed: 9,
                fairness: FairnessConfig {
                    inner_loops: 20,
                    cap: 1_000,
                    ..FairnessConfig::gate_default()
                },
                ..Default::default()
            };
            let rows = anneal_sweep(&model, &[0.05, 20.0], &cfg).unwrap();
            assert!(
                rows[1].energy <= rows[0].energy + 1e-9,
                "problem {id:?}: {} vs {}",
                rows[1].energy,
                rows[0].energy
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let model = IsingModel::builtin(ProblemId::E);
        assert!(evolve(&model, 1.0, 0, &Schedule::linear()).is_err());
        assert!(evolve(&model, -1.0, 10, &Schedule::linear()).is_err());
        let cfg = SweepConfig::default();
        assert!(anneal_sweep(&model, &[], &cfg).is_err());
    }
}
