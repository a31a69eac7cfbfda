//! Dense statevector simulation, measurement sampling and energy expectation.
//!
//! Gates are applied in place over the amplitude array with bit-masked
//! strides; basis index bit `i` is qubit `i`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::ising::{format_bitstring, IsingModel};
use crate::{Error, Result};

/// Largest qubit count the dense simulator accepts.
pub const MAX_SIM_QUBITS: usize = 24;

/// Complex amplitudes over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl Statevector {
    /// |↑…↑⟩ = |0…0⟩.
    pub fn zero_state(n: usize) -> Statevector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n, amps }
    }

    /// Equal superposition of all basis states.
    pub fn uniform(n: usize) -> Statevector {
        let amp = Complex64::new(1.0 / ((1usize << n) as f64).sqrt(), 0.0);
        Statevector {
            n,
            amps: vec![amp; 1 << n],
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, state: usize) -> f64 {
        self.amps[state].norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|`, 1 for equal states up to global phase.
    pub fn overlap(&self, other: &Statevector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Global-phase-aligned distance `min_φ ‖self − e^{iφ}·other‖`.
    pub fn distance_up_to_phase(&self, other: &Statevector) -> f64 {
        let overlap = self.overlap(other).min(1.0);
        (2.0 - 2.0 * overlap).max(0.0).sqrt()
    }

    /// Largest per-amplitude deviation after aligning the global phase.
    ///
    /// Unlike [`Statevector::distance_up_to_phase`] this has no √ε floor,
    /// so it resolves agreement down to machine precision.
    pub fn max_amp_diff_up_to_phase(&self, other: &Statevector) -> f64 {
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if inner.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            inner / inner.norm()
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest probability difference between equal basis states.
    pub fn max_prob_diff(&self, other: &Statevector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max)
    }
}

/// Apply one gate in place. Measure gates are ignored.
#[allow(clippy::needless_range_loop)]
pub fn apply_gate(amps: &mut [Complex64], gate: &Gate) {
    use GateKind::*;
    let len = amps.len();
    let phase = |t: f64| Complex64::from_polar(1.0, PI * t);
    match gate.kind {
        H | X | SqrtX | S | Sdg | T | Tdg | Rz(_) | Phase(_) => {
            let m = single_qubit_matrix(&gate.kind);
            let mask = 1usize << gate.qubits[0];
            for i in 0..len / 2 {
                let low = i & (mask - 1);
                let i0 = ((i >> gate.qubits[0]) << (gate.qubits[0] + 1)) | low;
                let i1 = i0 | mask;
                let a0 = amps[i0];
                let a1 = amps[i1];
                amps[i0] = m[0] * a0 + m[1] * a1;
                amps[i1] = m[2] * a0 + m[3] * a1;
            }
        }
        Cnot => {
            let c = 1usize << gate.qubits[0];
            let t = 1usize << gate.qubits[1];
            for x in 0..len {
                if x & c != 0 && x & t == 0 {
                    amps.swap(x, x | t);
                }
            }
        }
        Toffoli => {
            let c1 = 1usize << gate.qubits[0];
            let c2 = 1usize << gate.qubits[1];
            let t = 1usize << gate.qubits[2];
            for x in 0..len {
                if x & c1 != 0 && x & c2 != 0 && x & t == 0 {
                    amps.swap(x, x | t);
                }
            }
        }
        Swap => {
            let a = 1usize << gate.qubits[0];
            let b = 1usize << gate.qubits[1];
            for x in 0..len {
                if x & a != 0 && x & b == 0 {
                    amps.swap(x, (x & !a) | b);
                }
            }
        }
        ControlledPhase(t) => {
            let mask = (1usize << gate.qubits[0]) | (1usize << gate.qubits[1]);
            let p = phase(t);
            for x in 0..len {
                if x & mask == mask {
                    amps[x] *= p;
                }
            }
        }
        MultiControlledPhase(t) => {
            let mask = gate
                .qubits
                .iter()
                .fold(0usize, |acc, &q| acc | (1usize << q));
            let p = phase(t);
            for x in 0..len {
                if x & mask == mask {
                    amps[x] *= p;
                }
            }
        }
        Measure => {}
    }
}

fn single_qubit_matrix(kind: &GateKind) -> [Complex64; 4] {
    use GateKind::*;
    let c = Complex64::new;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        H => [c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
        X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        SqrtX => [
            c(0.5, 0.5),
            c(0.5, -0.5),
            c(0.5, -0.5),
            c(0.5, 0.5),
        ],
        S => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        Sdg => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)],
        T => [
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, PI / 4.0),
        ],
        Tdg => [
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, -PI / 4.0),
        ],
        Rz(theta) => [
            Complex64::from_polar(1.0, -theta / 2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, theta / 2.0),
        ],
        Phase(t) => [
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, PI * t),
        ],
        other => unreachable!("not a single-qubit matrix gate: {other:?}"),
    }
}

/// Run a circuit on |↑^n⟩. Measure gates are ignored for the state output.
pub fn simulate(circuit: &Circuit) -> Result<Statevector> {
    if circuit.n > MAX_SIM_QUBITS {
        return Err(Error::TooManyQubits {
            op: "simulate",
            max: MAX_SIM_QUBITS,
            n: circuit.n,
        });
    }
    let mut state = Statevector::zero_state(circuit.n);
    for gate in &circuit.gates {
        apply_gate(&mut state.amps, gate);
    }
    Ok(state)
}

/// Shot counts over measured basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCounts {
    pub n: usize,
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl SampleCounts {
    pub fn new(n: usize) -> SampleCounts {
        SampleCounts {
            n,
            shots: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, state: usize, count: u64) {
        *self.counts.entry(state).or_insert(0) += count;
        self.shots += count;
    }

    /// JSON object keyed by qubit-0-first bitstrings.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, u64> = self
            .counts
            .iter()
            .map(|(&s, &c)| (format_bitstring(s, self.n), c))
            .collect();
        serde_json::to_string_pretty(&map).expect("counts serialize")
    }

    /// CSV lines `bitstring,count` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (&s, &c) in &self.counts {
            out.push_str(&format!("{},{}\n", format_bitstring(s, self.n), c));
        }
        out
    }

    /// Parse the JSON object form (inverse of [`SampleCounts::to_json`]).
    pub fn from_json(text: &str, n: usize) -> Result<SampleCounts> {
        let map: BTreeMap<String, u64> = serde_json::from_str(text)?;
        let mut counts = SampleCounts::new(n);
        for (bits, c) in map {
            counts.add(crate::ising::parse_bitstring(&bits, n)?, c);
        }
        Ok(counts)
    }
}

/// Multinomial draw of `shots` outcomes from `|a_x|²`, reproducible by seed.
///
/// The generator is ChaCha8 keyed by `seed`; each shot consumes one uniform
/// and inverts the cumulative distribution.
pub fn sample(state: &Statevector, shots: u64, seed: u64) -> SampleCounts {
    let mut cumulative = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = SampleCounts::new(state.n);
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u);
        counts.add(idx.min(state.amps.len() - 1), 1);
    }
    counts
}

/// `Σ_x |a_x|² · E(x)` for a model on the same qubit count.
pub fn expectation_energy(state: &Statevector, model: &IsingModel) -> Result<f64> {
    if state.n != model.n {
        return Err(Error::LengthMismatch {
            expected: model.n,
            got: state.n,
        });
    }
    Ok(state
        .amps
        .iter()
        .enumerate()
        .map(|(x, a)| a.norm_sqr() * model.energy_of_index(x))
        .sum())
}

/// Empirical mean energy of sampled counts.
pub fn empirical_energy(counts: &SampleCounts, model: &IsingModel) -> Result<f64> {
    if counts.n != model.n {
        return Err(Error::LengthMismatch {
            expected: model.n,
            got: counts.n,
        });
    }
    if counts.shots == 0 {
        return Ok(0.0);
    }
    let total: f64 = counts
        .counts
        .iter()
        .map(|(&x, &c)| c as f64 * model.energy_of_index(x))
        .sum();
    Ok(total / counts.shots as f64)
}
