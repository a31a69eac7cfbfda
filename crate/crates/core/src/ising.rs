//! Ising Hamiltonians, energy evaluation, exhaustive ground-state search and
//! the spin-fixing symmetry reduction.
//!
//! Conventions used everywhere in this crate:
//!
//! - `H = -Σ J_ij Z_i Z_j - Σ h_i Z_i`
//! - spin ↑ is bit `0` and has Z eigenvalue `+1`; spin ↓ is bit `1` with
//!   eigenvalue `-1`,
//! - a basis state is a `usize` whose bit `i` is qubit `i`'s bit, and
//!   bitstrings are printed qubit-0-first (`"011"` means q0=↑, q1=↓, q2=↓).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest qubit count accepted by the exhaustive `2^n` scans.
pub const MAX_ENUM_QUBITS: usize = 24;

/// One spin value, used when fixing qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    /// Bit 0, Z eigenvalue +1.
    Up,
    /// Bit 1, Z eigenvalue -1.
    Down,
}

impl Spin {
    /// Z eigenvalue of this spin.
    pub fn z(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// The five built-in fair-sampling problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemId {
    A,
    B,
    C,
    D,
    E,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::A,
        ProblemId::B,
        ProblemId::C,
        ProblemId::D,
        ProblemId::E,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::A => "a",
            ProblemId::B => "b",
            ProblemId::C => "c",
            ProblemId::D => "d",
            ProblemId::E => "e",
        }
    }
}

impl std::str::FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ProblemId::A),
            "b" => Ok(ProblemId::B),
            "c" => Ok(ProblemId::C),
            "d" => Ok(ProblemId::D),
            "e" => Ok(ProblemId::E),
            other => Err(Error::Invalid {
                what: "problem id",
                reason: format!("unknown problem {other:?}, expected one of a..e"),
            }),
        }
    }
}

/// An Ising Hamiltonian `H = -Σ J_ij Z_i Z_j - Σ h_i Z_i`.
///
/// Couplers are stored exactly as given (not negated); the sign convention
/// lives in [`IsingModel::energy`] alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    /// Qubit count.
    pub n: usize,
    /// Quadratic couplings `(i, j, J_ij)` with `i < j`.
    pub quadratic: Vec<(usize, usize, f64)>,
    /// Linear fields `(i, h_i)`.
    #[serde(default)]
    pub linear: Vec<(usize, f64)>,
}

impl IsingModel {
    /// Build a model, validating the structural invariants.
    pub fn new(
        n: usize,
        quadratic: Vec<(usize, usize, f64)>,
        linear: Vec<(usize, f64)>,
    ) -> Result<Self> {
        let model = IsingModel {
            n,
            quadratic,
            linear,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::Invalid {
            what: "ising model",
            reason,
        };
        if self.n == 0 {
            return Err(invalid("qubit count must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        for &(i, j, _) in &self.quadratic {
            if i >= j {
                return Err(invalid(format!("coupling ({i},{j}) must have i < j")));
            }
            if j >= self.n {
                return Err(invalid(format!(
                    "coupling ({i},{j}) out of range for n={}",
                    self.n
                )));
            }
            if !seen.insert((i, j)) {
                return Err(invalid(format!("duplicate coupling ({i},{j})")));
            }
        }
        let mut seen_lin = BTreeSet::new();
        for &(i, _) in &self.linear {
            if i >= self.n {
                return Err(invalid(format!("field on qubit {i} out of range")));
            }
            if !seen_lin.insert(i) {
                return Err(invalid(format!("duplicate field on qubit {i}")));
            }
        }
        Ok(())
    }

    /// Parse from the JSON interchange format
    /// `{"n": int, "quadratic": [[i,j,J],...], "linear": [[i,h],...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: IsingModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ising model serializes")
    }

    /// Energy of a basis state given as an index (bit `i` = qubit `i`).
    ///
    /// Exact signed sum; no floating-point shortcuts.
    pub fn energy_of_index(&self, state: usize) -> f64 {
        let z = |q: usize| -> f64 {
            if (state >> q) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut e = 0.0;
        for &(i, j, coupling) in &self.quadratic {
            e -= coupling * z(i) * z(j);
        }
        for &(i, field) in &self.linear {
            e -= field * z(i);
        }
        e
    }

    /// Energy of a configuration written as a qubit-0-first bitstring.
    pub fn energy(&self, config: &str) -> Result<f64> {
        let state = parse_bitstring(config, self.n)?;
        Ok(self.energy_of_index(state))
    }

    /// All minimizers and the minimum energy, by exhaustive scan.
    pub fn enumerate_ground_states(&self) -> Result<GroundSet> {
        if self.n > MAX_ENUM_QUBITS {
            return Err(Error::TooManyQubits {
                op: "enumerate_ground_states",
                max: MAX_ENUM_QUBITS,
                n: self.n,
            });
        }
        let mut best = f64::INFINITY;
        let mut states = BTreeSet::new();
        for x in 0..(1usize << self.n) {
            let e = self.energy_of_index(x);
            if e < best {
                best = e;
                states.clear();
                states.insert(x);
            } else if e == best {
                states.insert(x);
            }
        }
        Ok(GroundSet {
            n: self.n,
            states,
            energy: best,
            complement_mode: ComplementMode::Separate,
        })
    }

    /// Fix one qubit to a spin value, producing a model on `n-1` qubits.
    ///
    /// Couplings touching the fixed qubit become linear fields on the other
    /// endpoint; a field on the fixed qubit becomes a constant energy offset,
    /// returned alongside the reduced model. Remaining indices shift down.
    pub fn fix_spin(&self, qubit: usize, value: Spin) -> Result<(IsingModel, f64)> {
        if qubit >= self.n {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                n: self.n,
            });
        }
        if self.n == 1 {
            return Err(Error::Invalid {
                what: "fix_spin",
                reason: "cannot reduce a 1-qubit model".into(),
            });
        }
        let shift = |q: usize| if q > qubit { q - 1 } else { q };
        let z = value.z();
        let mut offset = 0.0;
        let mut fields: Vec<(usize, f64)> = Vec::new();
        let mut add_field = |q: usize, h: f64| {
            if let Some(entry) = fields.iter_mut().find(|(i, _)| *i == q) {
                entry.1 += h;
            } else {
                fields.push((q, h));
            }
        };
        let mut quadratic = Vec::new();
        for &(i, j, coupling) in &self.quadratic {
            if i == qubit {
                add_field(shift(j), coupling * z);
            } else if j == qubit {
                add_field(shift(i), coupling * z);
            } else {
                quadratic.push((shift(i), shift(j), coupling));
            }
        }
        for &(i, field) in &self.linear {
            if i == qubit {
                offset -= field * z;
            } else {
                add_field(shift(i), field);
            }
        }
        fields.sort_by_key(|&(i, _)| i);
        let model = IsingModel::new(self.n - 1, quadratic, fields)?;
        Ok((model, offset))
    }

    /// The graph of qubit pairs coupled by a quadratic term.
    pub fn interaction_edges(&self) -> Vec<(usize, usize)> {
        self.quadratic.iter().map(|&(i, j, _)| (i, j)).collect()
    }

    /// Built-in Table-style problems (a)–(e), all quadratic, no fields.
    pub fn builtin(id: ProblemId) -> IsingModel {
        let (n, quadratic): (usize, Vec<(usize, usize, f64)>) = match id {
            ProblemId::A => (
                5,
                vec![
                    (0, 1, 1.0),
                    (0, 2, 1.0),
                    (0, 3, -1.0),
                    (1, 2, 1.0),
                    (1, 4, -1.0),
                    (2, 3, 1.0),
                    (2, 4, 1.0),
                    (3, 4, 1.0),
                ],
            ),
            ProblemId::B => (
                5,
                vec![
                    (0, 1, 2.0),
                    (0, 2, 1.0),
                    (0, 3, 2.0),
                    (0, 4, 1.0),
                    (1, 2, -2.0),
                    (1, 3, -1.0),
                    (1, 4, 1.0),
                    (2, 3, 1.0),
                    (2, 4, 2.0),
                    (3, 4, -2.0),
                ],
            ),
            ProblemId::C => (
                6,
                vec![
                    (0, 2, 1.0),
                    (1, 3, 1.0),
                    (2, 3, -1.0),
                    (2, 4, 1.0),
                    (2, 5, -1.0),
                    (3, 4, 1.0),
                    (3, 5, -1.0),
                    (4, 5, 1.0),
                ],
            ),
            ProblemId::D => (
                4,
                vec![(0, 1, 1.0), (1, 2, -1.0), (1, 3, -1.0), (2, 3, -1.0)],
            ),
            ProblemId::E => (3, vec![(0, 1, -1.0), (0, 2, -1.0), (1, 2, -1.0)]),
        };
        IsingModel {
            n,
            quadratic,
            linear: Vec::new(),
        }
    }

    /// Built-in problem reduced by fixing qubit 0 to ↑.
    pub fn builtin_reduced(id: ProblemId) -> IsingModel {
        Self::builtin(id)
            .fix_spin(0, Spin::Up)
            .expect("builtin models have n >= 3")
            .0
    }
}

/// How complements of ground states are treated when scoring samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplementMode {
    /// Each listed state is its own ground state.
    Separate,
    /// Each listed state is identified with its bitwise complement.
    Combined,
}

/// The set of minimizers of a model, with the minimum energy attained.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSet {
    /// Qubit count of the owning model.
    pub n: usize,
    /// Minimizers, ordered by basis-state value.
    pub states: BTreeSet<usize>,
    /// The minimum energy.
    pub energy: f64,
    pub complement_mode: ComplementMode,
}

impl GroundSet {
    /// Bitwise complement of a state under this set's qubit count.
    pub fn complement(&self, state: usize) -> usize {
        !state & ((1usize << self.n) - 1)
    }

    /// Whether a sampled state counts as a ground state under the mode.
    pub fn contains(&self, state: usize) -> bool {
        match self.complement_mode {
            ComplementMode::Separate => self.states.contains(&state),
            ComplementMode::Combined => {
                self.states.contains(&state) || self.states.contains(&self.complement(state))
            }
        }
    }

    /// A copy with the other complement mode.
    pub fn with_mode(&self, mode: ComplementMode) -> GroundSet {
        GroundSet {
            complement_mode: mode,
            ..self.clone()
        }
    }

    /// Canonical bucket label for fairness bucketing: in `Combined` mode a
    /// state and its complement share the bucket labelled by the smaller of
    /// the two values.
    pub fn bucket_of(&self, state: usize) -> usize {
        match self.complement_mode {
            ComplementMode::Separate => state,
            ComplementMode::Combined => state.min(self.complement(state)),
        }
    }

    /// All bucket labels, ordered.
    pub fn buckets(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.states.iter().map(|&s| self.bucket_of(s)).collect();
        set.into_iter().collect()
    }

    pub fn bitstrings(&self) -> Vec<String> {
        self.states
            .iter()
            .map(|&s| format_bitstring(s, self.n))
            .collect()
    }
}

/// Parse a qubit-0-first bitstring ("0" = ↑, "1" = ↓) into a basis index.
pub fn parse_bitstring(s: &str, n: usize) -> Result<usize> {
    if s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: s.len(),
        });
    }
    let mut state = 0usize;
    for (q, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => state |= 1 << q,
            other => {
                return Err(Error::Invalid {
                    what: "bitstring",
                    reason: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(state)
}

/// Format a basis index as a qubit-0-first bitstring.
pub fn format_bitstring(state: usize, n: usize) -> String {
    (0..n)
        .map(|q| if (state >> q) & 1 == 0 { '0' } else { '1' })
        .collect()
}
