//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model, circuit or topology violated a structural invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// A configuration bitstring did not match the model's qubit count.
    #[error("configuration length {got} does not match qubit count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// An operation was asked to handle more qubits than it supports.
    #[error("{op} supports at most {max} qubits, got {n}")]
    TooManyQubits {
        op: &'static str,
        max: usize,
        n: usize,
    },

    /// A qubit index was out of range.
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    /// Measure gates are not allowed in unitary contexts.
    #[error("circuit contains Measure gates, which {op} does not accept")]
    MeasureNotAllowed { op: &'static str },

    /// The compiler could not fit or route a circuit on the topology.
    #[error("routing failed: {0}")]
    Unroutable(String),

    /// Not enough ancilla qubits for the chosen decomposition.
    #[error("ancilla budget exhausted: {0}")]
    AncillaBudget(String),

    /// A gate or qubit had no calibration entry and no class default.
    #[error("missing calibration entry for {0}")]
    MissingCalibration(String),

    /// The fairness metric needs at least two ground states with counts.
    #[error("degenerate fairness input: {0}")]
    DegenerateInput(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
