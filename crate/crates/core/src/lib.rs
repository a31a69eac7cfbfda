//! Workbench for building, compiling, simulating and statistically evaluating
//! Grover-mixer QAOA circuits and annealing evolutions on small Ising models
//! with degenerate ground states.
//!
//! The crate is organized around a handful of value types:
//!
//! - [`ising::IsingModel`] — couplings/fields defining the cost Hamiltonian,
//! - [`circuit::Circuit`] — an ordered gate list with a gateset tag,
//! - [`sim::Statevector`] / [`sim::SampleCounts`] — simulation results,
//! - [`topology::Topology`] / [`compiler::CompiledCircuit`] — hardware maps,
//! - [`metrics::CalibrationData`] — per-gate error rates.
//!
//! Everything is deterministic given explicit seeds.

pub mod anneal;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod experiment;
pub mod gmqaoa;
pub mod ising;
pub mod metrics;
pub mod sim;
pub mod topology;
pub mod unitary;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
