//! Python bindings for the fair-sampling workbench.
//!
//! Exposes the main types and operations: Ising models, circuit
//! construction, simulation, compilation, metrics, and annealing sweeps.
//! Basis states cross the boundary as qubit-0-first bitstrings, matching
//! the text formats of the core crate.

use std::collections::BTreeMap;
use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fairsamp_core::anneal::{anneal_sweep, evolve, sweep_to_csv, Schedule, SweepConfig};
use fairsamp_core::circuit::Circuit;
use fairsamp_core::compiler::{route_and_lower, verify_equivalence, CompileOptions};
use fairsamp_core::gmqaoa::{
    assemble_qaoa, build_grover_mixer, build_phase_separator, build_state_prep, fast_statevector,
    grid_search, QaoaParams, DEFAULT_GRID_RESOLUTION,
};
use fairsamp_core::ising::{format_bitstring, parse_bitstring, ComplementMode, IsingModel, Spin};
use fairsamp_core::metrics::{
    aggregate_error, fairness_nstr, ground_distribution, gsp, CalibrationData, FairnessConfig,
};
use fairsamp_core::sim::{expectation_energy, sample, simulate, SampleCounts};
use fairsamp_core::topology::Topology;

fn err(e: fairsamp_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An Ising Hamiltonian `H = -Σ J_ij Z_i Z_j - Σ h_i Z_i`.
#[pyclass(name = "IsingModel")]
#[derive(Clone)]
struct PyIsingModel {
    inner: IsingModel,
}

#[pymethods]
impl PyIsingModel {
    #[new]
    #[pyo3(signature = (n, quadratic, linear=vec![]))]
    fn new(
        n: usize,
        quadratic: Vec<(usize, usize, f64)>,
        linear: Vec<(usize, f64)>,
    ) -> PyResult<Self> {
        Ok(PyIsingModel {
            inner: IsingModel::new(n, quadratic, linear).map_err(err)?,
        })
    }

    /// Built-in problem by name: "a".."e".
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let id = name.parse().map_err(err)?;
        Ok(PyIsingModel {
            inner: IsingModel::builtin(id),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyIsingModel {
            inner: IsingModel::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn quadratic(&self) -> Vec<(usize, usize, f64)> {
        self.inner.quadratic.clone()
    }

    #[getter]
    fn linear(&self) -> Vec<(usize, f64)> {
        self.inner.linear.clone()
    }

    /// Energy of a qubit-0-first bitstring like "0110".
    fn energy(&self, config: &str) -> PyResult<f64> {
        self.inner.energy(config).map_err(err)
    }

    /// All minimizers (as bitstrings) and the minimum energy.
    fn ground_states(&self) -> PyResult<(Vec<String>, f64)> {
        let ground = self.inner.enumerate_ground_states().map_err(err)?;
        Ok((ground.bitstrings(), ground.energy))
    }

    /// Fix one qubit; returns the reduced model and the energy offset.
    #[pyo3(signature = (qubit=0, up=true))]
    fn fix_spin(&self, qubit: usize, up: bool) -> PyResult<(PyIsingModel, f64)> {
        let spin = if up { Spin::Up } else { Spin::Down };
        let (model, offset) = self.inner.fix_spin(qubit, spin).map_err(err)?;
        Ok((PyIsingModel { inner: model }, offset))
    }

    fn __repr__(&self) -> String {
        format!(
            "IsingModel(n={}, couplings={}, fields={})",
            self.inner.n,
            self.inner.quadratic.len(),
            self.inner.linear.len()
        )
    }
}

/// A gate-level circuit in the line-based text format.
#[pyclass(name = "Circuit")]
#[derive(Clone)]
struct PyCircuit {
    inner: Circuit,
}

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyCircuit {
            inner: Circuit::from_text(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn gate_count(&self) -> usize {
        self.inner.gates.len()
    }

    #[getter]
    fn gateset(&self) -> String {
        self.inner.gateset.name().to_string()
    }

    fn dagger(&self) -> PyResult<PyCircuit> {
        Ok(PyCircuit {
            inner: self.inner.dagger().map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(n={}, gates={}, gateset={})",
            self.inner.n,
            self.inner.gates.len(),
            self.inner.gateset.name()
        )
    }
}

/// Result of compiling onto a topology.
#[pyclass(name = "Compiled")]
struct PyCompiled {
    #[pyo3(get)]
    circuit: PyCircuit,
    #[pyo3(get)]
    swaps: usize,
    #[pyo3(get)]
    layout_in: Vec<usize>,
    #[pyo3(get)]
    layout_out: Vec<usize>,
    #[pyo3(get)]
    ancillas: Vec<usize>,
    #[pyo3(get)]
    equivalent: Option<bool>,
}

#[pyfunction]
fn state_prep(n: usize) -> PyCircuit {
    PyCircuit {
        inner: build_state_prep(n),
    }
}

#[pyfunction]
fn phase_separator(model: &PyIsingModel, gamma: f64) -> PyCircuit {
    PyCircuit {
        inner: build_phase_separator(&model.inner, gamma),
    }
}

#[pyfunction]
fn grover_mixer(n: usize, beta: f64) -> PyCircuit {
    PyCircuit {
        inner: build_grover_mixer(n, beta),
    }
}

/// Full GM-QAOA circuit with measurements.
#[pyfunction]
fn assemble(model: &PyIsingModel, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<PyCircuit> {
    let params = QaoaParams::new(betas, gammas).map_err(err)?;
    Ok(PyCircuit {
        inner: assemble_qaoa(&model.inner, &params),
    })
}

/// Matrix-free QAOA state probabilities, indexed by basis state.
#[pyfunction]
fn fast_probabilities(
    model: &PyIsingModel,
    betas: Vec<f64>,
    gammas: Vec<f64>,
) -> PyResult<Vec<f64>> {
    let params = QaoaParams::new(betas, gammas).map_err(err)?;
    Ok(fast_statevector(&model.inner, &params)
        .map_err(err)?
        .probabilities())
}

/// Grid search at π/60 (or a custom resolution); returns
/// `(beta, gamma, energy, gsp)`.
#[pyfunction]
#[pyo3(signature = (model, resolution=None))]
fn find_optimal_angles(
    model: &PyIsingModel,
    resolution: Option<f64>,
) -> PyResult<(f64, f64, f64, f64)> {
    let result = grid_search(
        &model.inner,
        resolution.unwrap_or(DEFAULT_GRID_RESOLUTION),
        1,
    )
    .map_err(err)?;
    Ok((
        result.params.betas[0],
        result.params.gammas[0],
        result.energy,
        result.gsp,
    ))
}

/// Simulate a circuit from |0…0⟩ and return basis-state probabilities.
#[pyfunction]
fn simulate_probabilities(circuit: &PyCircuit) -> PyResult<Vec<f64>> {
    Ok(simulate(&circuit.inner).map_err(err)?.probabilities())
}

/// Simulate and sample: bitstring → count.
#[pyfunction]
fn sample_counts(circuit: &PyCircuit, shots: u64, seed: u64) -> PyResult<HashMap<String, u64>> {
    let state = simulate(&circuit.inner).map_err(err)?;
    let counts = sample(&state, shots, seed);
    Ok(counts
        .counts
        .iter()
        .map(|(&s, &c)| (format_bitstring(s, counts.n), c))
        .collect())
}

/// `⟨H⟩` of a circuit's output state under a model.
#[pyfunction]
fn energy_expectation(circuit: &PyCircuit, model: &PyIsingModel) -> PyResult<f64> {
    let state = simulate(&circuit.inner).map_err(err)?;
    expectation_energy(&state, &model.inner).map_err(err)
}

fn counts_from_dict(counts: &HashMap<String, u64>, n: usize) -> PyResult<SampleCounts> {
    let mut out = SampleCounts::new(n);
    for (bits, &c) in counts {
        out.add(parse_bitstring(bits, n).map_err(err)?, c);
    }
    Ok(out)
}

/// Ground-state probability of counts under a model's ground set.
#[pyfunction]
#[pyo3(signature = (model, counts, combined=false))]
fn gsp_of_counts(
    model: &PyIsingModel,
    counts: HashMap<String, u64>,
    combined: bool,
) -> PyResult<f64> {
    let mode = if combined {
        ComplementMode::Combined
    } else {
        ComplementMode::Separate
    };
    let ground = model.inner.enumerate_ground_states().map_err(err)?.with_mode(mode);
    let counts = counts_from_dict(&counts, model.inner.n)?;
    Ok(gsp(&counts, &ground))
}

/// Number of shots to reject fair sampling; `None` when the search hits the
/// cap (the distribution is indistinguishable from fair).
#[pyfunction]
#[pyo3(signature = (model, counts, inner_loops=100_000, seed=1, combined=false))]
fn fairness_shots(
    model: &PyIsingModel,
    counts: HashMap<String, u64>,
    inner_loops: u64,
    seed: u64,
    combined: bool,
) -> PyResult<Option<u64>> {
    let mode = if combined {
        ComplementMode::Combined
    } else {
        ComplementMode::Separate
    };
    let ground = model.inner.enumerate_ground_states().map_err(err)?.with_mode(mode);
    let counts = counts_from_dict(&counts, model.inner.n)?;
    let distribution = ground_distribution(&counts, &ground);
    let cfg = FairnessConfig::with_inner_loops(inner_loops);
    Ok(fairness_nstr(&distribution, &cfg, seed)
        .map_err(err)?
        .shots())
}

/// Aggregate error of a circuit under calibration JSON.
#[pyfunction]
#[pyo3(signature = (circuit, calibration_json, include_readout=true))]
fn circuit_error(
    circuit: &PyCircuit,
    calibration_json: &str,
    include_readout: bool,
) -> PyResult<f64> {
    let calib = CalibrationData::from_json(calibration_json).map_err(err)?;
    aggregate_error(&circuit.inner, &calib, include_readout).map_err(err)
}

/// Compile onto a named topology ("lnn", "5t", "5p", "6a", "7h",
/// "clique<n>") or topology JSON.
#[pyfunction]
#[pyo3(signature = (circuit, topology, gateset="ibm", ancilla=None, seed=0, verify=false))]
fn compile_circuit(
    circuit: &PyCircuit,
    topology: &str,
    gateset: &str,
    ancilla: Option<usize>,
    seed: u64,
    verify: bool,
) -> PyResult<PyCompiled> {
    let topo = if topology.trim_start().starts_with('{') {
        Topology::from_json(topology).map_err(err)?
    } else {
        Topology::builtin(topology, Some(circuit.inner.n + ancilla.unwrap_or(1))).map_err(err)?
    };
    let compiled = route_and_lower(
        &circuit.inner,
        &topo,
        &CompileOptions {
            gateset: gateset.parse().map_err(err)?,
            ancilla_budget: ancilla,
            seed,
        },
    )
    .map_err(err)?;
    let equivalent = if verify {
        Some(verify_equivalence(&circuit.inner, &compiled).map_err(err)?)
    } else {
        None
    };
    Ok(PyCompiled {
        circuit: PyCircuit {
            inner: compiled.circuit.clone(),
        },
        swaps: compiled.swap_count,
        layout_in: compiled.layout_in,
        layout_out: compiled.layout_out,
        ancillas: compiled.ancillas,
        equivalent,
    })
}

/// Probabilities after annealing for a dimensionless time.
#[pyfunction]
#[pyo3(signature = (model, time, steps=None))]
fn anneal_probabilities(
    model: &PyIsingModel,
    time: f64,
    steps: Option<usize>,
) -> PyResult<Vec<f64>> {
    let steps = steps.unwrap_or_else(|| ((time * 100.0).ceil() as usize).max(1));
    Ok(evolve(&model.inner, time, steps, &Schedule::linear())
        .map_err(err)?
        .probabilities())
}

/// Sweep annealing times; returns the `time,gsp,fairness_shots,energy` CSV.
#[pyfunction]
#[pyo3(signature = (model, times, steps_per_unit=100, shots=8192, seed=1, inner_loops=1000, combined=false))]
fn anneal_csv(
    model: &PyIsingModel,
    times: Vec<f64>,
    steps_per_unit: usize,
    shots: u64,
    seed: u64,
    inner_loops: u64,
    combined: bool,
) -> PyResult<String> {
    let cfg = SweepConfig {
        steps_per_unit_time: steps_per_unit,
        shots,
        seed,
        fairness: FairnessConfig {
            inner_loops,
            ..FairnessConfig::anneal_default()
        },
        complement_mode: if combined {
            ComplementMode::Combined
        } else {
            ComplementMode::Separate
        },
        schedule: Schedule::linear(),
    };
    let rows = anneal_sweep(&model.inner, &times, &cfg).map_err(err)?;
    Ok(sweep_to_csv(&rows))
}

/// Ground-state distribution buckets of counts: bitstring → count.
#[pyfunction]
#[pyo3(signature = (model, counts, combined=false))]
fn ground_counts(
    model: &PyIsingModel,
    counts: HashMap<String, u64>,
    combined: bool,
) -> PyResult<BTreeMap<String, u64>> {
    let mode = if combined {
        ComplementMode::Combined
    } else {
        ComplementMode::Separate
    };
    let ground = model.inner.enumerate_ground_states().map_err(err)?.with_mode(mode);
    let counts = counts_from_dict(&counts, model.inner.n)?;
    Ok(ground_distribution(&counts, &ground)
        .iter()
        .map(|(&s, &c)| (format_bitstring(s, model.inner.n), c))
        .collect())
}

#[pyfunction]
fn builtin_topologies() -> Vec<&'static str> {
    Topology::builtin_names().to_vec()
}

#[pymodule]
fn _fairsamp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIsingModel>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyCompiled>()?;
    m.add_function(wrap_pyfunction!(state_prep, m)?)?;
    m.add_function(wrap_pyfunction!(phase_separator, m)?)?;
    m.add_function(wrap_pyfunction!(grover_mixer, m)?)?;
    m.add_function(wrap_pyfunction!(assemble, m)?)?;
    m.add_function(wrap_pyfunction!(fast_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(find_optimal_angles, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(sample_counts, m)?)?;
    m.add_function(wrap_pyfunction!(energy_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(gsp_of_counts, m)?)?;
    m.add_function(wrap_pyfunction!(fairness_shots, m)?)?;
    m.add_function(wrap_pyfunction!(circuit_error, m)?)?;
    m.add_function(wrap_pyfunction!(compile_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(anneal_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(anneal_csv, m)?)?;
    m.add_function(wrap_pyfunction!(ground_counts, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_topologies, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
