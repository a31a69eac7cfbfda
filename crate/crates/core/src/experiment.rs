//! The end-to-end experiment protocol: build, optionally compile, simulate,
//! sample repeatedly with derived seeds, and emit machine-readable results.
//!
//! Output files use fixed names inside the chosen directory —
//! `summary.json`, `calls.csv`, `circuit.txt` — and are only written after
//! the whole run has succeeded.

use std::path::Path;

use serde_json::json;

use crate::anneal::derive_seed;
use crate::circuit::Gateset;
use crate::compiler::{route_and_lower, CompileOptions, CompiledCircuit};
use crate::gmqaoa::{assemble_qaoa, grid_search, QaoaParams, DEFAULT_GRID_RESOLUTION};
use crate::ising::{GroundSet, IsingModel, ProblemId, Spin};
use crate::metrics::{
    aggregate_error, fairness_nstr, ground_distribution, gsp, CalibrationData, FairnessConfig,
    FairnessResult,
};
use crate::sim::{empirical_energy, sample, simulate, SampleCounts, Statevector};
use crate::topology::Topology;
use crate::{Error, Result};

/// How the angles are chosen.
#[derive(Debug, Clone)]
pub enum AngleSpec {
    Explicit(QaoaParams),
    /// Fine grid search at [`DEFAULT_GRID_RESOLUTION`], p = 1.
    GridSearch,
}

/// Everything one experiment run needs.
pub struct ExperimentSpec {
    pub problem: ProblemId,
    /// Fix q0 := ↑ first.
    pub reduce: bool,
    pub angles: AngleSpec,
    pub topology: Option<Topology>,
    pub gateset: Gateset,
    pub ancilla_budget: Option<usize>,
    pub shots: u64,
    pub repeats: u64,
    pub seed: u64,
    pub fairness: FairnessConfig,
    pub calibration: Option<CalibrationData>,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemId) -> ExperimentSpec {
        ExperimentSpec {
            problem,
            reduce: false,
            angles: AngleSpec::GridSearch,
            topology: None,
            gateset: Gateset::IbmNative,
            ancilla_budget: None,
            shots: 8192,
            repeats: 20,
            seed: 1,
            fairness: FairnessConfig::gate_default(),
            calibration: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.shots == 0 || self.repeats == 0 {
            return Err(Error::Invalid {
                what: "experiment",
                reason: "shots and repeats must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Metrics of one call.
#[derive(Debug, Clone)]
pub struct CallRecord {
    pub call: u64,
    pub gsp: f64,
    pub fairness: FairnessResult,
    pub energy: f64,
}

/// Everything a run produces, ready to be written or inspected.
pub struct ExperimentOutput {
    pub params: QaoaParams,
    pub calls: Vec<CallRecord>,
    pub exact_gsp: f64,
    pub exact_energy: f64,
    pub aggregate_error: Option<f64>,
    pub swap_count: Option<usize>,
    pub circuit_text: String,
    pub summary_json: String,
    pub calls_csv: String,
}

/// Run the protocol: build → (compile) → simulate → sample `repeats` times
/// with counter-derived seeds → per-call GSP, fairness and empirical energy.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let full = IsingModel::builtin(spec.problem);
    let (model, offset) = if spec.reduce {
        full.fix_spin(0, Spin::Up)?
    } else {
        (full, 0.0)
    };
    let ground = model.enumerate_ground_states()?;

    let (params, grid_info) = match &spec.angles {
        AngleSpec::Explicit(p) => (p.clone(), None),
        AngleSpec::GridSearch => {
            let result = grid_search(&model, DEFAULT_GRID_RESOLUTION, 1)?;
            (result.params.clone(), Some((result.energy, result.gsp)))
        }
    };
    let abstract_circuit = assemble_qaoa(&model, &params);

    // Simulate, on hardware wires when a topology is given.
    let compiled: Option<CompiledCircuit> = match &spec.topology {
        Some(topo) => Some(route_and_lower(
            &abstract_circuit,
            topo,
            &CompileOptions {
                gateset: spec.gateset,
                ancilla_budget: spec.ancilla_budget,
                seed: spec.seed,
            },
        )?),
        None => None,
    };
    let (state, layout_out): (Statevector, Option<&[usize]>) = match &compiled {
        Some(c) => (simulate(&c.circuit)?, Some(&c.layout_out)),
        None => (simulate(&abstract_circuit)?, None),
    };

    let probs = logical_probabilities(&state, layout_out, model.n);
    let exact_gsp: f64 = ground.states.iter().map(|&s| probs[s]).sum();
    let exact_energy: f64 = probs
        .iter()
        .enumerate()
        .map(|(x, p)| p * model.energy_of_index(x))
        .sum();

    let error_rate = match &spec.calibration {
        Some(calib) => {
            let circuit = compiled
                .as_ref()
                .map(|c| &c.circuit)
                .unwrap_or(&abstract_circuit);
            Some(aggregate_error(circuit, calib, true)?)
        }
        None => None,
    };

    let mut calls = Vec::with_capacity(spec.repeats as usize);
    for call in 0..spec.repeats {
        let counts_raw = sample(&state, spec.shots, derive_seed(spec.seed, 2 * call));
        let counts = project_counts(&counts_raw, layout_out, model.n);
        let distribution = ground_distribution(&counts, &ground);
        let fairness = fairness_nstr(
            &distribution,
            &spec.fairness,
            derive_seed(spec.seed, 2 * call + 1),
        )?;
        calls.push(CallRecord {
            call,
            gsp: gsp(&counts, &ground),
            fairness,
            energy: empirical_energy(&counts, &model)?,
        });
    }

    let circuit_text = compiled
        .as_ref()
        .map(|c| c.circuit.to_text())
        .unwrap_or_else(|| abstract_circuit.to_text());
    let calls_csv = render_calls_csv(&calls);
    let summary_json = render_summary(
        spec, &model, &ground, offset, &params, grid_info, exact_gsp, exact_energy, error_rate,
        compiled.as_ref(), &calls,
    );

    Ok(ExperimentOutput {
        params,
        calls,
        exact_gsp,
        exact_energy,
        aggregate_error: error_rate,
        swap_count: compiled.as_ref().map(|c| c.swap_count),
        circuit_text,
        summary_json,
        calls_csv,
    })
}

/// Marginal probabilities of the logical wires (identity when no layout).
fn logical_probabilities(state: &Statevector, layout: Option<&[usize]>, n_logical: usize) -> Vec<f64> {
    match layout {
        None => state.probabilities(),
        Some(map) => {
            let mut probs = vec![0.0; 1 << n_logical];
            for (phys_state, amp) in state.amps.iter().enumerate() {
                let p = amp.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let mut logical = 0usize;
                for (l, &w) in map.iter().enumerate() {
                    if (phys_state >> w) & 1 == 1 {
                        logical |= 1 << l;
                    }
                }
                probs[logical] += p;
            }
            probs
        }
    }
}

/// Project sampled physical basis states onto the logical wires.
fn project_counts(counts: &SampleCounts, layout: Option<&[usize]>, n_logical: usize) -> SampleCounts {
    match layout {
        None => counts.clone(),
        Some(map) => {
            let mut out = SampleCounts::new(n_logical);
            for (&phys_state, &c) in &counts.counts {
                let mut logical = 0usize;
                for (l, &w) in map.iter().enumerate() {
                    if (phys_state >> w) & 1 == 1 {
                        logical |= 1 << l;
                    }
                }
                out.add(logical, c);
            }
            out
        }
    }
}

fn render_calls_csv(calls: &[CallRecord]) -> String {
    let mut out = String::from("call,gsp,fairness_shots,energy\n");
    for record in calls {
        out.push_str(&format!(
            "{},{:.6},{},{:.6}\n",
            record.call, record.gsp, record.fairness, record.energy
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn render_summary(
    spec: &ExperimentSpec,
    model: &IsingModel,
    ground: &GroundSet,
    offset: f64,
    params: &QaoaParams,
    grid_info: Option<(f64, f64)>,
    exact_gsp: f64,
    exact_energy: f64,
    error_rate: Option<f64>,
    compiled: Option<&CompiledCircuit>,
    calls: &[CallRecord],
) -> String {
    let gsps: Vec<f64> = calls.iter().map(|c| c.gsp).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut summary = json!({
        "problem": spec.problem.name(),
        "reduced": spec.reduce,
        "qubits": model.n,
        "energy_offset": offset,
        "ground_states": ground.bitstrings(),
        "ground_energy": ground.energy,
        "angles": {
            "betas": params.betas,
            "gammas": params.gammas,
        },
        "shots": spec.shots,
        "repeats": spec.repeats,
        "seed": spec.seed,
        "fairness_inner_loops": spec.fairness.inner_loops,
        "exact": {
            "gsp": exact_gsp,
            "energy": exact_energy,
        },
        "calls": {
            "mean_gsp": mean(&gsps),
            "min_gsp": gsps.iter().copied().fold(f64::INFINITY, f64::min),
            "max_gsp": gsps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "fairness": calls.iter().map(|c| c.fairness.to_string()).collect::<Vec<_>>(),
        },
    });
    let object = summary.as_object_mut().expect("summary is an object");
    if let Some((energy, gsp)) = grid_info {
        object.insert("grid_search".into(), json!({"energy": energy, "gsp": gsp}));
    }
    if let Some(topo) = &spec.topology {
        object.insert("topology".into(), json!(topo.name));
        object.insert("gateset".into(), json!(spec.gateset.name()));
    }
    if let Some(c) = compiled {
        object.insert(
            "compiled".into(),
            json!({
                "swaps": c.swap_count,
                "gates": c.circuit.gates.len(),
                "layout_in": c.layout_in,
                "layout_out": c.layout_out,
                "ancillas": c.ancillas,
            }),
        );
    }
    if let Some(e) = error_rate {
        object.insert("aggregate_error".into(), json!(e));
    }
    serde_json::to_string_pretty(&summary).expect("summary serializes")
}

/// Write the three fixed-name output files.
pub fn write_experiment(out_dir: &Path, output: &ExperimentOutput) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("summary.json"), &output.summary_json)?;
    std::fs::write(out_dir.join("calls.csv"), &output.calls_csv)?;
    std::fs::write(out_dir.join("circuit.txt"), &output.circuit_text)?;
    Ok(())
}
