//! Topology-aware compilation: decomposition of multi-qubit gates, SWAP
//! routing with tracked layouts, native-gateset lowering, peephole
//! cancellation, and an exact equivalence oracle.
//!
//! The compiler never restores the original qubit assignment after a SWAP;
//! it tracks the permutation instead and reports it in the output layout.

use std::collections::BTreeSet;

use crate::circuit::{Circuit, Gate, GateKind, Gateset};
use crate::topology::{embed_layout, Topology};
use crate::unitary::{unitary_of, Matrix, MAX_UNITARY_QUBITS};
use crate::{Error, Result};

/// Equivalence tolerance for compiled circuits.
pub const EQUIV_TOL: f64 = 1e-8;

/// Options for [`route_and_lower`].
#[derive(Debug, Clone)]
pub struct CompileOptions {
    pub gateset: Gateset,
    /// Cap on ancilla qubits; `None` means all free physical qubits.
    pub ancilla_budget: Option<usize>,
    /// Seed for the layout search.
    pub seed: u64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            gateset: Gateset::IbmNative,
            ancilla_budget: None,
            seed: 0,
        }
    }
}

/// A topology-valid native circuit with its tracked layouts.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    /// Gates over physical wires `0..topology.len()`.
    pub circuit: Circuit,
    /// Physical wire of logical qubit `i` at circuit start.
    pub layout_in: Vec<usize>,
    /// Physical wire of logical qubit `i` at circuit end.
    pub layout_out: Vec<usize>,
    /// Physical wires that held ancillas at start or end.
    pub ancillas: Vec<usize>,
    /// Routing SWAPs inserted (before lowering to CNOTs).
    pub swap_count: usize,
}

/// Compile an abstract circuit onto a topology in a native gateset.
///
/// Pipeline: decompose multi-qubit gates to {1q, CNOT, CPhase, SWAP} —
/// allocating AND-ancillas for large multi-controlled phases when qubits are
/// free — pick an initial layout (embedding the interaction graph when
/// possible), route 2-qubit gates with greedy SWAPs along shortest paths,
/// lower to the native set, and cancel redundant gates. When the circuit
/// ends in measurements, diagonal gates trailing into a measurement are
/// deleted (they affect phase, not probability).
pub fn route_and_lower(
    circuit: &Circuit,
    topo: &Topology,
    opts: &CompileOptions,
) -> Result<CompiledCircuit> {
    if circuit.gateset != Gateset::Abstract {
        return Err(Error::Invalid {
            what: "route_and_lower",
            reason: "input circuit must be abstract".into(),
        });
    }
    let n_logical = circuit.n;
    let n_phys = topo.len();
    if n_logical > n_phys {
        return Err(Error::Unroutable(format!(
            "{n_logical} logical qubits do not fit on {n_phys} nodes"
        )));
    }
    let free = n_phys - n_logical;
    let budget = match opts.ancilla_budget {
        Some(b) if b > free => {
            return Err(Error::AncillaBudget(format!(
                "{n_logical} logical + {b} ancilla qubits exceed {n_phys} nodes"
            )));
        }
        Some(b) => b,
        None => free,
    };

    // 1. Decompose to 1q gates, CNOT, CPhase and SWAP on logical wires;
    //    ancillas get fresh logical ids n_logical, n_logical+1, ...
    let mut anc = AncillaPool::new(n_logical, budget);
    let mut flat: Vec<Gate> = Vec::new();
    for gate in &circuit.gates {
        decompose_gate(gate, &mut anc, &mut flat);
    }
    let n_tracked = n_logical + anc.used();

    // 2. Initial layout: embed the 2-qubit interaction graph if possible,
    //    else match degree-sorted logical wires to degree-sorted nodes.
    let mut interaction: BTreeSet<(usize, usize)> = BTreeSet::new();
    for gate in &flat {
        if gate.qubits.len() == 2 && gate.kind != GateKind::Measure {
            let (a, b) = (gate.qubits[0], gate.qubits[1]);
            interaction.insert((a.min(b), a.max(b)));
        }
    }
    let interaction: Vec<(usize, usize)> = interaction.into_iter().collect();
    let full_layout_in = match embed_layout(&interaction, n_tracked, topo, opts.seed) {
        Some(layout) => layout,
        None => fallback_layout(&interaction, n_tracked, topo),
    };

    // 3. Route on physical wires, inserting SWAPs and tracking the layout.
    let mut layout = full_layout_in.clone();
    let mut occupant: Vec<Option<usize>> = vec![None; n_phys];
    for (logical, &phys) in layout.iter().enumerate() {
        occupant[phys] = Some(logical);
    }
    let mut routed: Vec<Gate> = Vec::new();
    let mut swap_count = 0usize;
    for gate in &flat {
        match gate.qubits.len() {
            1 => routed.push(Gate::new(gate.kind, vec![layout[gate.qubits[0]]])),
            2 => {
                let (la, lb) = (gate.qubits[0], gate.qubits[1]);
                let (mut pa, pb) = (layout[la], layout[lb]);
                if !topo.has_edge(pa, pb) {
                    let path = topo.shortest_path(pa, pb).ok_or_else(|| {
                        Error::Unroutable(format!("no path between nodes {pa} and {pb}"))
                    })?;
                    // Move the first operand along the path until adjacent.
                    for &next in &path[1..path.len() - 1] {
                        routed.push(Gate::new(GateKind::Swap, vec![pa, next]));
                        swap_count += 1;
                        let a = occupant[pa];
                        let b = occupant[next];
                        occupant[pa] = b;
                        occupant[next] = a;
                        if let Some(l) = a {
                            layout[l] = next;
                        }
                        if let Some(l) = b {
                            layout[l] = pa;
                        }
                        pa = next;
                    }
                }
                routed.push(Gate::new(gate.kind, vec![layout[la], layout[lb]]));
            }
            _ => unreachable!("decomposition leaves only 1- and 2-qubit gates"),
        }
    }
    let layout_in: Vec<usize> = full_layout_in[..n_logical].to_vec();
    let layout_out: Vec<usize> = layout[..n_logical].to_vec();
    let ancillas: Vec<usize> = {
        let mut set = BTreeSet::new();
        for l in n_logical..n_tracked {
            set.insert(full_layout_in[l]);
            set.insert(layout[l]);
        }
        set.into_iter().collect()
    };

    // 4. Lower to the native gateset.
    let mut lowered: Vec<Gate> = Vec::new();
    for gate in &routed {
        lower_gate(gate, opts.gateset, &mut lowered);
    }

    // 5. Peephole cancellation, then measurement-basis simplification.
    let mut gates = peephole(lowered);
    if circuit.has_measure() {
        gates = drop_diagonals_before_measure(gates);
        gates = peephole(gates);
    }

    let compiled = Circuit {
        n: n_phys,
        gates,
        gateset: opts.gateset,
        out_permutation: layout_out.clone(),
    };
    debug_assert!(compiled.validate(Some(topo)).is_empty());
    Ok(CompiledCircuit {
        circuit: compiled,
        layout_in,
        layout_out,
        ancillas,
        swap_count,
    })
}

struct AncillaPool {
    n_logical: usize,
    next: usize,
    remaining: usize,
}

impl AncillaPool {
    fn new(n_logical: usize, budget: usize) -> AncillaPool {
        AncillaPool {
            n_logical,
            next: n_logical,
            remaining: budget,
        }
    }

    fn alloc(&mut self) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let id = self.next;
        self.next += 1;
        Some(id)
    }

    fn used(&self) -> usize {
        self.next - self.n_logical
    }
}

/// Decompose one abstract gate into {1q, CNOT, CPhase, SWAP, Measure}.
fn decompose_gate(gate: &Gate, anc: &mut AncillaPool, out: &mut Vec<Gate>) {
    use GateKind::*;
    match gate.kind {
        H | X | SqrtX | S | Sdg | T | Tdg | Rz(_) | Phase(_) | Measure | Cnot
        | ControlledPhase(_) | Swap => out.push(gate.clone()),
        Toffoli => {
            emit_toffoli(gate.qubits[0], gate.qubits[1], gate.qubits[2], false, out);
        }
        MultiControlledPhase(t) => {
            decompose_mcp(t, &gate.qubits, anc, out);
        }
    }
}

/// Multi-controlled `Z^t` on `qubits` (symmetric). Strategy:
///
/// - 1 operand: plain phase; 2 operands: controlled phase;
/// - with ≥ 3 controls and an ancilla available, fold two controls into the
///   ancilla holding their logical AND (a Toffoli pair around the rest);
/// - otherwise recurse: `CP(t/2)` on (last control, target), an MCX pair on
///   the controls around `CP(−t/2)`, and a smaller `MCP(t/2)`.
fn decompose_mcp(t: f64, qubits: &[usize], anc: &mut AncillaPool, out: &mut Vec<Gate>) {
    use GateKind::*;
    match qubits.len() {
        0 => {}
        1 => out.push(Gate::new(Phase(t), vec![qubits[0]])),
        2 => out.push(Gate::new(ControlledPhase(t), vec![qubits[0], qubits[1]])),
        m => {
            let controls = &qubits[..m - 1];
            let target = qubits[m - 1];
            if controls.len() >= 3 {
                if let Some(a) = anc.alloc() {
                    // AND(first two controls) into the ancilla, recurse, uncompute.
                    emit_toffoli(controls[0], controls[1], a, false, out);
                    let mut inner: Vec<usize> = vec![a];
                    inner.extend_from_slice(&controls[2..]);
                    inner.push(target);
                    decompose_mcp(t, &inner, anc, out);
                    emit_toffoli(controls[0], controls[1], a, true, out);
                    return;
                }
            }
            // Recursion on the last control `c`.
            let c = controls[m - 2];
            let rest = &controls[..m - 2];
            out.push(Gate::new(ControlledPhase(t / 2.0), vec![c, target]));
            emit_mcx(rest, c, false, anc, out);
            out.push(Gate::new(ControlledPhase(-t / 2.0), vec![c, target]));
            emit_mcx(rest, c, true, anc, out);
            let mut smaller: Vec<usize> = rest.to_vec();
            smaller.push(target);
            decompose_mcp(t / 2.0, &smaller, anc, out);
        }
    }
}

/// Multi-controlled X. For ≥ 3 controls, conjugate an MCP(1) by Hadamards on
/// the target. `inverted` emits the exact inverse gate sequence, so paired
/// calls cancel through interposed diagonal gates.
fn emit_mcx(
    controls: &[usize],
    target: usize,
    inverted: bool,
    anc: &mut AncillaPool,
    out: &mut Vec<Gate>,
) {
    use GateKind::*;
    match controls.len() {
        0 => out.push(Gate::new(X, vec![target])),
        1 => out.push(Gate::new(Cnot, vec![controls[0], target])),
        2 => emit_toffoli(controls[0], controls[1], target, inverted, out),
        _ => {
            let mut tmp = vec![Gate::new(H, vec![target])];
            let mut operands: Vec<usize> = controls.to_vec();
            operands.push(target);
            decompose_mcp(1.0, &operands, anc, &mut tmp);
            tmp.push(Gate::new(H, vec![target]));
            if inverted {
                for gate in tmp.iter().rev() {
                    out.extend(gate.inverse().expect("no measures here"));
                }
            } else {
                out.extend(tmp);
            }
        }
    }
}

/// Toffoli as an H-conjugated doubly-controlled Z built from controlled
/// phases: `CCZ = CS(b,c)·CX(a,b)·CS†(b,c)·CX(a,b)·CS(a,c)`.
///
/// `inverted` emits the inverse sequence; since `CCX† = CCX`, both orders
/// are valid Toffolis, and pairing a normal with an inverted copy lets the
/// inner controlled-S gates of the two implementations cancel through any
/// diagonal gates between them.
fn emit_toffoli(a: usize, b: usize, c: usize, inverted: bool, out: &mut Vec<Gate>) {
    use GateKind::*;
    let mut seq = vec![
        Gate::new(H, vec![c]),
        Gate::new(ControlledPhase(0.5), vec![b, c]),
        Gate::new(Cnot, vec![a, b]),
        Gate::new(ControlledPhase(-0.5), vec![b, c]),
        Gate::new(Cnot, vec![a, b]),
        Gate::new(ControlledPhase(0.5), vec![a, c]),
        Gate::new(H, vec![c]),
    ];
    if inverted {
        seq.reverse();
        seq = seq
            .into_iter()
            .flat_map(|g| g.inverse().expect("no measures"))
            .collect();
    }
    out.extend(seq);
}

/// Deterministic fallback when no embedding exists: pair logical wires with
/// physical nodes in decreasing interaction/connectivity degree.
fn fallback_layout(interaction: &[(usize, usize)], n: usize, topo: &Topology) -> Vec<usize> {
    let mut logical_degree = vec![0usize; n];
    for &(a, b) in interaction {
        logical_degree[a] += 1;
        logical_degree[b] += 1;
    }
    let mut logical: Vec<usize> = (0..n).collect();
    logical.sort_by_key(|&v| (usize::MAX - logical_degree[v], v));
    let mut nodes: Vec<usize> = (0..topo.len()).collect();
    nodes.sort_by_key(|&p| (usize::MAX - topo.degree(p), p));
    let mut layout = vec![0usize; n];
    for (rank, &l) in logical.iter().enumerate() {
        layout[l] = nodes[rank];
    }
    layout
}

/// Lower one routed gate to the target gateset.
fn lower_gate(gate: &Gate, gateset: Gateset, out: &mut Vec<Gate>) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use GateKind::*;
    let q = gate.qubits.clone();
    match gateset {
        Gateset::Abstract => out.push(gate.clone()),
        Gateset::IbmNative => match gate.kind {
            X | SqrtX | Rz(_) | Cnot | Measure => out.push(gate.clone()),
            H => {
                // H = S·√X·S up to global phase; S as Rz(π/2).
                out.push(Gate::new(Rz(FRAC_PI_2), q.clone()));
                out.push(Gate::new(SqrtX, q.clone()));
                out.push(Gate::new(Rz(FRAC_PI_2), q));
            }
            S => out.push(Gate::new(Rz(FRAC_PI_2), q)),
            Sdg => out.push(Gate::new(Rz(-FRAC_PI_2), q)),
            T => out.push(Gate::new(Rz(FRAC_PI_4), q)),
            Tdg => out.push(Gate::new(Rz(-FRAC_PI_4), q)),
            Phase(t) => out.push(Gate::new(Rz(PI * t), q)),
            ControlledPhase(t) => lower_cphase(t, q[0], q[1], out),
            Swap => lower_swap(q[0], q[1], out),
            Toffoli | MultiControlledPhase(_) => {
                unreachable!("decomposition removed multi-qubit phases")
            }
        },
        Gateset::GenericNative => match gate.kind {
            H | S | Sdg | T | Tdg | Rz(_) | Cnot | Measure => out.push(gate.clone()),
            X => {
                out.push(Gate::new(H, q.clone()));
                out.push(Gate::new(Rz(PI), q.clone()));
                out.push(Gate::new(H, q));
            }
            SqrtX => {
                out.push(Gate::new(H, q.clone()));
                out.push(Gate::new(Rz(FRAC_PI_2), q.clone()));
                out.push(Gate::new(H, q));
            }
            Phase(t) => out.push(Gate::new(Rz(PI * t), q)),
            ControlledPhase(t) => lower_cphase(t, q[0], q[1], out),
            Swap => lower_swap(q[0], q[1], out),
            Toffoli | MultiControlledPhase(_) => {
                unreachable!("decomposition removed multi-qubit phases")
            }
        },
    }
}

/// `CP(t) = P(t/2)_a · P(t/2)_b · CX(a,b) · P(−t/2)_b · CX(a,b)`, exact;
/// the single-qubit phases become Rz (equivalent up to global phase).
fn lower_cphase(t: f64, a: usize, b: usize, out: &mut Vec<Gate>) {
    use GateKind::*;
    let half = std::f64::consts::PI * t / 2.0;
    out.push(Gate::new(Rz(half), vec![a]));
    out.push(Gate::new(Rz(half), vec![b]));
    out.push(Gate::new(Cnot, vec![a, b]));
    out.push(Gate::new(Rz(-half), vec![b]));
    out.push(Gate::new(Cnot, vec![a, b]));
}

fn lower_swap(a: usize, b: usize, out: &mut Vec<Gate>) {
    use GateKind::*;
    out.push(Gate::new(Cnot, vec![a, b]));
    out.push(Gate::new(Cnot, vec![b, a]));
    out.push(Gate::new(Cnot, vec![a, b]));
}

/// Whether two gates commute, conservatively, for peephole purposes.
fn commutes(gate: &Gate, other: &Gate) -> bool {
    let overlap = gate.qubits.iter().any(|q| other.qubits.contains(q));
    if !overlap {
        return true;
    }
    if gate.kind.is_diagonal() && other.kind.is_diagonal() {
        return true;
    }
    // A 1q diagonal commutes with a CNOT controlled on that qubit.
    let diag_past_control = |d: &Gate, c: &Gate| {
        d.qubits.len() == 1
            && d.kind.is_diagonal()
            && c.kind == GateKind::Cnot
            && c.qubits[0] == d.qubits[0]
    };
    diag_past_control(gate, other) || diag_past_control(other, gate)
}

fn is_identity_gate(gate: &Gate) -> bool {
    match gate.kind {
        GateKind::Rz(theta) => theta == 0.0,
        GateKind::Phase(t) | GateKind::ControlledPhase(t) | GateKind::MultiControlledPhase(t) => {
            t == 0.0
        }
        _ => false,
    }
}

/// Cancel inverse pairs (looking through gates that commute with the
/// candidate), merge consecutive Rz on the same wire, drop zero rotations.
/// Runs to a fixpoint.
fn peephole(mut gates: Vec<Gate>) -> Vec<Gate> {
    loop {
        let mut changed = false;
        let before = gates.len();
        gates.retain(|g| !is_identity_gate(g));
        changed |= gates.len() != before;
        let mut i = 0;
        'outer: while i < gates.len() {
            let mut j = i + 1;
            while j < gates.len() {
                if gates[i].is_inverse_of(&gates[j]) {
                    gates.remove(j);
                    gates.remove(i);
                    changed = true;
                    continue 'outer;
                }
                if let (GateKind::Rz(a), GateKind::Rz(b)) = (gates[i].kind, gates[j].kind) {
                    if gates[i].qubits == gates[j].qubits {
                        gates[i].kind = GateKind::Rz(a + b);
                        gates.remove(j);
                        changed = true;
                        continue 'outer;
                    }
                }
                if !commutes(&gates[i], &gates[j]) {
                    break;
                }
                j += 1;
            }
            i += 1;
        }
        if !changed {
            return gates;
        }
    }
}

/// Delete diagonal gates whose effect only precedes Z-measurements.
///
/// Walking backwards: once a qubit is measured (looking from the end), a
/// diagonal gate acting entirely on such qubits changes phases but not
/// outcome probabilities, so it is dropped.
fn drop_diagonals_before_measure(gates: Vec<Gate>) -> Vec<Gate> {
    let mut keep = vec![true; gates.len()];
    let mut clean: BTreeSet<usize> = BTreeSet::new();
    for (idx, gate) in gates.iter().enumerate().rev() {
        if gate.kind == GateKind::Measure {
            clean.insert(gate.qubits[0]);
        } else if gate.kind.is_diagonal() && gate.qubits.iter().all(|q| clean.contains(q)) {
            keep[idx] = false;
        } else {
            for q in &gate.qubits {
                clean.remove(q);
            }
        }
    }
    gates
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect()
}

/// Check that a compilation implements the abstract circuit.
///
/// Ancilla wires are assumed to start in |↑⟩ and are post-selected on ending
/// in |↑⟩. Measure-free circuits are compared as unitaries up to one global
/// phase within [`EQUIV_TOL`]. Circuits ending in measurement are compared
/// up to a diagonal phase in front of the measurement, which sampling cannot
/// observe.
pub fn verify_equivalence(abstract_circuit: &Circuit, compiled: &CompiledCircuit) -> Result<bool> {
    let n_logical = abstract_circuit.n;
    let n_phys = compiled.circuit.n;
    if n_phys > MAX_UNITARY_QUBITS {
        return Err(Error::TooManyQubits {
            op: "verify_equivalence",
            max: MAX_UNITARY_QUBITS,
            n: n_phys,
        });
    }
    let measured = abstract_circuit.has_measure();
    let u_abstract = unitary_of(&abstract_circuit.without_measure())?;
    let u_compiled = unitary_of(&compiled.circuit.without_measure())?;

    let embed = |bits: usize, layout: &[usize]| -> usize {
        let mut phys = 0usize;
        for (l, &p) in layout.iter().enumerate() {
            if (bits >> l) & 1 == 1 {
                phys |= 1 << p;
            }
        }
        phys
    };

    let dim = 1usize << n_logical;
    let mut restricted = Matrix::identity(dim);
    for x in 0..dim {
        let col = u_compiled.column(embed(x, &compiled.layout_in));
        let mut inside = 0.0;
        for y in 0..dim {
            let value = col[embed(y, &compiled.layout_out)];
            restricted.set(y, x, value);
            inside += value.norm_sqr();
        }
        // Everything must come back inside the ancilla-|↑⟩ subspace.
        if (inside - 1.0).abs() > EQUIV_TOL {
            return Ok(false);
        }
    }

    if !measured {
        return Ok(restricted.equal_up_to_global_phase(&u_abstract, EQUIV_TOL));
    }

    // Sampling equivalence: restricted = D · U_abstract for a diagonal D of
    // unit-modulus phases.
    for y in 0..dim {
        let mut phase: Option<num_complex::Complex64> = None;
        for x in 0..dim {
            let a = u_abstract.get(y, x);
            let r = restricted.get(y, x);
            if a.norm() <= EQUIV_TOL && r.norm() <= EQUIV_TOL {
                continue;
            }
            if a.norm() <= EQUIV_TOL {
                return Ok(false);
            }
            let ratio = r / a;
            match phase {
                None => {
                    if (ratio.norm() - 1.0).abs() > EQUIV_TOL {
                        return Ok(false);
                    }
                    phase = Some(ratio);
                }
                Some(p) => {
                    if (ratio - p).norm() > EQUIV_TOL * 10.0 {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmqaoa::{assemble_qaoa, QaoaParams};
    use crate::ising::{IsingModel, ProblemId};

    fn compile(circuit: &Circuit, topo: &Topology, gateset: Gateset) -> CompiledCircuit {
        route_and_lower(
            circuit,
            topo,
            &CompileOptions {
                gateset,
                ancilla_budget: None,
                seed: 0,
            },
        )
        .unwrap()
    }

    #[test]
    fn identity_compilation_on_clique() {
        let mut circuit = Circuit::new(3);
        circuit.push(GateKind::H, &[0]).unwrap();
        circuit.push(GateKind::Cnot, &[0, 2]).unwrap();
        circuit.push(GateKind::Rz(0.4), &[1]).unwrap();
        let compiled = compile(&circuit, &Topology::clique(3), Gateset::IbmNative);
        assert_eq!(compiled.swap_count, 0);
        assert!(verify_equivalence(&circuit, &compiled).unwrap());
    }

    #[test]
    fn toffoli_decomposition_is_exact() {
        let mut reference = Circuit::new(3);
        reference.push(GateKind::Toffoli, &[0, 1, 2]).unwrap();
        let want = unitary_of(&reference).unwrap();
        for inverted in [false, true] {
            let mut out = Vec::new();
            emit_toffoli(0, 1, 2, inverted, &mut out);
            let seq = Circuit {
                n: 3,
                gates: out,
                gateset: Gateset::Abstract,
                out_permutation: vec![0, 1, 2],
            };
            let u = unitary_of(&seq).unwrap();
            assert!(
                u.equal_up_to_global_phase(&want, 1e-10),
                "inverted={inverted}"
            );
        }
    }

    #[test]
    fn mcp_decomposition_without_ancilla() {
        for m in 3..=5usize {
            let t = -0.37;
            let qubits: Vec<usize> = (0..m).collect();
            let mut reference = Circuit::new(m);
            reference
                .push(GateKind::MultiControlledPhase(t), &qubits)
                .unwrap();
            let mut anc = AncillaPool::new(m, 0);
            let mut out = Vec::new();
            decompose_mcp(t, &qubits, &mut anc, &mut out);
            assert!(out.iter().all(|g| g.qubits.len() <= 2));
            let seq = Circuit {
                n: m,
                gates: out,
                gateset: Gateset::Abstract,
                out_permutation: (0..m).collect(),
            };
            let u = unitary_of(&seq).unwrap();
            let want = unitary_of(&reference).unwrap();
            assert!(u.equal_up_to_global_phase(&want, 1e-9), "m={m}");
        }
    }

    #[test]
    fn mcp_decomposition_with_ancilla_restores_it() {
        // 5 operands, 1 ancilla: result must act as MCP ⊗ id on ancilla-|0⟩.
        let m = 5;
        let t = 0.81;
        let qubits: Vec<usize> = (0..m).collect();
        let mut anc = AncillaPool::new(m, 1);
        let mut out = Vec::new();
        decompose_mcp(t, &qubits, &mut anc, &mut out);
        assert!(out.iter().any(|g| g.qubits.contains(&m)), "ancilla used");
        let seq = Circuit {
            n: m + 1,
            gates: out,
            gateset: Gateset::Abstract,
            out_permutation: (0..m + 1).collect(),
        };
        let u = unitary_of(&seq).unwrap();
        let mut reference = Circuit::new(m + 1);
        reference
            .push(GateKind::MultiControlledPhase(t), &qubits)
            .unwrap();
        let want = unitary_of(&reference).unwrap();
        let dim = 1usize << m;
        for x in 0..dim {
            for y in 0..dim {
                let diff = (u.get(y, x) - want.get(y, x)).norm();
                assert!(diff < 1e-9, "x={x} y={y} diff={diff}");
            }
            for y in dim..(2 * dim) {
                assert!(u.get(y, x).norm() < 1e-9, "leaked onto the ancilla");
            }
        }
    }

    #[test]
    fn swap_next_to_cnot_costs_one_extra_cnot() {
        // CNOT then SWAP on the same edge: 4 CNOTs reduce to 2 after
        // cancellation, i.e. the SWAP added exactly one CNOT.
        let gates = vec![
            Gate::new(GateKind::Cnot, vec![0, 1]),
            Gate::new(GateKind::Cnot, vec![0, 1]),
            Gate::new(GateKind::Cnot, vec![1, 0]),
            Gate::new(GateKind::Cnot, vec![0, 1]),
        ];
        let reduced = peephole(gates);
        assert_eq!(reduced.len(), 2);
    }

    #[test]
    fn peephole_cancels_through_diagonals() {
        // The S/S† pair cancels across interposed diagonal gates.
        let gates = vec![
            Gate::new(GateKind::S, vec![0]),
            Gate::new(GateKind::Rz(0.3), vec![1]),
            Gate::new(GateKind::ControlledPhase(0.5), vec![0, 1]),
            Gate::new(GateKind::Sdg, vec![0]),
        ];
        let reduced = peephole(gates);
        assert_eq!(reduced.len(), 2);
    }

    #[test]
    fn routed_gmqaoa_problem_e_on_lnn() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        let circuit = assemble_qaoa(&model, &QaoaParams::single(0.81, -0.35)).without_measure();
        let compiled = compile(&circuit, &Topology::lnn(), Gateset::IbmNative);
        assert!(compiled.circuit.validate(Some(&Topology::lnn())).is_empty());
        assert!(verify_equivalence(&circuit, &compiled).unwrap());
    }

    #[test]
    fn measured_circuit_verification_allows_trailing_phase_deletion() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        let circuit = assemble_qaoa(&model, &QaoaParams::single(0.81, -0.35));
        let compiled = compile(&circuit, &Topology::lnn(), Gateset::IbmNative);
        assert!(verify_equivalence(&circuit, &compiled).unwrap());
    }

    #[test]
    fn dropped_gate_fails_verification() {
        let model = IsingModel::builtin_reduced(ProblemId::E);
        let circuit = assemble_qaoa(&model, &QaoaParams::single(0.81, -0.35)).without_measure();
        let mut compiled = compile(&circuit, &Topology::lnn(), Gateset::IbmNative);
        let pos = compiled
            .circuit
            .gates
            .iter()
            .rposition(|g| g.kind == GateKind::Cnot)
            .unwrap();
        compiled.circuit.gates.remove(pos);
        assert!(!verify_equivalence(&circuit, &compiled).unwrap());
    }

    #[test]
    fn compilation_is_deterministic() {
        let model = IsingModel::builtin_reduced(ProblemId::C);
        let circuit = assemble_qaoa(&model, &QaoaParams::single(0.81, -0.35));
        let opts = CompileOptions {
            gateset: Gateset::IbmNative,
            ancilla_budget: None,
            seed: 3,
        };
        let a = route_and_lower(&circuit, &Topology::six_a(), &opts).unwrap();
        let b = route_and_lower(&circuit, &Topology::six_a(), &opts).unwrap();
        assert_eq!(a.circuit.to_text(), b.circuit.to_text());
        assert_eq!(a.layout_in, b.layout_in);
        assert_eq!(a.layout_out, b.layout_out);
        assert_eq!(a.swap_count, b.swap_count);
    }

    #[test]
    fn unroutable_reports_error() {
        let circuit = Circuit::new(5);
        let result = route_and_lower(&circuit, &Topology::lnn(), &CompileOptions::default());
        assert!(matches!(result, Err(Error::Unroutable(_))));
    }

    #[test]
    fn ancilla_budget_checked() {
        let circuit = Circuit::new(3);
        let result = route_and_lower(
            &circuit,
            &Topology::lnn(),
            &CompileOptions {
                ancilla_budget: Some(2),
                ..Default::default()
            },
        );
        assert!(matches!(result, Err(Error::AncillaBudget(_))));
    }
}
