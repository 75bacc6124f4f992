use std::f64::consts::PI;

use super::{Circuit, Gate, QubitLayout};
use crate::grid::GridSpec;
use crate::hamiltonian::{HamiltonianKind, TruncationPlan};
use crate::payoff::ContractParams;
use crate::{Error, Result};

/// Textbook QFT on `n` qubits: Hadamards, controlled phases `2π/2^m`, then
/// the qubit-reversal swaps. Its matrix is `F_{jk} = e^{2πijk/N}/√N`.
pub fn qft_circuit(n_qubits: usize) -> Circuit {
    let mut gates = Vec::new();
    for j in 0..n_qubits {
        gates.push(Gate::H(j));
        for m in j + 1..n_qubits {
            gates.push(Gate::CPhase {
                control: m,
                target: j,
                theta: 2.0 * PI / (1u64 << (m - j + 1)) as f64,
            });
        }
    }
    for j in 0..n_qubits / 2 {
        gates.push(Gate::Swap(j, n_qubits - 1 - j));
    }
    Circuit {
        width: n_qubits,
        gates,
        global_phase: 0.0,
    }
}

pub fn inverse_qft_circuit(n_qubits: usize) -> Circuit {
    qft_circuit(n_qubits).inverse()
}

/// Parity ladder into the ancilla around `Rz(−2β)`; equals `exp(iβ Z⊗…⊗Z)` on `left`.
///
/// `left` and `right` hold the same qubits in the order the CNOTs are
/// emitted before and after the rotation.
fn parity_block(left: &[usize], right: &[usize], beta: f64, ancilla: usize) -> Vec<Gate> {
    let mut gates: Vec<Gate> = left
        .iter()
        .map(|&q| Gate::Cnot {
            control: q,
            target: ancilla,
        })
        .collect();
    gates.push(Gate::Rz {
        qubit: ancilla,
        theta: -2.0 * beta,
    });
    gates.extend(right.iter().map(|&q| Gate::Cnot {
        control: q,
        target: ancilla,
    }));
    gates
}

fn register_qubits(word: u64, layout: &QubitLayout) -> Vec<usize> {
    (0..layout.n_register)
        .filter(|&j| word >> j & 1 == 1)
        .map(|j| layout.register(j))
        .collect()
}

/// `exp(iβ Z_word)` for a Hermitian term, or `exp(iβ Y_E ⊗ Z_word)` for an
/// embedded one. The embedded form rotates `q_E` into the Z basis with
/// `S†` then `H`, includes it in the ladder and rotates back with `H` then `S`.
pub fn pauli_z_exponential_block(
    word: u64,
    beta: f64,
    onto_embedding: bool,
    layout: &QubitLayout,
) -> Circuit {
    let mut circuit = Circuit::new(layout.width());
    let mut qubits = register_qubits(word, layout);
    if onto_embedding {
        let e = layout.embedding();
        circuit.gates.extend([Gate::Sdg(e), Gate::H(e)]);
        if qubits.is_empty() {
            circuit.gates.push(Gate::Rz {
                qubit: e,
                theta: -2.0 * beta,
            });
        } else {
            qubits.push(e);
            circuit
                .gates
                .extend(parity_block(&qubits, &qubits, beta, layout.gate_ancilla()));
        }
        circuit.gates.extend([Gate::H(e), Gate::S(e)]);
    } else if qubits.is_empty() {
        circuit.global_phase = beta;
    } else {
        circuit
            .gates
            .extend(parity_block(&qubits, &qubits, beta, layout.gate_ancilla()));
    }
    circuit
}

/// The `σ^z_E` factor of the dilation.
pub fn dilation_prefix(layout: &QubitLayout) -> Circuit {
    Circuit {
        width: layout.width(),
        gates: vec![Gate::Z(layout.embedding())],
        global_phase: 0.0,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompileOptions {
    /// Emit the Hermitian blocks before the embedded ones. Both orders give
    /// the same unitary because the two generators commute.
    pub hermitian_first: bool,
}

/// Greedy nearest-neighbour walk: start at the lightest word, then always
/// step to the closest remaining word in Hamming distance.
fn gray_order(mut words: Vec<u64>) -> Vec<u64> {
    words.sort_by_key(|w| (w.count_ones(), *w));
    let mut ordered = Vec::with_capacity(words.len());
    let mut remaining = words;
    if remaining.is_empty() {
        return ordered;
    }
    let mut current = remaining.remove(0);
    ordered.push(current);
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, w)| ((*w ^ current).count_ones(), **w))
            .expect("non-empty");
        current = remaining.remove(pos);
        ordered.push(current);
    }
    ordered
}

struct Block {
    qubits: Vec<usize>,
    beta: f64,
}

/// Emits consecutive parity blocks so that the CNOTs on qubits shared by
/// neighbouring blocks meet back to back and cancel in the optimiser.
fn chained_blocks(blocks: &[Block], ancilla: usize) -> Vec<Vec<Gate>> {
    let shared = |a: &[usize], b: &[usize]| -> Vec<usize> {
        a.iter().copied().filter(|q| b.contains(q)).collect()
    };
    (0..blocks.len())
        .map(|i| {
            let own = &blocks[i].qubits;
            let before = if i > 0 {
                shared(own, &blocks[i - 1].qubits)
            } else {
                Vec::new()
            };
            let after = if i + 1 < blocks.len() {
                shared(own, &blocks[i + 1].qubits)
            } else {
                Vec::new()
            };
            let mut left = before.clone();
            left.extend(own.iter().filter(|q| !before.contains(q)));
            let mut right: Vec<usize> =
                own.iter().copied().filter(|q| !after.contains(q)).collect();
            right.extend(after.iter().rev());
            parity_block(&left, &right, blocks[i].beta, ancilla)
        })
        .collect()
}

pub fn compile(
    plan: &TruncationPlan,
    grid: &GridSpec,
    contract: &ContractParams,
) -> Result<Circuit> {
    compile_with(plan, grid, contract, CompileOptions::default())
}

/// QFT, embedded blocks, `σ^z_E`, Hermitian blocks, inverse QFT.
///
/// Embedded terms use `β = h̃'_I` so that the section equals
/// `exp(i Y_E ⊗ H̃)`; Hermitian terms use `β = −T·h'_J` for `exp(−iT H)`.
pub fn compile_with(
    plan: &TruncationPlan,
    grid: &GridSpec,
    contract: &ContractParams,
    options: CompileOptions,
) -> Result<Circuit> {
    check_plan(plan, grid, contract)?;
    let n = grid.n_qubits() as usize;
    let layout = QubitLayout::new(n);
    let (e, g) = (layout.embedding(), layout.gate_ancilla());
    let mut circuit = Circuit::new(layout.width());

    let mut emb_identity = 0.0;
    let mut emb_words = Vec::new();
    let mut herm_words = Vec::new();
    for term in &plan.terms {
        match (term.kind, term.word) {
            (HamiltonianKind::Embedded, 0) => emb_identity += term.coefficient,
            (HamiltonianKind::Embedded, w) => emb_words.push((w, term.coefficient)),
            (HamiltonianKind::Hermitian, 0) => {
                circuit.global_phase += -contract.maturity * term.coefficient
            }
            (HamiltonianKind::Hermitian, w) => herm_words.push((w, term.coefficient)),
        }
    }
    let lookup = |words: &[(u64, f64)], w: u64| {
        words
            .iter()
            .find(|(x, _)| *x == w)
            .map(|(_, c)| *c)
            .unwrap_or(0.0)
    };

    let emb_blocks: Vec<Block> = gray_order(emb_words.iter().map(|(w, _)| *w).collect())
        .into_iter()
        .map(|w| {
            let mut qubits = register_qubits(w, &layout);
            qubits.push(e);
            Block {
                qubits,
                beta: lookup(&emb_words, w),
            }
        })
        .collect();
    let herm_blocks: Vec<Block> = gray_order(herm_words.iter().map(|(w, _)| *w).collect())
        .into_iter()
        .map(|w| Block {
            qubits: register_qubits(w, &layout),
            beta: -contract.maturity * lookup(&herm_words, w),
        })
        .collect();

    let n_emb = emb_blocks.len();
    let mut sequence: Vec<Block> = Vec::with_capacity(n_emb + herm_blocks.len());
    if options.hermitian_first {
        sequence.extend(herm_blocks);
        sequence.extend(emb_blocks);
    } else {
        sequence.extend(emb_blocks);
        sequence.extend(herm_blocks);
    }
    let emitted = chained_blocks(&sequence, g);
    let (emb_gates, herm_gates): (Vec<_>, Vec<_>) = if options.hermitian_first {
        let (h, m) = emitted.split_at(emitted.len() - n_emb);
        (m.to_vec(), h.to_vec())
    } else {
        let (m, h) = emitted.split_at(n_emb);
        (m.to_vec(), h.to_vec())
    };

    let mut embedded_section = vec![Gate::Sdg(e), Gate::H(e)];
    if emb_identity != 0.0 {
        embedded_section.push(Gate::Rz {
            qubit: e,
            theta: -2.0 * emb_identity,
        });
    }
    embedded_section.extend(emb_gates.into_iter().flatten());
    embedded_section.extend([Gate::H(e), Gate::S(e)]);
    embedded_section.extend(dilation_prefix(&layout).gates);
    let hermitian_section: Vec<Gate> = herm_gates.into_iter().flatten().collect();

    circuit.gates.extend(qft_circuit(n).gates);
    if options.hermitian_first {
        circuit.gates.extend(hermitian_section);
        circuit.gates.extend(embedded_section);
    } else {
        circuit.gates.extend(embedded_section);
        circuit.gates.extend(hermitian_section);
    }
    circuit.gates.extend(inverse_qft_circuit(n).gates);
    Ok(circuit)
}

pub(crate) fn check_plan(
    plan: &TruncationPlan,
    grid: &GridSpec,
    contract: &ContractParams,
) -> Result<()> {
    if plan.n_qubits != grid.n_qubits() {
        return Err(Error::PlanMismatch(format!(
            "plan built for {} qubits, grid has {}",
            plan.n_qubits,
            grid.n_qubits()
        )));
    }
    if (plan.x_max - grid.x_max()).abs() > 1e-12 * grid.x_max() {
        return Err(Error::PlanMismatch(format!(
            "plan built for x_max = {}, grid has {}",
            plan.x_max,
            grid.x_max()
        )));
    }
    if plan.contract != *contract {
        return Err(Error::PlanMismatch(
            "plan built for a different contract".into(),
        ));
    }
    Ok(())
}

/// Drops pairs of identical CNOTs with nothing in between touching either qubit.
pub fn optimize_cnot_cancellation(circuit: &Circuit) -> Circuit {
    let mut out: Vec<Gate> = Vec::with_capacity(circuit.gates.len());
    for &gate in &circuit.gates {
        if let Gate::Cnot { control, target } = gate {
            let last = out
                .iter()
                .rposition(|h| h.touches(control) || h.touches(target));
            if let Some(pos) = last {
                if out[pos] == gate {
                    out.remove(pos);
                    continue;
                }
            }
        }
        out.push(gate);
    }
    Circuit {
        width: circuit.width,
        gates: out,
        global_phase: circuit.global_phase,
    }
}

/// CNOT + CPhase + 3·SWAP.
pub fn entangling_gate_count(circuit: &Circuit) -> usize {
    circuit.gates.iter().map(Gate::entangling_weight).sum()
}

/// Entangling gates split by origin. CPhase and SWAP gates only come from
/// the Fourier transforms, so `exclusive` counts the Hamiltonian part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntanglingTally {
    pub cnot: usize,
    pub cphase: usize,
    pub swap: usize,
    pub inclusive: usize,
    pub exclusive: usize,
}

pub fn entangling_tally(circuit: &Circuit) -> EntanglingTally {
    let count = |f: fn(&Gate) -> bool| circuit.gates.iter().filter(|g| f(g)).count();
    let cnot = count(|g| matches!(g, Gate::Cnot { .. }));
    let cphase = count(|g| matches!(g, Gate::CPhase { .. }));
    let swap = count(|g| matches!(g, Gate::Swap(..)));
    EntanglingTally {
        cnot,
        cphase,
        swap,
        inclusive: cnot + cphase + 3 * swap,
        exclusive: cnot,
    }
}
