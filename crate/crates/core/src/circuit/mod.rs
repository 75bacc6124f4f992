//! Gate-level circuits: compilation of truncation plans, CNOT cancellation,
//! exact statevector execution and the dense dilation propagator.
//!
//! Qubit 0 is the most significant bit of a statevector index. The register
//! occupies qubits `0..n`, followed by the embedding qubit `q_E` and the
//! parity ancilla `q_G`.

mod compile;
mod gate;
mod propagator;
mod simulate;

pub use compile::{
    compile, compile_with, dilation_prefix, entangling_gate_count, entangling_tally,
    inverse_qft_circuit, optimize_cnot_cancellation, pauli_z_exponential_block, qft_circuit,
    CompileOptions, EntanglingTally,
};
pub use gate::Gate;
pub use propagator::exact_propagator;
pub(crate) use propagator::{apply_momentum_diagonal, momentum_blocks};
pub use simulate::{simulate, StateVector};

use crate::{Error, Result};

/// Where the register and the two ancillas live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitLayout {
    pub n_register: usize,
}

impl QubitLayout {
    pub fn new(n_register: usize) -> Self {
        Self { n_register }
    }

    pub fn register(&self, j: usize) -> usize {
        debug_assert!(j < self.n_register);
        j
    }

    pub fn embedding(&self) -> usize {
        self.n_register
    }

    pub fn gate_ancilla(&self) -> usize {
        self.n_register + 1
    }

    pub fn width(&self) -> usize {
        self.n_register + 2
    }

    /// Statevector index of register value `k` with both ancillas set as given.
    pub fn index(&self, k: usize, embedding: bool, ancilla: bool) -> usize {
        k << 2 | (embedding as usize) << 1 | ancilla as usize
    }
}

/// Ordered gate list on `width` qubits with a tracked global phase `e^{iφ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>, global_phase: f64) -> Result<Self> {
        for g in &gates {
            g.validate(width)?;
        }
        if !global_phase.is_finite() {
            return Err(Error::InvalidGate("global phase must be finite".into()));
        }
        Ok(Self {
            width,
            gates,
            global_phase,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn add_phase(&mut self, phi: f64) {
        self.global_phase += phi;
    }

    /// Adjoint circuit: gates reversed and inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: -self.global_phase,
        }
    }

    /// Line-oriented text: a `WIDTH` line, a `PHASE` line, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("WIDTH {}\nPHASE {:.16e}\n", self.width, self.global_phase);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut width = None;
        let mut phase = 0.0;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let mut words = line.split_whitespace();
            match words.next().map(str::to_ascii_uppercase).as_deref() {
                Some("WIDTH") => {
                    let w = words
                        .next()
                        .ok_or_else(|| err("WIDTH needs a value".into()))?;
                    width = Some(
                        w.parse::<usize>()
                            .map_err(|e| err(format!("bad width: {e}")))?,
                    );
                }
                Some("PHASE") => {
                    let p = words
                        .next()
                        .ok_or_else(|| err("PHASE needs a value".into()))?;
                    phase = p
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad phase: {e}")))?;
                }
                _ => {
                    let gate: Gate = line.parse().map_err(err)?;
                    let w = width.ok_or_else(|| err("gate before WIDTH".into()))?;
                    gate.validate(w).map_err(|e| err(e.to_string()))?;
                    gates.push(gate);
                }
            }
        }
        let width = width.ok_or(Error::Parse {
            line: 0,
            message: "missing WIDTH line".into(),
        })?;
        Circuit::from_gates(width, gates, phase)
    }
}
