use std::fmt;

use crate::{Error, Result};

/// Gate set of the compiled circuits.
///
/// `Rz(θ) = diag(e^{−iθ/2}, e^{iθ/2})` and `CPhase(θ)` multiplies `|11⟩` by `e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    Z(usize),
    X(usize),
    Rz {
        qubit: usize,
        theta: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    CPhase {
        control: usize,
        target: usize,
        theta: f64,
    },
    Swap(usize, usize),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Z(_) => "Z",
            Gate::X(_) => "X",
            Gate::Rz { .. } => "RZ",
            Gate::Cnot { .. } => "CNOT",
            Gate::CPhase { .. } => "CPHASE",
            Gate::Swap(..) => "SWAP",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Z(q)
            | Gate::X(q)
            | Gate::Rz { qubit: q, .. } => vec![q],
            Gate::Cnot { control, target }
            | Gate::CPhase {
                control, target, ..
            } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits().contains(&qubit)
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz { theta, .. } | Gate::CPhase { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn is_entangling(&self) -> bool {
        matches!(
            self,
            Gate::Cnot { .. } | Gate::CPhase { .. } | Gate::Swap(..)
        )
    }

    /// Entangling cost, with a SWAP worth three CNOTs.
    pub fn entangling_weight(&self) -> usize {
        match self {
            Gate::Cnot { .. } | Gate::CPhase { .. } => 1,
            Gate::Swap(..) => 3,
            _ => 0,
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rz { qubit, theta } => Gate::Rz {
                qubit,
                theta: -theta,
            },
            Gate::CPhase {
                control,
                target,
                theta,
            } => Gate::CPhase {
                control,
                target,
                theta: -theta,
            },
            g => g,
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(q) = qubits.iter().find(|&&q| q >= width) {
            return Err(Error::InvalidGate(format!(
                "{self} acts on qubit {q} of a {width}-qubit circuit"
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "{self} repeats qubit {}",
                qubits[0]
            )));
        }
        if let Some(theta) = self.angle() {
            if !theta.is_finite() {
                return Err(Error::InvalidGate(format!("{self} has a non-finite angle")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Some(theta) = self.angle() {
            write!(f, " {theta:.16e}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Gate {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let mut parts = line.split_whitespace();
        let kind = parts.next().ok_or("empty gate line")?.to_ascii_uppercase();
        let fields: Vec<&str> = parts.collect();
        let qubit = |i: usize| -> std::result::Result<usize, String> {
            fields
                .get(i)
                .ok_or(format!("{kind} is missing qubit {}", i + 1))?
                .parse()
                .map_err(|e| format!("bad qubit index {:?}: {e}", fields[i]))
        };
        let angle = |i: usize| -> std::result::Result<f64, String> {
            fields
                .get(i)
                .ok_or(format!("{kind} is missing its angle"))?
                .parse()
                .map_err(|e| format!("bad angle {:?}: {e}", fields[i]))
        };
        let (gate, arity) = match kind.as_str() {
            "H" => (Gate::H(qubit(0)?), 1),
            "S" => (Gate::S(qubit(0)?), 1),
            "SDG" => (Gate::Sdg(qubit(0)?), 1),
            "Z" => (Gate::Z(qubit(0)?), 1),
            "X" => (Gate::X(qubit(0)?), 1),
            "RZ" => (
                Gate::Rz {
                    qubit: qubit(0)?,
                    theta: angle(1)?,
                },
                2,
            ),
            "CNOT" => (
                Gate::Cnot {
                    control: qubit(0)?,
                    target: qubit(1)?,
                },
                2,
            ),
            "CPHASE" => (
                Gate::CPhase {
                    control: qubit(0)?,
                    target: qubit(1)?,
                    theta: angle(2)?,
                },
                3,
            ),
            "SWAP" => (Gate::Swap(qubit(0)?, qubit(1)?), 2),
            other => return Err(format!("unknown gate {other:?}")),
        };
        if fields.len() != arity {
            return Err(format!(
                "{kind} takes {arity} fields, found {}",
                fields.len()
            ));
        }
        Ok(gate)
    }
}
