use num_complex::Complex64;

use super::{Circuit, Gate, QubitLayout};
use crate::{Error, Result};

/// Amplitudes over `2^width` basis states; qubit 0 is the highest-order bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(width: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << width];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { width, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::WidthMismatch {
                expected: len.next_power_of_two(),
                found: len,
            });
        }
        Ok(Self {
            width: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// `|ψ⟩ ⊗ |0_E⟩ ⊗ |0_G⟩` for a register state `ψ`.
    pub fn from_register(register: &[Complex64], layout: &QubitLayout) -> Result<Self> {
        if register.len() != 1 << layout.n_register {
            return Err(Error::WidthMismatch {
                expected: 1 << layout.n_register,
                found: register.len(),
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << layout.width()];
        for (k, a) in register.iter().enumerate() {
            amplitudes[layout.index(k, false, false)] = *a;
        }
        Ok(Self {
            width: layout.width(),
            amplitudes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Register amplitudes with both ancillas in the given states.
    pub fn register_slice(
        &self,
        layout: &QubitLayout,
        embedding: bool,
        ancilla: bool,
    ) -> Vec<Complex64> {
        (0..1usize << layout.n_register)
            .map(|k| self.amplitudes[layout.index(k, embedding, ancilla)])
            .collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.width - 1 - qubit)
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let bit = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply_diagonal(&mut self, qubit: usize, d0: Complex64, d1: Complex64) {
        let bit = self.mask(qubit);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if i & bit == 0 { d0 } else { d1 };
        }
    }

    fn apply(&mut self, gate: &Gate) {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match *gate {
            Gate::H(q) => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[s, s], [s, -s]]);
            }
            Gate::X(q) => self.apply_single(q, [[zero, one], [one, zero]]),
            Gate::Z(q) => self.apply_diagonal(q, one, -one),
            Gate::S(q) => self.apply_diagonal(q, one, Complex64::i()),
            Gate::Sdg(q) => self.apply_diagonal(q, one, -Complex64::i()),
            Gate::Rz { qubit, theta } => self.apply_diagonal(
                qubit,
                Complex64::from_polar(1.0, -0.5 * theta),
                Complex64::from_polar(1.0, 0.5 * theta),
            ),
            Gate::Cnot { control, target } => {
                let (c, t) = (self.mask(control), self.mask(target));
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
            Gate::CPhase {
                control,
                target,
                theta,
            } => {
                let both = self.mask(control) | self.mask(target);
                let phase = Complex64::from_polar(1.0, theta);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & both == both {
                        *a *= phase;
                    }
                }
            }
            Gate::Swap(p, q) => {
                let (a, b) = (self.mask(p), self.mask(q));
                for i in 0..self.amplitudes.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amplitudes.swap(i, (i & !a) | b);
                    }
                }
            }
        }
    }
}

/// Applies every gate in order, then the tracked global phase.
pub fn simulate(circuit: &Circuit, input: &StateVector) -> Result<StateVector> {
    if circuit.width() != input.width {
        return Err(Error::WidthMismatch {
            expected: circuit.width(),
            found: input.width,
        });
    }
    let mut state = input.clone();
    for gate in circuit.gates() {
        state.apply(gate);
    }
    if circuit.global_phase() != 0.0 {
        let phase = Complex64::from_polar(1.0, circuit.global_phase());
        state.amplitudes.iter_mut().for_each(|a| *a *= phase);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::qft_circuit;
    use crate::fourier::qft;

    #[test]
    fn hadamard_on_zero() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        let out = simulate(&c, &StateVector::zero(1)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - s).norm() < 1e-15);
        assert!((out.amplitudes()[1] - s).norm() < 1e-15);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let input =
            StateVector::from_amplitudes(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
                .unwrap();
        assert_eq!(simulate(&Circuit::new(1), &input).unwrap(), input);
    }

    #[test]
    fn width_mismatch() {
        assert!(matches!(
            simulate(&Circuit::new(2), &StateVector::zero(3)),
            Err(Error::WidthMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn qft_circuit_matches_transform() {
        let n = 5;
        let v: Vec<Complex64> = (0..32)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let out = simulate(
            &qft_circuit(n),
            &StateVector::from_amplitudes(v.clone()).unwrap(),
        )
        .unwrap();
        let mut expect = v;
        qft(&mut expect);
        for (a, b) in out.amplitudes().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn register_embedding_layout() {
        let layout = QubitLayout::new(2);
        let reg = vec![Complex64::new(0.5, 0.0); 4];
        let s = StateVector::from_register(&reg, &layout).unwrap();
        assert_eq!(s.width(), 4);
        assert_eq!(s.amplitudes()[0b0100], Complex64::new(0.5, 0.0));
        assert_eq!(s.register_slice(&layout, false, false), reg);
        assert!(s
            .register_slice(&layout, true, false)
            .iter()
            .all(|a| a.norm() == 0.0));
    }
}
