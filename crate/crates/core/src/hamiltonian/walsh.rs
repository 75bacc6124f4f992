//! Change of basis from momentum projectors to Cartan words.
//!
//! A Cartan word is stored as a bitmask `I` whose bit `j` marks a Pauli Z on
//! register qubit `j`. Qubit `j` reads bit `x_j` of the momentum index `k`,
//! counting from the most significant bit, so
//! `W_I(k/N) = (−1)^{Σ_j x_j·i_j} = (−1)^{popcount(k & rev(I))}` with `rev`
//! the `n`-bit reversal. The expansion is
//! `h_k = Σ_I h'_I W_I(k/N)` with `h'_I = (1/N) Σ_k h_k W_I(k/N)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{decay_factor, HamiltonianKind, SpectralHamiltonian};
use crate::fourier::{bit_reverse, fwht};
use crate::grid::GridSpec;
use crate::payoff::ContractParams;
use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

/// Coefficients of a diagonal operator in the Cartan basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanExpansion {
    pub kind: HamiltonianKind,
    pub n_qubits: u32,
    /// `coeffs[I]` multiplies the word with bitmask `I`.
    pub coeffs: Vec<f64>,
}

impl CartanExpansion {
    pub fn coefficient(&self, word: u64) -> f64 {
        self.coeffs[word as usize]
    }

    /// Eigenvalues `h_k` rebuilt from the coefficients.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut natural = vec![0.0; n];
        for (word, c) in self.coeffs.iter().enumerate() {
            natural[bit_reverse(word, self.n_qubits)] = *c;
        }
        fwht(&mut natural);
        natural
    }

    /// Eigenvalues rebuilt from a subset of words only.
    pub fn reconstruct_subset(&self, words: impl IntoIterator<Item = u64>) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut natural = vec![0.0; n];
        for word in words {
            natural[bit_reverse(word as usize, self.n_qubits)] = self.coefficient(word);
        }
        fwht(&mut natural);
        natural
    }
}

/// `±1` value of the Walsh function of `word` at momentum index `k`.
pub fn walsh_sign(word: u64, k: usize, n_qubits: u32) -> f64 {
    if (k & bit_reverse(word as usize, n_qubits))
        .count_ones()
        .is_multiple_of(2)
    {
        1.0
    } else {
        -1.0
    }
}

pub fn walsh_coefficients(h: &SpectralHamiltonian) -> CartanExpansion {
    let n_qubits = h.n_qubits();
    let n = h.eigenvalues.len();
    let mut natural = h.eigenvalues.clone();
    fwht(&mut natural);
    let scale = 1.0 / n as f64;
    let coeffs = (0..n)
        .map(|word| natural[bit_reverse(word, n_qubits)] * scale)
        .collect();
    CartanExpansion {
        kind: h.kind,
        n_qubits,
        coeffs,
    }
}

/// Closed form of the Hermitian coefficient of `word`.
///
/// With `A = (2^n − 1)/2^{n+1}·(2r − σ²)/x_max` and the non-leading qubits
/// `0 < j_1 < … < j_m`:
///
/// - odd body count (`m = 2k`, including the single-body word):
///   `(−1)^k·A·cot(π/2^n)·Π tan(π/2^{j_l+1})`
/// - even body count (`m = 2k − 1`): `(−1)^k·A·Π tan(π/2^{j_l+1})`
///
/// Words without qubit 0 have a zero coefficient because the drift spectrum
/// flips sign under `k ↦ k + N/2`.
pub fn closed_form_hermitian_coefficient(
    word: u64,
    grid: &GridSpec,
    contract: &ContractParams,
) -> f64 {
    let n_q = grid.n_qubits();
    debug_assert!(word < (1u64 << n_q), "word {word:#b} exceeds {n_q} qubits");
    if word & 1 == 0 {
        return 0.0;
    }
    let nf = (1u64 << n_q) as f64;
    let prefactor =
        (nf - 1.0) / (2.0 * nf) * (2.0 * contract.rate - contract.variance()) / grid.x_max();
    let others: Vec<u32> = (1..n_q).filter(|j| word >> j & 1 == 1).collect();
    let tan_product: f64 = others
        .iter()
        .map(|&j| (PI / (1u64 << (j + 1)) as f64).tan())
        .product();
    let m = others.len();
    if m.is_multiple_of(2) {
        let sign = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * prefactor * tan_product / (PI / nf).tan()
    } else {
        let sign = if m.div_ceil(2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        sign * prefactor * tan_product
    }
}

/// Large-register approximations of the two dominant embedded coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedAsymptotics {
    /// Coefficient of the identity word (valid for `n ≥ 7`).
    pub identity_term: f64,
    /// Coefficient of `Z_1 Z_2` (valid for `n ≥ 8`, `None` below).
    pub z1z2_term: Option<f64>,
}

/// Evaluates the asymptotic expressions for the identity and `Z_1 Z_2`
/// embedded coefficients.
///
/// Identity: `π/2 − 2^{−n} Σ_{k=0}^{2^{n−1}} exp(−T(σ²/2·sin²(2πk/2^n)/δx² + r))`.
///
/// `Z_1 Z_2`: `2^{−n}(2·arccos(e^{−rT}) − π) + 4∫₀^{1/8} g − 4∫_{1/8}^{1/4} g`
/// with `g(x) = arccos(exp(−T(σ²/2·((2^n−1)/(2x_max))²·sin²(2πx) + r)))`.
pub fn embedded_asymptotic_coefficients(
    grid: &GridSpec,
    contract: &ContractParams,
) -> Result<EmbeddedAsymptotics> {
    let n_q = grid.n_qubits();
    if n_q < 7 {
        return Err(Error::BelowValidity {
            what: "the identity-term approximation",
            n_q,
            min: 7,
        });
    }
    let n = 1usize << n_q;
    let nf = n as f64;
    let dx = grid.delta_x();
    let tail: f64 = (0..=n / 2)
        .map(|k| decay_factor(contract, (2.0 * PI * k as f64 / nf).sin() / dx))
        .sum();
    let identity_term = FRAC_PI_2 - tail / nf;

    let z1z2_term = (n_q >= 8).then(|| {
        let scale = (nf - 1.0) / (2.0 * grid.x_max());
        let g = |x: f64| decay_factor(contract, scale * (2.0 * PI * x).sin()).acos();
        let edge = (2.0 * (-contract.rate * contract.maturity).exp().acos() - PI) / nf;
        edge + 4.0 * adaptive_simpson(g, 0.0, 0.125, 1e-8)
            - 4.0 * adaptive_simpson(g, 0.125, 0.25, 1e-8)
    });

    Ok(EmbeddedAsymptotics {
        identity_term,
        z1z2_term,
    })
}
