//! Term selection for the Cartan expansions and the associated error bounds.
//!
//! Hermitian coefficients decay like `C·2^{−I'}` in the index
//! `I' = Σ_{l≥1}(j_l − 1)` of their non-leading qubits, so keeping the words
//! with small `I'` keeps the large coefficients.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::walsh::{walsh_coefficients, CartanExpansion};
use super::{embedded_eigenvalues, hermitian_eigenvalues, HamiltonianKind};
use crate::grid::GridSpec;
use crate::payoff::ContractParams;
use crate::{Error, Result};

/// Index `I'` of a Hermitian word.
///
/// Odd-body words (an even number `2k` of qubits besides qubit 0) use
/// `I' = Σ_{l=1}^{2k}(j_l − 1)` directly. An even-body word is read as an
/// odd-body word of a register with one more qubit whose extra qubit sits at
/// `j = n`, which adds `n − 1` to the sum, and the index is then lowered by
/// one to undo the growth of the register: `I' = Σ(j_l − 1) + n − 2`.
pub fn truncation_index(word: u64, n_qubits: u32) -> Result<usize> {
    if word & 1 == 0 {
        return Err(Error::WordWithoutLeadingQubit { word });
    }
    let others: Vec<u32> = (1..n_qubits).filter(|j| word >> j & 1 == 1).collect();
    let base: usize = others.iter().map(|&j| (j - 1) as usize).sum();
    if others.len().is_multiple_of(2) {
        Ok(base)
    } else {
        Ok(base + n_qubits as usize - 2)
    }
}

/// Largest index reachable in an `n`-qubit register: `n(n−1)/2 − 1`.
fn max_index(n_qubits: u32) -> usize {
    let n = n_qubits as usize;
    (n * (n - 1) / 2).saturating_sub(1)
}

fn degeneracy_prefactor(n_qubits: u32) -> f64 {
    let n = n_qubits as f64;
    2.0 * (2.0 / (n * n - 3.0 * n + 4.0) + PI / (2.0 * 3f64.sqrt()))
        * ((PI / 3f64.sqrt()) * (n * (n - 1.0) / 4.0).sqrt()).exp()
}

/// Upper bound on the number of Hermitian words sharing the index `I'`.
///
/// The bound is the uniform one obtained at the middle of the index range,
/// including the factor 2 for the even-body words.
pub fn degeneracy_bound(index: usize, n_qubits: u32) -> Result<f64> {
    let max = max_index(n_qubits);
    if index < 1 || index > max {
        return Err(Error::IndexOutOfRange { index, min: 1, max });
    }
    Ok(degeneracy_prefactor(n_qubits))
}

/// `C = (2^n − 1)/2^{n+1}·(2r − σ²)/x_max·cot(π/2^n)`, the single-body coefficient.
pub fn hermitian_scale(grid: &GridSpec, contract: &ContractParams) -> f64 {
    let nf = grid.len() as f64;
    (nf - 1.0) / (2.0 * nf) * (2.0 * contract.rate - contract.variance())
        / grid.x_max()
        / (PI / nf).tan()
}

/// `C' = degeneracy bound × |C|`.
pub fn truncation_constant(grid: &GridSpec, contract: &ContractParams) -> f64 {
    degeneracy_prefactor(grid.n_qubits()) * hermitian_scale(grid, contract).abs()
}

/// Smallest `M` with `C'·2^{−M} ≤ π/4`.
pub fn minimum_valid_index(grid: &GridSpec, contract: &ContractParams) -> u32 {
    let c_prime = truncation_constant(grid, contract);
    if c_prime <= FRAC_PI_4 {
        return 0;
    }
    let mut m = (c_prime / FRAC_PI_4).log2().ceil().max(0.0) as u32;
    // Guard against log2 landing a hair off an exact power of two.
    while m > 0 && c_prime * 2f64.powi(-(m as i32 - 1)) <= FRAC_PI_4 {
        m -= 1;
    }
    while c_prime * 2f64.powi(-(m as i32)) > FRAC_PI_4 {
        m += 1;
    }
    m
}

/// `sqrt(2(1 − cos(2TC'·2^{−M})))` for dropping every Hermitian word with `I' ≥ M`.
pub fn truncation_error_bound(
    m: u32,
    maturity: f64,
    grid: &GridSpec,
    contract: &ContractParams,
) -> Result<f64> {
    let min_m = minimum_valid_index(grid, contract);
    if m < min_m {
        return Err(Error::TruncationTooShort { m, min_m });
    }
    let angle = maturity * truncation_constant(grid, contract) * 2f64.powi(-(m as i32));
    // Same quantity as the square-root form without its cancellation near zero.
    Ok(2.0 * angle.sin().abs())
}

/// Smallest valid `M` with `log₂(2TC') − log₂(arccos(1 − ε²/2)) ≤ M`.
pub fn min_terms_for_epsilon(
    epsilon: f64,
    maturity: f64,
    grid: &GridSpec,
    contract: &ContractParams,
) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let min_m = minimum_valid_index(grid, contract);
    let reach = 2.0 * maturity * truncation_constant(grid, contract);
    if reach <= 0.0 {
        return Ok(min_m);
    }
    let needed = (reach / (1.0 - 0.5 * epsilon * epsilon).acos())
        .log2()
        .ceil();
    Ok((needed.max(0.0) as u32).max(min_m))
}

/// One retained Cartan word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanTerm {
    pub word: u64,
    #[serde(with = "decimal_string")]
    pub coefficient: f64,
    pub kind: HamiltonianKind,
    /// `I'` for Hermitian words; embedded words have none.
    pub index: Option<usize>,
}

/// The retained terms of both expansions, largest first within each kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub n_qubits: u32,
    pub x_max: f64,
    pub contract: ContractParams,
    pub maturity: f64,
    pub m_herm: usize,
    pub m_emb: usize,
    pub terms: Vec<PlanTerm>,
    /// Operator-norm bound on the deviation of the truncated circuit from
    /// the untruncated one, from the coefficient mass that was dropped.
    pub error_bound: f64,
}

impl TruncationPlan {
    pub fn hermitian_terms(&self) -> impl Iterator<Item = &PlanTerm> {
        self.terms
            .iter()
            .filter(|t| t.kind == HamiltonianKind::Hermitian)
    }

    pub fn embedded_terms(&self) -> impl Iterator<Item = &PlanTerm> {
        self.terms
            .iter()
            .filter(|t| t.kind == HamiltonianKind::Embedded)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialisation cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Words sorted by decreasing magnitude, ties broken by ascending bitmask,
/// with numerically vanishing coefficients removed.
fn ranked_words(expansion: &CartanExpansion) -> Vec<(u64, f64)> {
    let peak = expansion.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut words: Vec<(u64, f64)> = expansion
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > 1e-14 * peak)
        .map(|(w, c)| (w as u64, *c))
        .collect();
    words.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    words
}

/// `2 sin(min(θ, π)/2)`, the largest distance from 1 of a phase spread over `[−θ, θ]`.
fn chord(theta: f64) -> f64 {
    2.0 * (0.5 * theta.min(PI)).sin()
}

pub fn build_truncation_plan(
    grid: &GridSpec,
    contract: &ContractParams,
    m_herm: usize,
    m_emb: usize,
) -> Result<TruncationPlan> {
    let n = grid.len();
    for requested in [m_herm, m_emb] {
        if requested > n {
            return Err(Error::PlanTooLarge {
                requested,
                available: n,
            });
        }
    }
    let herm = ranked_words(&walsh_coefficients(&hermitian_eigenvalues(grid, contract)));
    let emb = ranked_words(&walsh_coefficients(&embedded_eigenvalues(grid, contract)?));
    let n_q = grid.n_qubits();

    let mut terms = Vec::with_capacity(m_herm.min(herm.len()) + m_emb.min(emb.len()));
    for &(word, coefficient) in herm.iter().take(m_herm) {
        terms.push(PlanTerm {
            word,
            coefficient,
            kind: HamiltonianKind::Hermitian,
            index: Some(truncation_index(word, n_q)?),
        });
    }
    for &(word, coefficient) in emb.iter().take(m_emb) {
        terms.push(PlanTerm {
            word,
            coefficient,
            kind: HamiltonianKind::Embedded,
            index: None,
        });
    }

    let dropped = |words: &[(u64, f64)], kept: usize| -> f64 {
        words.iter().skip(kept).map(|(_, c)| c.abs()).sum()
    };
    let error_bound =
        chord(contract.maturity * dropped(&herm, m_herm)) + chord(dropped(&emb, m_emb));

    Ok(TruncationPlan {
        n_qubits: n_q,
        x_max: grid.x_max(),
        contract: *contract,
        maturity: contract.maturity,
        m_herm,
        m_emb,
        terms,
        error_bound,
    })
}

mod decimal_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}
