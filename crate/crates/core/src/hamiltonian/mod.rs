//! Diagonal momentum-space generators and their Pauli-Z expansions.
//!
//! After the change of variables `S = e^x` and time reversal, the pricing
//! generator splits into a Hermitian drift `−(σ²/2 − r)·p` and an
//! anti-Hermitian decay `i(σ²/2·p² + r)`. Both are diagonal in the momentum
//! basis. The decay propagator `O = exp(−T(σ²/2·p² + r))` is embedded through
//! `H̃ = arccos(O)`, whose eigenvalues lie in `[0, π/2]`.

mod truncation;
mod walsh;

pub use truncation::{
    build_truncation_plan, degeneracy_bound, hermitian_scale, min_terms_for_epsilon,
    minimum_valid_index, truncation_constant, truncation_error_bound, truncation_index, PlanTerm,
    TruncationPlan,
};
pub use walsh::{
    closed_form_hermitian_coefficient, embedded_asymptotic_coefficients, walsh_coefficients,
    walsh_sign, CartanExpansion, EmbeddedAsymptotics,
};

use serde::{Deserialize, Serialize};

use crate::grid::{momentum_eigenvalues, GridSpec};
use crate::payoff::ContractParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    /// Drift generator `H_BSH`; its eigenvalues are odd in `p`.
    Hermitian,
    /// Dilation generator `H̃ = arccos(O)`; its eigenvalues are even in `p`.
    Embedded,
}

/// Momentum-basis eigenvalues `h_k` of one of the two generators.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralHamiltonian {
    pub kind: HamiltonianKind,
    pub eigenvalues: Vec<f64>,
    pub contract: ContractParams,
    pub grid: GridSpec,
}

impl SpectralHamiltonian {
    pub fn n_qubits(&self) -> u32 {
        self.grid.n_qubits()
    }
}

/// `h_k = −(σ²/2 − r)·p_k`.
pub fn hermitian_eigenvalues(grid: &GridSpec, contract: &ContractParams) -> SpectralHamiltonian {
    let drift = -(0.5 * contract.variance() - contract.rate);
    let eigenvalues = momentum_eigenvalues(grid)
        .into_vec()
        .into_iter()
        .map(|p| drift * p)
        .collect();
    SpectralHamiltonian {
        kind: HamiltonianKind::Hermitian,
        eigenvalues,
        contract: *contract,
        grid: grid.clone(),
    }
}

/// `h_k = arccos(exp(−T(σ²/2·p_k² + r)))`.
pub fn embedded_eigenvalues(
    grid: &GridSpec,
    contract: &ContractParams,
) -> Result<SpectralHamiltonian> {
    if contract.rate < 0.0 || contract.maturity < 0.0 {
        return Err(Error::DilationViolated {
            rate: contract.rate,
            maturity: contract.maturity,
        });
    }
    let eigenvalues = momentum_eigenvalues(grid)
        .into_vec()
        .into_iter()
        .map(|p| decay_factor(contract, p).acos())
        .collect();
    Ok(SpectralHamiltonian {
        kind: HamiltonianKind::Embedded,
        eigenvalues,
        contract: *contract,
        grid: grid.clone(),
    })
}

/// `exp(−T(σ²/2·p² + r))`, the eigenvalue of the decay propagator at momentum `p`.
pub fn decay_factor(contract: &ContractParams, p: f64) -> f64 {
    (-contract.maturity * (0.5 * contract.variance() * p * p + contract.rate)).exp()
}

/// Time-averaged variance `(1/T)∫₀ᵀ σ²(t) dt` from sampled `(t, σ)` pairs.
///
/// σ² is interpolated linearly between samples. Repeated times encode a jump.
/// Samples must start at `t = 0` and reach `T`; anything beyond `T` is cut.
pub fn average_variance(samples: &[(f64, f64)], maturity: f64) -> Result<f64> {
    let bad = |m: &str| Err(Error::VolatilitySchedule(m.to_string()));
    if !(maturity.is_finite() && maturity > 0.0) {
        return bad("maturity must be positive");
    }
    if samples.len() < 2 {
        return bad("need at least two samples");
    }
    if samples
        .iter()
        .any(|(t, s)| !t.is_finite() || !s.is_finite() || *s < 0.0)
    {
        return bad("times and volatilities must be finite, volatilities non-negative");
    }
    if samples.windows(2).any(|w| w[1].0 < w[0].0) {
        return bad("sample times must be non-decreasing");
    }
    let eps = 1e-12 * maturity;
    if samples[0].0.abs() > eps || samples[samples.len() - 1].0 < maturity - eps {
        return bad("samples must cover [0, T]");
    }

    let mut integral = 0.0;
    for w in samples.windows(2) {
        let (t0, s0) = w[0];
        let (t1, s1) = w[1];
        if t0 >= maturity || t1 <= t0 {
            continue;
        }
        let (v0, v1) = (s0 * s0, s1 * s1);
        let (end, v_end) = if t1 > maturity {
            (maturity, v0 + (v1 - v0) * (maturity - t0) / (t1 - t0))
        } else {
            (t1, v1)
        };
        integral += 0.5 * (v0 + v_end) * (end - t0);
    }
    Ok(integral / maturity)
}
