//! Lower bound on the post-selection probability.
//!
//! Since `p_0 = 0`, the zero-momentum component of the payoff state survives
//! the decay with weight `e^{−2Tr}`, so `Ps ≥ e^{−2Tr}·|φ̂_0|²`. With the
//! window pinned to `e^{x_max/2} = 3K`, `γ(N, K) = |φ̂_0|² = (Σ_j φ_j)²/N`
//! depends only on the lattice size and the strike.

use crate::grid::GridSpec;
use crate::payoff::{prepare_initial_state, ContractParams};
use crate::{Error, Result};

/// Grid with `e^{x_max/2} = 3K` and `N = 2^n` points.
pub fn constrained_grid(n_points: usize, strike: f64) -> Result<GridSpec> {
    if !n_points.is_power_of_two() {
        return Err(Error::param("N_x", "a power of two", n_points as f64));
    }
    if !(strike.is_finite() && strike > 1.0 / 3.0) {
        return Err(Error::param("strike", "above 1/3 so that 3K > 1", strike));
    }
    GridSpec::from_s_max(n_points.trailing_zeros(), 3.0 * strike)
}

/// `γ(N, K)`, the squared overlap of the put payoff state with the
/// zero-momentum mode on the constrained grid.
pub fn gamma(n_points: usize, strike: f64) -> Result<f64> {
    let grid = constrained_grid(n_points, strike)?;
    let contract = ContractParams::reference_put().with_strike(strike);
    let state = prepare_initial_state(&grid, &contract)?;
    let sum: f64 = state.amplitudes.iter().map(|a| a.re).sum();
    Ok(sum * sum / n_points as f64)
}

/// `e^{−2Tr}·γ(N, K)`.
pub fn gamma_lower_bound(n_points: usize, strike: f64, rate: f64, maturity: f64) -> Result<f64> {
    Ok((-2.0 * maturity * rate).exp() * gamma(n_points, strike)?)
}

/// Closed form of `lim_{N→∞} γ(N, K)` in rational-log form:
/// `(−1 + K² − 6K² ln K)² / ((−1 + 12K² − 11K⁴ + 36K⁴ ln K)·ln 3K)`.
pub fn gamma_limit_closed_form(strike: f64) -> f64 {
    let k2 = strike * strike;
    let lk = strike.ln();
    let num = -1.0 + k2 - 6.0 * k2 * lk;
    num * num / ((-1.0 + 12.0 * k2 - 11.0 * k2 * k2 + 36.0 * k2 * k2 * lk) * (3.0 * strike).ln())
}

/// `lim_{N→∞} γ(N, K)` from the continuum integrals of the payoff and its
/// square over `[1/(3K), K]` in log-price.
///
/// With `D = ln K + ln 3K` and `c = 1/(3K)`:
/// `A = K·D − (K − c)`, `B = K²·D − 2K(K − c) + (K² − c²)/2` and the limit is
/// `A² / (2B·ln 3K)`.
pub fn gamma_limit(strike: f64) -> f64 {
    let k = strike;
    let d = k.ln() + (3.0 * k).ln();
    let c = 1.0 / (3.0 * k);
    let a = k * d - (k - c);
    let b = k * k * d - 2.0 * k * (k - c) + 0.5 * (k * k - c * c);
    a * a / (2.0 * b * (3.0 * k).ln())
}
