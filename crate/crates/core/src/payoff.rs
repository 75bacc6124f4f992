//! Contract parameters and the duplicated payoff state.
//!
//! The payoff is written into the lower half of the register and mirrored onto
//! the upper half, so the lattice state is symmetric under `i ↦ N−1−i` and the
//! periodic boundary joins two equal values instead of a cliff.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionSide {
    Put,
    Call,
}

/// European option under constant rate and volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractParams {
    pub side: OptionSide,
    pub strike: f64,
    /// Risk-free rate per year; must be non-negative for the dilation.
    pub rate: f64,
    /// Volatility per √year.
    pub sigma: f64,
    /// Time to maturity in years.
    pub maturity: f64,
}

impl ContractParams {
    pub fn new(
        side: OptionSide,
        strike: f64,
        rate: f64,
        sigma: f64,
        maturity: f64,
    ) -> Result<Self> {
        let c = Self {
            side,
            strike,
            rate,
            sigma,
            maturity,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn put(strike: f64, rate: f64, sigma: f64, maturity: f64) -> Result<Self> {
        Self::new(OptionSide::Put, strike, rate, sigma, maturity)
    }

    /// Put with K = 50, r = 0.3, σ = 0.2, T = 1 year.
    pub fn reference_put() -> Self {
        Self {
            side: OptionSide::Put,
            strike: 50.0,
            rate: 0.3,
            sigma: 0.2,
            maturity: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike.is_finite() && self.strike > 0.0) {
            return Err(Error::param("strike", "finite and positive", self.strike));
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return Err(Error::param("rate", "finite and non-negative", self.rate));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param("sigma", "finite and positive", self.sigma));
        }
        // T = 0 is allowed as the identity-evolution limit.
        if !(self.maturity.is_finite() && self.maturity >= 0.0) {
            return Err(Error::param(
                "maturity",
                "finite and non-negative",
                self.maturity,
            ));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn with_maturity(mut self, maturity: f64) -> Self {
        self.maturity = maturity;
        self
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn with_strike(mut self, strike: f64) -> Self {
        self.strike = strike;
        self
    }

    /// Replaces σ by `sqrt(avg_variance)`, e.g. from
    /// [`average_variance`](crate::hamiltonian::average_variance).
    pub fn with_average_variance(mut self, avg_variance: f64) -> Self {
        self.sigma = avg_variance.sqrt();
        self
    }

    pub fn payoff(&self, spot: f64) -> f64 {
        match self.side {
            OptionSide::Put => (self.strike - spot).max(0.0),
            OptionSide::Call => (spot - self.strike).max(0.0),
        }
    }
}

/// Normalised payoff state ready to be loaded into the register.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    pub amplitudes: Vec<Complex64>,
    /// Squared norm of the unnormalised duplicated payoff vector.
    pub lambda: f64,
    /// Largest in-the-money index of the lower half.
    pub n_max: usize,
}

impl PreparedState {
    pub fn real_amplitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.re).collect()
    }
}

/// `⌊(N−1)·(ln K/(2·x_max) + 1/4)⌋`, the last lower-half index with
/// `K ≥ exp(-x_max/2 + j·δx)`.
pub fn compute_n_max(grid: &GridSpec, strike: f64) -> Result<usize> {
    let half = 0.5 * grid.x_max();
    let log_k = strike.ln();
    if !strike.is_finite() || strike <= 0.0 || log_k < -half * (1.0 + 1e-12) || log_k >= half {
        return Err(Error::StrikeOutsideWindow {
            strike,
            lo: (-half).exp(),
            hi: half.exp(),
        });
    }
    let raw = (grid.len() - 1) as f64 * (log_k / (2.0 * grid.x_max()) + 0.25);
    // Strikes sitting exactly on a lattice point should not lose it to rounding.
    Ok((raw + 1e-9).floor().max(0.0) as usize)
}

pub fn prepare_initial_state(grid: &GridSpec, contract: &ContractParams) -> Result<PreparedState> {
    let n = grid.len();
    let n_max = compute_n_max(grid, contract.strike)?;
    let mut raw = vec![0.0; n];
    match contract.side {
        OptionSide::Put => {
            for j in 0..=n_max {
                let v = contract.strike - grid.physical_log_price(j).exp();
                raw[j] = v;
                raw[n - 1 - j] = v;
            }
        }
        OptionSide::Call => {
            for j in n_max + 1..grid.physical_len() {
                let v = (grid.physical_log_price(j).exp() - contract.strike).max(0.0);
                raw[j] = v;
                raw[n - 1 - j] = v;
            }
        }
    }
    let lambda: f64 = raw.iter().map(|v| v * v).sum();
    // A strike on the lowest lattice price leaves only rounding residue.
    if lambda.sqrt() <= 1e-12 * contract.strike {
        return Err(Error::DegeneratePayoff);
    }
    let scale = lambda.sqrt().recip();
    Ok(PreparedState {
        amplitudes: raw.iter().map(|v| Complex64::new(v * scale, 0.0)).collect(),
        lambda,
        n_max,
    })
}

/// Discrete log-concavity of the amplitude profile.
///
/// The two halves of the register are checked separately so the seam between
/// the payoff and its mirror image is never differenced; inside each half every
/// maximal run of strictly positive amplitudes must have non-positive second
/// differences of `ln a`. Runs shorter than three points pass vacuously.
pub fn log_concavity_check(state: &PreparedState, grid: &GridSpec) -> bool {
    let amps = state.real_amplitudes();
    if amps.len() != grid.len() {
        return false;
    }
    let (lower, upper) = amps.split_at(grid.physical_len());
    half_is_log_concave(lower.iter()) && half_is_log_concave(upper.iter().rev())
}

fn half_is_log_concave<'a>(values: impl Iterator<Item = &'a f64>) -> bool {
    let mut run: Vec<f64> = Vec::new();
    let mut ok = true;
    for &a in values.chain(std::iter::once(&0.0)) {
        if a > 0.0 {
            run.push(a.ln());
        } else {
            ok &= run_is_concave(&run);
            run.clear();
        }
    }
    ok
}

fn run_is_concave(logs: &[f64]) -> bool {
    logs.windows(3).all(|w| {
        let second = w[0] - 2.0 * w[1] + w[2];
        let scale = w.iter().map(|v| v.abs()).fold(1.0, f64::max);
        second <= 1e-12 * scale
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn reference_grid() -> GridSpec {
        GridSpec::from_s_max(8, 135.0).unwrap()
    }

    #[test]
    fn n_max_reference() {
        assert_eq!(compute_n_max(&reference_grid(), 50.0).unwrap(), 114);
    }

    #[test]
    fn n_max_edges() {
        let g = build_grid(6, 5.0).unwrap();
        assert_eq!(compute_n_max(&g, (-2.5f64).exp()).unwrap(), 0);
        assert_eq!(compute_n_max(&g, 1.0).unwrap(), 63 / 4);
        assert!(compute_n_max(&g, 2.5f64.exp()).is_err());
        assert!(compute_n_max(&g, 0.01).is_err());
    }

    #[test]
    fn reference_state_shape() {
        let g = reference_grid();
        let c = ContractParams::reference_put();
        let s = prepare_initial_state(&g, &c).unwrap();
        let norm: f64 = s.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let a0 = s.amplitudes[0].re * s.lambda.sqrt();
        assert!((a0 - (50.0 - 1.0 / 135.0)).abs() < 1e-10);
        let n = s.amplitudes.len();
        for i in 0..n {
            assert_eq!(s.amplitudes[i], s.amplitudes[n - 1 - i]);
            assert!(s.amplitudes[i].re >= 0.0);
            assert_eq!(s.amplitudes[i].im, 0.0);
        }
        assert!(log_concavity_check(&s, &g));
    }

    #[test]
    fn strike_at_lower_edge_is_degenerate() {
        let g = build_grid(5, 4.0).unwrap();
        let c = ContractParams::put((-2.0f64).exp(), 0.1, 0.2, 1.0).unwrap();
        assert_eq!(prepare_initial_state(&g, &c), Err(Error::DegeneratePayoff));
    }

    #[test]
    fn two_point_support_is_vacuously_concave() {
        let g = build_grid(4, 4.0).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0] = Complex64::new(0.5, 0.0);
        amps[1] = Complex64::new(0.5, 0.0);
        amps[14] = Complex64::new(0.5, 0.0);
        amps[15] = Complex64::new(0.5, 0.0);
        let s = PreparedState {
            amplitudes: amps,
            lambda: 1.0,
            n_max: 1,
        };
        assert!(log_concavity_check(&s, &g));
    }

    #[test]
    fn convex_bump_is_detected() {
        let g = reference_grid();
        let mut s = prepare_initial_state(&g, &ContractParams::reference_put()).unwrap();
        s.amplitudes[40] *= 0.5;
        assert!(!log_concavity_check(&s, &g));
    }

    #[test]
    fn call_state_is_symmetric() {
        let g = reference_grid();
        let c = ContractParams::new(OptionSide::Call, 50.0, 0.05, 0.2, 1.0).unwrap();
        let s = prepare_initial_state(&g, &c).unwrap();
        let n = g.len();
        let sqrt_l = s.lambda.sqrt();
        for j in 0..g.physical_len() {
            let expect = c.payoff(g.physical_log_price(j).exp());
            assert!((s.amplitudes[j].re * sqrt_l - expect).abs() < 1e-9);
            assert_eq!(s.amplitudes[j], s.amplitudes[n - 1 - j]);
        }
    }

    #[test]
    fn contract_validation() {
        assert!(ContractParams::put(-1.0, 0.1, 0.2, 1.0).is_err());
        assert!(ContractParams::put(50.0, -0.1, 0.2, 1.0).is_err());
        assert!(ContractParams::put(50.0, 0.1, 0.0, 1.0).is_err());
        assert!(ContractParams::put(50.0, 0.1, 0.2, -1.0).is_err());
        assert!(ContractParams::put(50.0, 0.1, 0.2, 0.0).is_ok());
    }
}
