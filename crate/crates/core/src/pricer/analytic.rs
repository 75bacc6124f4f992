use statrs::function::erf::erfc;

use super::PriceCurve;
use crate::payoff::{ContractParams, OptionSide};
use crate::{Error, Result};

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn d1_d2(spot: f64, c: &ContractParams) -> (f64, f64) {
    let vol = c.sigma * c.maturity.sqrt();
    let d1 = ((spot / c.strike).ln() + (c.rate + 0.5 * c.variance()) * c.maturity) / vol;
    (d1, d1 - vol)
}

/// Black-Scholes European put. `T = 0` returns the payoff.
pub fn analytic_put(spot: f64, contract: &ContractParams) -> f64 {
    if contract.maturity == 0.0 {
        return (contract.strike - spot).max(0.0);
    }
    let (d1, d2) = d1_d2(spot, contract);
    contract.strike * (-contract.rate * contract.maturity).exp() * norm_cdf(-d2)
        - spot * norm_cdf(-d1)
}

/// Black-Scholes European call. `T = 0` returns the payoff.
pub fn analytic_call(spot: f64, contract: &ContractParams) -> f64 {
    if contract.maturity == 0.0 {
        return (spot - contract.strike).max(0.0);
    }
    let (d1, d2) = d1_d2(spot, contract);
    spot * norm_cdf(d1)
        - contract.strike * (-contract.rate * contract.maturity).exp() * norm_cdf(d2)
}

pub fn analytic_price(spot: f64, contract: &ContractParams) -> f64 {
    match contract.side {
        OptionSide::Put => analytic_put(spot, contract),
        OptionSide::Call => analytic_call(spot, contract),
    }
}

/// Analytic values below this are left out of the relative error.
pub const ANALYTIC_FLOOR: f64 = 1e-10;

/// `Σ|C_i − C(S_i)| / Σ|C(S_i)|` over the points where the analytic value
/// reaches [`ANALYTIC_FLOOR`].
pub fn l1_relative_error(curve: &PriceCurve, contract: &ContractParams) -> Result<f64> {
    if curve.values.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (s, c) in curve.stock_prices.iter().zip(&curve.values) {
        let exact = analytic_price(*s, contract);
        if exact.abs() >= ANALYTIC_FLOOR {
            num += (c - exact).abs();
            den += exact.abs();
        }
    }
    if den == 0.0 {
        return Err(Error::EmptyCurve);
    }
    Ok(num / den)
}
