//! Crank-Nicolson reference solver for the log-price Black-Scholes equation
//!
//! In time to maturity `τ` the value solves
//! `C_τ = σ²/2·C_xx + (r − σ²/2)·C_x − r·C` on `[x_lo, x_hi]`, with the
//! asymptotic values of the contract imposed at both ends.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::payoff::{ContractParams, OptionSide};
use crate::pricer::{l1_relative_error, price_exact, CurveMetadata, PriceCurve, PricingMethod};
use crate::{Error, Result};

/// Time steps used for the plateau experiment when none are given.
pub const DEFAULT_FIXED_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnConfig {
    pub space_points: usize,
    pub time_steps: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub contract: ContractParams,
}

impl CnConfig {
    /// Uniform grid over `ln S ∈ [−ln S_max, ln S_max]`, the same price window as
    /// the lattice pricer.
    pub fn symmetric(
        space_points: usize,
        time_steps: usize,
        s_max: f64,
        contract: ContractParams,
    ) -> Self {
        let half = s_max.ln();
        Self {
            space_points,
            time_steps,
            x_lo: -half,
            x_hi: half,
            contract,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.space_points < 3 {
            return Err(Error::CnConfig(format!(
                "need at least 3 space points, got {}",
                self.space_points
            )));
        }
        if self.time_steps < 1 {
            return Err(Error::CnConfig("need at least one time step".into()));
        }
        if !(self.x_lo.is_finite() && self.x_hi.is_finite() && self.x_lo < self.x_hi) {
            return Err(Error::CnConfig(format!(
                "invalid domain [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        self.contract.validate()
    }

    pub fn delta_x(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.space_points - 1) as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let dx = self.delta_x();
        (0..self.space_points)
            .map(|i| self.x_lo + i as f64 * dx)
            .collect()
    }
}

fn boundary_values(c: &ContractParams, x_lo: f64, x_hi: f64, tau: f64) -> (f64, f64) {
    let discounted = c.strike * (-c.rate * tau).exp();
    match c.side {
        OptionSide::Put => ((discounted - x_lo.exp()).max(0.0), 0.0),
        OptionSide::Call => (0.0, (x_hi.exp() - discounted).max(0.0)),
    }
}

/// Solves `a_i y_{i−1} + b_i y_i + c_i y_{i+1} = d_i` in place of `d`.
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) -> Result<()> {
    let n = d.len();
    let mut c_star = vec![0.0; n];
    let mut pivot = b[0];
    for i in 0..n {
        if i > 0 {
            pivot = b[i] - a[i] * c_star[i - 1];
        }
        if !pivot.is_finite() || pivot.abs() < f64::MIN_POSITIVE {
            return Err(Error::SingularSystem { row: i });
        }
        c_star[i] = c[i] / pivot;
        d[i] = if i == 0 {
            d[0] / pivot
        } else {
            (d[i] - a[i] * d[i - 1]) / pivot
        };
    }
    for i in (0..n - 1).rev() {
        d[i] -= c_star[i] * d[i + 1];
    }
    Ok(())
}

pub fn cn_solve(config: &CnConfig) -> Result<PriceCurve> {
    cn_solve_observed(config, |_, _, _| {})
}

/// Like [`cn_solve`], calling `observe(step, τ, values)` after every step,
/// including the payoff at step 0.
pub fn cn_solve_observed(
    config: &CnConfig,
    mut observe: impl FnMut(usize, f64, &[f64]),
) -> Result<PriceCurve> {
    config.validate()?;
    let c = &config.contract;
    let x = config.positions();
    let n = x.len();
    let dx = config.delta_x();
    let dt = c.maturity / config.time_steps as f64;

    let diffusion = 0.5 * c.variance() / (dx * dx);
    let drift = (c.rate - 0.5 * c.variance()) / (2.0 * dx);
    // L u_i = lower·u_{i−1} + diag·u_i + upper·u_{i+1}
    let lower = diffusion - drift;
    let diag = -2.0 * diffusion - c.rate;
    let upper = diffusion + drift;

    let m = n - 2;
    let a = vec![-0.5 * dt * lower; m];
    let b = vec![1.0 - 0.5 * dt * diag; m];
    let cc = vec![-0.5 * dt * upper; m];

    let mut u: Vec<f64> = x.iter().map(|xi| c.payoff(xi.exp())).collect();
    observe(0, 0.0, &u);
    let mut rhs = vec![0.0; m];
    for step in 1..=config.time_steps {
        let tau = step as f64 * dt;
        let (lo, hi) = boundary_values(c, config.x_lo, config.x_hi, tau);
        for i in 1..n - 1 {
            rhs[i - 1] = u[i] + 0.5 * dt * (lower * u[i - 1] + diag * u[i] + upper * u[i + 1]);
        }
        rhs[0] += 0.5 * dt * lower * lo;
        rhs[m - 1] += 0.5 * dt * upper * hi;
        thomas(&a, &b, &cc, &mut rhs)?;
        u[0] = lo;
        u[n - 1] = hi;
        u[1..n - 1].copy_from_slice(&rhs);
        observe(step, tau, &u);
    }

    Ok(PriceCurve {
        stock_prices: x.iter().map(|xi| xi.exp()).collect(),
        values: u,
        metadata: CurveMetadata {
            contract: *c,
            n_points: n,
            x_max: config.x_hi - config.x_lo,
            method: PricingMethod::CrankNicolson,
            plan: None,
            shots: None,
            seed: None,
            success_probability: None,
        },
    })
}

/// How many time steps each grid size gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepsRule {
    Fixed(usize),
    /// `steps = ⌈base_steps·(points/base_points)²⌉`.
    Quadratic {
        base_points: usize,
        base_steps: usize,
    },
}

impl StepsRule {
    pub fn steps(&self, points: usize) -> usize {
        match *self {
            StepsRule::Fixed(s) => s,
            StepsRule::Quadratic {
                base_points,
                base_steps,
            } => {
                let ratio = points as f64 / base_points as f64;
                (base_steps as f64 * ratio * ratio).ceil().max(1.0) as usize
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub points: usize,
    pub time_steps: usize,
    pub cn_error: f64,
    /// Lattice pricer error; only defined for powers of two.
    pub quantum_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Error ratio of the two finest grids is above 0.8.
    pub cn_plateau: bool,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("points,time_steps,cn_error,quantum_error\n");
        for r in &self.rows {
            let q = r.quantum_error.map(|e| e.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{q}", r.points, r.time_steps, r.cn_error)
                .expect("writing to a String");
        }
        writeln!(out, "# cn_plateau={}", self.cn_plateau).expect("writing to a String");
        out
    }

    /// `error(last)/error(second to last)` for the chosen column.
    pub fn last_ratio(&self, quantum: bool) -> Option<f64> {
        let pick = |r: &ConvergenceRow| {
            if quantum {
                r.quantum_error
            } else {
                Some(r.cn_error)
            }
        };
        let n = self.rows.len();
        if n < 2 {
            return None;
        }
        Some(pick(&self.rows[n - 1])? / pick(&self.rows[n - 2])?)
    }
}

/// Crank-Nicolson and lattice errors against the closed form on matched grids.
pub fn convergence_sweep(
    contract: &ContractParams,
    s_max: f64,
    point_counts: &[usize],
    steps_rule: StepsRule,
) -> Result<ConvergenceTable> {
    let mut rows = Vec::with_capacity(point_counts.len());
    for &points in point_counts {
        let steps = steps_rule.steps(points);
        let cn = cn_solve(&CnConfig::symmetric(points, steps, s_max, *contract))?;
        let quantum_error = if points.is_power_of_two() && points >= 4 {
            let grid = GridSpec::from_s_max(points.trailing_zeros(), s_max)?;
            Some(l1_relative_error(&price_exact(&grid, contract)?, contract)?)
        } else {
            None
        };
        rows.push(ConvergenceRow {
            points,
            time_steps: steps,
            cn_error: l1_relative_error(&cn, contract)?,
            quantum_error,
        });
    }
    let mut table = ConvergenceTable {
        rows,
        cn_plateau: false,
    };
    table.cn_plateau = table.last_ratio(false).is_some_and(|r| r > 0.8);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_dense_solution() {
        let a = [0.0, 1.0, 1.0];
        let b = [4.0, 4.0, 4.0];
        let c = [1.0, 1.0, 0.0];
        let mut d = [5.0, 6.0, 5.0];
        thomas(&a, &b, &c, &mut d).unwrap();
        for v in d {
            assert!((v - 1.0).abs() < 1e-15);
        }
        let mut d = [1.0, 1.0];
        assert_eq!(
            thomas(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &mut d),
            Err(Error::SingularSystem { row: 0 })
        );
    }

    #[test]
    fn tiny_maturity_is_near_payoff() {
        let c = ContractParams::reference_put().with_maturity(1e-6);
        let curve = cn_solve(&CnConfig::symmetric(65, 1, 135.0, c)).unwrap();
        for (s, v) in curve.stock_prices.iter().zip(&curve.values) {
            assert!((v - c.payoff(*s)).abs() < 1e-3);
        }
    }

    #[test]
    fn config_errors() {
        let c = ContractParams::reference_put();
        assert!(cn_solve(&CnConfig::symmetric(2, 4, 135.0, c)).is_err());
        assert!(cn_solve(&CnConfig::symmetric(16, 0, 135.0, c)).is_err());
        let mut bad = CnConfig::symmetric(16, 4, 135.0, c);
        bad.x_hi = bad.x_lo;
        assert!(cn_solve(&bad).is_err());
    }

    #[test]
    fn reference_accuracy() {
        let c = ContractParams::reference_put();
        let err = l1_relative_error(
            &cn_solve(&CnConfig::symmetric(512, 512, 135.0, c)).unwrap(),
            &c,
        )
        .unwrap();
        assert!(err > 1e-12 && err < 1e-3, "{err}");
    }

    #[test]
    fn steps_rules() {
        assert_eq!(StepsRule::Fixed(8).steps(1024), 8);
        let q = StepsRule::Quadratic {
            base_points: 32,
            base_steps: 4,
        };
        assert_eq!(q.steps(64), 16);
    }
}
