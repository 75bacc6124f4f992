//! End-to-end pricing: evolve the payoff state, post-select the embedding
//! qubit on `|0⟩` and read the option value off the surviving amplitudes.
//!
//! The surviving joint probability is `p(x_i, 0_E) = Ps·p(x_i|0_E)` and the
//! normalised state was scaled by `1/√Λ`, so `C(T, S_i) = √(p(x_i, 0_E)·Λ)`.

mod analytic;
mod gamma;

pub use analytic::{
    analytic_call, analytic_price, analytic_put, l1_relative_error, ANALYTIC_FLOOR,
};
pub use gamma::{constrained_grid, gamma, gamma_limit, gamma_limit_closed_form, gamma_lower_bound};

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{
    apply_momentum_diagonal, compile, entangling_tally, momentum_blocks,
    optimize_cnot_cancellation, simulate, QubitLayout, StateVector,
};
use crate::fourier::qft;
use crate::grid::GridSpec;
use crate::hamiltonian::{decay_factor, TruncationPlan};
use crate::payoff::{prepare_initial_state, ContractParams, PreparedState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PricingMethod {
    /// Diagonal propagator applied directly in the momentum basis.
    Exact,
    /// Compiled gate sequence on the statevector engine.
    Circuit,
    CrankNicolson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub m_herm: usize,
    pub m_emb: usize,
    pub error_bound: f64,
    pub entangling_inclusive: usize,
    pub entangling_exclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub contract: ContractParams,
    pub n_points: usize,
    pub x_max: f64,
    pub method: PricingMethod,
    pub plan: Option<PlanSummary>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub success_probability: Option<f64>,
}

/// Option values on the physical half of the lattice, `S_i ∈ [1/S_max, S_max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceCurve {
    pub stock_prices: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: CurveMetadata,
}

impl PriceCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Columns `S, C_quantum, C_analytic, abs_err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("S,C_quantum,C_analytic,abs_err\n");
        for (s, c) in self.stock_prices.iter().zip(&self.values) {
            let exact = analytic_price(*s, &self.metadata.contract);
            writeln!(out, "{s},{c},{exact},{}", (c - exact).abs()).expect("writing to a String");
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row {
            s: f64,
            c_quantum: f64,
            c_analytic: f64,
            abs_err: f64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            metadata: &'a CurveMetadata,
            l1_relative_error: Option<f64>,
            points: Vec<Row>,
        }
        let points = self
            .stock_prices
            .iter()
            .zip(&self.values)
            .map(|(&s, &c)| {
                let exact = analytic_price(s, &self.metadata.contract);
                Row {
                    s,
                    c_quantum: c,
                    c_analytic: exact,
                    abs_err: (c - exact).abs(),
                }
            })
            .collect();
        let doc = Doc {
            metadata: &self.metadata,
            l1_relative_error: l1_relative_error(self, &self.metadata.contract).ok(),
            points,
        };
        serde_json::to_string_pretty(&doc).expect("curve serialisation cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostSelectionResult {
    pub success_probability: f64,
    /// `p(x_i | 0_E)` over the whole register.
    pub conditional_probabilities: Vec<f64>,
    /// `None` for exact amplitudes.
    pub shots_used: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    Exact,
    Shots { count: u64, seed: u64 },
}

fn curve_from_joint(
    grid: &GridSpec,
    joint: &[f64],
    lambda: f64,
    metadata: CurveMetadata,
) -> PriceCurve {
    let half = grid.physical_len();
    PriceCurve {
        stock_prices: grid.physical_prices(),
        values: joint[..half].iter().map(|p| (p * lambda).sqrt()).collect(),
        metadata,
    }
}

fn metadata(grid: &GridSpec, contract: &ContractParams, method: PricingMethod) -> CurveMetadata {
    CurveMetadata {
        contract: *contract,
        n_points: grid.len(),
        x_max: grid.x_max(),
        method,
        plan: None,
        shots: None,
        seed: None,
        success_probability: None,
    }
}

/// Applies `Ô·e^{−iTH}` in the momentum basis and reads the price off the result.
pub fn price_exact(grid: &GridSpec, contract: &ContractParams) -> Result<PriceCurve> {
    let state = prepare_initial_state(grid, contract)?;
    let (top, _) = momentum_blocks(grid, contract, None)?;
    let evolved = apply_momentum_diagonal(&state.amplitudes, &top);
    let joint: Vec<f64> = evolved.iter().map(|a| a.norm_sqr()).collect();
    let ps = joint.iter().sum();
    let mut meta = metadata(grid, contract, PricingMethod::Exact);
    meta.success_probability = Some(ps);
    Ok(curve_from_joint(grid, &joint, state.lambda, meta))
}

/// `Ps = Σ_k |φ̂_k|²·e^{−2T(σ²/2·p_k² + r)}`.
pub fn success_probability(grid: &GridSpec, contract: &ContractParams) -> Result<f64> {
    let state = prepare_initial_state(grid, contract)?;
    Ok(success_probability_of(&state, grid, contract))
}

/// Default `(T, r)` axes for success-probability maps: `T` from 0.05 to 1 in
/// steps of 0.05 and `r` from 0 to 0.3 in steps of 0.02.
pub fn default_success_mesh() -> (Vec<f64>, Vec<f64>) {
    let maturities = (1..=20).map(|i| i as f64 * 0.05).collect();
    let rates = (0..=15).map(|i| i as f64 * 0.02).collect();
    (maturities, rates)
}

fn success_probability_of(
    state: &PreparedState,
    grid: &GridSpec,
    contract: &ContractParams,
) -> f64 {
    let mut hat = state.amplitudes.clone();
    qft(&mut hat);
    let p = crate::grid::momentum_eigenvalues(grid);
    hat.iter()
        .zip(p.values())
        .map(|(a, &pk)| a.norm_sqr() * decay_factor(contract, pk).powi(2))
        .sum()
}

/// Draws `shots` outcomes of measuring `q_E` and the register. Returns the
/// register counts of the `q_E = 0` outcomes.
fn sample_post_selected(joint: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining_shots = shots;
    let mut remaining_mass = 1.0f64;
    let mut counts = vec![0u64; joint.len()];
    for (count, &p) in counts.iter_mut().zip(joint) {
        if remaining_shots == 0 || remaining_mass <= 0.0 {
            break;
        }
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining_shots, q)
            .expect("probability clamped to [0, 1]")
            .sample(&mut rng);
        *count = draw;
        remaining_shots -= draw;
        remaining_mass -= p;
    }
    counts
}

/// Compiles the plan, runs it on `|φ₀⟩|0_E⟩|0_G⟩` and post-selects `q_E = 0`.
pub fn price_circuit(
    grid: &GridSpec,
    contract: &ContractParams,
    plan: &TruncationPlan,
    readout: Readout,
) -> Result<(PriceCurve, PostSelectionResult)> {
    let state = prepare_initial_state(grid, contract)?;
    let circuit = optimize_cnot_cancellation(&compile(plan, grid, contract)?);
    let layout = QubitLayout::new(grid.n_qubits() as usize);
    let input = StateVector::from_register(&state.amplitudes, &layout)?;
    let output = simulate(&circuit, &input)?;
    let kept: Vec<Complex64> = output.register_slice(&layout, false, false);
    let joint: Vec<f64> = kept.iter().map(|a| a.norm_sqr()).collect();
    let ps: f64 = joint.iter().sum();

    let tally = entangling_tally(&circuit);
    let mut meta = metadata(grid, contract, PricingMethod::Circuit);
    meta.plan = Some(PlanSummary {
        m_herm: plan.m_herm,
        m_emb: plan.m_emb,
        error_bound: plan.error_bound,
        entangling_inclusive: tally.inclusive,
        entangling_exclusive: tally.exclusive,
    });

    match readout {
        Readout::Exact => {
            meta.success_probability = Some(ps);
            let post = PostSelectionResult {
                success_probability: ps,
                conditional_probabilities: joint.iter().map(|p| p / ps).collect(),
                shots_used: None,
            };
            Ok((curve_from_joint(grid, &joint, state.lambda, meta), post))
        }
        Readout::Shots { count, seed } => {
            let counts = sample_post_selected(&joint, count, seed);
            let kept_shots: u64 = counts.iter().sum();
            if kept_shots == 0 {
                return Err(Error::NoPostSelectedShots { shots: count });
            }
            let ps_est = kept_shots as f64 / count as f64;
            let conditional: Vec<f64> = counts
                .iter()
                .map(|&c| c as f64 / kept_shots as f64)
                .collect();
            let joint_est: Vec<f64> = conditional.iter().map(|p| p * ps_est).collect();
            meta.shots = Some(count);
            meta.seed = Some(seed);
            meta.success_probability = Some(ps_est);
            let post = PostSelectionResult {
                success_probability: ps_est,
                conditional_probabilities: conditional,
                shots_used: Some(count),
            };
            Ok((curve_from_joint(grid, &joint_est, state.lambda, meta), post))
        }
    }
}

/// Estimate of the price at a single lattice point from repeated two-outcome
/// measurements: `q_E`, then the projector onto `|x_i⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotEstimate {
    pub index: usize,
    pub spot: f64,
    pub post_selected_shots: u64,
    pub hits: u64,
    pub conditional_probability: f64,
    pub price: f64,
}

/// Runs the exact propagator and samples only the `{|x_i⟩⟨x_i|, 1 − |x_i⟩⟨x_i|}`
/// outcome on the post-selected branch.
pub fn estimate_spot(
    grid: &GridSpec,
    contract: &ContractParams,
    index: usize,
    shots: u64,
    seed: u64,
) -> Result<SpotEstimate> {
    let half = grid.physical_len();
    if index >= half {
        return Err(Error::IndexOutOfRange {
            index,
            min: 0,
            max: half - 1,
        });
    }
    let state = prepare_initial_state(grid, contract)?;
    let (top, _) = momentum_blocks(grid, contract, None)?;
    let evolved = apply_momentum_diagonal(&state.amplitudes, &top);
    let ps: f64 = evolved.iter().map(|a| a.norm_sqr()).sum();
    let target = evolved[index].norm_sqr();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kept = Binomial::new(shots, ps.clamp(0.0, 1.0))
        .expect("valid probability")
        .sample(&mut rng);
    if kept == 0 {
        return Err(Error::NoPostSelectedShots { shots });
    }
    let hits = Binomial::new(kept, (target / ps).clamp(0.0, 1.0))
        .expect("valid probability")
        .sample(&mut rng);
    let conditional = hits as f64 / kept as f64;
    let ps_est = kept as f64 / shots as f64;
    Ok(SpotEstimate {
        index,
        spot: grid.physical_log_price(index).exp(),
        post_selected_shots: kept,
        hits,
        conditional_probability: conditional,
        price: (conditional * ps_est * state.lambda).sqrt(),
    })
}
