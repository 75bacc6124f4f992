//! Subcommand bodies. Each returns the full output text; nothing is written
//! until the whole run has succeeded.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use qbs_core::circuit::{compile, entangling_tally, optimize_cnot_cancellation, EntanglingTally};
use qbs_core::cn::{convergence_sweep, StepsRule};
use qbs_core::hamiltonian::{
    build_truncation_plan, embedded_eigenvalues, hermitian_eigenvalues, truncation_index,
    walsh_coefficients, CartanExpansion,
};
use qbs_core::pricer::{
    analytic_price, constrained_grid, gamma, gamma_limit, gamma_limit_closed_form,
    gamma_lower_bound, l1_relative_error, price_circuit, price_exact, success_probability,
    PriceCurve, Readout,
};
use qbs_core::GridSpec;

use crate::config::{ExperimentConfig, Format};

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialising plain data");
    s.push('\n');
    s
}

fn l1_between(a: &PriceCurve, b: &PriceCurve) -> f64 {
    let num: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .sum();
    let den: f64 = b.values.iter().map(|v| v.abs()).sum();
    num / den
}

pub fn price(cfg: &ExperimentConfig, exact: bool) -> Result<String> {
    let grid = cfg.grid()?;
    let curve = if exact {
        if cfg.shots > 0 {
            bail!("--exact evolves amplitudes directly and cannot take --shots");
        }
        price_exact(&grid, &cfg.contract)?
    } else {
        let plan = build_truncation_plan(&grid, &cfg.contract, cfg.m_herm, cfg.m_emb)?;
        let readout = match cfg.shots {
            0 => Readout::Exact,
            count => Readout::Shots {
                count,
                seed: cfg.seed,
            },
        };
        price_circuit(&grid, &cfg.contract, &plan, readout)?.0
    };
    Ok(match cfg.format {
        Format::Csv => curve.to_csv(),
        Format::Json => curve.to_json() + "\n",
    })
}

#[derive(Serialize)]
struct ConvergeRow {
    n_q: u32,
    l1_relative_error: f64,
    curve: Vec<[f64; 4]>,
}

pub fn converge(cfg: &ExperimentConfig, n_q_list: &[u32], check: bool) -> Result<String> {
    let rows: Vec<ConvergeRow> = n_q_list
        .par_iter()
        .map(|&n_q| -> Result<ConvergeRow> {
            let grid = GridSpec::from_s_max(n_q, cfg.s_max)?;
            let curve = price_exact(&grid, &cfg.contract)?;
            let points = curve
                .stock_prices
                .iter()
                .zip(&curve.values)
                .map(|(&s, &c)| {
                    let exact = analytic_price(s, &cfg.contract);
                    [s, c, exact, (c - exact).abs()]
                })
                .collect();
            Ok(ConvergeRow {
                n_q,
                l1_relative_error: l1_relative_error(&curve, &cfg.contract)?,
                curve: points,
            })
        })
        .collect::<Result<_>>()?;
    if check
        && !rows
            .windows(2)
            .all(|w| w[1].l1_relative_error < w[0].l1_relative_error)
    {
        let errors: Vec<f64> = rows.iter().map(|r| r.l1_relative_error).collect();
        bail!("L1 error does not decrease strictly with n_q: {errors:?}");
    }
    Ok(match cfg.format {
        Format::Json => {
            to_json(&json!({ "contract": cfg.contract, "s_max": cfg.s_max, "rows": rows }))
        }
        Format::Csv => {
            let mut out = String::from("n_q,S,C_quantum,C_analytic,abs_err,l1_relative_error\n");
            for r in &rows {
                for [s, c, a, e] in &r.curve {
                    writeln!(out, "{},{s},{c},{a},{e},{}", r.n_q, r.l1_relative_error)?;
                }
            }
            out
        }
    })
}

#[derive(Serialize)]
struct CoefficientRow {
    kind: &'static str,
    rank: usize,
    word: u64,
    qubits: String,
    index: Option<usize>,
    coefficient: f64,
}

#[derive(Serialize)]
struct SurfaceCell {
    m_herm: usize,
    m_emb: usize,
    l1_vs_analytic: f64,
    l1_vs_lossless: f64,
    error_bound: f64,
}

fn sorted_coefficients(expansion: &CartanExpansion, kind: &'static str) -> Vec<CoefficientRow> {
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
        .into_iter()
        .enumerate()
        .map(|(rank, (word, coefficient))| CoefficientRow {
            kind,
            rank,
            word,
            qubits: (0..expansion.n_qubits)
                .filter(|j| word >> j & 1 == 1)
                .map(|j| j.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            index: (word & 1 == 1)
                .then(|| truncation_index(word, expansion.n_qubits).ok())
                .flatten(),
            coefficient,
        })
        .collect()
}

pub fn truncation_sweep(
    cfg: &ExperimentConfig,
    m_herm_list: &[usize],
    m_emb_list: &[usize],
) -> Result<String> {
    let grid = cfg.grid()?;
    let c = &cfg.contract;
    let mut coefficients = sorted_coefficients(
        &walsh_coefficients(&hermitian_eigenvalues(&grid, c)),
        "hermitian",
    );
    coefficients.extend(sorted_coefficients(
        &walsh_coefficients(&embedded_eigenvalues(&grid, c)?),
        "embedded",
    ));

    let n = grid.len();
    let lossless = build_truncation_plan(&grid, c, n, n)?;
    let (reference, _) = price_circuit(&grid, c, &lossless, Readout::Exact)?;
    let cells: Vec<(usize, usize)> = m_herm_list
        .iter()
        .flat_map(|&h| m_emb_list.iter().map(move |&e| (h, e)))
        .collect();
    let surface: Vec<SurfaceCell> = cells
        .par_iter()
        .map(|&(m_herm, m_emb)| -> Result<SurfaceCell> {
            let plan = build_truncation_plan(&grid, c, m_herm, m_emb)?;
            let (curve, _) = price_circuit(&grid, c, &plan, Readout::Exact)?;
            Ok(SurfaceCell {
                m_herm,
                m_emb,
                l1_vs_analytic: l1_relative_error(&curve, c)?,
                l1_vs_lossless: l1_between(&curve, &reference),
                error_bound: plan.error_bound,
            })
        })
        .collect::<Result<_>>()?;

    Ok(match cfg.format {
        Format::Json => to_json(&json!({ "coefficients": coefficients, "surface": surface })),
        Format::Csv => {
            let mut out = String::from("kind,rank,word,qubits,index,coefficient\n");
            for r in &coefficients {
                let index = r.index.map(|i| i.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{index},{}",
                    r.kind, r.rank, r.word, r.qubits, r.coefficient
                )?;
            }
            out.push_str("\nm_herm,m_emb,l1_vs_analytic,l1_vs_lossless,error_bound\n");
            for s in &surface {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    s.m_herm, s.m_emb, s.l1_vs_analytic, s.l1_vs_lossless, s.error_bound
                )?;
            }
            out
        }
    })
}

#[derive(Serialize)]
struct SuccessCell {
    maturity: f64,
    rate: f64,
    success_probability: f64,
    /// On the grid with `S_max = 3K`.
    constrained_success_probability: f64,
    lower_bound: f64,
}

#[derive(Serialize)]
struct GammaRow {
    n_points: usize,
    strike: f64,
    gamma: f64,
    limit: f64,
    limit_closed_form: f64,
}

pub struct SuccessMapArgs<'a> {
    pub maturities: &'a [f64],
    pub rates: &'a [f64],
    pub gamma_qubits: &'a [u32],
    pub gamma_strikes: &'a [f64],
    pub check: bool,
}

pub fn success_map(cfg: &ExperimentConfig, args: &SuccessMapArgs) -> Result<String> {
    let grid = cfg.grid()?;
    let n = grid.len();
    let strike = cfg.contract.strike;
    let constrained = constrained_grid(n, strike)?;
    let mesh: Vec<(f64, f64)> = args
        .maturities
        .iter()
        .flat_map(|&t| args.rates.iter().map(move |&r| (t, r)))
        .collect();
    let cells: Vec<SuccessCell> = mesh
        .par_iter()
        .map(|&(t, r)| -> Result<SuccessCell> {
            let contract = cfg.contract.with_maturity(t).with_rate(r);
            contract.validate()?;
            Ok(SuccessCell {
                maturity: t,
                rate: r,
                success_probability: success_probability(&grid, &contract)?,
                constrained_success_probability: success_probability(&constrained, &contract)?,
                lower_bound: gamma_lower_bound(n, strike, r, t)?,
            })
        })
        .collect::<Result<_>>()?;
    let gamma_cases: Vec<(u32, f64)> = args
        .gamma_qubits
        .iter()
        .flat_map(|&q| args.gamma_strikes.iter().map(move |&k| (q, k)))
        .collect();
    let gammas: Vec<GammaRow> = gamma_cases
        .par_iter()
        .map(|&(q, k)| -> Result<GammaRow> {
            let n_points = 1usize << q;
            Ok(GammaRow {
                n_points,
                strike: k,
                gamma: gamma(n_points, k)?,
                limit: gamma_limit(k),
                limit_closed_form: gamma_limit_closed_form(k),
            })
        })
        .collect::<Result<_>>()?;

    if args.check {
        let worst = cells
            .iter()
            .min_by(|a, b| a.success_probability.total_cmp(&b.success_probability));
        if let Some(w) = worst.filter(|w| w.success_probability <= 0.6) {
            bail!(
                "success probability {:.4} at T={}, r={} is not above 0.6",
                w.success_probability,
                w.maturity,
                w.rate
            );
        }
        if let Some(b) = cells
            .iter()
            .find(|c| c.constrained_success_probability < c.lower_bound)
        {
            bail!(
                "success probability below e^(-2Tr)·γ at T={}, r={}",
                b.maturity,
                b.rate
            );
        }
    }

    Ok(match cfg.format {
        Format::Json => to_json(&json!({ "success": cells, "gamma": gammas })),
        Format::Csv => {
            let mut out = String::from(
                "T,r,success_probability,constrained_success_probability,lower_bound\n",
            );
            for c in &cells {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    c.maturity,
                    c.rate,
                    c.success_probability,
                    c.constrained_success_probability,
                    c.lower_bound
                )?;
            }
            out.push_str("\nn_points,strike,gamma,limit,limit_closed_form\n");
            for g in &gammas {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    g.n_points, g.strike, g.gamma, g.limit, g.limit_closed_form
                )?;
            }
            out
        }
    })
}

pub fn compare_cn(cfg: &ExperimentConfig, points: &[usize], rule: StepsRule) -> Result<String> {
    let table = convergence_sweep(&cfg.contract, cfg.s_max, points, rule)?;
    Ok(match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table),
    })
}

/// Entangling-gate target for the reference configuration.
const GATE_TARGET: usize = 94;

fn tally_json(t: &EntanglingTally) -> serde_json::Value {
    json!({
        "cnot": t.cnot,
        "cphase": t.cphase,
        "swap": t.swap,
        "inclusive": t.inclusive,
        "exclusive": t.exclusive,
    })
}

pub fn gate_count(cfg: &ExperimentConfig) -> Result<String> {
    let grid = cfg.grid()?;
    let plan = build_truncation_plan(&grid, &cfg.contract, cfg.m_herm, cfg.m_emb)?;
    let raw = compile(&plan, &grid, &cfg.contract)?;
    let optimized = optimize_cnot_cancellation(&raw);
    let (before, after) = (entangling_tally(&raw), entangling_tally(&optimized));
    let meets = after.exclusive <= GATE_TARGET
        || (after.exclusive..=after.inclusive).contains(&GATE_TARGET);
    Ok(match cfg.format {
        Format::Json => to_json(&json!({
            "width": optimized.width(),
            "register_qubits": cfg.n_q,
            "m_herm": cfg.m_herm,
            "m_emb": cfg.m_emb,
            "gates": optimized.len(),
            "unoptimized": tally_json(&before),
            "optimized": tally_json(&after),
            "target": GATE_TARGET,
            "meets_target": meets,
        })),
        Format::Csv => {
            let mut out = String::from("metric,value\n");
            let rows: [(&str, String); 16] = [
                ("width", optimized.width().to_string()),
                ("register_qubits", cfg.n_q.to_string()),
                ("m_herm", cfg.m_herm.to_string()),
                ("m_emb", cfg.m_emb.to_string()),
                ("gates", optimized.len().to_string()),
                ("unoptimized_cnot", before.cnot.to_string()),
                ("unoptimized_inclusive", before.inclusive.to_string()),
                ("unoptimized_exclusive", before.exclusive.to_string()),
                ("cnot", after.cnot.to_string()),
                ("cphase", after.cphase.to_string()),
                ("swap", after.swap.to_string()),
                ("inclusive", after.inclusive.to_string()),
                ("exclusive", after.exclusive.to_string()),
                ("target", GATE_TARGET.to_string()),
                ("meets_target", meets.to_string()),
                ("unoptimized_gates", raw.len().to_string()),
            ];
            for (k, v) in rows {
                writeln!(out, "{k},{v}")?;
            }
            out
        }
    })
}
