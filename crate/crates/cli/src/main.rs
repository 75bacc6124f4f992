mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qbs_core::cn::{StepsRule, DEFAULT_FIXED_STEPS};
use qbs_core::pricer::default_success_mesh;

use commands::SuccessMapArgs;
use config::{CommonArgs, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(
    name = "qbs",
    version,
    about = "Quantum Black-Scholes pricing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price curve from the compiled circuit, or the exact propagator with --exact.
    Price {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        exact: bool,
    },
    /// L1 error of the exact lattice pricer over register sizes.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [5u32, 6, 7, 8])]
        nq_list: Vec<u32>,
        /// Fail unless the error strictly decreases along the list.
        #[arg(long)]
        check: bool,
    },
    /// Sorted expansion coefficients and the error surface over plan sizes.
    TruncationSweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 4, 6, 8, 10, 12, 14, 16, 20, 24, 32])]
        mherm_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 4, 6, 8, 12, 16])]
        memb_list: Vec<usize>,
    },
    /// Post-selection probability over (T, r) and the γ lower-bound table.
    SuccessMap {
        #[command(flatten)]
        common: CommonArgs,
        /// Maturities; defaults to 0.05, 0.10, …, 1.
        #[arg(long, value_delimiter = ',')]
        maturities: Vec<f64>,
        /// Rates; defaults to 0, 0.02, …, 0.3.
        #[arg(long, value_delimiter = ',')]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [4u32, 6, 8, 10, 12, 14])]
        gamma_nq: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [10.0f64, 50.0, 100.0])]
        gamma_strikes: Vec<f64>,
        /// Fail unless every cell is above 0.6 and above its lower bound.
        #[arg(long)]
        check: bool,
    },
    /// Crank-Nicolson against the lattice pricer on matched grids.
    CompareCn {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [32usize, 64, 128, 256, 512, 1024])]
        points: Vec<usize>,
        /// Time steps, or the steps at the first point count with --quadratic.
        #[arg(long, default_value_t = DEFAULT_FIXED_STEPS)]
        steps: usize,
        /// Scale the time steps with the square of the point count.
        #[arg(long)]
        quadratic: bool,
    },
    /// Width and entangling-gate counts of the compiled circuit.
    GateCount {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn run(cli: Cli) -> Result<(String, ExperimentConfig)> {
    let reference = ExperimentConfig::reference;
    match cli.command {
        Command::Price { common, exact } => {
            let cfg = ExperimentConfig::resolve(&common, reference())?;
            Ok((commands::price(&cfg, exact)?, cfg))
        }
        Command::Converge {
            common,
            nq_list,
            check,
        } => {
            let cfg = ExperimentConfig::resolve(&common, reference())?;
            Ok((commands::converge(&cfg, &nq_list, check)?, cfg))
        }
        Command::TruncationSweep {
            common,
            mherm_list,
            memb_list,
        } => {
            let cfg = ExperimentConfig::resolve(&common, reference())?;
            Ok((
                commands::truncation_sweep(&cfg, &mherm_list, &memb_list)?,
                cfg,
            ))
        }
        Command::SuccessMap {
            common,
            maturities,
            rates,
            gamma_nq,
            gamma_strikes,
            check,
        } => {
            let defaults = ExperimentConfig {
                s_max: 150.0,
                ..reference()
            };
            let cfg = ExperimentConfig::resolve(&common, defaults)?;
            let (default_t, default_r) = default_success_mesh();
            let args = SuccessMapArgs {
                maturities: if maturities.is_empty() {
                    &default_t
                } else {
                    &maturities
                },
                rates: if rates.is_empty() { &default_r } else { &rates },
                gamma_qubits: &gamma_nq,
                gamma_strikes: &gamma_strikes,
                check,
            };
            Ok((commands::success_map(&cfg, &args)?, cfg))
        }
        Command::CompareCn {
            common,
            points,
            steps,
            quadratic,
        } => {
            let cfg = ExperimentConfig::resolve(&common, reference())?;
            let rule = if quadratic {
                StepsRule::Quadratic {
                    base_points: points.first().copied().unwrap_or(1),
                    base_steps: steps,
                }
            } else {
                StepsRule::Fixed(steps)
            };
            Ok((commands::compare_cn(&cfg, &points, rule)?, cfg))
        }
        Command::GateCount { common } => {
            let cfg = ExperimentConfig::resolve(&common, reference())?;
            Ok((commands::gate_count(&cfg)?, cfg))
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("QBS_THREADS") {
        let threads: usize = value
            .trim()
            .parse()
            .with_context(|| format!("QBS_THREADS={value:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| run(cli))
        .and_then(|(text, cfg)| match &cfg.out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .context("writing to stdout"),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
