//! Experiment settings: command-line flags override the JSON config file,
//! which overrides the built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use qbs_core::payoff::compute_n_max;
use qbs_core::{ContractParams, GridSpec, OptionSide};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Put,
    Call,
}

impl From<Side> for OptionSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Put => OptionSide::Put,
            Side::Call => OptionSide::Call,
        }
    }
}

/// Flags shared by every subcommand. `None` means "not given".
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Register qubits.
    #[arg(long)]
    pub nq: Option<u32>,
    /// Upper end of the stock-price window.
    #[arg(long)]
    pub smax: Option<f64>,
    #[arg(long)]
    pub strike: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub maturity: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<Side>,
    /// Hermitian terms kept in the truncation plan.
    #[arg(long)]
    pub mherm: Option<usize>,
    /// Embedded terms kept in the truncation plan.
    #[arg(long)]
    pub memb: Option<usize>,
    /// Measurement shots; 0 reads the exact amplitudes.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of the settings above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_q: Option<u32>,
    pub s_max: Option<f64>,
    pub strike: Option<f64>,
    pub rate: Option<f64>,
    pub sigma: Option<f64>,
    pub maturity: Option<f64>,
    pub side: Option<Side>,
    pub m_herm: Option<usize>,
    pub m_emb: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_q: u32,
    pub s_max: f64,
    pub contract: ContractParams,
    pub m_herm: usize,
    pub m_emb: usize,
    pub shots: u64,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    /// Reference parameter set: K = 50, σ = 0.2, r = 0.3, T = 1, S_max = 135,
    /// eight register qubits and a 14 + 6 term plan.
    pub fn reference() -> Self {
        Self {
            n_q: 8,
            s_max: 135.0,
            contract: ContractParams::reference_put(),
            m_herm: 14,
            m_emb: 6,
            shots: 0,
            seed: 0,
            out: None,
            format: Format::Csv,
        }
    }

    pub fn resolve(args: &CommonArgs, defaults: Self) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let d = defaults;
        let c = d.contract;
        let side: OptionSide = args.side.or(file.side).map(Into::into).unwrap_or(c.side);
        let contract = ContractParams::new(
            side,
            args.strike.or(file.strike).unwrap_or(c.strike),
            args.rate.or(file.rate).unwrap_or(c.rate),
            args.sigma.or(file.sigma).unwrap_or(c.sigma),
            args.maturity.or(file.maturity).unwrap_or(c.maturity),
        )?;
        let config = Self {
            n_q: args.nq.or(file.n_q).unwrap_or(d.n_q),
            s_max: args.smax.or(file.s_max).unwrap_or(d.s_max),
            contract,
            m_herm: args.mherm.or(file.m_herm).unwrap_or(d.m_herm),
            m_emb: args.memb.or(file.m_emb).unwrap_or(d.m_emb),
            shots: args.shots.or(file.shots).unwrap_or(d.shots),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            out: args.out.clone().or(file.out).or(d.out),
            format: args.format.or(file.format).unwrap_or(d.format),
        };
        let grid = config.grid()?;
        compute_n_max(&grid, contract.strike)?;
        let n = grid.len();
        if config.m_herm > n || config.m_emb > n {
            bail!(
                "plan ({}, {}) asks for more than the {n} words of a {}-qubit register",
                config.m_herm,
                config.m_emb,
                config.n_q
            );
        }
        Ok(config)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::from_s_max(self.n_q, self.s_max)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"strike": 40.0, "rate": 0.1, "n_q": 6}"#).unwrap();
        let args = CommonArgs {
            rate: Some(0.2),
            config: Some(path),
            ..Default::default()
        };
        let c = ExperimentConfig::resolve(&args, ExperimentConfig::reference()).unwrap();
        assert_eq!(c.contract.rate, 0.2);
        assert_eq!(c.contract.strike, 40.0);
        assert_eq!(c.n_q, 6);
        assert_eq!(c.contract.sigma, 0.2);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"strik": 40.0}"#).unwrap();
        let args = CommonArgs {
            config: Some(path),
            ..Default::default()
        };
        assert!(ExperimentConfig::resolve(&args, ExperimentConfig::reference()).is_err());
    }

    #[test]
    fn preconditions_checked_up_front() {
        let bad = |args: CommonArgs| {
            ExperimentConfig::resolve(&args, ExperimentConfig::reference()).is_err()
        };
        assert!(bad(CommonArgs {
            sigma: Some(-1.0),
            ..Default::default()
        }));
        assert!(bad(CommonArgs {
            nq: Some(1),
            ..Default::default()
        }));
        assert!(bad(CommonArgs {
            mherm: Some(257),
            ..Default::default()
        }));
        assert!(bad(CommonArgs {
            strike: Some(500.0),
            ..Default::default()
        }));
        assert!(bad(CommonArgs {
            smax: Some(0.5),
            ..Default::default()
        }));
    }
}
