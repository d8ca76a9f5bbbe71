//! Command-line flags and `key=value` configuration files.
//!
//! A config file uses the flag names without the leading dashes, one
//! `key = value` per line, `#` starting a comment. File lines are fed through
//! the same parser as the flags; flags given on the command line win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::CliError;
use crate::chain::{Metric, Scenario};
use crate::model::{Hypothesis, ModelParams};
use crate::sampling::{BiasMode, PrincipalConfig, TrueState};

#[derive(Debug, Parser)]
#[command(
    name = "herdsim",
    version,
    about = "Sequential herding with principal signals and trust"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one Monte Carlo ensemble and write per-position accuracy
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a p-bias x p-trust grid with the principal enabled
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Comma-separated p-bias values
        #[arg(
            long = "p-bias-grid",
            value_delimiter = ',',
            default_value = "0.1,0.3,0.5,0.7,0.9"
        )]
        p_bias_grid: Vec<f64>,
        /// Comma-separated p-trust values
        #[arg(long = "p-trust-grid", value_delimiter = ',', default_value = "1.0")]
        p_trust_grid: Vec<f64>,
    },
    /// Run a named preset: a fixed set of curves written side by side
    Replicate {
        /// fig1, fig2, fig3, fig4 or long-horizon
        preset: String,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the model against its exact and analytic oracles
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BiasModeArg {
    PerDm,
    PerChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Positional,
    Cumulative,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Scenario flags; every field is optional so that file values and defaults
/// can fill the gaps.
#[derive(Debug, Clone, Default, PartialEq, Parser)]
pub struct ScenarioArgs {
    /// Signal mean under state A [default: 1]
    #[arg(long = "mu-a", allow_hyphen_values = true)]
    pub mu_a: Option<f64>,
    /// Signal mean under state B, below mu-a [default: 0]
    #[arg(long = "mu-b", allow_hyphen_values = true)]
    pub mu_b: Option<f64>,
    /// Objective signal noise [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Principal signal noise [default: 1]
    #[arg(long = "sigma-p", allow_hyphen_values = true)]
    pub sigma_p: Option<f64>,
    /// Relative benefit of a correct A over a correct B [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Prior probability of state A [default: 0.5]
    #[arg(long = "prior-a", allow_hyphen_values = true)]
    pub prior_a: Option<f64>,
    /// Probability the principal names the true state [default: 0.5]
    #[arg(long = "p-bias", allow_hyphen_values = true)]
    pub p_bias: Option<f64>,
    /// Probability a decision-maker listens to the principal [default: 1]
    #[arg(long = "p-trust", allow_hyphen_values = true)]
    pub p_trust: Option<f64>,
    /// Enable the principal [default: off]
    #[arg(long, value_enum)]
    pub principal: Option<OnOff>,
    /// Draw the principal's choice per decision-maker or once per chain [default: per-dm]
    #[arg(long = "bias-mode", value_enum)]
    pub bias_mode: Option<BiasModeArg>,
    /// Underlying state of the world [default: a]
    #[arg(long = "true-state", value_enum)]
    pub true_state: Option<StateArg>,
    /// Decision-makers per chain [default: 100]
    #[arg(long = "t")]
    pub horizon: Option<usize>,
    /// Monte Carlo runs [default: 10000]
    #[arg(long)]
    pub runs: Option<u64>,
    /// Master seed; run i uses stream i [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Accuracy reported in the printed summary [default: positional]
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// key=value file with defaults for any of these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Depth of the exact enumeration compared with Monte Carlo
    #[arg(long = "enum-t", default_value_t = 10)]
    pub enum_t: usize,
    /// Monte Carlo runs for the enumeration comparison
    #[arg(long, default_value_t = 200_000)]
    pub runs: u64,
    /// Master seed for the Monte Carlo comparison
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative perturbation applied to one choice probability (test hook)
    #[arg(long = "inject-cdf-fault", hide = true, default_value_t = 0.0)]
    pub inject_cdf_fault: f64,
}

impl ScenarioArgs {
    /// Fills unset fields from `fallback`.
    pub fn or(self, fallback: ScenarioArgs) -> ScenarioArgs {
        ScenarioArgs {
            mu_a: self.mu_a.or(fallback.mu_a),
            mu_b: self.mu_b.or(fallback.mu_b),
            sigma: self.sigma.or(fallback.sigma),
            sigma_p: self.sigma_p.or(fallback.sigma_p),
            k: self.k.or(fallback.k),
            prior_a: self.prior_a.or(fallback.prior_a),
            p_bias: self.p_bias.or(fallback.p_bias),
            p_trust: self.p_trust.or(fallback.p_trust),
            principal: self.principal.or(fallback.principal),
            bias_mode: self.bias_mode.or(fallback.bias_mode),
            true_state: self.true_state.or(fallback.true_state),
            horizon: self.horizon.or(fallback.horizon),
            runs: self.runs.or(fallback.runs),
            seed: self.seed.or(fallback.seed),
            metric: self.metric.or(fallback.metric),
            config: self.config.or(fallback.config),
        }
    }

    /// Loads `--config` if present, merges, applies defaults and validates.
    pub fn resolve(self) -> Result<Scenario, CliError> {
        let merged = match &self.config {
            Some(path) => {
                let file = parse_config_file(path)?;
                self.or(file)
            }
            None => self,
        };
        merged.into_scenario()
    }

    /// Applies defaults to unset fields and validates the result.
    pub fn into_scenario(self) -> Result<Scenario, CliError> {
        let defaults = Scenario::default();
        let dp = defaults.params;
        let prior_a = self.prior_a.unwrap_or(dp.prior_a);
        let params = ModelParams {
            mu_a: self.mu_a.unwrap_or(dp.mu_a),
            mu_b: self.mu_b.unwrap_or(dp.mu_b),
            sigma: self.sigma.unwrap_or(dp.sigma),
            sigma_p: self.sigma_p.unwrap_or(dp.sigma_p),
            prior_a,
            prior_b: 1.0 - prior_a,
            k: self.k.unwrap_or(dp.k),
        };
        let principal = PrincipalConfig {
            enabled: self.principal == Some(OnOff::On),
            p_bias: self.p_bias.unwrap_or(defaults.principal.p_bias),
            p_trust: self.p_trust.unwrap_or(defaults.principal.p_trust),
            bias_mode: match self.bias_mode {
                Some(BiasModeArg::PerChain) => BiasMode::PerChain,
                _ => BiasMode::PerDecisionMaker,
            },
        };
        let scenario = Scenario {
            params,
            principal,
            true_state: TrueState(match self.true_state {
                Some(StateArg::B) => Hypothesis::MuB,
                _ => Hypothesis::MuA,
            }),
            horizon: self.horizon.unwrap_or(defaults.horizon),
            runs: self.runs.unwrap_or(defaults.runs),
            master_seed: self.seed.unwrap_or(defaults.master_seed),
            metric: match self.metric {
                Some(MetricArg::Cumulative) => Metric::Cumulative,
                Some(MetricArg::Both) => Metric::Both,
                _ => Metric::Positional,
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Reads a `key=value` file into scenario arguments.
pub fn parse_config_file(path: &Path) -> Result<ScenarioArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<ScenarioArgs, CliError> {
    let mut tokens = vec!["config".to_string()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim();
        if key == "config" {
            return Err(CliError::Config(format!(
                "config line {}: nested config files are not supported",
                lineno + 1
            )));
        }
        tokens.push(format!("--{key}"));
        tokens.push(value.trim().to_string());
    }
    ScenarioArgs::try_parse_from(tokens)
        .map_err(|e| CliError::Config(format!("config file: {}", e.render())))
}
