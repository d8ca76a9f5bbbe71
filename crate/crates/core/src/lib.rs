//! Sequential herding with principal signals and probabilistic trust.
//!
//! Decision-makers choose between two options after seeing a private Gaussian
//! signal and the choices of everyone before them. A principal may add its own
//! signal, drawn from the correct world with probability `p_bias`, which each
//! decision-maker trusts with probability `p_trust`.
//!
//! - [`model`]: thresholds, likelihood ratios and log-space belief updates.
//! - [`sampling`]: reproducible per-run random streams and draws.
//! - [`chain`]: single chains, Monte Carlo ensembles and parameter sweeps.
//! - [`oracle`]: exact enumeration, identities and quadrature checks.
//! - [`cli`]: configuration, presets, output formats and subcommands.

pub mod chain;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod sampling;

pub use chain::{
    run_ensemble, simulate_chain, sweep, ChainResult, ChainSpec, DecisionRecord, EnsembleStats,
    Metric, Scenario, SweepCell,
};
pub use error::{Error, Result};
pub use model::{BeliefState, Decision, Hypothesis, ModelParams};
pub use sampling::{derive_stream, BiasMode, PrincipalConfig, RngStream, TrueState};
