//! Seeded random draws for signals, principal behaviour and trust events.
//!
//! Every chain owns one [`RngStream`]: a ChaCha8 generator keyed by the
//! master seed (expanded through `rand_core`'s PCG32-based `seed_from_u64`) and
//! positioned on ChaCha stream number `run_index`. Distinct run indices select
//! disjoint keystreams, so chains are independent and can be replayed or run
//! in any order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Hypothesis, ModelParams};

/// Identifies the generator recorded in run manifests. Bump on any change
/// that alters draw sequences.
pub const RNG_ALGORITHM: &str =
    "chacha8(seed_from_u64(master_seed), stream=run_index); normals=ziggurat; rand_chacha-0.9/rand_distr-0.5; v1";

#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

pub fn derive_stream(master_seed: u64, run_index: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run_index);
    RngStream { rng }
}

/// Whether the principal's underlying choice is redrawn per decision-maker or
/// fixed for a whole chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BiasMode {
    #[default]
    PerDecisionMaker,
    PerChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalConfig {
    pub enabled: bool,
    /// Probability that the principal's signal comes from the correct world.
    pub p_bias: f64,
    /// Probability that a decision-maker folds the principal's signal in.
    pub p_trust: f64,
    pub bias_mode: BiasMode,
}

impl Default for PrincipalConfig {
    fn default() -> Self {
        PrincipalConfig {
            enabled: false,
            p_bias: 0.5,
            p_trust: 1.0,
            bias_mode: BiasMode::PerDecisionMaker,
        }
    }
}

impl PrincipalConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("p-bias", self.p_bias)?;
        check_probability("p-trust", self.p_trust)
    }
}

pub(crate) fn check_probability(field: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{p} is outside [0, 1]")))
    }
}

/// The world generating objective signals; fixed for a whole chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrueState(pub Hypothesis);

impl Default for TrueState {
    fn default() -> Self {
        TrueState(Hypothesis::MuA)
    }
}

pub fn draw_objective_signal(rng: &mut RngStream, params: &ModelParams, state: TrueState) -> f64 {
    state.0.mean(params) + params.sigma * rng.standard_normal()
}

/// `MuA` with probability `p_bias`, otherwise `MuB`.
pub fn draw_principal_choice(rng: &mut RngStream, p_bias: f64) -> Hypothesis {
    if rng.uniform() < p_bias {
        Hypothesis::MuA
    } else {
        Hypothesis::MuB
    }
}

pub fn draw_principal_signal(rng: &mut RngStream, params: &ModelParams, choice: Hypothesis) -> f64 {
    choice.mean(params) + params.sigma_p * rng.standard_normal()
}

pub fn draw_trust(rng: &mut RngStream, p_trust: f64) -> bool {
    rng.uniform() < p_trust
}

/// Everything random that one decision-maker sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionDraws {
    pub trusted: bool,
    pub principal_choice: Hypothesis,
    pub s_p: f64,
    pub s_o: f64,
}

/// Draws trust, principal choice, principal signal and objective signal, in
/// that order, always consuming all four regardless of configuration.
///
/// `chain_choice` is the principal's choice drawn once per chain; it replaces
/// the per-decision draw under [`BiasMode::PerChain`]. Principal choices are
/// expressed relative to the true state: a "correct" draw picks the world that
/// actually generates the objective signals.
pub fn draw_decision(
    rng: &mut RngStream,
    params: &ModelParams,
    principal: &PrincipalConfig,
    state: TrueState,
    chain_choice: Hypothesis,
) -> DecisionDraws {
    let trusted = draw_trust(rng, principal.p_trust);
    let own_choice = orient(draw_principal_choice(rng, principal.p_bias), state);
    let principal_choice = match principal.bias_mode {
        BiasMode::PerDecisionMaker => own_choice,
        BiasMode::PerChain => chain_choice,
    };
    let s_p = draw_principal_signal(rng, params, principal_choice);
    let s_o = draw_objective_signal(rng, params, state);
    DecisionDraws {
        trusted: principal.enabled && trusted,
        principal_choice,
        s_p,
        s_o,
    }
}

/// Draws the chain-level principal choice. Called once at the start of every
/// chain, whatever the bias mode, so that all modes consume the same stream.
pub fn draw_chain_choice(
    rng: &mut RngStream,
    principal: &PrincipalConfig,
    state: TrueState,
) -> Hypothesis {
    orient(draw_principal_choice(rng, principal.p_bias), state)
}

// Maps "MuA = correct" onto the actual true state.
fn orient(drawn: Hypothesis, state: TrueState) -> Hypothesis {
    match drawn {
        Hypothesis::MuA => state.0,
        Hypothesis::MuB => state.0.other(),
    }
}
