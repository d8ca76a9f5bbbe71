//! Decision chains and Monte Carlo ensembles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    apply_observation, apply_principal, decide, optimal_initial_beta,
    principal_log_likelihood_ratio, threshold, BeliefState, Decision, Hypothesis, ModelParams,
};
use crate::sampling::{
    check_probability, derive_stream, draw_chain_choice, draw_decision, PrincipalConfig, RngStream,
    TrueState,
};

/// Runs handed to one parallel work item.
const RUNS_PER_BLOCK: u64 = 512;

/// Everything needed to simulate one chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub params: ModelParams,
    pub principal: PrincipalConfig,
    pub true_state: TrueState,
    pub horizon: usize,
}

/// What the default report and summaries focus on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Positional,
    Cumulative,
    Both,
}

/// A fully specified ensemble experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: ModelParams,
    pub principal: PrincipalConfig,
    pub true_state: TrueState,
    /// Decision-makers per chain.
    pub horizon: usize,
    /// Independent chains.
    pub runs: u64,
    pub master_seed: u64,
    pub metric: Metric,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            params: ModelParams::default(),
            principal: PrincipalConfig::default(),
            true_state: TrueState::default(),
            horizon: 100,
            runs: 10_000,
            master_seed: 0,
            metric: Metric::Positional,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.principal.validate()?;
        if self.horizon < 1 {
            return Err(Error::invalid("t", "must be at least 1"));
        }
        if self.runs < 1 {
            return Err(Error::invalid("runs", "must be at least 1"));
        }
        Ok(())
    }

    pub fn chain_spec(&self) -> ChainSpec {
        ChainSpec {
            params: self.params,
            principal: self.principal,
            true_state: self.true_state,
            horizon: self.horizon,
        }
    }
}

/// Full trace of one decision-maker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    /// 1-based position in the chain.
    pub t: usize,
    pub log_beta_before: f64,
    pub trusted: bool,
    pub principal_choice: Option<Hypothesis>,
    pub s_p: Option<f64>,
    /// Belief after the principal fold-in, if any.
    pub log_beta_at_decision: f64,
    pub threshold_r: f64,
    pub s_o: f64,
    pub decision: Decision,
    pub log_beta_after: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub params: ModelParams,
    pub principal: PrincipalConfig,
    pub true_state: TrueState,
    pub records: Vec<DecisionRecord>,
}

impl ChainResult {
    pub fn decisions(&self) -> impl Iterator<Item = Decision> + '_ {
        self.records.iter().map(|r| r.decision)
    }
}

/// Steps a single chain one decision-maker at a time.
pub struct ChainState<'a> {
    spec: &'a ChainSpec,
    belief: BeliefState,
    chain_choice: Hypothesis,
    t: usize,
}

impl<'a> ChainState<'a> {
    /// Starts a chain at the optimal initial belief. Draws the chain-level
    /// principal choice from `rng`.
    pub fn new(spec: &'a ChainSpec, rng: &mut RngStream) -> Self {
        ChainState {
            spec,
            belief: optimal_initial_beta(&spec.params),
            chain_choice: draw_chain_choice(rng, &spec.principal, spec.true_state),
            t: 0,
        }
    }

    pub fn belief(&self) -> BeliefState {
        self.belief
    }

    pub fn step(&mut self, rng: &mut RngStream) -> Result<DecisionRecord> {
        let params = &self.spec.params;
        let draws = draw_decision(
            rng,
            params,
            &self.spec.principal,
            self.spec.true_state,
            self.chain_choice,
        );
        let before = self.belief;
        let at_decision = if draws.trusted {
            apply_principal(before, principal_log_likelihood_ratio(params, draws.s_p))?
        } else {
            before
        };
        let r = threshold(params, at_decision);
        let decision = decide(draws.s_o, r);
        let after = apply_observation(params, at_decision, r, decision)?;
        self.belief = after;
        self.t += 1;
        Ok(DecisionRecord {
            t: self.t,
            log_beta_before: before.log_beta,
            trusted: draws.trusted,
            principal_choice: draws.trusted.then_some(draws.principal_choice),
            s_p: draws.trusted.then_some(draws.s_p),
            log_beta_at_decision: at_decision.log_beta,
            threshold_r: r,
            s_o: draws.s_o,
            decision,
            log_beta_after: after.log_beta,
            correct: decision == self.spec.true_state.0.correct_decision(),
        })
    }
}

pub fn simulate_chain(spec: &ChainSpec, rng: &mut RngStream) -> Result<ChainResult> {
    let mut chain = ChainState::new(spec, rng);
    let records = (0..spec.horizon)
        .map(|_| chain.step(rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainResult {
        params: spec.params,
        principal: spec.principal,
        true_state: spec.true_state,
        records,
    })
}

/// Per-position accuracy over an ensemble of chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub horizon: usize,
    pub runs: u64,
    /// Number of runs whose t-th decision was correct.
    pub correct_counts: Vec<u64>,
    pub positional_correct: Vec<f64>,
    pub cumulative_correct: Vec<f64>,
    pub positional_stderr: Vec<f64>,
}

impl EnsembleStats {
    /// Builds the statistics from per-position correct counts.
    ///
    /// The cumulative metric is the run-mean of the within-run share correct
    /// through t, which equals the summed counts through t over `t * runs`.
    pub fn from_counts(runs: u64, correct_counts: Vec<u64>) -> Self {
        let m = runs as f64;
        let positional_correct: Vec<f64> = correct_counts.iter().map(|&c| c as f64 / m).collect();
        let positional_stderr = positional_correct
            .iter()
            .map(|&p| (p * (1.0 - p) / m).sqrt())
            .collect();
        let mut running = 0u64;
        let cumulative_correct = correct_counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                running += c;
                running as f64 / ((i + 1) as f64 * m)
            })
            .collect();
        EnsembleStats {
            horizon: correct_counts.len(),
            runs,
            correct_counts,
            positional_correct,
            cumulative_correct,
            positional_stderr,
        }
    }

    /// Accuracy of the t-th decision-maker (1-based).
    pub fn at(&self, t: usize) -> f64 {
        self.positional_correct[t - 1]
    }

    pub fn stderr_at(&self, t: usize) -> f64 {
        self.positional_stderr[t - 1]
    }
}

fn run_block(spec: &ChainSpec, master_seed: u64, runs: std::ops::Range<u64>) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; spec.horizon];
    for run_index in runs {
        let mut rng = derive_stream(master_seed, run_index);
        let mut chain = ChainState::new(spec, &mut rng);
        for count in counts.iter_mut() {
            let record = chain.step(&mut rng).map_err(|e| Error::Run {
                run_index,
                source: Box::new(e),
            })?;
            *count += record.correct as u64;
        }
    }
    Ok(counts)
}

/// Runs `scenario.runs` chains on streams `0..runs` of the master seed.
///
/// Chains execute in parallel; counts are integers, so the result does not
/// depend on scheduling. If several runs fault, the lowest run index is
/// reported.
pub fn run_ensemble(scenario: &Scenario) -> Result<EnsembleStats> {
    scenario.validate()?;
    let spec = scenario.chain_spec();
    let blocks = scenario.runs.div_ceil(RUNS_PER_BLOCK);
    let partials: Vec<Result<Vec<u64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * RUNS_PER_BLOCK;
            let end = (start + RUNS_PER_BLOCK).min(scenario.runs);
            run_block(&spec, scenario.master_seed, start..end)
        })
        .collect();
    let mut totals = vec![0u64; scenario.horizon];
    for partial in partials {
        for (total, c) in totals.iter_mut().zip(partial?) {
            *total += c;
        }
    }
    Ok(EnsembleStats::from_counts(scenario.runs, totals))
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p_bias: f64,
    pub p_trust: f64,
    pub stats: EnsembleStats,
}

/// Evaluates the Cartesian grid `p_bias_values × p_trust_values` with the
/// principal enabled. Every cell reuses the base master seed, so cells share
/// common random numbers.
pub fn sweep(
    base: &Scenario,
    p_bias_values: &[f64],
    p_trust_values: &[f64],
) -> Result<Vec<SweepCell>> {
    for &p in p_bias_values {
        check_probability("p-bias", p)?;
    }
    for &p in p_trust_values {
        check_probability("p-trust", p)?;
    }
    let mut cells = Vec::with_capacity(p_bias_values.len() * p_trust_values.len());
    for &p_bias in p_bias_values {
        for &p_trust in p_trust_values {
            let scenario = Scenario {
                principal: PrincipalConfig {
                    enabled: true,
                    p_bias,
                    p_trust,
                    ..base.principal
                },
                ..*base
            };
            cells.push(SweepCell {
                p_bias,
                p_trust,
                stats: run_ensemble(&scenario)?,
            });
        }
    }
    Ok(cells)
}
