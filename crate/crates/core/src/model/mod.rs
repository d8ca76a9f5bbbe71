//! Deterministic mathematics of the sequential herding model.
//!
//! Two Gaussian worlds generate private signals: `N(mu_a, sigma²)` when option
//! A is superior and `N(mu_b, sigma²)` when B is. Each decision-maker compares
//! its private signal with a threshold set by the public belief ratio β, then
//! the belief absorbs the likelihood ratio of the decision everyone observed
//! and, when trusted, of the principal's signal. β is carried as `ln β`
//! throughout so long runs of identical decisions cannot overflow it.

pub mod normal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use normal::{log_normal_cdf, normal_cdf, normal_pdf};

const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// Parameters of the Gaussian signal model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu_a: f64,
    pub mu_b: f64,
    /// Standard deviation of private (objective) signals.
    pub sigma: f64,
    /// Standard deviation of principal signals.
    pub sigma_p: f64,
    pub prior_a: f64,
    pub prior_b: f64,
    /// Relative benefit ratio scaling the initial odds.
    pub k: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            mu_a: 1.0,
            mu_b: 0.0,
            sigma: 1.0,
            sigma_p: 1.0,
            prior_a: 0.5,
            prior_b: 0.5,
            k: 1.0,
        }
    }
}

impl ModelParams {
    /// Builds and validates a parameter set; `prior_b` is taken as `1 - prior_a`.
    pub fn new(
        mu_a: f64,
        mu_b: f64,
        sigma: f64,
        sigma_p: f64,
        prior_a: f64,
        k: f64,
    ) -> Result<Self> {
        let params = ModelParams {
            mu_a,
            mu_b,
            sigma,
            sigma_p,
            prior_a,
            prior_b: 1.0 - prior_a,
            k,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("mu-a", self.mu_a),
            ("mu-b", self.mu_b),
            ("sigma", self.sigma),
            ("sigma-p", self.sigma_p),
            ("prior-a", self.prior_a),
            ("prior-b", self.prior_b),
            ("k", self.k),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(Error::invalid(field, format!("{value} is not finite")));
            }
        }
        if self.mu_a <= self.mu_b {
            return Err(Error::invalid(
                "mu-a",
                format!("mu-a ({}) must exceed mu-b ({})", self.mu_a, self.mu_b),
            ));
        }
        for (field, value) in [
            ("sigma", self.sigma),
            ("sigma-p", self.sigma_p),
            ("k", self.k),
        ] {
            if value <= 0.0 {
                return Err(Error::invalid(field, format!("{value} must be positive")));
            }
        }
        for (field, value) in [("prior-a", self.prior_a), ("prior-b", self.prior_b)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::invalid(field, format!("{value} is outside (0, 1)")));
            }
        }
        if (self.prior_a + self.prior_b - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::invalid(
                "prior-b",
                format!("priors sum to {}, not 1", self.prior_a + self.prior_b),
            ));
        }
        Ok(())
    }
}

/// Which world generates the signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    MuA,
    MuB,
}

impl Hypothesis {
    pub fn mean(self, params: &ModelParams) -> f64 {
        match self {
            Hypothesis::MuA => params.mu_a,
            Hypothesis::MuB => params.mu_b,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Hypothesis::MuA => Hypothesis::MuB,
            Hypothesis::MuB => Hypothesis::MuA,
        }
    }

    /// The decision that is correct in this world.
    pub fn correct_decision(self) -> Decision {
        match self {
            Hypothesis::MuA => Decision::A,
            Hypothesis::MuB => Decision::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    A,
    B,
}

/// Natural log of the threshold parameter β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub log_beta: f64,
}

impl BeliefState {
    pub fn from_log(log_beta: f64) -> Result<Self> {
        if log_beta.is_finite() {
            Ok(BeliefState { log_beta })
        } else {
            Err(Error::NonFinite {
                value: log_beta,
                context: "belief construction",
            })
        }
    }

    pub fn beta(self) -> f64 {
        self.log_beta.exp()
    }

    /// Ratio of the posterior probabilities of μ_B and μ_A implied by this belief.
    pub fn posterior_odds_b_over_a(self, params: &ModelParams) -> f64 {
        (self.log_beta - params.k.ln()).exp()
    }

    fn shifted(self, delta: f64, context: &'static str) -> Result<Self> {
        let log_beta = self.log_beta + delta;
        if log_beta.is_finite() {
            Ok(BeliefState { log_beta })
        } else {
            Err(Error::NonFinite {
                value: log_beta,
                context,
            })
        }
    }
}

/// `d = (mu_a - mu_b) / sigma`.
pub fn signal_separation(params: &ModelParams) -> f64 {
    (params.mu_a - params.mu_b) / params.sigma
}

/// Relative benefit ratio from the four payoffs `Benefit(choice | world)`.
///
/// Both the gain of choosing A in world A and the gain of choosing B in world B
/// must be strictly positive.
pub fn relative_benefit_k(
    benefit_a_given_a: f64,
    benefit_b_given_a: f64,
    benefit_a_given_b: f64,
    benefit_b_given_b: f64,
) -> Result<f64> {
    let gain_in_a = benefit_a_given_a - benefit_b_given_a;
    let gain_in_b = benefit_b_given_b - benefit_a_given_b;
    if gain_in_a.is_nan() || gain_in_a <= 0.0 {
        return Err(Error::invalid(
            "benefit",
            format!("choosing A in world A must pay more than B (difference {gain_in_a})"),
        ));
    }
    if gain_in_b.is_nan() || gain_in_b <= 0.0 {
        return Err(Error::invalid(
            "benefit",
            format!("choosing B in world B must pay more than A (difference {gain_in_b})"),
        ));
    }
    Ok(gain_in_b / gain_in_a)
}

/// Starting belief `β = (prior_b / prior_a) · k`.
pub fn optimal_initial_beta(params: &ModelParams) -> BeliefState {
    BeliefState {
        log_beta: params.prior_b.ln() - params.prior_a.ln() + params.k.ln(),
    }
}

/// Private-signal threshold `r(β) = σ²/(μ_A−μ_B)·ln β + (μ_A+μ_B)/2`.
pub fn threshold(params: &ModelParams, belief: BeliefState) -> f64 {
    params.sigma * params.sigma / (params.mu_a - params.mu_b) * belief.log_beta
        + 0.5 * (params.mu_a + params.mu_b)
}

/// Choose A when the private signal reaches the threshold (ties go to A).
pub fn decide(s_o: f64, r: f64) -> Decision {
    if s_o >= r {
        Decision::A
    } else {
        Decision::B
    }
}

/// `ln P(choice | world, r)` for a decision-maker who used threshold `r`.
pub fn log_choice_prob(params: &ModelParams, r: f64, hyp: Hypothesis, choice: Decision) -> f64 {
    log_normal_cdf(choice_z(params, r, hyp, choice))
}

/// `P(choice | world, r)`: `Φ((μ−r)/σ)` for A, `Φ((r−μ)/σ)` for B.
pub fn choice_prob(params: &ModelParams, r: f64, hyp: Hypothesis, choice: Decision) -> f64 {
    normal_cdf(choice_z(params, r, hyp, choice))
}

fn choice_z(params: &ModelParams, r: f64, hyp: Hypothesis, choice: Decision) -> f64 {
    let z = (hyp.mean(params) - r) / params.sigma;
    match choice {
        Decision::A => z,
        Decision::B => -z,
    }
}

/// `ln p(observed | μ_B, r) − ln p(observed | μ_A, r)`.
pub fn decision_log_likelihood_ratio(params: &ModelParams, r: f64, observed: Decision) -> f64 {
    log_choice_prob(params, r, Hypothesis::MuB, observed)
        - log_choice_prob(params, r, Hypothesis::MuA, observed)
}

/// `ln p(s_p | μ_B) − ln p(s_p | μ_A)` for principal signals with spread `sigma_p`.
pub fn principal_log_likelihood_ratio(params: &ModelParams, s_p: f64) -> f64 {
    (params.mu_b - params.mu_a) * (2.0 * s_p - params.mu_a - params.mu_b)
        / (2.0 * params.sigma_p * params.sigma_p)
}

/// Folds a trusted principal signal's log ratio into the belief.
pub fn apply_principal(belief: BeliefState, log_ratio: f64) -> Result<BeliefState> {
    belief.shifted(log_ratio, "principal update")
}

/// Folds an observed decision, made at threshold `r_used`, into the belief.
pub fn apply_observation(
    params: &ModelParams,
    belief: BeliefState,
    r_used: f64,
    observed: Decision,
) -> Result<BeliefState> {
    belief.shifted(
        decision_log_likelihood_ratio(params, r_used, observed),
        "observation update",
    )
}
