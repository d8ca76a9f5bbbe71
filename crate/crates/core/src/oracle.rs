//! Independent ground truth for the model: exact enumeration of no-principal
//! chains, the likelihood-ratio martingale identity and quadrature of the
//! principal ratio's mean.

use serde::Serialize;

use crate::chain::{run_ensemble, Scenario};
use crate::error::{Error, Result};
use crate::model::{
    apply_observation, choice_prob, decision_log_likelihood_ratio, normal_pdf,
    optimal_initial_beta, principal_log_likelihood_ratio, threshold, BeliefState, Decision,
    Hypothesis, ModelParams,
};
use crate::sampling::{PrincipalConfig, TrueState};

/// Deepest decision tree the enumeration will expand (2^20 paths).
pub const MAX_ENUMERATION_DEPTH: usize = 20;

/// Three binomial standard errors at the worst case p = 1/2.
pub fn binomial_bound(runs: u64) -> f64 {
    3.0 * (0.25 / runs as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationResult {
    pub horizon: usize,
    /// Exact probability that decision-maker t (1-based index t-1) is correct.
    pub exact_positional: Vec<f64>,
    /// Total path weight reaching each depth; 1 up to rounding.
    pub depth_mass: Vec<f64>,
    pub path_count: u64,
}

/// Exact positional accuracy of principal-free chains under `MuA`.
///
/// Without a principal the belief is a deterministic function of the
/// decision prefix, so the full tree of 2^T paths can be weighted exactly.
pub fn enumerate_no_principal(params: &ModelParams, horizon: usize) -> Result<EnumerationResult> {
    params.validate()?;
    if horizon > MAX_ENUMERATION_DEPTH {
        return Err(Error::EnumerationTooDeep {
            depth: horizon,
            limit: MAX_ENUMERATION_DEPTH,
        });
    }
    let mut correct = vec![0.0; horizon];
    let mut mass = vec![0.0; horizon];
    expand(
        params,
        optimal_initial_beta(params),
        1.0,
        0,
        &mut correct,
        &mut mass,
    )?;
    Ok(EnumerationResult {
        horizon,
        exact_positional: correct,
        depth_mass: mass,
        path_count: 1u64 << horizon,
    })
}

fn expand(
    params: &ModelParams,
    belief: BeliefState,
    weight: f64,
    depth: usize,
    correct: &mut [f64],
    mass: &mut [f64],
) -> Result<()> {
    if depth == correct.len() {
        return Ok(());
    }
    let r = threshold(params, belief);
    for decision in [Decision::A, Decision::B] {
        let w = weight * choice_prob(params, r, Hypothesis::MuA, decision);
        mass[depth] += w;
        if decision == Decision::A {
            correct[depth] += w;
        }
        let next = apply_observation(params, belief, r, decision)?;
        expand(params, next, w, depth + 1, correct, mass)?;
    }
    Ok(())
}

/// `|P(A|μ_A,r)·e^{LLR(A)} + P(B|μ_A,r)·e^{LLR(B)} − 1|`.
///
/// The weighted sum telescopes to `P(A|μ_B,r) + P(B|μ_B,r)`, so the residual
/// measures how consistently choice probabilities and decision likelihood
/// ratios are computed.
pub fn martingale_residual(params: &ModelParams, r: f64) -> f64 {
    martingale_residual_perturbed(params, r, 0.0)
}

/// [`martingale_residual`] with `P(A|μ_A,r)` scaled by `1 + rel_perturbation`.
/// Fault injection hook for the verification report.
pub fn martingale_residual_perturbed(params: &ModelParams, r: f64, rel_perturbation: f64) -> f64 {
    let p_a = choice_prob(params, r, Hypothesis::MuA, Decision::A) * (1.0 + rel_perturbation);
    let p_b = choice_prob(params, r, Hypothesis::MuA, Decision::B);
    let sum = p_a * decision_log_likelihood_ratio(params, r, Decision::A).exp()
        + p_b * decision_log_likelihood_ratio(params, r, Decision::B).exp();
    (sum - 1.0).abs()
}

/// Requested absolute error for [`principal_ratio_mean`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
const QUADRATURE_HALF_WIDTH: f64 = 10.0;
const MAX_SUBDIVISIONS: usize = 2000;

/// `E[p(s|μ_B)/p(s|μ_A)]` for `s ~ N(μ_generating, σ_P²)`, by adaptive
/// Gauss–Kronrod quadrature over `μ ± 10σ_P`.
///
/// Closed forms: 1 under `MuA`, `exp(((μ_A−μ_B)/σ_P)²)` under `MuB`.
pub fn principal_ratio_mean(params: &ModelParams, generating: Hypothesis) -> Result<f64> {
    let mu = generating.mean(params);
    let sp = params.sigma_p;
    let integrand =
        |s: f64| principal_log_likelihood_ratio(params, s).exp() * normal_pdf((s - mu) / sp) / sp;
    let half = QUADRATURE_HALF_WIDTH * sp;
    integrate_adaptive(integrand, mu - half, mu + half, QUADRATURE_TOLERANCE)
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |Kronrod − Gauss| on one interval.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive bisection: keeps splitting the interval with the largest
/// error estimate until the summed estimate drops below `tolerance`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tolerance: f64) -> Result<f64> {
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut pieces = vec![(a, b, value, error)];
    loop {
        let total_error: f64 = pieces.iter().map(|p| p.3).sum();
        if total_error <= tolerance {
            return Ok(pieces.iter().map(|p| p.2).sum());
        }
        if pieces.len() >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature {
                estimate: total_error,
                requested: tolerance,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = gauss_kronrod_15(&f, l, h);
            pieces.push((l, h, v, e));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McComparison {
    pub horizon: usize,
    pub runs: u64,
    pub exact: Vec<f64>,
    pub simulated: Vec<f64>,
    pub max_deviation: f64,
    /// `3·sqrt(0.25/runs)`.
    pub bound: f64,
    /// Set when the bound is too loose for the comparison to mean anything.
    pub underpowered: bool,
}

impl McComparison {
    pub fn within_bound(&self) -> bool {
        self.max_deviation <= self.bound
    }
}

/// Cross-checks the principal-free Monte Carlo ensemble against exact
/// enumeration.
pub fn mc_vs_enumeration(
    params: &ModelParams,
    horizon: usize,
    runs: u64,
    master_seed: u64,
) -> Result<McComparison> {
    let exact = enumerate_no_principal(params, horizon)?;
    let scenario = Scenario {
        params: *params,
        principal: PrincipalConfig::default(),
        true_state: TrueState(Hypothesis::MuA),
        horizon,
        runs,
        master_seed,
        ..Scenario::default()
    };
    let stats = run_ensemble(&scenario)?;
    let max_deviation = exact
        .exact_positional
        .iter()
        .zip(&stats.positional_correct)
        .map(|(e, s)| (e - s).abs())
        .fold(0.0, f64::max);
    let bound = binomial_bound(runs);
    Ok(McComparison {
        horizon,
        runs,
        exact: exact.exact_positional,
        simulated: stats.positional_correct,
        max_deviation,
        bound,
        underpowered: bound > 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // 30-digit evaluation: Φ(0.5)·Φ(1 − r₂ᴬ) + Φ(−0.5)·Φ(1 − r₂ᴮ), r₂ = 0.5 ± ln(Φ(−0.5)/Φ(0.5))
    const EXACT_P1: f64 = 0.691_462_461_274_013_1;
    const EXACT_P2: f64 = 0.742_420_088_461_296_4;

    #[test]
    fn enumeration_first_two_positions() {
        let e = enumerate_no_principal(&ModelParams::default(), 2).unwrap();
        assert_eq!(e.path_count, 4);
        assert!((e.exact_positional[0] - EXACT_P1).abs() < 1e-14);
        assert!(
            (e.exact_positional[1] - EXACT_P2).abs() < 1e-13,
            "{}",
            e.exact_positional[1]
        );
    }

    #[test]
    fn enumeration_conserves_mass() {
        let e = enumerate_no_principal(&ModelParams::default(), 14).unwrap();
        for m in &e.depth_mass {
            assert!((m - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn enumeration_rejects_deep_trees() {
        let err = enumerate_no_principal(&ModelParams::default(), 21).unwrap_err();
        assert_eq!(
            err,
            Error::EnumerationTooDeep {
                depth: 21,
                limit: 20
            }
        );
    }

    #[test]
    fn gauss_kronrod_is_exact_for_polynomials() {
        // K15 integrates degree 22 exactly, G7 degree 13
        let (k, err) = gauss_kronrod_15(&|x: f64| x.powi(12), -1.0, 1.0);
        assert!((k - 2.0 / 13.0).abs() < 1e-15);
        assert!(err < 1e-15);
        let (k, _) = gauss_kronrod_15(&|x: f64| x.powi(22), 0.0, 2.0);
        assert!((k - 2f64.powi(23) / 23.0).abs() / k < 1e-13);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let p = ModelParams::default();
        let under_a = principal_ratio_mean(&p, Hypothesis::MuA).unwrap();
        assert!((under_a - 1.0).abs() < 1e-8, "{under_a}");
        let under_b = principal_ratio_mean(&p, Hypothesis::MuB).unwrap();
        assert!((under_b - std::f64::consts::E).abs() < 1e-7, "{under_b}");
        let wide = ModelParams { sigma_p: 2.0, ..p };
        let v = principal_ratio_mean(&wide, Hypothesis::MuB).unwrap();
        assert!((v - 0.25f64.exp()).abs() < 1e-7, "{v}");
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        let err = integrate_adaptive(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn martingale_identity() {
        let p = ModelParams::default();
        for r in [0.5, 3.7, -3.0, 2.0] {
            assert!(martingale_residual(&p, r) <= 1e-12, "r={r}");
        }
        assert!(martingale_residual(&p, -6.0) <= 1e-10);
        assert!(martingale_residual_perturbed(&p, 0.5, 1e-6) > 1e-7);
    }

    #[test]
    fn single_run_comparison_is_underpowered() {
        let c = mc_vs_enumeration(&ModelParams::default(), 2, 1, 0).unwrap();
        assert!(c.underpowered);
        assert!(c.max_deviation <= 1.0);
    }
}
