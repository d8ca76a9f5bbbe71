//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use herdsim::cli::output::{rows, to_csv, RowKey, RunManifest};
use herdsim::model::{
    decision_log_likelihood_ratio, normal_cdf, signal_separation, Decision, Hypothesis, ModelParams,
};
use herdsim::oracle::{
    enumerate_no_principal, martingale_residual, mc_vs_enumeration, principal_ratio_mean,
};
use herdsim::{
    derive_stream, run_ensemble, simulate_chain, BiasMode, EnsembleStats, Metric, PrincipalConfig,
    Scenario, TrueState,
};

const SEED: u64 = 20_231_018;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn pooled(a: &EnsembleStats, ta: usize, b: &EnsembleStats, tb: usize) -> f64 {
    (a.stderr_at(ta).powi(2) + b.stderr_at(tb).powi(2)).sqrt()
}

fn principal(p_bias: f64, p_trust: f64) -> PrincipalConfig {
    PrincipalConfig {
        enabled: true,
        p_bias,
        p_trust,
        bias_mode: BiasMode::PerDecisionMaker,
    }
}

fn ensemble(principal: PrincipalConfig, horizon: usize, runs: u64) -> EnsembleStats {
    run_ensemble(&Scenario {
        principal,
        horizon,
        runs,
        master_seed: SEED,
        ..Scenario::default()
    })
    .expect("ensemble runs")
}

fn exact_identities() -> Outcome {
    let p = ModelParams::default();
    let worst_residual = [-3.0, -1.0, 0.5, 2.0, 4.0]
        .into_iter()
        .map(|r| martingale_residual(&p, r))
        .fold(0.0, f64::max);
    let mid = 0.5 * (p.mu_a + p.mu_b);
    let asym = (decision_log_likelihood_ratio(&p, mid, Decision::A)
        + decision_log_likelihood_ratio(&p, mid, Decision::B))
    .abs();
    let under_a = principal_ratio_mean(&p, Hypothesis::MuA).expect("quadrature");
    let under_b = principal_ratio_mean(&p, Hypothesis::MuB).expect("quadrature");
    let passed = worst_residual <= 1e-12
        && asym <= 1e-12
        && (under_a - 1.0).abs() <= 1e-8
        && (under_b - std::f64::consts::E).abs() <= 1e-7;
    outcome(
        passed,
        format!(
            "max martingale residual {worst_residual:.2e}, midpoint |LLR(A)+LLR(B)| {asym:.2e}, \
             E_A[ratio]-1 = {:.2e}, E_B[ratio]-e = {:.2e}",
            under_a - 1.0,
            under_b - std::f64::consts::E
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let cmp = mc_vs_enumeration(&ModelParams::default(), 10, 200_000, SEED).expect("comparison");
    outcome(
        cmp.within_bound(),
        format!(
            "T=10 M=200000 max deviation {:.5} vs bound {:.5}",
            cmp.max_deviation, cmp.bound
        ),
    )
}

fn closed_form_anchor() -> Outcome {
    let p = ModelParams::default();
    let target = normal_cdf(signal_separation(&p) / 2.0);
    let stats = ensemble(PrincipalConfig::default(), 1, 1_000_000);
    let gap = (stats.at(1) - target).abs();
    outcome(
        gap <= 3.0 * stats.stderr_at(1),
        format!(
            "accuracy(1) {:.5} vs Φ(d/2) {target:.5}, gap {gap:.5} (3 stderr {:.5})",
            stats.at(1),
            3.0 * stats.stderr_at(1)
        ),
    )
}

fn principal_free_trend() -> Outcome {
    let exact = enumerate_no_principal(&ModelParams::default(), 12).expect("enumeration");
    let increasing = exact.exact_positional.windows(2).all(|w| w[1] > w[0]);
    let stats = ensemble(PrincipalConfig::default(), 100, 100_000);
    let gain = stats.at(100) - stats.at(1);
    outcome(
        increasing && gain > 0.2,
        format!(
            "exact P(1..12) strictly increasing: {increasing} ({:.4} → {:.4}); MC accuracy(100) − accuracy(1) = {gain:.4}",
            exact.exact_positional[0], exact.exact_positional[11]
        ),
    )
}

fn always_trusted_claims() -> Outcome {
    let baseline = ensemble(PrincipalConfig::default(), 100, 100_000);
    let good = ensemble(principal(0.9, 1.0), 100, 100_000);
    let bad = ensemble(principal(0.1, 1.0), 100, 100_000);
    let random = ensemble(principal(0.5, 1.0), 1000, 100_000);

    let lead = good.at(50) - baseline.at(50);
    let lead_se = pooled(&good, 50, &baseline, 50);
    let a = lead >= 3.0 * lead_se;
    let b = bad.at(100) < 0.2;
    let anchor = random.at(500);
    let drift = (500..=1000)
        .map(|t| (random.at(t) - anchor).abs())
        .fold(0.0, f64::max);
    let c = drift <= 0.05;
    outcome(
        a && b && c,
        format!(
            "(a) p_bias=0.9 leads baseline at t=50 by {lead:.4} ({:.1} pooled stderr): {a}; \
             (b) p_bias=0.1 accuracy(100) {:.4} < 0.2: {b}; \
             (c) p_bias=0.5 max |acc(t) − acc(500)| over t∈[500,1000] {drift:.4} ≤ 0.05: {c}",
            lead / lead_se,
            bad.at(100)
        ),
    )
}

fn rise_then_fall() -> Outcome {
    let stats = ensemble(principal(0.3, 0.1), 200, 100_000);
    let first = stats.at(1);
    let last = stats.at(200);
    let witness = (1..=200).find(|&t| {
        stats.at(t) > first + 3.0 * pooled(&stats, t, &stats, 1)
            && last < stats.at(t) - 3.0 * pooled(&stats, t, &stats, 200)
    });
    let peak_t = (1..=200)
        .max_by(|&x, &y| stats.at(x).total_cmp(&stats.at(y)))
        .unwrap();
    outcome(
        witness.is_some(),
        format!(
            "accuracy(1) {first:.4}, peak {:.4} at t={peak_t}, accuracy(200) {last:.4}; first witness t*={witness:?}",
            stats.at(peak_t)
        ),
    )
}

fn inverse_trust() -> Outcome {
    let curves: Vec<(f64, EnsembleStats)> = [0.1, 0.5, 0.9]
        .into_iter()
        .map(|pt| (pt, ensemble(principal(0.5, pt), 200, 100_000)))
        .collect();
    let ordered = curves
        .windows(2)
        .all(|w| w[1].1.at(200) <= w[0].1.at(200) + 3.0 * pooled(&w[0].1, 200, &w[1].1, 200));
    let values: Vec<String> = curves
        .iter()
        .map(|(pt, s)| format!("p_trust={pt}: {:.4}", s.at(200)))
        .collect();
    outcome(ordered, format!("accuracy(200) {}", values.join(", ")))
}

fn degeneracy_and_determinism() -> Outcome {
    let base = herdsim::ChainSpec {
        params: ModelParams::default(),
        principal: PrincipalConfig::default(),
        true_state: TrueState::default(),
        horizon: 100,
    };
    let zero_trust = herdsim::ChainSpec {
        principal: principal(0.3, 0.0),
        ..base
    };
    let identical_chains = (0..1000).all(|run| {
        let a = simulate_chain(&base, &mut derive_stream(SEED, run)).unwrap();
        let b = simulate_chain(&zero_trust, &mut derive_stream(SEED, run)).unwrap();
        a.decisions().eq(b.decisions())
    });

    let scenario = Scenario {
        principal: principal(0.3, 0.1),
        runs: 20_000,
        master_seed: SEED,
        ..Scenario::default()
    };
    let csv = |s: &Scenario| {
        to_csv(
            herdsim::cli::output::Layout::Single,
            &rows(&RowKey::default(), &run_ensemble(s).unwrap()),
        )
    };
    let byte_identical = csv(&scenario) == csv(&scenario);

    let awkward = Scenario {
        params: ModelParams::new(
            0.1 + 0.2,
            -1.0 / 3.0,
            0.7,
            1e-3,
            0.123_456_789_012_345_67,
            2.0_f64.sqrt(),
        )
        .unwrap(),
        principal: PrincipalConfig {
            enabled: true,
            p_bias: 1.0 / 7.0,
            p_trust: 0.9999999999999999,
            bias_mode: BiasMode::PerChain,
        },
        true_state: TrueState(Hypothesis::MuB),
        horizon: 1000,
        runs: 123_456,
        master_seed: u64::MAX,
        metric: Metric::Both,
    };
    let round_trip = [Scenario::default(), scenario, awkward].iter().all(|s| {
        let parsed = RunManifest::from_json(&RunManifest::new(s).to_json()).unwrap();
        parsed.scenario == *s
    });
    outcome(
        identical_chains && byte_identical && round_trip,
        format!(
            "p_trust=0 ≡ principal off over 1000 chains: {identical_chains}; repeated CSV byte-identical: {byte_identical}; manifest round-trip exact: {round_trip}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 exact identities", exact_identities),
        ("2 oracle equivalence", oracle_equivalence),
        ("3 closed-form anchor", closed_form_anchor),
        ("4 principal-free convergence", principal_free_trend),
        ("5 always-trusted principal", always_trusted_claims),
        ("6 rise-then-fall under rare trust", rise_then_fall),
        ("7 inverse trust relation", inverse_trust),
        ("8 degeneracy and determinism", degeneracy_and_determinism),
    ];
    let mut failures = 0;
    for (name, criterion) in criteria {
        let start = Instant::now();
        let result = criterion();
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] criterion {name}: {} ({:.1}s)",
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failures += (!result.passed) as usize;
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
