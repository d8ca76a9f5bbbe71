//! Command-line front end: `simulate`, `sweep`, `replicate` and `verify`.

pub mod args;
pub mod output;
pub mod presets;

use std::path::Path;

use thiserror::Error;

use crate::chain::{run_ensemble, sweep, EnsembleStats, Metric, Scenario};
use crate::error::Error;
use crate::model::{decision_log_likelihood_ratio, Decision, Hypothesis, ModelParams};
use crate::oracle::{
    enumerate_no_principal, martingale_residual_perturbed, mc_vs_enumeration, principal_ratio_mean,
};
use args::{Cli, Command, Format, OutputArgs, VerifyArgs};
use output::{rows, to_csv, to_json, write_file, GridEcho, Layout, Row, RowKey, RunManifest};
use presets::{Preset, PresetName};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("numeric fault: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParam { .. } | Error::EnumerationTooDeep { .. } => {
                CliError::Config(e.to_string())
            }
            Error::Quadrature { .. } => CliError::Verification(e.to_string()),
            Error::NonFinite { .. } | Error::Run { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { scenario, output } => cmd_simulate(&scenario.resolve()?, &output),
        Command::Sweep {
            scenario,
            output,
            p_bias_grid,
            p_trust_grid,
        } => cmd_sweep(&scenario.resolve()?, &p_bias_grid, &p_trust_grid, &output),
        Command::Replicate {
            preset,
            scenario,
            output,
        } => {
            let name: PresetName = preset.parse().map_err(CliError::Config)?;
            let horizon_override = scenario.horizon.is_some()
                || scenario
                    .config
                    .as_deref()
                    .map(args::parse_config_file)
                    .transpose()?
                    .is_some_and(|f| f.horizon.is_some());
            let base = scenario.resolve()?;
            cmd_replicate(name, &base, horizon_override, &output)
        }
        Command::Verify(v) => {
            let checks = verify_checks(&v)?;
            for check in &checks {
                println!("{check}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed == 0 {
                println!("all {} checks passed", checks.len());
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "{failed} of {} checks failed",
                    checks.len()
                )))
            }
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_table(
    dir: &Path,
    name: &str,
    layout: Layout,
    rows: &[Row],
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => write_file(&dir.join(format!("{name}.csv")), &to_csv(layout, rows)),
        Format::Json => write_file(&dir.join(format!("{name}.json")), &to_json(rows)),
    }
}

fn write_manifest(dir: &Path, name: &str, manifest: &RunManifest) -> Result<(), CliError> {
    write_file(
        &dir.join(format!("{name}.manifest.json")),
        &manifest.to_json(),
    )
}

fn summary(stats: &EnsembleStats, metric: Metric) -> String {
    let t = stats.horizon;
    let positional = format!(
        "positional accuracy {:.5} ± {:.5}",
        stats.at(t),
        stats.stderr_at(t)
    );
    let cumulative = format!("cumulative accuracy {:.5}", stats.cumulative_correct[t - 1]);
    match metric {
        Metric::Positional => format!("t={t}: {positional}"),
        Metric::Cumulative => format!("t={t}: {cumulative}"),
        Metric::Both => format!("t={t}: {positional}; {cumulative}"),
    }
}

pub fn cmd_simulate(scenario: &Scenario, output: &OutputArgs) -> Result<(), CliError> {
    let stats = run_ensemble(scenario)?;
    ensure_dir(&output.out)?;
    let table = rows(&RowKey::default(), &stats);
    write_table(
        &output.out,
        "simulate",
        Layout::Single,
        &table,
        output.format,
    )?;
    write_manifest(&output.out, "simulate", &RunManifest::new(scenario))?;
    println!("{}", summary(&stats, scenario.metric));
    Ok(())
}

pub fn cmd_sweep(
    base: &Scenario,
    p_bias_values: &[f64],
    p_trust_values: &[f64],
    output: &OutputArgs,
) -> Result<(), CliError> {
    let cells = sweep(base, p_bias_values, p_trust_values)?;
    ensure_dir(&output.out)?;
    let mut table = Vec::new();
    for cell in &cells {
        let key = RowKey {
            p_bias: Some(cell.p_bias),
            p_trust: Some(cell.p_trust),
            ..RowKey::default()
        };
        table.extend(rows(&key, &cell.stats));
        println!(
            "p_bias={} p_trust={} {}",
            cell.p_bias,
            cell.p_trust,
            summary(&cell.stats, base.metric)
        );
    }
    write_table(&output.out, "sweep", Layout::Grid, &table, output.format)?;
    let mut manifest = RunManifest::new(base);
    manifest.grid = Some(GridEcho {
        p_bias: p_bias_values.to_vec(),
        p_trust: p_trust_values.to_vec(),
    });
    write_manifest(&output.out, "sweep", &manifest)
}

/// Runs every curve of a preset on the base scenario's model, seed and run
/// count. The preset's horizon applies unless `horizon_override` is set.
pub fn cmd_replicate(
    name: PresetName,
    base: &Scenario,
    horizon_override: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let preset = Preset::new(name);
    let horizon = if horizon_override {
        base.horizon
    } else {
        preset.horizon
    };
    ensure_dir(&output.out)?;
    let mut combined = Vec::new();
    for curve in &preset.curves {
        let scenario = Scenario {
            principal: curve.principal,
            horizon,
            ..*base
        };
        let stats = run_ensemble(&scenario)?;
        let key = RowKey {
            curve: Some(curve.label.clone()),
            principal: Some(curve.principal.enabled),
            p_bias: curve.principal.enabled.then_some(curve.principal.p_bias),
            p_trust: curve.principal.enabled.then_some(curve.principal.p_trust),
        };
        let curve_rows = rows(&key, &stats);
        let file = format!("{}_{}", preset.name, curve.label);
        write_table(
            &output.out,
            &file,
            Layout::Single,
            &curve_rows,
            output.format,
        )?;
        let mut manifest = RunManifest::new(&scenario);
        manifest.preset = Some(preset.name.to_string());
        manifest.curve = Some(curve.label.clone());
        manifest.narrated = curve.narrated;
        write_manifest(&output.out, &file, &manifest)?;
        println!(
            "{} {}: {}",
            preset.name,
            curve.label,
            summary(&stats, base.metric)
        );
        combined.extend(curve_rows);
    }
    let name = preset.name.to_string();
    write_table(&output.out, &name, Layout::Curves, &combined, output.format)?;
    let mut manifest = RunManifest::new(&Scenario { horizon, ..*base });
    manifest.preset = Some(name.clone());
    write_manifest(&output.out, &name, &manifest)
}

/// Outcome of one oracle check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Runs the oracle suite on the default model.
pub fn verify_checks(v: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let params = ModelParams::default();
    let mut checks = Vec::new();

    for r in [-3.0, -1.0, 0.5, 2.0, 4.0] {
        let residual = martingale_residual_perturbed(&params, r, v.inject_cdf_fault);
        checks.push(check(
            format!("martingale r={r}"),
            residual <= 1e-12,
            format!("residual {residual:.3e} (limit 1e-12)"),
        ));
    }
    let tail = martingale_residual_perturbed(&params, -6.0, v.inject_cdf_fault);
    checks.push(check(
        "martingale r=-6",
        tail <= 1e-10,
        format!("residual {tail:.3e} (limit 1e-10)"),
    ));

    let mid = 0.5 * (params.mu_a + params.mu_b);
    let asym = decision_log_likelihood_ratio(&params, mid, Decision::A)
        + decision_log_likelihood_ratio(&params, mid, Decision::B);
    checks.push(check(
        "midpoint antisymmetry",
        asym.abs() <= 1e-12,
        format!("LLR(A)+LLR(B) = {asym:.3e} (limit 1e-12)"),
    ));

    for sigma_p in [0.5, 1.0, 2.0] {
        let p = ModelParams { sigma_p, ..params };
        let d_p = (p.mu_a - p.mu_b) / sigma_p;
        for (hyp, target, tol) in [
            (Hypothesis::MuA, 1.0, 1e-8),
            (Hypothesis::MuB, (d_p * d_p).exp(), 1e-7),
        ] {
            let name = format!("principal ratio mean {hyp:?} sigma_p={sigma_p}");
            match principal_ratio_mean(&p, hyp) {
                Ok(value) => checks.push(check(
                    name,
                    (value - target).abs() <= tol,
                    format!("{value:.12} vs {target:.12} (tol {tol:e})"),
                )),
                Err(e) => checks.push(check(name, false, e.to_string())),
            }
        }
    }

    let enumeration = enumerate_no_principal(&params, v.enum_t)?;
    let worst_mass = enumeration
        .depth_mass
        .iter()
        .map(|m| (m - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(check(
        format!("enumeration mass T={}", v.enum_t),
        worst_mass <= 1e-10,
        format!("max |mass - 1| = {worst_mass:.3e}"),
    ));

    let cmp = mc_vs_enumeration(&params, v.enum_t, v.runs, v.seed)?;
    let note = if cmp.underpowered {
        " [underpowered]"
    } else {
        ""
    };
    checks.push(check(
        format!("monte carlo vs enumeration T={} M={}", v.enum_t, v.runs),
        cmp.within_bound(),
        format!(
            "max deviation {:.5} (bound {:.5}){note}",
            cmp.max_deviation, cmp.bound
        ),
    ));
    Ok(checks)
}
