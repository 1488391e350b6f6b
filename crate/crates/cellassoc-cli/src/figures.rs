//! Canned studies: fixed parameter grids reproduced on demand.
//!
//! Each figure id expands to one or more ordinary experiment specs (the
//! same structures `run --spec` consumes), executes them, and writes one
//! CSV plus sidecar per file into the output directory. The grids are
//! frozen so two invocations with the same `--n-worlds` and `--seed`
//! produce byte-identical files.

use std::path::PathBuf;

use crate::error::CliError;
use crate::output::write_csv;
use crate::runner::execute;
use crate::spec::{write_sidecar, ExperimentSpec, Sweep, TechSpec};

const DEFAULT_N_WORLDS: u64 = 10_000;
const DEFAULT_SEED: u64 = 7240;

fn symmetric_tech(count: u32) -> TechSpec {
    TechSpec {
        lambda: 1.0 / std::f64::consts::PI,
        power: 1.0,
        noise: 0.0,
        beta_db: 0.0,
        alpha: 4.0,
        mu: 1.0,
        bandwidth: 1.0,
        count,
    }
}

fn spec(
    t_count: u32,
    policies: &[&str],
    metric: &str,
    sweep_var: &str,
    values: Vec<f64>,
    n_worlds: u64,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        technologies: vec![symmetric_tech(t_count)],
        policies: policies.iter().map(|s| s.to_string()).collect(),
        metric: metric.to_string(),
        sweep: Some(Sweep {
            variable: sweep_var.to_string(),
            values,
        }),
        engine: "both".to_string(),
        n_worlds,
        seed,
        output: None,
    }
}

fn beta_grid_wide() -> Vec<f64> {
    vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
}

fn beta_grid_fine() -> Vec<f64> {
    (0..13).map(|i| -10.0 + 2.5 * i as f64).collect()
}

fn alpha_grid() -> Vec<f64> {
    (0..10).map(|i| 2.5 + 0.5 * i as f64).collect()
}

/// The files a figure id expands to: `(basename, spec)`.
fn plan(id: &str, n_worlds: u64, seed: u64) -> Option<Vec<(&'static str, ExperimentSpec)>> {
    let cov_policies = ["nearest", "random", "max-ratio", "opt-cov:k=1", "opt-cov:k=2"];
    match id {
        // Coverage of the depth-k optimal policy as the search deepens:
        // the payoff saturates almost immediately.
        "fig2" => Some(vec![(
            "fig2.csv",
            spec(
                10,
                &["opt-cov:k=1", "opt-cov:k=2", "opt-cov:k=3", "opt-cov:k=4", "opt-cov:k=5"],
                "coverage",
                "beta_db",
                beta_grid_wide(),
                n_worlds,
                seed,
            ),
        )]),
        // All policies across the threshold range, at two network sizes.
        "fig3-cov" => Some(vec![
            (
                "fig3-cov-T5.csv",
                spec(5, &cov_policies, "coverage", "beta_db", beta_grid_fine(), n_worlds, seed),
            ),
            (
                "fig3-cov-T8.csv",
                spec(8, &cov_policies, "coverage", "beta_db", beta_grid_fine(), n_worlds, seed),
            ),
        ]),
        // Average rate against the path-loss exponent: the ratio policy
        // closes in on the depth-2 optimum as propagation steepens.
        "fig3-rate" => Some(vec![(
            "fig3-rate.csv",
            spec(
                5,
                &["nearest", "random", "max-ratio", "opt-rate:k=1", "opt-rate:k=2"],
                "rate",
                "alpha",
                alpha_grid(),
                n_worlds,
                seed,
            ),
        )]),
        // Coverage against the number of technologies at a fixed threshold.
        "fig4" => Some(vec![(
            "fig4.csv",
            spec(
                1,
                &["nearest", "max-ratio"],
                "coverage",
                "T",
                (1..=12).map(f64::from).collect(),
                n_worlds,
                seed,
            ),
        )]),
        _ => None,
    }
}

pub fn known_ids() -> &'static [&'static str] {
    &["fig2", "fig3-cov", "fig3-rate", "fig4"]
}

pub fn run_figure(
    id: &str,
    out_dir: Option<PathBuf>,
    n_worlds: Option<u64>,
    seed: Option<u64>,
) -> Result<i32, CliError> {
    let n_worlds = n_worlds.unwrap_or(DEFAULT_N_WORLDS);
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let files = plan(id, n_worlds, seed).ok_or_else(|| {
        CliError::BadArgs(format!(
            "unknown figure id '{id}' (expected one of: {})",
            known_ids().join(", ")
        ))
    })?;
    let out_dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;

    let mut failures = 0usize;
    for (basename, experiment) in files {
        let resolved = experiment.resolve()?;
        let output = execute(&resolved)?;
        failures += output.numerical_failures;

        let path = out_dir.join(basename);
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            &resolved.sweep_var,
            &resolved.metric.to_string(),
            &output.rows,
        )?;
        std::fs::write(&path, &buf)?;
        write_sidecar(&path, &resolved)?;
        println!("wrote {} ({} rows)", path.display(), output.rows.len());
    }

    if failures > 0 {
        eprintln!("error: {failures} row(s) failed numerically");
        Ok(2)
    } else {
        Ok(0)
    }
}
