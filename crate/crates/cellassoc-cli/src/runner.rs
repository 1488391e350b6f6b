//! Sweep execution: one resolved experiment in, one table of rows out.
//!
//! At every sweep point the Monte Carlo engine scores *all* requested
//! policies on the same sampled worlds (shared randomness makes policy
//! differences far better conditioned than independent runs would), and
//! the analytic engine evaluates whichever closed or quadrature-backed
//! expression the library has for each policy/metric pair. Rows for the
//! two engines are interleaved per policy so the CSV diffs cleanly.

use cellassoc::{
    estimate_many, policy_performance_analytic, validate_configs, Error, ExecMode, Metric, Policy,
    QuadratureSpec, SamplerSpec,
};

use crate::error::CliError;
use crate::spec::Resolved;

#[derive(Debug, Clone)]
pub struct Row {
    pub sweep_value: f64,
    pub policy: String,
    pub engine: &'static str,
    /// `None` means the evaluation failed numerically (printed as `failed`).
    pub value: Option<f64>,
    /// Sampling half-width; absent on analytic rows.
    pub ci95: Option<f64>,
    pub n: u64,
}

#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub numerical_failures: usize,
}

/// Whether the library has a direct expression for this combination.
///
/// This mirrors the dispatch table in `policy_performance_analytic`; a
/// drift test in the CLI suite compares the two, so a new expression in
/// the library shows up here as a failing test rather than a silently
/// skipped row.
pub fn analytic_available(policy: &Policy, metric: Metric, interference_limited: bool) -> bool {
    match (policy, metric) {
        (Policy::Nearest | Policy::Random | Policy::MaxRatio, _) => true,
        (Policy::OptCoverage { k: 1 | 2 }, Metric::Coverage) => interference_limited,
        _ => false,
    }
}

pub fn execute(resolved: &Resolved) -> Result<RunOutput, CliError> {
    let quad = QuadratureSpec::default();
    let mut rows = Vec::new();
    let mut numerical_failures = 0usize;

    for &point in &resolved.points {
        let configs = resolved.configs_at(point);
        validate_configs(&configs)
            .map_err(|e| CliError::Validation(format!("at {}={point}: {e}", resolved.sweep_var)))?;
        let policies = resolved.policies_at(point);

        // One shared-world pass per point; the same base seed at every
        // point keeps the sweep on common random numbers.
        let mc = if resolved.engine.runs_monte_carlo() {
            let sampler = SamplerSpec::new(resolved.seed);
            match estimate_many(
                &policies,
                resolved.metric,
                &configs,
                &sampler,
                resolved.n_worlds,
                &quad,
                ExecMode::Parallel,
            ) {
                Ok(estimates) => Some(Ok(estimates)),
                Err(Error::Quadrature { .. }) => Some(Err(())),
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };

        for (slot, policy) in policies.iter().enumerate() {
            let name = policy.to_string();
            if resolved.engine.runs_analytic() {
                match policy_performance_analytic(policy, resolved.metric, &configs, &quad) {
                    Ok(value) => rows.push(Row {
                        sweep_value: point,
                        policy: name.clone(),
                        engine: "analytic",
                        value: Some(value),
                        ci95: None,
                        n: 0,
                    }),
                    // No expression for this combination: skip the row and
                    // let the Monte Carlo row speak. A pure-analytic run
                    // was already checked at resolve time, so this arm is
                    // only reachable with engine=both.
                    Err(Error::Unsupported(_)) => {}
                    Err(Error::Quadrature { .. }) => {
                        numerical_failures += 1;
                        rows.push(Row {
                            sweep_value: point,
                            policy: name.clone(),
                            engine: "analytic",
                            value: None,
                            ci95: None,
                            n: 0,
                        });
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            match &mc {
                Some(Ok(estimates)) => {
                    let est = estimates[slot];
                    rows.push(Row {
                        sweep_value: point,
                        policy: name,
                        engine: "monte-carlo",
                        value: Some(est.value),
                        ci95: Some(est.half_width_95),
                        n: est.n_worlds,
                    });
                }
                Some(Err(())) => {
                    numerical_failures += 1;
                    rows.push(Row {
                        sweep_value: point,
                        policy: name,
                        engine: "monte-carlo",
                        value: None,
                        ci95: None,
                        n: resolved.n_worlds,
                    });
                }
                None => {}
            }
        }
    }

    Ok(RunOutput {
        rows,
        numerical_failures,
    })
}
