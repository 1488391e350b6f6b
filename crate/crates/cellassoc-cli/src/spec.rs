//! Experiment descriptions: the TOML schema for `run --spec` and its
//! resolution into library types.
//!
//! A spec names a set of technologies (each optionally replicated via
//! `count`), a list of association policies, one metric, an optional
//! one-dimensional sweep, and the engine selection. Thresholds enter the
//! file in dB (`beta_db`) and are converted to linear ratios here; the
//! library never sees dB. Resolution collects *all* problems it finds and
//! reports them together rather than stopping at the first.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cellassoc::{Metric, Policy, TechnologyConfig};

use crate::error::CliError;
use crate::runner::analytic_available;

fn default_lambda() -> f64 {
    1.0 / PI
}
fn default_one() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    4.0
}
fn default_engine() -> String {
    "both".to_string()
}
fn default_n_worlds() -> u64 {
    10_000
}
fn default_count() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechSpec {
    /// Station density (per unit area).
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Transmit power.
    #[serde(default = "default_one")]
    pub power: f64,
    /// Noise power at the receiver; 0 selects the interference-limited regime.
    #[serde(default)]
    pub noise: f64,
    /// Coverage threshold in dB; converted to a linear ratio on resolution.
    #[serde(default)]
    pub beta_db: f64,
    /// Path-loss exponent (must exceed 2).
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Rayleigh fading rate (mean fade power 1/mu).
    #[serde(default = "default_one")]
    pub mu: f64,
    /// Bandwidth weight for the rate metric.
    #[serde(default = "default_one")]
    pub bandwidth: f64,
    /// Number of identical copies of this technology to instantiate.
    #[serde(default = "default_count")]
    pub count: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// One of `beta_db`, `alpha`, `T`, `k`.
    pub variable: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub technologies: Vec<TechSpec>,
    pub policies: Vec<String>,
    pub metric: String,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    /// `analytic`, `monte-carlo`, or `both`.
    #[serde(default = "default_engine")]
    pub engine: String,
    #[serde(default = "default_n_worlds")]
    pub n_worlds: u64,
    #[serde(default)]
    pub seed: u64,
    /// CSV destination; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    MonteCarlo,
    Both,
}

impl Engine {
    pub fn runs_analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }
    pub fn runs_monte_carlo(self) -> bool {
        matches!(self, Engine::MonteCarlo | Engine::Both)
    }
}

/// A spec with every string parsed, every dB value linearized, and every
/// replication expanded — ready for the runner.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub template: Vec<TechnologyConfig>,
    pub policies: Vec<Policy>,
    pub metric: Metric,
    pub engine: Engine,
    pub sweep_var: String,
    pub points: Vec<f64>,
    pub n_worlds: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn load(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read spec file {}: {e}", path.display()))
    })?;
    toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("malformed spec {}: {e}", path.display())))
}

impl ExperimentSpec {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let mut problems: Vec<String> = Vec::new();

        let mut template: Vec<TechnologyConfig> = Vec::new();
        if self.technologies.is_empty() {
            problems.push("at least one technology is required".to_string());
        }
        for (i, tech) in self.technologies.iter().enumerate() {
            if tech.count == 0 {
                problems.push(format!("technology {}: count must be at least 1", i + 1));
            }
            for _ in 0..tech.count {
                let id = template.len() + 1;
                template.push(TechnologyConfig {
                    id,
                    lambda: tech.lambda,
                    power: tech.power,
                    noise: tech.noise,
                    alpha: tech.alpha,
                    beta: db_to_linear(tech.beta_db),
                    fading_mean_inv: tech.mu,
                    bandwidth: tech.bandwidth,
                });
            }
        }
        if let Err(e) = cellassoc::validate_configs(&template) {
            problems.push(e.to_string());
        }

        let mut policies: Vec<Policy> = Vec::new();
        if self.policies.is_empty() {
            problems.push("at least one policy is required".to_string());
        }
        for name in &self.policies {
            match name.parse::<Policy>() {
                Ok(p) => policies.push(p),
                Err(e) => problems.push(e.to_string()),
            }
        }

        let metric = match self.metric.parse::<Metric>() {
            Ok(m) => m,
            Err(e) => {
                problems.push(e.to_string());
                Metric::Coverage
            }
        };

        let engine = match self.engine.as_str() {
            "analytic" => Engine::Analytic,
            "monte-carlo" => Engine::MonteCarlo,
            "both" => Engine::Both,
            other => {
                problems.push(format!(
                    "unknown engine '{other}' (expected analytic, monte-carlo, or both)"
                ));
                Engine::Both
            }
        };

        let (sweep_var, points) = match &self.sweep {
            Some(sweep) => {
                let var = sweep.variable.clone();
                if !matches!(var.as_str(), "beta_db" | "alpha" | "T" | "k") {
                    problems.push(format!(
                        "unknown sweep variable '{var}' (expected beta_db, alpha, T, or k)"
                    ));
                }
                if sweep.values.is_empty() {
                    problems.push("sweep grid is empty".to_string());
                }
                if matches!(var.as_str(), "T" | "k") {
                    for &v in &sweep.values {
                        if v < 1.0 || v.fract() != 0.0 {
                            problems.push(format!(
                                "sweep over {var} requires positive integers, got {v}"
                            ));
                        }
                    }
                }
                if var == "alpha" {
                    for &v in &sweep.values {
                        if v <= 2.0 {
                            problems.push(format!(
                                "path-loss exponent must exceed 2, got {v} in the sweep grid"
                            ));
                        }
                    }
                }
                (var, sweep.values.clone())
            }
            None => {
                let anchor = self.technologies.first().map_or(0.0, |t| t.beta_db);
                ("beta_db".to_string(), vec![anchor])
            }
        };

        if self.n_worlds == 0 && engine != Engine::Analytic {
            problems.push("n_worlds must be positive for Monte Carlo runs".to_string());
        }

        let resolved = Resolved {
            template,
            policies,
            metric,
            engine,
            sweep_var,
            points,
            n_worlds: self.n_worlds,
            seed: self.seed,
            output: self.output.clone(),
        };

        // A pure-analytic run must be expressible at every grid point; with
        // engine=both an unsupported combination is simply skipped instead.
        if engine == Engine::Analytic && problems.is_empty() {
            for &point in &resolved.points {
                let configs = resolved.configs_at(point);
                let interference_limited = configs.iter().all(|c| c.noise == 0.0);
                for policy in resolved.policies_at(point) {
                    if !analytic_available(&policy, resolved.metric, interference_limited) {
                        problems.push(format!(
                            "engine=analytic cannot evaluate policy {policy} under the \
                             {} metric at {}={point}",
                            resolved.metric, resolved.sweep_var
                        ));
                    }
                }
            }
            problems.dedup();
        }

        if problems.is_empty() {
            Ok(resolved)
        } else {
            Err(CliError::Validation(problems.join("; ")))
        }
    }
}

impl Resolved {
    /// Technology set at one sweep point.
    pub fn configs_at(&self, point: f64) -> Vec<TechnologyConfig> {
        match self.sweep_var.as_str() {
            "beta_db" => {
                let beta = db_to_linear(point);
                self.template
                    .iter()
                    .map(|c| TechnologyConfig { beta, ..c.clone() })
                    .collect()
            }
            "alpha" => self
                .template
                .iter()
                .map(|c| TechnologyConfig {
                    alpha: point,
                    ..c.clone()
                })
                .collect(),
            "T" => {
                let t = point as usize;
                let base = self.template[0].clone();
                (1..=t)
                    .map(|id| TechnologyConfig { id, ..base.clone() })
                    .collect()
            }
            _ => self.template.clone(),
        }
    }

    /// Policy set at one sweep point (`k` sweeps retarget the search depth).
    pub fn policies_at(&self, point: f64) -> Vec<Policy> {
        if self.sweep_var == "k" {
            let k = point as usize;
            self.policies
                .iter()
                .map(|p| match p {
                    Policy::OptCoverage { .. } => Policy::OptCoverage { k },
                    Policy::OptRate { .. } => Policy::OptRate { k },
                    other => other.clone(),
                })
                .collect()
        } else {
            self.policies.clone()
        }
    }
}

/// Fully-resolved record written next to each CSV so a result file is
/// self-describing: every default made explicit, every dB value shown in
/// both forms.
#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub technologies: Vec<SidecarTech>,
    pub policies: Vec<String>,
    pub metric: String,
    pub engine: &'a str,
    pub sweep_var: &'a str,
    pub points: &'a [f64],
    pub n_worlds: u64,
    pub seed: u64,
    pub sampler: SidecarSampler,
    pub quadrature: SidecarQuadrature,
}

#[derive(Debug, Serialize)]
pub struct SidecarTech {
    pub id: usize,
    pub lambda: f64,
    pub power: f64,
    pub noise: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_db: f64,
    pub mu: f64,
    pub bandwidth: f64,
}

#[derive(Debug, Serialize)]
pub struct SidecarSampler {
    pub bs_count: usize,
    pub tail_correction: bool,
}

#[derive(Debug, Serialize)]
pub struct SidecarQuadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

pub fn write_sidecar(csv_path: &Path, resolved: &Resolved) -> Result<(), CliError> {
    let sampler = cellassoc::SamplerSpec::new(resolved.seed);
    let quad = cellassoc::QuadratureSpec::default();
    let record = Sidecar {
        technologies: resolved
            .template
            .iter()
            .map(|c| SidecarTech {
                id: c.id,
                lambda: c.lambda,
                power: c.power,
                noise: c.noise,
                alpha: c.alpha,
                beta: c.beta,
                beta_db: 10.0 * c.beta.log10(),
                mu: c.fading_mean_inv,
                bandwidth: c.bandwidth,
            })
            .collect(),
        policies: resolved.policies.iter().map(|p| p.to_string()).collect(),
        metric: resolved.metric.to_string(),
        engine: match resolved.engine {
            Engine::Analytic => "analytic",
            Engine::MonteCarlo => "monte-carlo",
            Engine::Both => "both",
        },
        sweep_var: &resolved.sweep_var,
        points: &resolved.points,
        n_worlds: resolved.n_worlds,
        seed: resolved.seed,
        sampler: SidecarSampler {
            bs_count: sampler.bs_count,
            tail_correction: sampler.tail_correction,
        },
        quadrature: SidecarQuadrature {
            rel_tol: quad.rel_tol,
            abs_tol: quad.abs_tol,
        },
    };
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".json");
    let text = serde_json::to_string_pretty(&record)
        .map_err(|e| CliError::Validation(format!("cannot serialize sidecar: {e}")))?;
    std::fs::write(PathBuf::from(name), text)?;
    Ok(())
}
