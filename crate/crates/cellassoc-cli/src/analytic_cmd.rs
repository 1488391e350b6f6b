//! Direct evaluation of individual closed-form expressions.
//!
//! Each formula id names one library entry point; parameters arrive as
//! repeatable `--params key=value` flags (comma-separated pairs allowed
//! within one flag). Thresholds may be given linearly (`beta=2`) or in
//! decibels (`beta_db=3`), never both; the default threshold is 0 dB.

use cellassoc::analytic::{
    cdf_max_ratio, cdf_opt_nearest, cp_given_r1, cp_given_r1_r2, cp_max_ratio_closed,
    cp_max_ratio_general, phi, rate_max_ratio_closed, sir_coverage_given_ratio_bound,
};
use cellassoc::{symmetric_configs, QuadratureSpec, TechnologyConfig};

use crate::error::CliError;
use crate::output::sig9;
use crate::spec::db_to_linear;

pub const FORMULAS: &[&str] = &[
    "eq11", "eq12", "eq13", "eq15", "eq16", "eq19", "eq20", "lemma6", "phi",
];

struct Params {
    pairs: Vec<(String, f64)>,
}

impl Params {
    fn parse(raw: &[String]) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        for chunk in raw.iter().flat_map(|s| s.split(',')) {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let (key, value) = chunk.split_once('=').ok_or_else(|| {
                CliError::BadArgs(format!("malformed parameter '{chunk}' (expected key=value)"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                CliError::BadArgs(format!("parameter {key}: '{}' is not a number", value.trim()))
            })?;
            pairs.push((key.trim().to_string(), value));
        }
        Ok(Params { pairs })
    }

    fn check_keys(&self, formula: &str, allowed: &[&str]) -> Result<(), CliError> {
        for (key, _) in &self.pairs {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::BadArgs(format!(
                    "{formula} does not take parameter '{key}' (accepted: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn list(&self, key: &str) -> Vec<f64> {
        self.pairs
            .iter()
            .filter(|(k, _)| k == key)
            .map(|&(_, v)| v)
            .collect()
    }

    /// A key that may appear at most once.
    fn single(&self, key: &str) -> Result<Option<f64>, CliError> {
        let values = self.list(key);
        match values.len() {
            0 => Ok(None),
            1 => Ok(Some(values[0])),
            n => Err(CliError::BadArgs(format!(
                "parameter {key} given {n} times (expected once)"
            ))),
        }
    }

    fn get(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.single(key)?.unwrap_or(default))
    }

    fn require(&self, formula: &str, key: &str) -> Result<f64, CliError> {
        self.single(key)?.ok_or_else(|| {
            CliError::BadArgs(format!("{formula} requires parameter {key}=<value>"))
        })
    }

    /// One threshold from either the linear or the dB spelling.
    fn threshold(&self, lin_key: &str, db_key: &str, default: f64) -> Result<f64, CliError> {
        let lin = self.single(lin_key)?;
        let db = self.single(db_key)?;
        match (lin, db) {
            (Some(_), Some(_)) => Err(CliError::BadArgs(format!(
                "give either {lin_key} or {db_key}, not both"
            ))),
            (Some(v), None) => Ok(v),
            (None, Some(v)) => Ok(db_to_linear(v)),
            (None, None) => Ok(default),
        }
    }

    fn tech_count(&self, formula: &str, default: Option<usize>) -> Result<usize, CliError> {
        let value = match (self.single("t")?, default) {
            (Some(v), _) => v,
            (None, Some(d)) => return Ok(d),
            (None, None) => {
                return Err(CliError::BadArgs(format!(
                    "{formula} requires parameter t=<count>"
                )))
            }
        };
        if value < 1.0 || value.fract() != 0.0 || value > 64.0 {
            return Err(CliError::BadArgs(format!(
                "t must be an integer in [1, 64], got {value}"
            )));
        }
        Ok(value as usize)
    }
}

fn map_library_error(e: cellassoc::Error) -> CliError {
    match e {
        // In this subcommand every library parameter came straight from
        // the command line, so a rejected value is an argument error.
        cellassoc::Error::InvalidParameter { .. } => CliError::BadArgs(e.to_string()),
        cellassoc::Error::Quadrature { .. } => CliError::Numerical(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

pub fn run_analytic(formula: &str, raw_params: &[String]) -> Result<i32, CliError> {
    let params = Params::parse(raw_params)?;
    let quad = QuadratureSpec::default();

    let shared = |p: &Params| -> Result<(f64, f64, f64, f64, f64, f64), CliError> {
        Ok((
            p.get("lambda", 1.0 / std::f64::consts::PI)?,
            p.get("power", 1.0)?,
            p.get("noise", 0.0)?,
            p.threshold("beta", "beta_db", 1.0)?,
            p.get("alpha", 4.0)?,
            p.get("mu", 1.0)?,
        ))
    };

    let value = match formula {
        "eq11" => {
            params.check_keys(formula, &[
                "r1", "lambda", "power", "noise", "beta", "beta_db", "alpha", "mu",
            ])?;
            let r1 = params.require(formula, "r1")?;
            let (lambda, power, noise, beta, alpha, mu) = shared(&params)?;
            cp_given_r1(r1, lambda, power, noise, beta, alpha, mu, &quad)
        }
        "eq12" => {
            params.check_keys(formula, &[
                "r1", "r2", "lambda", "power", "noise", "beta", "beta_db", "alpha", "mu",
            ])?;
            let r1 = params.require(formula, "r1")?;
            let r2 = params.require(formula, "r2")?;
            let (lambda, power, noise, beta, alpha, mu) = shared(&params)?;
            cp_given_r1_r2(r1, r2, lambda, power, noise, beta, alpha, mu, &quad)
        }
        "eq13" => {
            params.check_keys(formula, &["y", "beta", "beta_db", "alpha"])?;
            let y = params.require(formula, "y")?;
            let beta = params.threshold("beta", "beta_db", 1.0)?;
            let alpha = params.get("alpha", 4.0)?;
            cdf_opt_nearest(y, beta, alpha, &quad)
        }
        "eq15" => {
            params.check_keys(formula, &["x"])?;
            let x = params.require(formula, "x")?;
            cdf_max_ratio(x)
        }
        "eq16" => {
            params.check_keys(formula, &[
                "t", "lambda", "power", "noise", "beta", "beta_db", "alpha", "mu",
            ])?;
            let t = params.tech_count(formula, Some(1))?;
            let (lambda, power, noise, beta, alpha, mu) = shared(&params)?;
            let configs: Vec<TechnologyConfig> = symmetric_configs(t, lambda, alpha, beta)
                .into_iter()
                .map(|c| TechnologyConfig {
                    power,
                    noise,
                    fading_mean_inv: mu,
                    ..c
                })
                .collect();
            cp_max_ratio_general(&configs, &quad)
        }
        "eq19" => {
            params.check_keys(formula, &["t", "beta", "beta_db", "alpha"])?;
            let alpha = params.get("alpha", 4.0)?;
            let lin = params.list("beta");
            let db = params.list("beta_db");
            let mut betas = match (lin.is_empty(), db.is_empty()) {
                (false, false) => {
                    return Err(CliError::BadArgs(
                        "give either beta or beta_db, not both".to_string(),
                    ))
                }
                (false, true) => lin,
                (true, false) => db.into_iter().map(db_to_linear).collect(),
                (true, true) => vec![1.0],
            };
            let t = params.tech_count(formula, Some(betas.len()))?;
            if betas.len() == 1 && t > 1 {
                betas = vec![betas[0]; t];
            } else if betas.len() != t {
                return Err(CliError::BadArgs(format!(
                    "t = {t} does not match the {} threshold(s) given",
                    betas.len()
                )));
            }
            cp_max_ratio_closed(&betas, alpha, &quad)
        }
        "eq20" => {
            params.check_keys(formula, &["t", "alpha"])?;
            let t = params.tech_count(formula, None)?;
            let alpha = params.get("alpha", 4.0)?;
            rate_max_ratio_closed(t, alpha, &quad)
        }
        "lemma6" => {
            params.check_keys(formula, &["x", "beta", "beta_db", "alpha"])?;
            let x = params.require(formula, "x")?;
            let beta = params.threshold("beta", "beta_db", 1.0)?;
            let alpha = params.get("alpha", 4.0)?;
            sir_coverage_given_ratio_bound(x, beta, alpha, &quad)
        }
        "phi" => {
            params.check_keys(formula, &["x", "y", "y_db", "alpha"])?;
            let x = params.require(formula, "x")?;
            let y = params.threshold("y", "y_db", 1.0)?;
            let alpha = params.get("alpha", 4.0)?;
            phi(alpha, y, x, &quad)
        }
        other => {
            return Err(CliError::BadArgs(format!(
                "unknown formula '{other}' (expected one of: {})",
                FORMULAS.join(", ")
            )))
        }
    }
    .map_err(map_library_error)?;

    println!("{}", sig9(value));
    Ok(0)
}
