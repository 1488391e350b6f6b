//! Self-checks: internal consistency of the two engines, printed as a
//! deterministic pass/fail report.
//!
//! Structural checks (closed forms against each other, the generic
//! policy evaluator against its specializations, density invariance,
//! parallel/sequential determinism) always run. Statistical checks (the
//! Monte Carlo engine against the analytic one, sampled distance laws
//! against their distributions) need enough worlds to be meaningful and
//! are skipped below 10 000 — `--quick` runs at exactly that floor.

use std::f64::consts::PI;

use cellassoc::analytic::{
    cp_max_ratio_closed, cp_max_ratio_general, cp_nearest, cp_opt_nearest,
    evaluate_policy_analytic, max_ratio_pieces, opt_nearest_pieces, sir_coverage_given_ratio_bound,
};
use cellassoc::montecarlo::ks_statistic;
use cellassoc::sampling::{sample_realization, world_sampling_rng};
use cellassoc::{
    estimate_many, policy_performance_analytic, symmetric_configs, ExecMode, Metric, Policy,
    QuadratureSpec, SamplerSpec,
};

use crate::error::CliError;

const LAMBDA: f64 = 1.0 / PI;
const SEED: u64 = 2026;
const STAT_FLOOR: u64 = 10_000;

struct Report {
    passed: usize,
    failed: usize,
    skipped: usize,
}

impl Report {
    fn new() -> Self {
        Report {
            passed: 0,
            failed: 0,
            skipped: 0,
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            self.passed += 1;
            println!("PASS {name}: {detail}");
        } else {
            self.failed += 1;
            println!("FAIL {name}: {detail}");
        }
    }

    fn skip(&mut self, name: &str, n: u64) {
        self.skipped += 1;
        println!("SKIP (insufficient samples) {name}: n = {n} < {STAT_FLOOR}");
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn run_validate(quick: bool, n_worlds_flag: Option<u64>) -> Result<i32, CliError> {
    let n = n_worlds_flag.unwrap_or(if quick { 10_000 } else { 100_000 });
    let quad = QuadratureSpec::default();
    let mut report = Report::new();

    // --- Structural checks -------------------------------------------------

    {
        let value = cp_max_ratio_closed(&[1.0], 4.0, &quad)?;
        let truth = 1.0 / (1.0 + PI / 4.0);
        let err = (value - truth).abs();
        report.check(
            "closed-form anchor",
            err <= 1e-6,
            format!("|{value:.12} - 1/(1+pi/4)| = {err:.3e}"),
        );
    }

    {
        let mut worst = 0.0f64;
        for t in [1usize, 2, 5] {
            let configs = symmetric_configs(t, LAMBDA, 4.0, 1.0);
            let betas: Vec<f64> = configs.iter().map(|c| c.beta).collect();
            let general = cp_max_ratio_general(&configs, &quad)?;
            let closed = cp_max_ratio_closed(&betas, 4.0, &quad)?;
            worst = worst.max(rel_err(general, closed));
        }
        report.check(
            "general matches closed ratio form",
            worst <= 1e-6,
            format!("worst relative error over T in {{1,2,5}} = {worst:.3e}"),
        );
    }

    {
        let configs = symmetric_configs(2, LAMBDA, 4.0, 1.0);
        let generic_opt = evaluate_policy_analytic(&opt_nearest_pieces(&configs, &quad)?, &quad)?;
        let direct_opt = cp_opt_nearest(&configs, &quad)?;
        let generic_ratio = evaluate_policy_analytic(&max_ratio_pieces(&configs, &quad)?, &quad)?;
        let betas: Vec<f64> = configs.iter().map(|c| c.beta).collect();
        let closed_ratio = cp_max_ratio_closed(&betas, 4.0, &quad)?;
        let worst = rel_err(generic_opt, direct_opt).max(rel_err(generic_ratio, closed_ratio));
        report.check(
            "generic evaluator matches specializations",
            worst <= 1e-6,
            format!("worst relative error = {worst:.3e}"),
        );
    }

    {
        let kernel = sir_coverage_given_ratio_bound(1.0, 1.0, 4.0, &quad)?;
        let closed = cp_max_ratio_closed(&[1.0], 4.0, &quad)?;
        let err = (kernel - closed).abs();
        report.check(
            "ratio-law kernel at the boundary",
            err <= 1e-12,
            format!("|kernel(1) - closed T=1| = {err:.3e}"),
        );
    }

    {
        let a = cp_nearest(&symmetric_configs(2, LAMBDA, 4.0, 1.0), &quad)?;
        let b = cp_nearest(&symmetric_configs(2, 4.0 * LAMBDA, 4.0, 1.0), &quad)?;
        let err = rel_err(a, b);
        report.check(
            "density invariance (no noise)",
            err <= 1e-6,
            format!("relative change under density x4 = {err:.3e}"),
        );
    }

    {
        let configs = symmetric_configs(2, LAMBDA, 4.0, 1.0);
        let policies = [Policy::Nearest, Policy::MaxRatio];
        let sampler = SamplerSpec::new(SEED);
        let par = estimate_many(
            &policies,
            Metric::Coverage,
            &configs,
            &sampler,
            10_000,
            &quad,
            ExecMode::Parallel,
        )?;
        let seq = estimate_many(
            &policies,
            Metric::Coverage,
            &configs,
            &sampler,
            10_000,
            &quad,
            ExecMode::Sequential,
        )?;
        let exact = par
            .iter()
            .zip(&seq)
            .all(|(p, s)| p.value.to_bits() == s.value.to_bits() && p.n_worlds == s.n_worlds);
        report.check(
            "parallel/sequential determinism",
            exact,
            if exact {
                "bit-identical estimates over 10000 worlds".to_string()
            } else {
                format!("estimates differ: parallel {par:?} vs sequential {seq:?}")
            },
        );
    }

    // --- Statistical checks -------------------------------------------------

    if n < STAT_FLOOR {
        report.skip("monte carlo brackets analytic", n);
        report.skip("sampled distance laws", n);
    } else {
        let policies = [
            Policy::Nearest,
            Policy::Random,
            Policy::MaxRatio,
            Policy::OptCoverage { k: 2 },
        ];
        let sampler = SamplerSpec::new(SEED);
        let mut worst_sigmas = 0.0f64;
        for beta_db in [-5.0, 0.0, 5.0] {
            let beta = 10f64.powf(beta_db / 10.0);
            let configs = symmetric_configs(2, LAMBDA, 4.0, beta);
            let estimates = estimate_many(
                &policies,
                Metric::Coverage,
                &configs,
                &sampler,
                n,
                &quad,
                ExecMode::Parallel,
            )?;
            for (policy, est) in policies.iter().zip(&estimates) {
                let truth = policy_performance_analytic(policy, Metric::Coverage, &configs, &quad)?;
                let se = est.half_width_95 / 1.959963984540054;
                worst_sigmas = worst_sigmas.max((est.value - truth).abs() / se);
            }
        }
        report.check(
            "monte carlo brackets analytic",
            worst_sigmas <= 4.0,
            format!("worst deviation over 12 policy/threshold cells = {worst_sigmas:.2} SE"),
        );

        let configs = symmetric_configs(1, LAMBDA, 4.0, 1.0);
        let mut serving = Vec::with_capacity(n as usize);
        let mut ratios = Vec::with_capacity(n as usize);
        for w in 0..n {
            let mut rng = world_sampling_rng(SEED, w);
            let world = sample_realization(&configs, &sampler, &mut rng)?;
            let d = &world.per_tech[0].distances;
            serving.push(d[0]);
            ratios.push(d[1] / d[0]);
        }
        let ks_serving = ks_statistic(&serving, |r| {
            if r <= 0.0 {
                0.0
            } else {
                1.0 - (-PI * LAMBDA * r * r).exp()
            }
        })?;
        let ks_ratio = ks_statistic(&ratios, |x| {
            cellassoc::analytic::cdf_max_ratio(x.max(1.0)).expect("ratio support")
        })?;
        let threshold = (2.0 / (n as f64).sqrt()).max(0.01);
        let worst = ks_serving.max(ks_ratio);
        report.check(
            "sampled distance laws",
            worst <= threshold,
            format!(
                "KS serving = {ks_serving:.4}, KS ratio = {ks_ratio:.4}, threshold = {threshold:.4}"
            ),
        );
    }

    println!(
        "{} passed, {} failed, {} skipped",
        report.passed, report.failed, report.skipped
    );
    Ok(if report.failed > 0 { 1 } else { 0 })
}
