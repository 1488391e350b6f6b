//! Cross-validation of the two evaluation paths on shared scenarios.
//!
//! The Monte Carlo engine and the direct expressions are developed
//! independently (different derivations, different code); these tests treat
//! each as the other's oracle. Statistical assertions are calibrated so a
//! correct implementation passes deterministically under the fixed seeds
//! while a systematic bias of even a fraction of a confidence interval
//! fails reliably.

use cellassoc::analytic::performance::policy_performance_analytic;
use cellassoc::analytic::quadrature::QuadratureSpec;
use cellassoc::montecarlo::{agreement_rate, estimate, estimate_many};
use cellassoc::{symmetric_configs, ExecMode, Metric, Policy, SamplerSpec, TechnologyConfig};

const INV_PI: f64 = std::f64::consts::FRAC_1_PI;
const DB_M5: f64 = 0.3162277660168379;
const DB_P5: f64 = 3.1622776601683795;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// The 95% interval of an unbiased estimator covers the true value for
/// ~95% of seeds. Requiring ≥ 17 of 20 keeps the deterministic test far
/// from the boundary in both directions: P[X ≤ 16 | p = 0.95] ≈ 0.003,
/// while any real bias ≳ one interval width drives the count toward zero.
fn coverage_hits(
    policy: Policy,
    metric: Metric,
    configs: &[TechnologyConfig],
    truth: f64,
    n_worlds: u64,
) -> usize {
    (0..20u64)
        .filter(|&seed| {
            let sampler = SamplerSpec::new(1000 + seed);
            let est = estimate(
                &policy,
                metric,
                configs,
                &sampler,
                n_worlds,
                &quad(),
                ExecMode::Parallel,
            )
            .unwrap();
            (est.value - truth).abs() <= est.half_width_95
        })
        .count()
}

#[test]
fn monte_carlo_brackets_analytic_coverage() {
    let combos: Vec<(Policy, Vec<TechnologyConfig>)> = vec![
        (Policy::Nearest, symmetric_configs(2, INV_PI, 4.0, 1.0)),
        (Policy::Random, symmetric_configs(3, INV_PI, 4.0, DB_P5)),
        (Policy::MaxRatio, symmetric_configs(3, INV_PI, 4.0, 1.0)),
        (
            Policy::OptCoverage { k: 1 },
            symmetric_configs(2, INV_PI, 4.0, DB_M5),
        ),
        (
            Policy::OptCoverage { k: 2 },
            symmetric_configs(2, INV_PI, 4.0, 1.0),
        ),
    ];
    for (policy, configs) in combos {
        let truth =
            policy_performance_analytic(&policy, Metric::Coverage, &configs, &quad()).unwrap();
        let hits = coverage_hits(policy, Metric::Coverage, &configs, truth, 4000);
        assert!(
            hits >= 17,
            "{policy}: analytic {truth} inside the 95% CI for only {hits}/20 seeds"
        );
    }
}

#[test]
fn monte_carlo_brackets_analytic_rate() {
    for policy in [Policy::Nearest, Policy::MaxRatio, Policy::Random] {
        let configs = symmetric_configs(2, INV_PI, 4.0, 1.0);
        let truth = policy_performance_analytic(&policy, Metric::Rate, &configs, &quad()).unwrap();
        let hits = coverage_hits(policy, Metric::Rate, &configs, truth, 4000);
        assert!(
            hits >= 17,
            "{policy}: analytic rate {truth} inside the 95% CI for only {hits}/20 seeds"
        );
    }
}

#[test]
fn monte_carlo_brackets_analytic_with_noise() {
    // Exercises the noise branch of the serving-distance integrals, which
    // has no closed form and runs through the normalized quadrature.
    let mut configs = symmetric_configs(2, INV_PI, 4.0, 1.0);
    for c in &mut configs {
        c.noise = 0.3;
    }
    for (policy, metric) in [
        (Policy::Nearest, Metric::Coverage),
        (Policy::MaxRatio, Metric::Coverage),
        (Policy::Nearest, Metric::Rate),
    ] {
        let truth = policy_performance_analytic(&policy, metric, &configs, &quad()).unwrap();
        let hits = coverage_hits(policy, metric, &configs, truth, 4000);
        assert!(
            hits >= 17,
            "{policy}/{metric} with noise: {truth} inside the CI for {hits}/20 seeds"
        );
    }
}

#[test]
fn density_rescaling_is_pathwise_exact_without_noise() {
    // Scaling every λ by 4 scales every sampled distance by exactly 1/2
    // (the squared-distance gaps are exponentials divided by πλ, and
    // scaling by a power of two commutes with every rounding step), so at
    // N₀ = 0 each world's SIR — and hence the whole estimate — is
    // bit-identical, not merely statistically close.
    let base = symmetric_configs(3, INV_PI, 4.0, 1.0);
    let scaled = symmetric_configs(3, 4.0 * INV_PI, 4.0, 1.0);
    let sampler = SamplerSpec::new(7);
    for metric in [Metric::Coverage, Metric::Rate] {
        let policies = [Policy::Nearest, Policy::MaxRatio, Policy::Random];
        let a = estimate_many(
            &policies,
            metric,
            &base,
            &sampler,
            5000,
            &quad(),
            ExecMode::Parallel,
        )
        .unwrap();
        let b = estimate_many(
            &policies,
            metric,
            &scaled,
            &sampler,
            5000,
            &quad(),
            ExecMode::Parallel,
        )
        .unwrap();
        assert_eq!(a, b, "λ-rescaling changed a {metric} estimate");
    }
}

#[test]
fn truncation_level_does_not_move_estimates() {
    // With the Campbell tail correction, quadrupling the number of sampled
    // stations must not shift coverage beyond ordinary seed noise. A broken
    // tail term shows up as a shift of several interval widths.
    let configs = symmetric_configs(2, INV_PI, 4.0, 1.0);
    let mut coarse_sampler = SamplerSpec::new(21);
    coarse_sampler.bs_count = 16;
    let fine_sampler = SamplerSpec::new(22);
    let coarse = estimate(
        &Policy::Nearest,
        Metric::Coverage,
        &configs,
        &coarse_sampler,
        20_000,
        &quad(),
        ExecMode::Parallel,
    )
    .unwrap();
    let fine = estimate(
        &Policy::Nearest,
        Metric::Coverage,
        &configs,
        &fine_sampler,
        20_000,
        &quad(),
        ExecMode::Parallel,
    )
    .unwrap();
    let slack = 2.0
        * (coarse.half_width_95 * coarse.half_width_95 + fine.half_width_95 * fine.half_width_95)
            .sqrt();
    assert!(
        (coarse.value - fine.value).abs() < slack,
        "J=16 gave {}, J=64 gave {} (slack {slack})",
        coarse.value,
        fine.value
    );
}

#[test]
fn nearest_and_depth_one_optimal_coincide_for_identical_parameters() {
    // With identical parameters the depth-1 optimal score is a strictly
    // decreasing function of the serving distance, so the two policies make
    // the same choice on every realization — agreement exactly 1.
    let configs = symmetric_configs(3, INV_PI, 4.0, 1.0);
    let a = agreement_rate(
        &Policy::Nearest,
        &Policy::OptCoverage { k: 1 },
        &configs,
        &SamplerSpec::new(33),
        10_000,
        &quad(),
        ExecMode::Parallel,
    )
    .unwrap();
    assert_eq!(a.value, 1.0, "agreement {} below certainty", a.value);
}

#[test]
fn max_ratio_approaches_depth_two_optimal_as_alpha_grows() {
    let quad = quad();
    let rate_at = |alpha: f64| {
        let configs = symmetric_configs(2, INV_PI, alpha, 1.0);
        agreement_rate(
            &Policy::MaxRatio,
            &Policy::OptCoverage { k: 2 },
            &configs,
            &SamplerSpec::new(44),
            4000,
            &quad,
            ExecMode::Parallel,
        )
        .unwrap()
        .value
    };
    let low = rate_at(3.0);
    let high = rate_at(10.0);
    assert!(
        high > low + 0.02,
        "agreement should rise with α: {low} at α=3 vs {high} at α=10"
    );
    assert!(high > 0.9, "agreement at α=10 is only {high}");
}
