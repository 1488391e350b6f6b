//! Unconditional policy performance by direct numerical evaluation — the
//! deterministic counterpart of the Monte Carlo engine.
//!
//! Every expression here has the same shape: condition on which technology
//! the policy picks and on the observation it picked it with, multiply the
//! conditional coverage kernel by the observation density and by the
//! competing technologies' score CDFs (the probability that every other
//! technology scored lower), and integrate. For the specific policies this
//! collapses to one- or two-level quadratures:
//!
//! * nearest / random — condition on the serving distance r₁; competition
//!   (nearest) is the product of the rivals' void probabilities e^{−πλ_j r²}.
//! * max-ratio — condition on the winning ratio t = r₂/r₁; the ratio law
//!   F(t) = 1 − t^{−2} is parameter-free, so competition is (1−t^{−2})^{T−1}
//!   for every mix of technologies.
//! * information-optimal — condition on the observation, score = conditional
//!   coverage itself; competition is the score CDF from [`crate::analytic`]'s
//!   law module.
//!
//! Technologies with identical parameters contribute identical integrals, so
//! every T-fold sum is grouped by distinct parameter sets first: symmetric
//! networks (the common sweep) cost one integral regardless of T.
//!
//! Tolerance discipline: the caller's [`QuadratureSpec`] applies to the
//! outermost integral; each nesting level below runs 10× tighter so the
//! reported value honours the caller's tolerance rather than compounding
//! inner error.

use std::f64::consts::PI;

use crate::analytic::kernels::{
    check_common, cp_given_r1, cp_given_r1_r2, interference_integral, pow_pos,
    rate_from_coverage,
};
use crate::analytic::laws::{
    cdf_max_ratio, cdf_opt_coverage_two, cdf_opt_nearest, sir_coverage_given_ratio_bound,
};
use crate::analytic::quadrature::{integrate, QuadratureSpec};
use crate::core::{validate_configs, Metric, TechnologyConfig};
use crate::error::{Error, Result};
use crate::policies::Policy;

/// Group indices whose keys compare equal: returns (representative index,
/// multiplicity). Quadratic in T, which never exceeds a dozen here.
fn group_by_key<K: PartialEq>(keys: &[K]) -> Vec<(usize, usize)> {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    'outer: for (i, k) in keys.iter().enumerate() {
        for g in groups.iter_mut() {
            if keys[g.0] == *k {
                g.1 += 1;
                continue 'outer;
            }
        }
        groups.push((i, 1));
    }
    groups
}

/// Like [`group_by_key`] but summing a per-index weight (bandwidths, for
/// rate sums) instead of counting.
fn group_by_key_weighted<K: PartialEq>(keys: &[K], weights: &[f64]) -> Vec<(usize, f64)> {
    let mut groups: Vec<(usize, f64)> = Vec::new();
    'outer: for (i, k) in keys.iter().enumerate() {
        for g in groups.iter_mut() {
            if keys[g.0] == *k {
                g.1 += weights[i];
                continue 'outer;
            }
        }
        groups.push((i, weights[i]));
    }
    groups
}

/// Parameters that determine a technology's SINR law (everything except id
/// and bandwidth), as exactly comparable bits.
fn sinr_key(c: &TechnologyConfig) -> [u64; 6] {
    [
        c.lambda.to_bits(),
        c.power.to_bits(),
        c.noise.to_bits(),
        c.beta.to_bits(),
        c.alpha.to_bits(),
        c.fading_mean_inv.to_bits(),
    ]
}

fn require_interference_limited(configs: &[TechnologyConfig], what: &str) -> Result<()> {
    if configs.iter().any(|c| c.noise != 0.0) {
        return Err(Error::Unsupported(format!(
            "{what} is only available in the interference-limited regime (all N0 = 0); \
             use the Monte Carlo engine for noisy networks"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Ratio-conditioned building block
// ---------------------------------------------------------------------------

/// Coverage probability conditioned on the distance ratio r₂/r₁ = t of one
/// technology (t ≥ 1), marginalized over the absolute scale r₁.
///
/// Conditioned on the ratio, the serving distance keeps the density
/// f(u | t) = 2(πλ)²·u³·t⁴·e^{−πλ(ut)²} (the joint law of the two nearest
/// distances restricted to the ray r₂ = u·t, normalized by the ratio
/// marginal 2/t³). The conditional kernel factors as
///
/// ```text
/// cp(u, u·t) = 1/(1+β·t^{−α}) · e^{−μβN₀u^α/P} · e^{−2πλu²·Jint(t)}
/// ```
///
/// and `Jint(t)` depends on the ratio only, so it is hoisted out of the
/// u-integral. Substituting z = u·√(πλ(t² + 2·Jint)) gives the exact value
/// known·t⁴/(t² + 2·Jint)² without noise (the Γ(2) identity), and with
/// noise a unit-scale quadrature of 2z³e^{−z²} times the noise factor. The
/// normalization matters: the raw u-integrand is a spike at scale
/// 1/√(πλ·Jint) that large thresholds push below the innermost node of the
/// first quadrature panel, which would then read ≈ 0 with ≈ 0 error
/// estimate. In the interference-limited case the value is independent of
/// λ, a property the tests pin down.
pub fn cp_cond_ratio(
    t: f64,
    lambda: f64,
    p: f64,
    n0: f64,
    beta: f64,
    alpha: f64,
    mu: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_common(lambda, p, n0, beta, alpha, mu)?;
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::invalid(
            "t",
            format!("distance ratio must be finite and ≥ 1 (got {t})"),
        ));
    }
    let jint = interference_integral(t, beta, alpha, &spec.tighter(10.0))?;
    let known = 1.0 / (1.0 + beta * pow_pos(1.0 / t, alpha));
    let t2 = t * t;
    let denom = t2 + 2.0 * jint;
    let scale = known * t2 * t2 / (denom * denom);
    if n0 == 0.0 {
        return Ok(scale);
    }
    let root = (PI * lambda * denom).sqrt();
    let noise_coeff = mu * beta * n0 / p;
    integrate(
        |z| {
            let z2 = z * z;
            let noise = (-noise_coeff * pow_pos(z / root, alpha)).exp();
            Ok(2.0 * z2 * z * (-z2).exp() * noise)
        },
        0.0,
        f64::INFINITY,
        spec,
        "ratio-conditioned coverage",
    )
    .map(|v| scale * v)
}

// ---------------------------------------------------------------------------
// Max-ratio policy
// ---------------------------------------------------------------------------

/// Coverage probability of the max-ratio policy for any technology mix,
/// noise included: condition on the winning ratio t, whose law is the same
/// for every technology (f(t) = 2t^{−3}, F(t) = 1 − t^{−2}, λ-free), so
///
/// ```text
/// P = Σ_i 2·∫_{t≥1} cp_cond_ratio_i(t) · t^{−3} · (1−t^{−2})^{T−1} dt
/// ```
pub fn cp_max_ratio_general(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    let competition = configs.len() as i32 - 1;
    let inner = spec.tighter(10.0);
    let keys: Vec<_> = configs.iter().map(sinr_key).collect();
    let mut total = 0.0;
    for (rep, count) in group_by_key(&keys) {
        let c = &configs[rep];
        let term = integrate(
            |t| {
                let cp = cp_cond_ratio(
                    t,
                    c.lambda,
                    c.power,
                    c.noise,
                    c.beta,
                    c.alpha,
                    c.fading_mean_inv,
                    &inner,
                )?;
                let t2 = t * t;
                Ok(2.0 * cp * (1.0 - 1.0 / t2).powi(competition) / (t2 * t))
            },
            1.0,
            f64::INFINITY,
            spec,
            "max-ratio coverage",
        )?;
        total += count as f64 * term;
    }
    Ok(total)
}

/// Average rate of the max-ratio policy, noise included: the same ratio
/// decomposition with the threshold integral run inside, and each
/// technology's term weighted by its bandwidth.
pub fn rate_max_ratio_general(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    let competition = configs.len() as i32 - 1;
    let inner = spec.tighter(10.0);
    let kernel_spec = inner.tighter(10.0);
    let keys: Vec<_> = configs.iter().map(sinr_key).collect();
    let bandwidths: Vec<_> = configs.iter().map(|c| c.bandwidth).collect();
    let mut total = 0.0;
    for (rep, weight) in group_by_key_weighted(&keys, &bandwidths) {
        let c = &configs[rep];
        let term = integrate(
            |t| {
                let rate = rate_from_coverage(
                    |beta| {
                        cp_cond_ratio(
                            t,
                            c.lambda,
                            c.power,
                            c.noise,
                            beta,
                            c.alpha,
                            c.fading_mean_inv,
                            &kernel_spec,
                        )
                    },
                    &inner,
                )?;
                let t2 = t * t;
                Ok(2.0 * rate * (1.0 - 1.0 / t2).powi(competition) / (t2 * t))
            },
            1.0,
            f64::INFINITY,
            spec,
            "max-ratio rate",
        )?;
        total += weight * term;
    }
    Ok(total)
}

/// Interference-limited closed form for max-ratio coverage with a shared
/// path-loss exponent: conditioning on the *inverse* winning ratio
/// x = r₁/r₂ ∈ (0,1], whose per-winner density is 2(T−1)x³(1−x²)^{T−2},
/// the conditional coverage is the φ-kernel expression
/// 1/(1+β^{2/α}φ(α,β,x)) and
///
/// ```text
/// P = Σ_i ∫₀¹ 2(T−1)·x³·(1−x²)^{T−2} / (1 + β_i^{2/α}·φ(α, β_i, x)) dx
/// ```
///
/// (for T = 1 the point value at x = 1). Valid for arbitrary per-technology
/// densities, powers and fading scales — none of them survive in the SIR
/// distribution — but requires N₀ = 0 and a common α. Agreement with
/// [`cp_max_ratio_general`] is a test invariant.
pub fn cp_max_ratio_closed(
    beta_list: &[f64],
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if beta_list.is_empty() {
        return Err(Error::invalid("beta_list", "need at least one threshold"));
    }
    for &b in beta_list {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::invalid(
                "beta_list",
                format!("thresholds must be finite and > 0 (got {b})"),
            ));
        }
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("need α > 2 (got {alpha})")));
    }
    let t_count = beta_list.len();
    let inner = spec.tighter(10.0);
    if t_count == 1 {
        return sir_coverage_given_ratio_bound(1.0, beta_list[0], alpha, &inner);
    }
    let keys: Vec<_> = beta_list.iter().map(|b| b.to_bits()).collect();
    let scale = 2.0 * (t_count as f64 - 1.0);
    let mut total = 0.0;
    for (rep, count) in group_by_key(&keys) {
        let beta = beta_list[rep];
        let term = integrate(
            |x| {
                let x2 = x * x;
                let cov = sir_coverage_given_ratio_bound(x, beta, alpha, &inner)?;
                Ok(scale * x2 * x * (1.0 - x2).powi(t_count as i32 - 2) * cov)
            },
            0.0,
            1.0,
            spec,
            "max-ratio coverage (closed form)",
        )?;
        total += count as f64 * term;
    }
    Ok(total)
}

/// Interference-limited closed form for max-ratio average rate with a
/// shared α and unit bandwidths: the threshold never enters a rate, so the
/// only parameter left is T. Returns T times the per-technology term.
pub fn rate_max_ratio_closed(t_count: usize, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    if t_count == 0 {
        return Err(Error::invalid("t_count", "need at least one technology"));
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("need α > 2 (got {alpha})")));
    }
    let inner = spec.tighter(10.0);
    let phi_spec = inner.tighter(10.0);
    if t_count == 1 {
        return rate_from_coverage(
            |beta| sir_coverage_given_ratio_bound(1.0, beta, alpha, &phi_spec),
            spec,
        );
    }
    let scale = 2.0 * (t_count * (t_count - 1)) as f64;
    integrate(
        |x| {
            let rate = rate_from_coverage(
                |beta| sir_coverage_given_ratio_bound(x, beta, alpha, &phi_spec),
                &inner,
            )?;
            let x2 = x * x;
            Ok(scale * x2 * x * (1.0 - x2).powi(t_count as i32 - 2) * rate)
        },
        0.0,
        1.0,
        spec,
        "max-ratio rate (closed form)",
    )
}

// ---------------------------------------------------------------------------
// Nearest and random policies
// ---------------------------------------------------------------------------

/// Shared r₁-conditioned integral for the nearest/random family: tech i's
/// serving-distance density 2πλᵢr·e^{−πλᵢr²} times its conditional kernel,
/// times e^{−π·λ_rivals·r²} (void probability of every rival's disc — the
/// nearest-policy competition; zero rivals for the random policy).
///
/// Without noise the integral is exactly πλᵢ/decay. With noise the
/// substitution z = r·√decay keeps the Rayleigh spike at z = O(1) for
/// every threshold; integrating over r directly, a large β shrinks the
/// spike below the innermost node of the first quadrature panel and the
/// integral silently reads zero.
fn r1_conditioned_term(
    c: &TechnologyConfig,
    beta: f64,
    lambda_rivals: f64,
    jint: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let pl = PI * c.lambda;
    let decay = PI * (c.lambda + lambda_rivals) + 2.0 * pl * jint;
    if c.noise == 0.0 {
        return Ok(pl / decay);
    }
    let root = decay.sqrt();
    let noise_coeff = c.fading_mean_inv * beta * c.noise / c.power;
    integrate(
        |z| {
            let noise = (-noise_coeff * pow_pos(z / root, c.alpha)).exp();
            Ok(2.0 * z * (-z * z).exp() * noise)
        },
        0.0,
        f64::INFINITY,
        spec,
        "serving-distance integral",
    )
    .map(|v| v * pl / decay)
}

/// Coverage probability of the nearest policy (noise allowed): the chosen
/// technology is the one whose nearest station is closest, so tech i wins
/// on the event that every rival's disc of radius r is empty.
pub fn cp_nearest(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    let lambda_total: f64 = configs.iter().map(|c| c.lambda).sum();
    let inner = spec.tighter(10.0);
    let keys: Vec<_> = configs.iter().map(sinr_key).collect();
    let mut total = 0.0;
    for (rep, count) in group_by_key(&keys) {
        let c = &configs[rep];
        let jint = interference_integral(1.0, c.beta, c.alpha, &inner)?;
        let term = r1_conditioned_term(c, c.beta, lambda_total - c.lambda, jint, spec)?;
        total += count as f64 * term;
    }
    Ok(total)
}

/// Average rate of the nearest policy (noise allowed). The threshold
/// integral runs outermost so the interference integral — the only
/// expensive piece — is evaluated once per threshold, not once per
/// (threshold, distance) pair.
pub fn rate_nearest(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    let lambda_total: f64 = configs.iter().map(|c| c.lambda).sum();
    let inner = spec.tighter(10.0);
    let jint_spec = inner.tighter(10.0);
    let keys: Vec<_> = configs.iter().map(sinr_key).collect();
    let bandwidths: Vec<_> = configs.iter().map(|c| c.bandwidth).collect();
    let mut total = 0.0;
    for (rep, weight) in group_by_key_weighted(&keys, &bandwidths) {
        let c = &configs[rep];
        let term = rate_from_coverage(
            |beta| {
                let jint = interference_integral(1.0, beta, c.alpha, &jint_spec)?;
                r1_conditioned_term(c, beta, lambda_total - c.lambda, jint, &inner)
            },
            spec,
        )?;
        total += weight * term;
    }
    Ok(total)
}

/// Coverage probability of the random policy (noise allowed): a uniformly
/// chosen technology, no competition factor, averaged with weight 1/T.
pub fn cp_random(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    let inner = spec.tighter(10.0);
    let keys: Vec<_> = configs.iter().map(sinr_key).collect();
    let mut total = 0.0;
    for (rep, count) in group_by_key(&keys) {
        let c = &configs[rep];
        let jint = interference_integral(1.0, c.beta, c.alpha, &inner)?;
        total += count as f64 * r1_conditioned_term(c, c.beta, 0.0, jint, spec)?;
    }
    Ok(total / configs.len() as f64)
}

/// Average rate of the random policy (noise allowed).
pub fn rate_random(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    let inner = spec.tighter(10.0);
    let jint_spec = inner.tighter(10.0);
    let keys: Vec<_> = configs.iter().map(sinr_key).collect();
    let bandwidths: Vec<_> = configs.iter().map(|c| c.bandwidth).collect();
    let mut total = 0.0;
    for (rep, weight) in group_by_key_weighted(&keys, &bandwidths) {
        let c = &configs[rep];
        let term = rate_from_coverage(
            |beta| {
                let jint = interference_integral(1.0, beta, c.alpha, &jint_spec)?;
                r1_conditioned_term(c, beta, 0.0, jint, &inner)
            },
            spec,
        )?;
        total += weight * term;
    }
    Ok(total / configs.len() as f64)
}

// ---------------------------------------------------------------------------
// Information-optimal policies
// ---------------------------------------------------------------------------

/// Coverage probability of the depth-1 information-optimal policy
/// (interference-limited only): scores are cpᵢ(r) = e^{−2πλᵢr²·Jintᵢ},
/// whose CDFs are the power laws y^{1/(2·Jint_j)}, so the competition
/// product folds into the exponent of a single Rayleigh-type integral per
/// technology:
///
/// ```text
/// P = Σ_i ∫₀^∞ 2πλᵢ·r·exp(−πλᵢr²·[1 + 2Jintᵢ + Jintᵢ·Σ_{j≠i} 1/Jint_j]) dr
/// ```
///
/// Each Rayleigh integral there evaluates in closed form (∫₀^∞ 2πλr·
/// e^{−πλDr²} dr = 1/D), so no quadrature beyond the interference
/// integrals is needed — and the density λᵢ cancels out of its own term.
pub fn cp_opt_nearest(configs: &[TechnologyConfig], spec: &QuadratureSpec) -> Result<f64> {
    validate_configs(configs)?;
    require_interference_limited(configs, "the depth-1 optimal coverage expression")?;
    let inner = spec.tighter(10.0);
    let jints = configs
        .iter()
        .map(|c| interference_integral(1.0, c.beta, c.alpha, &inner))
        .collect::<Result<Vec<_>>>()?;
    let inv_sum: f64 = jints.iter().map(|j| 1.0 / j).sum();
    let mut total = 0.0;
    for &ji in &jints {
        total += 1.0 / (1.0 + 2.0 * ji + ji * (inv_sum - 1.0 / ji));
    }
    Ok(total)
}

/// Coverage probability of the depth-2 information-optimal policy
/// (interference-limited only). The policy's coverage *is* the expectation
/// of its own maximal score — the score of technology i equals its
/// conditional coverage — so with the per-technology score CDFs F₂ᵢ:
///
/// ```text
/// P = E[max_i Sᵢ] = ∫₀¹ (1 − Π_i F₂ᵢ(y)) dy = 1 − ∫₀¹ Π_i F₂ᵢ(y) dy.
/// ```
pub fn cp_opt_two_distances(
    configs: &[TechnologyConfig],
    spec: &QuadratureSpec,
) -> Result<f64> {
    validate_configs(configs)?;
    require_interference_limited(configs, "the depth-2 optimal coverage expression")?;
    let inner = spec.tighter(10.0);
    let keys: Vec<_> = configs
        .iter()
        .map(|c| [c.beta.to_bits(), c.alpha.to_bits()])
        .collect();
    let groups = group_by_key(&keys);
    let integral = integrate(
        |y| {
            let mut prod = 1.0;
            for &(rep, count) in &groups {
                let f = cdf_opt_coverage_two(y, configs[rep].beta, configs[rep].alpha, &inner)?;
                if f == 0.0 {
                    return Ok(0.0);
                }
                prod *= f.powi(count as i32);
            }
            Ok(prod)
        },
        0.0,
        1.0,
        spec,
        "optimal depth-2 coverage",
    )?;
    Ok(1.0 - integral)
}

// ---------------------------------------------------------------------------
// Generic score-policy evaluator
// ---------------------------------------------------------------------------

/// Integration range of one observation coordinate (upper bound may be ∞).
#[derive(Debug, Clone, Copy)]
pub struct Dim {
    pub lo: f64,
    pub hi: f64,
}

/// Everything the generic evaluator needs to know about one technology
/// under a score-based policy: the observation's coordinate ranges and
/// density, the policy's score on that observation, the conditional
/// coverage kernel, and the unconditional CDF of the technology's score
/// (the competition law).
pub struct TechPieces<'a> {
    pub dims: Vec<Dim>,
    pub density: Box<dyn Fn(&[f64]) -> Result<f64> + 'a>,
    pub score: Box<dyn Fn(&[f64]) -> Result<f64> + 'a>,
    pub kernel: Box<dyn Fn(&[f64]) -> Result<f64> + 'a>,
    pub score_cdf: Box<dyn Fn(f64) -> Result<f64> + 'a>,
}

/// Performance of an argmax-score policy assembled from per-technology
/// pieces:
///
/// ```text
/// P = Σ_i ∫ kernel_i(obs) · density_i(obs) · Π_{j≠i} F_j(score_i(obs)) d obs
/// ```
///
/// Observations of one or two coordinates are integrated directly (the
/// inner coordinate 10× tighter); higher-dimensional observations have no
/// product-quadrature here and return [`Error::Unsupported`].
pub fn evaluate_policy_analytic(
    techs: &[TechPieces<'_>],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if techs.is_empty() {
        return Err(Error::invalid("techs", "need at least one technology"));
    }
    for tp in techs {
        let l = tp.dims.len();
        if l == 0 || l > 2 {
            return Err(Error::Unsupported(format!(
                "observation dimension L = {l} is not implemented (supported: L ∈ {{1, 2}})"
            )));
        }
    }
    let inner = spec.tighter(10.0);
    let mut total = 0.0;
    for (i, tp) in techs.iter().enumerate() {
        let weigh = |point: &[f64]| -> Result<f64> {
            let density = (tp.density)(point)?;
            if density == 0.0 {
                return Ok(0.0); // far tail: skip the kernel's quadrature
            }
            let mut value = density * (tp.kernel)(point)?;
            if techs.len() > 1 {
                let score = (tp.score)(point)?;
                for (j, other) in techs.iter().enumerate() {
                    if j != i {
                        value *= (other.score_cdf)(score)?;
                    }
                }
            }
            Ok(value)
        };
        total += match tp.dims.len() {
            1 => integrate(
                |a| weigh(&[a]),
                tp.dims[0].lo,
                tp.dims[0].hi,
                spec,
                "policy performance (observation integral)",
            )?,
            _ => integrate(
                |a| {
                    integrate(
                        |b| weigh(&[a, b]),
                        tp.dims[1].lo,
                        tp.dims[1].hi,
                        &inner,
                        "policy performance (inner coordinate)",
                    )
                },
                tp.dims[0].lo,
                tp.dims[0].hi,
                spec,
                "policy performance (outer coordinate)",
            )?,
        };
    }
    Ok(total)
}

/// Pieces for the depth-1 information-optimal policy, built from the public
/// kernels and laws (observation: serving distance; score = conditional
/// coverage; competition = the nearest-score power law). Interference-
/// limited only. Deliberately *not* the algebraic shortcut used by
/// [`cp_opt_nearest`] — agreement between the two is a cross-validation.
pub fn opt_nearest_pieces(
    configs: &[TechnologyConfig],
    spec: &QuadratureSpec,
) -> Result<Vec<TechPieces<'static>>> {
    validate_configs(configs)?;
    require_interference_limited(configs, "the depth-1 optimal score law")?;
    let kernel_spec = spec.tighter(100.0);
    let cdf_spec = spec.tighter(10.0);
    configs
        .iter()
        .map(|c| {
            let (lambda, power, beta, alpha, mu) =
                (c.lambda, c.power, c.beta, c.alpha, c.fading_mean_inv);
            let cp = move |point: &[f64]| {
                cp_given_r1(point[0], lambda, power, 0.0, beta, alpha, mu, &kernel_spec)
            };
            Ok(TechPieces {
                dims: vec![Dim {
                    lo: 0.0,
                    hi: f64::INFINITY,
                }],
                density: Box::new(move |point: &[f64]| {
                    let r = point[0];
                    Ok(2.0 * PI * lambda * r * (-PI * lambda * r * r).exp())
                }),
                score: Box::new(cp),
                kernel: Box::new(cp),
                score_cdf: Box::new(move |y: f64| {
                    if y <= 0.0 {
                        Ok(0.0)
                    } else if y >= 1.0 {
                        Ok(1.0)
                    } else {
                        cdf_opt_nearest(y, beta, alpha, &cdf_spec)
                    }
                }),
            })
        })
        .collect()
}

/// Pieces for the max-ratio policy (noise allowed): observation is the pair
/// (serving distance, ratio) with joint density (2πλ)²u³v·e^{−πλ(uv)²} on
/// u > 0, v > 1; the score is the ratio itself with the parameter-free
/// Pareto competition law.
pub fn max_ratio_pieces(
    configs: &[TechnologyConfig],
    spec: &QuadratureSpec,
) -> Result<Vec<TechPieces<'static>>> {
    validate_configs(configs)?;
    let kernel_spec = spec.tighter(100.0);
    configs
        .iter()
        .map(|c| {
            let (lambda, power, noise, beta, alpha, mu) = (
                c.lambda,
                c.power,
                c.noise,
                c.beta,
                c.alpha,
                c.fading_mean_inv,
            );
            Ok(TechPieces {
                dims: vec![
                    Dim {
                        lo: 0.0,
                        hi: f64::INFINITY,
                    },
                    Dim {
                        lo: 1.0,
                        hi: f64::INFINITY,
                    },
                ],
                density: Box::new(move |point: &[f64]| {
                    let (u, v) = (point[0], point[1]);
                    let tp = 2.0 * PI * lambda;
                    let uv = u * v;
                    Ok(tp * tp * u * u * u * v * (-PI * lambda * uv * uv).exp())
                }),
                score: Box::new(|point: &[f64]| Ok(point[1])),
                kernel: Box::new(move |point: &[f64]| {
                    let (u, v) = (point[0], point[1]);
                    cp_given_r1_r2(u, u * v, lambda, power, noise, beta, alpha, mu, &kernel_spec)
                }),
                score_cdf: Box::new(|y: f64| if y < 1.0 { Ok(0.0) } else { cdf_max_ratio(y) }),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Direct numerical evaluation of a policy's performance, routed to the
/// fastest expression that covers the network's parameters: closed
/// interference-limited forms when every N₀ is zero and α is shared, the
/// general ratio/distance decompositions otherwise. Combinations with no
/// implemented expression (optimal-rate policies, optimal coverage beyond
/// depth 2, rate under optimal policies) return [`Error::Unsupported`] so
/// callers can fall back to the Monte Carlo engine.
pub fn policy_performance_analytic(
    policy: &Policy,
    metric: Metric,
    configs: &[TechnologyConfig],
    spec: &QuadratureSpec,
) -> Result<f64> {
    validate_configs(configs)?;
    policy.validate()?;
    let interference_limited = configs.iter().all(|c| c.noise == 0.0);
    let shared_alpha = configs.windows(2).all(|w| w[0].alpha == w[1].alpha);
    match (policy, metric) {
        (Policy::Nearest, Metric::Coverage) => cp_nearest(configs, spec),
        (Policy::Nearest, Metric::Rate) => rate_nearest(configs, spec),
        (Policy::Random, Metric::Coverage) => cp_random(configs, spec),
        (Policy::Random, Metric::Rate) => rate_random(configs, spec),
        (Policy::MaxRatio, Metric::Coverage) => {
            if interference_limited && shared_alpha {
                let betas: Vec<f64> = configs.iter().map(|c| c.beta).collect();
                cp_max_ratio_closed(&betas, configs[0].alpha, spec)
            } else {
                cp_max_ratio_general(configs, spec)
            }
        }
        (Policy::MaxRatio, Metric::Rate) => {
            if interference_limited && shared_alpha {
                // Thresholds never enter a rate; bandwidths scale linearly.
                let mean_bandwidth: f64 =
                    configs.iter().map(|c| c.bandwidth).sum::<f64>() / configs.len() as f64;
                Ok(mean_bandwidth * rate_max_ratio_closed(configs.len(), configs[0].alpha, spec)?)
            } else {
                rate_max_ratio_general(configs, spec)
            }
        }
        (Policy::OptCoverage { k: 1 }, Metric::Coverage) => cp_opt_nearest(configs, spec),
        (Policy::OptCoverage { k: 2 }, Metric::Coverage) => cp_opt_two_distances(configs, spec),
        (p, m) => Err(Error::Unsupported(format!(
            "no direct expression for policy {p} under the {m} metric — use the Monte Carlo engine"
        ))),
    }
}
