//! Association policies as scoring rules: each policy assigns every
//! technology a scalar score from that technology's observation alone, and
//! the device associates with the argmax (nearest base station within it).
//!
//! Scores, not decisions, are the unit of composition here because the
//! analytic path needs exactly the same objects: the performance of a
//! score-based policy is an integral against the competing technologies'
//! score CDFs. Keeping `decide` a thin argmax over the same score functions
//! guarantees the two paths simulate/integrate the *same* policy.
//!
//! Ties go to the lowest technology index — an arbitrary but fixed rule, so
//! runs are reproducible (ties have probability zero in the continuous
//! model but can occur once distances pass through floating point).

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::analytic::{cp_given_k_distances, rate_from_coverage, QuadratureSpec};
use crate::core::{NetworkRealization, Observation, PolicyDecision, TechnologyConfig};
use crate::error::{Error, Result};

/// The four implemented association rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Associate with the technology whose nearest station is closest
    /// (score −r₁).
    Nearest,
    /// Pick a technology uniformly at random, then its nearest station.
    Random,
    /// Maximize the distance ratio r₂/r₁ — prefer the technology whose
    /// nearest station is most dominant over its strongest interferer.
    MaxRatio,
    /// Maximize conditional coverage given the k nearest distances.
    OptCoverage { k: usize },
    /// Maximize conditional expected rate given the k nearest distances.
    OptRate { k: usize },
}

impl Policy {
    /// How many distances per technology the policy observes.
    #[must_use]
    pub fn required_k(&self) -> usize {
        match self {
            Policy::Nearest | Policy::Random => 1,
            Policy::MaxRatio => 2,
            Policy::OptCoverage { k } | Policy::OptRate { k } => *k,
        }
    }

    /// Whether `decide` consumes randomness.
    #[must_use]
    pub fn is_randomized(&self) -> bool {
        matches!(self, Policy::Random)
    }

    pub fn validate(&self) -> Result<()> {
        if self.required_k() == 0 {
            return Err(Error::invalid("k", "information depth k must be ≥ 1"));
        }
        Ok(())
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Nearest => f.write_str("nearest"),
            Policy::Random => f.write_str("random"),
            Policy::MaxRatio => f.write_str("max-ratio"),
            Policy::OptCoverage { k } => write!(f, "opt-cov:k={k}"),
            Policy::OptRate { k } => write!(f, "opt-rate:k={k}"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    /// Parse the CLI spelling: `nearest`, `random`, `max-ratio`,
    /// `opt-cov:k=<n>`, `opt-rate:k=<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_k = |rest: &str| -> Result<usize> {
            let k: usize = rest.parse().map_err(|_| {
                Error::invalid("policy", format!("bad information depth in `{s}`"))
            })?;
            if k == 0 {
                return Err(Error::invalid("policy", "information depth k must be ≥ 1"));
            }
            Ok(k)
        };
        match s {
            "nearest" => Ok(Policy::Nearest),
            "random" => Ok(Policy::Random),
            "max-ratio" => Ok(Policy::MaxRatio),
            _ => {
                if let Some(rest) = s.strip_prefix("opt-cov:k=") {
                    Ok(Policy::OptCoverage { k: parse_k(rest)? })
                } else if let Some(rest) = s.strip_prefix("opt-rate:k=") {
                    Ok(Policy::OptRate { k: parse_k(rest)? })
                } else {
                    Err(Error::invalid(
                        "policy",
                        format!(
                            "unknown policy `{s}` (expected nearest|random|max-ratio|opt-cov:k=<n>|opt-rate:k=<n>)"
                        ),
                    ))
                }
            }
        }
    }
}

/// Nearest-distance score: −r₁, so the argmax picks the smallest r₁.
#[must_use]
pub fn score_nearest(obs: &Observation<'_>) -> f64 {
    -obs.r1()
}

/// Distance-ratio score r₂/r₁ ≥ 1. Scale-free: rescaling all distances of a
/// technology leaves it unchanged.
pub fn score_max_ratio(obs: &Observation<'_>) -> Result<f64> {
    if obs.k_distances.len() < 2 {
        return Err(Error::invalid(
            "k",
            "the ratio score needs the two nearest distances (k ≥ 2)",
        ));
    }
    Ok(obs.k_distances[1] / obs.k_distances[0])
}

/// Conditional-coverage score: P[SINR ≥ β | observed distances] for this
/// technology's parameters, straight from the analytic kernel.
pub fn score_opt_coverage(
    obs: &Observation<'_>,
    cfg: &TechnologyConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    cp_given_k_distances(
        obs.k_distances,
        cfg.lambda,
        cfg.power,
        cfg.noise,
        cfg.beta,
        cfg.alpha,
        cfg.fading_mean_inv,
        spec,
    )
}

/// Conditional-rate score: B·E[log₂(1+SINR) | observed distances], the
/// threshold integral of the coverage kernel.
pub fn score_opt_rate(
    obs: &Observation<'_>,
    cfg: &TechnologyConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let rate = rate_from_coverage(
        |beta| {
            cp_given_k_distances(
                obs.k_distances,
                cfg.lambda,
                cfg.power,
                cfg.noise,
                beta,
                cfg.alpha,
                cfg.fading_mean_inv,
                &spec.tighter(10.0),
            )
        },
        spec,
    )?;
    Ok(cfg.bandwidth * rate)
}

/// Argmax with ties to the lowest index (strict `>` keeps the first).
fn argmax_scores<F>(t: usize, mut score: F) -> Result<usize>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut best_idx = 0;
    let mut best = score(0)?;
    for i in 1..t {
        let s = score(i)?;
        if s > best {
            best = s;
            best_idx = i;
        }
    }
    Ok(best_idx)
}

/// Evaluate the policy on one sampled world. The chosen base station is
/// always the nearest of the chosen technology (fading is not observed, so
/// no farther station can be preferable). `rng` is consumed only by the
/// random policy.
pub fn decide<R: Rng + ?Sized>(
    policy: &Policy,
    world: &NetworkRealization,
    configs: &[TechnologyConfig],
    spec: &QuadratureSpec,
    rng: &mut R,
) -> Result<PolicyDecision> {
    policy.validate()?;
    let t = world.tech_count();
    if t == 0 || t != configs.len() {
        return Err(Error::invalid(
            "world",
            format!(
                "world has {t} technologies, configs have {} — need equal, ≥ 1",
                configs.len()
            ),
        ));
    }
    let k = policy.required_k();
    let tech = match policy {
        Policy::Random => rng.gen_range(0..t),
        Policy::Nearest => argmax_scores(t, |i| Ok(score_nearest(&world.observe(i, 1)?)))?,
        Policy::MaxRatio => argmax_scores(t, |i| score_max_ratio(&world.observe(i, 2)?))?,
        Policy::OptCoverage { .. } => {
            argmax_scores(t, |i| score_opt_coverage(&world.observe(i, k)?, &configs[i], spec))?
        }
        Policy::OptRate { .. } => {
            argmax_scores(t, |i| score_opt_rate(&world.observe(i, k)?, &configs[i], spec))?
        }
    };
    Ok(PolicyDecision { tech, bs_index: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{symmetric_configs, TechnologyRealization};
    use crate::sampling::world_decision_rng;

    fn world_from(distances: Vec<Vec<f64>>) -> NetworkRealization {
        NetworkRealization {
            per_tech: distances
                .into_iter()
                .map(|d| {
                    let n = d.len();
                    TechnologyRealization {
                        distances: d,
                        fading: vec![1.0; n],
                        tail_mean: 0.0,
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["nearest", "random", "max-ratio", "opt-cov:k=1", "opt-cov:k=3", "opt-rate:k=2"] {
            let p: Policy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("opt-cov:k=0".parse::<Policy>().is_err());
        assert!("opt-cov:k=x".parse::<Policy>().is_err());
        assert!("greedy".parse::<Policy>().is_err());
    }

    #[test]
    fn required_depths() {
        assert_eq!(Policy::Nearest.required_k(), 1);
        assert_eq!(Policy::Random.required_k(), 1);
        assert_eq!(Policy::MaxRatio.required_k(), 2);
        assert_eq!(Policy::OptCoverage { k: 4 }.required_k(), 4);
    }

    #[test]
    fn nearest_score_and_argmax() {
        let world = world_from(vec![vec![1.0, 3.0], vec![0.7, 2.0]]);
        let obs = world.observe(0, 1).unwrap();
        assert_eq!(score_nearest(&obs), -1.0);
        let configs = symmetric_configs(2, 1.0, 4.0, 1.0);
        let spec = QuadratureSpec::default();
        let mut rng = world_decision_rng(0, 0);
        let d = decide(&Policy::Nearest, &world, &configs, &spec, &mut rng).unwrap();
        assert_eq!(d.tech, 1);
        assert_eq!(d.bs_index, 0);
    }

    #[test]
    fn max_ratio_score_and_argmax() {
        // Ratios 1.2 vs 2.667: the nearer tech loses to the more dominant
        // one — the scenario where ratio and nearest disagree.
        let world = world_from(vec![vec![1.0, 1.2], vec![1.5, 4.0]]);
        let r0 = score_max_ratio(&world.observe(0, 2).unwrap()).unwrap();
        let r1 = score_max_ratio(&world.observe(1, 2).unwrap()).unwrap();
        assert!((r0 - 1.2).abs() < 1e-15);
        assert!((r1 - 4.0 / 1.5).abs() < 1e-15);
        let configs = symmetric_configs(2, 1.0, 4.0, 1.0);
        let spec = QuadratureSpec::default();
        let mut rng = world_decision_rng(0, 0);
        let d = decide(&Policy::MaxRatio, &world, &configs, &spec, &mut rng).unwrap();
        assert_eq!(d.tech, 1);
        // Nearest would have chosen tech 0.
        let d = decide(&Policy::Nearest, &world, &configs, &spec, &mut rng).unwrap();
        assert_eq!(d.tech, 0);
        // Scale-freeness of the ratio.
        let scaled = world_from(vec![vec![10.0, 12.0]]);
        let s = score_max_ratio(&scaled.observe(0, 2).unwrap()).unwrap();
        assert!((s - 1.2).abs() < 1e-15);
        // k = 1 observation is insufficient.
        assert!(score_max_ratio(&world.observe(0, 1).unwrap()).is_err());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let world = world_from(vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]);
        let configs = symmetric_configs(3, 1.0, 4.0, 1.0);
        let spec = QuadratureSpec::default();
        let mut rng = world_decision_rng(0, 0);
        for p in [Policy::Nearest, Policy::MaxRatio, Policy::OptCoverage { k: 2 }] {
            let d = decide(&p, &world, &configs, &spec, &mut rng).unwrap();
            assert_eq!(d.tech, 0, "{p} should break ties low");
        }
    }

    #[test]
    fn single_technology_is_always_chosen() {
        let world = world_from(vec![vec![0.3, 0.9]]);
        let configs = symmetric_configs(1, 1.0, 4.0, 1.0);
        let spec = QuadratureSpec::default();
        for p in [Policy::Nearest, Policy::Random, Policy::MaxRatio] {
            let mut rng = world_decision_rng(1, 0);
            let d = decide(&p, &world, &configs, &spec, &mut rng).unwrap();
            assert_eq!((d.tech, d.bs_index), (0, 0));
        }
    }

    #[test]
    fn opt_coverage_score_matches_kernel_and_decides_monotonically() {
        let spec = QuadratureSpec::default();
        let configs = symmetric_configs(2, 1.0 / std::f64::consts::PI, 4.0, 1.0);
        // Tech 1 has the same r₁ but a farther r₂ → strictly better score.
        let world = world_from(vec![vec![1.0, 1.5], vec![1.0, 2.5]]);
        let s0 = score_opt_coverage(&world.observe(0, 2).unwrap(), &configs[0], &spec).unwrap();
        let s1 = score_opt_coverage(&world.observe(1, 2).unwrap(), &configs[1], &spec).unwrap();
        assert!(s1 > s0);
        let mut rng = world_decision_rng(2, 0);
        let d = decide(&Policy::OptCoverage { k: 2 }, &world, &configs, &spec, &mut rng).unwrap();
        assert_eq!(d.tech, 1);
        // Same ordering under the rate score (monotone transform of the
        // conditional SINR law).
        let r0 = score_opt_rate(&world.observe(0, 2).unwrap(), &configs[0], &spec).unwrap();
        let r1 = score_opt_rate(&world.observe(1, 2).unwrap(), &configs[1], &spec).unwrap();
        assert!(r1 > r0);
    }

    #[test]
    fn random_policy_is_roughly_uniform_and_deterministic() {
        let world = world_from(vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]);
        let configs = symmetric_configs(3, 1.0, 4.0, 1.0);
        let spec = QuadratureSpec::default();
        let mut counts = [0u32; 3];
        for w in 0..3000 {
            let mut rng = world_decision_rng(9, w);
            let d = decide(&Policy::Random, &world, &configs, &spec, &mut rng).unwrap();
            counts[d.tech] += 1;
        }
        for c in counts {
            assert!((800..1200).contains(&c), "uniformity off: {counts:?}");
        }
        // Same (seed, world) ⇒ same draw.
        let mut a = world_decision_rng(9, 77);
        let mut b = world_decision_rng(9, 77);
        let da = decide(&Policy::Random, &world, &configs, &spec, &mut a).unwrap();
        let db = decide(&Policy::Random, &world, &configs, &spec, &mut b).unwrap();
        assert_eq!(da, db);
    }
}
