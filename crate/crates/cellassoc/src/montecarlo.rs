//! Exact Monte Carlo evaluation of association policies, engineered so the
//! result is a pure function of (seed, configuration) — never of thread
//! count, execution order, or which other policies share the run.
//!
//! Determinism contract:
//!
//! * world `w` draws from its own counter-derived RNG streams (sampling
//!   stream `2w`, decision stream `2w+1`), so any subset of worlds can be
//!   generated independently and in any order;
//! * worlds are partitioned into contiguous fixed-size blocks; blocks are
//!   evaluated independently (possibly in parallel) and their partial sums
//!   are folded in block order, which pins down floating-point summation
//!   order — the parallel and sequential engines are bit-identical;
//! * coverage tallies are integer counts, so those sums are exact anyway;
//! * within a world, decision randomness is consumed in policy-slot order,
//!   and only by policies that are actually randomized. A run containing a
//!   single randomized policy therefore reproduces that policy's standalone
//!   decisions exactly, regardless of which deterministic policies ride
//!   along.
//!
//! Confidence intervals: Wilson score for coverage (a bounded Bernoulli
//! mean — behaves at the 0/1 edges where the normal interval collapses),
//! Student-t for rate (unbounded continuous values).

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::analytic::QuadratureSpec;
use crate::core::{
    coverage_value, rate_value, sinr, validate_configs, Metric, NetworkRealization,
    TechnologyConfig, TechnologyRealization,
};
use crate::error::{Error, Result};
use crate::policies::{decide, Policy};
use crate::sampling::{resample_realization, world_decision_rng, world_sampling_rng, SamplerSpec};

/// Worlds per scheduling block. Large enough that block bookkeeping is
/// negligible, small enough that a default run parallelizes across dozens
/// of cores.
const BLOCK_WORLDS: u64 = 4096;

/// Which execution engine to use. `Parallel` falls back to the sequential
/// engine when the crate is built without the `parallel` feature; results
/// are bit-identical either way by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        ExecMode::Parallel
    }
}

/// A Monte Carlo estimate with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceEstimate {
    pub value: f64,
    pub half_width_95: f64,
    pub n_worlds: u64,
}

fn validate_run(
    policies: &[Policy],
    configs: &[TechnologyConfig],
    sampler: &SamplerSpec,
    n_worlds: u64,
) -> Result<()> {
    validate_configs(configs)?;
    sampler.validate()?;
    if policies.is_empty() {
        return Err(Error::invalid("policies", "need at least one policy"));
    }
    if n_worlds < 100 {
        return Err(Error::invalid(
            "n_worlds",
            format!("need at least 100 worlds for a meaningful interval (got {n_worlds})"),
        ));
    }
    for p in policies {
        p.validate()?;
        if p.required_k() > sampler.bs_count {
            return Err(Error::invalid(
                "k",
                format!(
                    "policy {p} observes {} distances but only {} stations are sampled per \
                     technology — raise the sampler's bs_count",
                    p.required_k(),
                    sampler.bs_count
                ),
            ));
        }
    }
    Ok(())
}

/// Split `n_worlds` into contiguous index blocks.
fn block_ranges(n_worlds: u64) -> Vec<Range<u64>> {
    (0..n_worlds.div_ceil(BLOCK_WORLDS))
        .map(|b| {
            let lo = b * BLOCK_WORLDS;
            lo..(lo + BLOCK_WORLDS).min(n_worlds)
        })
        .collect()
}

/// Evaluate one closure per block, in parallel when asked (and compiled
/// in), and return the per-block results *in block order*.
fn map_blocks<A, F>(n_worlds: u64, mode: ExecMode, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(Range<u64>) -> Result<A> + Sync + Send,
{
    let blocks = block_ranges(n_worlds);
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => blocks.into_par_iter().map(f).collect(),
        _ => blocks.into_iter().map(f).collect(),
    }
}

/// Per-block tallies for a multi-policy run: one slot per policy. Coverage
/// uses exact integer counts; rate accumulates value and squared value.
struct BlockTally {
    hits: Vec<u64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl BlockTally {
    fn zero(slots: usize) -> Self {
        BlockTally {
            hits: vec![0; slots],
            sum: vec![0.0; slots],
            sum_sq: vec![0.0; slots],
        }
    }

    fn fold(mut self, other: &BlockTally) -> Self {
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self
    }
}

/// Walk one block of worlds, handing each world's realization and decision
/// RNG to `visit`. The world buffer is reused across iterations — sampling
/// allocates nothing after the first world of the block.
fn walk_block<F>(
    worlds: Range<u64>,
    configs: &[TechnologyConfig],
    sampler: &SamplerSpec,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&NetworkRealization, u64) -> Result<()>,
{
    let mut world = NetworkRealization {
        per_tech: Vec::<TechnologyRealization>::new(),
    };
    for w in worlds {
        let mut srng = world_sampling_rng(sampler.seed, w);
        resample_realization(&mut world, configs, sampler, &mut srng)?;
        visit(&world, w)?;
    }
    Ok(())
}

/// Estimate every policy's performance on the *same* sampled worlds — the
/// variance-friendly way to compare policies, and T·J draws cheaper per
/// extra policy than separate runs. Slot `i` of the result corresponds to
/// `policies[i]`. SINR is evaluated at most once per (world, technology):
/// it does not depend on the policy that chose the technology.
pub fn estimate_many(
    policies: &[Policy],
    metric: Metric,
    configs: &[TechnologyConfig],
    sampler: &SamplerSpec,
    n_worlds: u64,
    quad: &QuadratureSpec,
    mode: ExecMode,
) -> Result<Vec<PerformanceEstimate>> {
    validate_run(policies, configs, sampler, n_worlds)?;
    let slots = policies.len();
    let tallies = map_blocks(n_worlds, mode, |worlds| {
        let mut tally = BlockTally::zero(slots);
        let mut sinr_cache = vec![f64::NAN; configs.len()];
        walk_block(worlds, configs, sampler, |world, w| {
            let mut drng = world_decision_rng(sampler.seed, w);
            sinr_cache.fill(f64::NAN);
            for (slot, policy) in policies.iter().enumerate() {
                let d = decide(policy, world, configs, quad, &mut drng)?;
                if sinr_cache[d.tech].is_nan() {
                    sinr_cache[d.tech] = sinr(world, configs, d.tech, d.bs_index)?;
                }
                let s = sinr_cache[d.tech];
                match metric {
                    Metric::Coverage => {
                        if coverage_value(s, configs[d.tech].beta) != 0.0 {
                            tally.hits[slot] += 1;
                        }
                    }
                    Metric::Rate => {
                        let v = rate_value(s, configs[d.tech].bandwidth);
                        tally.sum[slot] += v;
                        tally.sum_sq[slot] += v * v;
                    }
                }
            }
            Ok(())
        })?;
        Ok(tally)
    })?;
    let total = tallies
        .iter()
        .fold(BlockTally::zero(slots), BlockTally::fold);
    Ok((0..slots)
        .map(|i| match metric {
            Metric::Coverage => wilson_estimate(total.hits[i], n_worlds),
            Metric::Rate => student_t_estimate(total.sum[i], total.sum_sq[i], n_worlds),
        })
        .collect())
}

/// Single-policy convenience wrapper over [`estimate_many`].
pub fn estimate(
    policy: &Policy,
    metric: Metric,
    configs: &[TechnologyConfig],
    sampler: &SamplerSpec,
    n_worlds: u64,
    quad: &QuadratureSpec,
    mode: ExecMode,
) -> Result<PerformanceEstimate> {
    Ok(estimate_many(
        std::slice::from_ref(policy),
        metric,
        configs,
        sampler,
        n_worlds,
        quad,
        mode,
    )?[0])
}

/// Probability that two policies pick the same technology on a shared
/// world, with a Wilson interval. Each policy gets its own *clone* of the
/// world's decision RNG, so a randomized policy behaves exactly as it does
/// in a standalone run — and any policy agrees with itself with rate 1.
pub fn agreement_rate(
    policy_a: &Policy,
    policy_b: &Policy,
    configs: &[TechnologyConfig],
    sampler: &SamplerSpec,
    n_worlds: u64,
    quad: &QuadratureSpec,
    mode: ExecMode,
) -> Result<PerformanceEstimate> {
    let policies = [*policy_a, *policy_b];
    validate_run(&policies, configs, sampler, n_worlds)?;
    let hits = map_blocks(n_worlds, mode, |worlds| {
        let mut hits = 0u64;
        walk_block(worlds, configs, sampler, |world, w| {
            let drng = world_decision_rng(sampler.seed, w);
            let da = decide(policy_a, world, configs, quad, &mut drng.clone())?;
            let db = decide(policy_b, world, configs, quad, &mut drng.clone())?;
            if da == db {
                hits += 1;
            }
            Ok(())
        })?;
        Ok(hits)
    })?;
    Ok(wilson_estimate(hits.iter().sum(), n_worlds))
}

/// One-sample Kolmogorov–Smirnov statistic D_n = sup_x |F_n(x) − F(x)|
/// against a reference CDF, for distributional validation of sampled
/// scores and distances.
pub fn ks_statistic<F>(samples: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if samples.is_empty() {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for a Bernoulli mean, reported as the plain
/// point estimate plus the larger of the two (asymmetric) interval arms.
fn wilson_estimate(successes: u64, n: u64) -> PerformanceEstimate {
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    PerformanceEstimate {
        value: p,
        half_width_95: (centre + half - p).max(p - (centre - half)),
        n_worlds: n,
    }
}

/// Student-t interval for an unbounded sample mean.
fn student_t_estimate(sum: f64, sum_sq: f64, n: u64) -> PerformanceEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .expect("n ≥ 100 validated upstream")
        .inverse_cdf(0.975);
    PerformanceEstimate {
        value: mean,
        half_width_95: t * (var / nf).sqrt(),
        n_worlds: n,
    }
}
