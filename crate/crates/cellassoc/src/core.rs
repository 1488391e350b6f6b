//! Domain types shared by every module, SINR evaluation on a sampled world,
//! and the two per-link performance functions (coverage indicator, rate).
//!
//! Everything here is a pure function over immutable data: a
//! [`NetworkRealization`] is frozen at sampling time (distances, fading
//! marks, tail correction) so the simulation and analytic paths can be
//! compared on exactly the same object. All quantities are linear scale —
//! dB conversions belong to the CLI, never to the model.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parameters of one radio-access technology.
///
/// A technology is a homogeneous PPP of base stations with density `lambda`,
/// fixed transmit power `power`, thermal noise `noise` at the receiver,
/// path-loss exponent `alpha` (strictly above 2, otherwise the interference
/// field has infinite mean), Rayleigh fading with mean `1/fading_mean_inv`,
/// SINR threshold `beta` for the coverage metric, and a `bandwidth` weight
/// for the rate metric.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyConfig {
    /// 1-based technology label, unique within a scenario.
    pub id: usize,
    /// Base-station density λ (points per unit area), > 0.
    pub lambda: f64,
    /// Transmit power P (linear), > 0.
    pub power: f64,
    /// Thermal noise N₀ (linear), ≥ 0.
    pub noise: f64,
    /// Path-loss exponent α, > 2.
    pub alpha: f64,
    /// SINR threshold β (linear), > 0.
    pub beta: f64,
    /// Fading rate μ: marks are exponential with mean 1/μ, > 0.
    pub fading_mean_inv: f64,
    /// Rate weight B in B·log₂(1+SINR), ≥ 0.
    pub bandwidth: f64,
}

impl TechnologyConfig {
    /// Interference-limited reference technology: unit power and fading
    /// rate, zero noise, unit bandwidth. The common starting point for
    /// symmetric scenarios.
    #[must_use]
    pub fn interference_limited(id: usize, lambda: f64, alpha: f64, beta: f64) -> Self {
        TechnologyConfig {
            id,
            lambda,
            power: 1.0,
            noise: 0.0,
            alpha,
            beta,
            fading_mean_inv: 1.0,
            bandwidth: 1.0,
        }
    }

    /// Check every documented parameter invariant.
    pub fn validate(&self) -> Result<()> {
        if self.id == 0 {
            return Err(Error::invalid("id", "technology ids are 1-based"));
        }
        for (name, value, needs_positive) in [
            ("lambda", self.lambda, true),
            ("power", self.power, true),
            ("noise", self.noise, false),
            ("beta", self.beta, true),
            ("fading_mean_inv", self.fading_mean_inv, true),
            ("bandwidth", self.bandwidth, false),
        ] {
            if !value.is_finite() || value < 0.0 || (needs_positive && value == 0.0) {
                return Err(Error::invalid(
                    name,
                    format!(
                        "must be finite and {} (got {value})",
                        if needs_positive { "> 0" } else { "≥ 0" }
                    ),
                ));
            }
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("path-loss exponent must exceed 2 (got {})", self.alpha),
            ));
        }
        Ok(())
    }
}

/// Validate a full scenario: every config individually, plus unique ids.
pub fn validate_configs(configs: &[TechnologyConfig]) -> Result<()> {
    if configs.is_empty() {
        return Err(Error::invalid("configs", "need at least one technology"));
    }
    for cfg in configs {
        cfg.validate()?;
    }
    let mut ids: Vec<usize> = configs.iter().map(|c| c.id).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != configs.len() {
        return Err(Error::invalid("id", "technology ids must be unique"));
    }
    Ok(())
}

/// `t` identical interference-limited technologies — the symmetric scenario
/// every closed form in [`crate::analytic`] is written for.
#[must_use]
pub fn symmetric_configs(t: usize, lambda: f64, alpha: f64, beta: f64) -> Vec<TechnologyConfig> {
    (1..=t)
        .map(|id| TechnologyConfig::interference_limited(id, lambda, alpha, beta))
        .collect()
}

/// One technology's sampled world: the `J` nearest base stations in
/// increasing distance order, their fading marks, and the exact conditional
/// mean of the interference from everything beyond `r_J` (normalized by
/// transmit power).
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyRealization {
    /// Ordered distances r_1 < r_2 < … < r_J, all positive.
    pub distances: Vec<f64>,
    /// Fading marks H_1 … H_J, index-aligned with `distances`, all positive.
    pub fading: Vec<f64>,
    /// Mean residual interference beyond r_J (Campbell), ≥ 0; zero when the
    /// tail correction is disabled.
    pub tail_mean: f64,
}

impl TechnologyRealization {
    /// Number of sampled base stations.
    #[must_use]
    pub fn bs_count(&self) -> usize {
        self.distances.len()
    }

    /// Check the structural invariants (used by tests and debug builds; the
    /// sampler constructs valid realizations by design).
    pub fn validate(&self) -> Result<()> {
        if self.distances.len() != self.fading.len() {
            return Err(Error::invalid(
                "fading",
                "distance and fading lists must have equal length",
            ));
        }
        if self.distances.len() < 2 {
            return Err(Error::invalid("distances", "need at least two base stations"));
        }
        let increasing = self
            .distances
            .windows(2)
            .all(|w| w[0] > 0.0 && w[0] < w[1]);
        if !increasing || self.distances.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid(
                "distances",
                "distances must be finite, positive, strictly increasing",
            ));
        }
        if self.fading.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::invalid("fading", "fading marks must be positive"));
        }
        if !(self.tail_mean >= 0.0) {
            return Err(Error::invalid("tail_mean", "tail correction must be ≥ 0"));
        }
        Ok(())
    }
}

/// One sampled world across all technologies, index-aligned with the
/// `TechnologyConfig` list it was sampled from.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub per_tech: Vec<TechnologyRealization>,
}

impl NetworkRealization {
    /// Number of technologies in this world.
    #[must_use]
    pub fn tech_count(&self) -> usize {
        self.per_tech.len()
    }

    /// The information vector a policy sees for one technology: its `k`
    /// nearest distances (fading is deliberately absent — the optimal rule
    /// never uses it).
    pub fn observe(&self, tech: usize, k: usize) -> Result<Observation<'_>> {
        let real = self
            .per_tech
            .get(tech)
            .ok_or_else(|| Error::invalid("tech", format!("no technology at index {tech}")))?;
        if k == 0 || k > real.distances.len() {
            return Err(Error::invalid(
                "k",
                format!(
                    "need 1 ≤ k ≤ J = {} sampled stations (got {k})",
                    real.distances.len()
                ),
            ));
        }
        Ok(Observation {
            tech,
            k_distances: &real.distances[..k],
        })
    }
}

/// What the device knows about one technology when deciding: the `k`
/// nearest distances, nothing else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<'a> {
    /// 0-based position of the technology in the scenario's config list.
    pub tech: usize,
    /// First `k` entries of that technology's ordered distance list.
    pub k_distances: &'a [f64],
}

impl Observation<'_> {
    /// Nearest distance r_1.
    #[must_use]
    pub fn r1(&self) -> f64 {
        self.k_distances[0]
    }
}

/// Outcome of a policy: which technology to associate with. Every
/// implemented policy connects to the nearest base station of the chosen
/// technology (`bs_index` = 0), a consequence of fading being unobserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyDecision {
    /// 0-based position of the chosen technology in the config list.
    pub tech: usize,
    /// 0-based rank of the chosen base station within that technology;
    /// always 0 (the nearest) for the policies implemented here.
    pub bs_index: usize,
}

/// SINR at base station `bs` (0-based rank) of technology `tech` in a
/// sampled world:
///
/// ```text
/// SINR = P·H_bs·r_bs^{-α} / (N₀ + P·(Σ_{j≠bs} H_j·r_j^{-α} + tail_mean))
/// ```
///
/// The sum runs over the J sampled stations; interference from the rest of
/// the (infinite) process enters through the precomputed `tail_mean`.
pub fn sinr(
    world: &NetworkRealization,
    configs: &[TechnologyConfig],
    tech: usize,
    bs: usize,
) -> Result<f64> {
    let real = world
        .per_tech
        .get(tech)
        .ok_or_else(|| Error::invalid("tech", format!("no technology at index {tech}")))?;
    let cfg = configs
        .get(tech)
        .ok_or_else(|| Error::invalid("tech", format!("no config at index {tech}")))?;
    if bs >= real.distances.len() {
        return Err(Error::invalid(
            "bs",
            format!(
                "base-station rank {bs} out of range (J = {})",
                real.distances.len()
            ),
        ));
    }
    let alpha = cfg.alpha;
    let mut received_total = 0.0;
    for (r, h) in real.distances.iter().zip(&real.fading) {
        received_total += h * path_gain(*r, alpha);
    }
    let signal = real.fading[bs] * path_gain(real.distances[bs], alpha);
    // Dividing N₀ by P once is cheaper than multiplying every term by P and
    // leaves the interference-limited case exactly power-free.
    let denom = cfg.noise / cfg.power + (received_total - signal) + real.tail_mean;
    Ok(signal / denom)
}

/// Path gain r^{-α}. The α = 4 sweep default dominates every workload, and
/// two multiplications beat `powf` by an order of magnitude there.
#[inline]
#[must_use]
pub(crate) fn path_gain(r: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let q = r * r;
        1.0 / (q * q)
    } else {
        r.powf(-alpha)
    }
}

/// Coverage indicator 1{s ≥ β}, returned as 0.0/1.0 so it can be averaged
/// directly. The boundary is inclusive.
#[inline]
#[must_use]
pub fn coverage_value(s: f64, beta: f64) -> f64 {
    if s >= beta {
        1.0
    } else {
        0.0
    }
}

/// Shannon rate B·log₂(1+s) in bits (per unit bandwidth when B = 1).
#[inline]
#[must_use]
pub fn rate_value(s: f64, bandwidth: f64) -> f64 {
    bandwidth * (1.0 + s).log2()
}

/// Which per-link performance function an experiment averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// P[SINR ≥ β] — mean of the coverage indicator.
    Coverage,
    /// E[B·log₂(1+SINR)] — mean Shannon rate.
    Rate,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Coverage => "coverage",
            Metric::Rate => "rate",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverage" => Ok(Metric::Coverage),
            "rate" => Ok(Metric::Rate),
            other => Err(Error::invalid(
                "metric",
                format!("unknown metric `{other}` (expected coverage|rate)"),
            )),
        }
    }
}
