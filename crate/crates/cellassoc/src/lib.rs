//! Coverage and rate evaluation for multi-technology Poisson cellular
//! networks under downlink cell-association policies.
//!
//! The model: a device sees `T` radio-access technologies. Technology `i`
//! deploys base stations as an independent homogeneous Poisson point process
//! of intensity `λ_i` on the plane, transmits at power `P_i` over bandwidth
//! `B_i`, and its links experience Rayleigh fading (exponential power gains
//! with mean `1/μ_i`) and power-law path loss `r^{-α_i}` with `α_i > 2`.
//! Technologies do not interfere with each other; within a technology every
//! base station interferes with every other. Conditioning on the distances
//! `r_1 < r_2 < …` from the device to the base stations of one technology,
//! the SINR at the nearest base station is
//!
//! ```text
//!            P · H_1 · r_1^{-α}
//! SINR = ──────────────────────────────
//!         N_0 + P · Σ_{j≥2} H_j r_j^{-α}
//! ```
//!
//! A policy observes the `k` nearest distances of every technology and picks
//! one; performance is either coverage `P[SINR ≥ β]` or the Shannon rate
//! `B·log2(1 + SINR)`.
//!
//! Two independent evaluation paths are provided and are kept deliberately
//! separate so each can validate the other:
//!
//! * [`montecarlo`] — exact simulation. Distances come from the radial CDF
//!   of the PPP (squared distances are a unit Poisson arrival process scaled
//!   by `1/(λπ)`), fading is sampled per base station, and the interference
//!   beyond the last sampled station enters through its exact conditional
//!   mean. Estimates carry 95% confidence intervals.
//! * [`analytic`] — adaptive Gauss–Kronrod evaluation of the closed-form
//!   coverage/rate expressions (probability generating functional of the
//!   PPP plus order-statistic integrals over the observation space).
//!
//! Both paths share the domain types in [`core`] and the association
//! policies in [`policies`]. With a fixed seed the Monte Carlo path is
//! bit-reproducible regardless of how many worker threads are used: worlds
//! are indexed, every world draws from its own counter-derived RNG stream,
//! and reduction happens in block order.

pub mod analytic;
pub mod core;
mod error;
pub mod montecarlo;
pub mod policies;
pub mod sampling;

pub use crate::analytic::{policy_performance_analytic, QuadratureSpec};
pub use crate::core::{
    coverage_value, rate_value, sinr, symmetric_configs, validate_configs, Metric,
    NetworkRealization, Observation, PolicyDecision, TechnologyConfig, TechnologyRealization,
};
pub use crate::error::{Error, Result};
pub use crate::montecarlo::{estimate, estimate_many, ExecMode, PerformanceEstimate};
pub use crate::policies::Policy;
pub use crate::sampling::SamplerSpec;
