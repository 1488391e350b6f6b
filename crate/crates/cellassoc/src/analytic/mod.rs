//! The direct-evaluation path: adaptive quadrature, conditional coverage
//! kernels, score distribution laws, and unconditional policy performance.
//!
//! The layering is strict — each module only reaches down:
//!
//! * [`quadrature`] — adaptive Gauss–Kronrod integration with explicit
//!   tolerances and failure reporting; knows nothing about the model.
//! * [`kernels`] — conditional coverage given observed distances, the
//!   rate transform, and the two primitive interference integrals.
//! * [`laws`] — unconditional distribution functions of policy scores
//!   (the competition terms of every performance expression).
//! * [`performance`] — policy-level coverage and rate, assembled from the
//!   kernels and laws, plus the generic score-policy evaluator and the
//!   dispatch used by the command-line driver.
//!
//! Quadrature tolerances cascade: a caller's [`QuadratureSpec`] governs the
//! outermost integral and every nested level runs 10× tighter, so reported
//! values honour the requested tolerance without hand-tuning per formula.

pub mod kernels;
pub mod laws;
pub mod performance;
pub mod quadrature;

pub use kernels::{
    cp_given_k_distances, cp_given_r1, cp_given_r1_r2, interference_integral, phi,
    rate_from_coverage,
};
pub use laws::{
    cdf_max_ratio, cdf_opt_coverage_two, cdf_opt_nearest, sir_coverage_given_ratio_bound,
};
pub use performance::{
    cp_cond_ratio, cp_max_ratio_closed, cp_max_ratio_general, cp_nearest, cp_opt_nearest,
    cp_opt_two_distances, cp_random, evaluate_policy_analytic, max_ratio_pieces,
    opt_nearest_pieces, policy_performance_analytic, rate_max_ratio_closed,
    rate_max_ratio_general, rate_nearest, rate_random, Dim, TechPieces,
};
pub use quadrature::{integrate, QuadratureSpec};
