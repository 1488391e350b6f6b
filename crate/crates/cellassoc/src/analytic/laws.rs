//! Distribution laws of policy scores in the interference-limited regime:
//! the CDFs F_π(y) that the generic association-performance formula
//! multiplies together, one per competing technology.
//!
//! All three laws below are λ-free. That is not an accident: at N₀ = 0 the
//! SIR of a PPP network is invariant under rescaling the plane, so any
//! score built from distance *ratios* or from conditional coverage itself
//! has a density-independent law.

use crate::analytic::kernels::interference_integral;
use crate::analytic::quadrature::{integrate, QuadratureSpec};
use crate::error::{Error, Result};

/// Score CDF of the nearest-distance coverage rule (score = conditional
/// coverage given r₁ alone, N₀ = 0):
///
/// ```text
/// F(y) = y^{1/(2I)},   I = ∫₁^∞ v/(1+β^{-1}v^α) dv
/// ```
///
/// follows from the score exp(−2πλr₁²·I) being a deterministic decreasing
/// map of πλr₁² ~ Exp(1). The λs cancel — every technology with the same
/// (β, α) shares this law regardless of density.
pub fn cdf_opt_nearest(y: f64, beta: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::invalid("y", format!("need y ∈ (0,1] (got {y})")));
    }
    let i = interference_integral(1.0, beta, alpha, &spec.tighter(10.0))?;
    Ok((y.ln() / (2.0 * i)).exp())
}

/// Score CDF of the distance-ratio rule: P[r₂/r₁ ≤ x] = 1 − 1/x², x ≥ 1.
/// Pure geometry — the squared distances are consecutive arrivals of a unit
/// Poisson process, making r₂²/r₁² a Pareto(1) variable.
pub fn cdf_max_ratio(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::invalid("x", format!("ratio support is [1, ∞) (got {x})")));
    }
    Ok(1.0 - 1.0 / (x * x))
}

/// P[SIR ≥ β | r₂/r₁ ≥ 1/x] = 1/(1 + β^{2/α}·φ(α, β, x)) for x ∈ (0,1] —
/// conditional SIR coverage given a lower bound on how dominant the nearest
/// station is. At x = 1 the conditioning event is trivial and this is the
/// plain single-technology SIR coverage.
pub fn sir_coverage_given_ratio_bound(
    x: f64,
    beta: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid("beta", format!("need β > 0 (got {beta})")));
    }
    let phi = super::kernels::phi(alpha, beta, x, spec)?;
    Ok(1.0 / (1.0 + beta.powf(2.0 / alpha) * phi))
}

/// Score CDF of the two-distance coverage rule (score = conditional
/// coverage given r₁ and r₂, N₀ = 0), needed to evaluate that policy's
/// performance without simulation.
///
/// Derivation. Write s = πλr₁² and x = r₂/r₁. Then s ~ Exp(1), and
/// πλ(r₂²−r₁²) is an independent Exp(1), so the pair has joint density
/// e^{-s}·2xs·e^{-s(x²-1)} over s > 0, x > 1. The score is
///
/// ```text
/// S = A(x)·e^{-2s·J(x)},  A(x) = 1/(1+βx^{-α}),  J(x) = ∫_x^∞ w/(1+β^{-1}w^α) dw
/// ```
///
/// (the exact factor for the station at r₂, times the PGFL of everything
/// beyond it, with 2πλr₁² = 2s). For fixed x, S ≤ y is the tail event
/// s ≥ c(x,y) with c = max(0, ln(A(x)/y)/(2J(x))), and
/// ∫_c^∞ s·e^{-sx²} ds = e^{-cx²}(1+cx²)/x⁴ collapses the s-integral:
///
/// ```text
/// F(y) = ∫₁^∞ (2/x³)·(1 + c(x,y)x²)·e^{-c(x,y)x²} dx
/// ```
///
/// λ-free like the others. F(1) = 1 because c ≡ 0 there (scores never
/// exceed A(x) < 1).
pub fn cdf_opt_coverage_two(
    y: f64,
    beta: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::invalid("y", format!("need y ∈ (0,1] (got {y})")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid("beta", format!("need β > 0 (got {beta})")));
    }
    if !(alpha > 2.0) {
        return Err(Error::invalid("alpha", format!("need α > 2 (got {alpha})")));
    }
    let inner = spec.tighter(10.0);
    let log_y = y.ln();
    integrate(
        move |x| {
            let a_log = -(1.0 + beta * x.powf(-alpha)).ln(); // ln A(x)
            let excess = a_log - log_y; // ln(A/y)
            let base = 2.0 / (x * x * x);
            if excess <= 0.0 {
                // Score at this ratio can never exceed y: the whole
                // conditional mass counts.
                return Ok(base);
            }
            let j = interference_integral(x, beta, alpha, &inner)?;
            let w = excess / (2.0 * j) * (x * x); // c·x²
            if !w.is_finite() || w > 700.0 {
                // e^{-w} underflows; the far-ratio tail contributes nothing.
                return Ok(0.0);
            }
            Ok(base * (1.0 + w) * (-w).exp())
        },
        1.0,
        f64::INFINITY,
        spec,
        "two-distance score CDF",
    )
}
