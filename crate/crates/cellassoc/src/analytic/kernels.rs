//! Conditional coverage kernels: P[SINR ≥ β] given the k nearest distances
//! of one technology, and the threshold-integral transform that turns any
//! such coverage kernel into an expected rate.
//!
//! All kernels share one structure. Conditioned on r_1 … r_k, the SINR at
//! r_1 involves (a) thermal noise, (b) the k−1 *known* interferers at
//! r_2 … r_k, (c) the unknown stations beyond r_k, a PPP on the far side.
//! Averaging the exponential fading of the serving link pulls each part
//! into a product:
//!
//! ```text
//! P[SINR ≥ β | r_1..r_k]
//!   = e^{−μβN₀r_1^α/P} · Π_{m=2..k} 1/(1 + β(r_1/r_m)^α)
//!     · exp(−2πλ·r_1²·Jint(r_k/r_1))
//! ```
//!
//! with the interference decay integral `Jint(x) = ∫_x^∞ w/(1+β^{-1}w^α) dw`
//! coming from the probability generating functional of the far PPP
//! (independently marked, hence the fading average inside the integrand).

use crate::analytic::quadrature::{integrate, QuadratureSpec};
use crate::error::{Error, Result};

/// z^a for z > 0, with exact fast paths for the exponents that dominate the
/// hot loops (α = 4 path loss and its half). `powf` is the single costliest
/// operation in every kernel integrand, so this is worth the branch.
#[inline]
pub(crate) fn pow_pos(z: f64, a: f64) -> f64 {
    if a == 4.0 {
        let z2 = z * z;
        z2 * z2
    } else if a == 2.0 {
        z * z
    } else {
        z.powf(a)
    }
}

/// Both kernel integrals have the shape `∫ z^p/(1+z^q) dz` with q − p > 1.
/// Past the point where z^q ≥ this constant, the denominator's `1` carries
/// relative weight ≤ 10⁻⁴ and the alternating expansion
/// 1/(1+z^q) = Σ_k (−1)^k z^{−q(k+1)} integrates term by term; five terms
/// leave a remainder below 10⁻²⁰ of the tail. Splitting the tail off
/// analytically matters twice over: near α = 2 the integrand decays so
/// slowly (z^{−α/2} can be z^{−1.01}) that no subdivision budget reaches
/// the tolerance by quadrature alone, and at extreme thresholds the tail
/// start exceeds the range where the semi-infinite substitution can even
/// represent the decay point in f64.
const TAIL_DOMINANCE: f64 = 1e4;

/// ∫_hi^∞ z^p/(1+z^q) dz by the alternating far-tail expansion; requires
/// hi^q ≥ [`TAIL_DOMINANCE`] and q − p > 1.
fn power_tail_series(hi: f64, p: f64, q: f64) -> f64 {
    let ratio = pow_pos(hi, -q);
    // Slack for the powf round-trip when hi is exactly the dominance split.
    debug_assert!(ratio <= 1.01 / TAIL_DOMINANCE);
    let mut term_pow = pow_pos(hi, p + 1.0 - q);
    let mut sign = 1.0;
    let mut sum = 0.0;
    for k in 0..5 {
        sum += sign * term_pow / (q * (k + 1) as f64 - p - 1.0);
        term_pow *= ratio; // underflow to 0 simply ends the contribution
        sign = -sign;
    }
    sum
}

/// ∫_from^∞ w/(1 + β^{-1}·w^α) dw — the PGFL exponent per unit 2πλr₁², with
/// the convention that the serving distance has been scaled to 1 (so `from`
/// is a distance *ratio*, ≥ 0).
///
/// Evaluated through the substitution w = β^{1/α}·z, which makes the
/// integrand parameter-free in scale: β spans ~15 orders of magnitude under
/// the rate transform, and integrating z/(1+z^α) from `from/β^{1/α}` keeps
/// every evaluation in well-conditioned territory (the raw form loses the
/// integral entirely to underflow at extreme β).
pub fn interference_integral(
    from: f64,
    beta: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::invalid(
            "alpha",
            format!("interference integral diverges unless α > 2 (got {alpha})"),
        ));
    }
    if !(from >= 0.0) || !from.is_finite() {
        return Err(Error::invalid(
            "from",
            format!("lower ratio must be finite and ≥ 0 (got {from})"),
        ));
    }
    if !(beta >= 0.0) {
        return Err(Error::invalid(
            "beta",
            format!("threshold must be ≥ 0 (got {beta})"),
        ));
    }
    if beta == 0.0 {
        return Ok(0.0); // integrand vanishes: no threshold, no interference penalty
    }
    let scale = beta.powf(1.0 / alpha);
    let lo = from / scale;
    let split = TAIL_DOMINANCE.powf(1.0 / alpha);
    let value = if lo >= split {
        power_tail_series(lo, 1.0, alpha)
    } else {
        integrate(
            |z| Ok(z / (1.0 + pow_pos(z, alpha))),
            lo,
            split,
            spec,
            "interference decay integral",
        )? + power_tail_series(split, 1.0, alpha)
    };
    Ok(scale * scale * value)
}

pub(crate) fn check_common(
    lambda: f64,
    p: f64,
    n0: f64,
    beta: f64,
    alpha: f64,
    mu: f64,
) -> Result<()> {
    for (name, v, strictly) in [
        ("lambda", lambda, true),
        ("P", p, true),
        ("N0", n0, false),
        ("beta", beta, true),
        ("mu", mu, true),
    ] {
        if !v.is_finite() || v < 0.0 || (strictly && v == 0.0) {
            return Err(Error::invalid(
                name,
                format!(
                    "must be finite and {} (got {v})",
                    if strictly { "> 0" } else { "≥ 0" }
                ),
            ));
        }
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::invalid(
            "alpha",
            format!("need α > 2 (got {alpha})"),
        ));
    }
    Ok(())
}

/// Shared implementation: serving distance `r1`, explicitly known
/// interferers (distances ≥ r1), PPP interference beyond `tail_start`.
fn cp_conditional(
    r1: f64,
    known_interferers: &[f64],
    tail_start: f64,
    lambda: f64,
    p: f64,
    n0: f64,
    beta: f64,
    alpha: f64,
    mu: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let noise_factor = (-mu * beta * n0 * pow_pos(r1, alpha) / p).exp();
    let mut known_factor = 1.0;
    for &rm in known_interferers {
        known_factor /= 1.0 + beta * pow_pos(r1 / rm, alpha);
    }
    // The kernel's own integral is the innermost of any nesting it appears
    // in; run it a notch tighter so the error budget stays with the caller.
    let jint = interference_integral(tail_start / r1, beta, alpha, &spec.tighter(10.0))?;
    let pgfl = (-2.0 * std::f64::consts::PI * lambda * r1 * r1 * jint).exp();
    Ok(noise_factor * known_factor * pgfl)
}

/// Coverage probability given only the nearest distance r₁:
/// every station beyond r₁ is unknown PPP interference.
pub fn cp_given_r1(
    r1: f64,
    lambda: f64,
    p: f64,
    n0: f64,
    beta: f64,
    alpha: f64,
    mu: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_common(lambda, p, n0, beta, alpha, mu)?;
    if !(r1 > 0.0) || !r1.is_finite() {
        return Err(Error::invalid("r1", format!("need r1 > 0 (got {r1})")));
    }
    cp_conditional(r1, &[], r1, lambda, p, n0, beta, alpha, mu, spec)
}

/// Coverage probability given the two nearest distances: the station at r₂
/// contributes the exact factor 1/(1+β(r₁/r₂)^α); PPP interference starts
/// at r₂. Defined on the closed wedge r₂ ≥ r₁ (the boundary value is the
/// ratio-law limit used by the conditional-ratio integrals).
pub fn cp_given_r1_r2(
    r1: f64,
    r2: f64,
    lambda: f64,
    p: f64,
    n0: f64,
    beta: f64,
    alpha: f64,
    mu: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_common(lambda, p, n0, beta, alpha, mu)?;
    if !(r1 > 0.0) || !(r2 >= r1) || !r2.is_finite() {
        return Err(Error::invalid(
            "r2",
            format!("need 0 < r1 ≤ r2 (got r1 = {r1}, r2 = {r2})"),
        ));
    }
    cp_conditional(r1, &[r2], r2, lambda, p, n0, beta, alpha, mu, spec)
}

/// Coverage probability given the k nearest distances (strictly
/// increasing). Reduces to [`cp_given_r1`] at k = 1 and [`cp_given_r1_r2`]
/// at k = 2; beyond that each extra known distance adds one exact
/// interferer factor and pushes the PPP start outward.
pub fn cp_given_k_distances(
    r: &[f64],
    lambda: f64,
    p: f64,
    n0: f64,
    beta: f64,
    alpha: f64,
    mu: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_common(lambda, p, n0, beta, alpha, mu)?;
    if r.is_empty() {
        return Err(Error::invalid("r", "need at least one distance"));
    }
    let increasing = r[0] > 0.0
        && r[0].is_finite()
        && r.windows(2).all(|w| w[0] < w[1] && w[1].is_finite());
    if !increasing {
        return Err(Error::invalid(
            "r",
            "distances must be finite, positive, strictly increasing",
        ));
    }
    cp_conditional(
        r[0],
        &r[1..],
        r[r.len() - 1],
        lambda,
        p,
        n0,
        beta,
        alpha,
        mu,
        spec,
    )
}

/// Expected rate from a coverage kernel: E[log₂(1+SINR)] = ∫_{t≥0}
/// P[log₂(1+SINR) ≥ t] dt = ∫_{t≥0} kernel(2^t − 1) dt. The kernel is any
/// map β ↦ P[SINR ≥ β]; thresholds past f64 range count as zero coverage,
/// and a threshold that rounds to exactly 0 counts as certain coverage
/// (P[SINR ≥ 0] = 1 for any kernel), so kernels may demand β > 0.
pub fn rate_from_coverage<F>(mut cp_kernel: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(
        |t| {
            let beta = t.exp2() - 1.0;
            if !beta.is_finite() {
                return Ok(0.0);
            }
            if beta == 0.0 {
                return Ok(1.0);
            }
            cp_kernel(beta)
        },
        0.0,
        f64::INFINITY,
        spec,
        "rate threshold integral",
    )
}

/// The interference kernel φ(α, y, x) = ∫_{u ≥ y^{-2/α}} du/(1 + x^{-α}u^{α/2})
/// appearing in every interference-limited ratio-law expression. Increasing
/// in y (lower limit drops) and in x (integrand grows); φ → 0 as x → 0.
///
/// Computed as x²·∫_{ℓ}^∞ dz/(1+z^{α/2}) with ℓ = y^{-2/α}/x²: the x-scaling
/// moves into the prefactor exactly, so minute x (deep ratio tails) cannot
/// underflow inside the integrand.
pub fn phi(alpha: f64, y: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::invalid("alpha", format!("need α > 2 (got {alpha})")));
    }
    if !(y > 0.0) {
        return Err(Error::invalid("y", format!("need y > 0 (got {y})")));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::invalid("x", format!("need x ∈ (0,1] (got {x})")));
    }
    let lo = y.powf(-2.0 / alpha) / (x * x);
    let half_alpha = alpha / 2.0;
    let split = TAIL_DOMINANCE.powf(1.0 / half_alpha);
    let value = if lo >= split {
        power_tail_series(lo, 0.0, half_alpha)
    } else {
        integrate(
            |z| Ok(1.0 / (1.0 + pow_pos(z, half_alpha))),
            lo,
            split,
            spec,
            "phi kernel integral",
        )? + power_tail_series(split, 0.0, half_alpha)
    };
    Ok(x * x * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const INV_PI: f64 = std::f64::consts::FRAC_1_PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn interference_integral_arctan_oracle() {
        // At α = 4, β = 1: ∫₁^∞ w/(1+w⁴) dw = π/8.
        let v = interference_integral(1.0, 1.0, 4.0, &spec()).unwrap();
        assert!((v - PI / 8.0).abs() < 1e-10);
        // General α = 4 closed form: (√β/2)·arctan(√β/x²).
        for &(x, beta) in &[(1.0, 0.3162277660168379), (2.0, 1.0), (0.5, 3.1622776601683795)] {
            let v = interference_integral(x, beta, 4.0, &spec()).unwrap();
            let truth = beta.sqrt() / 2.0 * (beta.sqrt() / (x * x)).atan();
            assert!((v - truth).abs() < 1e-10 * truth.max(1.0), "x={x} beta={beta}");
        }
        assert_eq!(interference_integral(1.0, 0.0, 4.0, &spec()).unwrap(), 0.0);
        // Extreme thresholds from the rate transform stay finite and
        // monotone.
        let huge = interference_integral(1.0, 1e290, 4.0, &spec()).unwrap();
        assert!(huge.is_finite() && huge > 1e100);
        // Deep power-tail regime (tiny β pushes the scaled lower limit past
        // any quadrature's reach): arctan(z) ≈ z gives (√β/2)·(√β/x²) = β/2.
        let deep = interference_integral(1.0, 1e-52, 4.0, &spec()).unwrap();
        let truth = 1e-52 / 2.0;
        assert!((deep - truth).abs() < 1e-9 * truth, "got {deep}");
    }

    #[test]
    fn cp_given_r1_matches_arctan_value() {
        // λ = 1/π, α = 4, β = 1, r₁ = 1 → exp(−π/4).
        let v = cp_given_r1(1.0, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &spec()).unwrap();
        assert!((v - (-FRAC_PI_4).exp()).abs() < 1e-9);
        assert!((v - 0.455938127765996).abs() < 1e-9);
    }

    #[test]
    fn cp_given_r1_limits_and_monotonicity() {
        // r₁ → 0⁺: no noise penalty, no interference → 1.
        let v = cp_given_r1(1e-8, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        // Strictly decreasing in λ.
        let lo = cp_given_r1(1.0, 0.5 * INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &spec()).unwrap();
        let hi = cp_given_r1(1.0, 2.0 * INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &spec()).unwrap();
        assert!(hi < lo);
    }

    #[test]
    fn cp_given_r1_r2_matches_split_closed_form() {
        // λ = 1/π, α = 4, β = 1, r = (1,2):
        // (16/17)·exp(−2·∫₂^∞ u/(1+u⁴)du), ∫ = (π/2 − arctan 4)/2.
        let v = cp_given_r1_r2(1.0, 2.0, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &spec()).unwrap();
        let tail = (FRAC_PI_2 - 4.0f64.atan()) / 2.0;
        let truth = (16.0 / 17.0) * (-2.0 * tail).exp();
        assert!((v - truth).abs() < 1e-9);
        assert!((v - 0.736678813070562).abs() < 1e-9);
        // Knowing that the strongest interferer sits at r₂ = 2 (rather than
        // anywhere past r₁) must help:
        let base = cp_given_r1(1.0, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &spec()).unwrap();
        assert!(v > base);
    }

    #[test]
    fn cp_split_identity_reconnects_r1_and_r1_r2_tails() {
        // The PGFL exponent is additive over disjoint annuli: Jint(1) =
        // ∫_{r1..r2} + Jint(r2/r1-scaled). This splices cp_given_r1's
        // integral out of cp_given_r1_r2's, the continuity check between
        // the two kernels.
        let s = spec();
        let (r1, r2) = (1.0, 1.7);
        let full = interference_integral(1.0, 1.0, 4.0, &s).unwrap();
        let outer = interference_integral(r2 / r1, 1.0, 4.0, &s).unwrap();
        let middle = integrate(
            |w| Ok(w / (1.0 + w.powi(4))),
            1.0,
            r2 / r1,
            &s,
            "annulus",
        )
        .unwrap();
        assert!((full - (middle + outer)).abs() < 1e-8);
    }

    #[test]
    fn cp_given_r1_r2_far_interferer_leaves_noise_only() {
        // r₂ → ∞ with noise: both interference factors → 1, leaving
        // exp(−μβN₀r₁^α/P).
        let v = cp_given_r1_r2(1.0, 1e7, INV_PI, 1.0, 0.5, 1.0, 4.0, 1.0, &spec()).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn cp_given_k_reduces_to_lower_orders() {
        let s = spec();
        let one = cp_given_k_distances(&[1.3], INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).unwrap();
        assert_eq!(
            one,
            cp_given_r1(1.3, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).unwrap()
        );
        let two =
            cp_given_k_distances(&[1.3, 2.1], INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).unwrap();
        assert_eq!(
            two,
            cp_given_r1_r2(1.3, 2.1, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).unwrap()
        );
    }

    #[test]
    fn cp_given_k_golden_and_monotonicity() {
        let s = spec();
        // Golden for k = 3, r = (1,2,3) at λ = 1/π, α = 4, β = 1, N₀ = 0,
        // frozen from an independent quadrature oracle (also validated
        // against conditional Monte Carlo in the integration suite).
        let v = cp_given_k_distances(&[1.0, 2.0, 3.0], INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s)
            .unwrap();
        assert!((v - 0.832308648181213).abs() < 1e-9, "got {v}");
        // Pushing any known interferer outward cannot hurt coverage.
        let farther =
            cp_given_k_distances(&[1.0, 2.5, 3.0], INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).unwrap();
        assert!(farther > v);
        // Invalid distance lists are rejected.
        assert!(cp_given_k_distances(&[], INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).is_err());
        assert!(
            cp_given_k_distances(&[2.0, 1.0], INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).is_err()
        );
    }

    #[test]
    fn rate_from_step_kernel_is_unit() {
        // kernel = 1{β < 1}: the step sits at t = 1, so the integral is 1.
        let v = rate_from_coverage(|b| Ok(if b < 1.0 { 1.0 } else { 0.0 }), &spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-7);
        let z = rate_from_coverage(|_| Ok(0.0), &spec()).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn rate_of_conditional_kernel_exceeds_its_coverage_bound() {
        // E[log₂(1+SINR)] ≥ log₂(1+β)·P[SINR ≥ β] (Markov on the rate CCDF).
        let s = spec();
        let rate = rate_from_coverage(
            |beta| cp_given_r1(1.0, INV_PI, 1.0, 0.0, beta.max(1e-300), 4.0, 1.0, &s),
            &s,
        )
        .unwrap();
        let cov = cp_given_r1(1.0, INV_PI, 1.0, 0.0, 1.0, 4.0, 1.0, &s).unwrap();
        assert!(rate >= cov); // log₂(2)·cov = cov
        assert!(rate > 0.5 && rate < 10.0, "sane magnitude, got {rate}");
    }

    #[test]
    fn phi_oracles() {
        let s = spec();
        // φ(4,1,1) = ∫₁^∞ du/(1+u²) = π/4.
        assert!((phi(4.0, 1.0, 1.0, &s).unwrap() - FRAC_PI_4).abs() < 1e-10);
        // α = 4 closed form x²·arctan(x²√y) at (y,x) = (2, 0.7).
        let v = phi(4.0, 2.0, 0.7, &s).unwrap();
        assert!((v - 0.296934427464089).abs() < 1e-10);
        // y → ∞ at x = 1: full arctan integral π/2.
        assert!((phi(4.0, 1e12, 1.0, &s).unwrap() - FRAC_PI_2).abs() < 1e-6);
        // x → 0⁺ vanishes without underflow trouble.
        let tiny = phi(4.0, 1.0, 1e-8, &s).unwrap();
        assert!(tiny >= 0.0 && tiny < 1e-15);
        // Monotone in y and in x.
        assert!(phi(4.0, 2.0, 0.7, &s).unwrap() > phi(4.0, 1.0, 0.7, &s).unwrap());
        assert!(phi(4.0, 1.0, 0.9, &s).unwrap() > phi(4.0, 1.0, 0.7, &s).unwrap());
        // Domain errors.
        assert!(phi(2.0, 1.0, 1.0, &s).is_err());
        assert!(phi(4.0, 0.0, 1.0, &s).is_err());
        assert!(phi(4.0, 1.0, 1.5, &s).is_err());
    }

    #[test]
    fn phi_bridges_to_interference_integral() {
        // Substituting u = β^{-2/α}w² turns φ into the PGFL exponent:
        // β^{2/α}·φ(α, β, x) = 2x²·Jint(1/x). Two independently coded
        // integrals must agree on it.
        let s = spec();
        for &alpha in &[3.0, 4.0, 6.5] {
            for &beta in &[0.3162277660168379f64, 1.0, 3.1622776601683795] {
                for &x in &[0.4, 0.7, 1.0] {
                    let lhs = beta.powf(2.0 / alpha) * phi(alpha, beta, x, &s).unwrap();
                    let rhs =
                        2.0 * x * x * interference_integral(1.0 / x, beta, alpha, &s).unwrap();
                    // Two stacked quadratures, each at rel 1e-8, certify
                    // only ~a few 1e-8 of agreement — not 1e-9.
                    assert!(
                        (lhs - rhs).abs() < 5e-8 * rhs.max(1e-12),
                        "alpha={alpha} beta={beta} x={x}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }
}
