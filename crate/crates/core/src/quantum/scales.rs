//! Closed-form scales for Gaussian spreading under the free Hamiltonian.
//!
//! With `ψ₀ ∝ exp(−x²/(2λ²))` the density stays Gaussian with width
//! `λ_t = √(λ² + (ħt/(mλ))²)`. For `K = [−ℓ, ℓ]` the mass in `K` at time 0
//! and in `[−ℓ−ct, ℓ+ct]` at time `t` are `erf(ℓ/λ)` and `erf((ℓ+ct)/λ_t)`,
//! so CE for this `K` reduces to comparing the two arguments.

use serde::Serialize;

use super::Constants;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleReport {
    pub mass: f64,
    pub lambda: f64,
    /// `None` stands for `t = ∞`.
    pub t: Option<f64>,
    /// Smallest violating half-width at `t`; absent for `t = ∞`.
    pub ell_min: Option<f64>,
    /// `c m λ² / ħ`, the `t → ∞` limit of `ell_min`.
    pub ell_min_asymptotic: f64,
    /// `ħ / (m c)`.
    pub compton: f64,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || value.is_nan() {
        return Err(Error::OutOfRange { name, value });
    }
    Ok(())
}

/// `λ_t = √(λ² + (ħt/(mλ))²)`.
pub fn evolved_width(mass: f64, lambda: f64, t: f64, k: &Constants) -> f64 {
    lambda.hypot(k.hbar * t / (mass * lambda))
}

/// `ℓ_min = (c m λ²)/(t ħ²) · (m λ² + √(m² λ⁴ + t² ħ²))`. `t` may be infinite.
pub fn min_violation_halfwidth(mass: f64, lambda: f64, t: f64, k: &Constants) -> Result<ScaleReport> {
    positive("mass", mass)?;
    positive("lambda", lambda)?;
    positive("t", t)?;
    let asymptotic = k.c * mass * lambda * lambda / k.hbar;
    let ell_min = t.is_finite().then(|| {
        let ml2 = mass * lambda * lambda;
        k.c * ml2 / (t * k.hbar * k.hbar) * (ml2 + ml2.hypot(t * k.hbar))
    });
    Ok(ScaleReport {
        mass,
        lambda,
        t: t.is_finite().then_some(t),
        ell_min,
        ell_min_asymptotic: asymptotic,
        compton: k.hbar / (mass * k.c),
    })
}

/// CE for `K = [−ℓ, ℓ]` under free evolution: `ℓ/λ ≤ (ℓ + ct)/λ_t`.
pub fn analytic_ce_gaussian(mass: f64, lambda: f64, t: f64, ell: f64, k: &Constants) -> Result<bool> {
    positive("mass", mass)?;
    positive("lambda", lambda)?;
    positive("t", t)?;
    positive("ell", ell)?;
    let lt = evolved_width(mass, lambda, t, k);
    Ok(ell / lambda <= (ell + k.c * t) / lt)
}

/// The `ℓ` at which the width-ratio test changes verdict: `ctλ/(λ_t − λ)`.
pub fn width_ratio_threshold(mass: f64, lambda: f64, t: f64, k: &Constants) -> Result<f64> {
    positive("mass", mass)?;
    positive("lambda", lambda)?;
    positive("t", t)?;
    let lt = evolved_width(mass, lambda, t, k);
    Ok(k.c * t * lambda / (lt - lambda))
}
