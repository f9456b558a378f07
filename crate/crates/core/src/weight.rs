//! Scalar types usable as probability weights.
//!
//! Everything that touches masses (measures, flows, the condition checkers) is
//! generic over [`Weight`]. `f64` carries the floating tolerances; [`Exact`]
//! is a rational type whose tolerances are zero, so comparisons are exact.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Exact rational weight. `i128` components leave headroom for the small
/// denominators used by the hand-built families.
pub type Exact = Ratio<i128>;

/// Absolute slack for normalisation and conditioning checks.
pub const EPS_MASS: f64 = 1e-9;
/// Absolute slack for max-flow feasibility verdicts.
pub const EPS_FLOW: f64 = 1e-9;

pub trait Weight:
    Num + Copy + PartialOrd + Neg<Output = Self> + Sum + Debug + Send + Sync + 'static
{
    /// True for tolerance-free arithmetic.
    const EXACT: bool;

    fn eps_mass() -> Self;
    fn eps_flow() -> Self;
    /// Residual capacities at or below this are treated as saturated.
    fn eps_residual() -> Self;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn positive_part(self) -> Self {
        self.max(Self::zero())
    }

    /// JSON rendering: a number for floats, a `"p/q"` string for rationals.
    fn to_json(self) -> serde_json::Value {
        serde_json::json!(self.to_f64())
    }
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn eps_mass() -> Self {
        EPS_MASS
    }

    fn eps_flow() -> Self {
        EPS_FLOW
    }

    fn eps_residual() -> Self {
        1e-15
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Weight for Exact {
    const EXACT: bool = true;

    fn eps_mass() -> Self {
        Ratio::from_integer(0)
    }

    fn eps_flow() -> Self {
        Ratio::from_integer(0)
    }

    fn eps_residual() -> Self {
        Ratio::from_integer(0)
    }

    /// Best rational approximation with a bounded denominator, so decimal
    /// literals such as `0.1` map to `1/10` rather than a 2^-55 dyadic.
    fn from_f64(x: f64) -> Self {
        Ratio::approximate_float(x).unwrap_or_else(|| Ratio::from_integer(0))
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn to_json(self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_exact(text: &str) -> Option<Exact> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Ok(n) = text.parse::<i128>() {
        return Some(Ratio::from_integer(n));
    }
    // decimal literal: scale by a power of ten
    let (int, frac) = text.split_once('.')?;
    let digits = format!("{int}{frac}");
    let n: i128 = digits.parse().ok()?;
    let d = 10_i128.checked_pow(frac.len() as u32)?;
    Some(Ratio::new(n, d))
}
