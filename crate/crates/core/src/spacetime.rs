//! Minkowski causal structure.
//!
//! Events carry a time coordinate and a spatial vector of dimension 1, 2 or 3.
//! The causal relation `a ⪯ b` holds iff `c·(t_b − t_a) ≥ ‖x_b − x_a‖`, with the
//! closed light cone counted as causal. All comparisons use an absolute slack
//! of [`EPS_CAUSAL`] on that inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::Region;

/// Absolute slack on the defining inequality of `⪯`.
pub const EPS_CAUSAL: f64 = 1e-12;

/// A point of Minkowski spacetime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: Vec<f64>,
}

impl Event {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Event { t, x: x.into() }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

/// Spatial dimension and signal speed of the ambient spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalStructure {
    pub dim: usize,
    pub c: f64,
}

impl CausalStructure {
    pub fn new(dim: usize, c: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSignalSpeed(c));
        }
        Ok(CausalStructure { dim, c })
    }

    /// Natural units, `c = 1`.
    pub fn natural(dim: usize) -> Self {
        Self::new(dim, 1.0).expect("dimension in 1..=3")
    }

    fn check(&self, e: &Event) -> Result<()> {
        if e.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: e.dim(),
            });
        }
        if !e.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// `c·Δt − ‖Δx‖`; nonnegative on and inside the future light cone.
    fn cone_margin(&self, a: &Event, b: &Event) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.c * (b.t - a.t) - euclid(&a.x, &b.x))
    }
}

/// A frame moving with velocity `v` along spatial axis `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostedFrame {
    pub v: f64,
    pub axis: usize,
}

impl BoostedFrame {
    pub fn new(v: f64, axis: usize, cs: &CausalStructure) -> Result<Self> {
        if !(v.abs() < cs.c) {
            return Err(Error::SuperluminalBoost { v, c: cs.c });
        }
        if axis >= cs.dim {
            return Err(Error::DimensionMismatch {
                expected: cs.dim,
                got: axis + 1,
            });
        }
        Ok(BoostedFrame { v, axis })
    }

    pub fn inverse(&self) -> Self {
        BoostedFrame {
            v: -self.v,
            axis: self.axis,
        }
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// `a ⪯ b`: `b` lies in the closed causal future of `a`.
pub fn causally_precedes(a: &Event, b: &Event, cs: &CausalStructure) -> Result<bool> {
    Ok(cs.cone_margin(a, b)? >= -EPS_CAUSAL)
}

/// `b ∈ I⁺(a)`: strictly inside the future light cone.
pub fn chronologically_precedes(a: &Event, b: &Event, cs: &CausalStructure) -> Result<bool> {
    Ok(cs.cone_margin(a, b)? > EPS_CAUSAL)
}

pub fn spacelike_separated(a: &Event, b: &Event, cs: &CausalStructure) -> Result<bool> {
    Ok(!causally_precedes(a, b, cs)? && !causally_precedes(b, a, cs)?)
}

/// `j⁺(K)` on the slice `dt` later, as a box region.
///
/// Each box grows by `c·dt` per axis. In one dimension this is exact; in
/// higher dimensions it over-approximates the Euclidean cone (sup-metric).
pub fn causal_future_on_slice(k: &Region, dt: f64, cs: &CausalStructure) -> Result<Region> {
    if dt < 0.0 || !dt.is_finite() {
        return Err(Error::NegativeDuration(dt));
    }
    if k.dim() != cs.dim {
        return Err(Error::DimensionMismatch {
            expected: cs.dim,
            got: k.dim(),
        });
    }
    if k.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(k.expand(cs.c * dt))
}

/// Lorentz transformation into the frame `f`.
pub fn boost(e: &Event, f: &BoostedFrame, cs: &CausalStructure) -> Result<Event> {
    cs.check(e)?;
    if !(f.v.abs() < cs.c) {
        return Err(Error::SuperluminalBoost { v: f.v, c: cs.c });
    }
    if f.axis >= cs.dim {
        return Err(Error::DimensionMismatch {
            expected: cs.dim,
            got: f.axis + 1,
        });
    }
    let beta = f.v / cs.c;
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    let xa = e.x[f.axis];
    let mut x = e.x.clone();
    x[f.axis] = gamma * (xa - f.v * e.t);
    let t = gamma * (e.t - f.v * xa / (cs.c * cs.c));
    Ok(Event { t, x })
}

/// Minkowski interval `c²Δt² − ‖Δx‖²`.
pub fn interval(a: &Event, b: &Event, cs: &CausalStructure) -> Result<f64> {
    cs.check(a)?;
    cs.check(b)?;
    let dt = b.t - a.t;
    let dx2: f64 = a.x.iter().zip(&b.x).map(|(u, v)| (u - v) * (u - v)).sum();
    Ok(cs.c * cs.c * dt * dt - dx2)
}
