//! Relativistic causality checks for time-evolving detection statistics.
//!
//! The crate tests whether probability measures on the time slices of
//! Minkowski spacetime evolve causally, and how that interacts with detector
//! measurements:
//!
//! - [`spacetime`]: the causal order, slice futures and Lorentz boosts.
//! - [`measure`] and [`region`]: slice measures (atoms or grids) and compact box regions.
//! - [`transport`]: the causal evolution (CE) condition via brute force and max-flow.
//! - [`conditions`]: measurement scenarios and the NS / A1 / A2 checkers.
//! - [`quantum`]: spectral propagators and Born-rule statistics.
//! - [`protocol`]: signalling protocols built from no-signalling violations.
//! - [`cli`]: the `causal-lab` command line front end.

// `!(x > 0.0)` style guards are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditions;
pub mod error;
pub mod measure;
pub mod protocol;
pub mod quantum;
pub mod region;
pub mod spacetime;
pub mod transport;
pub mod weight;

pub use error::{Error, Result};
pub use measure::{GridGeometry, SliceMeasure};
pub use region::{Aabb, Region};
pub use spacetime::{BoostedFrame, CausalStructure, Event};
pub use weight::{Exact, Weight};
