//! Causal evolution of statistics as a transport feasibility problem.
//!
//! CE asks that `μ(K) ≤ ν(j⁺(K))` for every compact `K`. On finite
//! representations this is Hall's condition for a bipartite network
//! `source → μ-units → ν-units → sink` whose middle edges join causally
//! related units, so CE holds iff the max flow saturates `μ`. The source side
//! of a minimum cut is a maximally violating set.
//!
//! A ν-unit is reachable from a μ-unit when its center lies within Euclidean
//! distance `c·Δt` of the μ-unit's cell (a point for atoms). Worst sets are
//! re-evaluated with [`region_deficit`], which applies the same rule.

mod flow;

use serde::Serialize;

pub use flow::Dinic;

use crate::error::{Error, Result};
use crate::measure::{Representation, SliceMeasure, Unit};
use crate::region::{Aabb, Region};
use crate::spacetime::{CausalStructure, EPS_CAUSAL};
use crate::weight::Weight;

/// Largest μ support enumerated by [`check_ce_bruteforce`].
pub const BRUTEFORCE_MAX_ATOMS: usize = 20;
/// Largest node count accepted by [`check_ce_maxflow`].
pub const MAXFLOW_MAX_NODES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bruteforce,
    Maxflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeVerdict<W> {
    pub holds: bool,
    /// Present whenever the maximal deficit is positive.
    pub worst_set: Option<Region>,
    /// `max(0, μ(K) − ν(j⁺(K)))` for the worst `K`.
    pub deficit: W,
    pub method: Method,
}

impl<W: Weight> CeVerdict<W> {
    fn from_deficit(deficit: W, worst: Option<Region>, method: Method) -> Self {
        let deficit = deficit.positive_part();
        let worst_set = if deficit > W::zero() { worst } else { None };
        CeVerdict {
            holds: deficit <= W::eps_flow(),
            worst_set,
            deficit,
            method,
        }
    }
}

fn slice_gap<W: Weight>(mu: &SliceMeasure<W>, nu: &SliceMeasure<W>, cs: &CausalStructure) -> Result<f64> {
    if mu.dim() != cs.dim {
        return Err(Error::DimensionMismatch {
            expected: cs.dim,
            got: mu.dim(),
        });
    }
    if nu.dim() != cs.dim {
        return Err(Error::DimensionMismatch {
            expected: cs.dim,
            got: nu.dim(),
        });
    }
    let dt = nu.time() - mu.time();
    if dt < 0.0 {
        return Err(Error::TimeReversed {
            mu_time: mu.time(),
            nu_time: nu.time(),
        });
    }
    Ok(cs.c * dt)
}

/// `center` lies in the causal future of `cell` on a slice `radius/c` later.
fn reaches(cell: &Aabb, center: &[f64], radius: f64) -> bool {
    cell.dist_to(center) <= radius + EPS_CAUSAL
}

fn positive_units<W: Weight>(m: &SliceMeasure<W>) -> Vec<Unit<W>> {
    m.units()
        .into_iter()
        .filter(|u| u.weight > W::zero())
        .collect()
}

/// For each left unit, the indices (into `right`) of reachable right units.
///
/// When `nu` is a grid, candidates come from the per-axis index window of the
/// dilated cell, so in 1D each left cell touches one interval of right cells.
fn adjacency<W: Weight>(
    left: &[Unit<W>],
    nu: &SliceMeasure<W>,
    right: &[Unit<W>],
    radius: f64,
) -> Vec<Vec<usize>> {
    match nu.representation() {
        Representation::Grid { geometry, weights } => {
            // grid index -> position in `right`
            let mut slot = vec![usize::MAX; weights.len()];
            let mut k = 0;
            for (i, w) in weights.iter().enumerate() {
                if *w > W::zero() {
                    slot[i] = k;
                    k += 1;
                }
            }
            left.iter()
                .map(|u| {
                    let cell = u.cell();
                    let window: Option<Vec<(usize, usize)>> = (0..geometry.dim())
                        .map(|axis| {
                            geometry.center_range(
                                axis,
                                cell.lo[axis] - radius - EPS_CAUSAL,
                                cell.hi[axis] + radius + EPS_CAUSAL,
                            )
                        })
                        .collect();
                    let Some(window) = window else {
                        return Vec::new();
                    };
                    let mut out = Vec::new();
                    let mut idx: Vec<usize> = window.iter().map(|w| w.0).collect();
                    loop {
                        let flat = geometry.flat_index(&idx);
                        if slot[flat] != usize::MAX && reaches(&cell, &geometry.center(flat), radius) {
                            out.push(slot[flat]);
                        }
                        // odometer over the window
                        let mut axis = geometry.dim();
                        loop {
                            if axis == 0 {
                                return out;
                            }
                            axis -= 1;
                            if idx[axis] < window[axis].1 {
                                idx[axis] += 1;
                                break;
                            }
                            idx[axis] = window[axis].0;
                        }
                    }
                })
                .collect()
        }
        Representation::Atoms(_) => left
            .iter()
            .map(|u| {
                let cell = u.cell();
                right
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| reaches(&cell, &r.center, radius))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect(),
    }
}

fn units_region<W>(dim: usize, units: &[&Unit<W>]) -> Region {
    Region::from_aabbs(dim, units.iter().map(|u| u.cell()).collect()).expect("dimension matches")
}

/// Exhaustive CE check over all subsets of μ's support (at most
/// [`BRUTEFORCE_MAX_ATOMS`] positive units).
pub fn check_ce_bruteforce<W: Weight>(
    mu: &SliceMeasure<W>,
    nu: &SliceMeasure<W>,
    cs: &CausalStructure,
) -> Result<CeVerdict<W>> {
    let radius = slice_gap(mu, nu, cs)?;
    let left = positive_units(mu);
    if left.len() > BRUTEFORCE_MAX_ATOMS {
        return Err(Error::TooLarge {
            method: "bruteforce",
            size: left.len(),
            limit: BRUTEFORCE_MAX_ATOMS,
        });
    }
    let right = positive_units(nu);
    let adj = adjacency(&left, nu, &right, radius);
    let words = right.len().div_ceil(64).max(1);
    let masks: Vec<Vec<u64>> = adj
        .iter()
        .map(|js| {
            let mut m = vec![0u64; words];
            for &j in js {
                m[j / 64] |= 1 << (j % 64);
            }
            m
        })
        .collect();

    let n = left.len();
    let mut best = W::zero();
    let mut best_mask = 0u32;
    let mut reach = vec![0u64; words];
    for subset in 1u32..(1u32 << n) {
        reach.iter_mut().for_each(|w| *w = 0);
        let mut mass = W::zero();
        for (i, unit) in left.iter().enumerate() {
            if subset & (1 << i) != 0 {
                mass = mass + unit.weight;
                for (r, m) in reach.iter_mut().zip(&masks[i]) {
                    *r |= m;
                }
            }
        }
        let mut covered = W::zero();
        for (j, unit) in right.iter().enumerate() {
            if reach[j / 64] & (1 << (j % 64)) != 0 {
                covered = covered + unit.weight;
            }
        }
        let deficit = mass - covered;
        if deficit > best {
            best = deficit;
            best_mask = subset;
        }
    }
    let chosen: Vec<&Unit<W>> = left
        .iter()
        .enumerate()
        .filter(|(i, _)| best_mask & (1 << i) != 0)
        .map(|(_, u)| u)
        .collect();
    let worst = (!chosen.is_empty()).then(|| units_region(mu.dim(), &chosen));
    Ok(CeVerdict::from_deficit(best, worst, Method::Bruteforce))
}

/// The bipartite coupling network for a pair of slices.
#[derive(Debug, Clone)]
pub struct FlowNetwork<W> {
    pub left: Vec<Unit<W>>,
    pub right: Vec<Unit<W>>,
    pub dinic: Dinic<W>,
    pub source: usize,
    pub sink: usize,
}

impl<W: Weight> FlowNetwork<W> {
    pub fn build(mu: &SliceMeasure<W>, nu: &SliceMeasure<W>, cs: &CausalStructure) -> Result<Self> {
        let radius = slice_gap(mu, nu, cs)?;
        let left = positive_units(mu);
        let right = positive_units(nu);
        let nodes = left.len() + right.len() + 2;
        if nodes > MAXFLOW_MAX_NODES {
            return Err(Error::TooLarge {
                method: "maxflow",
                size: nodes,
                limit: MAXFLOW_MAX_NODES,
            });
        }
        let source = left.len() + right.len();
        let sink = source + 1;
        let mut dinic = Dinic::new(nodes);
        // anything at least the total μ mass acts as an unbounded capacity
        let unbounded = mu.total() + W::one();
        for (i, u) in left.iter().enumerate() {
            dinic.add_edge(source, i, u.weight);
        }
        for (i, js) in adjacency(&left, nu, &right, radius).into_iter().enumerate() {
            for j in js {
                dinic.add_edge(i, left.len() + j, unbounded);
            }
        }
        for (j, u) in right.iter().enumerate() {
            dinic.add_edge(left.len() + j, sink, u.weight);
        }
        Ok(FlowNetwork {
            left,
            right,
            dinic,
            source,
            sink,
        })
    }
}

/// CE via max-flow; when it fails, the μ-units on the source side of a
/// minimum cut form the worst set.
pub fn check_ce_maxflow<W: Weight>(
    mu: &SliceMeasure<W>,
    nu: &SliceMeasure<W>,
    cs: &CausalStructure,
) -> Result<CeVerdict<W>> {
    let mut net = FlowNetwork::build(mu, nu, cs)?;
    let total: W = net.left.iter().map(|u| u.weight).sum();
    if !(total > W::zero()) {
        return Ok(CeVerdict::from_deficit(W::zero(), None, Method::Maxflow));
    }
    let bound = total + W::one();
    net.dinic.max_flow(net.source, net.sink, bound);
    let side = net.dinic.source_side(net.source);
    let nl = net.left.len();
    let cut_left: W = net
        .left
        .iter()
        .enumerate()
        .filter(|(i, _)| side[*i])
        .map(|(_, u)| u.weight)
        .sum();
    let cut_right: W = net
        .right
        .iter()
        .enumerate()
        .filter(|(j, _)| side[nl + j])
        .map(|(_, u)| u.weight)
        .sum();
    let chosen: Vec<&Unit<W>> = net
        .left
        .iter()
        .enumerate()
        .filter(|(i, _)| side[*i])
        .map(|(_, u)| u)
        .collect();
    let worst = (!chosen.is_empty()).then(|| units_region(mu.dim(), &chosen));
    Ok(CeVerdict::from_deficit(cut_left - cut_right, worst, Method::Maxflow))
}

pub fn check_ce<W: Weight>(
    mu: &SliceMeasure<W>,
    nu: &SliceMeasure<W>,
    cs: &CausalStructure,
    method: Method,
) -> Result<CeVerdict<W>> {
    match method {
        Method::Bruteforce => check_ce_bruteforce(mu, nu, cs),
        Method::Maxflow => check_ce_maxflow(mu, nu, cs),
    }
}

/// CE over the compact subsets of `k` only: `μ` is restricted to `k` first.
pub fn check_ce_within<W: Weight>(
    mu: &SliceMeasure<W>,
    nu: &SliceMeasure<W>,
    k: &Region,
    cs: &CausalStructure,
    method: Method,
) -> Result<CeVerdict<W>> {
    check_ce(&mu.restrict(k)?, nu, cs, method)
}

/// `ν(j⁺(K))` with the unit reachability rule used by the flow network.
pub fn causal_future_mass<W: Weight>(
    nu: &SliceMeasure<W>,
    k: &Region,
    dt: f64,
    cs: &CausalStructure,
) -> Result<W> {
    if dt < 0.0 {
        return Err(Error::NegativeDuration(dt));
    }
    let radius = cs.c * dt;
    Ok(nu
        .units()
        .iter()
        .filter(|u| k.boxes().iter().any(|b| reaches(b, &u.center, radius)))
        .map(|u| u.weight)
        .sum())
}

/// `μ(K) − ν(j⁺(K))` for one compact set.
pub fn region_deficit<W: Weight>(
    mu: &SliceMeasure<W>,
    nu: &SliceMeasure<W>,
    k: &Region,
    cs: &CausalStructure,
) -> Result<W> {
    let radius = slice_gap(mu, nu, cs)?;
    Ok(mu.mass(k)? - causal_future_mass(nu, k, radius / cs.c, cs)?)
}
