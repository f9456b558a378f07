//! Probability measures on fixed-time slices.
//!
//! A [`SliceMeasure`] is either a finite list of atoms or a histogram on a
//! uniform grid. Grid cells belong to a region iff their center does, which
//! keeps [`SliceMeasure::mass`] exactly additive over disjoint regions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{Aabb, Region};
use crate::weight::Weight;

/// Uniform grid: cell `i` spans `[origin + i·h, origin + (i+1)·h]` per axis,
/// with row-major indexing (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin: Vec<f64>,
    pub cell_size: f64,
    pub shape: Vec<usize>,
}

impl GridGeometry {
    pub fn new(origin: Vec<f64>, cell_size: f64, shape: Vec<usize>) -> Result<Self> {
        if origin.len() != shape.len() || origin.is_empty() {
            return Err(Error::InvalidGrid(format!(
                "origin has {} axes, shape has {}",
                origin.len(),
                shape.len()
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidGrid(format!("cell size {cell_size}")));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidGrid("zero-length axis".into()));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GridGeometry {
            origin,
            cell_size,
            shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.origin)
            .map(|(&i, o)| o + (i as f64 + 0.5) * self.cell_size)
            .collect()
    }

    pub fn cell_box(&self, flat: usize) -> Aabb {
        Aabb::cube(&self.center(flat), 0.5 * self.cell_size)
    }

    /// Inclusive range of cell indices along `axis` whose centers lie in `[lo, hi]`.
    pub fn center_range(&self, axis: usize, lo: f64, hi: f64) -> Option<(usize, usize)> {
        let h = self.cell_size;
        let o = self.origin[axis];
        let n = self.shape[axis] as f64;
        // center_i = o + (i + 0.5) h
        let first = ((lo - o) / h - 0.5).ceil().max(0.0);
        let last = ((hi - o) / h - 0.5).floor().min(n - 1.0);
        if first > last || !first.is_finite() || !last.is_finite() {
            return None;
        }
        let (mut a, mut b) = (first as usize, last as usize);
        // guard against rounding at the ends
        while a > 0 && self.axis_center(axis, a - 1) >= lo {
            a -= 1;
        }
        while a <= b && self.axis_center(axis, a) < lo {
            a += 1;
        }
        while b + 1 < self.shape[axis] && self.axis_center(axis, b + 1) <= hi {
            b += 1;
        }
        while b >= a && self.axis_center(axis, b) > hi {
            if b == 0 {
                return None;
            }
            b -= 1;
        }
        (a <= b).then_some((a, b))
    }

    fn axis_center(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + (i as f64 + 0.5) * self.cell_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<W> {
    pub position: Vec<f64>,
    pub weight: W,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation<W> {
    Atoms(Vec<Atom<W>>),
    Grid {
        geometry: GridGeometry,
        weights: Vec<W>,
    },
}

/// The elementary pieces of a measure: an atom (`half = 0`) or a grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit<W> {
    pub center: Vec<f64>,
    pub half: f64,
    pub weight: W,
}

impl<W> Unit<W> {
    pub fn cell(&self) -> Aabb {
        Aabb::cube(&self.center, self.half)
    }
}

/// A (sub-)probability measure supported on the slice at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMeasure<W = f64> {
    time: f64,
    dim: usize,
    repr: Representation<W>,
    total: W,
}

fn position_key(x: &[f64]) -> Vec<u64> {
    // -0.0 and 0.0 are the same coordinate
    x.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl<W: Weight> SliceMeasure<W> {
    pub fn from_atoms(time: f64, atoms: Vec<(Vec<f64>, W)>) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::NonFinite);
        }
        let dim = atoms
            .first()
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::InvalidMeasure("no atoms".into()))?;
        let mut seen = HashMap::new();
        let mut list = Vec::with_capacity(atoms.len());
        for (position, weight) in atoms {
            if position.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: position.len(),
                });
            }
            if position.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            if weight < W::zero() {
                return Err(Error::InvalidMeasure(format!("negative weight {weight:?}")));
            }
            if seen.insert(position_key(&position), ()).is_some() {
                return Err(Error::InvalidMeasure(format!(
                    "duplicate atom position {position:?}"
                )));
            }
            list.push(Atom { position, weight });
        }
        Self::finish(time, dim, Representation::Atoms(list))
    }

    pub fn from_grid(time: f64, geometry: GridGeometry, weights: Vec<W>) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::NonFinite);
        }
        if weights.len() != geometry.len() {
            return Err(Error::InvalidGrid(format!(
                "{} weights for {} cells",
                weights.len(),
                geometry.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| **w < W::zero()) {
            return Err(Error::InvalidMeasure(format!("negative weight {w:?}")));
        }
        let dim = geometry.dim();
        Self::finish(time, dim, Representation::Grid { geometry, weights })
    }

    fn finish(time: f64, dim: usize, repr: Representation<W>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let total = match &repr {
            Representation::Atoms(a) => a.iter().map(|a| a.weight).sum(),
            Representation::Grid { weights, .. } => weights.iter().copied().sum(),
        };
        if total > W::one() + W::eps_mass() {
            return Err(Error::InvalidMeasure(format!("total mass {total:?} exceeds 1")));
        }
        Ok(SliceMeasure {
            time,
            dim,
            repr,
            total,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total(&self) -> W {
        self.total
    }

    pub fn representation(&self) -> &Representation<W> {
        &self.repr
    }

    pub fn is_probability(&self) -> bool {
        (self.total - W::one()).abs() <= W::eps_mass()
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Representation::Atoms(a) => a.len(),
            Representation::Grid { weights, .. } => weights.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same measure on another slice time.
    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn units(&self) -> Vec<Unit<W>> {
        match &self.repr {
            Representation::Atoms(atoms) => atoms
                .iter()
                .map(|a| Unit {
                    center: a.position.clone(),
                    half: 0.0,
                    weight: a.weight,
                })
                .collect(),
            Representation::Grid { geometry, weights } => weights
                .iter()
                .enumerate()
                .map(|(i, &w)| Unit {
                    center: geometry.center(i),
                    half: 0.5 * geometry.cell_size,
                    weight: w,
                })
                .collect(),
        }
    }

    fn check_dim(&self, k: &Region) -> Result<()> {
        if k.dim() != self.dim && !k.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.dim(),
            });
        }
        Ok(())
    }

    /// `m(K)`: total weight of atoms in `K`, or of cells whose center is in `K`.
    pub fn mass(&self, k: &Region) -> Result<W> {
        self.check_dim(k)?;
        Ok(match &self.repr {
            Representation::Atoms(atoms) => atoms
                .iter()
                .filter(|a| k.contains(&a.position))
                .map(|a| a.weight)
                .sum(),
            Representation::Grid { geometry, weights } => {
                if geometry.dim() == 1 {
                    // interval ranges avoid a per-cell membership scan
                    let mut acc = W::zero();
                    for b in k.boxes() {
                        if let Some((lo, hi)) = geometry.center_range(0, b.lo[0], b.hi[0]) {
                            acc = acc + weights[lo..=hi].iter().copied().sum::<W>();
                        }
                    }
                    acc
                } else {
                    weights
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| k.contains(&geometry.center(*i)))
                        .map(|(_, w)| *w)
                        .sum()
                }
            }
        })
    }

    /// Pointwise reweighting; `keep` sees each unit's center.
    fn map_weights(&self, mut f: impl FnMut(&[f64], W) -> W) -> SliceMeasure<W> {
        let repr = match &self.repr {
            Representation::Atoms(atoms) => Representation::Atoms(
                atoms
                    .iter()
                    .map(|a| Atom {
                        position: a.position.clone(),
                        weight: f(&a.position, a.weight),
                    })
                    .collect(),
            ),
            Representation::Grid { geometry, weights } => Representation::Grid {
                geometry: geometry.clone(),
                weights: weights
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| f(&geometry.center(i), w))
                    .collect(),
            },
        };
        let total = match &repr {
            Representation::Atoms(a) => a.iter().map(|a| a.weight).sum(),
            Representation::Grid { weights, .. } => weights.iter().copied().sum(),
        };
        SliceMeasure {
            time: self.time,
            dim: self.dim,
            repr,
            total,
        }
    }

    /// `m` restricted to `K` without renormalisation (a sub-probability measure).
    pub fn restrict(&self, k: &Region) -> Result<SliceMeasure<W>> {
        self.check_dim(k)?;
        Ok(self.map_weights(|x, w| if k.contains(x) { w } else { W::zero() }))
    }

    /// `m(· ∩ K) / m(K)`.
    pub fn restrict_and_renormalize(&self, k: &Region) -> Result<SliceMeasure<W>> {
        let mk = self.mass(k)?;
        if mk <= W::eps_mass() {
            return Err(Error::NullConditioning(mk.to_f64()));
        }
        Ok(self.map_weights(|x, w| if k.contains(x) { w / mk } else { W::zero() }))
    }

    /// Multiplies every weight by `factor` (the result may be a sub-probability measure).
    pub fn scaled(&self, factor: W) -> Result<SliceMeasure<W>> {
        if factor < W::zero() {
            return Err(Error::InvalidMeasure(format!("negative factor {factor:?}")));
        }
        let m = self.map_weights(|_, w| w * factor);
        if m.total > W::one() + W::eps_mass() {
            return Err(Error::InvalidMeasure(format!(
                "scaled total {:?} exceeds 1",
                m.total
            )));
        }
        Ok(m)
    }

    /// Converts weights to another scalar type.
    pub fn convert<V: Weight>(&self) -> SliceMeasure<V> {
        let conv = |w: W| V::from_f64(w.to_f64());
        let repr = match &self.repr {
            Representation::Atoms(atoms) => Representation::Atoms(
                atoms
                    .iter()
                    .map(|a| Atom {
                        position: a.position.clone(),
                        weight: conv(a.weight),
                    })
                    .collect(),
            ),
            Representation::Grid { geometry, weights } => Representation::Grid {
                geometry: geometry.clone(),
                weights: weights.iter().map(|&w| conv(w)).collect(),
            },
        };
        SliceMeasure {
            time: self.time,
            dim: self.dim,
            total: conv(self.total),
            repr,
        }
    }
}

/// A unit present in two aligned measures.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedUnit<W> {
    pub center: Vec<f64>,
    pub half: f64,
    pub left: W,
    pub right: W,
}

/// Pairs the units of two measures: identical grids cell by cell, atoms by
/// exact coordinate equality (missing atoms weigh zero).
pub fn align<W: Weight>(m1: &SliceMeasure<W>, m2: &SliceMeasure<W>) -> Result<Vec<AlignedUnit<W>>> {
    if m1.dim != m2.dim {
        return Err(Error::DimensionMismatch {
            expected: m1.dim,
            got: m2.dim,
        });
    }
    match (&m1.repr, &m2.repr) {
        (
            Representation::Grid {
                geometry: g1,
                weights: w1,
            },
            Representation::Grid {
                geometry: g2,
                weights: w2,
            },
        ) => {
            if g1 != g2 {
                return Err(Error::IncompatibleMeasures(
                    "grids differ in origin, cell size or extent".into(),
                ));
            }
            Ok(w1
                .iter()
                .zip(w2)
                .enumerate()
                .map(|(i, (&a, &b))| AlignedUnit {
                    center: g1.center(i),
                    half: 0.5 * g1.cell_size,
                    left: a,
                    right: b,
                })
                .collect())
        }
        (Representation::Atoms(a1), Representation::Atoms(a2)) => {
            let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
            let mut out: Vec<AlignedUnit<W>> = Vec::with_capacity(a1.len() + a2.len());
            for a in a1 {
                index.insert(position_key(&a.position), out.len());
                out.push(AlignedUnit {
                    center: a.position.clone(),
                    half: 0.0,
                    left: a.weight,
                    right: W::zero(),
                });
            }
            for a in a2 {
                match index.get(&position_key(&a.position)) {
                    Some(&i) => out[i].right = a.weight,
                    None => out.push(AlignedUnit {
                        center: a.position.clone(),
                        half: 0.0,
                        left: W::zero(),
                        right: a.weight,
                    }),
                }
            }
            Ok(out)
        }
        _ => Err(Error::IncompatibleMeasures(
            "cannot compare an atom measure with a grid measure".into(),
        )),
    }
}

/// `a·m1 + b·m2` on the aligned support of the two measures.
pub fn combine<W: Weight>(
    a: W,
    m1: &SliceMeasure<W>,
    b: W,
    m2: &SliceMeasure<W>,
) -> Result<SliceMeasure<W>> {
    let units = align(m1, m2)?;
    match &m1.repr {
        Representation::Grid { geometry, .. } => SliceMeasure::from_grid(
            m1.time,
            geometry.clone(),
            units.iter().map(|u| a * u.left + b * u.right).collect(),
        ),
        Representation::Atoms(_) => SliceMeasure::from_atoms(
            m1.time,
            units
                .into_iter()
                .map(|u| (u.center, a * u.left + b * u.right))
                .collect(),
        ),
    }
}

/// `sup_C |a·m1(C) − b·m2(C)|` over compact `C` disjoint from `outside`.
pub fn scaled_restriction_distance<W: Weight>(
    a: W,
    m1: &SliceMeasure<W>,
    b: W,
    m2: &SliceMeasure<W>,
    outside: &Region,
) -> Result<W> {
    let units = align(m1, m2)?;
    let (mut pos, mut neg) = (W::zero(), W::zero());
    for u in units.iter().filter(|u| !outside.contains(&u.center)) {
        let d = a * u.left - b * u.right;
        if d > W::zero() {
            pos = pos + d;
        } else {
            neg = neg - d;
        }
    }
    Ok(pos.max(neg))
}

/// `sup_C |m1(C) − m2(C)|` over compact `C` disjoint from `outside`: the larger
/// of the positive and negative parts of the pointwise difference there.
pub fn restriction_distance<W: Weight>(
    m1: &SliceMeasure<W>,
    m2: &SliceMeasure<W>,
    outside: &Region,
) -> Result<W> {
    scaled_restriction_distance(W::one(), m1, W::one(), m2, outside)
}

// ---- wire format ----------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub cell_size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    pub weights: Vec<serde_json::Value>,
}

/// `{"time": t, "atoms": [[x…, w], …]}` or `{"time": t, "grid": {…}}`.
/// Weights are JSON numbers, or `"p/q"` strings for exact input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

pub(crate) fn parse_weight<W: Weight>(v: &serde_json::Value) -> Result<W> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .map(W::from_f64)
            .ok_or_else(|| Error::Scenario(format!("bad number {n}"))),
        serde_json::Value::String(s) => crate::weight::parse_exact(s)
            .map(exact_into::<W>)
            .ok_or_else(|| Error::Scenario(format!("bad rational {s:?}"))),
        other => Err(Error::Scenario(format!("weight must be a number, got {other}"))),
    }
}

/// Lossless for exact weights, correctly rounded for floats.
fn exact_into<W: Weight>(r: crate::weight::Exact) -> W {
    let n = *r.numer();
    let d = *r.denom();
    int_weight::<W>(n) / int_weight::<W>(d)
}

fn int_weight<W: Weight>(mut n: i128) -> W {
    let neg = n < 0;
    n = n.abs();
    let two = W::one() + W::one();
    let mut acc = W::zero();
    let mut bit = W::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc + bit;
        }
        bit = bit * two;
        n >>= 1;
    }
    if neg {
        -acc
    } else {
        acc
    }
}

impl MeasureSpec {
    pub fn build<W: Weight>(&self) -> Result<SliceMeasure<W>> {
        match (&self.atoms, &self.grid) {
            (Some(atoms), None) => {
                let parsed = atoms
                    .iter()
                    .map(|row| {
                        let (w, x) = row
                            .split_last()
                            .ok_or_else(|| Error::Scenario("empty atom".into()))?;
                        let x = x
                            .iter()
                            .map(|v| {
                                v.as_f64()
                                    .ok_or_else(|| Error::Scenario(format!("bad coordinate {v}")))
                            })
                            .collect::<Result<Vec<f64>>>()?;
                        if x.is_empty() {
                            return Err(Error::Scenario("atom without coordinates".into()));
                        }
                        Ok((x, parse_weight::<W>(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                SliceMeasure::from_atoms(self.time, parsed)
            }
            (None, Some(g)) => {
                let shape = g.shape.clone().unwrap_or_else(|| vec![g.weights.len()]);
                let geometry = GridGeometry::new(g.origin.clone(), g.cell_size, shape)?;
                let weights = g
                    .weights
                    .iter()
                    .map(parse_weight::<W>)
                    .collect::<Result<Vec<W>>>()?;
                SliceMeasure::from_grid(self.time, geometry, weights)
            }
            _ => Err(Error::Scenario(
                "a measure needs exactly one of \"atoms\" or \"grid\"".into(),
            )),
        }
    }

    pub fn from_measure<W: Weight>(m: &SliceMeasure<W>) -> Self {
        let num = |w: W| w.to_json();
        match &m.repr {
            Representation::Atoms(atoms) => MeasureSpec {
                time: m.time,
                atoms: Some(
                    atoms
                        .iter()
                        .map(|a| {
                            let mut row: Vec<serde_json::Value> =
                                a.position.iter().map(|x| serde_json::json!(x)).collect();
                            row.push(num(a.weight));
                            row
                        })
                        .collect(),
                ),
                grid: None,
            },
            Representation::Grid { geometry, weights } => MeasureSpec {
                time: m.time,
                atoms: None,
                grid: Some(GridSpec {
                    origin: geometry.origin.clone(),
                    cell_size: geometry.cell_size,
                    shape: (geometry.dim() > 1).then(|| geometry.shape.clone()),
                    weights: weights.iter().map(|&w| num(w)).collect(),
                }),
            },
        }
    }
}
