//! Compact spatial regions as finite unions of closed axis-aligned boxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed axis-aligned box `[lo_0, hi_0] × … × [lo_{d-1}, hi_{d-1}]`.
/// Degenerate axes (`lo == hi`) are allowed, so points are boxes too.
#[derive(Debug, Clone, PartialEq)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for (axis, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::NonFinite);
            }
            if a > b {
                return Err(Error::EmptyBox { axis, lo: a, hi: b });
            }
        }
        Ok(Aabb { lo, hi })
    }

    pub fn point(x: &[f64]) -> Self {
        Aabb {
            lo: x.to_vec(),
            hi: x.to_vec(),
        }
    }

    /// Cube of half-width `half` around `center`.
    pub fn cube(center: &[f64], half: f64) -> Self {
        Aabb {
            lo: center.iter().map(|c| c - half).collect(),
            hi: center.iter().map(|c| c + half).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn expand(&self, r: f64) -> Aabb {
        Aabb {
            lo: self.lo.iter().map(|a| a - r).collect(),
            hi: self.hi.iter().map(|b| b + r).collect(),
        }
    }

    /// Euclidean distance from `p` to the nearest point of the box.
    pub fn dist_to(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (a, b))| {
                let d = if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                };
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean distance from `p` to the farthest point of the box.
    pub fn farthest_dist(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (a, b))| {
                let d = (x - a).abs().max((x - b).abs());
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    fn intersects(&self, other: &Aabb, tol: f64) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((a, b), (c, d))| *a <= d + tol && *c <= b + tol)
    }

    /// Pieces of `self` not covered by `other`.
    ///
    /// A piece is produced along a cut axis only when its width there exceeds
    /// `tol`; pieces share boundaries with `other` but no interior.
    fn subtract(&self, other: &Aabb, tol: f64) -> Vec<Aabb> {
        if !self.intersects(other, tol) {
            return vec![self.clone()];
        }
        let mut rest = self.clone();
        let mut out = Vec::new();
        for axis in 0..self.dim() {
            if rest.lo[axis] < other.lo[axis] - tol {
                let mut piece = rest.clone();
                piece.hi[axis] = other.lo[axis];
                out.push(piece);
                rest.lo[axis] = other.lo[axis];
            }
            if rest.hi[axis] > other.hi[axis] + tol {
                let mut piece = rest.clone();
                piece.lo[axis] = other.hi[axis];
                out.push(piece);
                rest.hi[axis] = other.hi[axis];
            }
        }
        out
    }
}

/// A finite union of closed boxes, kept with pairwise disjoint interiors.
///
/// In one dimension the canonical form is the sorted list of maximal
/// intervals, so equality of regions is structural there.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dim: usize,
    boxes: Vec<Aabb>,
}

impl Region {
    pub fn empty(dim: usize) -> Self {
        Region {
            dim,
            boxes: Vec::new(),
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::from_aabbs(1, vec![Aabb::new(vec![lo], vec![hi]).expect("lo <= hi")])
            .expect("1-d interval")
    }

    pub fn point(x: &[f64]) -> Self {
        Region {
            dim: x.len(),
            boxes: vec![Aabb::point(x)],
        }
    }

    /// Boxes given as per-axis `[lo, hi]` pairs.
    pub fn from_boxes(dim: usize, boxes: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let aabbs = boxes
            .into_iter()
            .map(|b| {
                let (lo, hi) = b.iter().map(|[a, z]| (*a, *z)).unzip();
                Aabb::new(lo, hi)
            })
            .collect::<Result<Vec<_>>>()?;
        Region::from_aabbs(dim, aabbs)
    }

    pub fn from_aabbs(dim: usize, boxes: Vec<Aabb>) -> Result<Self> {
        if let Some(b) = boxes.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
        let solid = boxes.iter().all(|b| b.lo.iter().zip(&b.hi).all(|(a, z)| a < z));
        if dim > 1 && solid && boxes.len() > 1 {
            return Ok(Region {
                dim,
                boxes: compress(dim, &boxes),
            });
        }
        let mut r = Region::empty(dim);
        for b in boxes {
            r.insert(b);
        }
        r.normalize();
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Aabb] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    pub fn volume(&self) -> f64 {
        self.boxes.iter().map(Aabb::volume).sum()
    }

    /// Euclidean distance from `p` to the region (`inf` when empty).
    pub fn dist_to(&self, p: &[f64]) -> f64 {
        self.boxes
            .iter()
            .map(|b| b.dist_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from `p` to the farthest point of the region.
    pub fn farthest_dist(&self, p: &[f64]) -> f64 {
        self.boxes
            .iter()
            .map(|b| b.farthest_dist(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut all = self.boxes.clone();
        all.extend(other.boxes.iter().cloned());
        Region::from_aabbs(self.dim, all)
    }

    /// Sup-metric dilation by `r`: each box grows by `r` on every side.
    pub fn expand(&self, r: f64) -> Region {
        Region::from_aabbs(self.dim, self.boxes.iter().map(|b| b.expand(r)).collect())
            .expect("dimension preserved")
    }

    /// Closed-set inclusion, with boundary slack `tol`.
    pub fn is_subset_of_tol(&self, other: &Region, tol: f64) -> bool {
        self.boxes.iter().all(|b| {
            let mut pending = vec![b.clone()];
            for o in &other.boxes {
                pending = pending.iter().flat_map(|p| p.subtract(o, tol)).collect();
                if pending.is_empty() {
                    break;
                }
            }
            pending.is_empty()
        })
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.is_subset_of_tol(other, 0.0)
    }

    pub fn approx_eq(&self, other: &Region, tol: f64) -> bool {
        self.dim == other.dim && self.is_subset_of_tol(other, tol) && other.is_subset_of_tol(self, tol)
    }

    pub fn bounding_box(&self) -> Option<Aabb> {
        let first = self.boxes.first()?;
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for b in &self.boxes[1..] {
            for i in 0..self.dim {
                lo[i] = lo[i].min(b.lo[i]);
                hi[i] = hi[i].max(b.hi[i]);
            }
        }
        Some(Aabb { lo, hi })
    }

    fn insert(&mut self, b: Aabb) {
        let mut pending = vec![b];
        for existing in &self.boxes {
            pending = pending
                .iter()
                .flat_map(|p| p.subtract(existing, 0.0))
                .collect();
            if pending.is_empty() {
                return;
            }
        }
        self.boxes.extend(pending);
    }

    fn normalize(&mut self) {
        if self.dim != 1 {
            return;
        }
        self.boxes
            .sort_by(|a, b| a.lo[0].total_cmp(&b.lo[0]).then(a.hi[0].total_cmp(&b.hi[0])));
        let mut merged: Vec<Aabb> = Vec::with_capacity(self.boxes.len());
        for b in self.boxes.drain(..) {
            match merged.last_mut() {
                Some(last) if b.lo[0] <= last.hi[0] => {
                    last.hi[0] = last.hi[0].max(b.hi[0]);
                }
                _ => merged.push(b),
            }
        }
        self.boxes = merged;
    }
}

/// Disjoint box cover of a union of solid boxes, via the grid of all box
/// edges: elementary cells inside some box are marked, joined into runs along
/// the last axis, and equal runs in adjacent slabs are merged.
/// Leading-axis cell spans and a run `[a, z)` along the last axis.
type Slab = (Vec<(usize, usize)>, usize, usize);

fn compress(dim: usize, boxes: &[Aabb]) -> Vec<Aabb> {
    let coords: Vec<Vec<f64>> = (0..dim)
        .map(|axis| {
            let mut c: Vec<f64> = boxes.iter().flat_map(|b| [b.lo[axis], b.hi[axis]]).collect();
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let shape: Vec<usize> = coords.iter().map(|c| c.len() - 1).collect();
    let mut marked = vec![false; shape.iter().product()];
    let index = |axis: usize, v: f64| coords[axis].binary_search_by(|x| x.total_cmp(&v)).expect("edge coordinate");
    for b in boxes {
        let ranges: Vec<(usize, usize)> = (0..dim).map(|a| (index(a, b.lo[a]), index(a, b.hi[a]))).collect();
        let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        'cells: loop {
            let flat = idx.iter().zip(&shape).fold(0, |acc, (i, n)| acc * n + i);
            marked[flat] = true;
            for axis in (0..dim).rev() {
                idx[axis] += 1;
                if idx[axis] < ranges[axis].1 {
                    continue 'cells;
                }
                idx[axis] = ranges[axis].0;
            }
            break;
        }
    }
    // runs along the last axis, keyed by the leading cell index
    let last = dim - 1;
    let mut runs: Vec<(Vec<usize>, usize, usize)> = Vec::new();
    let rows: usize = shape[..last].iter().product();
    for row in 0..rows {
        let mut lead = vec![0; last];
        let mut rem = row;
        for axis in (0..last).rev() {
            lead[axis] = rem % shape[axis];
            rem /= shape[axis];
        }
        let base = row * shape[last];
        let mut j = 0;
        while j < shape[last] {
            if marked[base + j] {
                let start = j;
                while j < shape[last] && marked[base + j] {
                    j += 1;
                }
                runs.push((lead.clone(), start, j));
            } else {
                j += 1;
            }
        }
    }
    // merge equal runs in consecutive slabs of the leading axes
    let mut merged: Vec<Slab> = Vec::new();
    for (lead, a, z) in runs {
        let span: Vec<(usize, usize)> = lead.iter().map(|&i| (i, i + 1)).collect();
        let joined = merged.iter_mut().rev().take(rows.min(4096)).find(|(s, ra, rz)| {
            *ra == a
                && *rz == z
                && s.len() == span.len()
                && s.iter().zip(&span).enumerate().all(|(axis, (x, y))| {
                    if axis + 1 == last {
                        x.1 == y.0
                    } else {
                        x == y
                    }
                })
        });
        match joined {
            Some(m) => m.0[last - 1].1 = span[last - 1].1,
            None => merged.push((span, a, z)),
        }
    }
    merged
        .into_iter()
        .map(|(span, a, z)| {
            let mut lo: Vec<f64> = span.iter().enumerate().map(|(axis, s)| coords[axis][s.0]).collect();
            let mut hi: Vec<f64> = span.iter().enumerate().map(|(axis, s)| coords[axis][s.1]).collect();
            lo.push(coords[last][a]);
            hi.push(coords[last][z]);
            Aabb { lo, hi }
        })
        .collect()
}

/// Wire form: a list of boxes, each a list of per-axis `[lo, hi]` pairs.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RegionRepr(Vec<Vec<[f64; 2]>>);

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegionRepr(
            self.boxes
                .iter()
                .map(|b| b.lo.iter().zip(&b.hi).map(|(a, z)| [*a, *z]).collect())
                .collect(),
        )
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RegionRepr::deserialize(d)?;
        let dim = repr
            .0
            .first()
            .map(Vec::len)
            .ok_or_else(|| serde::de::Error::custom("region needs at least one box"))?;
        Region::from_boxes(dim, repr.0).map_err(serde::de::Error::custom)
    }
}
