//! Signalling protocols built from a no-signalling violation.
//!
//! Given a set `C` outside `j⁺(K)` on which `ν(·|1)` falls short of `ν(·|0)`,
//! [`construct_protocol`] looks for a readout event `q` that sees (a shrunk)
//! `C` in its past but not `K`, and for sender events `p₁…p_k` whose futures
//! jointly cover `K` while none of them lies in the past of `q`. Whether the
//! senders trigger the detector then shows up in the statistics at `q`.
//!
//! All searches run over a finite lattice of candidate events, so a failure
//! means "nothing found at this resolution".

mod simulate;

use serde::{Deserialize, Serialize};

pub use simulate::{simulate_signalling, SignalStats};

use crate::conditions::MeasurementScenario;
use crate::error::{Error, Result};
use crate::measure::align;
use crate::region::{Aabb, Region};
use crate::spacetime::{boost, causally_precedes, BoostedFrame, CausalStructure, Event, EPS_CAUSAL};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignallingProtocol {
    /// Detector region, on the slice `s`.
    pub k: Region,
    /// Readout set, on the slice `t`.
    pub c: Region,
    pub q: Event,
    pub senders: Vec<Event>,
    /// `ν(C|0) − ν(C|1)`.
    pub channel_gap: f64,
    /// `ν(C|0)` and `ν(C|1)`.
    pub nu0_c: f64,
    pub nu1_c: f64,
    pub s: f64,
    pub t: f64,
    /// Cells of `K` used for the cover test.
    #[serde(skip)]
    pub cover_cells: Vec<Aabb>,
}

/// Independent re-check of the protocol clauses with [`causally_precedes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProtocolAudit {
    /// Every corner of every box of `C` (at `t`) precedes `q`.
    pub c_in_past_of_q: bool,
    /// Every cover-cell centre of `K` (at `s`) follows some sender.
    pub k_covered: bool,
    /// No sender precedes `q`.
    pub senders_not_before_q: bool,
    pub gap_positive: bool,
}

impl ProtocolAudit {
    pub fn ok(&self) -> bool {
        self.c_in_past_of_q && self.k_covered && self.senders_not_before_q && self.gap_positive
    }
}

fn corners(b: &Aabb) -> Vec<Vec<f64>> {
    let d = b.dim();
    (0..1usize << d)
        .map(|mask| {
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { b.hi[i] } else { b.lo[i] })
                .collect()
        })
        .collect()
}

impl SignallingProtocol {
    pub fn k_count(&self) -> usize {
        self.senders.len()
    }

    pub fn audit(&self, cs: &CausalStructure) -> Result<ProtocolAudit> {
        let mut c_in_past = true;
        for b in self.c.boxes() {
            for x in corners(b) {
                c_in_past &= causally_precedes(&Event::new(self.t, x), &self.q, cs)?;
            }
        }
        let mut covered = true;
        for cell in &self.cover_cells {
            let e = Event::new(self.s, cell.center());
            let mut any = false;
            for p in &self.senders {
                any |= causally_precedes(p, &e, cs)?;
            }
            covered &= any;
        }
        let mut not_before = true;
        for p in &self.senders {
            not_before &= !causally_precedes(p, &self.q, cs)?;
        }
        Ok(ProtocolAudit {
            c_in_past_of_q: c_in_past,
            k_covered: covered && !self.senders.is_empty(),
            senders_not_before_q: not_before,
            gap_positive: self.channel_gap > 0.0,
        })
    }

    /// Fails unless every clause of [`ProtocolAudit`] holds.
    pub fn validated(self, cs: &CausalStructure) -> Result<Self> {
        let a = self.audit(cs)?;
        if !a.ok() {
            return Err(Error::ProtocolInvariant(format!("{a:?}")));
        }
        Ok(self)
    }
}

/// Candidate events: a uniform lattice on each listed slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Slices searched for the readout event (must lie after `t`).
    pub q_slices: Vec<f64>,
    /// Slices searched for senders (must lie before `s`).
    pub p_slices: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub spacing: f64,
    /// Edge length of the cells into which `K` is split for the cover.
    pub cover_resolution: f64,
}

impl LatticeConfig {
    fn check(&self, dim: usize) -> Result<()> {
        if self.min.len() != dim || self.max.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.min.len().max(self.max.len()),
            });
        }
        for (v, name) in [(self.spacing, "spacing"), (self.cover_resolution, "cover_resolution")] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        if self.min.iter().zip(&self.max).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidGrid("lattice min exceeds max".into()));
        }
        Ok(())
    }

    /// Lattice points in lexicographic order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let counts: Vec<usize> = self
            .min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| ((b - a) / self.spacing + 1e-9).floor() as usize + 1)
            .collect();
        let mut out = vec![Vec::new()];
        for (axis, &n) in counts.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..n).map(move |i| {
                        let mut p = prefix.clone();
                        p.push(self.min[axis] + i as f64 * self.spacing);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn bounds(&self) -> String {
        format!(
            "lattice {:?}..{:?} spacing {}, q slices {:?}, p slices {:?}",
            self.min, self.max, self.spacing, self.q_slices, self.p_slices
        )
    }
}

/// Splits every box of `k` into cells with edges at most `res`.
pub fn cover_cells(k: &Region, res: f64) -> Vec<Aabb> {
    let mut out = Vec::new();
    for b in k.boxes() {
        let d = b.dim();
        let n: Vec<usize> = (0..d)
            .map(|i| (((b.hi[i] - b.lo[i]) / res) - 1e-9).ceil().max(1.0) as usize)
            .collect();
        let total: usize = n.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            let mut lo = vec![0.0; d];
            let mut hi = vec![0.0; d];
            for i in (0..d).rev() {
                let j = rem % n[i];
                rem /= n[i];
                let w = (b.hi[i] - b.lo[i]) / n[i] as f64;
                lo[i] = b.lo[i] + j as f64 * w;
                hi[i] = if j + 1 == n[i] { b.hi[i] } else { b.lo[i] + (j + 1) as f64 * w };
            }
            out.push(Aabb { lo, hi });
        }
    }
    out
}

/// A readout candidate with its shrunk readout set.
#[derive(Debug, Clone)]
struct Readout {
    q: Event,
    cells: Vec<Aabb>,
    nu0: f64,
    nu1: f64,
}

/// Readout events on the lattice outside `J⁺(K)` whose chronological past
/// contains part of the witness with a positive gap, largest gap first.
fn readout_candidates<W: Weight>(
    sc: &MeasurementScenario<W>,
    witness: &Region,
    lattice: &LatticeConfig,
) -> Result<Vec<Readout>> {
    let (s, t, c) = (sc.mu.time(), sc.nu0.time(), sc.cs.c);
    let units: Vec<_> = align(&sc.nu1, &sc.nu0)?
        .into_iter()
        .filter(|u| witness.contains(&u.center) && u.left < u.right)
        .collect();
    let mut out = Vec::new();
    for &tq in &lattice.q_slices {
        if tq <= t {
            continue;
        }
        for x in lattice.points() {
            if sc.k.dist_to(&x) <= c * (tq - s) + EPS_CAUSAL {
                continue;
            }
            let seen: Vec<_> = units
                .iter()
                .filter(|u| Aabb::cube(&u.center, u.half).farthest_dist(&x) < c * (tq - t) - EPS_CAUSAL)
                .collect();
            let nu0: W = seen.iter().map(|u| u.right).sum();
            let nu1: W = seen.iter().map(|u| u.left).sum();
            if seen.is_empty() || !(nu0 - nu1 > W::eps_mass()) {
                continue;
            }
            out.push(Readout {
                q: Event::new(tq, x.clone()),
                cells: seen.iter().map(|u| Aabb::cube(&u.center, u.half)).collect(),
                nu0: nu0.to_f64(),
                nu1: nu1.to_f64(),
            });
        }
    }
    // stable: equal gaps keep lattice order
    out.sort_by(|a, b| (b.nu0 - b.nu1).total_cmp(&(a.nu0 - a.nu1)));
    Ok(out)
}

/// `cell` lies in the chronological future of `p` on the slice `s`.
fn covers(p: &Event, cell: &Aabb, s: f64, c: f64) -> bool {
    let r = c * (s - p.t);
    r > 0.0 && cell.farthest_dist(&p.x) < r - EPS_CAUSAL
}

fn sender_candidates(q: &Event, lattice: &LatticeConfig, s: f64, cs: &CausalStructure) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for &tp in &lattice.p_slices {
        if tp >= s {
            continue;
        }
        for x in lattice.points() {
            let p = Event::new(tp, x);
            if !causally_precedes(&p, q, cs)? {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Greedy cover of `cells` by sender futures; ties go to the earlier
/// candidate in lattice order. `None` if some cell cannot be covered.
fn greedy_cover(cells: &[Aabb], candidates: &[Event], s: f64, c: f64) -> Option<Vec<Event>> {
    let sets: Vec<Vec<usize>> = candidates
        .iter()
        .map(|p| (0..cells.len()).filter(|&i| covers(p, &cells[i], s, c)).collect())
        .collect();
    let mut covered = vec![false; cells.len()];
    let mut left = cells.len();
    let mut chosen = Vec::new();
    while left > 0 {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(j, set)| (j, set.iter().filter(|&&i| !covered[i]).count()))
            .fold((usize::MAX, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain == 0 {
            return None;
        }
        for &i in &sets[best] {
            if !covered[i] {
                covered[i] = true;
                left -= 1;
            }
        }
        chosen.push(candidates[best].clone());
    }
    Some(chosen)
}

/// Builds a protocol from an NS witness (see the module docs).
pub fn construct_protocol<W: Weight>(
    sc: &MeasurementScenario<W>,
    witness: &Region,
    lattice: &LatticeConfig,
) -> Result<SignallingProtocol> {
    let cs = sc.cs;
    lattice.check(cs.dim)?;
    if witness.is_empty() {
        return Err(Error::NoWitness);
    }
    let (s, t) = (sc.mu.time(), sc.nu0.time());
    let readouts = readout_candidates(sc, witness, lattice)?;
    if readouts.is_empty() {
        return Err(Error::NoReadoutEvent(lattice.bounds()));
    }
    let cells = cover_cells(&sc.k, lattice.cover_resolution);
    for r in readouts {
        let candidates = sender_candidates(&r.q, lattice, s, &cs)?;
        let Some(senders) = greedy_cover(&cells, &candidates, s, cs.c) else {
            continue;
        };
        let c = Region::from_aabbs(cs.dim, r.cells.clone())?;
        return SignallingProtocol {
            k: sc.k.clone(),
            c,
            q: r.q,
            senders,
            channel_gap: r.nu0 - r.nu1,
            nu0_c: r.nu0,
            nu1_c: r.nu1,
            s,
            t,
            cover_cells: cells,
        }
        .validated(&cs);
    }
    Err(Error::NoSenderCover(lattice.bounds()))
}

/// Lattice events `p` (on the sender slices) with `K ⊆ I⁺(p)` and `p ⋠ q`.
pub fn single_senders(
    k: &Region,
    q: &Event,
    s: f64,
    lattice: &LatticeConfig,
    cs: &CausalStructure,
) -> Result<Vec<Event>> {
    let cells = cover_cells(k, lattice.cover_resolution);
    Ok(sender_candidates(q, lattice, s, cs)?
        .into_iter()
        .filter(|p| cells.iter().all(|cell| covers(p, cell, s, cs.c)))
        .collect())
}

/// Round trip through a moving partner, in the first spatial axis' plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTrip {
    pub send: Event,
    pub receive: Event,
    /// Partner's sending event (the receipt), in the partner's frame.
    pub relay_boosted: Event,
    /// Partner's receiving event, back in the original frame.
    pub reply: Event,
    /// `reply ⪯ send`: the reply arrives in the causal past of the send.
    pub loop_closed: bool,
}

/// Lets a partner in `frame` repeat the same one-way link (same `Δt`,
/// mirrored `Δx`) as soon as the message arrives, and reports whether the
/// reply lands in the past of the original send.
pub fn round_trip(send: &Event, receive: &Event, frame: &BoostedFrame, cs: &CausalStructure) -> Result<RoundTrip> {
    let dt = receive.t - send.t;
    let dx: Vec<f64> = receive.x.iter().zip(&send.x).map(|(a, b)| a - b).collect();
    let relay = boost(receive, frame, cs)?;
    let reply_boosted = Event::new(relay.t + dt, relay.x.iter().zip(&dx).map(|(x, d)| x - d).collect::<Vec<_>>());
    let reply = boost(&reply_boosted, &frame.inverse(), cs)?;
    let loop_closed = causally_precedes(&reply, send, cs)?;
    Ok(RoundTrip {
        send: send.clone(),
        receive: receive.clone(),
        relay_boosted: relay,
        reply,
        loop_closed,
    })
}

/// [`round_trip`] for the protocol's first sender and its readout event.
pub fn round_trip_check(proto: &SignallingProtocol, frame: &BoostedFrame, cs: &CausalStructure) -> Result<RoundTrip> {
    let send = proto
        .senders
        .first()
        .ok_or_else(|| Error::ProtocolInvariant("protocol without senders".into()))?;
    round_trip(send, &proto.q, frame, cs)
}

// ---- the annulus example --------------------------------------------------

/// 2+1 scenario whose detector region is the annulus `3 ≤ r ≤ 4` (cells of
/// 0.25 whose centres lie in it). Half of `μ` sits on the annulus, half at
/// the centre; a positive detection keeps the particle on the annulus, a
/// negative one or no measurement leaves it at the centre. The centre at
/// `t = 1` is the witness, and no single event sees the whole annulus in its
/// future without also seeing the central readout.
pub fn annulus_scenario() -> Result<(MeasurementScenario, LatticeConfig)> {
    use crate::measure::SliceMeasure;
    let cs = CausalStructure::natural(2);
    let h = 0.25;
    let mut boxes = Vec::new();
    for i in 0..32 {
        for j in 0..32 {
            let lo = [-4.0 + i as f64 * h, -4.0 + j as f64 * h];
            let r = (lo[0] + 0.5 * h).hypot(lo[1] + 0.5 * h);
            if (3.0..=4.0).contains(&r) {
                boxes.push(Aabb {
                    lo: lo.to_vec(),
                    hi: vec![lo[0] + h, lo[1] + h],
                });
            }
        }
    }
    let k = Region::from_aabbs(2, boxes)?;
    let ring = vec![3.5, 0.0];
    let centre = vec![0.0, 0.0];
    let mu = SliceMeasure::from_atoms(0.0, vec![(ring.clone(), 0.5), (centre.clone(), 0.5)])?;
    let nu0 = SliceMeasure::from_atoms(1.0, vec![(centre.clone(), 1.0), (ring.clone(), 0.0)])?;
    let nu_plus = SliceMeasure::from_atoms(1.0, vec![(centre.clone(), 0.0), (ring.clone(), 1.0)])?;
    let nu_minus = nu0.clone();
    let sc = MeasurementScenario::from_branches(cs, k, mu, nu0, nu_plus, nu_minus)?;
    let lattice = LatticeConfig {
        q_slices: vec![2.0],
        p_slices: vec![-5.0, -0.6],
        min: vec![-5.0, -5.0],
        max: vec![5.0, 5.0],
        spacing: 0.25,
        cover_resolution: h,
    };
    Ok((sc, lattice))
}

/// Lattice for the two-point family: readout at `t = 1.5`, senders at `−0.5`.
pub fn abc_lattice() -> LatticeConfig {
    LatticeConfig {
        q_slices: vec![1.5],
        p_slices: vec![-0.5],
        min: vec![-3.0],
        max: vec![3.0],
        spacing: 0.1,
        cover_resolution: 0.05,
    }
}
