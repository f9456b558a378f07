//! Measurement scenarios and the NS / A1 / A2 / CE checkers.
//!
//! A scenario fixes a detector region `K` on the slice `s`, the initial
//! statistics `μ` there, and four measures on a later slice `t`: the
//! undisturbed evolution `ν(·|0)`, the measured one `ν(·|1)`, and the two
//! post-selected branches `ν(·|±,1)`. All checks compare sets on the slice `t`
//! against `j⁺(K)` as computed by [`causal_future_on_slice`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{align, combine, scaled_restriction_distance, restriction_distance, SliceMeasure};
use crate::region::Region;
use crate::spacetime::{causal_future_on_slice, CausalStructure};
use crate::transport::{check_ce, CeVerdict, Method};
use crate::weight::{Exact, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScenario<W = f64> {
    pub cs: CausalStructure,
    /// Detector region on the slice of `mu`.
    pub k: Region,
    pub mu: SliceMeasure<W>,
    /// `ν(·|0)`, the undisturbed evolution.
    pub nu0: SliceMeasure<W>,
    /// `ν(·|1)`.
    pub nu1: SliceMeasure<W>,
    /// `ν(·|+,1)`.
    pub nu_plus: SliceMeasure<W>,
    /// `ν(·|−,1)`.
    pub nu_minus: SliceMeasure<W>,
    /// `P(+|1)`.
    pub p_plus: W,
}

/// A failed scenario invariant, tagged with the relation it breaks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub tag: &'static str,
    pub detail: String,
}

impl<W: Weight> MeasurementScenario<W> {
    /// Builds a scenario with `P(+|1) = μ(K)` and `ν(·|1)` assembled from the
    /// two branches by total probability.
    pub fn from_branches(
        cs: CausalStructure,
        k: Region,
        mu: SliceMeasure<W>,
        nu0: SliceMeasure<W>,
        nu_plus: SliceMeasure<W>,
        nu_minus: SliceMeasure<W>,
    ) -> Result<Self> {
        let p_plus = mu.mass(&k)?;
        let nu1 = combine(p_plus, &nu_plus, W::one() - p_plus, &nu_minus)?;
        Ok(MeasurementScenario {
            cs,
            k,
            mu,
            nu0,
            nu1,
            nu_plus,
            nu_minus,
            p_plus,
        })
    }

    pub fn dt(&self) -> f64 {
        self.nu0.time() - self.mu.time()
    }

    /// `j⁺(K)` on the slice of the `ν` measures.
    pub fn future_of_k(&self) -> Result<Region> {
        causal_future_on_slice(&self.k, self.dt().max(0.0), &self.cs)
    }

    fn vacuous_plus(&self) -> bool {
        self.p_plus <= W::eps_mass()
    }

    fn vacuous_minus(&self) -> bool {
        self.p_plus >= W::one() - W::eps_mass()
    }
}

/// Checks the scenario invariants; an empty list means the scenario is valid.
pub fn validate<W: Weight>(sc: &MeasurementScenario<W>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |tag: &'static str, detail: String| out.push(Violation { tag, detail });

    let dims = [
        ("K", sc.k.dim()),
        ("mu", sc.mu.dim()),
        ("nu0", sc.nu0.dim()),
        ("nu1", sc.nu1.dim()),
        ("nu_plus", sc.nu_plus.dim()),
        ("nu_minus", sc.nu_minus.dim()),
    ];
    let dim_bad = dims.iter().any(|(_, d)| *d != sc.cs.dim);
    for (name, d) in dims {
        if d != sc.cs.dim {
            push("dimension", format!("{name} has dimension {d}, spacetime has {}", sc.cs.dim));
        }
    }
    if sc.k.is_empty() {
        push("region", "detector region K is empty".into());
    }
    let t = sc.nu0.time();
    if sc.mu.time() > t {
        push(
            "time order",
            format!("mu at {} is later than nu at {t}", sc.mu.time()),
        );
    }
    for (name, m) in [("nu1", &sc.nu1), ("nu_plus", &sc.nu_plus), ("nu_minus", &sc.nu_minus)] {
        if m.time() != t {
            push("time order", format!("{name} at {} but nu0 at {t}", m.time()));
        }
    }
    for (name, m) in [
        ("mu", &sc.mu),
        ("nu0", &sc.nu0),
        ("nu1", &sc.nu1),
        ("nu_plus", &sc.nu_plus),
        ("nu_minus", &sc.nu_minus),
    ] {
        if !m.is_probability() {
            // a branch conditioned on a null outcome carries no constraint
            let vacuous = (name == "nu_plus" && sc.vacuous_plus())
                || (name == "nu_minus" && sc.vacuous_minus());
            if !vacuous {
                push("normalization", format!("{name} has total mass {:?}", m.total()));
            }
        }
    }
    if !(sc.p_plus >= W::zero() && sc.p_plus <= W::one()) {
        push("detection probability", format!("P(+|1) = {:?} is not a probability", sc.p_plus));
    }
    if dim_bad {
        return out;
    }
    match sc.mu.mass(&sc.k) {
        Ok(mk) if (mk - sc.p_plus).abs() > W::eps_mass() => push(
            "detection probability",
            format!("P(+|1) = {:?} but mu(K) = {mk:?}", sc.p_plus),
        ),
        Ok(_) => {}
        Err(e) => push("detection probability", e.to_string()),
    }
    match (align(&sc.nu_plus, &sc.nu_minus), align(&sc.nu1, &sc.nu_plus)) {
        (Ok(_), Ok(_)) => {
            let p = sc.p_plus;
            match combine(p, &sc.nu_plus, W::one() - p, &sc.nu_minus)
                .and_then(|mix| restriction_distance(&mix, &sc.nu1, &Region::empty(sc.cs.dim)))
            {
                Ok(d) if d > W::eps_mass() => push(
                    "total probability",
                    format!("nu1 differs from P(+|1) nu_plus + P(-|1) nu_minus by {d:?}"),
                ),
                Ok(_) => {}
                Err(e) => push("total probability", e.to_string()),
            }
        }
        (Err(e), _) | (_, Err(e)) => push("total probability", e.to_string()),
    }
    if let Err(e) = align(&sc.nu0, &sc.nu1) {
        push("undisturbed evolution", format!("nu0 and nu1 are not comparable: {e}"));
    }
    out
}

/// CE at the detector region: `μ(K) ≤ ν(j⁺(K)|0)`.
pub fn check_ce_at_k<W: Weight>(sc: &MeasurementScenario<W>) -> Result<bool> {
    Ok(ce_deficit_at_k(sc)? <= W::eps_mass())
}

/// `μ(K) − ν(j⁺(K)|0)`.
pub fn ce_deficit_at_k<W: Weight>(sc: &MeasurementScenario<W>) -> Result<W> {
    Ok(sc.mu.mass(&sc.k)? - sc.nu0.mass(&sc.future_of_k()?)?)
}

/// A1: `ν(j⁺(K)|+,1) = 1`. Vacuously true when `P(+|1)` vanishes.
pub fn check_a1<W: Weight>(sc: &MeasurementScenario<W>) -> Result<bool> {
    if sc.vacuous_plus() {
        return Ok(true);
    }
    Ok(sc.nu_plus.mass(&sc.future_of_k()?)? >= W::one() - W::eps_mass())
}

/// NS: `ν(C|1) = ν(C|0)` for every compact `C` outside `j⁺(K)`.
pub fn check_ns<W: Weight>(sc: &MeasurementScenario<W>) -> Result<bool> {
    Ok(ns_distance(sc)? <= W::eps_mass())
}

pub fn ns_distance<W: Weight>(sc: &MeasurementScenario<W>) -> Result<W> {
    restriction_distance(&sc.nu1, &sc.nu0, &sc.future_of_k()?)
}

/// A2: `ν(C|−,1) = ν(C|0) / (1 − μ(K))` outside `j⁺(K)`. Vacuously true when
/// `P(−|1)` vanishes.
pub fn check_a2<W: Weight>(sc: &MeasurementScenario<W>) -> Result<bool> {
    if sc.vacuous_minus() {
        return Ok(true);
    }
    Ok(a2_distance(sc)? <= W::eps_mass())
}

/// `sup_C |ν(C|−,1) − ν(C|0)/(1 − P(+|1))|` outside `j⁺(K)`.
pub fn a2_distance<W: Weight>(sc: &MeasurementScenario<W>) -> Result<W> {
    let q = W::one() - sc.p_plus;
    if !(q > W::zero()) {
        return Ok(W::zero());
    }
    let d = scaled_restriction_distance(q, &sc.nu_minus, W::one(), &sc.nu0, &sc.future_of_k()?)?;
    Ok(d / q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<W> {
    /// CE at the detector region `K`, the instance the implications concern.
    pub ce: bool,
    pub ns: bool,
    pub a1: bool,
    pub a2: bool,
    /// CE over all compact sets, from the transport checker.
    pub ce_global: CeVerdict<W>,
    pub ce_deficit_at_k: W,
    pub ns_distance: W,
    pub ns_witness: Option<Region>,
    pub a1_mass: W,
    pub a2_distance: W,
    pub a1_vacuous: bool,
    pub a2_vacuous: bool,
    /// Non-empty only if the verdicts contradict the two-imply-all relations.
    pub diagnostics: Vec<String>,
}

impl<W: Weight> ConditionReport<W> {
    /// `(NS, A1, A2, CE)`.
    pub fn flags(&self) -> [bool; 4] {
        [self.ns, self.a1, self.a2, self.ce]
    }
}

/// Contradictions with "any two of NS, A1, A2 imply the third and CE" and
/// "A2 implies CE".
pub fn implication_diagnostics(ns: bool, a1: bool, a2: bool, ce: bool) -> Vec<String> {
    let mut out = Vec::new();
    let count = [ns, a1, a2].iter().filter(|b| **b).count();
    if count == 2 {
        out.push(format!(
            "exactly two of NS, A1, A2 hold (NS={ns}, A1={a1}, A2={a2})"
        ));
    }
    if count >= 2 && !ce {
        out.push("two of NS, A1, A2 hold but CE fails".into());
    }
    if a2 && !ce {
        out.push("A2 holds but CE fails".into());
    }
    if a1 && !ce && ns {
        out.push("A1 holds and CE fails, yet NS holds".into());
    }
    out
}

pub fn evaluate_conditions<W: Weight>(
    sc: &MeasurementScenario<W>,
    method: Method,
) -> Result<ConditionReport<W>> {
    let jk = sc.future_of_k()?;
    let ce_deficit = ce_deficit_at_k(sc)?;
    let ce = ce_deficit <= W::eps_mass();
    let ns_d = ns_distance(sc)?;
    let ns = ns_d <= W::eps_mass();
    let a1 = check_a1(sc)?;
    let a2 = check_a2(sc)?;
    let ce_global = check_ce(&sc.mu, &sc.nu0, &sc.cs, method)?;
    let diagnostics = implication_diagnostics(ns, a1, a2, ce);
    Ok(ConditionReport {
        ce,
        ns,
        a1,
        a2,
        ce_global,
        ce_deficit_at_k: ce_deficit,
        ns_distance: ns_d,
        ns_witness: find_ns_witness(sc)?,
        a1_mass: sc.nu_plus.mass(&jk)?,
        a2_distance: a2_distance(sc)?,
        a1_vacuous: sc.vacuous_plus(),
        a2_vacuous: sc.vacuous_minus(),
        diagnostics,
    })
}

/// A compact `C` outside `j⁺(K)` with `ν(C|1) < ν(C|0)`: the union of the
/// units there on which `ν(·|1)` falls short of `ν(·|0)`.
pub fn find_ns_witness<W: Weight>(sc: &MeasurementScenario<W>) -> Result<Option<Region>> {
    let jk = sc.future_of_k()?;
    let units = align(&sc.nu1, &sc.nu0)?;
    let short: Vec<_> = units
        .iter()
        .filter(|u| !jk.contains(&u.center) && u.left < u.right)
        .collect();
    let gap: W = short.iter().map(|u| u.right - u.left).sum();
    if short.is_empty() || gap <= W::eps_mass() {
        return Ok(None);
    }
    let boxes = short
        .iter()
        .map(|u| crate::region::Aabb::cube(&u.center, u.half))
        .collect();
    Ok(Some(Region::from_aabbs(sc.cs.dim, boxes)?))
}

// ---- the two-point family -------------------------------------------------

/// Coordinates of the two-point family (1+1 dimensions, `c = 1`).
pub mod abc {
    pub const S: f64 = 0.0;
    pub const T: f64 = 1.0;
    pub const P: f64 = 0.0;
    pub const Q: f64 = 1.5;
    pub const P_PRIME: f64 = 0.9;
    pub const Q_PRIME: f64 = 2.2;
    pub const K: [f64; 2] = [-0.25, 0.25];
}

/// The two-point family: `μ = ½δ_p + ½δ_q`, `ν = Aδ_p′ + (1−A)δ_q′`,
/// `ν(·|+,1) = Bδ_p′ + (1−B)δ_q′`, `ν(·|−,1) = Cδ_p′ + (1−C)δ_q′`, with
/// `p ⪯ p′`, `q ⪯ p′`, `q ⪯ q′`, `p ⋠ q′` and `K` containing `p` only.
pub fn make_abc_scenario<W: Weight>(a: W, b: W, c: W) -> Result<MeasurementScenario<W>> {
    for (name, v) in [("A", a), ("B", b), ("C", c)] {
        if !(v >= W::zero() && v <= W::one()) {
            return Err(Error::OutOfRange {
                name,
                value: v.to_f64(),
            });
        }
    }
    let cs = CausalStructure::natural(1);
    let half = W::one() / (W::one() + W::one());
    let mu = SliceMeasure::from_atoms(abc::S, vec![(vec![abc::P], half), (vec![abc::Q], half)])?;
    let two_point = |w: W| {
        SliceMeasure::from_atoms(
            abc::T,
            vec![(vec![abc::P_PRIME], w), (vec![abc::Q_PRIME], W::one() - w)],
        )
    };
    MeasurementScenario::from_branches(
        cs,
        Region::interval(abc::K[0], abc::K[1]),
        mu,
        two_point(a)?,
        two_point(b)?,
        two_point(c)?,
    )
}

/// One row of the realisability table for `(NS, A1, A2, CE)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub expected: [bool; 4],
    pub samples: Vec<SampleVerdict>,
    pub erratum: Option<SampleVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleVerdict {
    pub abc: [Exact; 3],
    pub verdict: [bool; 4],
}

impl TruthRow {
    pub fn reproduced(&self) -> bool {
        self.samples.iter().all(|s| s.verdict == self.expected)
    }
}

fn sample(a: (i128, i128), b: (i128, i128), c: (i128, i128)) -> [Exact; 3] {
    [Exact::new(a.0, a.1), Exact::new(b.0, b.1), Exact::new(c.0, c.1)]
}

/// Expected flags, samples and the optional erratum sample.
type RowSpec = ([bool; 4], Vec<[Exact; 3]>, Option<[Exact; 3]>);

fn evaluate_sample(abc: [Exact; 3]) -> Result<SampleVerdict> {
    let sc = make_abc_scenario(abc[0], abc[1], abc[2])?;
    let r = evaluate_conditions(&sc, Method::Maxflow)?;
    Ok(SampleVerdict {
        abc,
        verdict: r.flags(),
    })
}

/// Every `(NS, A1, A2, CE)` assignment allowed by the implications, with
/// exact-rational samples from the two-point family.
///
/// The commonly listed sample `(2/3, 1/3, 0)` for `(T, F, F, T)` does not satisfy
/// `NS`; it is carried as the row's erratum and replaced by `(2/3, 1/3, 1)`.
pub fn truth_table() -> Result<Vec<TruthRow>> {
    let (t, f) = (true, false);
    let one = (1, 1);
    let zero = (0, 1);
    let rows: Vec<RowSpec> = vec![
        ([t, t, t, t], vec![sample(one, one, one)], None),
        ([f, f, t, t], vec![sample(one, zero, one)], None),
        ([f, t, f, t], vec![sample(one, one, zero)], None),
        (
            [t, f, f, t],
            vec![sample((2, 3), (1, 3), one)],
            Some(sample((2, 3), (1, 3), zero)),
        ),
        ([f, f, f, t], vec![sample(one, zero, zero)], None),
        (
            [f, t, f, f],
            vec![sample(zero, one, zero), sample(zero, one, one)],
            None,
        ),
        ([t, f, f, f], vec![sample(zero, zero, zero)], None),
        ([f, f, f, f], vec![sample(zero, zero, one)], None),
    ];
    rows.into_iter()
        .map(|(expected, samples, erratum)| {
            Ok(TruthRow {
                expected,
                samples: samples
                    .into_iter()
                    .map(evaluate_sample)
                    .collect::<Result<_>>()?,
                erratum: erratum.map(evaluate_sample).transpose()?,
            })
        })
        .collect()
}
