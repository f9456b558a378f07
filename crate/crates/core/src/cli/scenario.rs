//! JSON scenario files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conditions::MeasurementScenario;
use crate::error::{Error, Result};
use crate::measure::{parse_weight, MeasureSpec, SliceMeasure};
use crate::protocol::LatticeConfig;
use crate::quantum::{Constants, Dynamics};
use crate::region::Region;
use crate::spacetime::CausalStructure;
use crate::weight::Weight;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeSpec {
    pub dim: usize,
    #[serde(default = "one")]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

/// The measurement section: `K` plus measures referenced by name.
/// `nu1` and `p_plus` are optional; when absent they follow from the
/// branches and from `μ(K)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    #[serde(rename = "K")]
    pub k: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_plus: Option<serde_json::Value>,
    pub mu: String,
    pub nu0: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu1: Option<String>,
    pub nu_plus: String,
    pub nu_minus: String,
}

/// Two measures for a bare CE check.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportSpec {
    pub mu: String,
    pub nu: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

impl Units {
    pub fn constants(self) -> Constants {
        match self {
            Units::Natural => Constants::natural(),
            Units::Si => Constants::si(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumGridSpec {
    pub half_width: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    pub dynamics: Dynamics,
    #[serde(default)]
    pub units: Units,
    pub m: f64,
    pub lambda: f64,
    pub t: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub k0: f64,
    pub grid: QuantumGridSpec,
    /// Detector `[−ℓ, ℓ]`; ignored when `K` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Region>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub trials: usize,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub spacetime: SpacetimeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<LatticeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalSpec>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn causal_structure(&self) -> Result<CausalStructure> {
        CausalStructure::new(self.spacetime.dim, self.spacetime.c)
    }

    pub fn measure<W: Weight>(&self, name: &str) -> Result<SliceMeasure<W>> {
        let spec = self
            .measures
            .get(name)
            .ok_or_else(|| Error::Scenario(format!("unknown measure {name:?}")))?;
        spec.build()
    }

    pub fn measurement<W: Weight>(&self) -> Result<MeasurementScenario<W>> {
        let m = self
            .measurement
            .as_ref()
            .ok_or_else(|| Error::Scenario("missing \"measurement\" section".into()))?;
        let cs = self.causal_structure()?;
        let mu = self.measure::<W>(&m.mu)?;
        let nu0 = self.measure::<W>(&m.nu0)?;
        let nu_plus = self.measure::<W>(&m.nu_plus)?;
        let nu_minus = self.measure::<W>(&m.nu_minus)?;
        let mut sc = MeasurementScenario::from_branches(cs, m.k.clone(), mu, nu0, nu_plus, nu_minus)?;
        if let Some(p) = &m.p_plus {
            sc.p_plus = parse_weight(p)?;
        }
        if let Some(name) = &m.nu1 {
            sc.nu1 = self.measure::<W>(name)?;
        }
        Ok(sc)
    }

    /// `(μ, ν)` for a CE check: the transport section if present, else the
    /// measurement's `μ` and `ν(·|0)`.
    pub fn transport_pair<W: Weight>(&self) -> Result<(SliceMeasure<W>, SliceMeasure<W>)> {
        if let Some(t) = &self.transport {
            return Ok((self.measure(&t.mu)?, self.measure(&t.nu)?));
        }
        if let Some(m) = &self.measurement {
            return Ok((self.measure(&m.mu)?, self.measure(&m.nu0)?));
        }
        Err(Error::Scenario("need a \"transport\" or \"measurement\" section".into()))
    }

    /// Serialisable form of a measurement scenario.
    pub fn from_measurement<W: Weight>(sc: &MeasurementScenario<W>) -> Self {
        let mut measures = BTreeMap::new();
        for (name, m) in [
            ("mu", &sc.mu),
            ("nu0", &sc.nu0),
            ("nu1", &sc.nu1),
            ("nu_plus", &sc.nu_plus),
            ("nu_minus", &sc.nu_minus),
        ] {
            measures.insert(name.to_string(), MeasureSpec::from_measure(m));
        }
        ScenarioFile {
            spacetime: SpacetimeSpec {
                dim: sc.cs.dim,
                c: sc.cs.c,
            },
            seed: None,
            measures,
            measurement: Some(MeasurementSpec {
                k: sc.k.clone(),
                p_plus: Some(sc.p_plus.to_json()),
                mu: "mu".into(),
                nu0: "nu0".into(),
                nu1: Some("nu1".into()),
                nu_plus: "nu_plus".into(),
                nu_minus: "nu_minus".into(),
            }),
            transport: None,
            quantum: None,
            protocol: None,
            signal: None,
        }
    }
}
