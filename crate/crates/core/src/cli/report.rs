//! Report records and atomic output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::conditions::ConditionReport;
use crate::error::{Error, Result};
use crate::spacetime::EPS_CAUSAL;
use crate::transport::CeVerdict;
use crate::weight::{Weight, EPS_FLOW, EPS_MASS};

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub command: Vec<String>,
    /// SHA-256 over the command line and the scenario text.
    pub input_digest: String,
    pub seed: u64,
    pub verdicts: Value,
    pub tolerances: Value,
    pub wall_clock_s: f64,
}

impl ReportRecord {
    pub fn new(command: &[String], scenario: Option<&str>, seed: u64, verdicts: Value, wall_clock_s: f64) -> Self {
        let mut h = Sha256::new();
        for arg in command {
            h.update(arg.as_bytes());
            h.update([0]);
        }
        if let Some(text) = scenario {
            h.update(text.as_bytes());
        }
        ReportRecord {
            command: command.to_vec(),
            input_digest: hex::encode(h.finalize()),
            seed,
            verdicts,
            tolerances: json!({ "eps_mass": EPS_MASS, "eps_flow": EPS_FLOW, "eps_causal": EPS_CAUSAL }),
            wall_clock_s,
        }
    }

    pub fn to_pretty(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Scenario(e.to_string()))
    }
}

pub fn verdict_json<W: Weight>(v: &CeVerdict<W>) -> Value {
    json!({
        "holds": v.holds,
        "deficit": v.deficit.to_json(),
        "worst_set": v.worst_set,
        "method": v.method,
    })
}

pub fn condition_json<W: Weight>(r: &ConditionReport<W>) -> Value {
    json!({
        "ce": r.ce,
        "ns": r.ns,
        "a1": r.a1,
        "a2": r.a2,
        "ce_global": verdict_json(&r.ce_global),
        "ce_deficit_at_k": r.ce_deficit_at_k.to_json(),
        "ns_distance": r.ns_distance.to_json(),
        "ns_witness": r.ns_witness,
        "a1_mass": r.a1_mass.to_json(),
        "a2_distance": r.a2_distance.to_json(),
        "a1_vacuous": r.a1_vacuous,
        "a2_vacuous": r.a2_vacuous,
        "diagnostics": r.diagnostics,
    })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Error::Scenario(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
