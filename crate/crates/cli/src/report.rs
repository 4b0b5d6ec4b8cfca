//! JSON run reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use bjorling_core::bjorling::DomainGrid;

pub const TOOL: &str = "bjorling";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, pass: bool) -> Self {
        CheckRecord {
            name: name.into(),
            residual,
            tolerance,
            pass,
        }
    }

    /// Passes when `residual <= tolerance`.
    pub fn bounded(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::new(name, residual, tolerance, residual <= tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputRecord {
    pub label: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRecord {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub nu: usize,
    pub nv: usize,
    pub base: [f64; 2],
}

impl From<&DomainGrid> for GridRecord {
    fn from(g: &DomainGrid) -> Self {
        GridRecord {
            u: [g.u_range.0, g.u_range.1],
            v: [g.v_range.0, g.v_range.1],
            nu: g.nu,
            nv: g.nv,
            base: [g.base.re, g.base.im],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub grid: Option<GridRecord>,
    pub tol: f64,
    pub quad_tol: f64,
    pub registration_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub settings: Settings,
    /// Requested checks; these decide the exit status.
    pub checks: Vec<CheckRecord>,
    /// Everything else the command measured.
    pub observations: Vec<CheckRecord>,
    pub passed: bool,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialise");
        s.push('\n');
        s
    }
}

/// Splits measured records into requested checks and observations. An empty
/// request selects `defaults`. Names not measured are errors; `all` selects everything.
pub fn select_checks(
    measured: Vec<CheckRecord>,
    requested: &[String],
    defaults: &[&str],
) -> Result<(Vec<CheckRecord>, Vec<CheckRecord>), String> {
    let wanted: Vec<String> = if requested.is_empty() {
        defaults.iter().map(|s| s.to_string()).collect()
    } else {
        requested.to_vec()
    };
    if wanted.iter().any(|w| w == "all") {
        return Ok((measured, Vec::new()));
    }
    let mut seen = Vec::new();
    for w in &wanted {
        if !measured.iter().any(|m| &m.name == w) {
            let names: Vec<&str> = measured.iter().map(|m| m.name.as_str()).collect();
            return Err(format!("check `{w}` is not available here (available: {})", names.join(", ")));
        }
        if seen.contains(w) {
            return Err(format!("check `{w}` requested twice"));
        }
        seen.push(w.clone());
    }
    let (checks, observations) = measured.into_iter().partition(|m| wanted.contains(&m.name));
    Ok((checks, observations))
}
