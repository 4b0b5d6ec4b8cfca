//! Turning a spec file or catalog reference plus command-line overrides into a problem.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use bjorling_core::bjorling::DomainGrid;
use bjorling_core::catalog::{builtin, CatalogEntry};
use bjorling_core::strip::{make_planar_strip, validate_strip, AnalyticCurve, NormalSide, Strip};
use bjorling_core::{AnalyticExpr, Error};

use crate::args::CommonArgs;
use crate::mesh::MeshFormat;
use crate::report::{sha256_hex, InputRecord};
use crate::specfile::{parse_range, SpecFile};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_REGISTRATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("I/O error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn input_err<T>(message: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(message.into()))
}

/// Where a problem comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Spec(PathBuf),
    Catalog { name: String, params: Vec<(String, f64)> },
}

impl Source {
    /// `catalog:NAME[:k=v,...]` or a path.
    pub fn parse_reference(s: &str) -> CliResult<Self> {
        let Some(rest) = s.strip_prefix("catalog:") else {
            return Ok(Source::Spec(PathBuf::from(s)));
        };
        let (name, params) = match rest.split_once(':') {
            Some((n, p)) => (n, p.split(',').map(parse_param).collect::<CliResult<Vec<_>>>()?),
            None => (rest, Vec::new()),
        };
        Ok(Source::Catalog {
            name: name.to_string(),
            params,
        })
    }
}

/// `k=v` with a numeric `v`.
pub fn parse_param(s: &str) -> CliResult<(String, f64)> {
    let Some((k, v)) = s.split_once('=') else {
        return input_err(format!("parameter `{s}` is not of the form k=v"));
    };
    let v = crate::specfile::parse_number(v).map_err(CliError::Input)?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub input: InputRecord,
    pub spec: Option<SpecFile>,
    pub entry: Option<CatalogEntry>,
    pub strip: Option<Strip>,
    pub grid: DomainGrid,
    pub tol: f64,
    pub quad_tol: f64,
    pub registration_tol: f64,
    pub checks: Vec<String>,
    /// Checks named on the command line must all exist; spec-file checks apply where measured.
    pub checks_strict: bool,
    pub mesh_out: Option<PathBuf>,
    pub format: MeshFormat,
    pub report_out: Option<PathBuf>,
}

impl Problem {
    pub fn strip(&self) -> CliResult<&Strip> {
        self.strip
            .as_ref()
            .ok_or_else(|| CliError::Input("the input has no [curve] section".into()))
    }

    /// The strip's normal lies in the curve's plane, so the curve is a planar geodesic.
    pub fn is_planar_geodesic(&self) -> bool {
        if let Some(e) = &self.entry {
            return e.expected.planar_geodesic;
        }
        matches!(self.strip.as_ref().and_then(|s| s.phi()), Some(phi) if (phi - FRAC_PI_2).abs() < 1e-15)
    }
}

pub fn parse_grid_counts(s: &str) -> CliResult<(usize, usize)> {
    let parsed = s
        .split_once(['x', 'X'])
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    match parsed {
        Some((nu, nv)) if nu >= 2 && nv >= 2 => Ok((nu, nv)),
        _ => input_err(format!("--grid expects NUxNV with both at least 2, got `{s}`")),
    }
}

pub fn parse_domain(s: &str) -> CliResult<((f64, f64), (f64, f64))> {
    let Some((u, v)) = s.split_once(',') else {
        return input_err(format!("--domain expects uMIN:uMAX,vMIN:vMAX, got `{s}`"));
    };
    let u = parse_range(u).map_err(|e| CliError::Input(format!("--domain: {e}")))?;
    let v = parse_range(v).map_err(|e| CliError::Input(format!("--domain: {e}")))?;
    Ok((u, v))
}

fn expr(s: &str) -> CliResult<AnalyticExpr> {
    AnalyticExpr::parse(s).map_err(|e| CliError::Input(format!("expression `{s}`: {e}")))
}

pub fn strip_from_spec(spec: &SpecFile) -> CliResult<Option<Strip>> {
    let Some(c) = &spec.curve else {
        return Ok(None);
    };
    let curve = AnalyticCurve::new(expr(&c.x)?, expr(&c.y)?, expr(&c.z)?);
    let strip = match &spec.normal {
        Some(n) => {
            let strip = Strip::new(curve, [expr(&n[0])?, expr(&n[1])?, expr(&n[2])?]);
            let (a, b) = spec.domain.u;
            let check = validate_strip(&strip, a, b, 201, 1e-8);
            if !check.passed {
                return input_err(format!(
                    "[normal] is not a unit normal field along the curve on [{a}, {b}]: \
                     |n| - 1 up to {:e}, <c', n>/|c'| up to {:e}, min |c'| {:e}",
                    check.max_unit_deviation, check.max_orthogonality, check.min_speed
                ));
            }
            strip
        }
        None => {
            let side = match c.side.as_deref() {
                Some("toward") => NormalSide::TowardCurvature,
                _ => NormalSide::AwayFromCurvature,
            };
            make_planar_strip(curve, c.phi.unwrap_or(FRAC_PI_2), side)?
        }
    };
    Ok(Some(strip))
}

fn grid_with_overrides(base: DomainGrid, common: &CommonArgs) -> CliResult<DomainGrid> {
    let (mut u, mut v, mut nu, mut nv) = (base.u_range, base.v_range, base.nu, base.nv);
    if let Some(g) = &common.grid {
        (nu, nv) = parse_grid_counts(g)?;
    }
    if let Some(d) = &common.domain {
        (u, v) = parse_domain(d)?;
    }
    Ok(DomainGrid::with_base(u, v, nu, nv, base.base)?)
}

pub fn catalog_digest(name: &str, params: &[(String, f64)]) -> String {
    let mut s = format!("catalog:{name}");
    for (k, v) in params {
        s.push_str(&format!(";{k}={v:?}"));
    }
    sha256_hex(s.as_bytes())
}

pub fn read_spec(path: &Path) -> CliResult<(SpecFile, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
    let spec = SpecFile::parse(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((spec, bytes))
}

pub fn load(source: &Source, common: &CommonArgs) -> CliResult<Problem> {
    let (input, spec, entry, strip, grid) = match source {
        Source::Spec(path) => {
            let (spec, bytes) = read_spec(path)?;
            let strip = strip_from_spec(&spec)?;
            let d = &spec.domain;
            let grid = DomainGrid::with_base(d.u, d.v, d.nu, d.nv, Complex64::new(d.base.0, d.base.1))?;
            let input = InputRecord {
                label: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            };
            (input, Some(spec), None, strip, grid)
        }
        Source::Catalog { name, params } => {
            let borrowed: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            let entry = builtin(name, &borrowed)?;
            let mut label = format!("catalog:{name}");
            for (i, (k, v)) in entry.parameters.iter().enumerate() {
                label.push_str(&format!("{}{k}={v}", if i == 0 { ':' } else { ',' }));
            }
            let input = InputRecord {
                label,
                sha256: catalog_digest(name, &entry.parameters),
            };
            let strip = Some(entry.strip.clone());
            let grid = entry.default_grid;
            (input, None, Some(entry), strip, grid)
        }
    };
    let grid = grid_with_overrides(grid, common)?;
    let checks_section = spec.as_ref().map(|s| s.checks.clone()).unwrap_or_default();
    let output = spec.as_ref().map(|s| s.output.clone()).unwrap_or_default();
    let tol = common.tol.or(checks_section.tol).unwrap_or(DEFAULT_TOL);
    let quad_tol = common.quad_tol.or(checks_section.quad_tol).unwrap_or(DEFAULT_QUAD_TOL);
    let registration_tol = common
        .registration_tol
        .or(checks_section.registration_tol)
        .unwrap_or(DEFAULT_REGISTRATION_TOL);
    for (name, v) in [("tol", tol), ("quad-tol", quad_tol), ("registration-tol", registration_tol)] {
        if !(v.is_finite() && v > 0.0) {
            return input_err(format!("--{name} must be positive, got {v}"));
        }
    }
    let checks = if common.check.is_empty() {
        checks_section.tests
    } else {
        common.check.clone()
    };
    let mesh_out = common.out.clone().or(output.mesh.map(PathBuf::from));
    let format = resolve_format(common.format.as_deref().or(output.format.as_deref()), mesh_out.as_deref())?;
    let report_out = common.report.clone().or(output.report.map(PathBuf::from));
    Ok(Problem {
        input,
        spec,
        entry,
        strip,
        grid,
        tol,
        quad_tol,
        registration_tol,
        checks,
        checks_strict: !common.check.is_empty(),
        mesh_out,
        format,
        report_out,
    })
}

pub fn resolve_format(explicit: Option<&str>, path: Option<&Path>) -> CliResult<MeshFormat> {
    match explicit {
        Some(f) => MeshFormat::parse(f).ok_or_else(|| CliError::Input(format!("unknown mesh format `{f}`"))),
        None => Ok(path.and_then(MeshFormat::from_path).unwrap_or(MeshFormat::Obj)),
    }
}
