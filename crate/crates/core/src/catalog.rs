//! Built-in strips in normalised position, and closed-form surfaces for testing.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::analytic::AnalyticExpr;
use crate::bjorling::DomainGrid;
use crate::error::{Error, Result};
use crate::strip::{make_planar_strip, AnalyticCurve, NormalSide, Strip};
use crate::Vec3;

pub const ENTRY_NAMES: [&str; 9] = [
    "circle",
    "catenary",
    "parabola",
    "cycloid",
    "ellipse",
    "enneper_cubic",
    "line_rotating_normal",
    "weak_cpg",
    "plane_line",
];

pub const CLOSED_FORM_NAMES: [&str; 4] = ["catenoid", "helicoid", "enneper", "plane"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// `(cos u cosh v, sin u cosh v, v)`
    Catenoid,
    /// `(u, sin u sinh v, -cos u sinh v)`
    Helicoid,
    /// `Re (w², w³/3 - w, -i(w³/3 + w))`
    Enneper,
    /// `(u, v, 0)`
    Plane,
}

impl ClosedForm {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::Catenoid => "catenoid",
            ClosedForm::Helicoid => "helicoid",
            ClosedForm::Enneper => "enneper",
            ClosedForm::Plane => "plane",
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Vec3 {
        use libm::{cos, cosh, sin, sinh};
        match self {
            ClosedForm::Catenoid => Vec3::new(cos(u) * cosh(v), sin(u) * cosh(v), v),
            ClosedForm::Helicoid => Vec3::new(u, sin(u) * sinh(v), -cos(u) * sinh(v)),
            ClosedForm::Enneper => {
                // Real parts of w², w³/3 - w and -i(w³/3 + w).
                let re_w3 = u * u * u - 3.0 * u * v * v;
                let im_w3 = 3.0 * u * u * v - v * v * v;
                Vec3::new(u * u - v * v, re_w3 / 3.0 - u, im_w3 / 3.0 + v)
            }
            ClosedForm::Plane => Vec3::new(u, v, 0.0),
        }
    }
}

pub fn closed_form(name: &str) -> Result<ClosedForm> {
    match name {
        "catenoid" => Ok(ClosedForm::Catenoid),
        "helicoid" => Ok(ClosedForm::Helicoid),
        "enneper" => Ok(ClosedForm::Enneper),
        "plane" => Ok(ClosedForm::Plane),
        _ => Err(Error::UnknownCatalogEntry(name.to_string())),
    }
}

/// A closed form scaled uniformly: `X(u, v) = scale · form(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle {
    pub form: ClosedForm,
    pub scale: f64,
}

impl Oracle {
    pub fn eval(&self, u: f64, v: f64) -> Vec3 {
        self.form.eval(u, v) * self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpectedProperties {
    pub self_cpg: bool,
    pub self_adjoint: bool,
    /// Order of the dihedral symmetry claimed for the weak family, `2k + 2`.
    pub weak_cpg_order: Option<u32>,
    /// The curve is a planar geodesic of its surface (normal in the curve's plane).
    pub planar_geodesic: bool,
    /// The curve's known CPG partner, when it has a name.
    pub cpg_partner: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub strip: Strip,
    pub parameters: Vec<(String, f64)>,
    pub oracle: Option<Oracle>,
    pub expected: ExpectedProperties,
    pub default_grid: DomainGrid,
}

impl CatalogEntry {
    pub fn parameter(&self, key: &str) -> Option<f64> {
        self.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

struct Params<'a> {
    given: &'a [(&'a str, f64)],
    used: Vec<(String, f64)>,
}

impl<'a> Params<'a> {
    fn get(&mut self, key: &str, default: f64) -> f64 {
        let v = self.given.iter().rev().find(|(k, _)| *k == key).map_or(default, |(_, v)| *v);
        self.used.push((key.to_string(), v));
        v
    }

    fn finish(self, name: &str) -> Result<Vec<(String, f64)>> {
        if let Some((k, _)) = self.given.iter().find(|(k, _)| !self.used.iter().any(|(u, _)| u == k)) {
            return Err(Error::InvalidInput(format!("entry `{name}` has no parameter `{k}`")));
        }
        Ok(self.used)
    }
}

fn expr(s: &str) -> AnalyticExpr {
    AnalyticExpr::parse(s).expect("catalog expressions are well formed")
}

fn positive(name: &str, key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("`{name}` needs {key} > 0, got {v}")))
    }
}

fn grid(u: (f64, f64), v: (f64, f64)) -> DomainGrid {
    DomainGrid::new(u, v, 41, 41).expect("catalog grids are valid")
}

fn planar(x: AnalyticExpr, y: AnalyticExpr) -> Result<Strip> {
    make_planar_strip(AnalyticCurve::planar(x, y), FRAC_PI_2, NormalSide::default())
}

/// Instantiates a catalog entry. Parameters not given take their defaults;
/// unknown parameters are rejected.
pub fn builtin(name: &str, params: &[(&str, f64)]) -> Result<CatalogEntry> {
    let mut p = Params {
        given: params,
        used: Vec::new(),
    };
    let unit = (-1.0, 1.0);
    let planar_geodesic = ExpectedProperties {
        planar_geodesic: true,
        ..Default::default()
    };
    let (strip, oracle, expected, default_grid) = match name {
        "circle" => {
            let r = positive(name, "r", p.get("r", 1.0))?;
            let s = planar(r * expr("cos(t)"), r * expr("sin(t)"))?;
            let exp = ExpectedProperties {
                cpg_partner: Some("catenary"),
                ..planar_geodesic
            };
            let oracle = Oracle {
                form: ClosedForm::Catenoid,
                scale: r,
            };
            (s, Some(oracle), exp, grid((-PI, PI), unit))
        }
        "catenary" => {
            let a = positive(name, "a", p.get("a", 1.0))?;
            let s = planar(a * expr("cosh(t)"), a * expr("t"))?;
            let exp = ExpectedProperties {
                cpg_partner: Some("circle"),
                ..planar_geodesic
            };
            (s, None, exp, grid(unit, unit))
        }
        "parabola" => {
            let a = positive(name, "a", p.get("a", 1.0))?;
            let s = planar(a * expr("t^2/2"), a * expr("t"))?;
            let exp = ExpectedProperties {
                cpg_partner: Some("cycloid"),
                ..planar_geodesic
            };
            (s, None, exp, grid(unit, (-0.7, 0.7)))
        }
        "cycloid" => {
            let r = positive(name, "r", p.get("r", 1.0))?;
            let s = planar(r * expr("1 - cos(t)"), r * expr("t + sin(t)"))?;
            let exp = ExpectedProperties {
                cpg_partner: Some("parabola"),
                ..planar_geodesic
            };
            (s, None, exp, grid((-2.0, 2.0), unit))
        }
        "ellipse" => {
            let a = positive(name, "a", p.get("a", 1.0))?;
            let b = positive(name, "b", p.get("b", 2.0))?;
            let s = planar(a * expr("cos(t)"), b * expr("sin(t)"))?;
            (s, None, planar_geodesic.clone(), grid(unit, unit))
        }
        "enneper_cubic" => {
            let s = planar(expr("t^2"), expr("t^3/3 - t"))?;
            let exp = ExpectedProperties {
                self_cpg: true,
                self_adjoint: true,
                weak_cpg_order: Some(4),
                cpg_partner: Some("enneper_cubic"),
                ..planar_geodesic
            };
            let oracle = Oracle {
                form: ClosedForm::Enneper,
                scale: 1.0,
            };
            (s, Some(oracle), exp, grid(unit, unit))
        }
        "line_rotating_normal" => {
            let c = AnalyticCurve::new(expr("t"), AnalyticExpr::zero(), AnalyticExpr::zero());
            let s = Strip::new(c, [AnalyticExpr::zero(), expr("cos(t)"), expr("sin(t)")]);
            let oracle = Oracle {
                form: ClosedForm::Helicoid,
                scale: 1.0,
            };
            (s, Some(oracle), ExpectedProperties::default(), grid((-PI, PI), unit))
        }
        "weak_cpg" => {
            let k = p.get("k", 1.0);
            if !(k >= 1.0 && libm::trunc(k) == k && k <= 64.0) {
                return Err(Error::InvalidInput(format!("`weak_cpg` needs an integer k >= 1, got {k}")));
            }
            let k = k as u32;
            let m = 4 * k - 2;
            let x = (2.0 / m as f64) * AnalyticExpr::var().powi(m);
            let y = (1.0 / (2 * m - 1) as f64) * AnalyticExpr::var().powi(2 * m - 1) - AnalyticExpr::var();
            let s = planar(x, y)?;
            let exp = ExpectedProperties {
                self_cpg: k == 1,
                self_adjoint: k == 1,
                weak_cpg_order: Some(2 * k + 2),
                ..planar_geodesic
            };
            (s, None, exp, grid((-0.9, 0.9), (-0.9, 0.9)))
        }
        "plane_line" => {
            let c = AnalyticCurve::new(expr("t"), AnalyticExpr::zero(), AnalyticExpr::zero());
            let s = Strip::new(c, [AnalyticExpr::zero(), AnalyticExpr::zero(), AnalyticExpr::one()]);
            let oracle = Oracle {
                form: ClosedForm::Plane,
                scale: 1.0,
            };
            (s, Some(oracle), planar_geodesic.clone(), grid(unit, unit))
        }
        _ => return Err(Error::UnknownCatalogEntry(name.to_string())),
    };
    Ok(CatalogEntry {
        name: name.to_string(),
        parameters: p.finish(name)?,
        strip,
        oracle,
        expected,
        default_grid,
    })
}
