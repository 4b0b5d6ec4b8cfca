//! Symmetry relations of Björling surfaces as residual tests.
//!
//! Relations between values of `f` at rotated parameters are sampled on polar
//! rays inside the disc inscribed in the grid, re-evaluating the map along each
//! ray. Reflections of the grid onto itself use the grid nodes directly.

mod cpg;
mod dihedral;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::bjorling::{IsotropicMap, MapValue, SurfacePatch};
use crate::error::{Error, Result};
use crate::quadrature::cnorm;
use crate::CVec3;

pub use cpg::{
    diagonal_line_test, extract_cpg, reflection_checks, self_cpg_test, straight_arc_test, theorem_test,
    CpgCurve, TheoremReport,
};
pub use dihedral::{
    congruence_test, d4_d8_test, dihedral_search, self_adjoint_test, CongruenceResult, DihedralSearchReport,
    GeneratorShape, ReferenceMatch, SelfAdjointReport, WeakFamilyComparison,
};

/// `T`, `Λ`, `R` and the domain maps `τ`, `λ`, `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralMatrices {
    pub t: Matrix3<f64>,
    pub lambda: Matrix3<f64>,
    pub r: Matrix3<Complex64>,
}

impl Default for DihedralMatrices {
    fn default() -> Self {
        Self::new()
    }
}

impl DihedralMatrices {
    pub fn new() -> Self {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let (o, z) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
        DihedralMatrices {
            t: Matrix3::from_diagonal(&crate::Vec3::new(1.0, 1.0, -1.0)),
            lambda: Matrix3::new(-1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
            r: Matrix3::new(z, o, o, o, c, -c, o, c, c),
        }
    }

    pub fn tau(w: Complex64) -> Complex64 {
        w.conj()
    }

    pub fn lambda_map(w: Complex64) -> Complex64 {
        Complex64::new(-w.im, w.re)
    }

    pub fn rho(w: Complex64) -> Complex64 {
        w * Complex64::from_polar(1.0, PI / 4.0)
    }

    /// The eight elements of `⟨Λ, T⟩` with printable names.
    pub fn d4(&self) -> [(&'static str, Matrix3<f64>); 8] {
        let l = self.lambda;
        let (l2, l3) = (l * l, l * l * l);
        [
            ("I", Matrix3::identity()),
            ("L", l),
            ("L^2", l2),
            ("L^3", l3),
            ("T", self.t),
            ("L*T", l * self.t),
            ("L^2*T", l2 * self.t),
            ("L^3*T", l3 * self.t),
        ]
    }

    /// Largest entry error over `T² = Λ⁴ = I`, `Λ⁻¹ = TΛT`, `R² = Λ`, `ρ² = λ`.
    pub fn identity_defect(&self) -> f64 {
        let id = Matrix3::<f64>::identity();
        let l = self.lambda;
        let linv = l.try_inverse().expect("Λ is invertible");
        let rl: Matrix3<Complex64> = l.map(|v| Complex64::new(v, 0.0));
        let mut worst = (self.t * self.t - id).abs().max();
        worst = worst.max((l * l * l * l - id).abs().max());
        worst = worst.max((linv - self.t * l * self.t).abs().max());
        worst = worst.max((self.r * self.r - rl).iter().map(|z| z.norm()).fold(0.0, f64::max));
        for w in [Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5)] {
            worst = worst.max((Self::rho(Self::rho(w)) - Self::lambda_map(w)).norm());
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `X(w̄) = T X(w)`.
    ConjugateReflection,
    /// `X(-w̄) = Λ²T X(w)`.
    MirrorReflection,
    /// `X(it) = s Λ X(σt)`.
    SelfCpg,
    /// `X(t ± it)` on the lines `(0, y, ±y)`.
    DiagonalLines,
    /// `Λ f(w) = f(λ^{±1} w)`.
    LambdaRotation,
    /// `T conj f(w) = f(w̄)`.
    TauReflection,
    /// `R f(w) = f(ρ^{±1} w)`.
    RhoRotation,
    /// `R X*(w) + b = X(ρ^{±1} w)` for a fitted orthogonal `R`.
    SelfAdjoint,
    /// `A X(w) + b = X(e^{2πi/m} w)` for a fitted orthogonal `A`.
    DomainRotation(u32),
    /// Diagonal curves of the adjoint satisfy the self-CPG relation.
    AdjointDiagonals,
    /// Real-axis image of the adjoint is a straight arc.
    AdjointStraightArc,
}

impl Relation {
    pub fn name(&self) -> String {
        let s = match self {
            Relation::ConjugateReflection => "conjugate_reflection",
            Relation::MirrorReflection => "mirror_reflection",
            Relation::SelfCpg => "self_cpg",
            Relation::DiagonalLines => "diagonal_lines",
            Relation::LambdaRotation => "lambda_rotation",
            Relation::TauReflection => "tau_reflection",
            Relation::RhoRotation => "rho_rotation",
            Relation::SelfAdjoint => "self_adjoint",
            Relation::DomainRotation(m) => return alloc::format!("domain_rotation_{m}"),
            Relation::AdjointDiagonals => "adjoint_diagonals",
            Relation::AdjointStraightArc => "adjoint_straight_arc",
        };
        s.into()
    }
}

/// Which of a map and its inverse satisfied a rotation relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub relation: Relation,
    /// `max_deviation / patch.scale()`; for fitted relations the worst distance after the fit.
    pub residual: f64,
    pub max_deviation: f64,
    pub tol: f64,
    pub passed: bool,
    pub orientation: Option<Orientation>,
    pub sigma: Option<i8>,
    pub s: Option<i8>,
    pub matrix: Option<Matrix3<f64>>,
    /// Named by-products (perpendicularity, planarity, ...).
    pub details: Vec<(&'static str, f64)>,
    pub note: Option<String>,
}

impl SymmetryReport {
    fn new(relation: Relation, max_deviation: f64, scale: f64, tol: f64) -> Self {
        let residual = max_deviation / scale;
        SymmetryReport {
            relation,
            residual,
            max_deviation,
            tol,
            passed: residual <= tol,
            orientation: None,
            sigma: None,
            s: None,
            matrix: None,
            details: Vec::new(),
            note: None,
        }
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

const RAY_ANGLES: usize = 16;
const RAY_RADII: usize = 8;
const CURVE_SAMPLES: usize = 41;

/// `f` on `RAY_ANGLES` rays through 0, `values[j][k]` at `r_k e^{2πij/J}`.
struct PolarSamples {
    center: MapValue,
    values: Vec<Vec<MapValue>>,
}

impl PolarSamples {
    fn new(map: &IsotropicMap, radius: f64, angles: &[f64]) -> Result<Self> {
        let radii: Vec<f64> = (1..=RAY_RADII).map(|k| radius * k as f64 / RAY_RADII as f64).collect();
        let zero = Complex64::new(0.0, 0.0);
        let center = map.eval_path(&[zero])?[0];
        let values = angles
            .iter()
            .map(|a| map.eval_ray(zero, Complex64::from_polar(1.0, *a), &radii))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolarSamples { center, values })
    }

    fn uniform(map: &IsotropicMap, radius: f64) -> Result<Self> {
        let angles: Vec<f64> = (0..RAY_ANGLES).map(|j| 2.0 * PI * j as f64 / RAY_ANGLES as f64).collect();
        Self::new(map, radius, &angles)
    }

    /// `f - f(0)` at angle index `j`, radius index `k`.
    fn centred(&self, j: usize, k: usize) -> CVec3 {
        let n = self.values.len();
        self.values[j % n][k].f - self.center.f
    }
}

fn disc_radius(patch: &SurfacePatch) -> Result<f64> {
    patch
        .grid()
        .inscribed_radius()
        .ok_or_else(|| Error::GridCoverage("no disc around 0 inside the grid".into()))
}

fn complex_max<F: Fn(usize, usize) -> CVec3>(angles: usize, diff: F) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..angles {
        for k in 0..RAY_RADII {
            worst = worst.max(cnorm(&diff(j, k)));
        }
    }
    worst
}

fn real_matrix(m: &Matrix3<f64>) -> Matrix3<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Parameters `-r..=r` with `n` samples.
fn symmetric_samples(r: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| -r + 2.0 * r * k as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests;
