use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Matrix3;

use super::{
    complex_max, disc_radius, real_matrix, DihedralMatrices, Orientation, PolarSamples, Relation, SymmetryReport,
    RAY_ANGLES, RAY_RADII,
};
use crate::bjorling::SurfacePatch;
use crate::error::{Error, Result};
use crate::registration::{register, Registration, RegistrationOptions};
use crate::Vec3;

const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// `Λ f(w) = f(λ^{±1} w)`, `T conj f(w) = f(w̄)` and `R f(w) = f(ρ^{±1} w)`
/// for `f - f(0)`.
pub fn d4_d8_test(patch: &SurfacePatch, tol: f64) -> Result<Vec<SymmetryReport>> {
    let samples = PolarSamples::uniform(patch.map(), disc_radius(patch)?)?;
    let m = DihedralMatrices::new();
    let scale = patch.scale();
    let j_max = RAY_ANGLES;

    let rotation = |relation, a: &nalgebra::Matrix3<num_complex::Complex64>, shift: usize| {
        let fwd = complex_max(j_max, |j, k| a * samples.centred(j, k) - samples.centred(j + shift, k));
        let inv = complex_max(j_max, |j, k| a * samples.centred(j, k) - samples.centred(j + j_max - shift, k));
        let (worst, orientation) = if fwd <= inv {
            (fwd, Orientation::Forward)
        } else {
            (inv, Orientation::Inverse)
        };
        let mut r = SymmetryReport::new(relation, worst, scale, tol);
        r.orientation = Some(orientation);
        r.details.push(("forward", fwd / scale));
        r.details.push(("inverse", inv / scale));
        r
    };

    let lambda = rotation(Relation::LambdaRotation, &real_matrix(&m.lambda), j_max / 4);
    let t = real_matrix(&m.t);
    let tau_dev = complex_max(j_max, |j, k| {
        t * samples.centred(j, k).map(|z| z.conj()) - samples.centred((j_max - j) % j_max, k)
    });
    let tau = SymmetryReport::new(Relation::TauReflection, tau_dev, scale, tol);
    let mut rho = rotation(Relation::RhoRotation, &m.r, j_max / 8);
    rho.note = Some("complex matrix R applied to f".into());
    Ok(alloc::vec![lambda, tau, rho])
}

/// Closest `D · diag(ε, rot 45°)` with `D ∈ ⟨Λ, T⟩` and `ε = ±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceMatch {
    pub element: &'static str,
    pub x_sign: i8,
    pub deviation: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointReport {
    pub report: SymmetryReport,
    pub fitted: Registration,
    pub reference: ReferenceMatch,
}

impl SelfAdjointReport {
    pub fn passed(&self) -> bool {
        self.report.passed
    }

    pub fn rms(&self) -> f64 {
        self.fitted.rms
    }

    /// Worst sample distance after the least-squares fit.
    pub fn max_distance(&self) -> f64 {
        self.fitted.max_deviation
    }
}

fn reference_match(r: &Matrix3<f64>) -> ReferenceMatch {
    let m = DihedralMatrices::new();
    let c = core::f64::consts::FRAC_1_SQRT_2;
    let mut best = ReferenceMatch {
        element: "I",
        x_sign: 1,
        deviation: f64::INFINITY,
        matches: false,
    };
    for (name, d) in m.d4() {
        for eps in [1i8, -1] {
            let r0 = Matrix3::new(eps as f64, 0.0, 0.0, 0.0, c, -c, 0.0, c, c);
            let dev = (r - d * r0).abs().max();
            if dev < best.deviation {
                best = ReferenceMatch {
                    element: name,
                    x_sign: eps,
                    deviation: dev,
                    matches: dev <= 1e-6,
                };
            }
        }
    }
    best
}

/// Fits `R X*(w) + b ≈ X(ρ^{±1} w)` over polar samples.
pub fn self_adjoint_test(patch: &SurfacePatch, tol: f64) -> Result<SelfAdjointReport> {
    let samples = PolarSamples::uniform(patch.map(), disc_radius(patch)?)?;
    let j_max = RAY_ANGLES;
    let fit = |shift: usize| -> Result<Registration> {
        let mut src = alloc::vec![samples.center.f.map(|z| z.im)];
        let mut dst = alloc::vec![samples.center.f.map(|z| z.re)];
        for j in 0..j_max {
            for k in 0..RAY_RADII {
                src.push(samples.values[j][k].f.map(|z| z.im));
                dst.push(samples.values[(j + shift) % j_max][k].f.map(|z| z.re));
            }
        }
        register(&src, &dst, RegistrationOptions::default())
    };
    let fwd = fit(j_max / 8)?;
    let inv = fit(j_max - j_max / 8)?;
    let (fitted, orientation) = if fwd.rms <= inv.rms {
        (fwd, Orientation::Forward)
    } else {
        (inv, Orientation::Inverse)
    };
    let scale = patch.scale();
    let defect = fitted.orthogonality_defect();
    let mut report = SymmetryReport::new(Relation::SelfAdjoint, fitted.max_deviation, scale, tol);
    report.passed &= defect <= ORTHOGONALITY_TOLERANCE;
    report.orientation = Some(orientation);
    report.matrix = Some(fitted.rotation);
    report.details.push(("rms", fitted.rms));
    report.details.push(("orthogonality_defect", defect));
    let reference = reference_match(&fitted.rotation);
    report.details.push(("reference_deviation", reference.deviation));
    report.note = Some(if reference.matches {
        alloc::format!("matches {}*diag({},rot45) in D4", reference.element, reference.x_sign)
    } else {
        "no D4 composite of the reference rotation matches".into()
    });
    Ok(SelfAdjointReport {
        report,
        fitted,
        reference,
    })
}

/// Block structure of an orthogonal matrix: x-axis sign and the rotation in the yz-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorShape {
    pub x_sign: f64,
    /// Radians, in `(-π, π]`.
    pub yz_angle: f64,
    /// `det` of the yz-block: `+1` rotation, `-1` reflection.
    pub yz_det: f64,
    /// Largest entry coupling x with y or z.
    pub block_defect: f64,
}

impl GeneratorShape {
    pub fn of(a: &Matrix3<f64>) -> Self {
        let block_defect = [a[(0, 1)], a[(0, 2)], a[(1, 0)], a[(2, 0)]]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        GeneratorShape {
            x_sign: a[(0, 0)].signum(),
            yz_angle: libm::atan2(a[(2, 1)], a[(1, 1)]),
            yz_det: a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)],
            block_defect,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DihedralSearchReport {
    /// One fitted relation per `m = 2..=max_order`.
    pub candidates: Vec<SymmetryReport>,
    pub passing_orders: Vec<u32>,
    pub detected_order: Option<u32>,
    /// Every candidate passed.
    pub continuous: bool,
    pub generator: Option<GeneratorShape>,
    pub max_order: u32,
}

/// Detected symmetry against the family's claimed `D_{2k+2}` with generator
/// `Λ_k` (x-flip, yz-rotation by `π/2n`, `n = 2k + 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakFamilyComparison {
    pub k: u32,
    pub claimed_order: u32,
    pub claimed_angle: f64,
    pub claimed_order_passes: bool,
    pub detected_order: Option<u32>,
    pub detected_angle: Option<f64>,
    pub order_agrees: bool,
    pub angle_agrees: bool,
    /// `min ‖A - Λ_k^{±1}‖_max` over the detected generator.
    pub generator_deviation: Option<f64>,
}

impl DihedralSearchReport {
    pub fn generator_matrix(&self) -> Option<Matrix3<f64>> {
        let m = self.detected_order?;
        self.candidates
            .iter()
            .find(|c| c.relation == Relation::DomainRotation(m))
            .and_then(|c| c.matrix)
    }

    pub fn compare_with_weak_family(&self, k: u32) -> WeakFamilyComparison {
        let n = 2 * k + 2;
        let angle = PI / (2.0 * n as f64);
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        let lk = Matrix3::new(-1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c);
        let detected_angle = self.generator.map(|g| g.yz_angle.abs());
        let generator_deviation = self
            .generator_matrix()
            .map(|a| (a - lk).abs().max().min((a - lk.transpose()).abs().max()));
        WeakFamilyComparison {
            k,
            claimed_order: n,
            claimed_angle: angle,
            claimed_order_passes: self.passing_orders.contains(&n),
            detected_order: self.detected_order,
            detected_angle,
            order_agrees: self.detected_order == Some(n),
            angle_agrees: detected_angle.is_some_and(|a| (a - angle).abs() <= 1e-6),
            generator_deviation,
        }
    }
}

/// For each `m = 2..=max_order`, fits an orthogonal `A` with
/// `A X(w) + b ≈ X(e^{2πi/m} w)` on polar samples.
pub fn dihedral_search(patch: &SurfacePatch, max_order: u32, tol: f64) -> Result<DihedralSearchReport> {
    if max_order < 2 {
        return Err(Error::InvalidInput("max_order must be at least 2".into()));
    }
    let r = disc_radius(patch)?;
    let base_angles: Vec<f64> = (0..8).map(|l| 2.0 * PI * l as f64 / 8.0).collect();
    let base = PolarSamples::new(patch.map(), r, &base_angles)?;
    let scale = patch.scale();
    let points = |s: &PolarSamples| {
        let mut v = alloc::vec![s.center.f.map(|z| z.re)];
        v.extend(s.values.iter().flatten().map(|m| m.f.map(|z| z.re)));
        v
    };
    let src = points(&base);

    let mut candidates = Vec::new();
    for m in 2..=max_order {
        let theta = 2.0 * PI / m as f64;
        let rotated: Vec<f64> = base_angles.iter().map(|a| a + theta).collect();
        let dst = points(&PolarSamples::new(patch.map(), r, &rotated)?);
        let fit = register(&src, &dst, RegistrationOptions::default())?;
        let mut rep = SymmetryReport::new(Relation::DomainRotation(m), fit.max_deviation, scale, tol);
        rep.details.push(("rms", fit.rms));
        rep.passed &= fit.orthogonality_defect() <= ORTHOGONALITY_TOLERANCE;
        rep.matrix = Some(fit.rotation);
        rep.details.push(("angle", theta));
        candidates.push(rep);
    }
    let passing_orders: Vec<u32> = (2..=max_order)
        .zip(&candidates)
        .filter(|(_, c)| c.passed)
        .map(|(m, _)| m)
        .collect();
    let detected_order = passing_orders.last().copied();
    let generator = detected_order.map(|m| GeneratorShape::of(&candidates[(m - 2) as usize].matrix.expect("fitted")));
    Ok(DihedralSearchReport {
        continuous: passing_orders.len() == candidates.len(),
        candidates,
        passing_orders,
        detected_order,
        generator,
        max_order,
    })
}

/// Rigid (or similarity) fit between corresponding grid samples of two patches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CongruenceResult {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
    pub scale: f64,
    /// RMS point distance after alignment.
    pub residual: f64,
    pub normalized_residual: f64,
    pub max_deviation: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Sampled congruence: registers `a`'s grid onto `b`'s, node by node.
/// A pass is evidence of congruence on the sampled region, not a proof.
pub fn congruence_test(a: &SurfacePatch, b: &SurfacePatch, allow_scale: bool, tol: f64) -> Result<CongruenceResult> {
    if a.x().len() != b.x().len() {
        return Err(Error::InvalidInput("patches must have the same number of grid nodes".into()));
    }
    let fit = register(
        a.x(),
        b.x(),
        RegistrationOptions {
            allow_scale,
            allow_reflection: true,
        },
    )?;
    let normalized = fit.rms / b.scale();
    Ok(CongruenceResult {
        rotation: fit.rotation,
        translation: fit.translation,
        scale: fit.scale,
        residual: fit.rms,
        normalized_residual: normalized,
        max_deviation: fit.max_deviation,
        tol,
        passed: normalized <= tol && fit.orthogonality_defect() <= ORTHOGONALITY_TOLERANCE,
    })
}
