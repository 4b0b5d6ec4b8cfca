use alloc::vec::Vec;

use num_complex::Complex64;

use super::{evaluate_map, gauss_normal, SurfacePatch};
use crate::error::{Error, Result};
use crate::strip::Strip;
use crate::Vec3;

/// Residuals of the minimal-surface equations and the Björling boundary data.
///
/// `isotropy_max`, `conformal_max`, `laplacian_max` and `derivative_fd_max`
/// are scale-free; the boundary residuals are absolute distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryReport {
    pub isotropy_max: f64,
    pub conformal_max: f64,
    pub laplacian_max: f64,
    /// Closed-form `X_u`, `X_v` against centred differences of `X`.
    pub derivative_fd_max: f64,
    pub boundary_curve_max: f64,
    pub boundary_normal_max: f64,
}

const BOUNDARY_SAMPLES: usize = 101;

pub fn minimality_report(patch: &SurfacePatch, strip: &Strip) -> Result<GeometryReport> {
    let grid = patch.grid();
    let fmax = patch.max_fprime().max(f64::MIN_POSITIVE);
    let fmax2 = fmax * fmax;

    let mut iso: f64 = 0.0;
    let mut conf: f64 = 0.0;
    for k in 0..grid.len() {
        let d = &patch.fprime()[k];
        let sq = d.x * d.x + d.y * d.y + d.z * d.z;
        iso = iso.max(sq.norm() / fmax2);
        let (xu, xv) = (patch.x_u(k), patch.x_v(k));
        // ‖f'‖² = 2λ² for a conformal map; compare against the largest λ² on the grid.
        let c = (xu.norm_squared() - xv.norm_squared()).abs().max(xu.dot(&xv).abs());
        conf = conf.max(2.0 * c / fmax2);
    }

    let laplacian = laplacian_max(patch);

    let x = patch.x();
    let (du, dv) = (grid.du(), grid.dv());
    let mut fd: f64 = 0.0;
    for j in 1..grid.nv.saturating_sub(1) {
        for i in 1..grid.nu.saturating_sub(1) {
            let k = grid.index(i, j);
            let xu = (x[grid.index(i + 1, j)] - x[grid.index(i - 1, j)]) / (2.0 * du);
            let xv = (x[grid.index(i, j + 1)] - x[grid.index(i, j - 1)]) / (2.0 * dv);
            fd = fd.max((xu - patch.x_u(k)).norm() / fmax).max((xv - patch.x_v(k)).norm() / fmax);
        }
    }

    if !(grid.v_range.0 <= 0.0 && grid.v_range.1 >= 0.0) {
        return Err(Error::GridCoverage("the real axis is outside the grid".into()));
    }
    let (a, b) = grid.u_range;
    let pts: Vec<Complex64> = (0..BOUNDARY_SAMPLES)
        .map(|k| Complex64::new(a + (b - a) * k as f64 / (BOUNDARY_SAMPLES - 1) as f64, 0.0))
        .collect();
    let values = patch.map().eval_path(&pts)?;
    let mut curve_max: f64 = 0.0;
    let mut normal_max: f64 = 0.0;
    for v in &values {
        let t = v.w.re;
        let x = v.f.map(|z| z.re);
        curve_max = curve_max.max((x - strip.curve().point(t)?).norm());
        let n = gauss_normal(&v.fprime).unwrap_or_else(Vec3::zeros);
        normal_max = normal_max.max((n - strip.normal_at(t)?).norm());
    }

    Ok(GeometryReport {
        isotropy_max: iso,
        conformal_max: conf,
        laplacian_max: laplacian,
        derivative_fd_max: fd,
        boundary_curve_max: curve_max,
        boundary_normal_max: normal_max,
    })
}

/// Largest 5-point Laplacian of `X` over interior nodes, times
/// `diameter / max ‖f'‖`.
fn laplacian_max(patch: &SurfacePatch) -> f64 {
    let grid = patch.grid();
    let x = patch.x();
    let (du2, dv2) = (grid.du() * grid.du(), grid.dv() * grid.dv());
    let mut worst: f64 = 0.0;
    for j in 1..grid.nv.saturating_sub(1) {
        for i in 1..grid.nu.saturating_sub(1) {
            let c = x[grid.index(i, j)];
            let lap = (x[grid.index(i + 1, j)] + x[grid.index(i - 1, j)] - 2.0 * c) / du2
                + (x[grid.index(i, j + 1)] + x[grid.index(i, j - 1)] - 2.0 * c) / dv2;
            worst = worst.max(lap.norm());
        }
    }
    worst * grid.diameter() / patch.max_fprime().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianConvergence {
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
    /// Both values are at rounding level, so no ratio can be observed.
    pub at_noise_floor: bool,
    pub passed: bool,
}

impl LaplacianConvergence {
    pub const NOISE_FLOOR: f64 = 1e-7;
    pub const EXPECTED_RATIO: f64 = 4.0;
    pub const RATIO_TOLERANCE: f64 = 0.2;
}

/// Re-evaluates the patch with halved spacing and compares discrete Laplacians.
/// A second-order stencil on a harmonic map shrinks by a factor of 4.
pub fn laplacian_convergence(patch: &SurfacePatch) -> Result<LaplacianConvergence> {
    let fine_patch = evaluate_map(patch.map(), &patch.grid().refined())?;
    let coarse = laplacian_max(patch);
    let fine = laplacian_max(&fine_patch);
    let ratio = if fine > 0.0 { coarse / fine } else { f64::INFINITY };
    let at_noise_floor = coarse.max(fine) <= LaplacianConvergence::NOISE_FLOOR;
    let band = LaplacianConvergence::EXPECTED_RATIO * LaplacianConvergence::RATIO_TOLERANCE;
    let passed = at_noise_floor || (ratio - LaplacianConvergence::EXPECTED_RATIO).abs() <= band;
    Ok(LaplacianConvergence {
        coarse,
        fine,
        ratio,
        at_noise_floor,
        passed,
    })
}

/// A point of a domain path with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainPoint {
    pub w: Complex64,
    pub dw: Complex64,
    pub ddw: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub point: Vec3,
    pub curvature: f64,
    pub geodesic_curvature: f64,
    pub normal_curvature: f64,
    /// Angle between the principal normal and the surface normal; `None`
    /// where the curvature vanishes.
    pub theta: Option<f64>,
}

const ZERO_CURVATURE: f64 = 1e-12;

/// Curvature data of `s ↦ X(γ(s))` for `s` uniformly in `[a, b]`.
pub fn curve_on_surface_geometry(
    patch: &SurfacePatch,
    gamma: &dyn Fn(f64) -> DomainPoint,
    a: f64,
    b: f64,
    samples: usize,
) -> Result<Vec<CurveSample>> {
    let mut out = Vec::with_capacity(samples);
    for k in 0..samples {
        let s = if samples < 2 { a } else { a + (b - a) * k as f64 / (samples - 1) as f64 };
        let p = gamma(s);
        if !patch.grid().contains(p.w) {
            return Err(Error::GridCoverage(alloc::format!("path point {} outside the grid", p.w)));
        }
        let (v, f2) = patch.map().eval_with_second(p.w)?;
        let d1 = (v.fprime * p.dw).map(|z| z.re);
        let d2 = (f2 * (p.dw * p.dw) + v.fprime * p.ddw).map(|z| z.re);
        let speed = d1.norm();
        if speed <= ZERO_CURVATURE {
            return Err(Error::Irregular { t: s });
        }
        let tangent = d1 / speed;
        let kvec = (d2 - tangent * d2.dot(&tangent)) / (speed * speed);
        let kappa = kvec.norm();
        let n = gauss_normal(&v.fprime).unwrap_or_else(Vec3::zeros);
        let sample = if kappa < ZERO_CURVATURE {
            CurveSample {
                s,
                point: v.f.map(|z| z.re),
                curvature: 0.0,
                geodesic_curvature: 0.0,
                normal_curvature: 0.0,
                theta: None,
            }
        } else {
            let kn = kvec.dot(&n);
            let kg = kvec.dot(&n.cross(&tangent));
            CurveSample {
                s,
                point: v.f.map(|z| z.re),
                curvature: kappa,
                geodesic_curvature: kg,
                normal_curvature: kn,
                theta: Some(libm::atan2(kg, kn)),
            }
        };
        out.push(sample);
    }
    Ok(out)
}
