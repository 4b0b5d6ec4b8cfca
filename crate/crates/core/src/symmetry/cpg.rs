use alloc::format;
use alloc::vec::Vec;

use nalgebra::Matrix3;
use num_complex::Complex64;

use super::{symmetric_samples, DihedralMatrices, Relation, SymmetryReport, CURVE_SAMPLES};
use crate::bjorling::{IsotropicMap, SurfacePatch};
use crate::error::{Error, Result};
use crate::registration::{collinearity_residual, plane_normal, planarity_residual};
use crate::strip::{SymmetricCurveReport, REGULARITY_EPSILON};
use crate::Vec3;

/// Reflections of the grid onto itself: `X(w̄) = T X(w)` needs `v_min = -v_max`,
/// `X(-w̄) = Λ²T X(w)` needs `u_min = -u_max`. Relations whose reflection does
/// not map the grid to itself are skipped.
pub fn reflection_checks(patch: &SurfacePatch, tol: f64) -> Result<Vec<SymmetryReport>> {
    let grid = patch.grid();
    let slack = 1e-12 * grid.diameter();
    let v_sym = (grid.v_range.0 + grid.v_range.1).abs() <= slack;
    let u_sym = (grid.u_range.0 + grid.u_range.1).abs() <= slack;
    if !v_sym && !u_sym {
        return Err(Error::GridNotSymmetric);
    }
    let m = DihedralMatrices::new();
    let x = patch.x();
    let scale = patch.scale();
    let mut out = Vec::new();
    let mut check = |relation, a: Matrix3<f64>, mirror: &dyn Fn(usize, usize) -> usize| {
        let mut worst: f64 = 0.0;
        for j in 0..grid.nv {
            for i in 0..grid.nu {
                let k = grid.index(i, j);
                worst = worst.max((x[mirror(i, j)] - a * x[k]).norm());
            }
        }
        out.push(SymmetryReport::new(relation, worst, scale, tol));
    };
    if v_sym {
        check(Relation::ConjugateReflection, m.t, &|i, j| grid.index(i, grid.nv - 1 - j));
    }
    if u_sym {
        check(Relation::MirrorReflection, m.lambda * m.lambda * m.t, &|i, j| {
            grid.index(grid.nu - 1 - i, j)
        });
    }
    Ok(out)
}

/// The image `ĉ(t) = X(it)` of the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CpgCurve {
    pub t: Vec<f64>,
    pub points: Vec<Vec3>,
    /// `max |y| / scale`: distance from the XZ-plane.
    pub planarity: f64,
    /// Symmetry about the X-axis within the XZ-plane (`x` even, `z` odd).
    pub curve: SymmetricCurveReport,
}

fn axis_half_width(patch: &SurfacePatch, imaginary: bool) -> Result<f64> {
    let g = patch.grid();
    let (across, along) = if imaginary { (g.u_range, g.v_range) } else { (g.v_range, g.u_range) };
    if !(across.0 <= 0.0 && across.1 >= 0.0) {
        return Err(Error::GridCoverage("the axis through 0 is outside the grid".into()));
    }
    let h = (-along.0).min(along.1);
    if h <= 0.0 {
        return Err(Error::GridCoverage("the grid does not straddle 0".into()));
    }
    Ok(h)
}

fn real_parts(map: &IsotropicMap, pts: &[Complex64]) -> Result<Vec<Vec3>> {
    Ok(map.eval_path(pts)?.iter().map(|v| v.f.map(|z| z.re)).collect())
}

pub fn extract_cpg(patch: &SurfacePatch, t_samples: usize, tol: f64) -> Result<CpgCurve> {
    let h = axis_half_width(patch, true)?;
    let n = t_samples.max(3) | 1;
    let t = symmetric_samples(h, n);
    let pts: Vec<Complex64> = t.iter().map(|s| Complex64::new(0.0, *s)).collect();
    let points = real_parts(patch.map(), &pts)?;
    let scale = patch.scale();

    let planarity = points.iter().map(|p| p.y.abs()).fold(0.0, f64::max) / scale;
    if planarity > tol {
        return Err(Error::CpgNotPlanar { residual: planarity, tol });
    }
    let mut symmetry: f64 = 0.0;
    for k in 0..n {
        let (p, q) = (points[k], points[n - 1 - k]);
        symmetry = symmetry.max((p.x - q.x).abs()).max((p.z + q.z).abs());
    }
    let (v, second) = patch.map().eval_with_second(Complex64::new(0.0, 0.0))?;
    // d/dt X(it) = -Im f'(it), d²/dt² X(it) = -Re f''(it).
    let velocity = v.fprime.map(|z| -z.im);
    symmetry = symmetry.max(velocity.x.abs());
    let acc = second.map(|z| -z.re);
    Ok(CpgCurve {
        t,
        points,
        planarity,
        curve: SymmetricCurveReport {
            vertex_parameter: 0.0,
            vertex_point: v.f.map(|z| z.re),
            symmetry_residual: symmetry / scale,
            degenerate: acc.norm() <= REGULARITY_EPSILON,
            second_derivative_at_vertex: acc,
        },
    })
}

/// `min over σ, s ∈ {±1} of max_j ‖a(t_j) - s·M·b(σ t_j)‖` on symmetric samples.
fn best_signed_match(a: &[Vec3], b: &[Vec3], m: &Matrix3<f64>) -> (f64, i8, i8) {
    let n = a.len();
    let mut best = (f64::INFINITY, 1, 1);
    for sigma in [1i8, -1] {
        for s in [1i8, -1] {
            let mut worst: f64 = 0.0;
            for j in 0..n {
                let bj = if sigma == 1 { b[j] } else { b[n - 1 - j] };
                worst = worst.max((a[j] - m * bj * s as f64).norm());
            }
            if worst < best.0 {
                best = (worst, sigma, s);
            }
        }
    }
    best
}

/// `X(it) = s·Λ·X(σt)` for the best signs.
pub fn self_cpg_test(patch: &SurfacePatch, tol: f64) -> Result<SymmetryReport> {
    let h = axis_half_width(patch, true)?.min(axis_half_width(patch, false)?);
    let t = symmetric_samples(h, CURVE_SAMPLES);
    let real: Vec<Complex64> = t.iter().map(|s| Complex64::new(*s, 0.0)).collect();
    let imag: Vec<Complex64> = t.iter().map(|s| Complex64::new(0.0, *s)).collect();
    let c = real_parts(patch.map(), &real)?;
    let chat = real_parts(patch.map(), &imag)?;
    let (worst, sigma, s) = best_signed_match(&chat, &c, &DihedralMatrices::new().lambda);
    let mut r = SymmetryReport::new(Relation::SelfCpg, worst, patch.scale(), tol);
    r.sigma = Some(sigma);
    r.s = Some(s);
    r.details.push(("half_width", h));
    Ok(r)
}

fn line_distance(p: &Vec3, dir: &Vec3) -> f64 {
    (p - dir * p.dot(dir)).norm()
}

/// `X(t + it)` and `X(t - it)` against the lines `(0, y, y)` and `(0, y, -y)`,
/// under whichever assignment fits better.
pub fn diagonal_line_test(patch: &SurfacePatch, tol: f64) -> Result<SymmetryReport> {
    let g = patch.grid();
    let h = g
        .inscribed_radius()
        .ok_or_else(|| Error::GridCoverage("diagonals through 0 leave the grid".into()))?;
    let t = symmetric_samples(h, CURVE_SAMPLES);
    let up: Vec<Complex64> = t.iter().map(|s| Complex64::new(*s, *s)).collect();
    let down: Vec<Complex64> = t.iter().map(|s| Complex64::new(*s, -*s)).collect();
    let a = real_parts(patch.map(), &up)?;
    let b = real_parts(patch.map(), &down)?;
    let plus = Vec3::new(0.0, 1.0, 1.0).normalize();
    let minus = Vec3::new(0.0, 1.0, -1.0).normalize();
    let worst = |pts: &[Vec3], dir: &Vec3| pts.iter().map(|p| line_distance(p, dir)).fold(0.0, f64::max);
    let direct = worst(&a, &plus).max(worst(&b, &minus));
    let swapped = worst(&a, &minus).max(worst(&b, &plus));

    let v = patch.map().eval_path(&[Complex64::new(0.0, 0.0)])?[0];
    let da = (v.fprime * Complex64::new(1.0, 1.0)).map(|z| z.re);
    let db = (v.fprime * Complex64::new(1.0, -1.0)).map(|z| z.re);
    let cosine = if da.norm() > 0.0 && db.norm() > 0.0 {
        da.dot(&db).abs() / (da.norm() * db.norm())
    } else {
        1.0
    };

    let mut r = SymmetryReport::new(Relation::DiagonalLines, direct.min(swapped), patch.scale(), tol);
    r.details.push(("tangent_cosine", cosine));
    r.note = Some(if direct <= swapped {
        "t+it -> (0,y,y), t-it -> (0,y,-y)".into()
    } else {
        "t+it -> (0,y,-y), t-it -> (0,y,y)".into()
    });
    Ok(r)
}

/// Diagonal curves `c*(t) = X*(t + it)`, `ĉ*(t) = X*(t - it)` of the adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    /// Smallest over largest singular value of each curve's centred samples.
    pub planarity: [f64; 2],
    /// `|cos|` of the angle between the tangents at `t = 0`.
    pub tangent_cosine: f64,
    /// `|cos|` of the angle between the two fitted plane normals.
    pub plane_cosine: f64,
    /// `ĉ*(t) = s·Λ·c*(σt)`.
    pub relation: SymmetryReport,
    pub passed: bool,
}

pub fn theorem_test(patch: &SurfacePatch, tol: f64) -> Result<TheoremReport> {
    let g = patch.grid();
    let h = g
        .inscribed_radius()
        .ok_or_else(|| Error::GridCoverage("diagonals through 0 leave the grid".into()))?;
    let adjoint = patch.map().adjoint();
    let t = symmetric_samples(h, CURVE_SAMPLES);
    let up: Vec<Complex64> = t.iter().map(|s| Complex64::new(*s, *s)).collect();
    let down: Vec<Complex64> = t.iter().map(|s| Complex64::new(*s, -*s)).collect();
    let c = real_parts(&adjoint, &up)?;
    let chat = real_parts(&adjoint, &down)?;
    let planarity = [planarity_residual(&c), planarity_residual(&chat)];

    let v = adjoint.eval_path(&[Complex64::new(0.0, 0.0)])?[0];
    let da = (v.fprime * Complex64::new(1.0, 1.0)).map(|z| z.re);
    let db = (v.fprime * Complex64::new(1.0, -1.0)).map(|z| z.re);
    let tangent_cosine = da.dot(&db).abs() / (da.norm() * db.norm()).max(f64::MIN_POSITIVE);
    let plane_cosine = match (plane_normal(&c), plane_normal(&chat)) {
        (Some(a), Some(b)) => a.dot(&b).abs(),
        _ => 1.0,
    };

    let (worst, sigma, s) = best_signed_match(&chat, &c, &DihedralMatrices::new().lambda);
    let mut relation = SymmetryReport::new(Relation::AdjointDiagonals, worst, patch.scale(), tol);
    relation.sigma = Some(sigma);
    relation.s = Some(s);
    relation.details.push(("planarity_plus", planarity[0]));
    relation.details.push(("planarity_minus", planarity[1]));
    relation.details.push(("tangent_cosine", tangent_cosine));
    let passed = relation.passed && planarity[0] <= tol && planarity[1] <= tol && tangent_cosine <= tol;
    Ok(TheoremReport {
        planarity,
        tangent_cosine,
        plane_cosine,
        relation,
        passed,
    })
}

/// Collinearity of `X*(t)` along the real axis of the grid.
pub fn straight_arc_test(patch: &SurfacePatch, tol: f64) -> Result<SymmetryReport> {
    let g = patch.grid();
    if !(g.v_range.0 <= 0.0 && g.v_range.1 >= 0.0) {
        return Err(Error::GridCoverage("the real axis is outside the grid".into()));
    }
    let (a, b) = g.u_range;
    let pts: Vec<Complex64> = (0..101).map(|k| Complex64::new(a + (b - a) * k as f64 / 100.0, 0.0)).collect();
    let arc = real_parts(&patch.map().adjoint(), &pts)?;
    let residual = collinearity_residual(&arc);
    let mut r = SymmetryReport::new(Relation::AdjointStraightArc, residual, 1.0, tol);
    let chord = arc[arc.len() - 1] - arc[0];
    r.note = Some(format!(
        "chord direction ({:.6}, {:.6}, {:.6})",
        chord.x / chord.norm(),
        chord.y / chord.norm(),
        chord.z / chord.norm()
    ));
    Ok(r)
}
