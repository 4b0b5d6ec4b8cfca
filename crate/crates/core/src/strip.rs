//! Björling strips: an analytic curve with a unit normal field along it.

use core::f64::consts::FRAC_PI_2;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::analytic::poly::Polynomial;
use crate::analytic::{AnalyticExpr, BranchTracker};
use crate::error::{Error, EvalError, Result};
use crate::{CVec3, Vec3};

/// Speeds below this count as a singular parameter.
pub const REGULARITY_EPSILON: f64 = 1e-10;
/// Largest derivative order consulted when orienting the in-plane normal.
pub const MAX_ORIENTATION_ORDER: u32 = 12;

fn eval3(e: &[AnalyticExpr; 3], w: Complex64, tr: &mut [BranchTracker]) -> Result<CVec3, EvalError> {
    let [a, b, c] = e;
    Ok(CVec3::new(
        a.eval(w, Some(&mut tr[0]))?,
        b.eval(w, Some(&mut tr[1]))?,
        c.eval(w, Some(&mut tr[2]))?,
    ))
}

fn real3(e: &[AnalyticExpr; 3], t: f64) -> Result<Vec3> {
    let mut tr = [BranchTracker::new(), BranchTracker::new(), BranchTracker::new()];
    let w = Complex64::new(t, 0.0);
    Ok(eval3(e, w, &mut tr).map_err(|s| Error::eval_at(w, s))?.map(|z| z.re))
}

fn sample(a: f64, b: f64, n: usize, k: usize) -> f64 {
    if n < 2 {
        0.5 * (a + b)
    } else {
        a + (b - a) * k as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCurve {
    pos: [AnalyticExpr; 3],
    vel: [AnalyticExpr; 3],
    acc: [AnalyticExpr; 3],
}

impl AnalyticCurve {
    pub fn new(x: AnalyticExpr, y: AnalyticExpr, z: AnalyticExpr) -> Self {
        let pos = [x, y, z];
        let vel = pos.clone().map(|e| e.differentiate());
        let acc = vel.clone().map(|e| e.differentiate());
        AnalyticCurve { pos, vel, acc }
    }

    /// Curve in the XY-plane.
    pub fn planar(x: AnalyticExpr, y: AnalyticExpr) -> Self {
        Self::new(x, y, AnalyticExpr::zero())
    }

    pub fn parse(x: &str, y: &str, z: &str) -> Result<Self> {
        Ok(Self::new(
            AnalyticExpr::parse(x)?,
            AnalyticExpr::parse(y)?,
            AnalyticExpr::parse(z)?,
        ))
    }

    pub fn components(&self) -> &[AnalyticExpr; 3] {
        &self.pos
    }

    pub fn derivative(&self) -> &[AnalyticExpr; 3] {
        &self.vel
    }

    pub fn second_derivative(&self) -> &[AnalyticExpr; 3] {
        &self.acc
    }

    pub fn point(&self, t: f64) -> Result<Vec3> {
        real3(&self.pos, t)
    }

    pub fn velocity(&self, t: f64) -> Result<Vec3> {
        real3(&self.vel, t)
    }

    pub fn acceleration(&self, t: f64) -> Result<Vec3> {
        real3(&self.acc, t)
    }

    /// Each component must be real on `[a, b]` (50 samples, tolerance 1e-12).
    pub fn check_real(&self, a: f64, b: f64) -> Result<()> {
        for k in 0..50 {
            let t = sample(a, b, 50, k);
            let w = Complex64::new(t, 0.0);
            for e in &self.pos {
                let mut tr = BranchTracker::new();
                let v = e.eval(w, Some(&mut tr)).map_err(|s| Error::eval_at(w, s))?;
                if v.im.abs() > 1e-12 {
                    return Err(Error::NotRealValued { t, imag: v.im.abs() });
                }
            }
        }
        Ok(())
    }

    /// Parameters in `[a, b]` where the speed drops below the regularity
    /// threshold. Two adjacent flagged samples make the curve irregular.
    pub fn check_regular(&self, a: f64, b: f64, samples: usize) -> Result<alloc::vec::Vec<f64>> {
        let mut flagged = alloc::vec::Vec::new();
        let mut previous = false;
        for k in 0..samples {
            let t = sample(a, b, samples, k);
            let slow = self.velocity(t)?.norm() <= REGULARITY_EPSILON;
            if slow && previous {
                return Err(Error::Irregular { t });
            }
            if slow {
                flagged.push(t);
            }
            previous = slow;
        }
        Ok(flagged)
    }

    /// Image under `x ↦ Q x + b`.
    pub fn transformed(&self, rotation: &Matrix3<f64>, translation: &Vec3) -> Self {
        let comps = linear_map(&self.pos, rotation);
        let [x, y, z] = comps;
        Self::new(x + translation.x, y + translation.y, z + translation.z)
    }
}

fn cross(a: &[AnalyticExpr; 3], b: &[AnalyticExpr; 3]) -> [AnalyticExpr; 3] {
    let m = |i: usize, j: usize| a[i].clone() * b[j].clone();
    [m(1, 2) - m(2, 1), m(2, 0) - m(0, 2), m(0, 1) - m(1, 0)]
}

fn linear_map(e: &[AnalyticExpr; 3], m: &Matrix3<f64>) -> [AnalyticExpr; 3] {
    core::array::from_fn(|i| {
        (0..3).fold(AnalyticExpr::zero(), |acc, j| acc + m[(i, j)] * e[j].clone())
    })
}

/// Which side of the curve the in-plane normal points to at the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalSide {
    /// Against the curvature vector at `t = 0`. With the Schwarz formula as
    /// implemented this turns the circle into `(cos u cosh v, sin u cosh v, v)`.
    #[default]
    AwayFromCurvature,
    /// Along the curvature vector (the principal normal) at `t = 0`.
    TowardCurvature,
}

/// Intrinsic frame of a curve in the XY-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarFrame {
    pub speed: AnalyticExpr,
    /// True when `|c'|` was recovered as a polynomial, so no branch tracking is needed.
    pub exact_speed: bool,
    pub tangent: [AnalyticExpr; 3],
    pub in_plane_normal: [AnalyticExpr; 3],
    /// `𝔟 = 𝔫 × t̂`, a constant `±e_z`.
    pub binormal: Vec3,
    pub side: NormalSide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strip {
    curve: AnalyticCurve,
    normal: [AnalyticExpr; 3],
    /// `n × c'`, kept separately because `n` alone may have poles off the
    /// real axis where the product is still entire.
    integrand: [AnalyticExpr; 3],
    dintegrand: [AnalyticExpr; 3],
    frame: Option<PlanarFrame>,
    phi: Option<f64>,
    tracked: [bool; 5],
}

/// One tracker per expression of a strip, continued along a path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StripBranches {
    trackers: [BranchTracker; 15],
}

impl StripBranches {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Strip data at one complex parameter; `g = n × c'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameValue {
    pub c: CVec3,
    pub dc: CVec3,
    pub g: CVec3,
}

const POS: usize = 0;
const VEL: usize = 1;
const ACC: usize = 2;
const INT: usize = 3;
const DINT: usize = 4;

impl Strip {
    /// Strip with an explicitly given normal field. Use [`validate_strip`] to check it.
    pub fn new(curve: AnalyticCurve, normal: [AnalyticExpr; 3]) -> Self {
        let integrand = cross(&normal, &curve.vel);
        Self::assemble(curve, normal, integrand, None, None)
    }

    fn assemble(
        curve: AnalyticCurve,
        normal: [AnalyticExpr; 3],
        integrand: [AnalyticExpr; 3],
        frame: Option<PlanarFrame>,
        phi: Option<f64>,
    ) -> Self {
        let dintegrand = integrand.clone().map(|e| e.differentiate());
        let has = |e: &[AnalyticExpr; 3]| e.iter().any(AnalyticExpr::contains_sqrt);
        let tracked = [
            has(&curve.pos),
            has(&curve.vel),
            has(&curve.acc),
            has(&integrand),
            has(&dintegrand),
        ];
        Strip {
            curve,
            normal,
            integrand,
            dintegrand,
            frame,
            phi,
            tracked,
        }
    }

    pub fn curve(&self) -> &AnalyticCurve {
        &self.curve
    }

    pub fn normal(&self) -> &[AnalyticExpr; 3] {
        &self.normal
    }

    pub fn integrand_exprs(&self) -> &[AnalyticExpr; 3] {
        &self.integrand
    }

    pub fn frame(&self) -> Option<&PlanarFrame> {
        self.frame.as_ref()
    }

    pub fn phi(&self) -> Option<f64> {
        self.phi
    }

    /// Whether any expression needs branch continuation.
    pub fn needs_tracking(&self) -> bool {
        self.tracked.iter().any(|t| *t)
    }

    pub fn normal_at(&self, t: f64) -> Result<Vec3> {
        real3(&self.normal, t)
    }

    fn group(&self, g: usize) -> &[AnalyticExpr; 3] {
        match g {
            POS => &self.curve.pos,
            VEL => &self.curve.vel,
            ACC => &self.curve.acc,
            INT => &self.integrand,
            _ => &self.dintegrand,
        }
    }

    fn eval_group(&self, g: usize, w: Complex64, br: &mut StripBranches) -> Result<CVec3, EvalError> {
        eval3(self.group(g), w, &mut br.trackers[3 * g..3 * g + 3])
    }

    /// Advances the trackers of groups not needed at this point, so they stay
    /// continuous along the path.
    fn touch(&self, skip: &[usize], w: Complex64, br: &mut StripBranches) -> Result<(), EvalError> {
        for g in 0..5 {
            if self.tracked[g] && !skip.contains(&g) {
                self.eval_group(g, w, br)?;
            }
        }
        Ok(())
    }

    /// The Schwarz integrand `n(z) × c'(z)`.
    pub fn integrand(&self, w: Complex64, br: &mut StripBranches) -> Result<CVec3, EvalError> {
        let g = self.eval_group(INT, w, br)?;
        self.touch(&[INT], w, br)?;
        Ok(g)
    }

    pub fn eval_frame(&self, w: Complex64, br: &mut StripBranches) -> Result<FrameValue, EvalError> {
        let c = self.eval_group(POS, w, br)?;
        let dc = self.eval_group(VEL, w, br)?;
        let g = self.eval_group(INT, w, br)?;
        self.touch(&[POS, VEL, INT], w, br)?;
        Ok(FrameValue { c, dc, g })
    }

    /// `(c''(w), g'(w))`.
    pub fn eval_second(&self, w: Complex64, br: &mut StripBranches) -> Result<(CVec3, CVec3), EvalError> {
        let ddc = self.eval_group(ACC, w, br)?;
        let dg = self.eval_group(DINT, w, br)?;
        Ok((ddc, dg))
    }

    /// Image of the strip under the rigid motion `x ↦ Q x + b` (normal rotated by `Q`).
    pub fn transformed(&self, rotation: &Matrix3<f64>, translation: &Vec3) -> Strip {
        let curve = self.curve.transformed(rotation, translation);
        let normal = linear_map(&self.normal, rotation);
        let integrand = linear_map(&self.integrand, rotation);
        Self::assemble(curve, normal, integrand, None, self.phi)
    }
}

/// Builds the strip over a curve in the XY-plane with normal
/// `n = 𝔟 cos φ + 𝔫 sin φ`, where `𝔫` is the unit tangent turned by 90° in
/// the plane and `𝔟 = 𝔫 × t̂`.
pub fn make_planar_strip(curve: AnalyticCurve, phi: f64, side: NormalSide) -> Result<Strip> {
    if !(phi > -FRAC_PI_2 && phi <= FRAC_PI_2) {
        return Err(Error::InvalidInput(alloc::format!(
            "tilt angle {phi} outside (-pi/2, pi/2]"
        )));
    }
    let planarity = planarity_residual(&curve)?;
    if planarity > 1e-12 {
        return Err(Error::NotPlanar { residual: planarity });
    }
    let [dx, dy, _] = curve.derivative().clone();
    let (dx0, dy0) = (dx.clone(), dy.clone());
    let speed_sq = dx.clone().powi(2) + dy.clone().powi(2);
    let exact = Polynomial::from_expr(&speed_sq).and_then(|p| p.sqrt(0.0, 1e-12));
    let (speed, exact_speed) = match exact {
        Some(q) => (q.to_expr(), true),
        None => (speed_sq.sqrt(), false),
    };
    // The radicand (or the exact speed) must stay away from zero near the vertex.
    for k in 0..201 {
        let t = sample(-1.0, 1.0, 201, k);
        let w = Complex64::new(t, 0.0);
        if exact_speed {
            let q = speed.eval_real(t).map_err(|s| Error::eval_at(w, s))?;
            if q.abs() <= REGULARITY_EPSILON {
                return Err(Error::Irregular { t });
            }
        } else {
            let r = speed_sq.eval(w, None).map_err(|s| Error::eval_at(w, s))?;
            if r.norm() < BranchTracker::DEFAULT_EPSILON {
                return Err(Error::BranchPointOnInterval { t });
            }
        }
    }

    let tangent = [dx.clone() / speed.clone(), dy.clone() / speed.clone(), AnalyticExpr::zero()];
    let turned = [-(dy / speed.clone()), dx / speed.clone(), AnalyticExpr::zero()];

    let toward = curvature_side(&curve, &turned)?;
    let sign = match side {
        NormalSide::TowardCurvature => toward,
        NormalSide::AwayFromCurvature => -toward,
    };
    let in_plane_normal = turned.map(|e| sign * e);
    // (J t̂) × t̂ = -e_z.
    let binormal = Vec3::new(0.0, 0.0, -sign);

    // n × c' = σ (cos φ (y', -x', 0) - sin φ |c'| e_z), free of the 1/|c'| poles.
    let (normal, integrand) = if phi == FRAC_PI_2 {
        let g = [AnalyticExpr::zero(), AnalyticExpr::zero(), -sign * speed.clone()];
        (in_plane_normal.clone(), g)
    } else {
        let (s, c) = (libm::sin(phi), libm::cos(phi));
        let n = [
            s * in_plane_normal[0].clone(),
            s * in_plane_normal[1].clone(),
            AnalyticExpr::constant(c * binormal.z),
        ];
        let g = [
            (sign * c) * dy0,
            (-sign * c) * dx0,
            (-sign * s) * speed.clone(),
        ];
        (n, g)
    };
    let frame = PlanarFrame {
        speed,
        exact_speed,
        tangent,
        in_plane_normal,
        binormal,
        side,
    };
    Ok(Strip::assemble(curve, normal, integrand, Some(frame), Some(phi)))
}

fn planarity_residual(curve: &AnalyticCurve) -> Result<f64> {
    let z = &curve.components()[2];
    if z.is_const(0.0) {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for k in 0..21 {
        for im in [0.0, 0.5] {
            let w = Complex64::new(sample(-1.0, 1.0, 21, k), im);
            let mut tr = BranchTracker::new();
            let v = z.eval(w, Some(&mut tr)).map_err(|s| Error::eval_at(w, s))?;
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

/// `+1` if the first non-vanishing derivative `c^(k)(0)`, `k ≥ 2`, has a
/// positive component along the turned tangent, `-1` if negative.
fn curvature_side(curve: &AnalyticCurve, turned: &[AnalyticExpr; 3]) -> Result<f64> {
    let j = real3(turned, 0.0)?;
    let mut d = curve.second_derivative().clone();
    for _ in 2..=MAX_ORIENTATION_ORDER {
        let v = real3(&d, 0.0)?;
        let along = v.dot(&j);
        if along.abs() > REGULARITY_EPSILON {
            return Ok(libm::copysign(1.0, along));
        }
        d = d.map(|e| e.differentiate());
    }
    Err(Error::DegenerateOrientation)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripValidation {
    pub max_unit_deviation: f64,
    pub max_orthogonality: f64,
    pub min_speed: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Unit-norm and orthogonality residuals of the normal on `n_samples` points of `[a, b]`.
pub fn validate_strip(strip: &Strip, a: f64, b: f64, n_samples: usize, tol: f64) -> StripValidation {
    let mut unit: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    let mut min_speed = f64::INFINITY;
    let mut failed = false;
    for k in 0..n_samples {
        let t = sample(a, b, n_samples, k);
        let (Ok(dc), Ok(n)) = (strip.curve.velocity(t), strip.normal_at(t)) else {
            failed = true;
            continue;
        };
        let speed = dc.norm();
        unit = unit.max((n.norm() - 1.0).abs());
        if speed > 0.0 {
            ortho = ortho.max(dc.dot(&n).abs() / speed);
        }
        min_speed = min_speed.min(speed);
    }
    let passed = !failed && unit <= tol && ortho <= tol && min_speed > REGULARITY_EPSILON;
    StripValidation {
        max_unit_deviation: unit,
        max_orthogonality: ortho,
        min_speed,
        tol,
        passed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricCurveReport {
    pub vertex_parameter: f64,
    pub vertex_point: Vec3,
    pub symmetry_residual: f64,
    pub degenerate: bool,
    pub second_derivative_at_vertex: Vec3,
}

/// Checks `x(-t) = x(t)`, `y(-t) = -y(t)`, `z = 0` on `[-h, h]` and
/// `⟨c'(0), e_x⟩ = 0`: the curve crosses the X-axis perpendicularly at `t = 0`.
pub fn check_perpendicular_symmetric(
    curve: &AnalyticCurve,
    half_width: f64,
    samples: usize,
    tol: f64,
) -> Result<SymmetricCurveReport> {
    let mut residual: f64 = 0.0;
    for k in 0..samples {
        let t = sample(0.0, half_width, samples, k);
        let p = curve.point(t)?;
        let q = curve.point(-t)?;
        residual = residual
            .max((p.x - q.x).abs())
            .max((p.y + q.y).abs())
            .max(p.z.abs())
            .max(q.z.abs());
    }
    residual = residual.max(curve.velocity(0.0)?.x.abs());
    if residual > tol {
        return Err(Error::NotPerpendicularSymmetric { residual, tol });
    }
    let acc = curve.acceleration(0.0)?;
    Ok(SymmetricCurveReport {
        vertex_parameter: 0.0,
        vertex_point: curve.point(0.0)?,
        symmetry_residual: residual,
        degenerate: acc.norm() <= REGULARITY_EPSILON,
        second_derivative_at_vertex: acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(x: &str, y: &str) -> AnalyticCurve {
        AnalyticCurve::parse(x, y, "0").unwrap()
    }

    fn circle() -> AnalyticCurve {
        curve("cos(t)", "sin(t)")
    }

    fn enneper() -> AnalyticCurve {
        curve("t^2", "t^3/3 - t")
    }

    #[test]
    fn circle_principal_normal_points_inward() {
        let s = make_planar_strip(circle(), FRAC_PI_2, NormalSide::TowardCurvature).unwrap();
        let n = s.normal_at(0.0).unwrap();
        assert!((n - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn default_side_points_outward() {
        let s = make_planar_strip(circle(), FRAC_PI_2, NormalSide::default()).unwrap();
        for t in [0.0, 0.7, 2.0] {
            let n = s.normal_at(t).unwrap();
            assert!((n - Vec3::new(libm::cos(t), libm::sin(t), 0.0)).norm() < 1e-15);
        }
        assert_eq!(s.frame().unwrap().binormal, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn circle_speed_is_not_a_polynomial() {
        let s = make_planar_strip(circle(), FRAC_PI_2, NormalSide::default()).unwrap();
        assert!(!s.frame().unwrap().exact_speed);
        assert!(s.needs_tracking());
    }

    #[test]
    fn enneper_speed_is_exact() {
        let s = make_planar_strip(enneper(), FRAC_PI_2, NormalSide::default()).unwrap();
        let f = s.frame().unwrap();
        assert!(f.exact_speed);
        assert!(!s.needs_tracking());
        for k in 0..11 {
            let t = -2.0 + 0.4 * k as f64;
            assert!((f.speed.eval_real(t).unwrap() - (t * t + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_tilt_selects_binormal() {
        let s = make_planar_strip(circle(), 0.0, NormalSide::default()).unwrap();
        for t in [-1.0, 0.0, 0.5] {
            assert_eq!(s.normal_at(t).unwrap(), Vec3::new(0.0, 0.0, 1.0));
        }
    }

    #[test]
    fn orientation_uses_higher_derivatives_when_flat_at_vertex() {
        // c''(0) = 0 but c^(6)(0) points along +x.
        let c = curve("t^6/3", "t^11/11 - t");
        let toward = make_planar_strip(c.clone(), FRAC_PI_2, NormalSide::TowardCurvature).unwrap();
        assert!((toward.normal_at(0.0).unwrap() - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        let line = curve("1", "t");
        assert_eq!(
            make_planar_strip(line, FRAC_PI_2, NormalSide::default()),
            Err(Error::DegenerateOrientation)
        );
        assert!(make_planar_strip(c, FRAC_PI_2, NormalSide::default()).is_ok());
    }

    #[test]
    fn rejects_non_planar_and_bad_tilt() {
        let c = AnalyticCurve::parse("cos(t)", "sin(t)", "t").unwrap();
        assert!(matches!(
            make_planar_strip(c, FRAC_PI_2, NormalSide::default()),
            Err(Error::NotPlanar { .. })
        ));
        assert!(matches!(
            make_planar_strip(circle(), -FRAC_PI_2, NormalSide::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn branch_point_on_real_axis_is_rejected() {
        // |c'|^2 = (t^2 - 1/4)^2 + 0 vanishes at t = ±1/2 and is not caught as a square
        // because y' carries a transcendental factor.
        let c = curve("t^3/3 - t/4", "0*sin(t)");
        assert!(make_planar_strip(c, FRAC_PI_2, NormalSide::default()).is_err());
        let c = curve("sin(t)^2", "0*cos(t)");
        let err = make_planar_strip(c, FRAC_PI_2, NormalSide::default()).unwrap_err();
        assert!(matches!(err, Error::BranchPointOnInterval { .. }), "{err:?}");
    }

    #[test]
    fn validation_examples() {
        let inward = Strip::new(circle(), [
            AnalyticExpr::parse("-cos(t)").unwrap(),
            AnalyticExpr::parse("-sin(t)").unwrap(),
            AnalyticExpr::zero(),
        ]);
        let v = validate_strip(&inward, -3.0, 3.0, 100, 1e-10);
        assert!(v.passed && v.max_unit_deviation < 1e-14 && v.max_orthogonality < 1e-14);

        let line = curve("t", "0");
        let bad = Strip::new(line.clone(), [
            AnalyticExpr::zero(),
            AnalyticExpr::parse("cosh(t)").unwrap(),
            AnalyticExpr::parse("sinh(t)").unwrap(),
        ]);
        let v = validate_strip(&bad, 1.0, 1.0, 1, 1e-10);
        assert!(!v.passed);
        assert!((v.max_unit_deviation - (libm::sqrt(libm::cosh(2.0)) - 1.0)).abs() < 1e-12);

        let parallel = Strip::new(line, [AnalyticExpr::one(), AnalyticExpr::zero(), AnalyticExpr::zero()]);
        let v = validate_strip(&parallel, -1.0, 1.0, 10, 1e-10);
        assert!(!v.passed && (v.max_orthogonality - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perpendicular_symmetry_examples() {
        let r = check_perpendicular_symmetric(&circle(), 1.0, 25, 1e-12).unwrap();
        assert_eq!(r.vertex_point, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(r.second_derivative_at_vertex, Vec3::new(-1.0, 0.0, 0.0));
        assert!(!r.degenerate);

        let r = check_perpendicular_symmetric(&enneper(), 1.0, 25, 1e-12).unwrap();
        assert_eq!(r.vertex_point, Vec3::zeros());
        assert_eq!(enneper().velocity(0.0).unwrap(), Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(r.second_derivative_at_vertex, Vec3::new(2.0, 0.0, 0.0));
        assert!(!r.degenerate);

        let r = check_perpendicular_symmetric(&curve("1", "t"), 1.0, 25, 1e-12).unwrap();
        assert!(r.degenerate);

        let err = check_perpendicular_symmetric(&curve("t", "t^2"), 1.0, 25, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NotPerpendicularSymmetric { .. }));
    }

    #[test]
    fn transformed_strip_moves_rigidly() {
        let s = make_planar_strip(circle(), FRAC_PI_2, NormalSide::default()).unwrap();
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -0.2, 1.1).into_inner();
        let b = Vec3::new(1.0, -2.0, 0.5);
        let moved = s.transformed(&q, &b);
        for t in [-1.0, 0.0, 0.4] {
            let p = moved.curve().point(t).unwrap();
            assert!((p - (q * s.curve().point(t).unwrap() + b)).norm() < 1e-14);
            let n = moved.normal_at(t).unwrap();
            assert!((n - q * s.normal_at(t).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn planar_integrand_is_normal_cross_velocity() {
        for c in catalog_like_curves() {
            for phi in [FRAC_PI_2, 0.4, -1.0] {
                let s = make_planar_strip(c.clone(), phi, NormalSide::default()).unwrap();
                for t in [-0.8, 0.0, 0.3] {
                    let n = s.normal_at(t).unwrap();
                    let dc = s.curve().velocity(t).unwrap();
                    let g = real3(s.integrand_exprs(), t).unwrap();
                    assert!((g - n.cross(&dc)).norm() < 1e-13);
                }
            }
        }
    }

    fn catalog_like_curves() -> alloc::vec::Vec<AnalyticCurve> {
        alloc::vec![
            circle(),
            enneper(),
            curve("3*cos(t)", "3*sin(t)"),
            curve("cosh(t)", "t"),
            curve("t^2/2", "t"),
            curve("1 - cos(t)", "t + sin(t)"),
            curve("cos(t)", "2*sin(t)"),
            curve("t^6/3", "t^11/11 - t"),
        ]
    }

    #[test]
    fn planar_strips_validate() {
        for c in catalog_like_curves() {
            for side in [NormalSide::AwayFromCurvature, NormalSide::TowardCurvature] {
                for phi in [FRAC_PI_2, 0.3, 0.0, -1.2] {
                    let s = make_planar_strip(c.clone(), phi, side).unwrap();
                    let v = validate_strip(&s, -0.9, 0.9, 200, 1e-10);
                    assert!(v.passed, "{c:?} {phi}: {v:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn frame_is_orthonormal(idx in 0usize..8, t in -0.9f64..0.9) {
            let c = catalog_like_curves().swap_remove(idx);
            let s = make_planar_strip(c, FRAC_PI_2, NormalSide::default()).unwrap();
            let f = s.frame().unwrap();
            let tan = real3(&f.tangent, t).unwrap();
            let nrm = real3(&f.in_plane_normal, t).unwrap();
            prop_assert!((tan.norm() - 1.0).abs() <= 1e-10);
            prop_assert!((nrm.norm() - 1.0).abs() <= 1e-10);
            prop_assert!(tan.dot(&nrm).abs() <= 1e-10);
            prop_assert!((nrm.cross(&tan) - f.binormal).norm() <= 1e-10);
            // φ = π/2 strips use 𝔫 itself as the normal.
            prop_assert_eq!(s.normal_at(t).unwrap(), nrm);
        }
    }
}
