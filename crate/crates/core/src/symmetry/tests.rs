use core::f64::consts::{FRAC_PI_2, PI};

use super::*;
use crate::analytic::AnalyticExpr;
use crate::bjorling::{evaluate_patch, DomainGrid};
use crate::strip::{make_planar_strip, AnalyticCurve, NormalSide, Strip};
use crate::Vec3;

fn planar(x: &str, y: &str) -> Strip {
    let c = AnalyticCurve::parse(x, y, "0").unwrap();
    make_planar_strip(c, FRAC_PI_2, NormalSide::default()).unwrap()
}

fn catenoid() -> SurfacePatch {
    let grid = DomainGrid::new((-PI, PI), (-1.0, 1.0), 41, 21).unwrap();
    evaluate_patch(&planar("cos(t)", "sin(t)"), &grid, 1e-10).unwrap()
}

fn enneper() -> SurfacePatch {
    let grid = DomainGrid::centered(1.0, 21).unwrap();
    evaluate_patch(&planar("t^2", "t^3/3 - t"), &grid, 1e-10).unwrap()
}

fn plane() -> SurfacePatch {
    let curve = AnalyticCurve::parse("t", "0", "0").unwrap();
    let n = [AnalyticExpr::zero(), AnalyticExpr::zero(), AnalyticExpr::one()];
    evaluate_patch(&Strip::new(curve, n), &DomainGrid::centered(1.0, 11).unwrap(), 1e-10).unwrap()
}

fn parabola() -> SurfacePatch {
    let grid = DomainGrid::new((-1.0, 1.0), (-0.9, 0.9), 21, 19).unwrap();
    evaluate_patch(&planar("t^2/2", "t"), &grid, 1e-10).unwrap()
}

#[test]
fn matrix_identities() {
    let m = DihedralMatrices::new();
    assert!(m.identity_defect() <= 1e-15);
    let names: Vec<_> = m.d4().iter().map(|(n, _)| *n).collect();
    assert_eq!(names.len(), 8);
    for (i, (_, a)) in m.d4().iter().enumerate() {
        for (_, b) in &m.d4()[i + 1..] {
            assert!((a - b).abs().max() > 0.5);
        }
    }
}

#[test]
fn reflections() {
    for r in reflection_checks(&catenoid(), 1e-8).unwrap() {
        assert!(r.passed && r.max_deviation <= 1e-9, "{r:?}");
    }
    let e = reflection_checks(&enneper(), 1e-8).unwrap();
    assert_eq!(e.len(), 2);
    assert!(e.iter().all(|r| r.max_deviation <= 1e-9));
    // X = (u, v, 0): X(w̄) - T X(w) = (0, -2v, 0) and X(-w̄) - Λ²T X(w) = (-2u, 2v, 0).
    let p = reflection_checks(&plane(), 1e-8).unwrap();
    assert!((p[0].max_deviation - 2.0).abs() < 1e-12 && !p[0].passed);
    assert!((p[1].max_deviation - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-12);

    let grid = DomainGrid::new((0.0, 2.0 * PI), (-1.0, 1.0), 21, 11).unwrap();
    let shifted = evaluate_patch(&planar("cos(t)", "sin(t)"), &grid, 1e-10).unwrap();
    let only = reflection_checks(&shifted, 1e-8).unwrap();
    assert_eq!(only.len(), 1);
    assert_eq!(only[0].relation, Relation::ConjugateReflection);
    let grid = DomainGrid::new((0.0, 1.0), (0.0, 1.0), 5, 5).unwrap();
    let corner = evaluate_patch(&planar("cos(t)", "sin(t)"), &grid, 1e-10).unwrap();
    assert_eq!(reflection_checks(&corner, 1e-8), Err(Error::GridNotSymmetric));
}

#[test]
fn cpg_of_the_circle_is_the_catenary() {
    let c = extract_cpg(&catenoid(), 41, 1e-8).unwrap();
    for (t, p) in c.t.iter().zip(&c.points) {
        assert!((p - Vec3::new(libm::cosh(*t), 0.0, *t)).norm() <= 1e-8);
    }
    assert!(!c.curve.degenerate);
    assert!((c.curve.vertex_point - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
    assert!(c.curve.symmetry_residual < 1e-12);
}

#[test]
fn cpg_of_enneper_and_parabola() {
    let c = extract_cpg(&enneper(), 21, 1e-8).unwrap();
    for (t, p) in c.t.iter().zip(&c.points) {
        assert!((p - Vec3::new(-t * t, 0.0, t - t * t * t / 3.0)).norm() <= 1e-12);
    }
    let p = extract_cpg(&parabola(), 31, 1e-8).unwrap();
    assert!(p.planarity <= 1e-12 && p.curve.symmetry_residual <= 1e-10);
    assert!(!p.curve.degenerate);
    // The plane's imaginary axis leaves the XZ-plane.
    assert!(matches!(extract_cpg(&plane(), 11, 1e-8), Err(Error::CpgNotPlanar { .. })));
}

#[test]
fn self_cpg_and_diagonals_agree() {
    let e = self_cpg_test(&enneper(), 1e-8).unwrap();
    assert!(e.passed && e.max_deviation <= 1e-10);
    assert_eq!((e.sigma, e.s), (Some(-1), Some(1)));
    let d = diagonal_line_test(&enneper(), 1e-8).unwrap();
    assert!(d.passed && d.max_deviation <= 1e-10);
    assert!(d.detail("tangent_cosine").unwrap() < 1e-12);
    assert_eq!(d.note.as_deref(), Some("t+it -> (0,y,-y), t-it -> (0,y,y)"));

    let c = self_cpg_test(&catenoid(), 1e-8).unwrap();
    assert!(!c.passed && c.max_deviation >= 0.5);
    let cd = diagonal_line_test(&catenoid(), 1e-8).unwrap();
    assert!(!cd.passed);
    for p in [parabola(), plane()] {
        assert!(!self_cpg_test(&p, 1e-8).unwrap().passed);
        assert!(!diagonal_line_test(&p, 1e-8).unwrap().passed);
    }
}

#[test]
fn dihedral_identities_of_the_isotropic_curve() {
    let e = d4_d8_test(&enneper(), 1e-8).unwrap();
    let lambda = &e[0];
    assert!(lambda.passed && lambda.max_deviation <= 1e-10);
    assert_eq!(lambda.orientation, Some(Orientation::Inverse));
    assert!(e[1].passed && e[1].max_deviation <= 1e-10);
    // The complex matrix does not intertwine f with ρ literally.
    assert!(!e[2].passed);

    let c = d4_d8_test(&catenoid(), 1e-8).unwrap();
    assert!(!c[0].passed && c[0].max_deviation > 0.1);
    assert!(c[1].passed);
}

#[test]
fn self_adjointness() {
    let e = self_adjoint_test(&enneper(), 1e-6).unwrap();
    assert!(e.passed() && e.rms() <= 1e-10, "{e:?}");
    assert!(e.reference.matches, "{:?}", e.reference);
    let c = self_adjoint_test(&catenoid(), 1e-6).unwrap();
    assert!(!c.passed() && c.max_distance() > 0.1, "{}", c.max_distance());
    assert!(self_adjoint_test(&plane(), 1e-6).unwrap().passed());
}

#[test]
fn dihedral_search_orders() {
    let e = dihedral_search(&enneper(), 12, 1e-6).unwrap();
    assert_eq!(e.passing_orders, alloc::vec![2, 4]);
    assert_eq!(e.detected_order, Some(4));
    let g = e.generator.unwrap();
    assert_eq!(g.x_sign, -1.0);
    assert!((g.yz_angle.abs() - FRAC_PI_2).abs() < 1e-8 && g.block_defect < 1e-8);
    let cmp = e.compare_with_weak_family(1);
    assert!(cmp.order_agrees && cmp.claimed_order_passes);

    let c = dihedral_search(&catenoid(), 6, 1e-6).unwrap();
    assert_eq!(c.passing_orders, alloc::vec![2]);
    assert!(!c.continuous);
}

#[test]
fn congruence() {
    let a = catenoid();
    let same = congruence_test(&a, &a, false, 1e-8).unwrap();
    assert!(same.passed && same.residual < 1e-12);
    assert!((same.rotation - nalgebra::Matrix3::identity()).abs().max() < 1e-10);

    let q = *nalgebra::Rotation3::from_euler_angles(0.3, -0.7, 1.1).matrix();
    let b = Vec3::new(1.0, -2.0, 0.5);
    let strip = planar("cos(t)", "sin(t)").transformed(&q, &b);
    let moved = evaluate_patch(&strip, a.grid(), 1e-10).unwrap();
    let fit = congruence_test(&a, &moved, false, 1e-8).unwrap();
    assert!(fit.passed && fit.residual <= 1e-8);
    assert!((fit.rotation - q).abs().max() < 1e-8 && (fit.translation - b).norm() < 1e-8);
    let back = congruence_test(&moved, &a, false, 1e-8).unwrap();
    assert!(back.passed);

    let grid = a.grid();
    let e = evaluate_patch(&planar("t^2", "t^3/3 - t"), grid, 1e-10).unwrap();
    let bad = congruence_test(&a, &e, false, 1e-8).unwrap();
    assert!(!bad.passed && bad.residual > 0.1);
}

#[test]
fn adjoint_diagonals_of_enneper() {
    let r = theorem_test(&enneper(), 1e-8).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.planarity.iter().all(|p| *p <= 1e-12));
    assert!(r.tangent_cosine < 1e-12 && r.plane_cosine < 1e-10);
    assert_eq!((r.relation.sigma, r.relation.s), (Some(1), Some(1)));
    assert!(!theorem_test(&catenoid(), 1e-8).unwrap().passed);
}

#[test]
fn adjoint_real_axis_is_straight() {
    for p in [catenoid(), enneper(), parabola()] {
        let r = straight_arc_test(&p, 1e-8).unwrap();
        assert!(r.passed, "{r:?}");
    }
    let grid = DomainGrid::new((-1.0, 1.0), (-0.5, 0.5), 11, 5).unwrap();
    let helix = Strip::new(
        AnalyticCurve::parse("t", "0", "0").unwrap(),
        ["0", "cos(t)", "sin(t)"].map(|s| AnalyticExpr::parse(s).unwrap()),
    );
    let p = evaluate_patch(&helix, &grid, 1e-10).unwrap();
    assert!(!straight_arc_test(&p, 1e-8).unwrap().passed);
}
