use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;

use super::*;
use crate::analytic::AnalyticExpr;
use crate::strip::{make_planar_strip, AnalyticCurve, NormalSide};

fn planar(x: &str, y: &str) -> Strip {
    let c = AnalyticCurve::parse(x, y, "0").unwrap();
    make_planar_strip(c, FRAC_PI_2, NormalSide::default()).unwrap()
}

fn explicit(c: [&str; 3], n: [&str; 3]) -> Strip {
    let curve = AnalyticCurve::parse(c[0], c[1], c[2]).unwrap();
    Strip::new(curve, n.map(|s| AnalyticExpr::parse(s).unwrap()))
}

// Hand-integrated oracles.
fn catenoid(u: f64, v: f64) -> Vec3 {
    Vec3::new(libm::cos(u) * libm::cosh(v), libm::sin(u) * libm::cosh(v), v)
}

fn enneper(w: C) -> [C; 3] {
    let w3 = w * w * w / 3.0;
    [w * w, w3 - w, -C::i() * (w3 + w)]
}

fn max_dev(patch: &SurfacePatch, oracle: impl Fn(f64, f64) -> Vec3) -> f64 {
    let g = patch.grid();
    let mut worst: f64 = 0.0;
    for j in 0..g.nv {
        for i in 0..g.nu {
            worst = worst.max((patch.x()[g.index(i, j)] - oracle(g.u(i), g.v(j))).norm());
        }
    }
    worst
}

#[test]
fn grid_layout() {
    let g = DomainGrid::new((0.0, 2.0), (-1.0, 1.0), 3, 5).unwrap();
    assert_eq!(g.len(), 15);
    assert_eq!(g.point(2, 4), C::new(2.0, 1.0));
    assert_eq!(g.index(1, 2), 7);
    assert_eq!(g.locate(C::new(1.0, 0.5)), Some(g.index(1, 3)));
    assert_eq!(g.locate(C::new(0.7, 0.5)), None);
    assert_eq!(g.refined().nu, 5);
    assert!(DomainGrid::new((1.0, 0.0), (0.0, 1.0), 3, 3).is_err());
    assert!(DomainGrid::new((0.0, 1.0), (0.0, 1.0), 1, 3).is_err());
    assert!(DomainGrid::centered(1.0, 5).unwrap().is_symmetric());
    assert!(!g.is_symmetric());
}

#[test]
fn circle_gives_catenoid() {
    let strip = planar("cos(t)", "sin(t)");
    let grid = DomainGrid::new((0.0, 2.0 * PI), (-1.0, 1.0), 41, 21).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    assert!(max_dev(&patch, catenoid) < 1e-9);
    let top = patch.x()[grid.index(0, grid.nv - 1)];
    assert!((top - Vec3::new(1.543_080_634_815_243_7, 0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn enneper_boundary_and_closed_form() {
    let strip = planar("t^2", "t^3/3 - t");
    let grid = DomainGrid::centered(1.0, 21).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    let x = patch.x()[grid.index(20, 10)];
    assert!((x - Vec3::new(1.0, -2.0 / 3.0, 0.0)).norm() < 1e-13);
    for k in 0..grid.len() {
        let (i, j) = (k % grid.nu, k / grid.nu);
        let e = enneper(grid.point(i, j));
        for (got, want) in patch.f()[k].iter().zip(e.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }
}

#[test]
fn horizontal_line_with_vertical_normal_is_the_plane() {
    let strip = explicit(["t", "0", "0"], ["0", "0", "1"]);
    let grid = DomainGrid::centered(1.0, 5).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    assert!(max_dev(&patch, |u, v| Vec3::new(u, v, 0.0)) < 1e-15);
    let r = minimality_report(&patch, &strip).unwrap();
    assert_eq!(r.isotropy_max, 0.0);
    assert_eq!(r.conformal_max, 0.0);
    assert_eq!(r.boundary_curve_max, 0.0);
    assert_eq!(r.boundary_normal_max, 0.0);
    assert!(r.laplacian_max < 1e-12);
}

#[test]
fn rotating_normal_gives_helicoid() {
    let strip = explicit(["t", "0", "0"], ["0", "cos(t)", "sin(t)"]);
    let grid = DomainGrid::new((-PI, PI), (-1.0, 1.0), 31, 21).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    let dev = max_dev(&patch, |u, v| {
        Vec3::new(u, libm::sin(u) * libm::sinh(v), -libm::cos(u) * libm::sinh(v))
    });
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn gauss_map_matches_strip_normal_on_real_axis() {
    for strip in [
        planar("cos(t)", "sin(t)"),
        planar("t^2", "t^3/3 - t"),
        planar("t^2/2", "t"),
        explicit(["t", "0", "0"], ["0", "0", "1"]),
    ] {
        let grid = DomainGrid::centered(0.8, 9).unwrap();
        let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
        let r = minimality_report(&patch, &strip).unwrap();
        assert!(r.boundary_normal_max <= 1e-8, "{r:?}");
        assert!(r.boundary_curve_max <= 1e-8, "{r:?}");
        assert!(r.isotropy_max <= 1e-10 && r.conformal_max <= 1e-8, "{r:?}");
        assert!(r.derivative_fd_max < 0.02, "{r:?}");
    }
}

#[test]
fn adjoint_examples() {
    let strip = planar("t^2", "t^3/3 - t");
    let grid = DomainGrid::centered(1.0, 11).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    let adj = adjoint_patch(&patch);
    for i in 0..grid.nu {
        let t = grid.u(i);
        let x = adj.x()[grid.index(i, 5)];
        assert!((x - Vec3::new(0.0, 0.0, -(t * t * t / 3.0 + t))).norm() < 1e-13);
    }
    let twice = adjoint_patch(&adj);
    for k in 0..grid.len() {
        assert_eq!(twice.x()[k], -patch.x()[k]);
        assert!((adj.normal()[k] - patch.normal()[k]).norm() < 1e-15);
    }

    let strip = planar("cos(t)", "sin(t)");
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    let adj = adjoint_patch(&patch);
    for i in 0..grid.nu {
        let x = adj.x()[grid.index(i, 5)];
        assert!((x - Vec3::new(0.0, 0.0, -grid.u(i))).norm() < 1e-12);
    }
    // The map of the adjoint patch agrees with its stored values.
    let w = grid.point(3, 8);
    let v = adj.map().eval(w).unwrap();
    assert!(crate::quadrature::cnorm(&(v.f - adj.f()[grid.index(3, 8)])) < 1e-12);
}

#[test]
fn column_order_does_not_matter() {
    let strip = planar("t^2/2", "t");
    let grid = DomainGrid::new((-0.7, 0.9), (-0.8, 0.6), 9, 7).unwrap();
    let map = IsotropicMap::new(strip.clone(), grid.base, 1e-10);
    let seeds = map.column_seeds(&grid).unwrap();
    let mut columns: alloc::vec::Vec<_> = (0..grid.nu).map(|_| alloc::vec::Vec::new()).collect();
    for i in (0..grid.nu).rev() {
        columns[i] = map.eval_column(&grid, &seeds[i]).unwrap();
    }
    let a = SurfacePatch::from_columns(grid, map, columns).unwrap();
    let b = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    assert_eq!(a.f(), b.f());
    assert_eq!(a.normal(), b.normal());
}

#[test]
fn real_base_point_shift_leaves_surface_unchanged() {
    // Moving w0 along the real axis adds an imaginary constant to f.
    let strip = planar("cos(t)", "sin(t)");
    let grid = DomainGrid::with_base((-1.0, 1.0), (-1.0, 1.0), 9, 9, C::new(0.3, 0.0)).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    assert!(max_dev(&patch, catenoid) < 1e-9);
}

#[test]
fn laplacian_converges_at_second_order() {
    let strip = planar("cos(t)", "sin(t)");
    let grid = DomainGrid::new((-PI, PI), (-1.0, 1.0), 21, 11).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    let c = laplacian_convergence(&patch).unwrap();
    assert!(c.passed && !c.at_noise_floor, "{c:?}");

    // Cubic data: the stencil is exact, both values sit at rounding level.
    let strip = planar("t^2", "t^3/3 - t");
    let patch = evaluate_patch(&strip, &DomainGrid::centered(1.0, 11).unwrap(), 1e-10).unwrap();
    let c = laplacian_convergence(&patch).unwrap();
    assert!(c.passed && c.at_noise_floor, "{c:?}");
}

#[test]
fn halving_quadrature_tolerance_is_self_consistent() {
    for strip in [planar("cos(t)", "sin(t)"), planar("t^2/2", "t"), planar("1 - cos(t)", "t + sin(t)")] {
        let grid = DomainGrid::centered(0.8, 9).unwrap();
        let a = evaluate_patch(&strip, &grid, 1e-8).unwrap();
        let b = evaluate_patch(&strip, &grid, 5e-9).unwrap();
        for k in 0..grid.len() {
            assert!(crate::quadrature::cnorm(&(a.f()[k] - b.f()[k])) < 1e-8);
        }
    }
}

#[test]
fn curvature_of_curves_on_surfaces() {
    // Unit circle on the catenoid: geodesic, curvature one, normal curvature ±1.
    let strip = planar("cos(t)", "sin(t)");
    let grid = DomainGrid::new((-PI, PI), (-1.0, 1.0), 11, 11).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    let real_axis = |s: f64| DomainPoint {
        w: C::new(s, 0.0),
        dw: C::new(1.0, 0.0),
        ddw: C::new(0.0, 0.0),
    };
    for c in curve_on_surface_geometry(&patch, &real_axis, -3.0, 3.0, 13).unwrap() {
        assert!((c.curvature - 1.0).abs() < 1e-10);
        assert!(c.geodesic_curvature.abs() < 1e-10);
        assert!((c.normal_curvature.abs() - 1.0).abs() < 1e-10);
    }

    // Björling data is a geodesic of its surface.
    let strip = planar("t^2/2", "t");
    let patch = evaluate_patch(&strip, &DomainGrid::centered(0.8, 9).unwrap(), 1e-10).unwrap();
    for c in curve_on_surface_geometry(&patch, &real_axis, -0.8, 0.8, 9).unwrap() {
        assert!(c.geodesic_curvature.abs() < 1e-10, "{c:?}");
        assert!(c.curvature > 0.1);
    }

    // Straight lines on the plane have no curvature at all.
    let strip = explicit(["t", "0", "0"], ["0", "0", "1"]);
    let patch = evaluate_patch(&strip, &DomainGrid::centered(1.0, 5).unwrap(), 1e-10).unwrap();
    let diagonal = |s: f64| DomainPoint {
        w: C::new(s, 0.5 * s),
        dw: C::new(1.0, 0.5),
        ddw: C::new(0.0, 0.0),
    };
    for c in curve_on_surface_geometry(&patch, &diagonal, -1.0, 1.0, 5).unwrap() {
        assert_eq!((c.curvature, c.geodesic_curvature, c.normal_curvature), (0.0, 0.0, 0.0));
        assert!(c.theta.is_none());
    }
}

#[test]
fn singular_nodes_are_flagged() {
    // The strip normal has poles at ±i, but the Enneper Gauss map does not.
    let strip = planar("t^2", "t^3/3 - t");
    let grid = DomainGrid::centered(1.0, 3).unwrap();
    let patch = evaluate_patch(&strip, &grid, 1e-10).unwrap();
    assert!(patch.singular().iter().all(|s| !s));

    // f' = (2t^5, t^10 - 1, -i(t^10 + 1)) is never zero either; a curve with a
    // cusp at t = 0 gives f'(0) = 0.
    let curve = AnalyticCurve::parse("t^2", "t^3", "0").unwrap();
    let cusp = Strip::new(curve, [AnalyticExpr::zero(), AnalyticExpr::zero(), AnalyticExpr::one()]);
    let patch = evaluate_patch(&cusp, &grid, 1e-10).unwrap();
    assert!(patch.singular()[grid.index(1, 1)]);
    assert_eq!(patch.normal()[grid.index(1, 1)], Vec3::zeros());
    assert!(!patch.singular()[grid.index(2, 1)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn path_independence(re in -0.9f64..0.9, im in -0.9f64..0.9, which in 0usize..3) {
        let strip = match which {
            0 => planar("cos(t)", "sin(t)"),
            1 => planar("t^2/2", "t"),
            _ => planar("cos(t)", "2*sin(t)"),
        };
        let quad_tol = 1e-10;
        let map = IsotropicMap::new(strip, C::new(0.0, 0.0), quad_tol);
        let w = C::new(re, im);
        let a = map.eval(w).unwrap();
        let b = map.eval_straight(w).unwrap();
        prop_assert!(crate::quadrature::cnorm(&(a.f - b.f)) <= 10.0 * quad_tol);
        prop_assert!(crate::quadrature::cnorm(&(a.fprime - b.fprime)) <= 10.0 * quad_tol);
    }

    #[test]
    fn unit_gauss_map(re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let map = IsotropicMap::new(planar("cos(t)", "sin(t)"), C::new(0.0, 0.0), 1e-10);
        let v = map.eval(C::new(re, im)).unwrap();
        let n = gauss_normal(&v.fprime).unwrap();
        prop_assert!((n.norm() - 1.0).abs() < 1e-14);
    }
}
