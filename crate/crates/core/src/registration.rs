//! Least-squares alignment of matched point sets (orthogonal Procrustes).


use nalgebra::{Matrix3, SVD};

use crate::error::{Error, Result};
use crate::Vec3;

/// A fitted map `p ↦ scale · rotation · p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Registration {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
    pub scale: f64,
    /// Root-mean-square distance after alignment.
    pub rms: f64,
    pub max_deviation: f64,
}

impl Registration {
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p * self.scale + self.translation
    }

    /// `‖RᵀR − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.rotation.transpose() * self.rotation - Matrix3::identity()).abs().max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistrationOptions {
    pub allow_scale: bool,
    /// Allow `det R = -1`.
    pub allow_reflection: bool,
}

impl Default for RegistrationOptions {
    fn default() -> Self {
        RegistrationOptions {
            allow_scale: false,
            allow_reflection: true,
        }
    }
}

const RANK_TOLERANCE: f64 = 1e-12;

fn centroid(points: &[Vec3]) -> Vec3 {
    points.iter().fold(Vec3::zeros(), |a, p| a + p) / points.len() as f64
}

/// Finds the map sending `source[k]` closest to `target[k]` in the least-squares sense.
pub fn register(source: &[Vec3], target: &[Vec3], opts: RegistrationOptions) -> Result<Registration> {
    if source.len() != target.len() || source.is_empty() {
        return Err(Error::InvalidInput("point sets must be non-empty and of equal size".into()));
    }
    let (ca, cb) = (centroid(source), centroid(target));
    let mut h = Matrix3::zeros();
    let mut spread = 0.0;
    for (a, b) in source.iter().zip(target) {
        let (a, b) = (a - ca, b - cb);
        h += b * a.transpose();
        spread += a.norm_squared();
    }
    let svd = SVD::new(h, true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let s = svd.singular_values;
    let sv = singular_values(source);
    let source_rank = sv.iter().filter(|v| **v > RANK_TOLERANCE * sv[0]).count();
    if source_rank < 2 || s.max() <= RANK_TOLERANCE * spread.max(f64::MIN_POSITIVE) {
        return Err(Error::DegeneratePointSet);
    }

    // Singular values come unsorted from nalgebra; flip the axis of the smallest one.
    let smallest = (0..3).min_by(|&i, &j| s[i].total_cmp(&s[j])).expect("three values");
    let mut d = Vec3::new(1.0, 1.0, 1.0);
    if !opts.allow_reflection && (u * vt).determinant() < 0.0 {
        d[smallest] = -1.0;
    }
    let rotation = u * Matrix3::from_diagonal(&d) * vt;
    let scale = if opts.allow_scale {
        (0..3).map(|i| s[i] * d[i]).sum::<f64>() / spread
    } else {
        1.0
    };
    let translation = cb - rotation * ca * scale;

    let mut sq = 0.0;
    let mut worst: f64 = 0.0;
    for (a, b) in source.iter().zip(target) {
        let e = (rotation * a * scale + translation - b).norm();
        sq += e * e;
        worst = worst.max(e);
    }
    Ok(Registration {
        rotation,
        translation,
        scale,
        rms: libm::sqrt(sq / source.len() as f64),
        max_deviation: worst,
    })
}

/// Singular values of the centred samples, descending. Uses an SVD of the
/// sample matrix rather than covariance eigenvalues, which would square the
/// condition number.
pub fn singular_values(points: &[Vec3]) -> [f64; 3] {
    match centred_svd(points) {
        Some((s, _)) => s,
        None => [0.0; 3],
    }
}

fn centred_svd(points: &[Vec3]) -> Option<([f64; 3], Matrix3<f64>)> {
    if points.len() < 3 {
        return None;
    }
    let c = centroid(points);
    let m = nalgebra::MatrixXx3::from_fn(points.len(), |i, j| points[i][j] - c[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = order.map(|i| svd.singular_values[i]);
    let rows = Matrix3::from_rows(&order.map(|i| vt.row(i).into_owned()));
    Some((s, rows))
}

/// Smallest over largest singular value of the centred samples; zero for planar sets.
pub fn planarity_residual(points: &[Vec3]) -> f64 {
    let s = singular_values(points);
    if s[0] == 0.0 {
        0.0
    } else {
        s[2] / s[0]
    }
}

/// Second over largest singular value; zero for collinear sets.
pub fn collinearity_residual(points: &[Vec3]) -> f64 {
    let s = singular_values(points);
    if s[0] == 0.0 {
        0.0
    } else {
        s[1] / s[0]
    }
}

/// Unit normal of the best-fit plane.
pub fn plane_normal(points: &[Vec3]) -> Option<Vec3> {
    let (_, rows) = centred_svd(points)?;
    Some(rows.row(2).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn cloud() -> Vec<Vec3> {
        (0..30)
            .map(|k| {
                let t = k as f64 * 0.37;
                Vec3::new(libm::cos(t) * 2.0, libm::sin(1.3 * t), 0.1 * t * t - 1.0)
            })
            .collect()
    }

    fn rotation(axis: Vec3, angle: f64) -> Matrix3<f64> {
        *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
    }

    #[test]
    fn recovers_a_rigid_motion() {
        let q = rotation(Vec3::new(1.0, 2.0, -0.5), 0.9);
        let b = Vec3::new(0.3, -4.0, 2.0);
        let src = cloud();
        let dst: Vec<Vec3> = src.iter().map(|p| q * p + b).collect();
        let r = register(&src, &dst, RegistrationOptions::default()).unwrap();
        assert!((r.rotation - q).abs().max() < 1e-12);
        assert!((r.translation - b).norm() < 1e-12);
        assert!(r.rms < 1e-12 && r.scale == 1.0);
    }

    #[test]
    fn recovers_scale_and_reflection() {
        let m = Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0)) * rotation(Vec3::z(), 0.4);
        let src = cloud();
        let dst: Vec<Vec3> = src.iter().map(|p| m * p * 2.5).collect();
        let opts = RegistrationOptions {
            allow_scale: true,
            allow_reflection: true,
        };
        let r = register(&src, &dst, opts).unwrap();
        assert!((r.scale - 2.5).abs() < 1e-12);
        assert!((r.rotation - m).abs().max() < 1e-12);

        let proper = register(&src, &dst, RegistrationOptions { allow_reflection: false, ..opts }).unwrap();
        assert!(proper.rotation.determinant() > 0.0);
        assert!(proper.rms > 0.1);
    }

    #[test]
    fn planar_sets_are_accepted_and_collinear_rejected() {
        let plane: Vec<Vec3> = cloud().iter().map(|p| Vec3::new(p.x, p.y, 0.0)).collect();
        assert!(register(&plane, &plane, RegistrationOptions::default()).is_ok());
        assert!(planarity_residual(&plane) < 1e-15);
        let line: Vec<Vec3> = (0..10).map(|k| Vec3::new(k as f64, 2.0 * k as f64, 0.0)).collect();
        assert!(matches!(
            register(&line, &line, RegistrationOptions::default()),
            Err(Error::DegeneratePointSet)
        ));
        assert!(collinearity_residual(&line) < 1e-15);
        let n = plane_normal(&plane).unwrap();
        assert!((n.z.abs() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn fitted_rotation_is_orthogonal(ax in -1.0f64..1.0, ay in -1.0f64..1.0, angle in -3.0f64..3.0, noise in 0.0f64..0.1) {
            let q = rotation(Vec3::new(ax, ay, 1.0), angle);
            let src = cloud();
            let dst: Vec<Vec3> = src.iter().enumerate()
                .map(|(k, p)| q * p + Vec3::repeat(noise * libm::sin(k as f64)))
                .collect();
            let r = register(&src, &dst, RegistrationOptions::default()).unwrap();
            prop_assert!(r.orthogonality_defect() < 1e-10);
            prop_assert!(r.rms <= noise * 2.0 + 1e-12);
        }
    }
}
