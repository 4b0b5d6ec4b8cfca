//! Schwarz's solution of the Björling problem,
//! `f(w) = c(w) - i ∫_{w0}^{w} n(z) × c'(z) dz`, on rectangular grids.
//!
//! `f` is integrated along axis-aligned paths: from `w0` along the row
//! `Im w = Im w0`, then vertically. Each column only depends on its seed on
//! that base row, so columns can be evaluated independently and in any order.

mod geometry;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{cnorm, SegmentQuadrature};
use crate::strip::{Strip, StripBranches};
use crate::{CVec3, Vec3};

pub use geometry::{
    curve_on_surface_geometry, laplacian_convergence, minimality_report, CurveSample, DomainPoint,
    GeometryReport, LaplacianConvergence,
};

/// `⟨f', f̄'⟩` below this marks a branch point of the Gauss map.
pub const SINGULAR_EPSILON: f64 = 1e-16;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGrid {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    pub base: Complex64,
}

impl DomainGrid {
    pub fn new(u_range: (f64, f64), v_range: (f64, f64), nu: usize, nv: usize) -> Result<Self> {
        Self::with_base(u_range, v_range, nu, nv, Complex64::new(0.0, 0.0))
    }

    pub fn with_base(
        u_range: (f64, f64),
        v_range: (f64, f64),
        nu: usize,
        nv: usize,
        base: Complex64,
    ) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if !ok(u_range) || !ok(v_range) {
            return Err(Error::InvalidInput("grid ranges must be finite with min < max".into()));
        }
        if nu < 2 || nv < 2 {
            return Err(Error::InvalidInput("grid needs at least 2x2 nodes".into()));
        }
        if !base.re.is_finite() || !base.im.is_finite() {
            return Err(Error::InvalidInput("base point must be finite".into()));
        }
        Ok(DomainGrid {
            u_range,
            v_range,
            nu,
            nv,
            base,
        })
    }

    /// Square grid `[-h, h]²` with `n × n` nodes.
    pub fn centered(h: f64, n: usize) -> Result<Self> {
        Self::new((-h, h), (-h, h), n, n)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u(&self, i: usize) -> f64 {
        lerp(self.u_range, i, self.nu)
    }

    pub fn v(&self, j: usize) -> f64 {
        lerp(self.v_range, j, self.nv)
    }

    pub fn du(&self) -> f64 {
        (self.u_range.1 - self.u_range.0) / (self.nu - 1) as f64
    }

    pub fn dv(&self) -> f64 {
        (self.v_range.1 - self.v_range.0) / (self.nv - 1) as f64
    }

    /// Row-major index, `u` fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.u(i), self.v(j))
    }

    pub fn diameter(&self) -> f64 {
        libm::hypot(self.u_range.1 - self.u_range.0, self.v_range.1 - self.v_range.0)
    }

    pub fn contains(&self, w: Complex64) -> bool {
        let slack = 1e-12 * self.diameter();
        w.re >= self.u_range.0 - slack
            && w.re <= self.u_range.1 + slack
            && w.im >= self.v_range.0 - slack
            && w.im <= self.v_range.1 + slack
    }

    /// Node at `w`, if there is one.
    pub fn locate(&self, w: Complex64) -> Option<usize> {
        let fi = (w.re - self.u_range.0) / self.du();
        let fj = (w.im - self.v_range.0) / self.dv();
        let (i, j) = (libm::round(fi), libm::round(fj));
        if i < 0.0 || j < 0.0 || i >= self.nu as f64 || j >= self.nv as f64 {
            return None;
        }
        let (i, j) = (i as usize, j as usize);
        let close = (self.u(i) - w.re).abs() <= 1e-9 * self.du() && (self.v(j) - w.im).abs() <= 1e-9 * self.dv();
        close.then(|| self.index(i, j))
    }

    /// Same rectangle with every cell halved.
    pub fn refined(&self) -> Self {
        DomainGrid {
            nu: 2 * self.nu - 1,
            nv: 2 * self.nv - 1,
            ..*self
        }
    }

    /// Symmetric about both coordinate axes (`u_min = -u_max`, `v_min = -v_max`).
    pub fn is_symmetric(&self) -> bool {
        let tol = 1e-12 * self.diameter();
        (self.u_range.0 + self.u_range.1).abs() <= tol && (self.v_range.0 + self.v_range.1).abs() <= tol
    }

    /// Largest `r` with the closed disc `|w| ≤ r` inside the rectangle.
    pub fn inscribed_radius(&self) -> Option<f64> {
        let r = (-self.u_range.0)
            .min(self.u_range.1)
            .min(-self.v_range.0)
            .min(self.v_range.1);
        (r > 0.0).then_some(r)
    }
}

fn lerp((a, b): (f64, f64), k: usize, n: usize) -> f64 {
    if k + 1 == n {
        b
    } else {
        a + (b - a) * (k as f64 / (n - 1) as f64)
    }
}

/// `f` and `f'` at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapValue {
    pub w: Complex64,
    pub f: CVec3,
    pub fprime: CVec3,
}

/// Integral state at a base-row point, from which a grid column is swept.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSeed {
    pub w: Complex64,
    integral: CVec3,
    branches: StripBranches,
}

/// The isotropic curve of a strip, evaluable anywhere reachable from the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicMap {
    strip: Strip,
    quad: SegmentQuadrature,
    base: Complex64,
    /// `1` for the surface itself, `-i` for its adjoint.
    factor: Complex64,
}

struct Cursor {
    at: Complex64,
    integral: CVec3,
    branches: StripBranches,
}

impl IsotropicMap {
    pub fn new(strip: Strip, base: Complex64, quad_tol: f64) -> Self {
        IsotropicMap {
            strip,
            quad: SegmentQuadrature::new(quad_tol),
            base,
            factor: Complex64::new(1.0, 0.0),
        }
    }

    pub fn strip(&self) -> &Strip {
        &self.strip
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad.tol
    }

    pub fn factor(&self) -> Complex64 {
        self.factor
    }

    /// The map `-i f`, whose real part is the adjoint surface.
    pub fn adjoint(&self) -> Self {
        IsotropicMap {
            factor: self.factor * -I,
            ..self.clone()
        }
    }

    /// Cursor at the base point. Branches are fixed on the real axis first,
    /// where the principal root is the geometric one, then continued to `w0`.
    fn start(&self) -> Result<Cursor> {
        let mut branches = StripBranches::new();
        if self.strip.needs_tracking() {
            let from = Complex64::new(self.base.re, 0.0);
            let steps = libm::ceil(self.base.im.abs() / 0.05) as usize;
            for k in 0..=steps {
                let w = from + (self.base - from) * (k as f64 / steps.max(1) as f64);
                self.strip
                    .eval_frame(w, &mut branches)
                    .map_err(|s| Error::eval_at(w, s))?;
            }
        }
        Ok(Cursor {
            at: self.base,
            integral: CVec3::zeros(),
            branches,
        })
    }

    fn advance(&self, cur: &mut Cursor, to: Complex64) -> Result<()> {
        let strip = &self.strip;
        let mut g = |z: Complex64, br: &mut StripBranches| strip.integrand(z, br).map_err(|s| Error::eval_at(z, s));
        cur.integral += self.quad.integrate(cur.at, to, &mut cur.branches, &mut g)?;
        cur.at = to;
        Ok(())
    }

    fn value(&self, cur: &mut Cursor) -> Result<MapValue> {
        let w = cur.at;
        let fr = self
            .strip
            .eval_frame(w, &mut cur.branches)
            .map_err(|s| Error::eval_at(w, s))?;
        let f = (fr.c - cur.integral * I) * self.factor;
        let fprime = (fr.dc - fr.g * I) * self.factor;
        Ok(MapValue { w, f, fprime })
    }

    /// `f(w)` along the horizontal-then-vertical path.
    pub fn eval(&self, w: Complex64) -> Result<MapValue> {
        let mut cur = self.start()?;
        self.advance(&mut cur, Complex64::new(w.re, self.base.im))?;
        self.value(&mut cur)?;
        self.advance(&mut cur, w)?;
        self.value(&mut cur)
    }

    /// `f(w)` along the straight segment from the base point.
    pub fn eval_straight(&self, w: Complex64) -> Result<MapValue> {
        let mut cur = self.start()?;
        self.advance(&mut cur, w)?;
        self.value(&mut cur)
    }

    /// `f(w)` and `f''(w) = c'' - i (n × c')'`.
    pub fn eval_with_second(&self, w: Complex64) -> Result<(MapValue, CVec3)> {
        let mut cur = self.start()?;
        self.advance(&mut cur, Complex64::new(w.re, self.base.im))?;
        self.value(&mut cur)?;
        self.advance(&mut cur, w)?;
        let v = self.value(&mut cur)?;
        let (ddc, dg) = self
            .strip
            .eval_second(w, &mut cur.branches)
            .map_err(|s| Error::eval_at(w, s))?;
        let second = (ddc - dg * I) * self.factor;
        Ok((v, second))
    }

    /// Values along a polyline: straight from the base point to `points[0]`,
    /// then segment by segment, reusing the running integral.
    pub fn eval_path(&self, points: &[Complex64]) -> Result<Vec<MapValue>> {
        let mut cur = self.start()?;
        let mut out = Vec::with_capacity(points.len());
        for &p in points {
            self.advance(&mut cur, p)?;
            out.push(self.value(&mut cur)?);
        }
        Ok(out)
    }

    /// Values at `center + r·direction` for increasing radii.
    pub fn eval_ray(&self, center: Complex64, direction: Complex64, radii: &[f64]) -> Result<Vec<MapValue>> {
        let mut pts = Vec::with_capacity(radii.len() + 1);
        pts.push(center);
        pts.extend(radii.iter().map(|r| center + direction * *r));
        let mut v = self.eval_path(&pts)?;
        v.remove(0);
        Ok(v)
    }

    /// Sweeps the base row `Im w = Im w0` outwards from `w0` in both directions.
    pub fn column_seeds(&self, grid: &DomainGrid) -> Result<Vec<ColumnSeed>> {
        let start = self.start()?;
        let row = self.base.im;
        let split = (0..grid.nu).find(|&i| grid.u(i) >= self.base.re).unwrap_or(grid.nu);
        let mut seeds: Vec<Option<ColumnSeed>> = (0..grid.nu).map(|_| None).collect();
        let mut sweep = |order: &mut dyn Iterator<Item = usize>| -> Result<()> {
            let mut cur = Cursor {
                at: start.at,
                integral: start.integral,
                branches: start.branches.clone(),
            };
            for i in order {
                self.advance(&mut cur, Complex64::new(grid.u(i), row))?;
                self.value(&mut cur)?;
                seeds[i] = Some(ColumnSeed {
                    w: cur.at,
                    integral: cur.integral,
                    branches: cur.branches.clone(),
                });
            }
            Ok(())
        };
        sweep(&mut (split..grid.nu))?;
        sweep(&mut (0..split).rev())?;
        Ok(seeds.into_iter().map(|s| s.expect("every column seeded")).collect())
    }

    /// Column `i` of the grid, `j = 0..nv`.
    pub fn eval_column(&self, grid: &DomainGrid, seed: &ColumnSeed) -> Result<Vec<MapValue>> {
        let u = seed.w.re;
        let row = seed.w.im;
        let mut out: Vec<Option<MapValue>> = alloc::vec![None; grid.nv];
        let split = (0..grid.nv).find(|&j| grid.v(j) >= row).unwrap_or(grid.nv);
        let mut sweep = |order: &mut dyn Iterator<Item = usize>| -> Result<()> {
            let mut cur = Cursor {
                at: seed.w,
                integral: seed.integral,
                branches: seed.branches.clone(),
            };
            for j in order {
                self.advance(&mut cur, Complex64::new(u, grid.v(j)))?;
                out[j] = Some(self.value(&mut cur)?);
            }
            Ok(())
        };
        sweep(&mut (split..grid.nv))?;
        sweep(&mut (0..split).rev())?;
        Ok(out.into_iter().map(|v| v.expect("every node evaluated")).collect())
    }
}

/// Grid samples of an isotropic curve and the surfaces it defines.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    grid: DomainGrid,
    map: IsotropicMap,
    f: Vec<CVec3>,
    fprime: Vec<CVec3>,
    x: Vec<Vec3>,
    xstar: Vec<Vec3>,
    normal: Vec<Vec3>,
    singular: Vec<bool>,
}

/// Gauss map from `f'`: `X_u = Re f'`, `X_v = -Im f'`. `None` at branch points.
pub fn gauss_normal(fprime: &CVec3) -> Option<Vec3> {
    if fprime.iter().map(|z| z.norm_sqr()).sum::<f64>() < SINGULAR_EPSILON {
        return None;
    }
    let xu = fprime.map(|z| z.re);
    let xv = fprime.map(|z| -z.im);
    let c = xu.cross(&xv);
    let len = c.norm();
    (len > 0.0).then(|| c / len)
}

impl SurfacePatch {
    /// Assembles a patch from per-column values (`columns[i][j]`).
    pub fn from_columns(grid: DomainGrid, map: IsotropicMap, columns: Vec<Vec<MapValue>>) -> Result<Self> {
        if columns.len() != grid.nu || columns.iter().any(|c| c.len() != grid.nv) {
            return Err(Error::InvalidInput("column data does not match the grid".into()));
        }
        let n = grid.len();
        let mut f = alloc::vec![CVec3::zeros(); n];
        let mut fprime = alloc::vec![CVec3::zeros(); n];
        for (i, col) in columns.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                let k = grid.index(i, j);
                f[k] = v.f;
                fprime[k] = v.fprime;
            }
        }
        Ok(Self::from_values(grid, map, f, fprime))
    }

    fn from_values(grid: DomainGrid, map: IsotropicMap, f: Vec<CVec3>, fprime: Vec<CVec3>) -> Self {
        let x = f.iter().map(|v| v.map(|z| z.re)).collect();
        let xstar = f.iter().map(|v| v.map(|z| z.im)).collect();
        let gauss: Vec<Option<Vec3>> = fprime.iter().map(gauss_normal).collect();
        let singular = gauss.iter().map(Option::is_none).collect();
        let normal = gauss.into_iter().map(|n| n.unwrap_or_else(Vec3::zeros)).collect();
        SurfacePatch {
            grid,
            map,
            f,
            fprime,
            x,
            xstar,
            normal,
            singular,
        }
    }

    pub fn grid(&self) -> &DomainGrid {
        &self.grid
    }

    pub fn map(&self) -> &IsotropicMap {
        &self.map
    }

    pub fn f(&self) -> &[CVec3] {
        &self.f
    }

    pub fn fprime(&self) -> &[CVec3] {
        &self.fprime
    }

    pub fn x(&self) -> &[Vec3] {
        &self.x
    }

    pub fn xstar(&self) -> &[Vec3] {
        &self.xstar
    }

    pub fn normal(&self) -> &[Vec3] {
        &self.normal
    }

    pub fn singular(&self) -> &[bool] {
        &self.singular
    }

    pub fn x_u(&self, k: usize) -> Vec3 {
        self.fprime[k].map(|z| z.re)
    }

    pub fn x_v(&self, k: usize) -> Vec3 {
        self.fprime[k].map(|z| -z.im)
    }

    /// `max ‖f'‖` over the grid (Hermitian norm).
    pub fn max_fprime(&self) -> f64 {
        self.fprime.iter().map(cnorm).fold(0.0, f64::max)
    }

    /// Residual normalisation: `max ‖f'‖ · diameter of the domain`.
    pub fn scale(&self) -> f64 {
        let s = self.max_fprime() * self.grid.diameter();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

pub fn evaluate_patch(strip: &Strip, grid: &DomainGrid, quad_tol: f64) -> Result<SurfacePatch> {
    let map = IsotropicMap::new(strip.clone(), grid.base, quad_tol);
    evaluate_map(&map, grid)
}

/// Sequential evaluation of a map on a grid, column by column.
pub fn evaluate_map(map: &IsotropicMap, grid: &DomainGrid) -> Result<SurfacePatch> {
    let seeds = map.column_seeds(grid)?;
    let columns = seeds
        .iter()
        .map(|s| map.eval_column(grid, s))
        .collect::<Result<Vec<_>>>()?;
    SurfacePatch::from_columns(*grid, map.clone(), columns)
}

/// The patch of `-i f`: real part `X*`, and applying it twice negates `X`.
pub fn adjoint_patch(patch: &SurfacePatch) -> SurfacePatch {
    let rot = -I;
    let f = patch.f.iter().map(|v| v * rot).collect();
    let fprime = patch.fprime.iter().map(|v| v * rot).collect();
    SurfacePatch::from_values(patch.grid, patch.map.adjoint(), f, fprime)
}

#[cfg(test)]
mod tests;
