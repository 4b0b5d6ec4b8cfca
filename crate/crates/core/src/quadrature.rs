//! Gauss–Legendre quadrature along straight segments in the complex plane.
//!
//! The integrator threads a caller-owned state (branch trackers) through the
//! nodes in path order, so multivalued integrands are continued consistently.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CVec3;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel rule on the real interval `[a, b]`.
    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive composite quadrature of `ℂ³`-valued integrands on segments.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentQuadrature {
    rule: GaussLegendre,
    pub tol: f64,
    pub max_levels: u32,
    /// Segments are first cut into pieces no longer than this.
    pub max_piece: f64,
}

impl SegmentQuadrature {
    pub const MAX_LEVELS: u32 = 16;

    pub fn new(tol: f64) -> Self {
        SegmentQuadrature {
            rule: GaussLegendre::new(16),
            tol,
            max_levels: Self::MAX_LEVELS,
            max_piece: 0.25,
        }
    }

    /// `∫_a^b g(z) dz` along the straight segment.
    ///
    /// `state` must describe the integrand's branch at `a`; on return it has
    /// been continued to the last node before `b`.
    pub fn integrate<S, G>(&self, a: Complex64, b: Complex64, state: &mut S, g: &mut G) -> Result<CVec3>
    where
        S: Clone,
        G: FnMut(Complex64, &mut S) -> Result<CVec3>,
    {
        let len = (b - a).norm();
        if len == 0.0 {
            return Ok(CVec3::zeros());
        }
        let pieces = libm::ceil(len / self.max_piece).max(1.0) as usize;
        let mut total = CVec3::zeros();
        for k in 0..pieces {
            let pa = a + (b - a) * (k as f64 / pieces as f64);
            let pb = if k + 1 == pieces {
                b
            } else {
                a + (b - a) * ((k + 1) as f64 / pieces as f64)
            };
            let mut probe = state.clone();
            let whole = self.panel(pa, pb, &mut probe, g)?;
            total += self.refine(pa, pb, whole, state, g, 0)?;
        }
        Ok(total)
    }

    fn panel<S, G>(&self, a: Complex64, b: Complex64, state: &mut S, g: &mut G) -> Result<CVec3>
    where
        G: FnMut(Complex64, &mut S) -> Result<CVec3>,
    {
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut acc = CVec3::zeros();
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            acc += g(mid + half * *x, state)? * Complex64::new(*w, 0.0);
        }
        Ok(acc * half)
    }

    fn refine<S, G>(
        &self,
        a: Complex64,
        b: Complex64,
        whole: CVec3,
        state: &mut S,
        g: &mut G,
        level: u32,
    ) -> Result<CVec3>
    where
        S: Clone,
        G: FnMut(Complex64, &mut S) -> Result<CVec3>,
    {
        let m = (a + b) * 0.5;
        let mut after_left = state.clone();
        let left = self.panel(a, m, &mut after_left, g)?;
        let mut after_right = after_left.clone();
        let right = self.panel(m, b, &mut after_right, g)?;
        let sum = left + right;
        if cnorm(&(whole - sum)) < self.tol * (1.0 + cnorm(&sum)) {
            *state = after_right;
            return Ok(sum);
        }
        if level + 1 >= self.max_levels {
            return Err(Error::QuadratureDiverged {
                a_re: a.re,
                a_im: a.im,
                b_re: b.re,
                b_im: b.im,
                levels: self.max_levels,
            });
        }
        let l = self.refine(a, m, left, state, g, level + 1)?;
        let r = self.refine(m, b, right, state, g, level + 1)?;
        Ok(l + r)
    }
}

/// Hermitian norm on `ℂ³`.
pub fn cnorm(v: &CVec3) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let r = GaussLegendre::new(2);
        let x = 1.0 / libm::sqrt(3.0);
        assert!((r.nodes()[0] + x).abs() < 1e-15 && (r.nodes()[1] - x).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sixteen_points_are_exact_to_degree_31() {
        let r = GaussLegendre::new(16);
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        let wsum: f64 = r.weights().iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        for k in 0..32u32 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = r.integrate_real(-1.0, 1.0, |x| libm::pow(x, k as f64));
            assert!((got - exact).abs() < 1e-14, "degree {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn complex_segment_of_entire_function() {
        // ∫_0^{1+2i} (cos z, e^z, z^2) dz = (sin w, e^w - 1, w^3/3)
        let q = SegmentQuadrature::new(1e-12);
        let w = Complex64::new(1.0, 2.0);
        let mut g = |z: Complex64, _: &mut ()| Ok(CVec3::new(z.cos(), z.exp(), z * z));
        let v = q.integrate(Complex64::new(0.0, 0.0), w, &mut (), &mut g).unwrap();
        let exact = CVec3::new(w.sin(), w.exp() - 1.0, w * w * w / 3.0);
        assert!(cnorm(&(v - exact)) < 1e-13);
    }

    #[test]
    fn state_follows_the_path() {
        // Count evaluations and check they arrive in path order.
        let q = SegmentQuadrature::new(1e-12);
        let mut g = |z: Complex64, last: &mut f64| {
            assert!(z.re >= *last - 0.2);
            *last = z.re;
            Ok(CVec3::new(z, z, z))
        };
        let mut last = 0.0;
        q.integrate(Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), &mut last, &mut g)
            .unwrap();
        assert!(last > 1.9 && last < 2.0);
    }

    #[test]
    fn divergence_is_reported() {
        let mut q = SegmentQuadrature::new(1e-14);
        q.max_levels = 3;
        // Near-singular integrand that three levels cannot resolve.
        let mut g = |z: Complex64, _: &mut ()| {
            let d = z - Complex64::new(0.5, 1e-4);
            Ok(CVec3::new(d.inv(), d.inv(), d.inv()))
        };
        let err = q
            .integrate(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), &mut (), &mut g)
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureDiverged { levels: 3, .. }));
    }
}
