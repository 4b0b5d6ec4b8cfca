//! Bounded Nelder–Mead with dimension-adaptive coefficients.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evaluations: usize,
    /// Stop as soon as a value at or below this is seen.
    pub target: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evaluations: 1000,
            target: f64::NEG_INFINITY,
            x_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// `(evaluation number, best value so far)` at every improvement.
    pub trace: Vec<(usize, f64)>,
}

struct Counter<'a, F> {
    f: F,
    bounds: &'a [(f64, f64)],
    opts: NelderMeadOptions,
    evaluations: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Counter<'_, F> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.opts.max_evaluations || self.best <= self.opts.target
    }

    fn eval(&mut self, x: &mut [f64]) -> f64 {
        for (xi, (lo, hi)) in x.iter_mut().zip(self.bounds) {
            *xi = xi.clamp(*lo, *hi);
        }
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.evaluations += 1;
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
            self.trace.push((self.evaluations, v));
        }
        v
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimises `f` inside the box `bounds`, starting from the simplex
/// `x0, x0 + step_i e_i`. Trial points are clamped to the box; NaN counts as +∞.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: &[f64],
    bounds: &[(f64, f64)],
    opts: NelderMeadOptions,
) -> Minimum {
    let n = x0.len();
    assert!(step.len() == n && bounds.len() == n, "dimension mismatch");
    let mut c = Counter {
        f,
        bounds,
        opts,
        evaluations: 0,
        best: f64::INFINITY,
        best_x: x0.to_vec(),
        trace: Vec::new(),
    };
    let nf = n.max(1) as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    let v = c.eval(&mut start);
    simplex.push((start, v));
    for i in 0..n {
        if c.exhausted() {
            break;
        }
        let mut p = simplex[0].0.clone();
        let (lo, hi) = bounds[i];
        p[i] = if p[i] + step[i] <= hi || p[i] - step[i] < lo { p[i] + step[i] } else { p[i] - step[i] };
        let v = c.eval(&mut p);
        simplex.push((p, v));
    }

    while simplex.len() == n + 1 && n > 0 && !c.exhausted() {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.x_tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (ci, xi) in centroid.iter_mut().zip(x) {
                *ci += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let (f_best, f_second) = (simplex[0].1, simplex[n - 1].1);

        let mut xr = affine(&centroid, &worst.0, -alpha);
        let fr = c.eval(&mut xr);
        if fr < f_best {
            if c.exhausted() {
                simplex[n] = (xr, fr);
                break;
            }
            let mut xe = affine(&centroid, &worst.0, -alpha * beta);
            let fe = c.eval(&mut xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        if c.exhausted() {
            break;
        }
        let (mut xc, outside) = if fr < worst.1 {
            (affine(&centroid, &worst.0, -alpha * gamma), true)
        } else {
            (affine(&centroid, &worst.0, gamma), false)
        };
        let fc = c.eval(&mut xc);
        if (outside && fc <= fr) || (!outside && fc < worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if c.exhausted() {
                break;
            }
            let mut p = affine(&best, &vertex.0, delta);
            let v = c.eval(&mut p);
            *vertex = (p, v);
        }
    }

    Minimum {
        x: c.best_x,
        value: c.best,
        evaluations: c.evaluations,
        trace: c.trace,
    }
}
