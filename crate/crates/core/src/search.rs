//! Minimising the self-CPG residual over parity-constrained curve families.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::AnalyticExpr;
use crate::bjorling::{evaluate_patch, DomainGrid};
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::strip::{make_planar_strip, AnalyticCurve, NormalSide};
use crate::symmetry::self_cpg_test;

/// `x(t) = x_fixed + Σ θ_i x_i(t)`, `y(t) = y_fixed + Σ θ_{nx+j} y_j(t)` with
/// every `x` term even and every `y` term odd.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    x_fixed: AnalyticExpr,
    x_basis: Vec<AnalyticExpr>,
    y_fixed: AnalyticExpr,
    y_basis: Vec<AnalyticExpr>,
    bounds: Vec<(f64, f64)>,
}

const PARITY_PROBES: [f64; 5] = [0.13, 0.4, 0.77, 1.1, 1.6];

fn check_parity(e: &AnalyticExpr, odd: bool) -> Result<()> {
    let sign = if odd { -1.0 } else { 1.0 };
    for t in PARITY_PROBES {
        let (a, b) = (e.eval_real(t), e.eval_real(-t));
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(Error::InvalidInput(format!("family term `{e}` cannot be evaluated at ±{t}"))),
        };
        if (b - sign * a).abs() > 1e-12 * (1.0 + a.abs()) {
            let kind = if odd { "odd" } else { "even" };
            return Err(Error::InvalidInput(format!("family term `{e}` is not {kind}")));
        }
    }
    Ok(())
}

impl CurveFamily {
    pub fn new(
        x_fixed: AnalyticExpr,
        x_basis: Vec<AnalyticExpr>,
        y_fixed: AnalyticExpr,
        y_basis: Vec<AnalyticExpr>,
        bounds: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if bounds.len() != x_basis.len() + y_basis.len() {
            return Err(Error::InvalidInput(format!(
                "family has {} coefficients but {} bounds",
                x_basis.len() + y_basis.len(),
                bounds.len()
            )));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
            return Err(Error::InvalidInput(format!("bad coefficient bound [{lo}, {hi}]")));
        }
        for e in core::iter::once(&x_fixed).chain(&x_basis) {
            check_parity(e, false)?;
        }
        for e in core::iter::once(&y_fixed).chain(&y_basis) {
            check_parity(e, true)?;
        }
        Ok(CurveFamily {
            x_fixed,
            x_basis,
            y_fixed,
            y_basis,
            bounds,
        })
    }

    /// Monomial family `Σ a_i t^{p_i}` (even `p_i`) and `Σ b_j t^{q_j}` (odd `q_j`),
    /// every coefficient in `[-bound, bound]`.
    pub fn polynomial(x_powers: &[u32], y_powers: &[u32], bound: f64) -> Result<Self> {
        let t = AnalyticExpr::var();
        let mono = |p: &u32| t.powi(*p);
        let n = x_powers.len() + y_powers.len();
        CurveFamily::new(
            AnalyticExpr::zero(),
            x_powers.iter().map(mono).collect(),
            AnalyticExpr::zero(),
            y_powers.iter().map(mono).collect(),
            alloc::vec![(-bound, bound); n],
        )
    }

    /// The family `a t² + b t⁴`, `c t + d t³` containing the Enneper cubic at `(1, 0, -1, 1/3)`.
    pub fn enneper_quartic(bound: f64) -> Self {
        Self::polynomial(&[2, 4], &[1, 3], bound).expect("parities are right")
    }

    /// A zero-dimensional family.
    pub fn fixed(x: AnalyticExpr, y: AnalyticExpr) -> Result<Self> {
        CurveFamily::new(x, Vec::new(), y, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn instantiate(&self, theta: &[f64]) -> Result<AnalyticCurve> {
        if theta.len() != self.dim() {
            return Err(Error::InvalidInput(format!("expected {} coefficients, got {}", self.dim(), theta.len())));
        }
        let (tx, ty) = theta.split_at(self.x_basis.len());
        let combine = |fixed: &AnalyticExpr, basis: &[AnalyticExpr], coef: &[f64]| {
            basis
                .iter()
                .zip(coef)
                .fold(fixed.clone(), |acc, (b, c)| acc + *c * b.clone())
        };
        Ok(AnalyticCurve::planar(
            combine(&self.x_fixed, &self.x_basis, tx),
            combine(&self.y_fixed, &self.y_basis, ty),
        ))
    }
}

/// Self-CPG residual of the Björling surface of the instantiated curve, or +∞
/// when the curve is singular or degenerate at the vertex or evaluation fails.
pub fn objective(family: &CurveFamily, theta: &[f64], grid: &DomainGrid, quad_tol: f64) -> f64 {
    let score = || -> Result<f64> {
        let curve = family.instantiate(theta)?;
        if curve.velocity(0.0)?.norm() <= 1e-10 || curve.acceleration(0.0)?.norm() <= 1e-10 {
            return Ok(f64::INFINITY);
        }
        let strip = make_planar_strip(curve, FRAC_PI_2, NormalSide::default())?;
        let patch = evaluate_patch(&strip, grid, quad_tol)?;
        Ok(self_cpg_test(&patch, 1.0)?.residual)
    };
    match score() {
        Ok(r) if r.is_finite() => r,
        _ => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Start of restart 0; the box centre when absent.
    pub start: Option<Vec<f64>>,
    /// Initial simplex edge as a fraction of each box side.
    pub step_fraction: f64,
    pub quad_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0,
            restarts: 5,
            start: None,
            step_fraction: 0.05,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub restart: usize,
    /// Evaluation number within the restart, from 1.
    pub evaluation: usize,
    /// Best residual of the restart so far.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub start: Vec<f64>,
    pub best_theta: Vec<f64>,
    pub residual: f64,
    pub evaluations: usize,
    pub trace: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_theta: Vec<f64>,
    pub residual: f64,
    pub best_restart: usize,
    pub evaluations: usize,
    pub history: Vec<HistoryEntry>,
    pub restarts: Vec<RestartOutcome>,
}

/// A search split into independent restarts, so they can run in any order or in
/// parallel and still combine to the same result.
#[derive(Debug, Clone)]
pub struct SearchPlan {
    family: CurveFamily,
    grid: DomainGrid,
    tol: f64,
    opts: SearchOptions,
    starts: Vec<Vec<f64>>,
    budgets: Vec<usize>,
}

impl SearchPlan {
    pub fn new(family: CurveFamily, budget: usize, grid: DomainGrid, tol: f64, opts: SearchOptions) -> Result<Self> {
        if budget == 0 || opts.restarts == 0 {
            return Err(Error::InvalidInput("search needs a positive budget and at least one restart".into()));
        }
        let bounds = family.bounds().to_vec();
        let first = match &opts.start {
            Some(s) if s.len() != bounds.len() => {
                return Err(Error::InvalidInput(format!("start has {} coefficients, family {}", s.len(), bounds.len())))
            }
            Some(s) => s.iter().zip(&bounds).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect(),
            None => bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
        };
        let restarts = if family.dim() == 0 { 1 } else { opts.restarts };
        let mut starts = alloc::vec![first];
        for i in 1..restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            starts.push(bounds.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect());
        }
        let budgets = (0..restarts)
            .map(|i| budget / restarts + usize::from(i < budget % restarts))
            .collect();
        Ok(SearchPlan {
            family,
            grid,
            tol,
            opts,
            starts,
            budgets,
        })
    }

    pub fn restart_count(&self) -> usize {
        self.starts.len()
    }

    pub fn run_restart(&self, index: usize) -> RestartOutcome {
        let start = self.starts[index].clone();
        let step: Vec<f64> = self
            .family
            .bounds()
            .iter()
            .map(|(lo, hi)| self.opts.step_fraction * (hi - lo))
            .collect();
        let nm = NelderMeadOptions {
            max_evaluations: self.budgets[index],
            target: self.tol,
            x_tol: 1e-15,
        };
        let f = |theta: &[f64]| objective(&self.family, theta, &self.grid, self.opts.quad_tol);
        let m = nelder_mead(f, &start, &step, self.family.bounds(), nm);
        RestartOutcome {
            index,
            start,
            best_theta: m.x,
            residual: m.value,
            evaluations: m.evaluations,
            trace: m.trace,
        }
    }

    /// Picks the best restart by `(residual, index)`.
    pub fn finish(&self, mut outcomes: Vec<RestartOutcome>) -> Result<SearchResult> {
        outcomes.sort_by_key(|o| o.index);
        let best = outcomes
            .iter()
            .filter(|o| o.residual.is_finite())
            .min_by(|a, b| a.residual.total_cmp(&b.residual).then(a.index.cmp(&b.index)))
            .ok_or(Error::SearchExhausted)?;
        let history = outcomes
            .iter()
            .flat_map(|o| {
                o.trace.iter().map(move |(e, r)| HistoryEntry {
                    restart: o.index,
                    evaluation: *e,
                    residual: *r,
                })
            })
            .collect();
        Ok(SearchResult {
            best_theta: best.best_theta.clone(),
            residual: best.residual,
            best_restart: best.index,
            evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
            history,
            restarts: outcomes,
        })
    }
}

/// Runs the restarts of a [`SearchPlan`] one after another.
pub fn self_cpg_search(
    family: &CurveFamily,
    budget: usize,
    grid: &DomainGrid,
    tol: f64,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let plan = SearchPlan::new(family.clone(), budget, *grid, tol, opts.clone())?;
    let outcomes = (0..plan.restart_count()).map(|i| plan.run_restart(i)).collect();
    plan.finish(outcomes)
}
