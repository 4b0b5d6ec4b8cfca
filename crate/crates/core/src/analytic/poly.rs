//! Polynomial view of expressions, used to take exact square roots of
//! Pythagorean-hodograph speeds `x'^2 + y'^2 = q(t)^2`.

use alloc::vec;
use alloc::vec::Vec;

use super::{AnalyticExpr, Node};

/// Dense real polynomial, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    fn trimmed(mut self) -> Self {
        while self.0.len() > 1 && *self.0.last().unwrap() == 0.0 {
            self.0.pop();
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![0.0; n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        Polynomial(out).trimmed()
    }

    pub fn scale(&self, k: f64) -> Self {
        Polynomial(self.0.iter().map(|c| c * k).collect()).trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial(out).trimmed()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Interprets `e` as a polynomial in `t`, if it is one syntactically.
    pub fn from_expr(e: &AnalyticExpr) -> Option<Self> {
        Some(match e.node() {
            Node::Const(c) => Polynomial(vec![*c]),
            Node::Var => Polynomial(vec![0.0, 1.0]),
            Node::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?),
            Node::Sub(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?.scale(-1.0)),
            Node::Mul(a, b) => Self::from_expr(a)?.mul(&Self::from_expr(b)?),
            Node::Div(a, b) => {
                let d = b.as_const().filter(|d| *d != 0.0)?;
                Self::from_expr(a)?.scale(1.0 / d)
            }
            Node::Pow(a, n) => {
                let base = Self::from_expr(a)?;
                let mut acc = Polynomial(vec![1.0]);
                for _ in 0..*n {
                    acc = acc.mul(&base);
                }
                acc
            }
            Node::Neg(a) => Self::from_expr(a)?.scale(-1.0),
            Node::Call(..) => return None,
        })
    }

    /// Sum of `c_k t^k` terms.
    pub fn to_expr(&self) -> AnalyticExpr {
        let t = AnalyticExpr::var();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .fold(AnalyticExpr::zero(), |acc, (k, c)| acc + *c * t.powi(k as u32))
    }

    /// Exact square root `q` with `q^2 = self`, if one exists to relative
    /// precision `rel_tol`. The sign is chosen so that `q(reference) > 0`.
    pub fn sqrt(&self, reference: f64, rel_tol: f64) -> Option<Self> {
        let deg = self.degree();
        if !deg.is_multiple_of(2) {
            return None;
        }
        let lead = self.0[deg];
        if lead <= 0.0 {
            return None;
        }
        let half = deg / 2;
        let mut q = vec![0.0; half + 1];
        q[half] = libm::sqrt(lead);
        // Match coefficients of t^(half + k) from the top down.
        for k in (0..half).rev() {
            let mut acc = 0.0;
            for i in (k + 1)..=half {
                let j = half + k - i;
                if j > k && j <= half {
                    acc += q[i] * q[j];
                }
            }
            q[k] = (self.0[half + k] - acc) / (2.0 * q[half]);
        }
        let q = Polynomial(q);
        let residual = q.mul(&q).add(&self.scale(-1.0));
        let size = self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if residual.0.iter().any(|c| c.abs() > rel_tol * size) {
            return None;
        }
        if q.eval(reference) < 0.0 {
            Some(q.scale(-1.0))
        } else {
            Some(q)
        }
    }
}
