//! Real-analytic expressions in one variable `t`, evaluated at complex arguments.
//!
//! Every literal is real, so an expression without `sqrt` is the holomorphic
//! extension of a real function and commutes with conjugation. `sqrt` is the
//! only multivalued node; its branch is continued along a path by a
//! [`BranchTracker`] owned by the caller.

mod diff;
mod parse;
pub mod poly;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{EvalError, ParseError};

pub use parse::parse_expr;

/// Denominators smaller than this are treated as zero.
pub const DIVISION_EPSILON: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Add(AnalyticExpr, AnalyticExpr),
    Sub(AnalyticExpr, AnalyticExpr),
    Mul(AnalyticExpr, AnalyticExpr),
    Div(AnalyticExpr, AnalyticExpr),
    Pow(AnalyticExpr, u32),
    Neg(AnalyticExpr),
    Call(Func, AnalyticExpr),
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone, PartialEq)]
pub struct AnalyticExpr(Arc<Node>);

impl fmt::Debug for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl AnalyticExpr {
    /// Wraps a node without any folding.
    pub fn from_node(node: Node) -> Self {
        AnalyticExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn var() -> Self {
        Self::from_node(Node::Var)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parse_expr(source)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(value)
    }

    /// Number of `sqrt` nodes, counted in evaluation order.
    pub fn sqrt_count(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var => 0,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.sqrt_count() + b.sqrt_count()
            }
            Node::Pow(a, _) | Node::Neg(a) => a.sqrt_count(),
            Node::Call(f, a) => a.sqrt_count() + usize::from(*f == Func::Sqrt),
        }
    }

    pub fn contains_sqrt(&self) -> bool {
        self.sqrt_count() > 0
    }

    /// Integer power with folding of the trivial exponents.
    pub fn powi(&self, n: u32) -> Self {
        match (n, self.node()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Node::Const(c)) => Self::constant(libm::pow(*c, n as f64)),
            _ => Self::from_node(Node::Pow(self.clone(), n)),
        }
    }

    pub fn call(func: Func, arg: Self) -> Self {
        if let Some(c) = arg.as_const() {
            let folded = match func {
                Func::Sin => Some(libm::sin(c)),
                Func::Cos => Some(libm::cos(c)),
                Func::Sinh => Some(libm::sinh(c)),
                Func::Cosh => Some(libm::cosh(c)),
                Func::Exp => Some(libm::exp(c)),
                Func::Sqrt if c > 0.0 => Some(libm::sqrt(c)),
                Func::Sqrt => None,
            };
            if let Some(v) = folded {
                return Self::constant(v);
            }
        }
        Self::from_node(Node::Call(func, arg))
    }

    pub fn sin(&self) -> Self {
        Self::call(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Self {
        Self::call(Func::Cos, self.clone())
    }
    pub fn sinh(&self) -> Self {
        Self::call(Func::Sinh, self.clone())
    }
    pub fn cosh(&self) -> Self {
        Self::call(Func::Cosh, self.clone())
    }
    pub fn exp(&self) -> Self {
        Self::call(Func::Exp, self.clone())
    }
    pub fn sqrt(&self) -> Self {
        Self::call(Func::Sqrt, self.clone())
    }

    /// Exact symbolic derivative with respect to `t`. Only constant folding is applied.
    pub fn differentiate(&self) -> Self {
        diff::differentiate(self)
    }

    /// Value of the holomorphic extension at `w`.
    ///
    /// A tracker is mandatory when the expression contains `sqrt`; each `sqrt`
    /// node picks the root nearest to its previous value in the tracker.
    pub fn eval(
        &self,
        w: Complex64,
        branch: Option<&mut BranchTracker>,
    ) -> Result<Complex64, EvalError> {
        let mut ctx = EvalCtx {
            w,
            branch,
            next_sqrt: 0,
        };
        ctx.eval(self)
    }

    /// Evaluation on the real axis, taking the principal root at every `sqrt`.
    pub fn eval_real(&self, t: f64) -> Result<f64, EvalError> {
        let mut tracker = BranchTracker::new();
        Ok(self.eval(Complex64::new(t, 0.0), Some(&mut tracker))?.re)
    }

    /// Substitutes `inner` for the variable.
    pub fn compose(&self, inner: &AnalyticExpr) -> AnalyticExpr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var => inner.clone(),
            Node::Add(a, b) => a.compose(inner) + b.compose(inner),
            Node::Sub(a, b) => a.compose(inner) - b.compose(inner),
            Node::Mul(a, b) => a.compose(inner) * b.compose(inner),
            Node::Div(a, b) => a.compose(inner) / b.compose(inner),
            Node::Pow(a, n) => a.compose(inner).powi(*n),
            Node::Neg(a) => -a.compose(inner),
            Node::Call(f, a) => AnalyticExpr::call(*f, a.compose(inner)),
        }
    }
}

/// Continues `sqrt` branches along a path.
///
/// Holds one slot per `sqrt` node of the expression it is used with (nodes are
/// numbered in evaluation order). A slot is initialised with the principal
/// root on first use.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTracker {
    last: Vec<Option<Complex64>>,
    epsilon_branch: f64,
}

impl Default for BranchTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl BranchTracker {
    pub const DEFAULT_EPSILON: f64 = 1e-12;

    pub fn new() -> Self {
        Self::with_epsilon(Self::DEFAULT_EPSILON)
    }

    pub fn with_epsilon(epsilon_branch: f64) -> Self {
        BranchTracker {
            last: Vec::new(),
            epsilon_branch,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon_branch
    }

    pub fn last_value(&self, slot: usize) -> Option<Complex64> {
        self.last.get(slot).copied().flatten()
    }

    pub fn reset(&mut self) {
        self.last.clear();
    }

    fn continue_root(&mut self, slot: usize, radicand: Complex64) -> Result<Complex64, EvalError> {
        let magnitude = radicand.norm();
        if magnitude < self.epsilon_branch {
            return Err(EvalError::BranchPoint { magnitude });
        }
        if self.last.len() <= slot {
            self.last.resize(slot + 1, None);
        }
        let principal = radicand.sqrt();
        let root = match self.last[slot] {
            Some(prev) if (-principal - prev).norm() < (principal - prev).norm() => -principal,
            _ => principal,
        };
        self.last[slot] = Some(root);
        Ok(root)
    }
}

struct EvalCtx<'a> {
    w: Complex64,
    branch: Option<&'a mut BranchTracker>,
    next_sqrt: usize,
}

impl EvalCtx<'_> {
    fn eval(&mut self, e: &AnalyticExpr) -> Result<Complex64, EvalError> {
        Ok(match e.node() {
            Node::Const(c) => Complex64::new(*c, 0.0),
            Node::Var => self.w,
            Node::Add(a, b) => self.eval(a)? + self.eval(b)?,
            Node::Sub(a, b) => self.eval(a)? - self.eval(b)?,
            Node::Mul(a, b) => self.eval(a)? * self.eval(b)?,
            Node::Div(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                let magnitude = den.norm();
                if magnitude < DIVISION_EPSILON {
                    return Err(EvalError::DivisionByZero { magnitude });
                }
                num / den
            }
            Node::Pow(a, n) => self.eval(a)?.powu(*n),
            Node::Neg(a) => -self.eval(a)?,
            Node::Call(f, a) => {
                let slot = if *f == Func::Sqrt {
                    let s = self.next_sqrt;
                    self.next_sqrt += 1;
                    Some(s)
                } else {
                    None
                };
                let z = self.eval(a)?;
                match f {
                    Func::Sin => z.sin(),
                    Func::Cos => z.cos(),
                    Func::Sinh => z.sinh(),
                    Func::Cosh => z.cosh(),
                    Func::Exp => z.exp(),
                    Func::Sqrt => {
                        let tracker = self
                            .branch
                            .as_deref_mut()
                            .ok_or(EvalError::BranchTrackerRequired)?;
                        tracker.continue_root(slot.unwrap_or(0), z)?
                    }
                }
            }
        })
    }
}

// Arithmetic builders with constant folding.

impl Add for AnalyticExpr {
    type Output = AnalyticExpr;
    fn add(self, rhs: Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            _ => Self::from_node(Node::Add(self, rhs)),
        }
    }
}

impl Sub for AnalyticExpr {
    type Output = AnalyticExpr;
    fn sub(self, rhs: Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            (Some(0.0), _) => -rhs,
            (_, Some(0.0)) => self,
            _ => Self::from_node(Node::Sub(self, rhs)),
        }
    }
}

impl Mul for AnalyticExpr {
    type Output = AnalyticExpr;
    fn mul(self, rhs: Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(0.0), _) => Self::zero(),
            (_, Some(0.0)) => Self::zero(),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            (Some(-1.0), _) => -rhs,
            (_, Some(-1.0)) => -self,
            _ => Self::from_node(Node::Mul(self, rhs)),
        }
    }
}

impl Div for AnalyticExpr {
    type Output = AnalyticExpr;
    fn div(self, rhs: Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Self::constant(a / b),
            (Some(0.0), _) => Self::zero(),
            (_, Some(1.0)) => self,
            _ => Self::from_node(Node::Div(self, rhs)),
        }
    }
}

impl Neg for AnalyticExpr {
    type Output = AnalyticExpr;
    fn neg(self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::from_node(Node::Neg(self)),
        }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for AnalyticExpr {
            type Output = AnalyticExpr;
            fn $m(self, rhs: f64) -> AnalyticExpr { $tr::$m(self, AnalyticExpr::constant(rhs)) }
        }
        impl $tr<AnalyticExpr> for f64 {
            type Output = AnalyticExpr;
            fn $m(self, rhs: AnalyticExpr) -> AnalyticExpr { $tr::$m(AnalyticExpr::constant(self), rhs) }
        }
        impl $tr<&AnalyticExpr> for &AnalyticExpr {
            type Output = AnalyticExpr;
            fn $m(self, rhs: &AnalyticExpr) -> AnalyticExpr { $tr::$m(self.clone(), rhs.clone()) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

// Printing. The output re-parses under the grammar to a tree with identical values.

const PREC_SUM: u8 = 1;
const PREC_TERM: u8 = 2;
const PREC_FACTOR: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => PREC_SUM,
        Node::Mul(..) | Node::Div(..) => PREC_TERM,
        Node::Pow(..) => PREC_FACTOR,
        Node::Const(_) | Node::Var | Node::Neg(_) | Node::Call(..) => PREC_ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &AnalyticExpr, min: u8) -> fmt::Result {
    if precedence(e.node()) < min {
        f.write_str("(")?;
        write_at(f, e, PREC_SUM)?;
        return f.write_str(")");
    }
    match e.node() {
        Node::Const(c) => {
            if c.is_sign_negative() {
                write!(f, "-{:?}", -c)
            } else {
                write!(f, "{:?}", c)
            }
        }
        Node::Var => f.write_str("t"),
        Node::Add(a, b) => {
            write_at(f, a, PREC_SUM)?;
            f.write_str(" + ")?;
            write_at(f, b, PREC_TERM)
        }
        Node::Sub(a, b) => {
            write_at(f, a, PREC_SUM)?;
            f.write_str(" - ")?;
            write_at(f, b, PREC_TERM)
        }
        Node::Mul(a, b) => {
            write_at(f, a, PREC_TERM)?;
            f.write_str("*")?;
            write_at(f, b, PREC_FACTOR)
        }
        Node::Div(a, b) => {
            write_at(f, a, PREC_TERM)?;
            f.write_str("/")?;
            write_at(f, b, PREC_FACTOR)
        }
        Node::Pow(a, n) => {
            write_at(f, a, PREC_ATOM)?;
            write!(f, "^{}", n)
        }
        Node::Neg(a) => {
            f.write_str("-")?;
            write_at(f, a, PREC_ATOM)
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_at(f, a, PREC_SUM)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, PREC_SUM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use num_complex::Complex64 as C;

    fn p(s: &str) -> AnalyticExpr {
        parse_expr(s).unwrap()
    }

    /// cosh(1) by direct summation of its Taylor series, which converges fast at 1.
    fn cosh_one_by_series() -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            term /= ((2 * k - 1) * (2 * k)) as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn cos_at_i_is_cosh_one() {
        let v = p("cos(t)").eval(C::new(0.0, 1.0), None).unwrap();
        let expected = cosh_one_by_series();
        assert!((expected - 1.543_080_634_815_243_7).abs() < 1e-15);
        assert!((v.re - expected).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn square_of_one_plus_i() {
        let v = p("t^2").eval(C::new(1.0, 1.0), None).unwrap();
        assert!((v - C::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn sqrt_continued_over_upper_half_plane() {
        let e = p("sqrt(t)");
        let mut tracker = BranchTracker::new();
        let mut last = C::new(0.0, 0.0);
        for k in 0..=200 {
            let theta = core::f64::consts::PI * k as f64 / 200.0;
            last = e.eval(C::from_polar(1.0, theta), Some(&mut tracker)).unwrap();
        }
        assert!((last - C::new(0.0, 1.0)).norm() < 1e-12);

        // Through the lower half plane the same endpoint lands on the other sheet.
        let mut tracker = BranchTracker::new();
        for k in 0..=200 {
            let theta = -core::f64::consts::PI * k as f64 / 200.0;
            last = e.eval(C::from_polar(1.0, theta), Some(&mut tracker)).unwrap();
        }
        assert!((last - C::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn sqrt_continues_past_the_principal_cut() {
        // Going once around the origin flips the sign of the root.
        let e = p("sqrt(t)");
        let mut tracker = BranchTracker::new();
        let mut last = C::new(0.0, 0.0);
        for k in 0..=400 {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / 400.0;
            last = e.eval(C::from_polar(4.0, theta), Some(&mut tracker)).unwrap();
        }
        assert!((last - C::new(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn sqrt_requires_tracker_and_rejects_branch_point() {
        let e = p("sqrt(1 + t^2)");
        assert_eq!(
            e.eval(C::new(0.5, 0.0), None),
            Err(EvalError::BranchTrackerRequired)
        );
        let mut tracker = BranchTracker::new();
        let err = e.eval(C::new(0.0, 1.0), Some(&mut tracker)).unwrap_err();
        assert!(matches!(err, EvalError::BranchPoint { .. }));
    }

    #[test]
    fn division_by_zero_is_reported() {
        let err = p("1/t").eval(C::new(0.0, 0.0), None).unwrap_err();
        assert!(matches!(err, EvalError::DivisionByZero { .. }));
    }

    #[test]
    fn real_axis_has_zero_imaginary_part() {
        let e = p("sinh(t)*cos(t)^3 - exp(t)/(2 + t^2)");
        for k in 0..50 {
            let t = -2.0 + 4.0 * k as f64 / 49.0;
            let v = e.eval(C::new(t, 0.0), None).unwrap();
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn conjugation_symmetry_without_sqrt() {
        let e = p("cosh(t)*sin(t) + t^3/3 - exp(-t)");
        let w = C::new(0.7, -1.3);
        let a = e.eval(w.conj(), None).unwrap();
        let b = e.eval(w, None).unwrap().conj();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn printing_is_parseable() {
        for s in ["t^3/3 - t", "-t^2", "-(t^2)", "2 - (3 - t)", "sqrt(1 + t^2)/(t*(t + 1))", "pi*e"] {
            let a = p(s);
            let b = p(&a.to_string());
            for k in 0..20 {
                let w = C::new(-1.0 + 0.1 * k as f64, 0.3);
                let mut ta = BranchTracker::new();
                let mut tb = BranchTracker::new();
                let va = a.eval(w, Some(&mut ta)).unwrap();
                let vb = b.eval(w, Some(&mut tb)).unwrap();
                assert!((va - vb).norm() <= 1e-15 * (1.0 + va.norm()), "{s}");
            }
        }
    }

    #[test]
    fn folding_keeps_derivative_small() {
        assert_eq!(AnalyticExpr::var() * 1.0, AnalyticExpr::var());
        assert!((AnalyticExpr::var() * 0.0).is_const(0.0));
        assert!((2.0 * AnalyticExpr::constant(3.0)).is_const(6.0));
        assert_eq!(-(-AnalyticExpr::var()), AnalyticExpr::var());
    }

    #[test]
    fn compose_substitutes_variable() {
        let e = p("t^2 + sin(t)");
        let g = e.compose(&(AnalyticExpr::var() * 2.0));
        let v = g.eval_real(0.4).unwrap();
        assert!((v - (0.64 + libm::sin(0.8))).abs() < 1e-15);
        assert_eq!(p("cos(t)").sqrt_count(), 0);
        assert_eq!(p("sqrt(sqrt(t)) + sqrt(t)").sqrt_count(), 3);
        assert_eq!(p("cos(t)").to_string(), "cos(t)");
    }
}
