use super::{AnalyticExpr, Func, Node};

pub(super) fn differentiate(e: &AnalyticExpr) -> AnalyticExpr {
    match e.node() {
        Node::Const(_) => AnalyticExpr::zero(),
        Node::Var => AnalyticExpr::one(),
        Node::Add(a, b) => differentiate(a) + differentiate(b),
        Node::Sub(a, b) => differentiate(a) - differentiate(b),
        Node::Mul(a, b) => differentiate(a) * b.clone() + a.clone() * differentiate(b),
        Node::Div(a, b) => {
            if b.as_const().is_some() {
                differentiate(a) / b.clone()
            } else {
                (differentiate(a) * b.clone() - a.clone() * differentiate(b)) / b.powi(2)
            }
        }
        Node::Pow(a, n) => (*n as f64) * a.powi(n - 1) * differentiate(a),
        Node::Neg(a) => -differentiate(a),
        Node::Call(f, a) => {
            let da = differentiate(a);
            let outer = match f {
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
                Func::Sinh => a.cosh(),
                Func::Cosh => a.sinh(),
                Func::Exp => a.exp(),
                Func::Sqrt => return da / (2.0 * a.sqrt()),
            };
            outer * da
        }
    }
}
