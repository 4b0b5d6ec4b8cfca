use alloc::string::String;

/// Errors raised while parsing an expression. Offsets are byte offsets into the source.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at offset {offset} is not a non-negative integer literal")]
    BadExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::BadExponent { offset } => *offset,
        }
    }
}

/// Errors raised while evaluating an expression at a complex point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero (|denominator| = {magnitude:e})")]
    DivisionByZero { magnitude: f64 },
    #[error("sqrt radicand {magnitude:e} is within the branch tolerance of zero")]
    BranchPoint { magnitude: f64 },
    #[error("expression contains sqrt; a branch tracker is required")]
    BranchTrackerRequired,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed at {at_re}{at_im:+}i: {source}")]
    Eval {
        at_re: f64,
        at_im: f64,
        #[source]
        source: EvalError,
    },
    #[error("{0}")]
    InvalidInput(String),
    #[error("curve component is not real-valued on the real axis (|Im| = {imag:e} at t = {t})")]
    NotRealValued { t: f64, imag: f64 },
    #[error("curve is not regular: |c'(t)| <= 1e-10 on a non-isolated set near t = {t}")]
    Irregular { t: f64 },
    #[error("curve does not lie in the XY-plane (|z| = {residual:e})")]
    NotPlanar { residual: f64 },
    #[error("in-plane normal orientation cannot be fixed: all derivatives vanish at the vertex")]
    DegenerateOrientation,
    #[error("branch point of |c'|^2 on the real interval near t = {t}")]
    BranchPointOnInterval { t: f64 },
    #[error("not perpendicular symmetric: residual {residual:e} exceeds tolerance {tol:e}")]
    NotPerpendicularSymmetric { residual: f64, tol: f64 },
    #[error("quadrature did not converge on [{a_re}{a_im:+}i, {b_re}{b_im:+}i] after {levels} levels")]
    QuadratureDiverged {
        a_re: f64,
        a_im: f64,
        b_re: f64,
        b_im: f64,
        levels: u32,
    },
    #[error("grid is not symmetric about both axes of C")]
    GridNotSymmetric,
    #[error("grid does not contain the required sample set: {0}")]
    GridCoverage(String),
    #[error("CPG curve is not planar: |y| residual {residual:e} exceeds tolerance {tol:e}")]
    CpgNotPlanar { residual: f64, tol: f64 },
    #[error("degenerate point set: registration covariance has rank < 2")]
    DegeneratePointSet,
    #[error("search budget exhausted without a finite-residual evaluation")]
    SearchExhausted,
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
}

impl Error {
    /// Failures of the numerics (quadrature, branch tracking, evaluation) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eval { .. }
                | Error::QuadratureDiverged { .. }
                | Error::BranchPointOnInterval { .. }
                | Error::DegeneratePointSet
                | Error::SearchExhausted
        )
    }

    pub(crate) fn eval_at(w: num_complex::Complex64, source: EvalError) -> Self {
        Error::Eval {
            at_re: w.re,
            at_im: w.im,
            source,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
