use num_complex::Complex64;
use thiserror::Error;

use crate::scalar::ScalarRepr;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Evidence that a non-simple anchor cannot start a solution: with
/// `g(0) = root` the equation at the minimal-size element `element` reads
/// `0·g(element) + value = 0`, and `value ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub root: ScalarRepr,
    pub element: String,
    pub value: ScalarRepr,
    pub value_approx: Complex64,
}

/// Roots of the initial polynomial, mode-independent summary.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSummary {
    pub roots: Vec<(Complex64, usize)>,
    pub degree: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation bound is negative or selects no elements")]
    EmptyTruncation,
    #[error("invalid semigroup backend: {0}")]
    InvalidBackend(String),
    #[error("element {0} lies outside the enumerated window")]
    NotEnumerated(String),
    #[error("window contains no non-zero element")]
    OnlyZero,
    #[error("functions live on different windows")]
    BackendMismatch,
    #[error("function is not invertible: value at 0 vanishes")]
    NotInvertible,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("initial polynomial is a non-zero constant, so no solution exists")]
    DegenerateConstant,
    #[error("initial polynomial vanishes identically; an explicit anchor would be required")]
    ZeroPolynomial,
    #[error("anchor {0} is not a simple zero of the initial polynomial")]
    NotASimpleRoot(String),
    #[error("initial polynomial has no simple zeros{}", obstruction_note(.obstructions))]
    NoSimpleRoots {
        roots: RootSummary,
        obstructions: Vec<Obstruction>,
    },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("Jacobian at the base point is singular or ill-conditioned")]
    SingularJacobian,
    #[error("base point does not satisfy the system: residual {0}")]
    InconsistentBasePoint(String),
    #[error("system exceeds limits: {0}")]
    LimitExceeded(String),

    #[error("derivative of the initial polynomial vanishes at the anchor")]
    ZeroDerivative,
    #[error("all coefficient norms vanish")]
    AllCoefficientsZero,
    #[error("R(t) is not positive anywhere on the search grid; no certificate available")]
    NoPositiveR,
    #[error("certificate violated at size level {level} ({detail})")]
    CertificateViolated { level: usize, detail: String },
    #[error("evaluation point lies outside the certified half-plane (need Re s >= {r})")]
    OutOfHalfPlane { r: f64 },
    #[error("tail bound unavailable: {0}")]
    TailUnavailable(String),
}

fn obstruction_note(obs: &[Obstruction]) -> String {
    match obs.first() {
        Some(o) => format!(
            "; with g(0) = {} the equation at {} reads {} = 0, so no solution exists",
            fmt_repr(&o.root),
            o.element,
            fmt_repr(&o.value)
        ),
        None => String::new(),
    }
}

pub(crate) fn fmt_repr(r: &ScalarRepr) -> String {
    let zero = |s: &str| s == "0" || s == "0.0" || s == "-0.0";
    if zero(&r.im) {
        r.re.clone()
    } else {
        format!("{} + {}i", r.re, r.im)
    }
}
