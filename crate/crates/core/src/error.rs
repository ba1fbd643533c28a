use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("transport needs positive p and q, got p={p}, q={q}")]
    NonPositive { p: i64, q: i64 },
    #[error("transport needs coprime p and q, got p={p}, q={q}")]
    NotCoprime { p: i64, q: i64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error in {what}: {message} (input: {input:?})")]
pub struct ParseError {
    pub what: &'static str,
    pub input: String,
    pub message: String,
}

impl ParseError {
    pub fn new(what: &'static str, input: &str, message: impl Into<String>) -> Self {
        ParseError {
            what,
            input: input.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("beta = 0 is the tracial regime; no conformal measure is built there")]
    TracialRegime,
    #[error("no conformal measure for beta={beta}, theta={theta} (needs beta > 0 and theta >= 0)")]
    GateClosed { beta: f64, theta: f64 },
    #[error("orbit series diverges on the {side} side (drift per period {drift})")]
    DivergentSeries { side: &'static str, drift: f64 },
    #[error("periodic orbit of period {period} has S_p = {sum}, not 0")]
    PeriodicObstruction { period: usize, sum: f64 },
    #[error("cylinder window of width {width} exceeds the depth cap {cap}")]
    UnsupportedCylinder { width: usize, cap: usize },
    #[error("invalid measure parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("estimator did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("only {found} recurrences found, {required} required")]
    InsufficientRecurrences {
        found: usize,
        required: usize,
        partial: Vec<f64>,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmsError {
    #[error("state/variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("level sum could not be closed for summand {0}")]
    UncertifiedTail(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
