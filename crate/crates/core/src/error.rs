use thiserror::Error;

use crate::picard::PicardRun;

/// Failure modes shared by every analysis in the crate.
///
/// The `Display` form of each variant starts with the variant name so the
/// command-line front end can report it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    #[error("DegenerateParameter: {0}")]
    DegenerateParameter(String),

    #[error("InsufficientData: need at least {needed} states, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("NoConvergence: {0}")]
    NoConvergence(String),

    #[error("NotMinimalPeriod: point has period {divisor}, a proper divisor of {period}")]
    NotMinimalPeriod { period: usize, divisor: usize },

    #[error("BadBracket: g({lo}) = {g_lo:e} and g({hi}) = {g_hi:e} have the same sign")]
    BadBracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("DegenerateSpacing: parameters {0} and {1} coincide")]
    DegenerateSpacing(f64, f64),

    #[error("EscapedOrbit: state {value} left [0, 1] at step {step}")]
    EscapedOrbit { step: usize, value: f64 },

    #[error("IterationBudgetExhausted: no convergence after {} iterations", .run.deltas.len())]
    IterationBudgetExhausted { run: Box<PicardRun> },
}

impl Error {
    /// The bare variant name, e.g. `"NoConvergence"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::DegenerateParameter(_) => "DegenerateParameter",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NotMinimalPeriod { .. } => "NotMinimalPeriod",
            Error::BadBracket { .. } => "BadBracket",
            Error::DegenerateSpacing(..) => "DegenerateSpacing",
            Error::EscapedOrbit { .. } => "EscapedOrbit",
            Error::IterationBudgetExhausted { .. } => "IterationBudgetExhausted",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
