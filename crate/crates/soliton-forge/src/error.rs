use crate::algebra::Symbol;

/// Errors shared across the pipeline. The CLI maps these onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("balance equation has no positive integer solution")]
    NonIntegerBalance,
    #[error("reduced ODE has no nonlinear term to balance against")]
    NoNonlinearTerm,
    #[error("reduced ODE has no pure derivative term")]
    NoDerivativeTerm,
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("degenerate wave direction: 2n + m = 0")]
    DegenerateDirection,
    #[error("degenerate amplitude: B - C - 1 = 0 makes a2 vanish")]
    DegenerateAmplitude,
    #[error("Lambda = B^2 - 4C = 0 is not covered by the closed forms")]
    LambdaZero,
    #[error("no solution found after {seeds} seeds")]
    NoSolutionFound { seeds: u32 },
    #[error("solution case does not match the sign of Lambda")]
    CaseMismatch,
    #[error("phi denominator vanishes at xi = {xi}")]
    PhiSingularity { xi: f64 },
    #[error("integration path from {from} to {to} crosses a singularity")]
    SingularPath { from: f64, to: f64 },
    #[error("symbol `{0}` is unbound")]
    UnboundSymbol(Symbol),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl From<Symbol> for Error {
    fn from(sym: Symbol) -> Self {
        Error::UnboundSymbol(sym)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
