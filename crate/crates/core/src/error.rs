use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IvpError {
    #[error("problem has not passed validation")]
    NotValidated,
    #[error("state became non-finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("at least {min} integration steps are required, got {got}")]
    TooFewSteps { got: usize, min: usize },
}

/// Failure of a single Newton shooting solve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("Newton did not converge after {iters} iterations (last {param} = {last}, |u(1)| = {residual:e})")]
    NoConvergence {
        param: &'static str,
        last: f64,
        residual: f64,
        iters: usize,
    },
    #[error("d u(1)/d{param} = {derivative:e} vanished at {param} = {at}; likely a turning point in {param}")]
    DerivativeVanished {
        param: &'static str,
        at: f64,
        derivative: f64,
    },
    #[error("shooting parameter must satisfy alpha > 0, got {0}")]
    BadAlpha(f64),
    #[error(transparent)]
    Ivp(#[from] IvpError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("first point at alpha = {alpha} did not converge: {source}")]
    InitialSolveFailed { alpha: f64, source: SolveError },
    #[error("bracket [{a}, {b}] does not straddle u'(1) = 0 (u'(1) = {up_a:e}, {up_b:e})")]
    BadBracket { a: f64, b: f64, up_a: f64, up_b: f64 },
    #[error("invalid continuation settings: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogisticError {
    #[error("alpha = {0} is outside (0, 3/4)")]
    DomainError(f64),
    #[error("panel count must be positive")]
    NoPanels,
}
