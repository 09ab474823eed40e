//! Global curves of solutions to the two-parameter Dirichlet problem
//!
//! ```text
//! u'' + λ f(u) − μ g(x) = 0,   −1 < x < 1,   u(±1) = 0
//! ```
//!
//! with polynomial `f` and even, outward non-decreasing polynomial `g`.
//! Positive solutions are even, so the problem is shot from `x = 0` with
//! `u(0) = α`, `u'(0) = 0`, and `α` serves as the continuation parameter for
//! both `λ`-curves (fixed `μ`) and `μ`-curves (fixed `λ`).

pub mod cli;
pub mod curve;
pub mod error;
pub mod ivp;
pub mod logistic;
pub mod model;
pub mod shoot;
pub mod verify;

pub use curve::{
    detect_turning_points, find_positivity_loss, trace_lambda_curve, trace_mu_curve,
    ContinuationConfig, Curve, CurveEvent, CurveKind, EventKind,
};
pub use error::{CurveError, IvpError, LogisticError, SolveError};
pub use ivp::{integrate, SensitivityMode, Trajectory};
pub use model::{validate_problem, Polynomial, ProblemSpec, ValidationReport};
pub use shoot::{solve_lambda, solve_mu, FreeParam, NewtonConfig, SolvePoint};
