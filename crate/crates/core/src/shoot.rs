//! Newton shooting in the global parameter `α = u(0)`.
//!
//! For fixed `α`, the boundary residual `u(1)` is a smooth function of the
//! free parameter (`λ` with `μ` fixed, or `μ` with `λ` fixed). Newton's method
//! is applied to it with the derivative supplied by the terminal value of the
//! matching variational equation.

use crate::error::SolveError;
use crate::ivp::{integrate, SensitivityMode, Trajectory, DEFAULT_STEPS};
use crate::model::ProblemSpec;
use serde::{Deserialize, Serialize};

/// Band used to classify solutions as positive; see [`SolvePoint::positive`].
pub const POS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonConfig {
    pub tol_residual: f64,
    pub max_iters: usize,
    /// RK4 steps on `[0, 1]`.
    pub steps: usize,
    pub min_derivative: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            max_iters: 50,
            steps: DEFAULT_STEPS,
            min_derivative: 1e-14,
        }
    }
}

/// Which parameter the shooting solve adjusts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeParam {
    Lambda,
    Mu,
}

impl FreeParam {
    pub fn name(self) -> &'static str {
        match self {
            FreeParam::Lambda => "lambda",
            FreeParam::Mu => "mu",
        }
    }

    fn mode(self) -> SensitivityMode {
        match self {
            FreeParam::Lambda => SensitivityMode::Lambda,
            FreeParam::Mu => SensitivityMode::Mu,
        }
    }
}

/// A converged solution of the boundary value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvePoint {
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    /// `u'(1)`; strictly negative for positive solutions.
    pub up1: f64,
    pub min_u: f64,
    /// Final `|u(1)|`.
    pub residual: f64,
    pub iters: usize,
    /// `min_u > −POS_TOL` and `up1 < −POS_TOL`.
    pub positive: bool,
    pub profile: Option<Trajectory>,
}

impl SolvePoint {
    pub fn param(&self, which: FreeParam) -> f64 {
        match which {
            FreeParam::Lambda => self.lambda,
            FreeParam::Mu => self.mu,
        }
    }

    /// `|u'(1)|` inside the classification band: the solution sits on the
    /// boundary between positive and sign-changing.
    pub fn is_positivity_loss_candidate(&self) -> bool {
        self.up1.abs() <= POS_TOL
    }
}

pub fn classify_positive(min_u: f64, up1: f64) -> bool {
    min_u > -POS_TOL && up1 < -POS_TOL
}

/// Solves `u(1) = 0` for the free parameter at fixed `α`, holding the other
/// parameter at `fixed`. `keep_profile` retains the final trajectory.
pub fn solve(
    spec: &ProblemSpec,
    which: FreeParam,
    alpha: f64,
    fixed: f64,
    guess: f64,
    cfg: &NewtonConfig,
    keep_profile: bool,
) -> Result<SolvePoint, SolveError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(SolveError::BadAlpha(alpha));
    }
    let params = |p: f64| match which {
        FreeParam::Lambda => (p, fixed),
        FreeParam::Mu => (fixed, p),
    };

    let mut p = guess;
    let mut last_residual = f64::INFINITY;
    for iter in 0..=cfg.max_iters {
        let (lambda, mu) = params(p);
        let traj = integrate(spec, alpha, lambda, mu, which.mode(), cfg.steps)?;
        let residual = traj.u1.abs();
        last_residual = residual;
        if residual <= cfg.tol_residual {
            return Ok(SolvePoint {
                alpha,
                lambda,
                mu,
                up1: traj.up1,
                min_u: traj.min_u,
                residual,
                iters: iter,
                positive: classify_positive(traj.min_u, traj.up1),
                profile: keep_profile.then_some(traj),
            });
        }
        if iter == cfg.max_iters {
            break;
        }
        if traj.s1.abs() < cfg.min_derivative {
            return Err(SolveError::DerivativeVanished {
                param: which.name(),
                at: p,
                derivative: traj.s1,
            });
        }
        p -= traj.u1 / traj.s1;
    }
    Err(SolveError::NoConvergence {
        param: which.name(),
        last: p,
        residual: last_residual,
        iters: cfg.max_iters,
    })
}

/// Finds `λ` with `u(1) = 0` for fixed `α` and `μ`.
pub fn solve_lambda(
    spec: &ProblemSpec,
    alpha: f64,
    mu: f64,
    lambda_guess: f64,
    cfg: &NewtonConfig,
) -> Result<SolvePoint, SolveError> {
    solve(spec, FreeParam::Lambda, alpha, mu, lambda_guess, cfg, false)
}

/// Finds `μ` with `u(1) = 0` for fixed `α` and `λ`.
pub fn solve_mu(
    spec: &ProblemSpec,
    alpha: f64,
    lambda: f64,
    mu_guess: f64,
    cfg: &NewtonConfig,
) -> Result<SolvePoint, SolveError> {
    solve(spec, FreeParam::Mu, alpha, lambda, mu_guess, cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::IvpError;
    use std::f64::consts::PI;

    fn spec(f: &[f64], g: &[f64]) -> ProblemSpec {
        ProblemSpec::validated(f.to_vec(), g.to_vec()).unwrap()
    }

    #[test]
    fn linear_problem_gives_principal_eigenvalue() {
        let sp = spec(&[0.0, 1.0], &[1.0]);
        let pt = solve_lambda(&sp, 0.3, 0.0, 2.0, &NewtonConfig::default()).unwrap();
        assert!((pt.lambda - PI * PI / 4.0).abs() < 1e-8, "{}", pt.lambda);
        assert!(pt.positive);
        assert!(pt.residual <= 1e-10);
    }

    #[test]
    fn affine_mu_converges_in_one_step() {
        let sp = spec(&[], &[1.0]);
        let pt = solve_mu(&sp, 0.7, 3.3, 10.0, &NewtonConfig::default()).unwrap();
        assert!((pt.mu + 1.4).abs() < 1e-12);
        assert_eq!(pt.iters, 1);
    }

    #[test]
    fn profile_is_kept_on_request() {
        let sp = spec(&[0.0, 1.0, -1.0], &[1.0]);
        let pt = solve(&sp, FreeParam::Lambda, 0.5, 0.0, 4.0, &NewtonConfig::default(), true)
            .unwrap();
        let prof = pt.profile.as_ref().unwrap();
        assert_eq!(prof.alpha(), pt.alpha);
        assert_eq!(prof.u1.abs(), pt.residual);
    }

    #[test]
    fn vanishing_derivative_is_an_error() {
        // f ≡ 0: u(1) does not depend on λ at all
        let sp = spec(&[], &[1.0]);
        let r = solve_lambda(&sp, 1.0, 1.0, 1.0, &NewtonConfig::default());
        assert!(matches!(r, Err(SolveError::DerivativeVanished { param: "lambda", .. })), "{r:?}");
    }

    #[test]
    fn iteration_cap_reports_last_iterate() {
        let sp = spec(&[0.0, 1.0, -1.0], &[1.0]);
        let cfg = NewtonConfig { max_iters: 1, ..Default::default() };
        match solve_lambda(&sp, 0.5, 0.0, 30.0, &cfg) {
            Err(SolveError::NoConvergence { iters, residual, last, .. }) => {
                assert_eq!(iters, 1);
                assert!(residual > cfg.tol_residual);
                assert!(last.is_finite());
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_propagates() {
        let sp = spec(&[0.0, 0.0, 0.0, -1.0], &[1.0]);
        let r = solve_lambda(&sp, 50.0, 0.0, 100.0, &NewtonConfig::default());
        assert!(matches!(r, Err(SolveError::Ivp(IvpError::NonFinite { .. }))), "{r:?}");
    }

    #[test]
    fn alpha_must_be_positive() {
        let sp = spec(&[0.0, 1.0], &[1.0]);
        assert_eq!(
            solve_lambda(&sp, 0.0, 0.0, 2.0, &NewtonConfig::default()),
            Err(SolveError::BadAlpha(0.0))
        );
    }

    #[test]
    fn classification_band() {
        assert!(classify_positive(0.0, -1e-3));
        assert!(!classify_positive(0.0, -1e-10));
        assert!(!classify_positive(-1e-6, -1.0));
        assert!(!classify_positive(0.1, 1e-3));
    }
}
