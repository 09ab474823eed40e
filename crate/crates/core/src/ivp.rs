//! Shooting initial value problem on the half interval `[0, 1]`:
//!
//! ```text
//! u'' + λ f(u) − μ g(x) = 0,   u(0) = α,  u'(0) = 0
//! ```
//!
//! optionally augmented with one variational equation, the derivative of
//! `u` with respect to `λ` or to `μ` at fixed `α`. Both start from zero data
//! because `u(0) = α` does not move with the parameter.

use crate::error::IvpError;
use crate::model::ProblemSpec;
use serde::{Deserialize, Serialize};

pub const DEFAULT_STEPS: usize = 2048;
pub const MIN_STEPS: usize = 16;

/// Which parameter sensitivity to carry along with the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensitivityMode {
    None,
    /// `w = ∂u/∂λ`: `w'' + λ f'(u) w + f(u) = 0`.
    Lambda,
    /// `w = ∂u/∂μ`: `w'' + λ f'(u) w − g(x) = 0`.
    Mu,
}

/// Sampled solution of one integration, one sample per RK step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: SensitivityMode,
    pub xs: Vec<f64>,
    pub u: Vec<f64>,
    pub up: Vec<f64>,
    /// Sensitivity samples; empty when `mode` is `None`.
    pub s: Vec<f64>,
    pub sp: Vec<f64>,
    pub u1: f64,
    pub up1: f64,
    /// Sensitivity at `x = 1`; zero when `mode` is `None`.
    pub s1: f64,
    pub min_u: f64,
}

impl Trajectory {
    pub fn alpha(&self) -> f64 {
        self.u[0]
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Profile on the whole interval `[−1, 1]` by even reflection of `u`
    /// (odd reflection of `u'`). Returns `(x, u, u')` triples in ascending `x`.
    pub fn reflected_profile(&self) -> Vec<(f64, f64, f64)> {
        let n = self.xs.len();
        let mut out = Vec::with_capacity(2 * n - 1);
        for i in (1..n).rev() {
            out.push((-self.xs[i], self.u[i], -self.up[i]));
        }
        for i in 0..n {
            out.push((self.xs[i], self.u[i], self.up[i]));
        }
        out
    }
}

#[inline]
fn rhs(
    spec: &ProblemSpec,
    lambda: f64,
    mu: f64,
    mode: SensitivityMode,
    x: f64,
    y: &[f64; 4],
) -> [f64; 4] {
    let g = spec.g.eval(x);
    match mode {
        SensitivityMode::None => [y[1], -lambda * spec.f.eval(y[0]) + mu * g, 0.0, 0.0],
        SensitivityMode::Lambda => {
            let (fu, dfu) = spec.f.eval_with_derivative(y[0]);
            [
                y[1],
                -lambda * fu + mu * g,
                y[3],
                -lambda * dfu * y[2] - fu,
            ]
        }
        SensitivityMode::Mu => {
            let (fu, dfu) = spec.f.eval_with_derivative(y[0]);
            [y[1], -lambda * fu + mu * g, y[3], -lambda * dfu * y[2] + g]
        }
    }
}

#[inline]
fn axpy(y: &[f64; 4], h: f64, k: &[f64; 4]) -> [f64; 4] {
    [
        y[0] + h * k[0],
        y[1] + h * k[1],
        y[2] + h * k[2],
        y[3] + h * k[3],
    ]
}

/// Classical fixed-step RK4 over `[0, 1]` with `steps` uniform steps.
///
/// Solution and sensitivity share every stage, so `s1` is the exact
/// derivative of the discrete map `param ↦ u1`.
pub fn integrate(
    spec: &ProblemSpec,
    alpha: f64,
    lambda: f64,
    mu: f64,
    mode: SensitivityMode,
    steps: usize,
) -> Result<Trajectory, IvpError> {
    if !spec.is_validated() {
        return Err(IvpError::NotValidated);
    }
    if steps < MIN_STEPS {
        return Err(IvpError::TooFewSteps {
            got: steps,
            min: MIN_STEPS,
        });
    }
    let h = 1.0 / steps as f64;
    let with_sens = mode != SensitivityMode::None;
    let cap = steps + 1;

    let mut xs = Vec::with_capacity(cap);
    let mut u = Vec::with_capacity(cap);
    let mut up = Vec::with_capacity(cap);
    let (mut s, mut sp) = if with_sens {
        (Vec::with_capacity(cap), Vec::with_capacity(cap))
    } else {
        (Vec::new(), Vec::new())
    };

    let mut y = [alpha, 0.0, 0.0, 0.0];
    let mut min_u = alpha;
    let mut record = |x: f64, y: &[f64; 4]| {
        xs.push(x);
        u.push(y[0]);
        up.push(y[1]);
        if with_sens {
            s.push(y[2]);
            sp.push(y[3]);
        }
    };
    record(0.0, &y);

    for i in 0..steps {
        let x = i as f64 * h;
        let k1 = rhs(spec, lambda, mu, mode, x, &y);
        let k2 = rhs(spec, lambda, mu, mode, x + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(spec, lambda, mu, mode, x + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(spec, lambda, mu, mode, x + h, &axpy(&y, h, &k3));
        for j in 0..4 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        // x recomputed from the index so the last sample lands exactly on 1
        let x_next = (i + 1) as f64 / steps as f64;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(IvpError::NonFinite { x: x_next });
        }
        min_u = min_u.min(y[0]);
        record(x_next, &y);
    }

    Ok(Trajectory {
        mode,
        xs,
        u,
        up,
        s,
        sp,
        u1: y[0],
        up1: y[1],
        s1: y[2],
        min_u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(f: &[f64], g: &[f64]) -> ProblemSpec {
        ProblemSpec::validated(f.to_vec(), g.to_vec()).unwrap()
    }

    #[test]
    fn cosine_profile() {
        let sp = spec(&[0.0, 1.0], &[1.0]);
        let t = integrate(&sp, 1.0, PI * PI / 4.0, 0.0, SensitivityMode::None, 2048).unwrap();
        assert!(t.u1.abs() < 1e-8, "u1 = {}", t.u1);
        assert!((t.up1 + PI / 2.0).abs() < 1e-6);
        assert_eq!(t.xs[0], 0.0);
        assert_eq!(*t.xs.last().unwrap(), 1.0);
        assert!(t.xs.windows(2).all(|w| w[1] > w[0]));
        assert_eq!((t.u[0], t.up[0]), (1.0, 0.0));
        assert!(t.s.is_empty());
    }

    #[test]
    fn constant_forcing_is_exact_parabola() {
        let sp = spec(&[], &[1.0]);
        let t = integrate(&sp, 1.0, 3.0, 2.0, SensitivityMode::None, 64).unwrap();
        assert!((t.u1 - 2.0).abs() < 1e-13);
        assert_eq!(t.min_u, 1.0);
    }

    #[test]
    fn lambda_sensitivity_of_cosine() {
        let sp = spec(&[0.0, 1.0], &[1.0]);
        let t = integrate(&sp, 1.0, PI * PI / 4.0, 0.0, SensitivityMode::Lambda, 2048).unwrap();
        assert!((t.s1 + 1.0 / PI).abs() < 1e-6, "s1 = {}", t.s1);
        assert_eq!((t.s[0], t.sp[0]), (0.0, 0.0));
    }

    #[test]
    fn mu_sensitivity_without_nonlinearity() {
        // u = α + μ x²/2 ⇒ ∂u(1)/∂μ = 1/2
        let sp = spec(&[], &[1.0]);
        let t = integrate(&sp, 0.7, 1.0, -1.4, SensitivityMode::Mu, 32).unwrap();
        assert!((t.s1 - 0.5).abs() < 1e-14);
        assert!(t.u1.abs() < 1e-14);
    }

    #[test]
    fn rejects_unvalidated_and_short_grids() {
        let raw = ProblemSpec::new(vec![0.0, 1.0], vec![1.0]);
        assert_eq!(
            integrate(&raw, 1.0, 1.0, 0.0, SensitivityMode::None, 64),
            Err(IvpError::NotValidated)
        );
        let sp = spec(&[0.0, 1.0], &[1.0]);
        assert!(matches!(
            integrate(&sp, 1.0, 1.0, 0.0, SensitivityMode::None, 8),
            Err(IvpError::TooFewSteps { .. })
        ));
    }

    #[test]
    fn blow_up_is_reported() {
        // u'' = λ u³ blows up in finite time for large data
        let sp = spec(&[0.0, 0.0, 0.0, -1.0], &[1.0]);
        let r = integrate(&sp, 50.0, 100.0, 0.0, SensitivityMode::Lambda, 64);
        assert!(matches!(r, Err(IvpError::NonFinite { .. })), "{r:?}");
    }

    #[test]
    fn reflection_is_even() {
        let sp = spec(&[0.0, 1.0, -1.0], &[1.0, 0.0, 0.5]);
        let t = integrate(&sp, 0.5, 5.0, 0.3, SensitivityMode::None, 32).unwrap();
        let prof = t.reflected_profile();
        assert_eq!(prof.len(), 65);
        for i in 0..prof.len() {
            let (x, u, up) = prof[i];
            let (xm, um, upm) = prof[prof.len() - 1 - i];
            assert_eq!(x, -xm);
            assert_eq!(u, um);
            assert_eq!(up, -upm);
        }
    }
}
