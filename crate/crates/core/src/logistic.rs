//! Closed-form results for the logistic harvesting model
//! `u'' + λ u (1 − u) − μ = 0` on `(−1, 1)`.
//!
//! At the point where a positive solution loses positivity (`u'(±1) = 0`),
//! the first integral `½u'² + λ(½u² − ⅓u³) − μu = 0` holds on the whole
//! interval. Evaluated at `x = 0` it ties `μ̄` to `λ̄`, and separating variables
//! gives `λ̄` as the square of a singular integral:
//!
//! ```text
//! μ̄ = λ̄ (α/2 − α²/3)
//! √λ̄ = ∫₀¹ dv / √(v (1 − v) (1 − ⅔α(1 + v)))
//! ```
//!
//! With `v = sin²θ` the endpoint singularities cancel against `dv` and the
//! integrand becomes `2 / √(1 − ⅔α(1 + sin²θ))` on `[0, π/2]`, which is smooth
//! for `α < 3/4`.

use crate::error::LogisticError;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

pub const DEFAULT_PANELS: usize = 8;
pub const GAUSS_ORDER: usize = 16;

/// Logistic nonlinearity `u − u²` as polynomial coefficients.
pub const LOGISTIC_F: [f64; 3] = [0.0, 1.0, -1.0];

/// `λₙ = n²π²/4`, the Dirichlet eigenvalues of `u'' + λu = 0` on `(−1, 1)`.
pub fn eigenvalue(n: u32) -> f64 {
    let n = n as f64;
    n * n * PI * PI / 4.0
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, computed by Newton's
/// method on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

fn check_alpha(alpha: f64) -> Result<(), LogisticError> {
    if alpha > 0.0 && alpha < 0.75 {
        Ok(())
    } else {
        Err(LogisticError::DomainError(alpha))
    }
}

/// `λ̄(α)`: the `λ` at which the positive solution with `u(0) = α` has zero
/// slope at the boundary. Composite 16-point Gauss–Legendre on `θ ∈ [0, π/2]`.
pub fn lambda_bar(alpha: f64, panels: usize) -> Result<f64, LogisticError> {
    check_alpha(alpha)?;
    if panels == 0 {
        return Err(LogisticError::NoPanels);
    }
    let (nodes, weights) = gl16();
    let c = 2.0 * alpha / 3.0;
    let width = FRAC_PI_2 / panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        let panel: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(&t, &w)| {
                let s = (mid + half * t).sin();
                w * 2.0 / (1.0 - c * (1.0 + s * s)).sqrt()
            })
            .sum();
        total += half * panel;
    }
    Ok(total * total)
}

/// `μ̄ = λ̄ (α/2 − α²/3)`.
pub fn mu_bar(alpha: f64, lambda_bar: f64) -> f64 {
    lambda_bar * (alpha / 2.0 - alpha * alpha / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub alpha: f64,
    pub lambda_bar: f64,
    pub mu_bar: f64,
}

/// Positivity-loss envelope `(λ̄(α), μ̄(α))` over a grid of `α ∈ (0, 3/4)`.
pub fn envelope(alpha_grid: &[f64], panels: usize) -> Result<Vec<EnvelopePoint>, LogisticError> {
    alpha_grid
        .iter()
        .map(|&alpha| {
            let lb = lambda_bar(alpha, panels)?;
            Ok(EnvelopePoint {
                alpha,
                lambda_bar: lb,
                mu_bar: mu_bar(alpha, lb),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues() {
        assert!((eigenvalue(1) - 2.4674011002723395).abs() < 1e-15);
        assert!((eigenvalue(2) - PI * PI).abs() < 1e-15);
        assert_eq!(eigenvalue(4), 4.0 * PI * PI);
    }

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(GAUSS_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 2n − 1 = 31 is exact; check x^30
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((q - 2.0 / 31.0).abs() < 1e-14, "{q}");
        assert!(x.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn small_alpha_tends_to_second_eigenvalue() {
        let lb = lambda_bar(1e-6, DEFAULT_PANELS).unwrap();
        assert!((lb - PI * PI).abs() < 1e-4);
        assert!(lb > PI * PI);
    }

    #[test]
    fn domain_errors() {
        assert!(lambda_bar(0.74, DEFAULT_PANELS).unwrap().is_finite());
        assert_eq!(lambda_bar(0.75, 8), Err(LogisticError::DomainError(0.75)));
        assert_eq!(lambda_bar(0.0, 8), Err(LogisticError::DomainError(0.0)));
        assert!(lambda_bar(f64::NAN, 8).is_err());
        assert_eq!(lambda_bar(0.5, 0), Err(LogisticError::NoPanels));
        assert!(envelope(&[0.1, 0.8], 8).is_err());
    }

    #[test]
    fn mu_bar_arithmetic() {
        assert!((mu_bar(0.5, 12.0) - 2.0).abs() < 1e-14);
        assert!(mu_bar(1e-12, 10.0) < 1e-10);
    }

    #[test]
    fn envelope_grid() {
        let env = envelope(&[0.1, 0.3, 0.5], DEFAULT_PANELS).unwrap();
        assert_eq!(env.len(), 3);
        assert!(env.windows(2).all(|p| p[1].lambda_bar > p[0].lambda_bar));
        for e in &env {
            assert_eq!(e.mu_bar, e.lambda_bar * (e.alpha / 2.0 - e.alpha * e.alpha / 3.0));
        }
        let tiny = envelope(&[1e-6], DEFAULT_PANELS).unwrap();
        assert!((tiny[0].lambda_bar - PI * PI).abs() < 1e-4);
        assert!(tiny[0].mu_bar < 1e-4);
        assert!(envelope(&[], DEFAULT_PANELS).unwrap().is_empty());
    }

    #[test]
    fn above_second_eigenvalue_everywhere() {
        for i in 1..=100 {
            let a = 0.74 * i as f64 / 101.0;
            assert!(lambda_bar(a, DEFAULT_PANELS).unwrap() > PI * PI);
        }
    }

    #[test]
    fn panel_doubling_is_stable() {
        for i in 1..=70 {
            let a = i as f64 / 100.0;
            let a8 = lambda_bar(a, 8).unwrap();
            let a16 = lambda_bar(a, 16).unwrap();
            assert!((a8 - a16).abs() < 1e-12, "alpha {a}: {a8} vs {a16}");
        }
    }
}
