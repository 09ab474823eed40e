//! Problem definition: polynomial nonlinearity `f(u)`, polynomial weight `g(x)`,
//! and the structural checks required of `g` (even, positive at the origin,
//! non-decreasing away from it).

use serde::{Deserialize, Serialize};
use std::fmt;

/// Default number of sample points used to check `x·g'(x) >= 0`.
pub const DEFAULT_GRID_SIZE: usize = 1001;

/// Real polynomial stored by ascending powers: `coeffs[k]` multiplies `x^k`.
///
/// An empty coefficient list is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// Horner evaluation.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Evaluates the polynomial and its derivative in one Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Polynomial { coeffs }
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Polynomial {
        if self.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let coeffs = std::iter::once(0.0)
            .chain(
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c / (k as f64 + 1.0)),
            )
            .collect();
        Polynomial { coeffs }
    }

    /// Degree ignoring trailing zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// True when every odd-power coefficient is exactly zero.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }
}

impl From<&[f64]> for Polynomial {
    fn from(coeffs: &[f64]) -> Self {
        Polynomial {
            coeffs: coeffs.to_vec(),
        }
    }
}

pub fn poly_eval(p: &Polynomial, x: f64) -> f64 {
    p.eval(x)
}

pub fn poly_derivative(p: &Polynomial) -> Polynomial {
    p.derivative()
}

pub fn poly_antiderivative(p: &Polynomial) -> Polynomial {
    p.antiderivative()
}

/// The pair `(f, g)` defining `u'' + λ f(u) − μ g(x) = 0` on `(−1, 1)`.
///
/// `validated` is only ever set by [`validate_problem`]; solvers refuse
/// specs that have not passed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub f: Polynomial,
    pub g: Polynomial,
    /// Cached `f'`.
    pub(crate) df: Polynomial,
    validated: bool,
}

impl ProblemSpec {
    pub fn new(f: impl Into<Polynomial>, g: impl Into<Polynomial>) -> Self {
        let f = f.into();
        let df = f.derivative();
        Self {
            f,
            g: g.into(),
            df,
            validated: false,
        }
    }

    /// Builds and validates in one go with the default grid.
    pub fn validated(
        f: impl Into<Polynomial>,
        g: impl Into<Polynomial>,
    ) -> Result<Self, ValidationReport> {
        let mut spec = Self::new(f, g);
        let report = validate_problem(&mut spec, DEFAULT_GRID_SIZE);
        if report.passed() {
            Ok(spec)
        } else {
            Err(report)
        }
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn df(&self) -> &Polynomial {
        &self.df
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `g(−x) = g(x)`: no odd powers in `g`.
    Even,
    /// `g(0) > 0`.
    PositiveAtOrigin,
    /// `x·g'(x) >= 0` on `(−1, 1)`.
    NonDecreasingOutward,
}

impl Condition {
    pub fn label(&self) -> &'static str {
        match self {
            Condition::Even => "condition (2): g(-x) = g(x)",
            Condition::PositiveAtOrigin => "condition (3a): g(0) > 0",
            Condition::NonDecreasingOutward => "condition (3b): x g'(x) >= 0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {}: {}", c.condition.label(), c.detail)?;
        }
        Ok(())
    }
}

/// Checks `g` against the structural conditions and sets `spec.validated`
/// iff all of them hold. Failures are reported, never raised.
///
/// The outward-monotonicity check samples `grid_size` equispaced interior
/// points of `(0, 1)`; evenness covers the negative half.
pub fn validate_problem(spec: &mut ProblemSpec, grid_size: usize) -> ValidationReport {
    let grid_size = grid_size.max(2);
    let g = &spec.g;

    let even = g.is_even();
    let odd_powers: Vec<usize> = g
        .coeffs
        .iter()
        .enumerate()
        .filter(|&(k, &c)| k % 2 == 1 && c != 0.0)
        .map(|(k, _)| k)
        .collect();
    let even_check = ConditionCheck {
        condition: Condition::Even,
        passed: even,
        detail: if even {
            "no odd powers".to_string()
        } else {
            format!("nonzero odd-power coefficients at powers {odd_powers:?}")
        },
    };

    let g0 = g.eval(0.0);
    let origin_check = ConditionCheck {
        condition: Condition::PositiveAtOrigin,
        passed: g0 > 0.0,
        detail: format!("g(0) = {g0}"),
    };

    let dg = g.derivative();
    let worst = (1..=grid_size)
        .map(|i| i as f64 / (grid_size + 1) as f64)
        .map(|x| (x, x * dg.eval(x)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let monotone_check = match worst {
        Some((x, v)) if v < 0.0 => ConditionCheck {
            condition: Condition::NonDecreasingOutward,
            passed: false,
            detail: format!("x g'(x) = {v} < 0 at x = {x}"),
        },
        _ => ConditionCheck {
            condition: Condition::NonDecreasingOutward,
            passed: true,
            detail: format!("holds on {grid_size} grid points"),
        },
    };

    let report = ValidationReport {
        checks: vec![even_check, origin_check, monotone_check],
    };
    spec.validated = report.passed();
    report
}
