//! Built-in property suite behind the `verify` command. Each check runs a
//! small computation and compares it against a structural fact about the
//! problem class: exact linear eigenvalues, variational derivatives versus
//! finite differences, uniqueness in `α`, non-intersection of curves, turn
//! directions, shared turning points, and the logistic positivity-loss
//! envelope.

use crate::curve::{
    find_positivity_loss, trace_lambda_curve, trace_mu_curve, ContinuationConfig, Curve,
    CurveKind, EventKind,
};
use crate::ivp::{integrate, SensitivityMode};
use crate::logistic::{self, eigenvalue, LOGISTIC_F};
use crate::model::ProblemSpec;
use crate::shoot::{solve, solve_lambda, FreeParam, NewtonConfig};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &str, passed: bool, detail: String) -> PropertyResult {
    PropertyResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn logistic_spec() -> ProblemSpec {
    ProblemSpec::validated(LOGISTIC_F.to_vec(), vec![1.0]).expect("logistic problem is valid")
}

/// Sign changes of consecutive parameter increments, ignoring flat ones.
pub fn increment_signs(params: &[f64]) -> Vec<f64> {
    params
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > 1e-9)
        .map(f64::signum)
        .fold(Vec::new(), |mut acc, s| {
            if acc.last() != Some(&s) {
                acc.push(s);
            }
            acc
        })
}

fn check_linear(newton: &NewtonConfig) -> PropertyResult {
    let spec = ProblemSpec::validated(vec![0.0, 1.0], vec![1.0]).unwrap();
    let target = eigenvalue(1);
    let mut worst = 0.0f64;
    for alpha in [0.1, 0.5, 1.0] {
        for guess in [1.0, 5.0] {
            match solve_lambda(&spec, alpha, 0.0, guess, newton) {
                Ok(p) => worst = worst.max((p.lambda - target).abs()),
                Err(e) => return result("linear f gives lambda_1", false, e.to_string()),
            }
        }
    }
    result(
        "linear f gives lambda_1",
        worst < 1e-8,
        format!("max |lambda - pi^2/4| = {worst:e}"),
    )
}

/// `(f, g, α, λ, μ)`
type SensitivityCase = (&'static [f64], &'static [f64], f64, f64, f64);

fn check_sensitivities(newton: &NewtonConfig) -> PropertyResult {
    let cases: [SensitivityCase; 3] = [
        (&[0.0, 1.0, -1.0], &[1.0], 0.6, 5.0, 0.3),
        (&[0.0, 10.0, -2.0], &[1.0, 0.0, 0.2], 2.0, 0.5, 1.5),
        (&[0.5, -1.0, 0.0, 0.3], &[2.0, 0.0, 1.0], 0.8, 1.5, -0.7),
    ];
    let h = 1e-5;
    let mut worst = 0.0f64;
    for (f, g, alpha, lambda, mu) in cases {
        let spec = ProblemSpec::validated(f.to_vec(), g.to_vec()).unwrap();
        let u1 = |l: f64, m: f64| {
            integrate(&spec, alpha, l, m, SensitivityMode::None, newton.steps).map(|t| t.u1)
        };
        let run = || -> Result<f64, crate::error::IvpError> {
            let sl = integrate(&spec, alpha, lambda, mu, SensitivityMode::Lambda, newton.steps)?.s1;
            let sm = integrate(&spec, alpha, lambda, mu, SensitivityMode::Mu, newton.steps)?.s1;
            let fl = (u1(lambda + h, mu)? - u1(lambda - h, mu)?) / (2.0 * h);
            let fm = (u1(lambda, mu + h)? - u1(lambda, mu - h)?) / (2.0 * h);
            Ok(((sl - fl) / sl).abs().max(((sm - fm) / sm).abs()))
        };
        match run() {
            Ok(r) => worst = worst.max(r),
            Err(e) => return result("variational derivatives", false, e.to_string()),
        }
    }
    result(
        "variational derivatives match finite differences",
        worst < 1e-5,
        format!("max relative error {worst:e}"),
    )
}

fn check_uniqueness(newton: &NewtonConfig) -> PropertyResult {
    let spec = logistic_spec();
    let mut found: Vec<f64> = Vec::new();
    for i in 0..20 {
        let guess = 0.5 * 100f64.powf(i as f64 / 19.0);
        if let Ok(p) = solve_lambda(&spec, 0.5, 0.1, guess, newton) {
            if p.positive {
                found.push(p.lambda);
            }
        }
    }
    let spread = found
        .iter()
        .map(|&l| (l - found[0]).abs())
        .fold(0.0, f64::max);
    result(
        "u(0) identifies the positive solution",
        !found.is_empty() && spread < 1e-7,
        format!("{} positive roots, spread {spread:e}", found.len()),
    )
}

fn check_non_intersection(newton: &NewtonConfig) -> PropertyResult {
    let spec = ProblemSpec::validated(vec![0.0, 10.0, -2.0], vec![1.0, 0.0, 0.2]).unwrap();
    let mut cfg = ContinuationConfig::new(0.6, 4.6);
    cfg.alpha_step = 0.05;
    cfg.newton = *newton;
    let curves: Result<Vec<Curve>, _> = [(0.9, 0.5), (1.5, 0.64), (2.2, 0.79)]
        .iter()
        .map(|&(mu, l0)| trace_lambda_curve(&spec, mu, l0, &cfg))
        .collect();
    let curves = match curves {
        Ok(c) => c,
        Err(e) => return result("curves at different mu do not intersect", false, e.to_string()),
    };
    let ordered = (0..curves[0].points.len()).all(|i| {
        let l: Vec<f64> = curves.iter().map(|c| c.points[i].lambda).collect();
        l[0] < l[1] && l[1] < l[2]
    });
    let same_grid = curves.iter().all(|c| c.points.len() == curves[0].points.len());
    result(
        "curves at different mu do not intersect",
        same_grid && ordered,
        format!("{} shared alpha values", curves[0].points.len()),
    )
}

fn check_turn_direction(newton: &NewtonConfig) -> PropertyResult {
    let spec = logistic_spec();
    let mut cfg = ContinuationConfig::new(0.05, 0.95);
    cfg.alpha_step = 0.02;
    cfg.newton = *newton;
    let lam = trace_lambda_curve(&spec, 0.05, 3.5, &cfg);
    let mu = trace_mu_curve(&spec, 12.0, 0.3, &ContinuationConfig { alpha_start: 0.2, ..cfg });
    match (lam, mu) {
        (Ok(l), Ok(m)) => {
            let ls = increment_signs(&l.params());
            let ms = increment_signs(&m.params());
            result(
                "concave f: lambda-curves turn right, mu-curves turn left",
                ls == [-1.0, 1.0] && ms == [1.0, -1.0],
                format!("lambda increments {ls:?}, mu increments {ms:?}"),
            )
        }
        (Err(e), _) | (_, Err(e)) => result("turn direction", false, e.to_string()),
    }
}

fn check_shared_turn(newton: &NewtonConfig) -> PropertyResult {
    let name = "lambda- and mu-curves share turning points";
    let spec = logistic_spec();
    let mut cfg = ContinuationConfig::new(0.2, 0.6);
    cfg.alpha_step = 0.02;
    cfg.newton = *newton;
    let lam = match trace_lambda_curve(&spec, 0.2, 4.5, &cfg) {
        Ok(c) => c,
        Err(e) => return result(name, false, e.to_string()),
    };
    let Some(t) = lam.events_of(EventKind::TurningPoint).next().cloned() else {
        return result(name, false, "no turn on the lambda-curve".into());
    };
    let mu = match trace_mu_curve(&spec, t.param_value, 0.1, &cfg) {
        Ok(c) => c,
        Err(e) => return result(name, false, e.to_string()),
    };
    let Some(s) = mu.events_of(EventKind::TurningPoint).next() else {
        return result(name, false, "no turn on the mu-curve".into());
    };
    let (dm, da) = ((s.param_value - 0.2).abs(), (s.alpha - t.alpha).abs());
    result(
        name,
        dm < 1e-4 && da < 1e-4,
        format!("|mu - 0.2| = {dm:e}, |alpha - alpha_0| = {da:e}"),
    )
}

fn check_envelope(newton: &NewtonConfig) -> PropertyResult {
    let name = "closed-form envelope matches shooting";
    let lb_small = logistic::lambda_bar(1e-6, logistic::DEFAULT_PANELS).unwrap();
    let above = (1..=100).all(|i| {
        logistic::lambda_bar(0.74 * i as f64 / 101.0, logistic::DEFAULT_PANELS).unwrap() > PI * PI
    });
    let spec = logistic_spec();
    let alpha = 0.4;
    let lb = logistic::lambda_bar(alpha, logistic::DEFAULT_PANELS).unwrap();
    let mb = logistic::mu_bar(alpha, lb);
    let ev = find_positivity_loss(
        &spec,
        CurveKind::MuCurve,
        lb,
        (0.9 * alpha, 1.1 * alpha),
        (mb, mb),
        newton,
    );
    match ev {
        Ok(e) => {
            let rel = ((e.param_value - mb) / mb).abs();
            let da = (e.alpha - alpha).abs();
            result(
                name,
                (lb_small - PI * PI).abs() < 1e-4 && above && rel < 1e-4 && da < 1e-4,
                format!(
                    "lambda_bar(1e-6) - pi^2 = {:e}; at alpha 0.4: mu rel err {rel:e}, alpha err {da:e}",
                    lb_small - PI * PI
                ),
            )
        }
        Err(e) => result(name, false, e.to_string()),
    }
}

fn check_integral_form(newton: &NewtonConfig) -> PropertyResult {
    let spec = ProblemSpec::validated(vec![0.0, 10.0, -2.0], vec![1.0, 0.0, 0.2]).unwrap();
    match solve(&spec, FreeParam::Lambda, 2.0, 1.5, 0.52, newton, true) {
        Ok(p) => {
            let t = p.profile.as_ref().unwrap();
            let r = integral_form_u1(&spec, t, p.lambda, p.mu);
            let err = (r - t.u1).abs();
            result(
                "terminal value equals integral form",
                err < 1e-6,
                format!("|difference| = {err:e}"),
            )
        }
        Err(e) => result("terminal value equals integral form", false, e.to_string()),
    }
}

/// `α − λ∫₀¹(1−t) f(u) dt + μ∫₀¹(1−t) g dt` by the trapezoid rule over the
/// stored samples.
pub fn integral_form_u1(
    spec: &ProblemSpec,
    traj: &crate::ivp::Trajectory,
    lambda: f64,
    mu: f64,
) -> f64 {
    let integrand = |i: usize| {
        let t = traj.xs[i];
        (1.0 - t) * (-lambda * spec.f.eval(traj.u[i]) + mu * spec.g.eval(t))
    };
    let quad: f64 = (1..traj.xs.len())
        .map(|i| 0.5 * (traj.xs[i] - traj.xs[i - 1]) * (integrand(i) + integrand(i - 1)))
        .sum();
    traj.u[0] + quad
}

pub fn run_suite(newton: &NewtonConfig) -> Vec<PropertyResult> {
    vec![
        check_linear(newton),
        check_sensitivities(newton),
        check_uniqueness(newton),
        check_non_intersection(newton),
        check_turn_direction(newton),
        check_shared_turn(newton),
        check_envelope(newton),
        check_integral_form(newton),
    ]
}
