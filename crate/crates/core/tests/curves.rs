use shootcurve::curve::{
    find_positivity_loss, trace_lambda_curve, trace_mu_curve, ContinuationConfig, Curve, CurveKind,
    EventKind,
};
use shootcurve::ivp::{integrate, SensitivityMode};
use shootcurve::logistic::{self, LOGISTIC_F};
use shootcurve::shoot::NewtonConfig;
use shootcurve::{CurveError, ProblemSpec};
use std::f64::consts::PI;

fn logistic_spec() -> ProblemSpec {
    ProblemSpec::validated(LOGISTIC_F.to_vec(), vec![1.0]).unwrap()
}

fn n10_spec() -> ProblemSpec {
    ProblemSpec::validated(vec![0.0, 10.0, -2.0], vec![1.0, 0.0, 0.2]).unwrap()
}

fn turns(c: &Curve) -> Vec<(f64, f64)> {
    c.events_of(EventKind::TurningPoint)
        .map(|e| (e.alpha, e.param_value))
        .collect()
}

fn assert_faithful(spec: &ProblemSpec, c: &Curve) {
    assert!(c.points.windows(2).all(|w| w[1].alpha > w[0].alpha));
    for p in &c.points {
        let t = integrate(spec, p.alpha, p.lambda, p.mu, SensitivityMode::None, 2048).unwrap();
        assert!(t.u1.abs() < 1e-9, "alpha {}: u(1) = {}", p.alpha, t.u1);
    }
}

#[test]
fn n10_middle_curve_turns_once() {
    let spec = n10_spec();
    let c = trace_lambda_curve(&spec, 1.5, 0.74, &ContinuationConfig::new(0.5, 4.8)).unwrap();
    assert_faithful(&spec, &c);
    let t = turns(&c);
    assert_eq!(t.len(), 1);
    let (a0, l0) = t[0];
    assert!(c.points.iter().all(|p| p.lambda >= l0 - 1e-9), "turn is a minimum");

    // dense re-sweep at ten times the resolution around the turn
    let fine = trace_lambda_curve(
        &spec,
        1.5,
        c.interpolate_param(a0 - 0.1).unwrap(),
        &ContinuationConfig::new(a0 - 0.1, a0 + 0.1).with_step(0.001),
    )
    .unwrap();
    let min = fine.params().into_iter().fold(f64::INFINITY, f64::min);
    assert!(l0 <= min + 1e-12 && min - l0 < 1e-6, "{l0} vs dense minimum {min}");
    let ft = turns(&fine);
    assert_eq!(ft.len(), 1);
    assert!((ft[0].0 - a0).abs() < 1e-5 && (ft[0].1 - l0).abs() < 1e-10);
}

#[test]
fn linear_curve_is_flat() {
    let spec = ProblemSpec::validated(vec![0.0, 1.0], vec![1.0]).unwrap();
    let c = trace_lambda_curve(&spec, 0.0, 2.0, &ContinuationConfig::new(0.05, 2.0).with_step(0.05)).unwrap();
    assert!(c.events.is_empty());
    for p in &c.points {
        assert!((p.lambda - PI * PI / 4.0).abs() < 1e-8);
    }
}

#[test]
fn logistic_lambda_curve_small_harvest() {
    let spec = logistic_spec();
    let c = trace_lambda_curve(&spec, 0.05, 4.0, &ContinuationConfig::new(0.95, 0.01)).unwrap();
    assert_faithful(&spec, &c);
    let t = turns(&c);
    assert_eq!(t.len(), 1);
    let loss: Vec<_> = c.events_of(EventKind::PositivityLoss).collect();
    assert_eq!(loss.len(), 1);
    let (abar, lbar) = (loss[0].alpha, loss[0].param_value);
    assert!(lbar > PI * PI);
    assert!(abar < t[0].0, "loss sits on the lower branch");

    // the closed form at the same α reproduces λ̄ and the fixed μ
    let closed = logistic::lambda_bar(abar, logistic::DEFAULT_PANELS).unwrap();
    assert!(((closed - lbar) / lbar).abs() < 1e-4, "{closed} vs {lbar}");
    let mb = logistic::mu_bar(abar, closed);
    assert!(((mb - 0.05) / 0.05).abs() < 1e-4, "{mb}");
}

#[test]
fn logistic_mu_curve_beyond_second_eigenvalue() {
    let spec = logistic_spec();
    let c = trace_mu_curve(&spec, 12.0, 0.0, &ContinuationConfig::new(0.005, 0.99).with_step(0.005)).unwrap();
    let loss = c.events_of(EventKind::PositivityLoss).next().unwrap();
    let lb = logistic::lambda_bar(loss.alpha, logistic::DEFAULT_PANELS).unwrap();
    assert!(((lb - 12.0) / 12.0).abs() < 1e-4, "{lb}");
    let mb = logistic::mu_bar(loss.alpha, lb);
    assert!(((mb - loss.param_value) / mb).abs() < 1e-4);
    assert!(loss.uprime1.unwrap().abs() < 1e-6);
    let (lo, hi) = loss.bracket.unwrap();
    assert!(hi - lo < 0.005 && lo <= loss.alpha && loss.alpha <= hi, "{lo} {hi} {}", loss.alpha);
    // points below the loss are sign-changing, points above are positive
    for p in &c.points {
        if p.alpha < lo - 1e-9 {
            assert!(!p.positive, "alpha {}", p.alpha);
        } else if p.alpha > hi + 1e-9 && p.alpha < 0.9 {
            assert!(p.positive, "alpha {}", p.alpha);
        }
    }
}

#[test]
fn harvesting_weight_mu_curve() {
    let spec = ProblemSpec::validated(vec![0.0, 4.0, -1.0], vec![1.0, 0.0, 1.0]).unwrap();
    let c = trace_mu_curve(&spec, 1.0, 0.0, &ContinuationConfig::new(0.01, 4.0)).unwrap();
    assert_faithful(&spec, &c);
    let t = turns(&c);
    assert_eq!(t.len(), 1);
    let mus = c.params();
    assert!(t[0].1 >= mus.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    assert!(mus[0] > 0.0 && mus[0] < 0.05 * t[0].1);
    assert!(mus.windows(2).any(|w| w[0] > 0.0 && w[1] <= 0.0));
    assert!(c.events_of(EventKind::PositivityLoss).next().is_none());
}

#[test]
fn stocking_branch_is_monotone() {
    let spec = logistic_spec();
    let c = trace_mu_curve(&spec, 6.0, 0.0, &ContinuationConfig::new(0.5, 1.5)).unwrap();
    assert!(c.events.is_empty(), "{:?}", c.events);
    assert!(c.points.windows(2).all(|w| w[1].mu < w[0].mu));
    assert!(c.points.iter().any(|p| p.mu < 0.0));
    assert!(c.points.iter().all(|p| p.positive));
}

#[test]
fn no_positivity_loss_without_harvest() {
    let spec = logistic_spec();
    let cfg = NewtonConfig::default();
    for bracket in [(0.1, 0.9), (0.3, 0.5), (0.02, 0.99)] {
        let r = find_positivity_loss(&spec, CurveKind::LambdaCurve, 0.0, bracket, (3.0, 3.0), &cfg);
        assert!(matches!(r, Err(CurveError::BadBracket { .. })), "{bracket:?}: {r:?}");
    }
    let c = trace_lambda_curve(&spec, 0.0, 2.5, &ContinuationConfig::new(0.01, 0.99)).unwrap();
    assert!(c.events.is_empty());
    assert!(c.points.iter().all(|p| p.positive && p.up1 < 0.0));
    assert!(c.points.windows(2).all(|w| w[1].lambda > w[0].lambda));
}

#[test]
fn continuation_is_continuous() {
    let spec = n10_spec();
    let cfg = ContinuationConfig::new(0.5, 4.8);
    let c = trace_lambda_curve(&spec, 2.2, 1.0, &cfg).unwrap();
    assert!(c.events_of(EventKind::ContinuityBreak).next().is_none());
    assert!(c.points.windows(2).all(|w| (w[1].lambda - w[0].lambda).abs() < cfg.jump_guard));
    let reversed = trace_lambda_curve(
        &spec,
        2.2,
        c.points.last().unwrap().lambda,
        &ContinuationConfig::new(4.8, 0.5),
    )
    .unwrap();
    for (a, b) in c.points.iter().zip(&reversed.points) {
        assert!((a.alpha - b.alpha).abs() < 1e-9 && (a.lambda - b.lambda).abs() < 1e-8);
    }
}

#[test]
fn bad_initial_guess_is_reported() {
    let spec = n10_spec();
    let mut cfg = ContinuationConfig::new(0.5, 1.0);
    cfg.newton.max_iters = 2;
    let r = trace_lambda_curve(&spec, 1.5, 50.0, &cfg);
    assert!(matches!(r, Err(CurveError::InitialSolveFailed { .. })), "{r:?}");
}

#[test]
fn profiles_are_kept_on_request() {
    let spec = logistic_spec();
    let mut cfg = ContinuationConfig::new(0.2, 0.3).with_step(0.05);
    cfg.keep_profiles = true;
    let c = trace_lambda_curve(&spec, 0.0, 3.0, &cfg).unwrap();
    for p in &c.points {
        let prof = p.profile.as_ref().unwrap().reflected_profile();
        assert!((prof[0].0 + 1.0).abs() < 1e-15 && (prof.last().unwrap().0 - 1.0).abs() < 1e-15);
        let mid = prof.len() / 2;
        assert!((prof[mid].1 - p.alpha).abs() < 1e-15);
        assert!(prof[0].1.abs() < 1e-9);
    }
}
