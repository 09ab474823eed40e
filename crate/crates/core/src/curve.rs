//! Continuation of solution curves in the global parameter `α = u(0)`.
//!
//! Because `α` determines the solution uniquely, every curve is single valued
//! as a function of `α` even where it folds back in `λ` or `μ`. The engine
//! marches `α` with warm-started Newton solves, halves the step on failure,
//! and records turning points (sign changes of `Δparam/Δα`, refined by
//! golden-section search) and positivity-loss points (`u'(1) = 0`, refined by
//! bisection).

use crate::error::{CurveError, SolveError};
use crate::model::ProblemSpec;
use crate::shoot::{solve, FreeParam, NewtonConfig, SolvePoint, POS_TOL};
use serde::{Deserialize, Serialize};

/// `|u'(1)|` target when refining a positivity-loss point.
pub const POSITIVITY_LOSS_TOL: f64 = 1e-10;
/// Bracket width at which turning-point refinement stops.
pub const TURNING_POINT_ALPHA_TOL: f64 = 1e-8;
/// Largest `|u'(1)|` accepted at the end of a positivity-loss bisection.
pub const JUMP_SLOPE_TOL: f64 = 1e-6;
/// Relative size below which a parameter increment counts as flat when
/// scanning for turning points.
pub const FLAT_TOL: f64 = 1e-7;

const MAX_BISECTIONS: usize = 200;
/// Residual tolerance used for refinement probes.
const REFINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// `λ(α)` at fixed `μ`.
    LambdaCurve,
    /// `μ(α)` at fixed `λ`.
    MuCurve,
}

impl CurveKind {
    pub fn free(self) -> FreeParam {
        match self {
            CurveKind::LambdaCurve => FreeParam::Lambda,
            CurveKind::MuCurve => FreeParam::Mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub alpha_start: f64,
    pub alpha_end: f64,
    /// Nominal step; only its magnitude is used.
    pub alpha_step: f64,
    pub newton: NewtonConfig,
    pub max_step_halvings: u32,
    pub keep_profiles: bool,
    pub stop_on_positivity_loss: bool,
    /// Largest accepted `|Δparam|` between neighbouring points.
    pub jump_guard: f64,
}

impl ContinuationConfig {
    pub fn new(alpha_start: f64, alpha_end: f64) -> Self {
        Self {
            alpha_start,
            alpha_end,
            ..Default::default()
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.alpha_step = step;
        self
    }

    fn check(&self) -> Result<(), CurveError> {
        let finite = [self.alpha_start, self.alpha_end, self.alpha_step, self.jump_guard]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(CurveError::InvalidConfig("non-finite setting".into()));
        }
        if self.alpha_start == self.alpha_end {
            return Err(CurveError::InvalidConfig("alpha_start equals alpha_end".into()));
        }
        if self.alpha_step == 0.0 {
            return Err(CurveError::InvalidConfig("alpha_step is zero".into()));
        }
        if self.jump_guard <= 0.0 {
            return Err(CurveError::InvalidConfig("jump_guard must be positive".into()));
        }
        Ok(())
    }
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            alpha_start: 0.01,
            alpha_end: 1.0,
            alpha_step: 0.01,
            newton: NewtonConfig::default(),
            max_step_halvings: 8,
            keep_profiles: false,
            stop_on_positivity_loss: false,
            jump_guard: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    TurningPoint,
    PositivityLoss,
    ContinuityBreak,
    SolveFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEvent {
    pub kind: EventKind,
    pub alpha: f64,
    /// `λ` or `μ` at the event.
    pub param_value: f64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uprime1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub kind: CurveKind,
    /// `μ` for a λ-curve, `λ` for a μ-curve.
    pub fixed_value: f64,
    /// Sorted by increasing `alpha`.
    pub points: Vec<SolvePoint>,
    pub events: Vec<CurveEvent>,
}

impl Curve {
    pub fn alphas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.alpha).collect()
    }

    /// The continued parameter along the curve.
    pub fn params(&self) -> Vec<f64> {
        let which = self.kind.free();
        self.points.iter().map(|p| p.param(which)).collect()
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &CurveEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Piecewise-linear interpolation of the stored parameter at `alpha`,
    /// clamped to the end values outside the traced range.
    pub fn interpolate_param(&self, alpha: f64) -> Option<f64> {
        let which = self.kind.free();
        let pts = &self.points;
        let first = pts.first()?;
        let last = pts.last()?;
        if alpha <= first.alpha {
            return Some(first.param(which));
        }
        if alpha >= last.alpha {
            return Some(last.param(which));
        }
        let i = pts.partition_point(|p| p.alpha <= alpha);
        let (a, b) = (&pts[i - 1], &pts[i]);
        let t = (alpha - a.alpha) / (b.alpha - a.alpha);
        Some(a.param(which) + t * (b.param(which) - a.param(which)))
    }
}

/// Traces `λ(α)` at fixed `μ`, starting from `λ_init` at `alpha_start`.
pub fn trace_lambda_curve(
    spec: &ProblemSpec,
    mu: f64,
    lambda_init: f64,
    cfg: &ContinuationConfig,
) -> Result<Curve, CurveError> {
    trace(spec, CurveKind::LambdaCurve, mu, lambda_init, cfg)
}

/// Traces `μ(α)` at fixed `λ`, starting from `μ_init` at `alpha_start`.
pub fn trace_mu_curve(
    spec: &ProblemSpec,
    lambda: f64,
    mu_init: f64,
    cfg: &ContinuationConfig,
) -> Result<Curve, CurveError> {
    trace(spec, CurveKind::MuCurve, lambda, mu_init, cfg)
}

pub fn trace(
    spec: &ProblemSpec,
    kind: CurveKind,
    fixed_value: f64,
    init: f64,
    cfg: &ContinuationConfig,
) -> Result<Curve, CurveError> {
    cfg.check()?;
    let which = kind.free();
    let dir = (cfg.alpha_end - cfg.alpha_start).signum();
    let nominal = cfg.alpha_step.abs();
    let solve_at = |alpha: f64, guess: f64| {
        solve(spec, which, alpha, fixed_value, guess, &cfg.newton, cfg.keep_profiles)
    };

    let first = solve_at(cfg.alpha_start, init).map_err(|source| {
        CurveError::InitialSolveFailed {
            alpha: cfg.alpha_start,
            source,
        }
    })?;

    // points in marching order; sorted at the end
    let mut points = vec![first];
    let mut events = Vec::new();
    let mut step = nominal;
    let mut halvings = 0u32;

    loop {
        let cur = points.last().unwrap();
        let remaining = (cfg.alpha_end - cur.alpha) * dir;
        if remaining <= 1e-12 * cur.alpha.abs().max(1.0) {
            break;
        }
        let h = step.min(remaining);
        let next_alpha = if h == remaining {
            cfg.alpha_end
        } else {
            cur.alpha + dir * h
        };
        let cur_param = cur.param(which);
        let guess = match points.len() {
            1 => cur_param,
            n => {
                let prev = &points[n - 2];
                let slope = (cur_param - prev.param(which)) / (cur.alpha - prev.alpha);
                cur_param + slope * (next_alpha - cur.alpha)
            }
        };

        let pt = match solve_at(next_alpha, guess) {
            // a large jump usually means Newton hopped to another root
            Ok(pt)
                if (pt.param(which) - cur_param).abs() > cfg.jump_guard
                    && halvings < cfg.max_step_halvings =>
            {
                halvings += 1;
                step *= 0.5;
                continue;
            }
            Ok(pt) => pt,
            Err(_) if halvings < cfg.max_step_halvings => {
                halvings += 1;
                step *= 0.5;
                continue;
            }
            Err(err) => {
                events.push(CurveEvent {
                    kind: EventKind::SolveFailure,
                    alpha: next_alpha,
                    param_value: guess,
                    detail: format!("stopped after {halvings} step halvings: {err}"),
                    bracket: Some((cur.alpha, next_alpha)),
                    uprime1: None,
                });
                break;
            }
        };

        let jump = (pt.param(which) - cur_param).abs();
        if jump > cfg.jump_guard {
            events.push(CurveEvent {
                kind: EventKind::ContinuityBreak,
                alpha: pt.alpha,
                param_value: pt.param(which),
                detail: format!(
                    "|d{}| = {jump} exceeds jump guard {} at minimum step",
                    which.name(),
                    cfg.jump_guard
                ),
                bracket: Some((cur.alpha, pt.alpha)),
                uprime1: Some(pt.up1),
            });
        }

        let mut stop = false;
        if pt.positive != cur.positive {
            let lost = cur.positive;
            match find_positivity_loss(
                spec,
                kind,
                fixed_value,
                (cur.alpha, pt.alpha),
                (cur_param, pt.param(which)),
                &cfg.newton,
            ) {
                Ok(ev) => events.push(ev),
                // the classification can also flip through an interior zero;
                // that is not an endpoint-slope event
                Err(CurveError::BadBracket { .. }) => {}
                Err(e) => events.push(CurveEvent {
                    kind: EventKind::SolveFailure,
                    alpha: pt.alpha,
                    param_value: pt.param(which),
                    detail: format!("positivity-loss refinement failed: {e}"),
                    bracket: Some((cur.alpha, pt.alpha)),
                    uprime1: Some(pt.up1),
                }),
            }
            stop = lost && cfg.stop_on_positivity_loss;
        }
        if stop {
            break;
        }

        points.push(pt);
        halvings = halvings.saturating_sub(1);
        step = (step * 2.0).min(nominal);
    }

    if dir < 0.0 {
        points.reverse();
    }
    let mut curve = Curve {
        kind,
        fixed_value,
        points,
        events,
    };
    let turns = detect_turning_points(spec, &curve, &cfg.newton);
    curve.events.extend(turns);
    curve.events.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(curve)
}

/// Sign changes of `Δparam/Δα`, each refined by golden-section search on the
/// re-solved `param(α)` over its bracket.
pub fn detect_turning_points(
    spec: &ProblemSpec,
    curve: &Curve,
    newton: &NewtonConfig,
) -> Vec<CurveEvent> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Vec::new();
    }
    let which = curve.kind.free();
    let params = curve.params();

    // (index of difference, sign) for non-flat differences
    let signed: Vec<(usize, f64)> = params
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let d = w[1] - w[0];
            (d.abs() > FLAT_TOL * (1.0 + w[0].abs())).then_some((i, d.signum()))
        })
        .collect();

    let mut events = Vec::new();
    for pair in signed.windows(2) {
        let ((j, sj), (k, sk)) = (pair[0], pair[1]);
        if sj == sk {
            continue;
        }
        let bracket = (pts[j].alpha, pts[k + 1].alpha);
        let minimum = sj < 0.0;
        // fallback: best stored point in the bracket
        let stored = (j..=k + 1)
            .map(|i| (pts[i].alpha, params[i]))
            .reduce(|a, b| {
                if (b.1 < a.1) == minimum {
                    b
                } else {
                    a
                }
            })
            .unwrap();
        let refined = golden_section(spec, curve, newton, bracket, minimum);
        let (alpha, value, note) = match refined {
            Ok((a, v)) => (a, v, String::new()),
            Err(e) => (stored.0, stored.1, format!("; refinement failed: {e}")),
        };
        let side = if minimum { "right" } else { "left" };
        let extremum = if minimum { "minimum" } else { "maximum" };
        events.push(CurveEvent {
            kind: EventKind::TurningPoint,
            alpha,
            param_value: value,
            detail: format!("turn to the {side} ({extremum} of {}){note}", which.name()),
            bracket: Some(bracket),
            uprime1: None,
        });
    }
    events
}

fn refine_config(newton: &NewtonConfig) -> NewtonConfig {
    NewtonConfig {
        tol_residual: newton.tol_residual.min(REFINE_TOL),
        ..*newton
    }
}

fn golden_section(
    spec: &ProblemSpec,
    curve: &Curve,
    newton: &NewtonConfig,
    (mut a, mut b): (f64, f64),
    minimum: bool,
) -> Result<(f64, f64), SolveError> {
    let which = curve.kind.free();
    let tight = refine_config(newton);
    let eval = |alpha: f64| -> Result<f64, SolveError> {
        let guess = curve.interpolate_param(alpha).unwrap_or(0.0);
        let pt = solve(spec, which, alpha, curve.fixed_value, guess, &tight, false)
            .or_else(|_| solve(spec, which, alpha, curve.fixed_value, guess, newton, false))?;
        let v = pt.param(which);
        Ok(if minimum { v } else { -v })
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while (b - a).abs() > TURNING_POINT_ALPHA_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let (alpha, f) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok((alpha, if minimum { f } else { -f }))
}

/// Bisection in `α` for the point where `u'(1)` crosses zero, i.e. where a
/// positive solution turns sign-changing. `guesses` are starting values of
/// the free parameter at the two bracket ends.
pub fn find_positivity_loss(
    spec: &ProblemSpec,
    kind: CurveKind,
    fixed_value: f64,
    alpha_bracket: (f64, f64),
    guesses: (f64, f64),
    newton: &NewtonConfig,
) -> Result<CurveEvent, CurveError> {
    let which = kind.free();
    let solve_at = |alpha: f64, guess: f64| solve(spec, which, alpha, fixed_value, guess, newton, false);
    let (mut a, mut b) = alpha_bracket;
    let mut pa = solve_at(a, guesses.0)?;
    let mut pb = solve_at(b, guesses.1)?;
    let slope_positive = |p: &SolvePoint| p.up1 < -POS_TOL;
    if slope_positive(&pa) == slope_positive(&pb) {
        return Err(CurveError::BadBracket {
            a,
            b,
            up_a: pa.up1,
            up_b: pb.up1,
        });
    }

    let mut best = if pa.up1.abs() < pb.up1.abs() { pa.clone() } else { pb.clone() };
    for _ in 0..MAX_BISECTIONS {
        if best.up1.abs() <= POSITIVITY_LOSS_TOL {
            break;
        }
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let guess = 0.5 * (pa.param(which) + pb.param(which));
        let pm = solve_at(m, guess)?;
        if pm.up1.abs() < best.up1.abs() {
            best = pm.clone();
        }
        if slope_positive(&pm) == slope_positive(&pa) {
            a = m;
            pa = pm;
        } else {
            b = m;
            pb = pm;
        }
    }
    // the ends sit on different branches: the slope jumps instead of crossing zero
    if best.up1.abs() > JUMP_SLOPE_TOL {
        return Err(CurveError::BadBracket {
            a,
            b,
            up_a: pa.up1,
            up_b: pb.up1,
        });
    }

    Ok(CurveEvent {
        kind: EventKind::PositivityLoss,
        alpha: best.alpha,
        param_value: best.param(which),
        detail: format!(
            "u'(1) = {:e}; solutions become sign-changing past this {}",
            best.up1,
            which.name()
        ),
        bracket: Some((a.min(b).min(best.alpha), a.max(b).max(best.alpha))),
        uprime1: Some(best.up1),
    })
}
