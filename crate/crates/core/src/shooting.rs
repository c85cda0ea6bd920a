//! Shooting maps at the matching point `t0` and their winding angles.
//!
//! `I(alpha) = (u(t0), u'(t0))` for the solution with `u(0) = alpha`,
//! `u'(0) = 0`, and `F(beta)` likewise for `u(d) = beta`, `u'(d) = 0`.
//! The angle functions `a`, `b` are continuous arguments of these curves
//! normalized by `a(1) = b(1) = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::{self, Direction, OdeParams, Trajectory};
use crate::profile::Profile;

pub const DEFAULT_THETA_MAX: f64 = PI / 4.0;
pub const DEFAULT_BUDGET: usize = 200_000;
pub const DEFAULT_P_MIN: f64 = 1e-3;
/// Angles closer than this to an odd multiple of `pi/2` have an ambiguous
/// zero count.
pub const AMBIGUITY_TOL: f64 = 1e-6;
const EXIT_ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotPoint {
    pub param: f64,
    pub u_t0: f64,
    pub up_t0: f64,
    /// Zeros in `(0, t0)` for left shots, `(t0, d)` for right shots.
    pub zeros_inside: usize,
    pub side: Side,
}

impl ShotPoint {
    /// Principal argument of `(u(t0), u'(t0))`.
    pub fn raw_angle(&self) -> f64 {
        self.up_t0.atan2(self.u_t0)
    }

    pub fn radius(&self) -> f64 {
        self.u_t0.hypot(self.up_t0)
    }
}

/// Full trajectory of a shot from the chosen endpoint to `t0`.
pub fn shoot_trajectory(
    side: Side,
    param: f64,
    profile: &Profile,
    params: &OdeParams,
) -> Result<Trajectory> {
    let t0 = profile.t0()?;
    match side {
        Side::Left => {
            let start = ivp::step_off_left(param, profile, params)?;
            ivp::integrate(start, t0, profile, params, Direction::Forward)
        }
        Side::Right => {
            let start = ivp::step_off_right(param, profile, params)?;
            ivp::integrate(start, t0, profile, params, Direction::Backward)
        }
    }
}

pub fn shoot(side: Side, param: f64, profile: &Profile, params: &OdeParams) -> Result<ShotPoint> {
    if param == 0.0 {
        profile.t0()?;
        return Ok(ShotPoint {
            param,
            u_t0: 0.0,
            up_t0: 0.0,
            zeros_inside: 0,
            side,
        });
    }
    let traj = shoot_trajectory(side, param, profile, params)?;
    let t0 = profile.t0()?;
    let zeros = match side {
        Side::Left => ivp::count_zeros(&traj, 0.0, t0),
        Side::Right => ivp::count_zeros(&traj, t0, profile.d()),
    };
    Ok(ShotPoint {
        param,
        u_t0: traj.terminal.u,
        up_t0: traj.terminal.up,
        zeros_inside: zeros,
        side,
    })
}

/// `I(alpha)` with the zero count on `(0, t0)`.
pub fn shoot_left(alpha: f64, profile: &Profile, params: &OdeParams) -> Result<ShotPoint> {
    shoot(Side::Left, alpha, profile, params)
}

/// `F(beta)` with the zero count on `(t0, d)`.
pub fn shoot_right(beta: f64, profile: &Profile, params: &OdeParams) -> Result<ShotPoint> {
    shoot(Side::Right, beta, profile, params)
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub param: f64,
    pub angle: f64,
    pub radius: f64,
    pub zeros: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleCurve {
    pub side: Side,
    /// Sorted by increasing `param`.
    pub knots: Vec<Knot>,
    pub theta_max: f64,
    /// True once [`extend_odd`] has added negative-parameter knots.
    pub extended: bool,
}

impl AngleCurve {
    pub fn param_range(&self) -> (f64, f64) {
        match (self.knots.first(), self.knots.last()) {
            (Some(a), Some(b)) => (a.param, b.param),
            _ => (f64::NAN, f64::NAN),
        }
    }

    /// Piecewise-linear angle at `param`, if inside the sampled range.
    pub fn interpolate(&self, param: f64) -> Option<f64> {
        let i = self.knots.partition_point(|k| k.param <= param);
        if i == 0 || i > self.knots.len() {
            return None;
        }
        if i == self.knots.len() {
            let last = self.knots.last()?;
            return (last.param == param).then_some(last.angle);
        }
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        let w = (param - a.param) / (b.param - a.param);
        Some(a.angle + w * (b.angle - a.angle))
    }

    /// Knot at exactly `param = 1` (the anchor).
    pub fn anchor(&self) -> Option<&Knot> {
        self.knots.iter().find(|k| k.param == 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub theta_max: f64,
    pub budget: usize,
    /// Stop the outward sweep once `|angle|` exceeds this in the side's
    /// natural direction (decreasing for left, increasing for right).
    pub stop_winding: Option<f64>,
    /// First outward step, relative to the anchor.
    pub initial_step: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            theta_max: DEFAULT_THETA_MAX,
            budget: DEFAULT_BUDGET,
            stop_winding: None,
            initial_step: 0.05,
        }
    }
}

pub fn angle_sweep(
    side: Side,
    p_min: f64,
    p_max: f64,
    profile: &Profile,
    params: &OdeParams,
) -> Result<AngleCurve> {
    angle_sweep_with(side, p_min, p_max, profile, params, &SweepOptions::default())
}

struct SweepState<'a> {
    side: Side,
    profile: &'a Profile,
    params: &'a OdeParams,
    opts: &'a SweepOptions,
    shots: usize,
}

impl SweepState<'_> {
    fn shot(&mut self, p: f64) -> Result<ShotPoint> {
        self.shots += 1;
        shoot(self.side, p, self.profile, self.params)
    }

    fn stop_reached(&self, angle: f64) -> bool {
        match self.opts.stop_winding {
            None => false,
            Some(w) => match self.side {
                Side::Left => angle <= -w,
                Side::Right => angle >= w,
            },
        }
    }

    /// Walks from the anchor towards `limit`, appending knots.
    fn walk(&mut self, anchor: &ShotPoint, limit: f64, knots: &mut Vec<Knot>, outward: bool) -> Result<bool> {
        let dir = if limit >= anchor.param { 1.0 } else { -1.0 };
        let mut p = anchor.param;
        let mut raw = anchor.raw_angle();
        let mut angle = 0.0;
        let mut step = self.opts.initial_step * anchor.param;
        let theta_max = self.opts.theta_max;

        while (limit - p) * dir > 0.0 {
            if outward && self.stop_reached(angle) {
                return Ok(true);
            }
            if self.shots >= self.opts.budget {
                return Ok(false);
            }
            let p_next = if dir > 0.0 {
                (p + step).min(limit)
            } else {
                (p - step).max(limit)
            };
            let min_step = 1e-12 * p.abs().max(1e-300);
            let shot = match self.shot(p_next) {
                Ok(s) => s,
                Err(e) => {
                    if step > min_step {
                        step *= 0.5;
                        continue;
                    }
                    return Err(e);
                }
            };
            let raw_next = shot.raw_angle();
            let diff = wrap_angle(raw_next - raw);
            if diff.abs() > theta_max && step > min_step {
                step *= 0.5;
                continue;
            }
            angle += diff;
            raw = raw_next;
            p = p_next;
            knots.push(Knot {
                param: p,
                angle,
                radius: shot.radius(),
                zeros: shot.zeros_inside,
            });
            if diff.abs() < 0.25 * theta_max {
                step *= 1.5;
            }
            step = step.min(0.25 * p.abs());
        }
        Ok(true)
    }
}

/// Adaptive sweep of the winding angle over `[p_min, p_max]`, anchored to
/// zero at `param = 1` and refined until consecutive knots differ by at
/// most `theta_max`.
pub fn angle_sweep_with(
    side: Side,
    p_min: f64,
    p_max: f64,
    profile: &Profile,
    params: &OdeParams,
    opts: &SweepOptions,
) -> Result<AngleCurve> {
    if !(p_min > 0.0 && p_min <= 1.0 && p_max >= 1.0) {
        return Err(Error::Config(format!(
            "sweep range [{p_min}, {p_max}] must satisfy 0 < p_min <= 1 <= p_max"
        )));
    }
    let mut state = SweepState {
        side,
        profile,
        params,
        opts,
        shots: 0,
    };
    let anchor = state.shot(1.0)?;
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let up_done = state.walk(&anchor, p_max, &mut upper, true)?;
    let down_done = up_done && state.walk(&anchor, p_min, &mut lower, false)?;

    lower.reverse();
    let mut knots = lower;
    knots.push(Knot {
        param: 1.0,
        angle: 0.0,
        radius: anchor.radius(),
        zeros: anchor.zeros_inside,
    });
    knots.extend(upper);
    let curve = AngleCurve {
        side,
        knots,
        theta_max: opts.theta_max,
        extended: false,
    };
    if !(up_done && down_done) {
        return Err(Error::BudgetExhausted {
            budget: opts.budget,
            partial: Box::new(curve),
        });
    }
    Ok(curve)
}

/// Adds knots for negative parameters via `angle(-p) = angle(p) + pi`.
pub fn extend_odd(curve: &AngleCurve) -> AngleCurve {
    let positive: Vec<Knot> = curve.knots.iter().copied().filter(|k| k.param > 0.0).collect();
    let mut knots: Vec<Knot> = positive
        .iter()
        .rev()
        .map(|k| {
            let angle = k.angle + PI;
            // -I(p) winds like I(p) shifted by a half turn
            let zeros = expected_zeros(curve.side, angle - PI).unwrap_or(k.zeros);
            Knot {
                param: -k.param,
                angle,
                radius: k.radius,
                zeros,
            }
        })
        .collect();
    knots.extend(positive);
    AngleCurve {
        side: curve.side,
        knots,
        theta_max: curve.theta_max,
        extended: true,
    }
}

/// Number of zeros on `(0, t0)` implied by a left winding angle:
/// `max(0, ceil((-angle - pi/2) / pi))`.
pub fn expected_zero_count(angle: f64) -> Result<usize> {
    let offset = angle - FRAC_PI_2;
    let nearest = (offset / PI).round() * PI;
    if (offset - nearest).abs() < AMBIGUITY_TOL {
        return Err(Error::AmbiguousAngle(angle));
    }
    let n = ((-angle - FRAC_PI_2) / PI).ceil();
    Ok(if n > 0.0 { n as usize } else { 0 })
}

/// Side-aware form: right angles wind the other way.
pub fn expected_zeros(side: Side, angle: f64) -> Result<usize> {
    match side {
        Side::Left => expected_zero_count(angle),
        Side::Right => expected_zero_count(-angle),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitPoint {
    pub param: f64,
    pub angle: f64,
    pub radius: f64,
    pub zeros: usize,
}

/// Largest parameter at which the curve's angle equals `target`, refined by
/// bisection on fresh shots.
pub fn exit_param(
    curve: &AngleCurve,
    target: f64,
    profile: &Profile,
    params: &OdeParams,
) -> Result<ExitPoint> {
    match curve.side {
        Side::Left if target > 0.0 => {
            return Err(Error::Config(format!(
                "left exit targets must be <= 0, got {target}"
            )))
        }
        Side::Right if target < 0.0 => {
            return Err(Error::Config(format!(
                "right exit targets must be >= 0, got {target}"
            )))
        }
        _ => {}
    }
    let knots: Vec<Knot> = curve.knots.iter().copied().filter(|k| k.param > 0.0).collect();
    let bracket = (0..knots.len().saturating_sub(1)).rev().find(|&i| {
        let (a, b) = (knots[i].angle - target, knots[i + 1].angle - target);
        a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)
    });
    let i = bracket.ok_or_else(|| {
        let (lo, hi) = curve.param_range();
        Error::NotFound(format!(
            "angle {target} not attained on [{lo}, {hi}]; increase p_max"
        ))
    })?;
    let (lo_knot, hi_knot) = (knots[i], knots[i + 1]);
    if hi_knot.angle == target {
        return Ok(ExitPoint {
            param: hi_knot.param,
            angle: hi_knot.angle,
            radius: hi_knot.radius,
            zeros: hi_knot.zeros,
        });
    }

    let side = curve.side;
    let mut lo = (lo_knot.param, lo_knot.angle, shoot(side, lo_knot.param, profile, params)?);
    let mut hi = (hi_knot.param, hi_knot.angle);
    let lo_above = lo.1 > target;
    let mut best = ExitPoint {
        param: lo_knot.param,
        angle: lo_knot.angle,
        radius: lo_knot.radius,
        zeros: lo_knot.zeros,
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo.0 + hi.0);
        if mid <= lo.0 || mid >= hi.0 {
            break;
        }
        let shot = shoot(side, mid, profile, params)?;
        let angle = lo.1 + wrap_angle(shot.raw_angle() - lo.2.raw_angle());
        best = ExitPoint {
            param: mid,
            angle,
            radius: shot.radius(),
            zeros: shot.zeros_inside,
        };
        if (angle - target).abs() <= EXIT_ANGLE_TOL {
            break;
        }
        if (angle > target) == lo_above {
            lo = (mid, angle, shot);
        } else {
            hi = (mid, angle);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyTally {
    pub checked: usize,
    pub ambiguous: usize,
    pub mismatches: usize,
    pub mismatch_params: Vec<f64>,
    /// Knots with `param > 1` breaking `a < pi/2` (left) or `b > -pi/2` (right).
    pub bound_violations: usize,
    /// Knots with `|param| >= 1e-6` whose radius is not above `1e-12`.
    pub radius_violations: usize,
}

/// Checks each knot's measured zero count against its angle, the half-plane
/// bound for params above one, and that the shooting curve avoids the origin.
pub fn consistency(curve: &AngleCurve) -> ConsistencyTally {
    let mut tally = ConsistencyTally::default();
    for k in &curve.knots {
        if k.param > 0.0 {
            match expected_zeros(curve.side, k.angle) {
                Ok(n) => {
                    tally.checked += 1;
                    if n != k.zeros {
                        tally.mismatches += 1;
                        tally.mismatch_params.push(k.param);
                    }
                }
                Err(_) => tally.ambiguous += 1,
            }
        }
        if k.param > 1.0 {
            let ok = match curve.side {
                Side::Left => k.angle < FRAC_PI_2 - 1e-9,
                Side::Right => k.angle > -FRAC_PI_2 + 1e-9,
            };
            if !ok {
                tally.bound_violations += 1;
            }
        }
        if k.param.abs() >= 1e-6 && !(k.radius > 1e-12) {
            tally.radius_violations += 1;
        }
    }
    tally
}
