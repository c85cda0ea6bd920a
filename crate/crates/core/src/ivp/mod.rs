//! Singular initial value problems for
//! `u'' + h(t) u' + lambda u (|u|^(q-1) - 1) = 0`
//! started at either endpoint of `(0, d)`.

pub mod dopri;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use dopri::Vec2;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeParams {
    pub lambda: f64,
    pub q: f64,
    #[serde(default = "default_tol")]
    pub tol_abs: f64,
    #[serde(default = "default_tol")]
    pub tol_rel: f64,
    /// Fixed step-off radius; chosen per shot when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl OdeParams {
    pub fn new(lambda: f64, q: f64) -> Self {
        Self {
            lambda,
            q,
            tol_abs: DEFAULT_TOL,
            tol_rel: DEFAULT_TOL,
            delta: None,
        }
    }

    pub fn with_tolerances(mut self, tol_abs: f64, tol_rel: f64) -> Self {
        self.tol_abs = tol_abs;
        self.tol_rel = tol_rel;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda = {} must be > 0", self.lambda)));
        }
        if !(self.q > 1.0 && self.q.is_finite()) {
            return Err(Error::Config(format!("q = {} must be > 1", self.q)));
        }
        if !(self.tol_abs > 0.0 && self.tol_rel > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if let Some(delta) = self.delta {
            if !(delta > 0.0) {
                return Err(Error::Config(format!("delta = {delta} must be > 0")));
            }
        }
        Ok(())
    }

    /// Step-off radius for initial value `value` on a side whose distance to
    /// the matching point is `span`.
    ///
    /// Without an explicit `delta` this is
    /// `min(span / 100, tol_abs^(1/4) / sqrt(1 + |g'(value)|))`: the series
    /// truncation error scales like `(delta / l)^4` with `l` the local
    /// oscillation length `1 / sqrt(|g'|)`.
    pub fn step_off_radius(&self, value: f64, span: f64) -> f64 {
        if let Some(delta) = self.delta {
            return delta;
        }
        let scale = 1.0 / (1.0 + reaction_derivative(value, self).abs()).sqrt();
        (span / 100.0).min(self.tol_abs.powf(0.25) * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub u: f64,
    pub up: f64,
}

impl State {
    pub fn new(t: f64, u: f64, up: f64) -> Self {
        Self { t, u, up }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.up.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// An integrated arc stored in increasing time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub zeros: Vec<f64>,
    pub energy: Vec<f64>,
    /// State at the requested end time.
    pub terminal: State,
}

impl Trajectory {
    /// Builds a trajectory from externally produced samples, locating zeros by
    /// cubic Hermite interpolation of `(u, u')` between samples.
    pub fn from_samples(samples: Vec<State>, params: &OdeParams) -> Self {
        let energy = samples.iter().map(|s| energy(s.u, s.up, params)).collect();
        let zeros = hermite_zeros(&samples, params.tol_abs);
        let terminal = samples.last().copied().unwrap_or(State::new(0.0, 0.0, 0.0));
        Self {
            samples,
            zeros,
            energy,
            terminal,
        }
    }

    pub fn span(&self) -> (f64, f64) {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (a.t, b.t),
            _ => (f64::NAN, f64::NAN),
        }
    }
}

/// `g(u) = lambda u (|u|^(q-1) - 1)`.
#[inline]
pub fn reaction(u: f64, params: &OdeParams) -> f64 {
    params.lambda * u * (abs_pow(u, params.q - 1.0) - 1.0)
}

/// `g'(u) = lambda (q |u|^(q-1) - 1)`.
#[inline]
pub fn reaction_derivative(u: f64, params: &OdeParams) -> f64 {
    params.lambda * (params.q * abs_pow(u, params.q - 1.0) - 1.0)
}

/// `|u|^p` for `p > 0`, with the `u = 0` limit pinned to zero.
#[inline]
fn abs_pow(u: f64, p: f64) -> f64 {
    let a = u.abs();
    if a == 0.0 {
        0.0
    } else if p.fract() == 0.0 && p <= 64.0 {
        a.powi(p as i32)
    } else {
        (p * a.ln()).exp()
    }
}

/// `E = u'^2/2 + lambda (|u|^(q+1)/(q+1) - u^2/2)`; along solutions
/// `dE/dt = -h(t) u'^2`.
#[inline]
pub fn energy(u: f64, up: f64, params: &OdeParams) -> f64 {
    let q1 = params.q + 1.0;
    0.5 * up * up + params.lambda * (abs_pow(u, q1) / q1 - 0.5 * u * u)
}

fn series_state(value: f64, exponent: f64, delta: f64, params: &OdeParams) -> (f64, f64) {
    let g = reaction(value, params);
    let u = value - g * delta * delta / (2.0 * (exponent + 1.0));
    let up = -g * delta / (exponent + 1.0);
    (u, up)
}

/// Second-order series for `u(0) = alpha`, `u'(0) = 0`, evaluated at `t = delta`.
pub fn step_off_left(alpha: f64, profile: &Profile, params: &OdeParams) -> Result<State> {
    let t0 = profile.t0()?;
    let delta = params.step_off_radius(alpha, t0);
    if !(delta > 0.0 && delta < t0) {
        return Err(Error::Config(format!(
            "step-off radius {delta} must lie in (0, t0 = {t0})"
        )));
    }
    let (u, up) = series_state(alpha, profile.h0(), delta, params);
    Ok(State::new(delta, u, up))
}

/// Mirror of [`step_off_left`] for `u(d) = beta`, `u'(d) = 0`, evaluated at
/// `t = d - delta`. The derivative changes sign under `t -> d - t`.
pub fn step_off_right(beta: f64, profile: &Profile, params: &OdeParams) -> Result<State> {
    let t0 = profile.t0()?;
    let d = profile.d();
    let span = d - t0;
    let delta = params.step_off_radius(beta, span);
    if !(delta > 0.0 && delta < span) {
        return Err(Error::Config(format!(
            "step-off radius {delta} must lie in (0, d - t0 = {span})"
        )));
    }
    let (u, up) = series_state(beta, profile.hd(), delta, params);
    Ok(State::new(d - delta, u, -up))
}

/// Series values on `[0, delta]` (left) used to extend integrated arcs to
/// the endpoint.
pub fn series_left(alpha: f64, t: f64, profile: &Profile, params: &OdeParams) -> State {
    let (u, up) = series_state(alpha, profile.h0(), t, params);
    State::new(t, u, up)
}

/// Series values near `d`; `gap = d - t`.
pub fn series_right(beta: f64, gap: f64, profile: &Profile, params: &OdeParams) -> State {
    let (u, up) = series_state(beta, profile.hd(), gap, params);
    State::new(profile.d() - gap, u, -up)
}

fn rhs<'a>(profile: &'a Profile, params: &'a OdeParams) -> impl Fn(f64, Vec2) -> Vec2 + 'a {
    move |t, y| [y[1], -profile.h(t) * y[1] - reaction(y[0], params)]
}

fn check_interior(t: f64, profile: &Profile) -> Result<()> {
    let d = profile.d();
    if !(t > 0.0 && t < d) {
        return Err(Error::Domain { t, d });
    }
    Ok(())
}

/// Adaptive Dormand–Prince integration with zero events and energy samples.
pub fn integrate(
    start: State,
    t_end: f64,
    profile: &Profile,
    params: &OdeParams,
    direction: Direction,
) -> Result<Trajectory> {
    check_interior(start.t, profile)?;
    check_interior(t_end, profile)?;
    if !start.is_finite() {
        return Err(Error::Divergence { last: start });
    }
    let sign = direction.sign();
    let span = t_end - start.t;
    if span * sign < 0.0 {
        return Err(Error::Config(format!(
            "direction {direction:?} inconsistent with t = {} -> {t_end}",
            start.t
        )));
    }

    let f = rhs(profile, params);
    let (atol, rtol) = (params.tol_abs, params.tol_rel);
    let h_min = 1e3 * f64::EPSILON * profile.d();

    let mut samples = vec![start];
    let mut energies = vec![energy(start.u, start.up, params)];
    let mut zeros: Vec<f64> = Vec::new();

    let mut t = start.t;
    let mut y = [start.u, start.up];
    if span == 0.0 {
        return Ok(Trajectory {
            samples,
            zeros,
            energy: energies,
            terminal: start,
        });
    }
    let mut k1 = f(t, y);
    let mut h = dopri::initial_step(&f, t, y, k1, span, atol, rtol);
    let mut last_sign = y[0].signum_or_zero();
    let mut rejected = false;

    while (t_end - t) * sign > 0.0 {
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        if h_try < h_min && !last {
            return Err(Error::StepUnderflow {
                last: State::new(t, y[0], y[1]),
            });
        }
        let s = dopri::step(&f, t, y, k1, sign * h_try);
        let err = if s.is_finite() {
            s.error_norm(atol, rtol)
        } else {
            f64::INFINITY
        };
        if !err.is_finite() && h_try < h_min {
            return Err(Error::Divergence {
                last: State::new(t, y[0], y[1]),
            });
        }
        if err <= 1.0 {
            let t_new = if last { t_end } else { t + sign * h_try };
            // zero events on the dense output
            let new_sign = s.y1[0].signum_or_zero();
            if y[0] != 0.0 && new_sign != 0.0 && new_sign != last_sign {
                let tz = locate_zero(&s);
                push_zero(&mut zeros, tz, atol);
            } else if new_sign == 0.0 {
                push_zero(&mut zeros, t_new, atol);
            }
            if new_sign != 0.0 {
                last_sign = new_sign;
            }

            t = t_new;
            y = s.y1;
            k1 = s.k7;
            samples.push(State::new(t, y[0], y[1]));
            energies.push(energy(y[0], y[1], params));

            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = h_try * if rejected { fac.min(1.0) } else { fac };
            rejected = false;
        } else {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).max(0.2)
            } else {
                0.2
            };
            h = h_try * fac;
            rejected = true;
            if h < h_min {
                return Err(Error::StepUnderflow {
                    last: State::new(t, y[0], y[1]),
                });
            }
        }
    }

    let terminal = State::new(t_end, y[0], y[1]);
    if direction == Direction::Backward {
        samples.reverse();
        energies.reverse();
        zeros.reverse();
    }
    Ok(Trajectory {
        samples,
        zeros,
        energy: energies,
        terminal,
    })
}

/// Terminal state only, skipping sample storage bookkeeping for callers
/// that need `(u, u')` at the end and the zero count.
pub fn integrate_to(
    start: State,
    t_end: f64,
    profile: &Profile,
    params: &OdeParams,
) -> Result<(State, usize)> {
    let direction = if t_end >= start.t {
        Direction::Forward
    } else {
        Direction::Backward
    };
    let traj = integrate(start, t_end, profile, params, direction)?;
    Ok((traj.terminal, traj.zeros.len()))
}

trait SignumOrZero {
    fn signum_or_zero(self) -> f64;
}

impl SignumOrZero for f64 {
    fn signum_or_zero(self) -> f64 {
        if self > 0.0 {
            1.0
        } else if self < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

fn push_zero(zeros: &mut Vec<f64>, tz: f64, merge_tol: f64) {
    if let Some(&prev) = zeros.last() {
        if (tz - prev).abs() <= merge_tol {
            return;
        }
    }
    zeros.push(tz);
}

/// Bisection on the continuous extension; at most 60 halvings.
fn locate_zero(s: &dopri::Step) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let f_lo = s.y0[0];
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = s.dense(mid)[0];
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (v > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    s.t + 0.5 * (lo + hi) * s.h
}

/// Zeros of the cubic Hermite interpolant through consecutive samples.
pub fn hermite_zeros(samples: &[State], merge_tol: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.u == 0.0 {
            push_zero(&mut zeros, a.t, merge_tol);
            continue;
        }
        if b.u == 0.0 || (a.u > 0.0) == (b.u > 0.0) {
            continue;
        }
        let dt = b.t - a.t;
        let eval = |theta: f64| -> f64 {
            let t2 = theta * theta;
            let t3 = t2 * theta;
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + theta;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            h00 * a.u + h10 * dt * a.up + h01 * b.u + h11 * dt * b.up
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = eval(mid);
            if (v > 0.0) == (a.u > 0.0) && v != 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        push_zero(&mut zeros, a.t + 0.5 * (lo + hi) * dt, merge_tol);
    }
    if let Some(last) = samples.last() {
        if last.u == 0.0 && samples.len() > 1 {
            push_zero(&mut zeros, last.t, merge_tol);
        }
    }
    zeros
}

/// Number of located zeros strictly inside `(a, b)`.
pub fn count_zeros(traj: &Trajectory, a: f64, b: f64) -> usize {
    traj.zeros.iter().filter(|&&z| z > a && z < b).count()
}

/// Fixed-step Dormand–Prince integration that lands exactly on each target
/// time. Substeps per interval are bounded by the local stiffness scale
/// `|h(t)| + sqrt(|g'(u)|)` so the global error varies smoothly along the
/// targets, which keeps finite differences of the output clean.
pub fn integrate_fixed(
    start: State,
    targets: &[f64],
    profile: &Profile,
    params: &OdeParams,
    resolution: f64,
) -> Result<Vec<State>> {
    check_interior(start.t, profile)?;
    let f = rhs(profile, params);
    let mut out = Vec::with_capacity(targets.len());
    let mut t = start.t;
    let mut y = [start.u, start.up];
    for &target in targets {
        check_interior(target, profile)?;
        let span = target - t;
        if span != 0.0 {
            let rate = 1.0 + profile.h(t).abs() + reaction_derivative(y[0], params).abs().sqrt();
            let m = ((span.abs() * rate / resolution).ceil() as usize).max(1);
            let hs = span / m as f64;
            for i in 0..m {
                let ti = t + i as f64 * hs;
                let s = dopri::step(&f, ti, y, f(ti, y), hs);
                if !s.is_finite() {
                    return Err(Error::Divergence {
                        last: State::new(ti, y[0], y[1]),
                    });
                }
                y = s.y1;
            }
            t = target;
        }
        out.push(State::new(target, y[0], y[1]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::make_model_profile;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn a1() -> (Profile, OdeParams) {
        (
            make_model_profile(4, 1, 1, FRAC_PI_2).unwrap(),
            OdeParams::new(4.0, 3.0),
        )
    }

    #[test]
    fn reaction_examples() {
        let p = OdeParams::new(1.0, 3.0);
        assert_eq!(reaction(1.0, &p), 0.0);
        assert_eq!(reaction(0.0, &p), 0.0);
        assert_eq!(reaction(-1.0, &p), 0.0);
        assert_eq!(reaction(2.0, &p), 6.0);
        let p = OdeParams::new(2.5, 2.5);
        for u in [0.3, 1.7, 4.0] {
            assert!((reaction(-u, &p) + reaction(u, &p)).abs() < 1e-14);
        }
        assert_eq!(reaction(1.0, &p), 0.0);
    }

    #[test]
    fn energy_examples() {
        let p = OdeParams::new(4.0, 3.0);
        assert_eq!(energy(0.0, 0.0, &p), 0.0);
        assert_eq!(energy(1.0, 0.0, &p), -1.0);
    }

    #[test]
    fn params_validation() {
        assert!(OdeParams::new(4.0, 3.0).validate().is_ok());
        assert!(OdeParams::new(0.0, 3.0).validate().is_err());
        assert!(OdeParams::new(1.0, 1.0).validate().is_err());
        assert!(OdeParams::new(1.0, 2.0).with_delta(-1.0).validate().is_err());
    }

    #[test]
    fn step_off_examples() {
        let profile = make_model_profile(4, 1, 1, FRAC_PI_2).unwrap();
        let params = OdeParams::new(1.0, 3.0).with_delta(0.01);
        let s = step_off_left(2.0, &profile, &params).unwrap();
        assert!((s.u - (2.0 - 1e-4)).abs() < 1e-15);
        assert!((s.up + 0.02).abs() < 1e-15);
        assert_eq!(s.t, 0.01);

        let s = step_off_left(1.0, &profile, &params).unwrap();
        assert_eq!((s.u, s.up), (1.0, 0.0));
        let s = step_off_left(0.0, &profile, &params).unwrap();
        assert_eq!((s.u, s.up), (0.0, 0.0));

        let s = step_off_right(2.0, &profile, &params).unwrap();
        assert!((s.t - (FRAC_PI_2 - 0.01)).abs() < 1e-15);
        assert!((s.u - (2.0 - 1e-4)).abs() < 1e-15);
        assert!((s.up - 0.02).abs() < 1e-15);
        let s = step_off_right(-2.0, &profile, &params).unwrap();
        assert!((s.u + (2.0 - 1e-4)).abs() < 1e-15);
        assert!((s.up + 0.02).abs() < 1e-15);
        let s = step_off_right(1.0, &profile, &params).unwrap();
        assert_eq!((s.u, s.up), (1.0, 0.0));
    }

    #[test]
    fn step_off_rejects_large_delta() {
        let (profile, params) = a1();
        let params = params.with_delta(1.0);
        assert!(matches!(
            step_off_left(2.0, &profile, &params),
            Err(Error::Config(_))
        ));
        assert!(step_off_right(2.0, &profile, &params).is_err());
    }

    #[test]
    fn auto_delta_shrinks_with_amplitude() {
        let (_, params) = a1();
        let d1 = params.step_off_radius(1.0, PI / 4.0);
        let d10 = params.step_off_radius(10.0, PI / 4.0);
        assert!(d10 < d1 && d1 <= PI / 400.0);
    }

    #[test]
    fn constant_solution_is_preserved() {
        let (profile, params) = a1();
        let start = step_off_left(1.0, &profile, &params).unwrap();
        let traj = integrate(start, PI / 4.0, &profile, &params, Direction::Forward).unwrap();
        assert!((traj.terminal.u - 1.0).abs() <= 10.0 * params.tol_abs);
        assert!(traj.terminal.up.abs() <= 10.0 * params.tol_abs);
        assert!(traj.zeros.is_empty());
    }

    #[test]
    fn round_trip_returns_start() {
        // Backward integration into the singular endpoint amplifies the
        // singular mode, so the round trip starts from an interior state.
        let (profile, params) = a1();
        let off = step_off_left(2.5, &profile, &params).unwrap();
        let start = integrate(off, 0.2, &profile, &params, Direction::Forward)
            .unwrap()
            .terminal;
        let fwd = integrate(start, PI / 4.0, &profile, &params, Direction::Forward).unwrap();
        let back = integrate(fwd.terminal, start.t, &profile, &params, Direction::Backward).unwrap();
        assert!((back.terminal.u - start.u).abs() <= 100.0 * params.tol_abs);
        assert!((back.terminal.up - start.up).abs() <= 100.0 * params.tol_abs);
        assert_eq!(fwd.zeros.len(), back.zeros.len());
        assert!(back.samples.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn direction_mismatch_and_domain_errors() {
        let (profile, params) = a1();
        let start = step_off_left(2.0, &profile, &params).unwrap();
        assert!(integrate(start, 0.5, &profile, &params, Direction::Backward).is_err());
        assert!(integrate(start, FRAC_PI_2, &profile, &params, Direction::Forward).is_err());
    }

    #[test]
    fn zeros_are_counted_and_simple() {
        let (profile, params) = a1();
        let start = step_off_left(6.0, &profile, &params).unwrap();
        let traj = integrate(start, PI / 4.0, &profile, &params, Direction::Forward).unwrap();
        assert!(!traj.zeros.is_empty());
        assert!(traj.zeros.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(count_zeros(&traj, 0.0, PI / 4.0), traj.zeros.len());
        assert_eq!(count_zeros(&traj, 0.0, traj.zeros[0]), 0);
    }

    #[test]
    fn cosine_samples_have_three_zeros() {
        let params = OdeParams::new(1.0, 3.0);
        let samples: Vec<State> = (1..400)
            .map(|i| {
                let t = PI * i as f64 / 400.0;
                State::new(t, (3.0 * t).cos(), -3.0 * (3.0 * t).sin())
            })
            .collect();
        let traj = Trajectory::from_samples(samples, &params);
        assert_eq!(count_zeros(&traj, 0.0, PI), 3);
        for (z, expected) in traj.zeros.iter().zip([PI / 6.0, PI / 2.0, 5.0 * PI / 6.0]) {
            assert!((z - expected).abs() < 1e-8);
        }
        let flat = Trajectory::from_samples(
            (1..50).map(|i| State::new(i as f64 * 0.01, 1.0, 0.0)).collect(),
            &params,
        );
        assert_eq!(count_zeros(&flat, 0.0, 1.0), 0);
    }

    #[test]
    fn fixed_step_agrees_with_adaptive() {
        let (profile, params) = a1();
        let start = step_off_left(3.0, &profile, &params).unwrap();
        let targets: Vec<f64> = (1..=50).map(|i| start.t + (PI / 4.0 - start.t) * i as f64 / 50.0).collect();
        let fixed = integrate_fixed(start, &targets, &profile, &params, 0.02).unwrap();
        let adaptive = integrate(start, PI / 4.0, &profile, &params, Direction::Forward).unwrap();
        let end = fixed.last().unwrap();
        assert!((end.u - adaptive.terminal.u).abs() < 1e-8);
        assert!((end.up - adaptive.terminal.up).abs() < 1e-7);
    }
}
