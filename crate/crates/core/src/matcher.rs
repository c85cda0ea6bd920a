//! Matching `I(alpha) = F(+-beta)` at `t0` to build global solutions with a
//! prescribed number of interior zeros.
//!
//! A solution with `k` zeros comes from an intersection of the curves
//! `alpha -> (a(alpha), |I(alpha)|)` and `beta -> (b(beta) - k pi, |F(beta)|)`;
//! for odd `k` the right branch is taken at `-beta`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::{self, OdeParams, State};
use crate::profile::{check_exponent, Profile};
use crate::shooting::{self, AngleCurve, Side, SweepOptions};
use crate::verify::{self, ToleranceSet, VerificationReport};

pub const MIN_GRID_POINTS: usize = 2001;
const MAX_GRID_POINTS: usize = 400_001;
/// Target `dt * omega` for the assembled grid: balances the fourth-order
/// truncation error of the residual stencil against rounding.
const GRID_PHASE_STEP: f64 = 0.006;
/// Substep resolution of the fixed-step assembly integration.
const ASSEMBLY_RESOLUTION: f64 = 0.02;
/// Extra Newton steps taken after the match tolerance is met, kept only
/// while they reduce the mismatch.
const POLISH_STEPS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Match tolerance relative to `1 + |alpha|`.
    pub match_tol_rel: f64,
    pub max_seeds: usize,
    pub max_newton_iters: usize,
    pub theta_max: f64,
    pub budget: usize,
    /// Assembled grid size; chosen from the solution's frequency when `None`.
    pub grid_points: Option<usize>,
    pub tolerances: Option<ToleranceSet>,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            match_tol_rel: 1e-9,
            max_seeds: 32,
            max_newton_iters: 60,
            theta_max: shooting::DEFAULT_THETA_MAX,
            budget: shooting::DEFAULT_BUDGET,
            grid_points: None,
            tolerances: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchProblem {
    pub k: usize,
    pub profile: Profile,
    pub params: OdeParams,
    pub alpha_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub coarse_grid: usize,
    pub options: MatchOptions,
}

impl MatchProblem {
    pub fn new(k: usize, profile: Profile, params: OdeParams) -> Self {
        Self {
            k,
            profile,
            params,
            alpha_range: (1.0, 1e4),
            beta_range: (1.0, 1e4),
            coarse_grid: 64,
            options: MatchOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("alpha", self.alpha_range), ("beta", self.beta_range)] {
            if !(lo >= 1.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} range [{lo}, {hi}] must be nonempty with lower bound >= 1"
                )));
            }
        }
        if self.coarse_grid < 2 {
            return Err(Error::Config("coarse_grid must be at least 2".into()));
        }
        self.params.validate()
    }

    pub fn tolerances(&self) -> ToleranceSet {
        self.options
            .tolerances
            .clone()
            .unwrap_or_else(|| ToleranceSet::for_params(&self.params))
    }
}

/// A matched global solution on `[0, d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalSolution {
    pub alpha: f64,
    /// `u(d)`; carries the parity sign.
    pub beta_signed: f64,
    pub k: usize,
    pub t0: f64,
    pub delta_left: f64,
    pub delta_right: f64,
    /// `|I(alpha) - F(beta_signed)|` at acceptance.
    pub mismatch_norm: f64,
    /// Difference of the two assembled arcs at `t0`, componentwise.
    pub seam_jump: [f64; 2],
    #[serde(skip)]
    pub grid: Vec<State>,
    pub zeros: Vec<f64>,
    pub report: VerificationReport,
}

/// `I(alpha) - F(beta_signed)`.
pub fn mismatch(
    alpha: f64,
    beta_signed: f64,
    profile: &Profile,
    params: &OdeParams,
) -> Result<(f64, f64)> {
    let left = shooting::shoot_left(alpha, profile, params)?;
    let right = shooting::shoot_right(beta_signed, profile, params)?;
    Ok((left.u_t0 - right.u_t0, left.up_t0 - right.up_t0))
}

fn norm(v: (f64, f64)) -> f64 {
    v.0.hypot(v.1)
}

fn match_tol(alpha: f64, options: &MatchOptions) -> f64 {
    options.match_tol_rel * (1.0 + alpha.abs())
}

/// Parity sign applied to `beta` for a `k`-zero solution.
pub fn parity_sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub alpha: f64,
    pub beta: f64,
    pub score: f64,
}

/// Candidate `(alpha, beta)` pairs for `k` zeros, best first.
///
/// Exact crossings of the polyline `(a, |I|)` with the shifted polyline
/// `(b - k pi, |F|)` come first; coarse knot pairs with angle gap below
/// `pi/2`, ranked by angle gap plus relative radius gap, fill the rest.
pub fn seeds(left: &AngleCurve, right: &AngleCurve, k: usize, coarse_grid: usize, max_seeds: usize) -> Vec<Seed> {
    let shift = k as f64 * PI;
    let lk: Vec<_> = left.knots.iter().filter(|k| k.param >= 1.0).collect();
    let rk: Vec<_> = right.knots.iter().filter(|k| k.param >= 1.0).collect();
    let mut out: Vec<Seed> = Vec::new();

    let mut crossings = Vec::new();
    for i in 0..lk.len().saturating_sub(1) {
        let (p1, p2) = ((lk[i].angle, lk[i].radius), (lk[i + 1].angle, lk[i + 1].radius));
        for j in 0..rk.len().saturating_sub(1) {
            let q1 = (rk[j].angle - shift, rk[j].radius);
            let q2 = (rk[j + 1].angle - shift, rk[j + 1].radius);
            if let Some((s, t)) = segment_intersection(p1, p2, q1, q2) {
                let alpha = lk[i].param + s * (lk[i + 1].param - lk[i].param);
                let beta = rk[j].param + t * (rk[j + 1].param - rk[j].param);
                crossings.push(Seed {
                    alpha,
                    beta,
                    score: 0.0,
                });
            }
        }
    }
    crossings.sort_by(|a, b| (a.alpha + a.beta).total_cmp(&(b.alpha + b.beta)));
    for s in crossings {
        push_distinct(&mut out, s);
    }

    let stride = |n: usize| (n / coarse_grid.max(1)).max(1);
    let mut coarse = Vec::new();
    for l in lk.iter().step_by(stride(lk.len())) {
        for r in rk.iter().step_by(stride(rk.len())) {
            let gap = (l.angle + shift - r.angle).abs();
            if gap < 0.5 * PI {
                let rgap = (l.radius - r.radius).abs() / (1.0 + l.radius.max(r.radius));
                coarse.push(Seed {
                    alpha: l.param,
                    beta: r.param,
                    score: gap / PI + rgap,
                });
            }
        }
    }
    coarse.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.alpha.total_cmp(&b.alpha)));
    for s in coarse {
        if out.len() >= max_seeds {
            break;
        }
        push_distinct(&mut out, s);
    }
    out.truncate(max_seeds);
    out
}

fn push_distinct(out: &mut Vec<Seed>, s: Seed) {
    let close = out.iter().any(|o| {
        (o.alpha - s.alpha).abs() <= 1e-3 * o.alpha && (o.beta - s.beta).abs() <= 1e-3 * o.beta
    });
    if !close {
        out.push(s);
    }
}

/// Parameters `(s, t)` in `[0, 1]^2` where segments `p1p2` and `q1q2` meet.
fn segment_intersection(
    p1: (f64, f64),
    p2: (f64, f64),
    q1: (f64, f64),
    q2: (f64, f64),
) -> Option<(f64, f64)> {
    let r = (p2.0 - p1.0, p2.1 - p1.1);
    let s = (q2.0 - q1.0, q2.1 - q1.1);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return None;
    }
    let qp = (q1.0 - p1.0, q1.1 - p1.1);
    let a = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let b = (qp.0 * r.1 - qp.1 * r.0) / denom;
    ((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)).then_some((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub alpha: f64,
    pub beta_signed: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton iteration on the mismatch with a forward-difference
/// Jacobian; halves the step until the mismatch norm decreases.
pub fn refine(
    alpha0: f64,
    beta_signed0: f64,
    profile: &Profile,
    params: &OdeParams,
    options: &MatchOptions,
) -> Result<Root> {
    let (mut a, mut b) = (alpha0, beta_signed0);
    let mut f = mismatch(a, b, profile, params)?;
    let mut fnorm = norm(f);
    let fd_rel = params.tol_rel.max(params.tol_abs).sqrt().max(1e-7);
    let mut polish = POLISH_STEPS;
    for iter in 0..options.max_newton_iters {
        if fnorm <= match_tol(a, options) {
            if polish == 0 {
                return Ok(Root {
                    alpha: a,
                    beta_signed: b,
                    residual: fnorm,
                    iterations: iter,
                });
            }
            polish -= 1;
        }
        let ha = fd_rel * a.abs().max(1.0);
        let hb = fd_rel * b.abs().max(1.0);
        let fa = mismatch(a + ha, b, profile, params)?;
        let fb = mismatch(a, b + hb, profile, params)?;
        let j = [
            [(fa.0 - f.0) / ha, (fb.0 - f.0) / hb],
            [(fa.1 - f.1) / ha, (fb.1 - f.1) / hb],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let da = -(j[1][1] * f.0 - j[0][1] * f.1) / det;
        let db = -(-j[1][0] * f.0 + j[0][0] * f.1) / det;

        // keep |alpha|, |beta| >= 1 region and avoid sign flips
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let (na, nb) = (a + lambda * da, b + lambda * db);
            if na.abs() >= 1.0 - 1e-12 && nb.abs() >= 1.0 - 1e-12 && na.signum() == a.signum() && nb.signum() == b.signum() {
                if let Ok(nf) = mismatch(na, nb, profile, params) {
                    let nn = norm(nf);
                    if nn < fnorm {
                        a = na;
                        b = nb;
                        f = nf;
                        fnorm = nn;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if fnorm <= match_tol(a, options) {
        return Ok(Root {
            alpha: a,
            beta_signed: b,
            residual: fnorm,
            iterations: options.max_newton_iters,
        });
    }
    Err(Error::NotFound(format!(
        "Newton from ({alpha0}, {beta_signed0}) stalled at ({a}, {b}) with mismatch {fnorm:e}"
    )))
}

/// Angle curves on both sides long enough for `k` zeros.
pub fn build_curves(problem: &MatchProblem) -> Result<(AngleCurve, AngleCurve)> {
    let stop = (problem.k as f64 + 1.0) * PI;
    let opts = SweepOptions {
        theta_max: problem.options.theta_max,
        budget: problem.options.budget,
        stop_winding: Some(stop),
        ..SweepOptions::default()
    };
    let (left, right) = rayon::join(
        || {
            shooting::angle_sweep_with(
                Side::Left,
                1.0,
                problem.alpha_range.1,
                &problem.profile,
                &problem.params,
                &opts,
            )
        },
        || {
            shooting::angle_sweep_with(
                Side::Right,
                1.0,
                problem.beta_range.1,
                &problem.profile,
                &problem.params,
                &opts,
            )
        },
    );
    Ok((left?, right?))
}

fn check_preconditions(problem: &MatchProblem) -> Result<()> {
    problem.validate()?;
    let spec = problem.profile.spec();
    let report = check_exponent(spec.n, spec.m1, spec.m2, problem.params.q)?;
    if !report.passed {
        return Err(Error::Exponent {
            q: problem.params.q,
            p_g: report.p_g_value(),
            n: spec.n,
            m: report.m,
        });
    }
    problem.profile.require_valid()?;
    Ok(())
}

/// First verified solution with exactly `k` zeros.
pub fn find_nodal(problem: &MatchProblem) -> Result<NodalSolution> {
    let mut all = search(problem, false)?;
    Ok(all.remove(0))
}

/// Every distinct verified solution reachable from the seed set.
pub fn find_nodal_all(problem: &MatchProblem) -> Result<Vec<NodalSolution>> {
    search(problem, true)
}

fn search(problem: &MatchProblem, all_roots: bool) -> Result<Vec<NodalSolution>> {
    check_preconditions(problem)?;
    let (profile, params) = (&problem.profile, &problem.params);
    let k = problem.k;
    if k == 0 {
        let mut sol = assemble_with(1.0, 1.0, profile, params, &problem.options)?;
        sol.k = 0;
        sol.report = verify::verify_solution(&sol, profile, params, &problem.tolerances());
        return Ok(vec![sol]);
    }

    let (left, right) = build_curves(problem)?;
    let seeds = seeds(&left, &right, k, problem.coarse_grid, problem.options.max_seeds);
    if seeds.is_empty() {
        return Err(Error::NotFound(format!(
            "no seed pairs for k = {k}: left angle reached {:.3} pi at alpha = {:.4}, right reached {:.3} pi at beta = {:.4}",
            left.knots.last().map_or(0.0, |k| k.angle / PI),
            left.param_range().1,
            right.knots.last().map_or(0.0, |k| k.angle / PI),
            right.param_range().1,
        )));
    }
    let sign = parity_sign(k);
    let batch = rayon::current_num_threads().max(1);
    let mut accepted: Vec<NodalSolution> = Vec::new();
    let mut nearest = f64::INFINITY;

    for chunk in seeds.chunks(batch) {
        let outcomes: Vec<Result<NodalSolution>> = chunk
            .par_iter()
            .map(|seed| {
                let root = refine(seed.alpha, sign * seed.beta, profile, params, &problem.options)?;
                let mut sol = assemble_with(root.alpha, root.beta_signed, profile, params, &problem.options)?;
                sol.mismatch_norm = root.residual;
                let found = sol.k;
                sol.k = k;
                sol.report = verify::verify_solution(&sol, profile, params, &problem.tolerances());
                if found != k {
                    return Err(Error::NotFound(format!(
                        "root ({}, {}) has {found} zeros, not {k}",
                        root.alpha, root.beta_signed
                    )));
                }
                Ok(sol)
            })
            .collect();
        for outcome in outcomes {
            match outcome {
                Ok(sol) => {
                    let dup = accepted.iter().any(|o| {
                        (o.alpha - sol.alpha).hypot(o.beta_signed - sol.beta_signed) <= 1e-6
                    });
                    if !dup {
                        accepted.push(sol);
                    }
                }
                Err(Error::NotFound(msg)) => {
                    if let Some(v) = msg
                        .rsplit("mismatch ")
                        .next()
                        .and_then(|s| s.parse::<f64>().ok())
                    {
                        nearest = nearest.min(v);
                    }
                }
                Err(_) => {}
            }
        }
        if !accepted.is_empty() && !all_roots {
            break;
        }
    }
    if accepted.is_empty() {
        return Err(Error::NotFound(format!(
            "no seed converged to a {k}-zero solution ({} seeds tried, nearest mismatch {nearest:e})",
            seeds.len()
        )));
    }
    Ok(accepted)
}

/// Grid size for a solution whose largest amplitude is `amplitude`.
pub fn auto_grid_points(d: f64, amplitude: f64, params: &OdeParams) -> usize {
    let omega = (1.0 + ivp::reaction_derivative(amplitude, params).abs()).sqrt();
    let n = (d * omega / GRID_PHASE_STEP).ceil() as usize + 1;
    n.clamp(MIN_GRID_POINTS, MAX_GRID_POINTS)
}

pub fn assemble(alpha: f64, beta_signed: f64, profile: &Profile, params: &OdeParams) -> Result<NodalSolution> {
    assemble_with(alpha, beta_signed, profile, params, &MatchOptions::default())
}

/// Glues the left arc on `[0, t0]` and the right arc on `[t0, d]` into one
/// uniform grid. Both arcs are carried a little past `t0` and blended with a
/// quintic smoothstep so the grid stays smooth across the seam.
pub fn assemble_with(
    alpha: f64,
    beta_signed: f64,
    profile: &Profile,
    params: &OdeParams,
    options: &MatchOptions,
) -> Result<NodalSolution> {
    let t0 = profile.t0()?;
    let d = profile.d();
    let n = options.grid_points.unwrap_or_else(|| {
        auto_grid_points(d, alpha.abs().max(beta_signed.abs()).max(1.0), params)
    });
    if n < MIN_GRID_POINTS {
        return Err(Error::Resolution(format!(
            "grid of {n} points is below the minimum {MIN_GRID_POINTS}"
        )));
    }
    let dt = d / (n - 1) as f64;
    let times: Vec<f64> = (0..n).map(|i| if i == n - 1 { d } else { i as f64 * dt }).collect();

    let start_l = ivp::step_off_left(alpha, profile, params)?;
    let start_r = ivp::step_off_right(beta_signed, profile, params)?;
    let (delta_l, delta_r) = (start_l.t, d - start_r.t);
    let w = 0.2 * t0.min(d - t0);
    let (blend_lo, blend_hi) = (t0 - w, t0 + w);

    // left arc: grid points in [delta_l, blend_hi] plus t0 itself
    let mut left_targets: Vec<f64> = times
        .iter()
        .copied()
        .filter(|&t| t > delta_l && t <= blend_hi)
        .collect();
    let seam_pos = left_targets.partition_point(|&t| t < t0);
    left_targets.insert(seam_pos, t0);
    let mut left_arc = ivp::integrate_fixed(start_l, &left_targets, profile, params, ASSEMBLY_RESOLUTION)?;
    let seam_l = left_arc.remove(seam_pos);

    let mut right_targets: Vec<f64> = times
        .iter()
        .rev()
        .copied()
        .filter(|&t| t < d - delta_r && t >= blend_lo)
        .collect();
    let seam_pos_r = right_targets.partition_point(|&t| t > t0);
    right_targets.insert(seam_pos_r, t0);
    let mut right_arc = ivp::integrate_fixed(start_r, &right_targets, profile, params, ASSEMBLY_RESOLUTION)?;
    let seam_r = right_arc.remove(seam_pos_r);
    right_arc.reverse();

    let seam_jump = [(seam_l.u - seam_r.u).abs(), (seam_l.up - seam_r.up).abs()];
    let jump = seam_jump[0].max(seam_jump[1]);
    let tolerances = options
        .tolerances
        .clone()
        .unwrap_or_else(|| ToleranceSet::for_params(params));
    let seam_limit = tolerances.seam.max(10.0 * match_tol(alpha, options));
    if !(jump <= seam_limit) {
        return Err(Error::Assembly {
            jump,
            tol: seam_limit,
        });
    }

    let lookup = |arc: &[State], t: f64| -> Option<State> {
        arc.binary_search_by(|s| s.t.total_cmp(&t)).ok().map(|i| arc[i])
    };
    let mut grid = Vec::with_capacity(n);
    for &t in &times {
        let s = if t <= delta_l {
            ivp::series_left(alpha, t, profile, params)
        } else if t >= d - delta_r {
            ivp::series_right(beta_signed, d - t, profile, params)
        } else if t < blend_lo {
            lookup(&left_arc, t).expect("left arc covers grid")
        } else if t > blend_hi {
            lookup(&right_arc, t).expect("right arc covers grid")
        } else {
            let l = lookup(&left_arc, t).expect("left arc covers blend");
            let r = lookup(&right_arc, t).expect("right arc covers blend");
            let chi = smoothstep((t - blend_lo) / (blend_hi - blend_lo));
            State::new(t, (1.0 - chi) * l.u + chi * r.u, (1.0 - chi) * l.up + chi * r.up)
        };
        grid.push(State::new(t, s.u, s.up));
    }
    grid[0].up = 0.0;
    grid[n - 1].up = 0.0;

    let zeros: Vec<f64> = ivp::hermite_zeros(&grid, params.tol_abs)
        .into_iter()
        .filter(|&z| z > 0.0 && z < d)
        .collect();
    let mut sol = NodalSolution {
        alpha,
        beta_signed,
        k: zeros.len(),
        t0,
        delta_left: delta_l,
        delta_right: delta_r,
        mismatch_norm: norm(mismatch(alpha, beta_signed, profile, params)?),
        seam_jump,
        grid,
        zeros,
        report: VerificationReport::default(),
    };
    sol.report = verify::verify_solution(&sol, profile, params, &tolerances);
    Ok(sol)
}

/// `6x^5 - 15x^4 + 10x^3` on `[0, 1]`.
fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::make_model_profile;
    use std::f64::consts::FRAC_PI_2;

    fn a1() -> (Profile, OdeParams) {
        (
            make_model_profile(4, 1, 1, FRAC_PI_2).unwrap(),
            OdeParams::new(4.0, 3.0),
        )
    }

    #[test]
    fn mismatch_at_constant_solution_vanishes() {
        let (profile, params) = a1();
        let m = mismatch(1.0, 1.0, &profile, &params).unwrap();
        assert!(norm(m) < 1e-9);
    }

    #[test]
    fn mismatch_is_odd() {
        let (profile, params) = a1();
        let m = mismatch(3.0, 2.0, &profile, &params).unwrap();
        let n = mismatch(-3.0, -2.0, &profile, &params).unwrap();
        assert!((m.0 + n.0).abs() < 1e-12 && (m.1 + n.1).abs() < 1e-12);
    }

    #[test]
    fn symmetric_mismatch_is_twice_derivative() {
        let (profile, params) = a1();
        let alpha = 2.7;
        let m = mismatch(alpha, alpha, &profile, &params).unwrap();
        let l = shooting::shoot_left(alpha, &profile, &params).unwrap();
        assert!(m.0.abs() < 1e-8);
        assert!((m.1 - 2.0 * l.up_t0).abs() < 1e-8);
    }

    #[test]
    fn constant_assembly() {
        let (profile, params) = a1();
        let sol = assemble(1.0, 1.0, &profile, &params).unwrap();
        assert_eq!(sol.k, 0);
        assert!(sol.grid.iter().all(|s| (s.u - 1.0).abs() < 1e-12));
        assert!(sol.report.passed, "{:?}", sol.report.failures);
    }

    #[test]
    fn seam_jump_rejected() {
        let (profile, params) = a1();
        assert!(matches!(
            assemble(1.0, 1.01, &profile, &params),
            Err(Error::Assembly { .. })
        ));
    }

    #[test]
    fn segment_crossing() {
        let hit = segment_intersection((0.0, 0.0), (2.0, 2.0), (0.0, 2.0), (2.0, 0.0)).unwrap();
        assert!((hit.0 - 0.5).abs() < 1e-15 && (hit.1 - 0.5).abs() < 1e-15);
        assert!(segment_intersection((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)).is_none());
    }

    #[test]
    fn k0_returns_constant() {
        let (profile, params) = a1();
        let sol = find_nodal(&MatchProblem::new(0, profile, params)).unwrap();
        assert_eq!((sol.alpha, sol.beta_signed, sol.k), (1.0, 1.0, 0));
        assert!(sol.zeros.is_empty());
    }

    #[test]
    fn exponent_gate() {
        let profile = make_model_profile(4, 1, 1, FRAC_PI_2).unwrap();
        let problem = MatchProblem::new(1, profile, OdeParams::new(4.0, 5.0));
        match find_nodal(&problem) {
            Err(Error::Exponent { p_g, .. }) => assert_eq!(p_g, 5.0),
            other => panic!("expected exponent failure, got {other:?}"),
        }
    }

    #[test]
    fn smoothstep_endpoints() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(0.5), 0.5);
    }
}
