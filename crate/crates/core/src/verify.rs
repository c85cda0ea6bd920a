//! Independent checks of an assembled solution.
//!
//! Everything here works from the exported grid plus fresh shots; nothing
//! from the matcher's own integrations is reused.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::{self, OdeParams, State};
use crate::matcher::{self, NodalSolution, MIN_GRID_POINTS};
use crate::profile::Profile;

/// Relative deviation allowed between grid spacings before the grid is
/// treated as non-uniform.
const UNIFORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSet {
    /// Bound on the finite-difference residual, relative to
    /// `1 + max |g(u)|` over the grid.
    pub residual: f64,
    /// Bound on each component of the re-shot seam jump at `t0`.
    pub seam: f64,
    /// Bound on the estimated end slopes relative to the leading series slope.
    pub boundary_rel: f64,
    pub boundary_abs: f64,
    /// Bound on any increase of the energy along the left arc (decrease along
    /// the right arc).
    pub energy: f64,
}

impl ToleranceSet {
    pub fn for_params(params: &OdeParams) -> Self {
        Self {
            residual: 1e-6,
            seam: 1e-8,
            boundary_rel: 1e-3,
            boundary_abs: 1e-9,
            energy: 1e2 * params.tol_abs,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            residual: self.residual * factor,
            seam: self.seam * factor,
            boundary_rel: self.boundary_rel * factor,
            boundary_abs: self.boundary_abs * factor,
            energy: self.energy * factor,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual_sup: f64,
    /// `1 + max |g(u)|` over the grid; the residual bound is taken relative to it.
    pub residual_scale: f64,
    pub seam_jump: [f64; 2],
    /// Estimated `u'(0+)` and `u'(d-)`.
    pub boundary_derivative: [f64; 2],
    pub zero_count: usize,
    pub zeros: Vec<f64>,
    pub energy_violation: f64,
    pub passed: bool,
    pub failures: Vec<String>,
    pub tolerances: Option<ToleranceSet>,
}

/// Sup-norm of `D2 u + h D u + g(u)` with fourth-order central differences,
/// over grid points whose whole stencil lies in `[2 delta_left, d - 2 delta_right]`.
pub fn residual_norm(
    grid: &[State],
    profile: &Profile,
    params: &OdeParams,
    delta_left: f64,
    delta_right: f64,
) -> Result<f64> {
    let n = grid.len();
    if n < MIN_GRID_POINTS {
        return Err(Error::Resolution(format!(
            "grid has {n} points, need at least {MIN_GRID_POINTS}"
        )));
    }
    let dt = (grid[n - 1].t - grid[0].t) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Resolution("grid times must increase".into()));
    }
    for w in grid.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > UNIFORM_TOL * dt.max(1.0) {
            return Err(Error::Resolution(format!(
                "grid is not uniform near t = {}",
                w[0].t
            )));
        }
    }
    let d = profile.d();
    let (lo, hi) = (2.0 * delta_left, d - 2.0 * delta_right);
    let inv12 = 1.0 / 12.0;
    let mut sup: f64 = 0.0;
    let mut checked = 0usize;
    for i in 2..n - 2 {
        if grid[i - 2].t < lo || grid[i + 2].t > hi {
            continue;
        }
        let u = |j: usize| grid[j].u;
        let d2 = (-u(i - 2) + 16.0 * u(i - 1) - 30.0 * u(i) + 16.0 * u(i + 1) - u(i + 2))
            * inv12
            / (dt * dt);
        let d1 = (u(i - 2) - 8.0 * u(i - 1) + 8.0 * u(i + 1) - u(i + 2)) * inv12 / dt;
        let r = d2 + profile.h(grid[i].t) * d1 + ivp::reaction(u(i), params);
        if !r.is_finite() {
            return Ok(f64::INFINITY);
        }
        sup = sup.max(r.abs());
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::Resolution("no grid point outside the guard bands".into()));
    }
    Ok(sup)
}

/// `1 + max |g(u)|` over the grid.
pub fn residual_scale(grid: &[State], params: &OdeParams) -> f64 {
    1.0 + grid
        .iter()
        .map(|s| ivp::reaction(s.u, params).abs())
        .fold(0.0, f64::max)
}

/// Slopes at the first and last integrated grid points after removing the
/// leading series term; both vanish for an exact Neumann solution up to
/// higher-order terms.
fn boundary_estimates(sol: &NodalSolution, profile: &Profile, params: &OdeParams) -> Option<([f64; 2], [f64; 2])> {
    let grid = &sol.grid;
    let d = profile.d();
    let first = grid.iter().find(|s| s.t > sol.delta_left && s.t > 0.0)?;
    let last = grid.iter().rev().find(|s| s.t < d - sol.delta_right && s.t < d)?;
    let (u0, ud) = (grid.first()?.u, grid.last()?.u);

    let lead_l = ivp::reaction(u0, params) * first.t / (profile.h0() + 1.0);
    let gap = d - last.t;
    let lead_r = ivp::reaction(ud, params) * gap / (profile.hd() + 1.0);
    Some(([first.up + lead_l, last.up - lead_r], [lead_l.abs(), lead_r.abs()]))
}

/// Largest wrong-direction energy step along the grid: increases on
/// `(delta, t0]`, decreases on `[t0, d - delta)`.
pub fn energy_violation(grid: &[State], t0: f64, delta_left: f64, delta_right: f64, d: f64, params: &OdeParams) -> f64 {
    let mut worst: f64 = 0.0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.t < delta_left || b.t > d - delta_right {
            continue;
        }
        let de = ivp::energy(b.u, b.up, params) - ivp::energy(a.u, a.up, params);
        if b.t <= t0 {
            worst = worst.max(de);
        } else if a.t >= t0 {
            worst = worst.max(-de);
        }
    }
    worst
}

pub fn verify_solution(
    sol: &NodalSolution,
    profile: &Profile,
    params: &OdeParams,
    tol: &ToleranceSet,
) -> VerificationReport {
    let mut failures = Vec::new();
    let d = profile.d();

    let residual_sup = match residual_norm(&sol.grid, profile, params, sol.delta_left, sol.delta_right) {
        Ok(r) => r,
        Err(e) => {
            failures.push(format!("residual: {e}"));
            f64::INFINITY
        }
    };
    let residual_scale = residual_scale(&sol.grid, params);
    if residual_sup.is_finite() && residual_sup > tol.residual * residual_scale {
        failures.push(format!(
            "residual {residual_sup:e} exceeds {:e} x {residual_scale:e}",
            tol.residual
        ));
    }

    let seam_jump = match matcher::mismatch(sol.alpha, sol.beta_signed, profile, params) {
        Ok((du, dup)) => [du.abs(), dup.abs()],
        Err(e) => {
            failures.push(format!("seam re-shot failed: {e}"));
            [f64::INFINITY; 2]
        }
    };
    if seam_jump[0].is_finite() && seam_jump.iter().any(|&j| j > tol.seam) {
        failures.push(format!(
            "seam jump ({:e}, {:e}) exceeds {:e}",
            seam_jump[0], seam_jump[1], tol.seam
        ));
    }

    let boundary_derivative = match boundary_estimates(sol, profile, params) {
        Some((est, scale)) => {
            for (side, (e, s)) in ["left", "right"].iter().zip(est.iter().zip(scale)) {
                if e.abs() > tol.boundary_rel * s + tol.boundary_abs {
                    failures.push(format!("{side} end slope estimate {e:e} too large"));
                }
            }
            est
        }
        None => {
            failures.push("grid has no integrated points".into());
            [f64::INFINITY; 2]
        }
    };

    let zeros: Vec<f64> = ivp::hermite_zeros(&sol.grid, params.tol_abs)
        .into_iter()
        .filter(|&z| z > 0.0 && z < d)
        .collect();
    if zeros.len() != sol.k {
        failures.push(format!("found {} zeros, expected {}", zeros.len(), sol.k));
    }

    let energy_violation = energy_violation(&sol.grid, sol.t0, sol.delta_left, sol.delta_right, d, params);
    if energy_violation > tol.energy {
        failures.push(format!(
            "energy moves the wrong way by {energy_violation:e}"
        ));
    }

    VerificationReport {
        residual_sup,
        residual_scale,
        seam_jump,
        boundary_derivative,
        zero_count: zeros.len(),
        zeros,
        energy_violation,
        passed: failures.is_empty(),
        failures,
        tolerances: Some(tol.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::make_model_profile;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn coarse_grid_is_rejected() {
        let profile = make_model_profile(4, 1, 1, FRAC_PI_2).unwrap();
        let params = OdeParams::new(4.0, 3.0);
        let grid: Vec<State> = (0..1000)
            .map(|i| State::new(i as f64 * FRAC_PI_2 / 999.0, 1.0, 0.0))
            .collect();
        assert!(matches!(
            residual_norm(&grid, &profile, &params, 1e-3, 1e-3),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn nonuniform_grid_is_rejected() {
        let profile = make_model_profile(4, 1, 1, FRAC_PI_2).unwrap();
        let params = OdeParams::new(4.0, 3.0);
        let n = 3001;
        let grid: Vec<State> = (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                State::new(FRAC_PI_2 * x * x, 1.0, 0.0)
            })
            .collect();
        assert!(matches!(
            residual_norm(&grid, &profile, &params, 1e-3, 1e-3),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn constant_has_zero_residual() {
        let profile = make_model_profile(4, 1, 1, FRAC_PI_2).unwrap();
        let params = OdeParams::new(4.0, 3.0);
        let n = 2001;
        let grid: Vec<State> = (0..n)
            .map(|i| State::new(i as f64 * FRAC_PI_2 / (n - 1) as f64, -1.0, 0.0))
            .collect();
        assert_eq!(residual_norm(&grid, &profile, &params, 1e-3, 1e-3).unwrap(), 0.0);
    }
}
