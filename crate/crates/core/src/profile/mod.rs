//! Mean-curvature profiles `h(t)` on `(0, d)`.
//!
//! A profile carries its endpoint exponents `H0 = n - m1 - 1` and
//! `Hd = n - m2 - 1`, with `t h(t) -> H0` at `t = 0` and `(t - d) h(t) -> Hd`
//! at `t = d`, and a cached zero `t0` of `h`.

pub mod expr;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use expr::Expr;

/// Relative bisection tolerance for `t0`: `|h(t0)| <= TOL_ROOT_REL * d`.
pub const TOL_ROOT_REL: f64 = 1e-12;
/// Default tolerance for the measured endpoint limits.
pub const DEFAULT_ASYMPTOTIC_TOL: f64 = 1e-5;

const T0_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Model,
    #[serde(alias = "custom")]
    CustomClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub n: u32,
    pub m1: u32,
    pub m2: u32,
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

impl ProfileSpec {
    pub fn model(n: u32, m1: u32, m2: u32, d: f64) -> Self {
        Self {
            kind: ProfileKind::Model,
            n,
            m1,
            m2,
            d,
            expression: None,
        }
    }

    pub fn custom(n: u32, m1: u32, m2: u32, d: f64, expression: impl Into<String>) -> Self {
        Self {
            kind: ProfileKind::CustomClosedForm,
            n,
            m1,
            m2,
            d,
            expression: Some(expression.into()),
        }
    }

    /// Checks `n >= 3`, `0 <= m1, m2 <= n - 2` and `d > 0`.
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidSpec(format!(
                "dimension n = {} must satisfy n >= 3",
                self.n
            )));
        }
        let max_m = self.n - 2;
        if self.m1 > max_m {
            return Err(Error::InvalidSpec(format!(
                "m1 = {} violates 0 <= m1 <= n-2 = {max_m}",
                self.m1
            )));
        }
        if self.m2 > max_m {
            return Err(Error::InvalidSpec(format!(
                "m2 = {} violates 0 <= m2 <= n-2 = {max_m}",
                self.m2
            )));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "interval length d = {} must be positive",
                self.d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Evaluator {
    Model { scale: f64 },
    Custom(Expr),
}

/// A validated mean-curvature profile. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Profile {
    spec: ProfileSpec,
    evaluator: Evaluator,
    h0: f64,
    hd: f64,
    t0: Option<f64>,
}

/// Builds `h(t) = H0 s cot(s t) - Hd s tan(s t)` with `s = pi / (2d)`.
pub fn make_model_profile(n: u32, m1: u32, m2: u32, d: f64) -> Result<Profile> {
    Profile::new(ProfileSpec::model(n, m1, m2, d))
}

impl Profile {
    pub fn new(spec: ProfileSpec) -> Result<Self> {
        spec.validate()?;
        let evaluator = match spec.kind {
            ProfileKind::Model => {
                if spec.expression.is_some() {
                    return Err(Error::InvalidSpec(
                        "model profiles do not take an expression".into(),
                    ));
                }
                Evaluator::Model {
                    scale: PI / (2.0 * spec.d),
                }
            }
            ProfileKind::CustomClosedForm => {
                let src = spec.expression.as_deref().ok_or_else(|| {
                    Error::InvalidSpec("custom profile requires an expression".into())
                })?;
                Evaluator::Custom(Expr::parse(src)?)
            }
        };
        let mut profile = Self {
            h0: (spec.n - spec.m1 - 1) as f64,
            hd: (spec.n - spec.m2 - 1) as f64,
            spec,
            evaluator,
            t0: None,
        };
        profile.t0 = find_t0(&profile).ok();
        Ok(profile)
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn d(&self) -> f64 {
        self.spec.d
    }

    /// Limit of `t h(t)` at `t = 0`.
    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// Limit of `(t - d) h(t)` at `t = d`.
    pub fn hd(&self) -> f64 {
        self.hd
    }

    /// The cached sign change of `h`.
    pub fn t0(&self) -> Result<f64> {
        self.t0.ok_or_else(|| {
            Error::ProfileInvalid("h has no sign change on (0, d); t0 undefined".into())
        })
    }

    /// `h(t)` without the domain check; used on the integration hot path.
    #[inline]
    pub fn h(&self, t: f64) -> f64 {
        match &self.evaluator {
            Evaluator::Model { scale } => {
                let x = scale * t;
                let (s, c) = x.sin_cos();
                scale * (self.h0 * c / s - self.hd * s / c)
            }
            Evaluator::Custom(e) => e.eval(t, self.spec.d),
        }
    }

    pub fn eval_h(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < self.spec.d) {
            return Err(Error::Domain { t, d: self.spec.d });
        }
        Ok(self.h(t))
    }

    /// The profile seen from the other endpoint: `h*(t) = -h(d - t)`.
    pub fn reflected(&self) -> Result<Profile> {
        let spec = &self.spec;
        let spec = ProfileSpec {
            kind: spec.kind,
            n: spec.n,
            m1: spec.m2,
            m2: spec.m1,
            d: spec.d,
            expression: match &self.evaluator {
                Evaluator::Model { .. } => None,
                Evaluator::Custom(e) => Some(reflect_expr(e).to_string()),
            },
        };
        Profile::new(spec)
    }

    /// Fails unless the profile passes [`check_profile`] at default tolerances.
    pub fn require_valid(&self) -> Result<f64> {
        let report = check_profile(self, DEFAULT_ASYMPTOTIC_TOL, 256);
        if !report.passed {
            return Err(Error::ProfileInvalid(report.failures.join("; ")));
        }
        self.t0()
    }
}

fn reflect_expr(e: &Expr) -> Expr {
    fn subst(e: &Expr) -> Expr {
        match e {
            Expr::T => Expr::Sub(Box::new(Expr::D), Box::new(Expr::T)),
            Expr::Num(_) | Expr::D => e.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(subst(a))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(subst(a))),
            Expr::Add(a, b) => Expr::Add(Box::new(subst(a)), Box::new(subst(b))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(subst(a)), Box::new(subst(b))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(subst(a)), Box::new(subst(b))),
            Expr::Div(a, b) => Expr::Div(Box::new(subst(a)), Box::new(subst(b))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(subst(a)), Box::new(subst(b))),
        }
    }
    Expr::Neg(Box::new(subst(e)))
}

/// Locates the unique zero of `h` by bisection.
pub fn find_t0(profile: &Profile) -> Result<f64> {
    find_t0_with_grid(profile, T0_GRID)
}

/// [`find_t0`] with an explicit bracketing grid size.
pub fn find_t0_with_grid(profile: &Profile, grid: usize) -> Result<f64> {
    let d = profile.d();
    let grid = grid.max(4);
    let tol_root = TOL_ROOT_REL * d;

    let mut bracket = None;
    let mut prev_t = d / grid as f64;
    let mut prev_h = profile.h(prev_t);
    for i in 2..grid {
        let t = d * i as f64 / grid as f64;
        let h = profile.h(t);
        if prev_h > 0.0 && h <= 0.0 {
            bracket = Some((prev_t, t));
            break;
        }
        prev_t = t;
        prev_h = h;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::ProfileInvalid("no positive-to-negative sign change of h on the sampling grid".into())
    })?;

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let h = profile.h(mid);
        if h.abs() <= tol_root || mid <= lo || mid >= hi {
            break;
        }
        if h > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub monotone: bool,
    /// Largest sampled finite-difference `h'`; must be negative.
    pub max_derivative: f64,
    pub h0_expected: f64,
    pub h0_measured: f64,
    pub hd_expected: f64,
    pub hd_measured: f64,
    pub h0_ok: bool,
    pub hd_ok: bool,
    pub t0: Option<f64>,
    /// `h > 0` on sampled points of `(0, t0)` and `h < 0` on `(t0, d)`.
    pub sign_ok: bool,
    pub tolerance: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Samples `t h(t)` on `t = d 2^-j`, `j = 4..=20`.
pub fn left_limit_sequence(profile: &Profile) -> Vec<f64> {
    let d = profile.d();
    (4..=20)
        .map(|j| {
            let t = d * 0.5f64.powi(j);
            t * profile.h(t)
        })
        .collect()
}

/// Samples `(t - d) h(t)` on `t = d (1 - 2^-j)`, `j = 4..=20`.
pub fn right_limit_sequence(profile: &Profile) -> Vec<f64> {
    let d = profile.d();
    (4..=20)
        .map(|j| {
            let gap = d * 0.5f64.powi(j);
            let t = d - gap;
            -gap * profile.h(t)
        })
        .collect()
}

/// Two levels of Richardson extrapolation on a ratio-2 geometric sequence,
/// eliminating error terms of order `t` and `t^2`.
pub fn richardson_limit(values: &[f64]) -> f64 {
    match values.len() {
        0 => f64::NAN,
        1 => values[0],
        2 => 2.0 * values[1] - values[0],
        n => {
            let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
            let r1 = 2.0 * b - a;
            let r2 = 2.0 * c - b;
            (4.0 * r2 - r1) / 3.0
        }
    }
}

pub fn check_profile(profile: &Profile, tol: f64, n_samples: usize) -> ValidationReport {
    let d = profile.d();
    let n_samples = n_samples.max(16);
    let mut failures = Vec::new();

    let mut max_derivative = f64::NEG_INFINITY;
    let mut first_violation = None;
    for i in 0..n_samples {
        let t = d * (i as f64 + 0.5) / n_samples as f64;
        let eps = 1e-4 * t.min(d - t);
        let deriv = (profile.h(t + eps) - profile.h(t - eps)) / (2.0 * eps);
        if deriv > max_derivative || deriv.is_nan() {
            max_derivative = deriv;
        }
        if !(deriv < 0.0) && first_violation.is_none() {
            first_violation = Some(t);
        }
    }
    let monotone = first_violation.is_none();
    if let Some(t) = first_violation {
        failures.push(format!("h is not strictly decreasing near t = {t}"));
    }

    let h0_measured = richardson_limit(&left_limit_sequence(profile));
    let hd_measured = richardson_limit(&right_limit_sequence(profile));
    let h0_ok = (h0_measured - profile.h0()).abs() <= tol;
    let hd_ok = (hd_measured - profile.hd()).abs() <= tol;
    if !h0_ok {
        failures.push(format!(
            "lim t h(t) measured {h0_measured}, expected n-m1-1 = {}",
            profile.h0()
        ));
    }
    if !hd_ok {
        failures.push(format!(
            "lim (t-d) h(t) measured {hd_measured}, expected n-m2-1 = {}",
            profile.hd()
        ));
    }

    let t0 = find_t0(profile).ok();
    let sign_ok = match t0 {
        Some(t0) => (0..n_samples).all(|i| {
            let t = d * (i as f64 + 0.5) / n_samples as f64;
            let h = profile.h(t);
            let margin = 1e-9 * d;
            if t < t0 - margin {
                h > 0.0
            } else if t > t0 + margin {
                h < 0.0
            } else {
                true
            }
        }),
        None => false,
    };
    if t0.is_none() {
        failures.push("no sign change of h".into());
    } else if !sign_ok {
        failures.push("h changes sign more than once".into());
    }

    ValidationReport {
        monotone,
        max_derivative,
        h0_expected: profile.h0(),
        h0_measured,
        hd_expected: profile.hd(),
        hd_measured,
        h0_ok,
        hd_ok,
        t0,
        sign_ok,
        tolerance: tol,
        passed: failures.is_empty(),
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub n: u32,
    pub m1: u32,
    pub m2: u32,
    pub q: f64,
    pub m: u32,
    /// `(n-m+2)/(n-m-2)`; `None` when `m = n-2` (unbounded).
    pub p_g: Option<f64>,
    pub h0: f64,
    /// `q < p_G`.
    pub subcritical: bool,
    pub eq7_lhs: f64,
    pub eq7_rhs: f64,
    /// `(H0 + 1)/2 < (q + 1)/(q - 1)`.
    pub eq7: bool,
    pub passed: bool,
}

impl ExponentReport {
    pub fn p_g_value(&self) -> f64 {
        self.p_g.unwrap_or(f64::INFINITY)
    }
}

pub fn check_exponent(n: u32, m1: u32, m2: u32, q: f64) -> Result<ExponentReport> {
    if n < 3 {
        return Err(Error::InvalidSpec(format!("n = {n} must be >= 3")));
    }
    if m1 > n - 2 || m2 > n - 2 {
        return Err(Error::InvalidSpec(format!(
            "(m1, m2) = ({m1}, {m2}) violates 0 <= m1, m2 <= n-2"
        )));
    }
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::InvalidSpec(format!("q = {q} must satisfy q > 1")));
    }
    let m = m1.min(m2);
    let denom = n - m - 2;
    let p_g = (denom != 0).then(|| (n - m + 2) as f64 / denom as f64);
    let subcritical = p_g.is_none_or(|p| q < p);
    let h0 = (n - m1 - 1) as f64;
    let eq7_lhs = (h0 + 1.0) / 2.0;
    let eq7_rhs = (q + 1.0) / (q - 1.0);
    let eq7 = eq7_lhs < eq7_rhs;
    Ok(ExponentReport {
        n,
        m1,
        m2,
        q,
        m,
        p_g,
        h0,
        subcritical,
        eq7_lhs,
        eq7_rhs,
        eq7,
        passed: subcritical && eq7,
    })
}
