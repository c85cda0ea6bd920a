//! Run configuration: one TOML file plus `section.key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::OdeParams;
use crate::matcher::MatchOptions;
use crate::profile::{expr, ProfileKind, ProfileSpec};
use crate::shooting::{DEFAULT_BUDGET, DEFAULT_P_MIN, DEFAULT_THETA_MAX};
use crate::verify::ToleranceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Profile,
    Shoot,
    SweepAngles,
    Match,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Profile => "profile",
            Task::Shoot => "shoot",
            Task::SweepAngles => "sweep-angles",
            Task::Match => "match",
            Task::Verify => "verify",
        }
    }
}

/// A length given either as a number or as a constant expression such as
/// `"pi/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Value(f64),
    Expr(String),
}

impl Length {
    pub fn value(&self) -> Result<f64> {
        match self {
            Length::Value(v) => Ok(*v),
            Length::Expr(s) => expr::eval_const(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    #[serde(default = "default_kind")]
    pub kind: ProfileKind,
    pub n: u32,
    pub m1: u32,
    pub m2: u32,
    pub d: Length,
    #[serde(default)]
    pub expression: Option<String>,
}

fn default_kind() -> ProfileKind {
    ProfileKind::Model
}

impl ProfileSection {
    pub fn to_spec(&self) -> Result<ProfileSpec> {
        Ok(ProfileSpec {
            kind: self.kind,
            n: self.n,
            m1: self.m1,
            m2: self.m2,
            d: self.d.value()?,
            expression: self.expression.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootSection {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Also write each shot's trajectory.
    pub trajectories: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub theta_max: f64,
    pub budget: usize,
    /// Stop once the winding exceeds this many half-turns (multiples of pi).
    pub stop_half_turns: Option<f64>,
    /// Add the mirrored negative-parameter branch.
    pub extend_odd: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            alpha_min: DEFAULT_P_MIN,
            alpha_max: 50.0,
            beta_min: DEFAULT_P_MIN,
            beta_max: 50.0,
            theta_max: DEFAULT_THETA_MAX,
            budget: DEFAULT_BUDGET,
            stop_half_turns: None,
            extend_odd: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchSection {
    pub k: Vec<usize>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub coarse_grid: usize,
    pub max_seeds: usize,
    pub match_tol_rel: f64,
    pub grid_points: Option<usize>,
    pub theta_max: f64,
    pub budget: usize,
    pub all_roots: bool,
}

impl Default for MatchSection {
    fn default() -> Self {
        let o = MatchOptions::default();
        Self {
            k: Vec::new(),
            alpha_min: 1.0,
            alpha_max: 1e4,
            beta_min: 1.0,
            beta_max: 1e4,
            coarse_grid: 64,
            max_seeds: o.max_seeds,
            match_tol_rel: o.match_tol_rel,
            grid_points: o.grid_points,
            theta_max: o.theta_max,
            budget: o.budget,
            all_roots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Solution JSON, CSV, or their common path without extension.
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Runs are always deterministic; `false` is rejected.
    #[serde(default = "always")]
    pub deterministic: bool,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub ode: Option<OdeParams>,
    #[serde(default)]
    pub shoot: ShootSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default, rename = "match")]
    pub matching: MatchSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub tolerances: Option<ToleranceSet>,
}

fn always() -> bool {
    true
}

impl RunConfig {
    pub fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        if !cfg.deterministic {
            return Err(Error::Config("deterministic = false is not supported".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::Config(format!("{}: {}", p.display(), e.message())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    pub fn profile_spec(&self) -> Result<ProfileSpec> {
        self.profile
            .as_ref()
            .ok_or_else(|| Error::Config("missing [profile] section".into()))?
            .to_spec()
    }

    pub fn ode_params(&self) -> Result<OdeParams> {
        let p = self
            .ode
            .ok_or_else(|| Error::Config("missing [ode] section".into()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn tolerance_set(&self, params: &OdeParams) -> ToleranceSet {
        self.tolerances
            .clone()
            .unwrap_or_else(|| ToleranceSet::for_params(params))
    }
}

/// Applies `section.key=value`; the value is read as a TOML value and falls
/// back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key `{key}`")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let mut cur = table;
    for part in &path[..path.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{part}` is not a section")))?;
    }
    cur.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}
