use thiserror::Error;

use crate::ivp::State;
use crate::shooting::AngleCurve;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid profile spec: {0}")]
    InvalidSpec(String),

    #[error("t = {t} lies outside the open interval (0, {d})")]
    Domain { t: f64, d: f64 },

    #[error("invalid profile: {0}")]
    ProfileInvalid(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The adaptive step collapsed; carries the last accepted state.
    #[error("step size underflow near t = {} (u = {}, u' = {})", .last.t, .last.u, .last.up)]
    StepUnderflow { last: State },

    #[error("non-finite state produced after t = {}", .last.t)]
    Divergence { last: State },

    #[error("angle {0} is within tolerance of an odd multiple of pi/2; zero count is ambiguous")]
    AmbiguousAngle(f64),

    #[error("refinement budget of {budget} shots exhausted")]
    BudgetExhausted {
        budget: usize,
        partial: Box<AngleCurve>,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error(
        "exponent precondition failed: q = {q} is not below the critical exponent p_G = {p_g} \
         (n = {n}, m = {m})"
    )]
    Exponent { q: f64, p_g: f64, n: u32, m: u32 },

    #[error("seam jump {jump:e} exceeds tolerance {tol:e}")]
    Assembly { jump: f64, tol: f64 },

    #[error("grid resolution: {0}")]
    Resolution(String),
}
