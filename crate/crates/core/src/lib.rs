//! Nodal solutions of `u'' + h(t) u' + lambda u (|u|^(q-1) - 1) = 0` on
//! `(0, d)` with `u'(0) = u'(d) = 0`, built by shooting from both singular
//! endpoints and matching at the zero `t0` of `h`.

pub mod cli;
pub mod error;
pub mod ivp;
pub mod matcher;
pub mod profile;
pub mod shooting;
pub mod verify;

pub use error::{Error, Result};
