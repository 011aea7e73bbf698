//! Parallel Monte Carlo, parameter sweeps and data output on top of
//! [`pzf_udn_core`].
//!
//! The `pzf-udn` binary exposes three commands: `sweep` evaluates success
//! probabilities on a one-dimensional grid, `optimal-m` tabulates the best
//! number of nulled interferers against density, and `validate` runs a quick
//! battery of self-checks.

pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod sweep;
pub mod validate;

pub use config::{ExperimentSpec, Format, Preset};
pub use error::{CliError, Result};
