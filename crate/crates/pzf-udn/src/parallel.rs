//! Multi-threaded Monte Carlo estimation.
//!
//! Trials are split into fixed-size chunks whose boundaries depend only on the
//! trial count, never on the worker count. Each chunk returns integer counts
//! and the counts are summed in chunk order, so the estimate is bit-identical
//! for any pool size.

use pzf_udn_core::analytic::{NetworkParams, PzfConfig};
use pzf_udn_core::simulator::{self, SimConfig, SuccessEstimate};
use rayon::prelude::*;

use crate::error::{CliError, Result};

pub const THREADS_ENV: &str = "PZF_UDN_THREADS";

/// Trials per work unit.
pub const CHUNK_TRIALS: u64 = 1024;

/// Worker count requested through `PZF_UDN_THREADS`, if any.
pub fn requested_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{raw}`"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::usage(format!("{THREADS_ENV}: {e}"))),
    }
}

/// Pool sized by `PZF_UDN_THREADS`, or by the machine when unset.
pub fn build_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = requested_threads()? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

fn chunks(trials: u64) -> Vec<std::ops::Range<u64>> {
    (0..trials.div_ceil(CHUNK_TRIALS))
        .map(|c| c * CHUNK_TRIALS..((c + 1) * CHUNK_TRIALS).min(trials))
        .collect()
}

/// Parallel counterpart of [`simulator::estimate_success`]; returns the same
/// estimate.
pub fn estimate_success(
    params: &NetworkParams,
    cfg: &PzfConfig,
    theta: f64,
    sim: &SimConfig,
) -> pzf_udn_core::Result<SuccessEstimate> {
    sim.validate()?;
    let counts: Vec<_> = chunks(sim.trials)
        .into_par_iter()
        .map(|range| simulator::run_trial_range(params, cfg, theta, sim, range))
        .collect();
    let mut successes = 0;
    let mut redrawn = 0;
    for c in counts {
        let (s, r) = c?;
        successes += s;
        redrawn += r;
    }
    SuccessEstimate::from_counts(successes, redrawn, sim)
}
