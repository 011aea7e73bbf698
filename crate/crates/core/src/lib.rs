//! Success-probability analysis for multi-antenna partial zero-forcing (PZF)
//! receivers in a Poisson field of single-antenna interferers.
//!
//! A PZF receiver with `N_R` antennas spends `M` degrees of freedom nulling the
//! `M` nearest interferers and the remaining `N_R - M` on array gain. This crate
//! evaluates the resulting uplink success probability `Pr[SIR > θ]` three ways:
//!
//! - [`analytic`]: the exact closed form for `M = 0`, the distance-threshold
//!   approximation for `M ≥ 1`, its gamma-CCDF upper bound, the classical
//!   Markov lower bound, and the optimal `M` search.
//! - [`simulator`]: a Monte Carlo engine that samples the interferer field and
//!   either runs the full linear-algebra combiner or draws the per-node powers
//!   from their known laws.
//! - [`specfun`]: log-gamma, Pochhammer symbols and the Gauss hypergeometric
//!   function on the negative real axis, with derivatives of any order.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel estimation, file
//! formats and the command-line front end live in the companion `pzf-udn`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
mod error;
pub mod simulator;
pub mod specfun;
mod sum;

pub use analytic::{
    find_optimal_m, success_prob, LaplaceDerivs, LaplaceModel, Method, NetworkParams, PzfConfig,
    SuccessCurve, SuccessMatrix,
};
pub use error::{Error, Result};
pub use simulator::{SimConfig, SimModel, SuccessEstimate};
