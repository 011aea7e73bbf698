//! Grid evaluation behind the `sweep` and `optimal-m` commands.

use std::time::Instant;

use pzf_udn_core::analytic::{self, Method, NetworkParams, PzfConfig};
use pzf_udn_core::simulator::{SimConfig, SimModel, SuccessEstimate};
use pzf_udn_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentSpec;
use crate::error::{CliError, Result};
use crate::parallel;

/// Result of one method at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Value(f64),
    Estimate(SuccessEstimate),
    /// The method has no value here (outside its validity range).
    Undefined,
}

impl Outcome {
    pub fn probability(&self) -> Option<f64> {
        match self {
            Outcome::Value(p) => Some(*p),
            Outcome::Estimate(e) => Some(e.p_hat),
            Outcome::Undefined => None,
        }
    }
}

/// Evaluates `method` at one point. `sim.model` picks the `mc_exact` sampler;
/// `mc_approx` always samples the distance-threshold model.
///
/// `approx` at `M = 0` reports the exact no-cancellation value, since the
/// distance threshold is undefined there.
pub fn evaluate(
    params: &NetworkParams,
    cfg: &PzfConfig,
    theta: f64,
    method: Method,
    sim: &SimConfig,
) -> pzf_udn_core::Result<Outcome> {
    let m = cfg.m;
    let value = match (method, m) {
        (Method::ExactM0, 0) => analytic::success_prob_exact_m0(params, cfg.n_r, theta)?,
        (Method::Approx, _) => analytic::success_prob(params, cfg, theta)?,
        (Method::UpperAlzer, 1..) => analytic::success_prob_upper_alzer(params, cfg, theta)?,
        (Method::LowerJindal, _) => match analytic::success_prob_lower_jindal(params, cfg, theta) {
            Err(Error::NotDefined { .. }) => return Ok(Outcome::Undefined),
            other => other?,
        },
        (Method::McExact, _) => {
            return parallel::estimate_success(params, cfg, theta, sim).map(Outcome::Estimate);
        }
        (Method::McApprox, 1..) => {
            let sim = SimConfig {
                model: SimModel::ApproxDm,
                ..*sim
            };
            return parallel::estimate_success(params, cfg, theta, &sim).map(Outcome::Estimate);
        }
        _ => return Ok(Outcome::Undefined),
    };
    Ok(Outcome::Value(value))
}

/// One output line of a sweep; echoes every parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub alpha: f64,
    pub rho0: f64,
    pub rho: f64,
    pub r0: f64,
    pub n_r: u32,
    pub m: u32,
    pub theta: f64,
    pub method: &'static str,
    pub status: &'static str,
    pub probability: Option<f64>,
    pub half_width: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sampler: Option<&'static str>,
    pub window_points: Option<f64>,
    pub confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

fn describe(params: &NetworkParams, n_r: u32, m: u32, theta: f64, method: Method) -> String {
    format!(
        "lambda={}, alpha={}, rho0={}, rho={}, r0={}, n_r={n_r}, m={m}, theta={theta}, method={method}",
        params.lambda, params.alpha, params.rho0, params.rho, params.r0
    )
}

/// Evaluates every method at every grid point, in grid order then method order.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate_sweep()?;
    let n_r = spec.n_r[0];
    let mut tasks = Vec::new();
    for &lambda in &spec.lambda_grid {
        for &theta in &spec.theta_grid {
            for &m in &spec.m_grid {
                for &method in &spec.methods {
                    tasks.push((spec.network_at(lambda), m, theta, method));
                }
            }
        }
    }
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(params, m, theta, method)| {
            let start = Instant::now();
            let cfg = PzfConfig { n_r, m: *m };
            let outcome = evaluate(params, &cfg, *theta, *method, &spec.sim);
            (outcome, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut rows = Vec::with_capacity(tasks.len());
    for ((params, m, theta, method), (outcome, seconds)) in tasks.into_iter().zip(results) {
        let outcome = outcome.map_err(|e| CliError::at(describe(&params, n_r, m, theta, method), e))?;
        let estimate = match outcome {
            Outcome::Estimate(e) => Some(e),
            _ => None,
        };
        rows.push(SweepRow {
            lambda: params.lambda,
            alpha: params.alpha,
            rho0: params.rho0,
            rho: params.rho,
            r0: params.r0,
            n_r,
            m,
            theta,
            method: method.tag(),
            status: if outcome == Outcome::Undefined { "undefined" } else { "ok" },
            probability: outcome.probability(),
            half_width: estimate.map(|e| e.half_width),
            trials: estimate.map(|e| e.trials),
            seed: estimate.map(|e| e.seed),
            sampler: estimate.map(|e| e.model.tag()),
            window_points: estimate.map(|_| spec.sim.window_points_target),
            confidence: estimate.map(|_| spec.sim.confidence_level),
            wall_time_s: spec.timing.then_some(seconds),
        });
    }
    Ok(rows)
}

/// One line of the optimal-`M` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalRow {
    pub lambda: f64,
    pub alpha: f64,
    pub rho0: f64,
    pub rho: f64,
    pub r0: f64,
    pub theta: f64,
    pub n_r: u32,
    pub m_star: u32,
    pub probability: f64,
    /// `⌊N_R / 2⌋`, for comparison with `m_star`.
    pub half_n_r: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// `M*` for every `(N_R, λ)` pair, antenna count outermost.
pub fn run_optimal_m(spec: &ExperimentSpec) -> Result<Vec<OptimalRow>> {
    spec.validate_optimal_m()?;
    let theta = spec.theta_grid[0];
    let tasks: Vec<(u32, NetworkParams)> = spec
        .n_r
        .iter()
        .flat_map(|&n_r| spec.lambda_grid.iter().map(move |&l| (n_r, l)))
        .map(|(n_r, l)| (n_r, spec.network_at(l)))
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(n_r, params)| {
            let start = Instant::now();
            let found = analytic::find_optimal_m(params, *n_r, theta);
            (found, start.elapsed().as_secs_f64())
        })
        .collect();
    tasks
        .into_iter()
        .zip(results)
        .map(|((n_r, params), (found, seconds))| {
            let (m_star, probability) = found.map_err(|e| {
                CliError::at(
                    format!(
                        "lambda={}, alpha={}, rho0={}, rho={}, r0={}, n_r={n_r}, theta={theta}",
                        params.lambda, params.alpha, params.rho0, params.rho, params.r0
                    ),
                    e,
                )
            })?;
            Ok(OptimalRow {
                lambda: params.lambda,
                alpha: params.alpha,
                rho0: params.rho0,
                rho: params.rho,
                r0: params.r0,
                theta,
                n_r,
                m_star,
                probability,
                half_n_r: n_r / 2,
                wall_time_s: spec.timing.then_some(seconds),
            })
        })
        .collect()
}
