//! Monte Carlo estimation of the success probability.
//!
//! Interferers are drawn on a disk holding `window_points_target` points on
//! average. Only distances are generated: the SIR depends on positions through
//! `X_i^(-α)` alone and the fading is isotropic, so angles never enter. The
//! squared distances `πλX_i²` of a planar Poisson process form a unit-rate
//! Poisson process on the half-line, so sorted radii come straight from
//! cumulative exponential spacings.
//!
//! Each trial owns a ChaCha8 stream keyed by `(seed, trial_index)`; results do
//! not depend on the order in which trials run.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::analytic::{self, NetworkParams, PzfConfig};
use crate::error::{Error, Result};

/// Relative norm below which a projected desired channel counts as degenerate.
pub const DEGENERATE_RATIO: f64 = 1e-12;

/// Redraw fraction above which an estimate is rejected.
pub const MAX_REDRAW_FRACTION: f64 = 1e-3;

const MAX_REDRAWS_PER_TRIAL: u32 = 16;

/// Which SIR a trial evaluates and how the per-node powers are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimModel {
    /// Nearest `M` nulled; powers from explicit channel vectors and the PZF combiner.
    Exact,
    /// Every node inside `d_M` removed; powers drawn from their laws.
    ApproxDm,
    /// Nearest `M` nulled; powers drawn from their laws.
    GammaShortcut,
}

impl SimModel {
    pub fn tag(&self) -> &'static str {
        match self {
            SimModel::Exact => "exact",
            SimModel::ApproxDm => "approx_dm",
            SimModel::GammaShortcut => "gamma_shortcut",
        }
    }
}

impl fmt::Display for SimModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SimModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [SimModel::Exact, SimModel::ApproxDm, SimModel::GammaShortcut]
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or(Error::invalid("model", f64::NAN, "unknown simulation model"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Expected number of interferers inside the simulation disk.
    pub window_points_target: f64,
    pub model: SimModel,
    pub confidence_level: f64,
    /// Add the mean interference of the field beyond the window to every trial.
    pub far_field_correction: bool,
}

impl SimConfig {
    pub const DEFAULT_TRIALS: u64 = 10_000;
    pub const DEFAULT_WINDOW_POINTS: f64 = 2000.0;
    pub const DEFAULT_CONFIDENCE: f64 = 0.99;

    pub fn new(trials: u64, seed: u64, model: SimModel) -> Self {
        Self {
            trials,
            seed,
            window_points_target: Self::DEFAULT_WINDOW_POINTS,
            model,
            confidence_level: Self::DEFAULT_CONFIDENCE,
            far_field_correction: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 100 {
            return Err(Error::invalid("trials", self.trials as f64, "need at least 100 trials"));
        }
        if !(self.window_points_target >= 500.0) || !self.window_points_target.is_finite() {
            return Err(Error::invalid(
                "window_points_target",
                self.window_points_target,
                "need at least 500 expected points",
            ));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::invalid(
                "confidence_level",
                self.confidence_level,
                "must lie strictly between 0 and 1",
            ));
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(Self::DEFAULT_TRIALS, 0, SimModel::GammaShortcut)
    }
}

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Radius of the disk holding `target` points on average.
pub fn window_radius(params: &NetworkParams, target: f64) -> f64 {
    libm::sqrt(target / (PI * params.lambda))
}

/// Mean of `Σ X_i^(-α)` over the field outside radius `r`, i.e.
/// `2πλ r^(2-α)/(α-2)`.
pub fn far_field_mean(params: &NetworkParams, r: f64) -> f64 {
    2.0 * PI * params.lambda * libm::pow(r, 2.0 - params.alpha) / (params.alpha - 2.0)
}

/// One interferer field.
#[derive(Debug, Clone, PartialEq)]
pub struct PppRealization {
    /// Distances to the origin, ascending.
    pub distances: Vec<f64>,
    pub window_radius: f64,
    /// Deterministic stand-in for `Σ X_i^(-α) S_i` beyond the window (zero
    /// when the far-field correction is off).
    pub tail_interference: f64,
}

impl PppRealization {
    pub fn count(&self) -> usize {
        self.distances.len()
    }

    /// Number of points strictly inside radius `r`.
    pub fn count_within(&self, r: f64) -> usize {
        self.distances.partition_point(|&x| x <= r)
    }
}

/// Draws the field for trial `trial_index` from its own stream.
pub fn sample_ppp(params: &NetworkParams, sim: &SimConfig, trial_index: u64) -> Result<PppRealization> {
    params.validate()?;
    sim.validate()?;
    Ok(sample_ppp_with(&mut trial_rng(sim.seed, trial_index), params, sim))
}

/// Draws a field from `rng`. The first `k` distances coincide with
/// [`sample_nearest_with`] called on an identical generator.
pub fn sample_ppp_with<R: Rng + ?Sized>(rng: &mut R, params: &NetworkParams, sim: &SimConfig) -> PppRealization {
    let target = sim.window_points_target;
    let scale = 1.0 / (PI * params.lambda);
    let mut distances = Vec::with_capacity((target * 1.1) as usize + 16);
    let mut arrival = 0.0;
    loop {
        let spacing: f64 = Exp1.sample(rng);
        arrival += spacing;
        if arrival > target {
            break;
        }
        distances.push(libm::sqrt(arrival * scale));
    }
    let radius = window_radius(params, target);
    PppRealization {
        distances,
        window_radius: radius,
        tail_interference: if sim.far_field_correction {
            far_field_mean(params, radius)
        } else {
            0.0
        },
    }
}

/// The `k` nearest distances of an unbounded field.
pub fn sample_nearest_with<R: Rng + ?Sized>(rng: &mut R, params: &NetworkParams, k: usize) -> Vec<f64> {
    let scale = 1.0 / (PI * params.lambda);
    let mut arrival = 0.0;
    (0..k)
        .map(|_| {
            let spacing: f64 = Exp1.sample(rng);
            arrival += spacing;
            libm::sqrt(arrival * scale)
        })
        .collect()
}

/// `CN(0, 1)` sample.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Channel vectors for the desired link and every interferer.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    n_r: usize,
    pub h0: Vec<Complex64>,
    /// Interferer channels, `n_r` entries per node, in distance order.
    interferers: Vec<Complex64>,
}

impl ChannelDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n_r: usize, count: usize) -> Self {
        let h0 = (0..n_r).map(|_| complex_gaussian(rng)).collect();
        let interferers = (0..n_r * count).map(|_| complex_gaussian(rng)).collect();
        Self { n_r, h0, interferers }
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn interferer_count(&self) -> usize {
        self.interferers.len() / self.n_r
    }

    pub fn interferer(&self, i: usize) -> &[Complex64] {
        &self.interferers[i * self.n_r..(i + 1) * self.n_r]
    }

    /// The first `m` interferer channels.
    pub fn nearest(&self, m: usize) -> Vec<&[Complex64]> {
        (0..m).map(|i| self.interferer(i)).collect()
    }
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum())
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = inner(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
}

/// Unit vector along the projection of `h0` onto the orthogonal complement of
/// the nulled channels.
pub fn pzf_combiner(h0: &[Complex64], nulled: &[&[Complex64]]) -> Result<Vec<Complex64>> {
    if nulled.len() >= h0.len() {
        return Err(Error::invalid(
            "m",
            nulled.len() as f64,
            "PZF can null at most N_R - 1 interferers",
        ));
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(nulled.len());
    for h in nulled {
        let mut q = h.to_vec();
        let before = norm(&q);
        project_out(&mut q, &basis);
        let after = norm(&q);
        if !(after > DEGENERATE_RATIO * before) {
            return Err(Error::DegenerateProjection { ratio: after / before });
        }
        q.iter_mut().for_each(|x| *x /= after);
        basis.push(q);
    }
    let mut v = h0.to_vec();
    let h0_norm = norm(h0);
    project_out(&mut v, &basis);
    let n = norm(&v);
    if !(n > DEGENERATE_RATIO * h0_norm) {
        return Err(Error::DegenerateProjection { ratio: n / h0_norm });
    }
    v.iter_mut().for_each(|x| *x /= n);
    Ok(v)
}

/// Checks unit norm and orthogonality to every nulled channel.
pub fn check_combiner(v: &[Complex64], nulled: &[&[Complex64]]) -> Result<()> {
    let n = norm(v);
    if libm::fabs(n - 1.0) > 1e-12 {
        return Err(Error::Numerical {
            what: "combiner norm",
            value: n,
        });
    }
    for h in nulled {
        let leak = inner(v, h).norm_sqr();
        if libm::sqrt(leak) > 1e-10 * norm(h).max(1.0) {
            return Err(Error::Numerical {
                what: "combiner leakage onto a nulled channel",
                value: libm::sqrt(leak),
            });
        }
    }
    Ok(())
}

/// `|v^H h|²`.
pub fn combined_power(v: &[Complex64], h: &[Complex64]) -> f64 {
    inner(v, h).norm_sqr()
}

fn path_gain(params: &NetworkParams, r: f64) -> f64 {
    let half = params.alpha / 2.0;
    // r^(-α) = (r²)^(-α/2); integer halves avoid pow
    if half == libm::floor(half) && half <= 16.0 {
        let inv = 1.0 / (r * r);
        let mut g = 1.0;
        for _ in 0..half as u32 {
            g *= inv;
        }
        g
    } else {
        libm::pow(r, -params.alpha)
    }
}

fn sir(params: &NetworkParams, signal: f64, interference: f64) -> f64 {
    let useful = params.rho0 * libm::pow(params.r0, -params.alpha) * signal;
    let i = params.rho * interference;
    if i > 0.0 {
        useful / i
    } else {
        f64::INFINITY
    }
}

/// SIR with the nearest `M` interferers nulled by the full PZF combiner.
pub fn sir_exact(params: &NetworkParams, cfg: &PzfConfig, ppp: &PppRealization, ch: &ChannelDraw) -> Result<f64> {
    cfg.validate()?;
    if ch.n_r() != cfg.n_r as usize {
        return Err(Error::invalid("n_r", ch.n_r() as f64, "channel dimension mismatch"));
    }
    if ch.interferer_count() < ppp.count() {
        return Err(Error::invalid(
            "channels",
            ch.interferer_count() as f64,
            "fewer channel vectors than interferers",
        ));
    }
    let m = (cfg.m as usize).min(ppp.count());
    let v = pzf_combiner(&ch.h0, &ch.nearest(m))?;
    let signal = combined_power(&v, &ch.h0);
    let mut interference = ppp.tail_interference;
    for (i, &r) in ppp.distances.iter().enumerate().skip(m) {
        interference += path_gain(params, r) * combined_power(&v, ch.interferer(i));
    }
    Ok(sir(params, signal, interference))
}

/// Per-node combined powers drawn from their known laws: `Gamma(N_R - M, 1)`
/// for the desired link, unit exponential for every interferer.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingMarks {
    pub signal: f64,
    pub interferers: Vec<f64>,
}

impl FadingMarks {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, cfg: &PzfConfig, count: usize) -> Self {
        let shape = cfg.residual_dof() as f64;
        let signal = if cfg.residual_dof() == 1 {
            Exp1.sample(rng)
        } else {
            Gamma::new(shape, 1.0).expect("shape is a positive integer").sample(rng)
        };
        let interferers = (0..count).map(|_| Exp1.sample(rng)).collect();
        Self { signal, interferers }
    }
}

/// Draws a field together with its fading marks, the mark of each point right
/// after its distance. A trial run with a larger window therefore extends the
/// smaller one: the points they share keep their distances and marks.
pub fn sample_marked_field<R: Rng + ?Sized>(
    rng: &mut R,
    params: &NetworkParams,
    cfg: &PzfConfig,
    sim: &SimConfig,
) -> (PppRealization, FadingMarks) {
    let signal = FadingMarks::sample(rng, cfg, 0).signal;
    let target = sim.window_points_target;
    let scale = 1.0 / (PI * params.lambda);
    let capacity = (target * 1.1) as usize + 16;
    let mut distances = Vec::with_capacity(capacity);
    let mut interferers = Vec::with_capacity(capacity);
    let mut arrival = 0.0;
    loop {
        let spacing: f64 = Exp1.sample(rng);
        arrival += spacing;
        if arrival > target {
            break;
        }
        distances.push(libm::sqrt(arrival * scale));
        interferers.push(Exp1.sample(rng));
    }
    let radius = window_radius(params, target);
    let ppp = PppRealization {
        distances,
        window_radius: radius,
        tail_interference: if sim.far_field_correction {
            far_field_mean(params, radius)
        } else {
            0.0
        },
    };
    (ppp, FadingMarks { signal, interferers })
}

/// SIR with the nearest `M` nulled, powers from [`FadingMarks`].
pub fn sir_gamma_shortcut(params: &NetworkParams, cfg: &PzfConfig, ppp: &PppRealization, marks: &FadingMarks) -> f64 {
    let m = cfg.m as usize;
    let interference = ppp.tail_interference
        + ppp
            .distances
            .iter()
            .zip(&marks.interferers)
            .skip(m)
            .map(|(&r, &s)| path_gain(params, r) * s)
            .sum::<f64>();
    sir(params, marks.signal, interference)
}

/// SIR with every interferer inside `d_M` removed, powers from [`FadingMarks`].
pub fn sir_approx(params: &NetworkParams, cfg: &PzfConfig, ppp: &PppRealization, marks: &FadingMarks) -> Result<f64> {
    cfg.validate()?;
    let d = analytic::mean_mth_distance(params, cfg.m)?;
    let first = ppp.distances.partition_point(|&x| x <= d);
    let interference = ppp.tail_interference
        + ppp.distances[first..]
            .iter()
            .zip(&marks.interferers[first..])
            .map(|(&r, &s)| path_gain(params, r) * s)
            .sum::<f64>();
    Ok(sir(params, marks.signal, interference))
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    /// Channel redraws caused by degenerate projections.
    pub redraws: u32,
}

/// Runs trial `trial_index` of `sim.model`.
pub fn run_trial(
    params: &NetworkParams,
    cfg: &PzfConfig,
    theta: f64,
    sim: &SimConfig,
    trial_index: u64,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(sim.seed, trial_index);
    match sim.model {
        SimModel::GammaShortcut => {
            let (ppp, marks) = sample_marked_field(&mut rng, params, cfg, sim);
            Ok(TrialOutcome {
                success: sir_gamma_shortcut(params, cfg, &ppp, &marks) > theta,
                redraws: 0,
            })
        }
        SimModel::ApproxDm => {
            let (ppp, marks) = sample_marked_field(&mut rng, params, cfg, sim);
            Ok(TrialOutcome {
                success: sir_approx(params, cfg, &ppp, &marks)? > theta,
                redraws: 0,
            })
        }
        SimModel::Exact => {
            let ppp = sample_ppp_with(&mut rng, params, sim);
            let check = cfg!(debug_assertions) || trial_index % 100 == 0;
            let m = (cfg.m as usize).min(ppp.count());
            let mut redraws = 0;
            loop {
                let ch = ChannelDraw::sample(&mut rng, cfg.n_r as usize, ppp.count());
                match sir_exact(params, cfg, &ppp, &ch) {
                    Ok(value) => {
                        if check {
                            let v = pzf_combiner(&ch.h0, &ch.nearest(m))?;
                            check_combiner(&v, &ch.nearest(m))?;
                        }
                        return Ok(TrialOutcome {
                            success: value > theta,
                            redraws,
                        });
                    }
                    Err(Error::DegenerateProjection { .. }) if redraws < MAX_REDRAWS_PER_TRIAL => redraws += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

/// How the confidence half-width was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalMethod {
    Normal,
    Wilson,
}

/// Monte Carlo estimate of a success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessEstimate {
    pub p_hat: f64,
    pub half_width: f64,
    pub trials: u64,
    pub successes: u64,
    pub seed: u64,
    pub model: SimModel,
    pub interval: IntervalMethod,
    /// Trials that needed at least one channel redraw.
    pub redrawn_trials: u64,
}

impl SuccessEstimate {
    /// Builds the estimate from raw counts. The normal interval is replaced by
    /// the Wilson interval when `p̂(1 - p̂)n < 25`.
    pub fn from_counts(successes: u64, redrawn_trials: u64, sim: &SimConfig) -> Result<Self> {
        let n = sim.trials as f64;
        if redrawn_trials as f64 > MAX_REDRAW_FRACTION * n {
            return Err(Error::TooManyRedraws {
                redrawn: redrawn_trials,
                trials: sim.trials,
            });
        }
        let p = successes as f64 / n;
        let z = normal_quantile(0.5 + 0.5 * sim.confidence_level);
        let (half_width, interval) = if p * (1.0 - p) * n < 25.0 {
            (wilson_half_width(p, n, z), IntervalMethod::Wilson)
        } else {
            (z * libm::sqrt(p * (1.0 - p) / n), IntervalMethod::Normal)
        };
        Ok(Self {
            p_hat: p,
            half_width,
            trials: sim.trials,
            successes,
            seed: sim.seed,
            model: sim.model,
            interval,
            redrawn_trials,
        })
    }

    /// Whether `value` lies within the half-width of the point estimate.
    pub fn covers(&self, value: f64) -> bool {
        libm::fabs(value - self.p_hat) <= self.half_width
    }
}

fn wilson_half_width(p: f64, n: f64, z: f64) -> f64 {
    let z2 = z * z;
    z / (1.0 + z2 / n) * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))
}

/// Sequential estimate over trials `0..sim.trials`.
pub fn estimate_success(params: &NetworkParams, cfg: &PzfConfig, theta: f64, sim: &SimConfig) -> Result<SuccessEstimate> {
    let (successes, redrawn) = run_trial_range(params, cfg, theta, sim, 0..sim.trials)?;
    SuccessEstimate::from_counts(successes, redrawn, sim)
}

/// Validates inputs and counts successes and redrawn trials over `range`.
/// Counts from disjoint ranges add up to the count over their union.
pub fn run_trial_range(
    params: &NetworkParams,
    cfg: &PzfConfig,
    theta: f64,
    sim: &SimConfig,
    range: core::ops::Range<u64>,
) -> Result<(u64, u64)> {
    params.validate()?;
    cfg.validate()?;
    sim.validate()?;
    if !(theta > 0.0) || theta.is_nan() {
        return Err(Error::invalid("theta", theta, "SIR threshold must be positive"));
    }
    if sim.model == SimModel::ApproxDm && cfg.m == 0 {
        return Err(Error::invalid("m", 0.0, "the distance-threshold model needs M >= 1"));
    }
    let mut successes = 0;
    let mut redrawn = 0;
    for t in range {
        let outcome = run_trial(params, cfg, theta, sim, t)?;
        successes += outcome.success as u64;
        redrawn += (outcome.redraws > 0) as u64;
    }
    Ok((successes, redrawn))
}

/// `Pr[Poisson(mean) < k]`.
pub fn poisson_cdf_below(mean: f64, k: u32) -> f64 {
    let mut log_term = -mean;
    let mut total = 0.0;
    for j in 0..k {
        if j > 0 {
            log_term += libm::log(mean) - libm::log(j as f64);
        }
        total += libm::exp(log_term);
    }
    total
}

/// Average distance to the `m`-th nearest interferer over `sim.trials` fields.
///
/// The window is doubled once if it holds fewer than `m` points with
/// probability above `1e-6`.
pub fn empirical_mth_distance(params: &NetworkParams, m: u32, sim: &SimConfig) -> Result<f64> {
    params.validate()?;
    sim.validate()?;
    if m == 0 {
        return Err(Error::invalid("m", 0.0, "need m >= 1"));
    }
    let mut sim = *sim;
    let mut short = poisson_cdf_below(sim.window_points_target, m);
    if short > 1e-6 {
        sim.window_points_target *= 2.0;
        short = poisson_cdf_below(sim.window_points_target, m);
        if short > 1e-6 {
            return Err(Error::WindowTooSmall {
                needed: m,
                probability: short,
            });
        }
    }
    let mut total = 0.0;
    for t in 0..sim.trials {
        let nearest = sample_nearest_with(&mut trial_rng(sim.seed, t), params, m as usize);
        let x = nearest[m as usize - 1];
        if x > window_radius(params, sim.window_points_target) {
            return Err(Error::WindowTooSmall {
                needed: m,
                probability: short,
            });
        }
        total += x;
    }
    Ok(total / sim.trials as f64)
}

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step against `erfc`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let low = 0.02425;
    let x = if p < low {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * libm::sqrt(2.0 * PI) * libm::exp(x * x / 2.0);
    x - u / (1.0 + x * u / 2.0)
}
