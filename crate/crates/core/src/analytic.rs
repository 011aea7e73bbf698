//! Closed-form and semi-closed-form success probabilities.
//!
//! With `K = N_R - M` degrees of freedom left for the desired link, the
//! signal power is `Gamma(K, 1)` and the success probability is the truncated
//! series
//!
//! ```text
//! P(θ, M) = Σ_{n<K} (-s)^n / n! · L^(n)(s),     s = θ R0^α / ρ0,
//! ```
//!
//! where `L` is the Laplace transform of the residual interference. For a
//! transform of the form `L = exp(g)` the summands `a_n` obey the power-series
//! exponential recurrence
//!
//! ```text
//! a_0 = e^g,   a_n = Σ_{k=1}^{n} (k / n) · b_k · a_{n-k},   b_k = (-s)^k g^(k) / k!
//! ```
//!
//! Every `b_k` is nonnegative for the transforms used here, so the recurrence
//! never subtracts.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::{self, Hyp2F1Params};
use crate::sum::CompensatedSum;

/// Conditioning ratio above which the alternating upper-bound sum is reported
/// as unreliable.
pub const ALZER_CONDITIONING_LIMIT: f64 = 1e12;

const PROBABILITY_SLACK: f64 = 1e-9;

/// Physical scenario shared by every method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Interferer density λ in nodes/m².
    pub lambda: f64,
    /// Pathloss exponent α, strictly above 2.
    pub alpha: f64,
    /// Transmit power of the associated transmitter, in watts.
    pub rho0: f64,
    /// Transmit power of every interferer, in watts.
    pub rho: f64,
    /// Link distance R0 in meters.
    pub r0: f64,
}

impl NetworkParams {
    pub fn new(lambda: f64, alpha: f64, rho0: f64, rho: f64, r0: f64) -> Result<Self> {
        let p = Self {
            lambda,
            alpha,
            rho0,
            rho,
            r0,
        };
        p.validate()?;
        Ok(p)
    }

    /// α = 4, unit powers and a 10 m link at the given density.
    pub fn reference(lambda: f64) -> Self {
        Self {
            lambda,
            alpha: 4.0,
            rho0: 1.0,
            rho: 1.0,
            r0: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, v, "must be positive and finite"))
            }
        };
        positive("lambda", self.lambda)?;
        positive("rho0", self.rho0)?;
        positive("rho", self.rho)?;
        positive("r0", self.r0)?;
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", self.alpha, "pathloss exponent must exceed 2"));
        }
        Ok(())
    }

    /// The Laplace argument `s = θ R0^α / ρ0` at which success probabilities are read off.
    pub fn laplace_point(&self, theta: f64) -> f64 {
        theta * libm::pow(self.r0, self.alpha) / self.rho0
    }
}

/// Receiver description: `n_r` antennas, `m` nulled interferers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PzfConfig {
    pub n_r: u32,
    pub m: u32,
}

impl PzfConfig {
    pub fn new(n_r: u32, m: u32) -> Result<Self> {
        let cfg = Self { n_r, m };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 {
            return Err(Error::invalid("n_r", 0.0, "need at least one antenna"));
        }
        if self.m >= self.n_r {
            return Err(Error::invalid("m", self.m as f64, "PZF can null at most N_R - 1 interferers"));
        }
        Ok(())
    }

    /// Degrees of freedom left for the desired signal, `N_R - M`.
    pub fn residual_dof(&self) -> u32 {
        self.n_r - self.m
    }
}

/// Which interference model a Laplace transform describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceModel {
    /// No cancellation; every interferer contributes.
    ExactM0,
    /// Every interferer inside the mean `M`-th neighbour distance is removed.
    ApproxDm,
}

/// Derivatives of an interference Laplace transform at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceDerivs {
    pub s: f64,
    /// `values[n]` is `dⁿL/dsⁿ` at `s`.
    pub values: Vec<f64>,
    /// `terms[n]` is `(-s)ⁿ/n! · values[n]`, computed without forming `values[n]`.
    pub terms: Vec<f64>,
    pub model: LaplaceModel,
}

impl LaplaceDerivs {
    fn from_exponent_series(s: f64, g0: f64, b: &[f64], model: LaplaceModel) -> Result<Self> {
        let terms = exponential_series(g0, b);
        let mut values = Vec::with_capacity(terms.len());
        let mut scale = 1.0;
        for (n, t) in terms.iter().enumerate() {
            if n > 0 {
                scale *= -(n as f64) / s;
            }
            values.push(t * scale);
        }
        if let Some(bad) = terms.iter().find(|t| !t.is_finite()) {
            return Err(Error::Numerical {
                what: "Laplace derivative term",
                value: *bad,
            });
        }
        Ok(Self {
            s,
            values,
            terms,
            model,
        })
    }

    /// Sum of the first `count` terms, which is the success probability when
    /// the signal has `count` degrees of freedom.
    pub fn truncated_sum(&self, count: usize) -> Result<f64> {
        let mut acc = CompensatedSum::default();
        for &t in &self.terms[..count] {
            if t < -PROBABILITY_SLACK * 1e-3 {
                return Err(Error::Numerical {
                    what: "negative success-probability summand",
                    value: t,
                });
            }
            acc.add(t.max(0.0));
        }
        clamp_probability(acc.value())
    }
}

/// `a_n` from `a_0 = e^{g0}` and `a_n = Σ (k/n) b_k a_{n-k}`; `b[0]` is ignored.
fn exponential_series(g0: f64, b: &[f64]) -> Vec<f64> {
    let mut a = Vec::with_capacity(b.len());
    a.push(libm::exp(g0));
    for n in 1..b.len() {
        let nf = n as f64;
        let acc: CompensatedSum = (1..=n).map(|k| (k as f64 / nf) * b[k] * a[n - k]).collect();
        a.push(acc.value());
    }
    a
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !(p >= -PROBABILITY_SLACK && p <= 1.0 + PROBABILITY_SLACK) {
        return Err(Error::Numerical {
            what: "success probability outside [0, 1]",
            value: p,
        });
    }
    Ok(p.clamp(0.0, 1.0))
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("theta", theta, "SIR threshold must be positive"))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("s", s, "Laplace argument must be positive"))
    }
}

/// Mean distance to the `m`-th nearest interferer,
/// `d_M = (πλ)^(-1/2) Γ(M + 1/2) / Γ(M)`.
pub fn mean_mth_distance(params: &NetworkParams, m: u32) -> Result<f64> {
    params.validate()?;
    if m == 0 {
        return Err(Error::invalid("m", 0.0, "d_M is only defined for M >= 1"));
    }
    let m = m as f64;
    let log_ratio = specfun::log_gamma(m + 0.5)? - specfun::log_gamma(m)?;
    Ok(libm::exp(log_ratio) / libm::sqrt(PI * params.lambda))
}

fn m0_exponent_scale(params: &NetworkParams) -> f64 {
    let delta = 2.0 / params.alpha;
    2.0 * PI * PI * params.lambda * libm::pow(params.rho, delta) / (params.alpha * libm::sin(PI * delta))
}

/// Laplace transform of the full interference (no cancellation).
pub fn laplace_exact_m0(params: &NetworkParams, s: f64) -> Result<f64> {
    params.validate()?;
    check_s(s)?;
    let c = m0_exponent_scale(params);
    Ok(libm::exp(-c * libm::pow(s, 2.0 / params.alpha)))
}

/// `Υ(s, M) = ∫_{d_M}^∞ sρ r / (r^α + sρ) dr`, evaluated as
/// `sρ d^(2-α)/(α-2) · 2F1(1, 1-2/α; 2-2/α; -sρ d^(-α))`.
pub fn upsilon(params: &NetworkParams, m: u32, s: f64) -> Result<f64> {
    check_s(s)?;
    let d = mean_mth_distance(params, m)?;
    let hp = Hyp2F1Params::interference(params.alpha)?;
    let sr = s * params.rho;
    let z = -sr * libm::pow(d, -params.alpha);
    let f = specfun::gauss_2f1_negz(&hp, z)?;
    Ok(sr * libm::pow(d, 2.0 - params.alpha) / (params.alpha - 2.0) * f)
}

/// Laplace transform of the interference from beyond `d_M`.
pub fn laplace_approx(params: &NetworkParams, m: u32, s: f64) -> Result<f64> {
    let u = upsilon(params, m, s)?;
    Ok(libm::exp(-2.0 * PI * params.lambda * u))
}

/// `L^(n)` for `n = 0..=n_max` of the distance-threshold transform.
///
/// With `x = sρ d^(-α)` and `c_n = xⁿ/n! · F^(n)(-x)` for the interference
/// hypergeometric `F`, the product rule on `s · F(-sρ d^(-α))` gives the scaled
/// exponent derivatives `b_n = 2πλ · sρ d^(2-α)/(α-2) · (c_{n-1} - c_n)`.
pub fn laplace_derivs_approx(
    params: &NetworkParams,
    cfg: &PzfConfig,
    s: f64,
    n_max: usize,
) -> Result<LaplaceDerivs> {
    cfg.validate()?;
    check_s(s)?;
    let d = mean_mth_distance(params, cfg.m)?;
    let hp = Hyp2F1Params::interference(params.alpha)?;
    let sr = s * params.rho;
    let x = sr * libm::pow(d, -params.alpha);
    let f = specfun::gauss_2f1_derivs(&hp, -x, n_max)?;

    let mut c = Vec::with_capacity(n_max + 1);
    let mut scale = 1.0;
    for (n, fk) in f.iter().enumerate() {
        if n > 0 {
            scale *= x / n as f64;
        }
        c.push(scale * fk);
    }
    let prefactor = 2.0 * PI * params.lambda * sr * libm::pow(d, 2.0 - params.alpha) / (params.alpha - 2.0);
    let g0 = -prefactor * c[0];
    let mut b = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        b[n] = prefactor * (c[n - 1] - c[n]);
    }
    LaplaceDerivs::from_exponent_series(s, g0, &b, LaplaceModel::ApproxDm)
}

/// `L^(n)` for `n = 0..=n_max` of the no-cancellation transform
/// `exp(-C s^(2/α))`.
pub fn laplace_derivs_exact_m0(params: &NetworkParams, s: f64, n_max: usize) -> Result<LaplaceDerivs> {
    params.validate()?;
    check_s(s)?;
    let delta = 2.0 / params.alpha;
    let c = m0_exponent_scale(params);
    let g0 = -c * libm::pow(s, delta);
    // (-s)^k g^(k)/k! = -C s^δ · Π_{j<k} (j - δ)/(j + 1)
    let mut b = vec![0.0; n_max + 1];
    let mut coeff = 1.0;
    for k in 1..=n_max {
        let j = (k - 1) as f64;
        coeff *= (j - delta) / (j + 1.0);
        b[k] = g0 * coeff;
    }
    LaplaceDerivs::from_exponent_series(s, g0, &b, LaplaceModel::ExactM0)
}

/// Exact success probability without cancellation (`M = 0`).
pub fn success_prob_exact_m0(params: &NetworkParams, n_r: u32, theta: f64) -> Result<f64> {
    PzfConfig::new(n_r, 0)?;
    check_theta(theta)?;
    let s = params.laplace_point(theta);
    laplace_derivs_exact_m0(params, s, n_r as usize - 1)?.truncated_sum(n_r as usize)
}

/// Distance-threshold approximation of the success probability, `M ≥ 1`.
pub fn success_prob_approx(params: &NetworkParams, cfg: &PzfConfig, theta: f64) -> Result<f64> {
    cfg.validate()?;
    check_theta(theta)?;
    if cfg.m == 0 {
        return Err(Error::invalid("m", 0.0, "the approximation needs M >= 1"));
    }
    let k = cfg.residual_dof() as usize;
    let s = params.laplace_point(theta);
    laplace_derivs_approx(params, cfg, s, k - 1)?.truncated_sum(k)
}

/// Exact form at `M = 0`, distance-threshold approximation otherwise.
pub fn success_prob(params: &NetworkParams, cfg: &PzfConfig, theta: f64) -> Result<f64> {
    if cfg.m == 0 {
        success_prob_exact_m0(params, cfg.n_r, theta)
    } else {
        success_prob_approx(params, cfg, theta)
    }
}

/// `κ_M = Γ(N_R - M + 1)^(-1/(N_R - M))`.
pub fn alzer_kappa(cfg: &PzfConfig) -> Result<f64> {
    cfg.validate()?;
    let k = cfg.residual_dof() as f64;
    Ok(libm::exp(-specfun::log_gamma(k + 1.0)? / k))
}

/// Value of the gamma-CCDF upper bound together with its conditioning ratio
/// `max |term| / |sum|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingBound {
    pub value: f64,
    pub conditioning: f64,
}

/// Upper bound on [`success_prob_approx`] from Alzer's inequality:
/// `Σ_{n=1}^{K} (-1)^(n-1) C(K, n) L̃(n κ_M s)` with `K = N_R - M`.
pub fn success_prob_upper_alzer(params: &NetworkParams, cfg: &PzfConfig, theta: f64) -> Result<f64> {
    let kappa = alzer_kappa(cfg)?;
    let bound = alternating_bound(params, cfg, theta, kappa)?;
    if bound.conditioning > ALZER_CONDITIONING_LIMIT {
        log::warn!(
            "upper bound at N_R = {}, M = {} lost digits to cancellation (conditioning {:e})",
            cfg.n_r,
            cfg.m,
            bound.conditioning
        );
    }
    clamp_probability(bound.value)
}

/// The alternating sum behind [`success_prob_upper_alzer`] with an explicit
/// scaling constant. `kappa = 1` gives a lower bound instead.
pub fn alternating_bound(
    params: &NetworkParams,
    cfg: &PzfConfig,
    theta: f64,
    kappa: f64,
) -> Result<AlternatingBound> {
    cfg.validate()?;
    check_theta(theta)?;
    if cfg.m == 0 {
        return Err(Error::invalid("m", 0.0, "the approximation needs M >= 1"));
    }
    let k = cfg.residual_dof();
    let s = params.laplace_point(theta);
    let mut acc = CompensatedSum::default();
    let mut largest: f64 = 0.0;
    let mut binom = 1.0;
    for n in 1..=k {
        binom *= (k - n + 1) as f64 / n as f64;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * binom * laplace_approx(params, cfg.m, n as f64 * kappa * s)?;
        largest = largest.max(libm::fabs(term));
        acc.add(term);
    }
    let value = acc.value();
    let conditioning = if value == 0.0 {
        f64::INFINITY
    } else {
        largest / libm::fabs(value)
    };
    Ok(AlternatingBound {
        value,
        conditioning,
    })
}

/// Validity window `[⌈α/2⌉ + 1, N_R - 2]` of the Markov lower bound.
pub fn lower_jindal_window(alpha: f64, n_r: u32) -> (i64, i64) {
    let ceil_half = libm::ceil(alpha / 2.0) as i64;
    (ceil_half + 1, n_r as i64 - 2)
}

/// Markov-inequality lower bound on the exact success probability. Not
/// clamped: it goes negative at high density or threshold.
pub fn success_prob_lower_jindal(params: &NetworkParams, cfg: &PzfConfig, theta: f64) -> Result<f64> {
    params.validate()?;
    cfg.validate()?;
    check_theta(theta)?;
    let (lo, hi) = lower_jindal_window(params.alpha, cfg.n_r);
    let m = cfg.m as i64;
    if m < lo || m > hi {
        return Err(Error::NotDefined { m: cfg.m, lo, hi });
    }
    let half = params.alpha / 2.0;
    let ceil_half = libm::ceil(half);
    let link = theta * params.rho / (params.rho0 * libm::pow(params.r0, -params.alpha));
    let density = libm::pow(PI * params.lambda, half) / (half - 1.0);
    let order = libm::pow(cfg.m as f64 - ceil_half, 1.0 - half) / (cfg.n_r - cfg.m - 1) as f64;
    Ok(1.0 - link * density * order)
}

/// Continuous maximiser of the Markov lower bound over `M`:
/// `(1 - 2/α)(N_R - 1) + (2/α)⌈α/2⌉`.
pub fn lower_bound_maximizer(alpha: f64, n_r: u32) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", alpha, "pathloss exponent must exceed 2"));
    }
    let ceil_half = libm::ceil(alpha / 2.0);
    if (n_r as f64) < ceil_half + 3.0 {
        return Err(Error::invalid("n_r", n_r as f64, "need N_R >= ceil(alpha/2) + 3"));
    }
    let delta = 2.0 / alpha;
    Ok((1.0 - delta) * (n_r as f64 - 1.0) + delta * ceil_half)
}

/// Lower-triangular matrix whose row `i` (1-based) holds the success-probability
/// summands for `M = N_R - i`.
///
/// Rows `1..N_R-1` use the distance-threshold transform. Row `N_R` (`M = 0`)
/// has no distance-threshold counterpart and holds the exact no-cancellation
/// summands instead.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessMatrix {
    rows: Vec<Vec<f64>>,
}

impl SuccessMatrix {
    pub fn n_r(&self) -> usize {
        self.rows.len()
    }

    /// Entry `(i, j)` with 1-based indices; zero above the diagonal.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i - 1].get(j - 1).copied().unwrap_or(0.0)
    }

    /// Nonzero part of row `i` (1-based).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i - 1]
    }

    /// Row sums; entry `i - 1` is the success probability at `M = N_R - i`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().copied().collect::<CompensatedSum>().value())
            .collect()
    }

    /// Largest row sum over the distance-threshold rows `1..N_R-1`, with the
    /// corresponding `M`.
    pub fn max_approx_row_sum(&self) -> Option<(u32, f64)> {
        let n = self.rows.len();
        self.row_sums()
            .into_iter()
            .enumerate()
            .take(n.saturating_sub(1))
            .map(|(i, p)| ((n - 1 - i) as u32, p))
            .fold(None, |best, (m, p)| match best {
                Some((_, bp)) if bp > p => best,
                Some((bm, bp)) if bp == p && bm < m => best,
                _ => Some((m, p)),
            })
    }

    /// Induced ℓ1 norm (maximum absolute column sum), for comparison with the
    /// row-sum maximum.
    pub fn l1_norm(&self) -> f64 {
        (1..=self.rows.len())
            .map(|j| (1..=self.rows.len()).map(|i| libm::fabs(self.entry(i, j))).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn success_matrix(params: &NetworkParams, n_r: u32, theta: f64) -> Result<SuccessMatrix> {
    if n_r < 2 {
        return Err(Error::invalid("n_r", n_r as f64, "matrix form needs N_R >= 2"));
    }
    check_theta(theta)?;
    let s = params.laplace_point(theta);
    let mut rows = Vec::with_capacity(n_r as usize);
    for i in 1..=n_r {
        let cfg = PzfConfig::new(n_r, n_r - i)?;
        let derivs = if cfg.m == 0 {
            laplace_derivs_exact_m0(params, s, i as usize - 1)?
        } else {
            laplace_derivs_approx(params, &cfg, s, i as usize - 1)?
        };
        rows.push(derivs.terms);
    }
    Ok(SuccessMatrix { rows })
}

/// Exhaustive search for the best number of nulled interferers.
///
/// Uses the exact form at `M = 0` and the distance-threshold approximation for
/// `M ≥ 1`. Ties go to the smaller `M`.
pub fn find_optimal_m(params: &NetworkParams, n_r: u32, theta: f64) -> Result<(u32, f64)> {
    let mut best = (0, success_prob_exact_m0(params, n_r, theta)?);
    for m in 1..n_r {
        let p = success_prob_approx(params, &PzfConfig::new(n_r, m)?, theta)?;
        if p > best.1 {
            best = (m, p);
        }
    }
    Ok(best)
}

/// How a success probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ExactM0,
    Approx,
    UpperAlzer,
    LowerJindal,
    McExact,
    McApprox,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::ExactM0,
        Method::Approx,
        Method::UpperAlzer,
        Method::LowerJindal,
        Method::McExact,
        Method::McApprox,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::ExactM0 => "exact_m0",
            Method::Approx => "approx",
            Method::UpperAlzer => "upper_alzer",
            Method::LowerJindal => "lower_jindal",
            Method::McExact => "mc_exact",
            Method::McApprox => "mc_approx",
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, Method::McExact | Method::McApprox)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or(Error::invalid("method", f64::NAN, "unknown method tag"))
    }
}

/// Success probability against `M` at a fixed threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCurve {
    pub threshold: f64,
    pub points: Vec<(u32, f64)>,
    pub method: Method,
}

impl SuccessCurve {
    /// Evaluates an analytic method at every `M` in `ms`, skipping points where
    /// the method is not defined.
    pub fn analytic(
        params: &NetworkParams,
        n_r: u32,
        theta: f64,
        ms: impl IntoIterator<Item = u32>,
        method: Method,
    ) -> Result<Self> {
        let mut points = Vec::new();
        for m in ms {
            let cfg = PzfConfig::new(n_r, m)?;
            let p = match (method, m) {
                (Method::ExactM0, 0) => success_prob_exact_m0(params, n_r, theta),
                (Method::Approx, 1..) => success_prob_approx(params, &cfg, theta),
                (Method::UpperAlzer, 1..) => success_prob_upper_alzer(params, &cfg, theta),
                (Method::LowerJindal, _) => match success_prob_lower_jindal(params, &cfg, theta) {
                    Err(Error::NotDefined { .. }) => continue,
                    other => other,
                },
                (Method::McExact | Method::McApprox, _) => {
                    return Err(Error::invalid("method", f64::NAN, "Monte Carlo curves come from the simulator"))
                }
                _ => continue,
            }?;
            points.push((m, p));
        }
        Ok(Self {
            threshold: theta,
            points,
            method,
        })
    }
}
