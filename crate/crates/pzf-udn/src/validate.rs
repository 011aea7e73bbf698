//! Quick self-checks run by `pzf-udn validate`.

use std::fmt;

use pzf_udn_core::analytic::{self, NetworkParams, PzfConfig};
use pzf_udn_core::simulator::{self, ChannelDraw, SimConfig, SimModel};
use pzf_udn_core::specfun::{self, Hyp2F1Params};

use crate::parallel;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub seed: u64,
    pub trials: u64,
    /// Replaces the upper-bound scaling constant; a mutation-testing hook.
    pub kappa_override: Option<f64>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 10_000,
            kappa_override: None,
        }
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn failed(name: &'static str, err: impl fmt::Display) -> Check {
    check(name, false, format!("error: {err}"))
}

/// Largest gap between the empirical CDF of `samples` and the unit exponential.
pub fn ks_distance_exponential(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x).exp();
            (cdf - i as f64 / n).abs().max((i as f64 + 1.0) / n - cdf)
        })
        .fold(0.0, f64::max)
}

fn arctan_identity() -> Check {
    const NAME: &str = "hyp2f1_arctan_identity";
    let p = match Hyp2F1Params::new(1.0, 0.5, 1.5) {
        Ok(p) => p,
        Err(e) => return failed(NAME, e),
    };
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let z = 100.0 * i as f64 / 999.0;
        let expected = if z == 0.0 { 1.0 } else { z.sqrt().atan() / z.sqrt() };
        match specfun::gauss_2f1_negz(&p, -z) {
            Ok(v) => worst = worst.max((v - expected).abs()),
            Err(e) => return failed(NAME, e),
        }
    }
    check(NAME, worst <= 1e-10, format!("sup error {worst:.2e} over z in [0, 100]"))
}

fn complete_monotonicity() -> Check {
    const NAME: &str = "laplace_sign_alternation";
    let params = NetworkParams::reference(1e-2);
    let cfg = PzfConfig { n_r: 10, m: 3 };
    match analytic::laplace_derivs_approx(&params, &cfg, params.laplace_point(1.0), 20) {
        Ok(d) => {
            let bad = d
                .values
                .iter()
                .enumerate()
                .find(|(n, v)| if n % 2 == 0 { **v < 0.0 } else { **v > 0.0 });
            check(
                NAME,
                bad.is_none(),
                match bad {
                    None => "(-1)^n L^(n) >= 0 for n <= 20".to_string(),
                    Some((n, v)) => format!("derivative {n} has the wrong sign ({v:e})"),
                },
            )
        }
        Err(e) => failed(NAME, e),
    }
}

fn nearest_distance(opts: &ValidateOptions) -> Check {
    const NAME: &str = "mean_nearest_distance";
    let params = NetworkParams::reference(1e-2);
    let sim = SimConfig::new(opts.trials, opts.seed, SimModel::GammaShortcut);
    let expected = match analytic::mean_mth_distance(&params, 1) {
        Ok(d) => d,
        Err(e) => return failed(NAME, e),
    };
    match simulator::empirical_mth_distance(&params, 1, &sim) {
        Ok(d) => {
            let rel = (d - expected).abs() / expected;
            check(NAME, rel <= 0.015, format!("empirical {d:.4} m vs {expected:.4} m"))
        }
        Err(e) => failed(NAME, e),
    }
}

/// Signal power after nulling and one uncancelled interferer power, from
/// explicit channel draws.
fn combiner_powers(opts: &ValidateOptions, n_r: u32, m: u32) -> pzf_udn_core::Result<(Vec<f64>, Vec<f64>)> {
    let mut signal = Vec::with_capacity(opts.trials as usize);
    let mut leak = Vec::with_capacity(opts.trials as usize);
    for t in 0..opts.trials {
        let mut rng = simulator::trial_rng(opts.seed ^ 0x5eed, t);
        let ch = ChannelDraw::sample(&mut rng, n_r as usize, m as usize + 1);
        let v = simulator::pzf_combiner(&ch.h0, &ch.nearest(m as usize))?;
        signal.push(simulator::combined_power(&v, &ch.h0));
        leak.push(simulator::combined_power(&v, ch.interferer(m as usize)));
    }
    Ok((signal, leak))
}

fn fading_laws(opts: &ValidateOptions) -> [Check; 2] {
    const MOMENTS: &str = "signal_power_moments";
    const KS: &str = "interferer_power_exponential";
    let (n_r, m) = (10, 3);
    let (signal, mut leak) = match combiner_powers(opts, n_r, m) {
        Ok(v) => v,
        Err(e) => return [failed(MOMENTS, &e), failed(KS, &e)],
    };
    let n = signal.len() as f64;
    let k = (n_r - m) as f64;
    let mean = signal.iter().sum::<f64>() / n;
    let var = signal.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // Gamma(k, 1): variance k, fourth central moment 3k² + 6k
    let se_mean = (k / n).sqrt();
    let se_var = ((2.0 * k * k + 6.0 * k) / n).sqrt();
    let moments_ok = (mean - k).abs() <= 3.0 * se_mean && (var - k).abs() <= 3.0 * se_var;
    let ks = ks_distance_exponential(&mut leak);
    [
        check(
            MOMENTS,
            moments_ok,
            format!("N_R = {n_r}, M = {m}: mean {mean:.4}, variance {var:.4}, expected {k}"),
        ),
        check(KS, ks <= 0.02, format!("KS distance {ks:.4}")),
    ]
}

fn approx_vs_simulation(opts: &ValidateOptions) -> Check {
    const NAME: &str = "approx_matches_mc_approx";
    let params = NetworkParams::reference(1e-2);
    // 99.9% intervals keep the false-alarm rate of the three comparisons low
    let sim = SimConfig {
        confidence_level: 0.999,
        ..SimConfig::new(opts.trials, opts.seed, SimModel::ApproxDm)
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [1, 3, 5] {
        let cfg = PzfConfig { n_r: 10, m };
        let analytic = match analytic::success_prob_approx(&params, &cfg, 1.0) {
            Ok(p) => p,
            Err(e) => return failed(NAME, e),
        };
        let est = match parallel::estimate_success(&params, &cfg, 1.0, &sim) {
            Ok(e) => e,
            Err(e) => return failed(NAME, e),
        };
        ok &= est.covers(analytic);
        parts.push(format!(
            "M={m} {analytic:.4} vs {:.4}±{:.4}",
            est.p_hat, est.half_width
        ));
    }
    check(NAME, ok, parts.join(", "))
}

fn upper_bound_ordering(opts: &ValidateOptions) -> Check {
    const NAME: &str = "upper_bound_ordering";
    let params = NetworkParams::reference(1e-2);
    for m in 1..10 {
        let cfg = PzfConfig { n_r: 10, m };
        let kappa = match opts.kappa_override {
            Some(k) => k,
            None => match analytic::alzer_kappa(&cfg) {
                Ok(k) => k,
                Err(e) => return failed(NAME, e),
            },
        };
        let bound = analytic::alternating_bound(&params, &cfg, 1.0, kappa);
        let approx = analytic::success_prob_approx(&params, &cfg, 1.0);
        match (bound, approx) {
            // equality holds at N_R - M = 1, so allow rounding
            (Ok(b), Ok(a)) if b.value < a - 1e-12 => {
                return check(NAME, false, format!("M={m}: bound {:.6} below approximation {a:.6}", b.value))
            }
            (Err(e), _) | (_, Err(e)) => return failed(NAME, e),
            _ => {}
        }
    }
    check(NAME, true, "upper bound >= approximation for M = 1..9".to_string())
}

fn worker_independence(opts: &ValidateOptions) -> Check {
    const NAME: &str = "worker_count_independence";
    let params = NetworkParams::reference(1e-2);
    let cfg = PzfConfig { n_r: 10, m: 5 };
    let sim = SimConfig::new(opts.trials.min(4000), opts.seed, SimModel::GammaShortcut);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())
            .and_then(|pool| {
                pool.install(|| parallel::estimate_success(&params, &cfg, 1.0, &sim))
                    .map_err(|e| e.to_string())
            })
    };
    match (run(1), run(4)) {
        (Ok(a), Ok(b)) => check(
            NAME,
            a == b,
            format!("{} successes on 1 worker, {} on 4", a.successes, b.successes),
        ),
        (Err(e), _) | (_, Err(e)) => failed(NAME, e),
    }
}

/// Runs every check in a fixed order.
pub fn run_checks(opts: &ValidateOptions) -> Vec<Check> {
    let mut checks = vec![arctan_identity(), complete_monotonicity(), nearest_distance(opts)];
    checks.extend(fading_laws(opts));
    checks.push(approx_vs_simulation(opts));
    checks.push(upper_bound_ordering(opts));
    checks.push(worker_independence(opts));
    checks
}
