//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use pzf_udn::parallel;
use pzf_udn::validate::ks_distance_exponential;
use pzf_udn_core::analytic::{self, NetworkParams, PzfConfig};
use pzf_udn_core::simulator::{self, ChannelDraw, SimConfig, SimModel, SuccessEstimate};
use pzf_udn_core::specfun::{self, Hyp2F1Params};
use rand::Rng;

#[path = "../../core/tests/common/mod.rs"]
mod common;

const SEED: u64 = 1;
const N_R: u32 = 10;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn mc(params: &NetworkParams, m: u32, theta: f64, trials: u64, model: SimModel) -> SuccessEstimate {
    let cfg = PzfConfig::new(N_R, m).unwrap();
    parallel::estimate_success(params, &cfg, theta, &SimConfig::new(trials, SEED, model)).unwrap()
}

fn approx(params: &NetworkParams, m: u32, theta: f64) -> f64 {
    analytic::success_prob_approx(params, &PzfConfig::new(N_R, m).unwrap(), theta).unwrap()
}

fn theorem2_under_its_own_model() -> Verdict {
    let mut misses = Vec::new();
    let mut worst: f64 = 0.0;
    for lambda in [1e-3, 1e-2, 2e-2] {
        let p = NetworkParams::reference(lambda);
        for m in [1, 3, 5] {
            let est = mc(&p, m, 1.0, 100_000, SimModel::ApproxDm);
            let a = approx(&p, m, 1.0);
            worst = worst.max((a - est.p_hat).abs() / est.half_width);
            if !est.covers(a) {
                misses.push(format!("λ={lambda} M={m}: {a:.5} vs {:.5}±{:.5}", est.p_hat, est.half_width));
            }
        }
    }
    verdict(
        misses.is_empty(),
        if misses.is_empty() {
            format!("9/9 inside the 99% interval, worst |gap|/half-width {worst:.2}")
        } else {
            misses.join("; ")
        },
    )
}

fn theorem1_at_zero() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for lambda in [1e-3, 1e-2, 2e-2] {
        let p = NetworkParams::reference(lambda);
        let exact = analytic::success_prob_exact_m0(&p, N_R, 1.0).unwrap();
        let est = mc(&p, 0, 1.0, 100_000, SimModel::GammaShortcut);
        ok &= est.covers(exact);
        parts.push(format!("λ={lambda}: {exact:.5} vs {:.5}±{:.5}", est.p_hat, est.half_width));
    }
    verdict(ok, parts.join(", "))
}

fn approximation_tightness() -> Verdict {
    let p = NetworkParams::reference(1e-2);
    let (mut worst, mut at) = (0.0, 0);
    for m in 1..N_R {
        let gap = (approx(&p, m, 1.0) - mc(&p, m, 1.0, 10_000, SimModel::GammaShortcut).p_hat).abs();
        if gap > worst {
            (worst, at) = (gap, m);
        }
    }
    verdict(worst <= 0.03, format!("max |approx - mc_exact| = {worst:.4} at M={at} (tolerance 0.03)"))
}

fn bound_ordering() -> Verdict {
    let p = NetworkParams::reference(1e-2);
    let mut problems = Vec::new();
    let mut checked_lower = 0;
    for m in 1..N_R {
        let cfg = PzfConfig::new(N_R, m).unwrap();
        let a = approx(&p, m, 1.0);
        let upper = analytic::success_prob_upper_alzer(&p, &cfg, 1.0).unwrap();
        // the two coincide when one degree of freedom is left
        if upper < a - 1e-12 {
            problems.push(format!("M={m}: upper {upper:.6} < approx {a:.6}"));
        }
        if let Ok(lower) = analytic::success_prob_lower_jindal(&p, &cfg, 1.0) {
            checked_lower += 1;
            let est = mc(&p, m, 1.0, 10_000, SimModel::GammaShortcut);
            if est.p_hat <= lower {
                problems.push(format!("M={m}: mc_exact {:.4} <= lower {lower:.4}", est.p_hat));
            }
        }
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            format!("upper >= approx at M=1..9; mc_exact > lower bound at the {checked_lower} defined M")
        } else {
            problems.join("; ")
        },
    )
}

/// Signs of `approx - mc_exact` where the gap exceeds the half-width.
fn significant_signs(points: &[(NetworkParams, f64)]) -> (Vec<i8>, Vec<String>) {
    let mut signs = Vec::new();
    let mut notes = Vec::new();
    for (p, theta) in points {
        let est = mc(p, 5, *theta, 100_000, SimModel::GammaShortcut);
        let gap = approx(p, 5, *theta) - est.p_hat;
        let sign = if gap.abs() <= est.half_width { 0 } else { gap.signum() as i8 };
        notes.push(format!("{gap:+.4}"));
        if sign != 0 {
            signs.push(sign);
        }
    }
    (signs, notes)
}

fn single_positive_to_negative(signs: &[i8]) -> bool {
    let first_negative = signs.iter().position(|&s| s < 0);
    match first_negative {
        Some(i) => i > 0 && signs[i..].iter().all(|&s| s < 0),
        None => false,
    }
}

fn crossover() -> Verdict {
    let lambdas = [2e-3, 5e-3, 1e-2, 2e-2, 5e-2];
    let by_lambda: Vec<_> = lambdas.iter().map(|&l| (NetworkParams::reference(l), 1.0)).collect();
    let by_theta: Vec<_> = [0.1, 1.0, 10.0]
        .iter()
        .map(|&t| (NetworkParams::reference(1e-2), t))
        .collect();
    let (s_lambda, n_lambda) = significant_signs(&by_lambda);
    let (s_theta, n_theta) = significant_signs(&by_theta);
    let ok = single_positive_to_negative(&s_lambda) && single_positive_to_negative(&s_theta);
    verdict(
        ok,
        format!(
            "approx - mc_exact over λ: [{}]; over θ: [{}]",
            n_lambda.join(", "),
            n_theta.join(", ")
        ),
    )
}

fn optimal_m_claims() -> Verdict {
    let mut above_half = Vec::new();
    let mut at_densest = Vec::new();
    for n_r in [4, 8, 12, 16, 20] {
        for lambda in [1e-3, 3e-3, 1e-2, 3e-2, 1e-1] {
            let (m_star, _) = analytic::find_optimal_m(&NetworkParams::reference(lambda), n_r, 1.0).unwrap();
            if m_star > n_r / 2 {
                above_half.push(format!("N_R={n_r} λ={lambda}: M*={m_star}"));
            }
            if lambda == 1e-1 {
                at_densest.push(format!("{n_r}:{m_star}"));
            }
        }
    }
    let all_zero = at_densest.iter().all(|s| s.ends_with(":0"));
    verdict(
        above_half.is_empty() && all_zero,
        format!(
            "M* <= N_R/2 violations: [{}]; M* at λ=0.1 (N_R:M*): [{}]",
            above_half.join("; "),
            at_densest.join(", ")
        ),
    )
}

fn special_function_oracles() -> Verdict {
    let p = Hyp2F1Params::new(1.0, 0.5, 1.5).unwrap();
    let sup = (0..1000)
        .map(|i| {
            let z = 100.0 * i as f64 / 999.0;
            let exact = if z == 0.0 { 1.0 } else { z.sqrt().atan() / z.sqrt() };
            (specfun::gauss_2f1_negz(&p, -z).unwrap() - exact).abs()
        })
        .fold(0.0, f64::max);
    let mut rng = simulator::trial_rng(SEED, 7);
    let mut worst: f64 = 0.0;
    for _ in 0..27 {
        let alpha = rng.random_range(2.2..6.0);
        let lambda = 10f64.powf(rng.random_range(-4.0..-1.0));
        let theta = 10f64.powf(rng.random_range(-2.0..2.0));
        let m = rng.random_range(1..N_R);
        let params = NetworkParams::new(lambda, alpha, 1.0, 1.0, 10.0).unwrap();
        let cfg = PzfConfig::new(N_R, m).unwrap();
        let s = params.laplace_point(theta);
        let d = analytic::mean_mth_distance(&params, m).unwrap();
        let got = analytic::laplace_derivs_approx(&params, &cfg, s, 0).unwrap().values[0];
        let want = common::laplace_by_quadrature(&params, d, s);
        worst = worst.max((got - want).abs() / want);
    }
    verdict(
        sup <= 1e-10 && worst <= 1e-8,
        format!("arctan sup error {sup:.2e}; worst relative quadrature gap {worst:.2e} over 27 points"),
    )
}

fn distance_formula() -> Verdict {
    let p = NetworkParams::reference(1e-2);
    let sim = SimConfig::new(100_000, SEED, SimModel::GammaShortcut);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for m in [1, 2, 5, 10] {
        let empirical = simulator::empirical_mth_distance(&p, m, &sim).unwrap();
        let closed = analytic::mean_mth_distance(&p, m).unwrap();
        worst = worst.max((empirical / closed - 1.0).abs());
        parts.push(format!("m={m}: {empirical:.4} vs {closed:.4}"));
    }
    verdict(worst <= 0.01, format!("{} (worst {:.3}%)", parts.join(", "), 100.0 * worst))
}

fn fading_distributions() -> Verdict {
    let trials = 100_000usize;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut leak = Vec::with_capacity(trials);
    for m in [0usize, 3, 7] {
        let mut signal = Vec::with_capacity(trials);
        for t in 0..trials as u64 {
            let mut rng = simulator::trial_rng(SEED ^ ((m as u64) << 32), t);
            let ch = ChannelDraw::sample(&mut rng, N_R as usize, m + 1);
            let v = simulator::pzf_combiner(&ch.h0, &ch.nearest(m)).unwrap();
            signal.push(simulator::combined_power(&v, &ch.h0));
            if m == 3 {
                leak.push(simulator::combined_power(&v, ch.interferer(m)));
            }
        }
        let n = trials as f64;
        let k = (N_R as usize - m) as f64;
        let mean = signal.iter().sum::<f64>() / n;
        let var = signal.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let z_mean = (mean - k) / (k / n).sqrt();
        let z_var = (var - k) / ((2.0 * k * k + 6.0 * k) / n).sqrt();
        ok &= z_mean.abs() <= 3.0 && z_var.abs() <= 3.0;
        parts.push(format!("M={m}: mean {mean:.3} ({z_mean:+.1} SE), var {var:.3} ({z_var:+.1} SE)"));
    }
    let ks = ks_distance_exponential(&mut leak);
    ok &= ks <= 0.01;
    verdict(ok, format!("{}; KS of uncancelled power {ks:.4}", parts.join(", ")))
}

fn sweep_csv(threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_pzf-udn"))
        .args(["sweep", "--preset", "fig1l", "--seed", "42"])
        .env("PZF_UDN_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Verdict {
    let one = sweep_csv("1");
    let eight = sweep_csv("8");
    verdict(
        one == eight && !one.is_empty(),
        format!("{} bytes on 1 worker, {} bytes on 8, identical: {}", one.len(), eight.len(), one == eight),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("approximation equals its own model (mc_approx, 1e5 trials)", theorem2_under_its_own_model),
        ("exact M=0 form equals mc_exact (1e5 trials)", theorem1_at_zero),
        ("approximation within 0.03 of mc_exact at the fig1l settings", approximation_tightness),
        ("upper bound >= approx, mc_exact > lower bound", bound_ordering),
        ("approx - mc_exact turns from positive to negative in λ and θ", crossover),
        ("M* <= N_R/2 everywhere and M* = 0 at λ = 0.1", optimal_m_claims),
        ("2F1 arctan identity and Laplace quadrature", special_function_oracles),
        ("empirical d_M within 1% of the closed form", distance_formula),
        ("signal power moments and uncancelled power law", fading_distributions),
        ("fig1l CSV identical on 1 and 8 workers", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag} {name}: {} [{:.1} s]",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!v.passed);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
