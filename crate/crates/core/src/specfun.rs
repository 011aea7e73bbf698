//! Special functions used by the analytic success probabilities.
//!
//! The hypergeometric routines only cover what the interference Laplace
//! transform needs: real parameters in a small positive box and arguments on
//! the closed negative real axis. Every evaluation goes through the Pfaff
//! transformation
//!
//! ```text
//! 2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))
//! ```
//!
//! which maps `z ∈ (-∞, 0]` onto `w ∈ [0, 1)`, where the series has no sign
//! changes for the parameter family in use.
//!
//! The transformed series needs on the order of `32 (1 - z)` terms, so once
//! `1 - z` is large compared to the parameters the evaluation switches to the
//! `1/(1 - z)` connection formula
//!
//! ```text
//! 2F1(a, b; c; z) = Γ(c)Γ(b-a)/(Γ(b)Γ(c-a)) (1-z)^(-a) 2F1(a, c-b; a-b+1; 1/(1-z))
//!                 + Γ(c)Γ(a-b)/(Γ(a)Γ(c-b)) (1-z)^(-b) 2F1(b, c-a; b-a+1; 1/(1-z))
//! ```
//!
//! which needs `a - b` away from the integers. For the interference family
//! `a - b = 2/α ∈ (0, 1)`, and the second term dominates, so the two terms do
//! not cancel.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Relative tolerance on the estimated series tail.
pub const SERIES_TOLERANCE: f64 = 1e-14;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 10_000;

/// Largest derivative order accepted by [`gauss_2f1_derivs`].
pub const MAX_DERIVATIVE_ORDER: usize = 64;

const SAFE_MAX: f64 = 10.0;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "log_gamma",
            x,
        });
    }
    Ok(libm::lgamma(x))
}

/// Rising factorial `(x)_n = x (x + 1) ⋯ (x + n - 1)`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

/// Parameters `(a, b, c)` of a Gauss hypergeometric function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Hyp2F1Params {
    /// Checked constructor; all three parameters must lie in `(0, 10]`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v > 0.0 && v <= SAFE_MAX) {
                return Err(Error::invalid(name, v, "2F1 parameters must lie in (0, 10]"));
            }
        }
        Ok(Self { a, b, c })
    }

    /// The family `(1, 1 - 2/α, 2 - 2/α)` that appears in the interference
    /// integral for pathloss exponent `α > 2`.
    pub fn interference(alpha: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::invalid("alpha", alpha, "pathloss exponent must exceed 2"));
        }
        let delta = 2.0 / alpha;
        Self::new(1.0, 1.0 - delta, 2.0 - delta)
    }

    fn shifted(&self, k: usize) -> Self {
        let k = k as f64;
        Self {
            a: self.a + k,
            b: self.b + k,
            c: self.c + k,
        }
    }
}

/// `2F1(a, b; c; z)` for `z ≤ 0`.
pub fn gauss_2f1_negz(p: &Hyp2F1Params, z: f64) -> Result<f64> {
    let p = Hyp2F1Params::new(p.a, p.b, p.c)?;
    check_argument(z)?;
    evaluate(&p, z)
}

/// `[F(z), F'(z), …, F^(n_max)(z)]` for `F = 2F1(a, b; c; ·)` and `z ≤ 0`.
///
/// Order `k` uses `F^(k) = (a)_k (b)_k / (c)_k · 2F1(a + k, b + k; c + k; z)`,
/// each shifted function through its own Pfaff transformation. Only the base
/// parameters are range-checked; the shifted ones leave the box by design.
pub fn gauss_2f1_derivs(p: &Hyp2F1Params, z: f64, n_max: usize) -> Result<Vec<f64>> {
    let p = Hyp2F1Params::new(p.a, p.b, p.c)?;
    check_argument(z)?;
    if n_max > MAX_DERIVATIVE_ORDER {
        return Err(Error::invalid(
            "n_max",
            n_max as f64,
            "derivative order above supported maximum",
        ));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut coeff = 1.0;
    for k in 0..=n_max {
        if k > 0 {
            let j = (k - 1) as f64;
            coeff *= (p.a + j) * (p.b + j) / (p.c + j);
        }
        let value = evaluate(&p.shifted(k), z).map_err(|e| Error::DerivativeOrder {
            order: k,
            source: Box::new(e),
        })?;
        out.push(coeff * value);
    }
    Ok(out)
}

fn check_argument(z: f64) -> Result<()> {
    if z <= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "gauss_2f1_negz",
            x: z,
        })
    }
}

fn evaluate(p: &Hyp2F1Params, z: f64) -> Result<f64> {
    let far = 1.0 - z >= 4.0 * p.a.max(p.b) + 8.0;
    if far && p.c == p.b + 1.0 && p.a > p.b {
        Ok(incomplete_beta_form(p, z))
    } else if far && connection_applies(p) {
        Ok(connection(p, z))
    } else {
        pfaff(p, z)
    }
}

/// Whether the `1/(1 - z)` connection formula is free of poles.
fn connection_applies(p: &Hyp2F1Params) -> bool {
    let diff = p.a - p.b;
    libm::fabs(diff - libm::round(diff)) >= 0.05 && p.c - p.a > 0.0 && p.c - p.b > 0.0
}

/// `2F1(a, b; b + 1; -x) = b x^(-b) [B(b, a - b) - B_w(a - b, b)]` with
/// `w = 1/(1 + x)`, the incomplete beta taken as
/// `w^p/p · 2F1(p, 1 - q; p + 1; w)`.
fn incomplete_beta_form(p: &Hyp2F1Params, z: f64) -> f64 {
    let (a, b) = (p.a, p.b);
    let x = -z;
    let d = a - b;
    let log_full = libm::log(b) - b * libm::log(x) + libm::lgamma(b) + libm::lgamma(d) - libm::lgamma(a);
    let w = 1.0 / (1.0 + x);
    let tail_series = unit_interval_series(d, 1.0 - b, d + 1.0, w).expect("w <= 1/8 converges quickly");
    let log_tail = libm::log(b) - b * libm::log(x) - d * libm::log1p(x) - libm::log(d);
    let ratio = libm::exp(log_tail - log_full) * tail_series;
    libm::exp(log_full) * (1.0 - ratio)
}

fn connection(p: &Hyp2F1Params, z: f64) -> f64 {
    let Hyp2F1Params { a, b, c } = *p;
    let y = 1.0 / (1.0 - z);
    let log_1mz = libm::log1p(-z);
    let term = |first: f64, second: f64, ab: f64| {
        // Γ(c)Γ(second - first)/(Γ(second)Γ(c - first)) (1-z)^(-first) 2F1(first, c - second; ab; y)
        let (lg_diff, sign) = libm::lgamma_r(second - first);
        let series = unit_interval_series(first, c - second, ab, y).expect("|y| <= 1/8 converges quickly");
        let log_mag = libm::lgamma(c) + lg_diff - libm::lgamma(second) - libm::lgamma(c - first) - first * log_1mz
            + libm::log(libm::fabs(series));
        sign as f64 * libm::copysign(libm::exp(log_mag), series)
    };
    term(a, b, a - b + 1.0) + term(b, a, b - a + 1.0)
}

fn pfaff(p: &Hyp2F1Params, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    let w = z / (z - 1.0);
    let series = unit_interval_series(p.a, p.c - p.b, p.c, w).ok_or(Error::NonConvergence {
        z,
        terms: MAX_SERIES_TERMS,
    })?;
    // (1 - z)^(-a) may underflow for large shifted `a`; fold it in last.
    Ok(libm::exp(-p.a * libm::log1p(-z)) * series)
}

/// Power series of `2F1(a, b; c; w)` for `0 ≤ w < 1`.
///
/// Stops once the geometric tail estimate `|t| ρ / (1 - ρ)` drops below the
/// tolerance, with `ρ` the larger of the current term ratio and its limit `w`.
fn unit_interval_series(a: f64, b: f64, c: f64, w: f64) -> Option<f64> {
    debug_assert!((0.0..1.0).contains(&w));
    let mut acc = CompensatedSum::default();
    let mut term = 1.0_f64;
    acc.add(term);
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * w;
        term *= ratio;
        acc.add(term);
        let sum = acc.value();
        if term == 0.0 {
            return Some(sum);
        }
        let rho = libm::fabs(ratio).max(w);
        let settled = a + nf > 0.0 && b + nf > 0.0 && c + nf > 0.0;
        if settled && rho < 1.0 && libm::fabs(term) * rho / (1.0 - rho) <= SERIES_TOLERANCE * libm::fabs(sum)
        {
            return Some(sum);
        }
    }
    None
}
