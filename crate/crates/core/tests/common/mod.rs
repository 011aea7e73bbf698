#![allow(dead_code)]

use std::f64::consts::PI;

use pzf_udn_core::NetworkParams;

const GL_NODES: [f64; 5] = [
    0.0,
    0.538_469_310_105_683_1,
    -0.538_469_310_105_683_1,
    0.906_179_845_938_664,
    -0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss5(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (left, right) = (gauss5(f, a, m), gauss5(f, m, b));
    let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || (left + right - whole).abs() <= tol.max(floor) {
        return left + right;
    }
    adaptive(f, a, m, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, right, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Legendre on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let whole = gauss5(&f, a, b);
    adaptive(&f, a, b, whole, tol, 30)
}

/// `∫_d^∞ sρ r / (r^α + sρ) dr` by direct quadrature. The substitution
/// `r = d v^(-1/(α-2))` turns it into a smooth integrand on `[0, 1]`.
pub fn exclusion_integral(params: &NetworkParams, d: f64, s: f64) -> f64 {
    let a = params.alpha;
    let sr = s * params.rho;
    let p = a / (a - 2.0);
    let da = d.powf(a);
    let scale = sr * d * d / (a - 2.0);
    let f = |v: f64| scale / (da + sr * v.powf(p));
    let rough = integrate(&f, 0.0, 1.0, 1e-6 * scale / da);
    integrate(f, 0.0, 1.0, 1e-15 * rough.abs())
}

/// Laplace transform of the interference beyond `d`, by quadrature.
pub fn laplace_by_quadrature(params: &NetworkParams, d: f64, s: f64) -> f64 {
    (-2.0 * PI * params.lambda * exclusion_integral(params, d, s)).exp()
}

/// Laplace transform of the whole-plane interference, by quadrature.
pub fn laplace_full_by_quadrature(params: &NetworkParams, s: f64) -> f64 {
    let sr = s * params.rho;
    let knee = sr.powf(1.0 / params.alpha);
    let near = integrate(|r| sr * r / (r.powf(params.alpha) + sr), 0.0, knee, 1e-15 * knee * knee);
    (-2.0 * PI * params.lambda * (near + exclusion_integral(params, knee, s))).exp()
}
