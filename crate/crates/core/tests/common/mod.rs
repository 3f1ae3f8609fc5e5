//! Independent reference computations for the integration tests. Nothing
//! here calls the library's special functions or quadrature.

#![allow(dead_code)]

use std::f64::consts::{LOG2_E, PI};

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// E_H ∫_D^∞ (1 − e^{−w H r^{−α}}) 2r dr for Nakagami-m H, straight from the
/// definition. With u = r² = D²/v² the integrand is smooth on (0, 1].
pub fn interference_a_oracle(w: f64, d_alpha: f64, m: f64, alpha: f64) -> f64 {
    let d2 = d_alpha.powf(2.0 / alpha);
    let x = w / d_alpha;
    let f = |v: f64| {
        if v == 0.0 {
            return if alpha == 4.0 { 0.0 } else { f64::NAN };
        }
        let y = x * v.powf(alpha) / m;
        let laplace_gap = -(-m * y.ln_1p()).exp_m1();
        laplace_gap * 2.0 * d2 / (v * v * v)
    };
    // For α < 4 the integrand tends to a constant at v → 0; skip the point.
    let eps = if alpha == 4.0 { 0.0 } else { 1e-9 };
    simpson(f, eps, 1.0, 200_000)
}

/// log2(e) ∫_0^∞ 4 / ((1 + φ̄ s²)(2s − 2 arctan s + π)) ds, mapped to (0, 1)
/// by s = t / (1 − t).
pub fn rate_alpha4_oracle(phi: f64) -> f64 {
    let f = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = t / (1.0 - t);
        let jac = 1.0 / ((1.0 - t) * (1.0 - t));
        4.0 / ((1.0 + phi * s * s) * (2.0 * s - 2.0 * s.atan() + PI)) * jac
    };
    LOG2_E * simpson(f, 0.0, 1.0, 400_000)
}

/// Activity probability 1 − exp(−λ_u / (λ_b E)) of one tier alone.
pub fn single_tier_activity(lu: f64, displaced: f64) -> f64 {
    1.0 - (-lu / displaced).exp()
}

/// Activity of a Poisson-Voronoi cell: one minus the probability that a
/// Gamma(3.5)-sized cell holds no UE. A well-known empirical fit, used to
/// explain the simulated values.
pub fn voronoi_activity(ratio: f64) -> f64 {
    1.0 - (1.0 + ratio / 3.5).powf(-3.5)
}

/// Relative difference |a − b| / |b|.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
