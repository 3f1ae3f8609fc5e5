mod common;

use approx::assert_relative_eq;
use densenet::numerics::{
    brent_root, erfcx, gamma_fn, hyp2f1, ln_gamma, upper_incomplete_gamma, Quadrature,
};
use proptest::prelude::*;

use common::simpson;

#[test]
fn semi_infinite_quadrature_matches_simpson() {
    let f = |x: f64| (-x).exp() / (1.0 + x * x);
    let q = Quadrature::new().semi_infinite(f).unwrap().value;
    // Tail beyond 60 is below e^-60.
    let reference = simpson(f, 0.0, 60.0, 600_000);
    assert_relative_eq!(q, reference, max_relative = 1e-10);
}

#[test]
fn real_line_quadrature_of_a_gaussian() {
    let q = Quadrature::new()
        .real_line(|y: f64| (-(y - 3.0) * (y - 3.0)).exp(), 3.0)
        .unwrap()
        .value;
    assert_relative_eq!(q, std::f64::consts::PI.sqrt(), max_relative = 1e-10);
}

#[test]
fn upper_gamma_matches_direct_integral() {
    for &(a, x) in &[(0.5, 0.3), (1.5, 2.0), (2.5, 7.0), (-0.5, 1.2)] {
        let direct = simpson(|t: f64| t.powf(a - 1.0) * (-t).exp(), x, x + 80.0, 800_000);
        assert_relative_eq!(upper_incomplete_gamma(a, x).unwrap(), direct, max_relative = 1e-9);
    }
}

#[test]
fn hyp2f1_matches_euler_integral() {
    // c > b > 0: Γ(c)/(Γ(b)Γ(c−b)) ∫ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt.
    for &(a, b, c, z) in &[(1.0, 0.5, 1.5, -3.0), (2.0, 1.5, 3.0, 0.4), (0.5, 1.0, 2.5, -0.9)] {
        let pre = gamma_fn(c).unwrap() / (gamma_fn(b).unwrap() * gamma_fn(c - b).unwrap());
        // t = s², which removes the t^{-1/2} endpoint singularity when b = 0.5.
        let integrand = |s: f64| {
            let t = s * s;
            2.0 * s * t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a)
        };
        let direct = pre * simpson(integrand, 1e-12, 1.0, 400_000);
        assert_relative_eq!(hyp2f1(a, b, c, z).unwrap(), direct, max_relative = 1e-7);
    }
}

#[test]
fn hyp2f1_elementary_case() {
    // 2F1(1, 1; 2; z) = −ln(1 − z)/z.
    for z in [-5.0, -0.5, 0.3, 0.9] {
        let want = -(-z as f64).ln_1p() / z;
        assert_relative_eq!(hyp2f1(1.0, 1.0, 2.0, z).unwrap(), want, max_relative = 1e-12);
    }
}

#[test]
fn brent_finds_cubic_root() {
    let r = brent_root(|x: f64| x * x * x - 2.0 * x - 5.0, 2.0, 3.0, 1e-14).unwrap();
    assert!((r - 2.094_551_481_542_326_5).abs() < 1e-12);
}

#[test]
fn brent_rejects_unbracketed_interval() {
    assert!(brent_root(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
}

proptest! {
    #[test]
    fn gamma_recurrence(x in 0.1f64..30.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn ln_gamma_is_log_of_gamma(x in 0.1f64..50.0) {
        let g = gamma_fn(x).unwrap();
        prop_assert!((ln_gamma(x).unwrap() - g.ln()).abs() <= 1e-12 * g.ln().abs().max(1.0));
    }

    #[test]
    fn upper_gamma_recurrence(a in 0.2f64..6.0, x in 0.01f64..30.0) {
        // Γ(a+1, x) = aΓ(a, x) + x^a e^{−x}.
        let lhs = upper_incomplete_gamma(a + 1.0, x).unwrap();
        let rhs = a * upper_incomplete_gamma(a, x).unwrap() + x.powf(a) * (-x).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs());
    }

    #[test]
    fn erfcx_is_decreasing_and_bounded(x in 0.0f64..1e4, dx in 1e-3f64..10.0) {
        let a = erfcx(x).unwrap();
        let b = erfcx(x + dx).unwrap();
        prop_assert!(b < a);
        prop_assert!(a <= 1.0);
        // Standard bounds: 2/(x+√(x²+2)) ≤ √π erfcx(x) ≤ 2/(x+√(x²+4/π)).
        let s = std::f64::consts::PI.sqrt() * a;
        prop_assert!(s >= 2.0 / (x + (x * x + 2.0).sqrt()) * (1.0 - 1e-12));
        prop_assert!(s <= 2.0 / (x + (x * x + 4.0 / std::f64::consts::PI).sqrt()) * (1.0 + 1e-12));
    }

    #[test]
    fn hyp2f1_is_symmetric_in_a_and_b(a in 0.1f64..3.0, b in 0.1f64..3.0, z in -0.9f64..0.9) {
        let c = a.max(b) + 1.0;
        let ab = hyp2f1(a, b, c, z).unwrap();
        let ba = hyp2f1(b, a, c, z).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-11 * ab.abs());
    }
}
