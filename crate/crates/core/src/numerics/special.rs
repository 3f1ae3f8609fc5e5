//! Gamma, upper incomplete gamma and Gauss hypergeometric functions on the
//! real line.

use std::f64::consts::PI;

use super::NumericsError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_EPS: f64 = 1e-16;
const MAX_SERIES_TERMS: usize = 20_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(pi * x)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// The Gamma function for real arguments.
pub fn gamma_fn(x: f64) -> Result<f64, NumericsError> {
    if x.is_nan() {
        return Err(NumericsError::Domain("gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(NumericsError::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    // Small positive integers are exact factorials.
    if x == x.floor() && x <= 23.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// Reciprocal gamma, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

/// Natural log of |Γ(x)| for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, NumericsError> {
    if !(x > 0.0) {
        return Err(NumericsError::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (sin_pi(x) * gamma_unchecked(1.0 - x))).abs().ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Lower incomplete gamma γ(a, x) by its power series, a > 0.
fn lower_gamma_series(a: f64, x: f64) -> Result<f64, NumericsError> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = a;
    for _ in 0..MAX_SERIES_TERMS {
        n += 1.0;
        term *= x / n;
        sum += term;
        if term.abs() < sum.abs() * SERIES_EPS {
            return Ok(sum * (-x + a * x.ln()).exp());
        }
    }
    Err(NumericsError::NotConverged("lower incomplete gamma series"))
}

/// Γ(a, x) by the Legendre continued fraction (modified Lentz). Valid for
/// every real `a` when x > 0; converges quickly once x is past about a + 1.
fn upper_gamma_cf(a: f64, x: f64) -> Result<f64, NumericsError> {
    Ok((-x + a * x.ln()).exp() * upper_gamma_cf_fraction(a, x)?)
}

// The continued fraction part alone: Γ(a, x) = e^{-x} x^a · fraction.
fn upper_gamma_cf_fraction(a: f64, x: f64) -> Result<f64, NumericsError> {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_SERIES_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < SERIES_EPS {
            return Ok(h);
        }
    }
    Err(NumericsError::NotConverged("upper incomplete gamma continued fraction"))
}

/// Exponential integral E1(x) = Γ(0, x) for 0 < x < ~2 by its series.
fn exp_integral_e1_series(x: f64) -> Result<f64, NumericsError> {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() < SERIES_EPS * sum.abs().max(1e-300) {
            return Ok(-EULER_GAMMA - x.ln() - sum);
        }
    }
    Err(NumericsError::NotConverged("exponential integral series"))
}

/// Upper incomplete gamma Γ(a, x) = ∫ₓ^∞ e^{-s} s^{a-1} ds for real `a`
/// (negative values included) and x ≥ 0.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64, NumericsError> {
    if x.is_nan() || a.is_nan() {
        return Err(NumericsError::Domain("incomplete gamma of NaN".into()));
    }
    if x < 0.0 {
        return Err(NumericsError::Domain(format!(
            "incomplete gamma needs x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return if a > 0.0 {
            gamma_fn(a)
        } else {
            Ok(f64::INFINITY)
        };
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if a > 0.0 {
        if x < a + 1.0 {
            return Ok(gamma_unchecked(a) - lower_gamma_series(a, x)?);
        }
        return upper_gamma_cf(a, x);
    }
    if x >= 1.0 {
        return upper_gamma_cf(a, x);
    }
    // Small x, a <= 0: recur downward from an anchor in (0, 1] (or from
    // E1 when `a` is an integer).
    let steps = (-a).floor() as i64 + if a == a.floor() { 0 } else { 1 };
    let anchor = a + steps as f64;
    let mut value = if anchor == 0.0 {
        exp_integral_e1_series(x)?
    } else {
        gamma_unchecked(anchor) - lower_gamma_series(anchor, x)?
    };
    let mut s = anchor;
    let emx = (-x).exp();
    for _ in 0..steps {
        s -= 1.0;
        value = (value - x.powf(s) * emx) / s;
    }
    Ok(value)
}

/// Scaled complementary error function e^{x²}·erfc(x) for x ≥ 0. Stays
/// finite (≈ 1/(x√π)) where erfc itself underflows.
pub fn erfcx(x: f64) -> Result<f64, NumericsError> {
    if !(x >= 0.0) {
        return Err(NumericsError::Domain(format!("erfcx needs x >= 0, got {x}")));
    }
    let sqrt_pi = PI.sqrt();
    let x2 = x * x;
    if x2 < 1.5 {
        return Ok(x2.exp() * (sqrt_pi - lower_gamma_series(0.5, x2)?) / sqrt_pi);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x > 1e8 {
        return Ok(1.0 / (x * sqrt_pi));
    }
    // erfc(x) = Γ(1/2, x²)/√π and Γ(1/2, x²) = e^{-x²}·x·fraction.
    Ok(x * upper_gamma_cf_fraction(0.5, x2)? / sqrt_pi)
}

fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64, NumericsError> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < SERIES_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(NumericsError::NotConverged("hypergeometric series"))
}

/// Euler integral representation, used only when the 1/z connection formula
/// is degenerate (b - a an integer). Needs c > b > 0.
fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64) -> Result<f64, NumericsError> {
    let norm = gamma_fn(c)? * rgamma(b) * rgamma(c - b);
    let q = super::quadrature::Quadrature::new()
        .abs_tol(0.0)
        .rel_tol(1e-13)
        .max_subdivisions(2000);
    let res = q
        .finite(
            |t| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a),
            0.0,
            1.0,
        )
        .map_err(|_| NumericsError::NotConverged("hypergeometric Euler integral"))?;
    Ok(norm * res.value)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real parameters and
/// real z < 1.
///
/// Uses the power series for |z| ≤ 1/2, the Pfaff transformation for
/// -2 ≤ z < -1/2 and for 1/2 < z < 1 (which maps onto the negative axis),
/// and the 1/z connection formula for z < -2, so arbitrarily large negative
/// arguments are handled.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, NumericsError> {
    if [a, b, c, z].iter().any(|v| v.is_nan()) {
        return Err(NumericsError::Domain("hyp2f1 of NaN".into()));
    }
    if is_nonpositive_integer(c) {
        return Err(NumericsError::Pole(c));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if z >= 1.0 {
        return Err(NumericsError::Domain(format!(
            "hyp2f1 is only supported for z < 1, got {z}"
        )));
    }
    if z.abs() <= 0.5 || is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return hyp2f1_series(a, b, c, z);
    }
    if z > 0.5 {
        // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)), z/(z-1) < -1
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * hyp2f1(a, c - b, c, w)?);
    }
    if z >= -2.0 {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, w)?);
    }
    let diff = b - a;
    if diff == diff.round() {
        if c > b && b > 0.0 {
            return hyp2f1_euler(a, b, c, z);
        }
        if c > a && a > 0.0 {
            return hyp2f1_euler(b, a, c, z);
        }
        return Err(NumericsError::Domain(format!(
            "hyp2f1({a}, {b}; {c}; {z}): integer b - a outside the Euler-integral range"
        )));
    }
    let gc = gamma_fn(c)?;
    let inv = 1.0 / z;
    let mz = -z;
    let t1 = gc * gamma_fn(diff)? * rgamma(b) * rgamma(c - a);
    let t2 = gc * gamma_fn(-diff)? * rgamma(a) * rgamma(c - b);
    let mut total = 0.0;
    if t1 != 0.0 {
        total += t1 * mz.powf(-a) * hyp2f1_series(a, a - c + 1.0, a - b + 1.0, inv)?;
    }
    if t2 != 0.0 {
        total += t2 * mz.powf(-b) * hyp2f1_series(b, b - c + 1.0, b - a + 1.0, inv)?;
    }
    Ok(total)
}
