//! Scalar root finding: Brent's method and positive real roots of
//! polynomials.

use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Find a root of `f` inside `[lo, hi]` with Brent's method.
///
/// The bracket must straddle a sign change. The returned abscissa lies in a
/// final bracket no wider than `tol` (plus a few ulps of the root itself).
pub fn brent_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(NumericsError::NonFinite { at: a });
    }
    if !fb.is_finite() {
        return Err(NumericsError::NonFinite { at: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(NumericsError::NonFinite { at: b });
        }
    }
    Err(NumericsError::NotConverged("brent root search"))
}

/// Positive real roots of a polynomial with coefficients in ascending
/// degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRealRoots {
    pub coefficients: Vec<f64>,
    pub positive_real_roots: Vec<f64>,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn abs_scale(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x.abs() + k.abs())
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &k)| i as f64 * k)
        .collect()
}

// Roots of `c` in the open interval (0, bound), found by splitting at the
// critical points so that every piece is monotone.
fn roots_below(c: &[f64], bound: f64) -> Result<Vec<f64>, NumericsError> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg == 1 {
        let r = -c[0] / c[1];
        return Ok(if r > 0.0 && r < bound { vec![r] } else { Vec::new() });
    }
    let crit = roots_below(&derivative(c), bound)?;
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(0.0);
    knots.extend(crit.iter().copied());
    knots.push(bound);
    let mut out: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let flo = horner(c, lo);
        let fhi = horner(c, hi);
        if flo == 0.0 && lo > 0.0 {
            out.push(lo);
            continue;
        }
        if flo.signum() != fhi.signum() && fhi != 0.0 {
            let tol = 4.0 * f64::EPSILON * hi.max(1e-300);
            out.push(brent_root(|x| horner(c, x), lo, hi, tol)?);
        }
    }
    // Even-multiplicity roots touch zero at a critical point without a sign
    // change.
    for &x in &crit {
        if horner(c, x).abs() <= 1e-12 * abs_scale(c, x) {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1e-300));
    Ok(out)
}

/// Locate every strictly positive real root of the polynomial
/// `Σ coefficients[i]·x^i`.
pub fn positive_real_roots(coefficients: &[f64]) -> Result<PolynomialRealRoots, NumericsError> {
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(NumericsError::Domain("non-finite polynomial coefficient".into()));
    }
    let last = coefficients
        .iter()
        .rposition(|&c| c != 0.0)
        .ok_or(NumericsError::DegeneratePolynomial)?;
    let first = coefficients.iter().position(|&c| c != 0.0).unwrap_or(0);
    // Dividing out x^first drops the zero roots, which are not positive.
    let trimmed: Vec<f64> = coefficients[first..=last].to_vec();
    let lead = trimmed[trimmed.len() - 1];
    // Normalize to a monic polynomial so the tolerances are scale-free.
    let monic: Vec<f64> = trimmed.iter().map(|&c| c / lead).collect();
    let cauchy = 1.0 + monic[..monic.len() - 1].iter().fold(0.0_f64, |m, &c| m.max(c.abs()));
    let mut roots = roots_below(&monic, cauchy * (1.0 + 1e-12))?;
    roots.retain(|&r| r > 0.0);
    Ok(PolynomialRealRoots {
        coefficients: coefficients.to_vec(),
        positive_real_roots: roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_reference_roots() {
        let r = brent_root(|x| x - 2.0, 0.0, 5.0, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn brent_rejects_bad_bracket() {
        let e = brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10);
        assert!(matches!(e, Err(NumericsError::NoSignChange { .. })));
    }

    #[test]
    fn polynomial_examples() {
        let r = positive_real_roots(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.positive_real_roots.len(), 1);
        assert!((r.positive_real_roots[0] - 1.0).abs() < 1e-12);

        let r = positive_real_roots(&[-6.0, 11.0, -6.0, 1.0]).unwrap();
        let got = &r.positive_real_roots;
        assert_eq!(got.len(), 3);
        for (g, want) in got.iter().zip([1.0, 2.0, 3.0]) {
            assert!((g - want).abs() < 1e-10, "{got:?}");
        }
    }

    #[test]
    fn double_root_and_zero_root() {
        // x (x - 2)^2 = x^3 - 4x^2 + 4x
        let r = positive_real_roots(&[0.0, 4.0, -4.0, 1.0]).unwrap();
        assert_eq!(r.positive_real_roots.len(), 1);
        assert!((r.positive_real_roots[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_polynomial() {
        assert!(matches!(
            positive_real_roots(&[0.0, 0.0]),
            Err(NumericsError::DegeneratePolynomial)
        ));
    }

    #[test]
    fn negative_roots_only() {
        let r = positive_real_roots(&[2.0, 3.0, 1.0]).unwrap();
        assert!(r.positive_real_roots.is_empty());
    }
}
