//! Globally adaptive Gauss-Kronrod (10/21) quadrature over finite intervals
//! and over (0, ∞) through the map x = s·t/(1 - t).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NumericsError;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_085_248,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integrator settings.
#[derive(Debug, Clone)]
pub struct Quadrature {
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
    scale: f64,
    parallel: bool,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 0.0,
            max_subdivisions: 1000,
            scale: 1.0,
            parallel: false,
        }
    }
}

impl Quadrature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n.max(1);
        self
    }

    /// Length scale of the semi-infinite map; half the mass of the mapped
    /// variable sits below `scale`.
    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Evaluate the 21 nodes of each rule application concurrently. The
    /// reduction order is fixed, so results are bit-identical to the serial
    /// path.
    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    fn rule<F>(&self, f: &F, a: f64, b: f64) -> Result<(f64, f64), NumericsError>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut xs = [0.0; 21];
        for j in 0..10 {
            xs[2 * j] = center - half * XGK[j];
            xs[2 * j + 1] = center + half * XGK[j];
        }
        xs[20] = center;
        let mut fv = [0.0; 21];
        if self.parallel {
            let vals: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
            fv.copy_from_slice(&vals);
        } else {
            for (y, &x) in fv.iter_mut().zip(xs.iter()) {
                *y = f(x);
            }
        }
        for (y, &x) in fv.iter().zip(xs.iter()) {
            if !y.is_finite() {
                return Err(NumericsError::NonFinite { at: x });
            }
        }
        let fc = fv[20];
        let mut resk = WGK[10] * fc;
        let mut resabs = resk.abs();
        let mut resg = 0.0;
        for j in 0..10 {
            let s = fv[2 * j] + fv[2 * j + 1];
            resk += WGK[j] * s;
            resabs += WGK[j] * (fv[2 * j].abs() + fv[2 * j + 1].abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * s;
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[10] * (fc - reskh).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv[2 * j] - reskh).abs() + (fv[2 * j + 1] - reskh).abs());
        }
        let value = resk * half;
        let resabs = resabs * half.abs();
        let resasc = resasc * half.abs();
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        Ok((value, err))
    }

    /// Integrate `f` over the finite interval [a, b].
    pub fn finite<F>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult, NumericsError>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 1,
            });
        }
        let (value, error) = self.rule(&f, a, b)?;
        let mut evaluations = 21;
        let mut heap = BinaryHeap::new();
        heap.push(Segment { a, b, value, error });
        let mut total = value;
        let mut total_err = error;
        let mut subdivisions = 1;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                break;
            }
            if subdivisions >= self.max_subdivisions {
                return Err(NumericsError::QuadratureNotConverged {
                    partial: QuadratureResult {
                        value: total,
                        abs_error_estimate: total_err,
                        evaluations,
                    },
                });
            }
            let worst = heap.pop().expect("heap holds at least one segment");
            let mid = 0.5 * (worst.a + worst.b);
            if (worst.b - worst.a).abs() <= 64.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
                // Cannot refine further: roundoff limit.
                heap.push(worst);
                return Err(NumericsError::QuadratureNotConverged {
                    partial: QuadratureResult {
                        value: total,
                        abs_error_estimate: total_err,
                        evaluations,
                    },
                });
            }
            let (v1, e1) = self.rule(&f, worst.a, mid)?;
            let (v2, e2) = self.rule(&f, mid, worst.b)?;
            evaluations += 42;
            subdivisions += 1;
            heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
            // Re-summing avoids drift from repeated incremental updates.
            let mut segs: Vec<&Segment> = heap.iter().collect();
            segs.sort_by(|x, y| x.a.total_cmp(&y.a));
            total = segs.iter().map(|s| s.value).sum();
            total_err = segs.iter().map(|s| s.error).sum();
        }
        Ok(QuadratureResult {
            value: total,
            abs_error_estimate: total_err,
            evaluations,
        })
    }

    /// Integrate `f` over (0, ∞).
    pub fn semi_infinite<F>(&self, f: F) -> Result<QuadratureResult, NumericsError>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let s = self.scale;
        let mapped = |t: f64| {
            let one_minus = 1.0 - t;
            let x = s * t / one_minus;
            let y = f(x);
            if y == 0.0 {
                0.0
            } else {
                y * s / (one_minus * one_minus)
            }
        };
        self.finite(mapped, 0.0, 1.0)
    }
}

impl Quadrature {
    /// Integrate `g` over the whole real line as two half-lines joined at
    /// `center`, each carrying half of the tolerance budget.
    ///
    /// Suited to integrands in a logarithmic variable, where algebraic tails
    /// in the original variable become exponential ones.
    pub fn real_line<F>(&self, g: F, center: f64) -> Result<QuadratureResult, NumericsError>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let mut half = self.clone();
        half.abs_tol *= 0.5;
        let right = half.semi_infinite(|s| g(center + s))?;
        let left = half.semi_infinite(|s| g(center - s))?;
        Ok(QuadratureResult {
            value: right.value + left.value,
            abs_error_estimate: right.abs_error_estimate + left.abs_error_estimate,
            evaluations: right.evaluations + left.evaluations,
        })
    }
}

/// Integrate `f` over (0, ∞) to absolute tolerance `tol`.
pub fn integrate_semi_infinite<F>(f: F, tol: f64) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64 + Sync,
{
    Quadrature::new().abs_tol(tol).semi_infinite(f)
}

/// Integrate `f` over [a, b] to absolute tolerance `tol`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult, NumericsError>
where
    F: Fn(f64) -> f64 + Sync,
{
    Quadrature::new().abs_tol(tol).finite(f, a, b)
}
