//! Average-rate engines.
//!
//! The general engine evaluates
//!
//! R = log2(e) Σ_s ∫∫ M_I(z) (1 - M_S(z)) e^(-zη)/z · φ̄_s p_s(R) dz dR
//!
//! for every serving tier s. The MGF argument is rescaled to
//! u = z P_s R^(-α_s) / Γ, the mean serving SNR scale, so that
//! dz/z = du/u and the signal factor depends on u alone.
//!
//! When all tiers share one path-loss exponent, the interference exponent at
//! fixed u is linear in v = R². The engine then integrates over v first:
//! in closed form when η = 0 and with a cheap elementary quadrature
//! otherwise. Each interference kernel is evaluated once per u instead of once
//! per (u, R) pair. Mixed exponents fall back to the nested order (inner z,
//! outer R), which is also kept as a cross-check of the fast path.

use std::f64::consts::{LOG2_E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{activity_prob, equal_pathloss, tier_connect_prob, void_exponent, void_terms};
use crate::mgf::{InterferenceKernel, MgfContext, SILENT_ACTIVITY};
use crate::numerics::{brent_root, erfcx, hyp2f1, Quadrature};
use crate::scenario::NetworkScenario;

/// Value reported when the rate is unbounded (no interference and no noise).
pub const UNBOUNDED_RATE: f64 = 1e9;

// Length scale of the half-line maps used on logarithmic axes.
const LOG_AXIS_SCALE: f64 = 4.0;
// Every log-axis integrand has decayed to nothing long before e^±600.
const LOG_AXIS_LIMIT: f64 = 600.0;

/// Default absolute tolerance of rate integrals, b/s/Hz.
pub const DEFAULT_RATE_TOL: f64 = 1e-9;

/// How BS activity is modeled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadModel {
    /// A BS transmits with the probability that it serves at least one UE.
    Proportional,
    /// Every deployed BS transmits.
    FullLoad,
    /// Caller-supplied activity per tier.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    General,
    HomogeneousIntegral,
    ClosedLower,
    ClosedUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// b/s/Hz.
    pub rate: f64,
    pub per_tier_contribution: Vec<f64>,
    pub method: RateMethod,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub connect_prob: Vec<f64>,
    pub activity_prob: Vec<f64>,
    /// Set when no interferer is active and there is no noise, so the rate is
    /// unbounded and `rate` holds [`UNBOUNDED_RATE`].
    pub no_interference: bool,
}

impl RateResult {
    fn unbounded(method: RateMethod, connect_prob: Vec<f64>, activity_prob: Vec<f64>) -> Self {
        let per_tier_contribution = connect_prob.iter().map(|c| c * UNBOUNDED_RATE).collect();
        Self {
            rate: UNBOUNDED_RATE,
            per_tier_contribution,
            method,
            abs_error_estimate: 0.0,
            evaluations: 0,
            connect_prob,
            activity_prob,
            no_interference: true,
        }
    }

    /// Rate of a UE conditioned on being served by `tier`.
    pub fn conditional_rate(&self, tier: usize) -> Option<f64> {
        let c = *self.connect_prob.get(tier)?;
        (c > 0.0).then(|| self.per_tier_contribution[tier] / c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateOptions {
    pub load: LoadModel,
    pub tol: f64,
    /// Force the nested (inner z, outer R) evaluation order.
    pub nested: bool,
    /// Evaluate quadrature nodes concurrently.
    pub parallel: bool,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            load: LoadModel::Proportional,
            tol: DEFAULT_RATE_TOL,
            nested: false,
            parallel: false,
        }
    }
}

impl RateOptions {
    pub fn full_load() -> Self {
        Self {
            load: LoadModel::FullLoad,
            ..Self::default()
        }
    }
}

fn activities(scenario: &NetworkScenario, load: &LoadModel) -> Result<Vec<f64>> {
    match load {
        LoadModel::Proportional => (0..scenario.num_tiers())
            .map(|t| activity_prob(scenario, t))
            .collect(),
        LoadModel::FullLoad => Ok(vec![1.0; scenario.num_tiers()]),
        LoadModel::Fixed(v) => {
            if v.len() != scenario.num_tiers() || v.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(Error::Precondition(
                    "fixed activity needs one probability in [0, 1] per tier".into(),
                ));
            }
            Ok(v.clone())
        }
    }
}

/// Average rate with load-proportional activity and default tolerance.
pub fn average_rate(scenario: &NetworkScenario) -> Result<RateResult> {
    average_rate_with(scenario, &RateOptions::default())
}

/// Average rate of the typical UE in b/s/Hz.
pub fn average_rate_with(scenario: &NetworkScenario, opts: &RateOptions) -> Result<RateResult> {
    let connect = (0..scenario.num_tiers())
        .map(|t| tier_connect_prob(scenario, t))
        .collect::<Result<Vec<_>>>()?;
    if connect.iter().all(|&c| c == 0.0) {
        return Err(Error::Precondition("at least one tier needs a positive density".into()));
    }
    let activity = activities(scenario, &opts.load)?;
    let eta = scenario.noise_w();
    let interfering = scenario
        .tiers()
        .iter()
        .zip(&activity)
        .any(|(t, &a)| t.density > 0.0 && a >= SILENT_ACTIVITY);
    if !interfering && eta == 0.0 {
        return Ok(RateResult::unbounded(RateMethod::General, connect, activity));
    }
    let quad = Quadrature::new()
        .abs_tol(opts.tol)
        .rel_tol(0.0)
        .max_subdivisions(4000)
        .parallel(opts.parallel);
    let mut per_tier = Vec::with_capacity(scenario.num_tiers());
    let mut err = 0.0;
    let mut evaluations = 0;
    let fast = equal_pathloss(scenario) && !opts.nested;
    for (s, &c) in connect.iter().enumerate() {
        if c == 0.0 {
            per_tier.push(0.0);
            continue;
        }
        let r = if fast {
            swapped_order_tier(scenario, s, &activity, eta, &quad, opts.tol)?
        } else {
            nested_order_tier(scenario, s, &activity, eta, &quad, opts.tol)?
        };
        per_tier.push(LOG2_E * r.0);
        err += LOG2_E * r.1;
        evaluations += r.2;
    }
    Ok(RateResult {
        rate: per_tier.iter().sum(),
        per_tier_contribution: per_tier,
        method: RateMethod::General,
        abs_error_estimate: err,
        evaluations,
        connect_prob: connect,
        activity_prob: activity,
        no_interference: false,
    })
}

// (1 - (1 + u/m)^(-m)) / u, finite at u -> 0.
fn signal_factor(u: f64, m: f64) -> f64 {
    if u < 1e-300 {
        return 1.0;
    }
    -(-m * (u / m).ln_1p()).exp_m1() / u
}

struct SwapTier {
    void_coef: f64,
    kernel: InterferenceKernel,
    // x_t = u * x_scale
    x_scale: f64,
    silent: bool,
}

fn swapped_order_tier(
    scenario: &NetworkScenario,
    serving: usize,
    activity: &[f64],
    eta: f64,
    quad: &Quadrature,
    tol: f64,
) -> Result<(f64, f64, usize)> {
    let tiers = scenario.tiers();
    let st = &tiers[serving];
    let gap = scenario.sinr_gap();
    let alpha = st.pathloss_exponent;
    let m_s = st.nakagami_m;
    let lam_s = st.displaced_density();
    let p_eff = st.tx_power_w / gap;
    let terms = void_terms(scenario, serving);
    let swap: Vec<SwapTier> = tiers
        .iter()
        .zip(&terms)
        .zip(activity)
        .map(|((t, vt), &a)| {
            Ok(SwapTier {
                void_coef: vt.coef,
                kernel: InterferenceKernel::new(t.nakagami_m, t.pathloss_exponent)?,
                x_scale: a * gap * st.bias() / t.bias(),
                silent: a < SILENT_ACTIVITY || vt.coef == 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // c(u) = π Σ_t coef_t (1 + f_t(x_t(u))), the rate of the exponential in v.
    let rate_in_v = |u: f64| -> Result<f64> {
        let mut c = 0.0;
        for t in &swap {
            if t.void_coef == 0.0 {
                continue;
            }
            let f = if t.silent { 0.0 } else { t.kernel.normalized(u * t.x_scale)? };
            c += t.void_coef * (1.0 + f);
        }
        Ok(PI * c)
    };

    let inner = |u: f64| -> Result<f64> {
        let c = rate_in_v(u)?;
        let base = PI * lam_s / c;
        if eta == 0.0 || u * eta == 0.0 {
            return Ok(base);
        }
        // ∫ π λ_s exp(-c v - b v^(α/2)) dv with b = η u / P_eff.
        let b = eta * u / p_eff;
        if alpha == 4.0 {
            // Gaussian tail: ∫ e^(-cv - bv²) dv = ½√(π/b)·erfcx(c / 2√b).
            let sb = b.sqrt();
            return Ok(PI * lam_s * 0.5 * (PI / b).sqrt() * erfcx(c / (2.0 * sb))?);
        }
        let half_alpha = 0.5 * alpha;
        let g = |v: f64| PI * lam_s * (-c * v - b * v.powf(half_alpha)).exp();
        let r = Quadrature::new()
            .abs_tol(1e-3 * tol * base.min(1.0))
            .rel_tol(1e-11)
            .scale(1.0 / c)
            .semi_infinite(g)?;
        Ok(r.value)
    };

    let first_error = std::sync::Mutex::new(None);
    // In y = ln u both tails decay exponentially.
    let integrand = |y: f64| {
        if y.abs() > LOG_AXIS_LIMIT {
            return 0.0;
        }
        let u = y.exp();
        match inner(u) {
            Ok(j) => u * signal_factor(u, m_s) * j,
            Err(e) => {
                first_error.lock().expect("poisoned").get_or_insert(e);
                0.0
            }
        }
    };
    let r = quad.clone().scale(LOG_AXIS_SCALE).real_line(integrand, 0.0)?;
    if let Some(e) = first_error.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok((r.value, r.abs_error_estimate, r.evaluations))
}

// Largest v = R² worth integrating: the serving-distance tail beyond it
// carries less than e^-30 of the mass.
fn v_cutoff(terms: &[crate::geometry::VoidTerm]) -> Result<f64> {
    let target = 30.0;
    let g = |v: f64| void_exponent(terms, v.sqrt()) - target;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e30 {
            return Err(Error::Precondition("serving distance distribution does not decay".into()));
        }
    }
    Ok(brent_root(g, 0.0, hi, 1e-12 * hi)?)
}

fn nested_order_tier(
    scenario: &NetworkScenario,
    serving: usize,
    activity: &[f64],
    eta: f64,
    quad: &Quadrature,
    tol: f64,
) -> Result<(f64, f64, usize)> {
    let st = &scenario.tiers()[serving];
    let lam_s = st.displaced_density();
    let terms = void_terms(scenario, serving);
    let v_max = v_cutoff(&terms)?;
    let inner_quad = Quadrature::new()
        .abs_tol(0.1 * tol)
        .max_subdivisions(4000)
        .scale(LOG_AXIS_SCALE);
    let evals = std::sync::atomic::AtomicUsize::new(0);
    let first_error = std::sync::Mutex::new(None);

    let conditional = |v: f64| -> Result<f64> {
        let r = v.sqrt();
        let ctx = MgfContext::new(scenario, serving, r, activity)?;
        let z_per_u = r.powf(ctx.signal_alpha) / ctx.signal_power;
        let err = std::sync::Mutex::new(None);
        let f = |y: f64| {
            if y.abs() > LOG_AXIS_LIMIT {
                return 0.0;
            }
            let u = y.exp();
            let z = u * z_per_u;
            match ctx.interference_mgf(z) {
                Ok(mi) => u * signal_factor(u, ctx.signal_m) * mi * (-z * eta).exp(),
                Err(e) => {
                    err.lock().expect("poisoned").get_or_insert(e);
                    0.0
                }
            }
        };
        let res = inner_quad.real_line(f, 0.0)?;
        if let Some(e) = err.into_inner().expect("poisoned") {
            return Err(e);
        }
        evals.fetch_add(res.evaluations, std::sync::atomic::Ordering::Relaxed);
        Ok(res.value)
    };
    let outer = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let weight = PI * lam_s * (-void_exponent(&terms, v.sqrt())).exp();
        if weight == 0.0 {
            return 0.0;
        }
        match conditional(v) {
            Ok(c) => weight * c,
            Err(e) => {
                first_error.lock().expect("poisoned").get_or_insert(e);
                0.0
            }
        }
    };
    let r = quad.finite(outer, 0.0, v_max)?;
    if let Some(e) = first_error.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok((r.value, r.abs_error_estimate, r.evaluations + evals.into_inner()))
}

/// Interference-limited homogeneous Rayleigh network, reduced to one
/// integral:
///
/// R = log2(e) ∫_0^∞ dy / ((φ̄ + y)(1 + g(y))),
/// g(y) = 2y/(α-2) · ₂F₁(1, 1 - 2/α; 2 - 2/α; -y).
///
/// With α = 4, g(y) = √y·arctan(√y) and the integral is also evaluated in
/// the s = 1/√y form; the two must agree to 1e-8.
pub fn homogeneous_rate(scenario: &NetworkScenario) -> Result<RateResult> {
    if scenario.num_tiers() != 1 {
        return Err(Error::Precondition("homogeneous rate needs exactly one tier".into()));
    }
    let t = &scenario.tiers()[0];
    if t.nakagami_m != 1.0 || scenario.noise_w() != 0.0 || scenario.sinr_gap_db() != 0.0 {
        return Err(Error::Precondition(
            "homogeneous rate needs Rayleigh fading, zero noise and no SINR gap".into(),
        ));
    }
    if t.density == 0.0 {
        return Err(Error::Precondition("tier density must be positive".into()));
    }
    let phi = activity_prob(scenario, 0)?;
    if phi < SILENT_ACTIVITY {
        return Ok(RateResult::unbounded(RateMethod::HomogeneousIntegral, vec![1.0], vec![phi]));
    }
    let alpha = t.pathloss_exponent;
    let (value, err, evals) = if alpha == 4.0 {
        let a = rate_alpha4_s_form(phi)?;
        let b = rate_alpha4_reciprocal_form(phi)?;
        if (a.0 - b.0).abs() > 1e-8 {
            return Err(Error::Precondition(format!(
                "alpha = 4 rate forms disagree: {} vs {}",
                a.0, b.0
            )));
        }
        a
    } else {
        rate_general_alpha(phi, alpha)?
    };
    Ok(RateResult {
        rate: value,
        per_tier_contribution: vec![value],
        method: RateMethod::HomogeneousIntegral,
        abs_error_estimate: err,
        evaluations: evals,
        connect_prob: vec![1.0],
        activity_prob: vec![phi],
        no_interference: false,
    })
}

fn rate_general_alpha(phi: f64, alpha: f64) -> Result<(f64, f64, usize)> {
    let d = 2.0 / alpha;
    let first_error = std::sync::Mutex::new(None);
    // Integrated in ln y, where the y^(-1-2/α) tail becomes exponential.
    let f = |ly: f64| {
        if ly.abs() > LOG_AXIS_LIMIT {
            return 0.0;
        }
        let y = ly.exp();
        let g = match hyp2f1(1.0, 1.0 - d, 2.0 - d, -y) {
            Ok(h) => 2.0 * y / (alpha - 2.0) * h,
            Err(e) => {
                first_error.lock().expect("poisoned").get_or_insert(e);
                0.0
            }
        };
        y / ((phi + y) * (1.0 + g))
    };
    let r = Quadrature::new()
        .abs_tol(1e-11)
        .max_subdivisions(4000)
        .scale(LOG_AXIS_SCALE)
        .real_line(f, phi.ln())?;
    if let Some(e) = first_error.into_inner().expect("poisoned") {
        return Err(e.into());
    }
    Ok((LOG2_E * r.value, LOG2_E * r.abs_error_estimate, r.evaluations))
}

/// log2(e) ∫ 4 / ((1 + φ̄ s²)(2s - 2 arctan s + π)) ds.
pub fn rate_alpha4_s_form(phi: f64) -> Result<(f64, f64, usize)> {
    let f = |s: f64| 4.0 / ((1.0 + phi * s * s) * (2.0 * s - 2.0 * s.atan() + PI));
    let r = Quadrature::new()
        .abs_tol(1e-11)
        .max_subdivisions(4000)
        .scale(1.0 / phi.sqrt())
        .semi_infinite(f)?;
    Ok((LOG2_E * r.value, LOG2_E * r.abs_error_estimate, r.evaluations))
}

/// log2(e) ∫ 4 / (2(1 + φ̄ s²)(s + arctan(1/s))) ds.
pub fn rate_alpha4_reciprocal_form(phi: f64) -> Result<(f64, f64, usize)> {
    let f = |s: f64| 4.0 / (2.0 * (1.0 + phi * s * s) * (s + (1.0 / s).atan()));
    let r = Quadrature::new()
        .abs_tol(1e-11)
        .max_subdivisions(4000)
        .scale(1.0 / phi.sqrt())
        .semi_infinite(f)?;
    Ok((LOG2_E * r.value, LOG2_E * r.abs_error_estimate, r.evaluations))
}

/// Lower closed-form rate bound for the interference-limited homogeneous
/// Rayleigh network with α = 4.
///
/// Obtained from the s-form integral by replacing arctan(s) with its lower
/// bound s/(1 + s), which leaves a rational integrand with an elementary
/// antiderivative.
pub fn closed_form_rate_lower(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let sp = phi.sqrt();
    let k = (PI * (8.0 - PI)).sqrt();
    let q = PI * PI * phi * phi + (PI - 4.0) * PI * phi + 4.0;
    let bracket = PI * PI * phi * sp + (PI - 2.0) * PI * sp - 2.0 * (PI * phi).ln()
        + 4f64.ln()
        + 2.0 * (2.0 * PI * phi + PI - 4.0) / k * (2.0 * (PI / (8.0 - PI)).sqrt().atan() - PI);
    Ok(2.0 * LOG2_E * bracket / q)
}

/// Upper closed-form rate bound for the same regime.
pub fn closed_form_rate_upper(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let num = PI * phi * phi.sqrt() + 2.0 * PI / (3.0 * 3f64.sqrt()) * (1.0 - 2.0 * phi) - phi.ln();
    Ok(LOG2_E * num / (phi * phi - phi + 1.0))
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("activity must lie in (0, 1], got {phi}")))
    }
}

/// (lower, upper) closed-form rate bounds at activity `phi`.
pub fn closed_form_rate_bounds(phi: f64) -> Result<(f64, f64)> {
    Ok((closed_form_rate_lower(phi)?, closed_form_rate_upper(phi)?))
}

/// True when `f` strictly increases along `grid` (vacuously for fewer than
/// two points).
pub fn is_strictly_increasing<F>(grid: &[f64], mut f: F) -> Result<bool>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut prev: Option<f64> = None;
    for &x in grid {
        let y = f(x)?;
        if let Some(p) = prev {
            if y <= p {
                return Ok(false);
            }
        }
        prev = Some(y);
    }
    Ok(true)
}

/// Check that the average rate of a single-tier scenario strictly increases
/// along the given BS density grid.
pub fn rate_is_monotone_check(scenario: &NetworkScenario, density_grid: &[f64]) -> Result<bool> {
    if scenario.num_tiers() != 1 {
        return Err(Error::Precondition("monotonicity check needs one tier".into()));
    }
    is_strictly_increasing(density_grid, |lam| {
        Ok(average_rate(&scenario.with_densities(&[lam])?)?.rate)
    })
}
