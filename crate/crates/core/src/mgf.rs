//! Conditional moment generating functions of the serving-link power and
//! of the aggregate load-thinned interference.
//!
//! For an interfering tier t with per-BS activity φ̄_t, write
//! w = z·φ̄_t·P_t for the MGF argument scaled to that tier and D^α for the
//! α_t-th power of its exclusion radius, D^α = β_t P_t R^(α*) / (β* P*).
//! The interference MGF is exp(-π Σ_t λ_t E{χ^(2/α_t)} A_t) with
//!
//! A_t = E_H ∫_D^∞ (1 - e^(-w H r^(-α))) 2r dr = D² f(w / D^α),
//!
//! so every closed form below is a function of the single ratio
//! x = w / D^α, rescaled by D².

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::activity_prob;
use crate::numerics::{gamma_fn, hyp2f1, NumericsError};
use crate::scenario::NetworkScenario;

/// Below this activity a tier is treated as silent.
pub const SILENT_ACTIVITY: f64 = 1e-12;

/// Interference exponents above this make the MGF smaller than 1e-16; the
/// MGF is then reported as exactly zero.
pub const MGF_EXPONENT_CUTOFF: f64 = 37.0;

// The power series in x converges for x < m; below this switch-over it is
// both cheaper and free of the cancellation the closed forms suffer.
const SERIES_SWITCH: f64 = 0.25;

/// Shape-dependent part of A_t: fading parameter, path-loss exponent and the
/// constant Γ(1-δ)Γ(m+δ)/Γ(m) with δ = 2/α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceKernel {
    pub m: f64,
    pub alpha: f64,
    delta: f64,
    gamma_const: f64,
}

impl InterferenceKernel {
    pub fn new(m: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 2.0) || !(m > 0.0) {
            return Err(Error::Precondition(format!(
                "interference kernel needs alpha > 2 and m > 0, got alpha = {alpha}, m = {m}"
            )));
        }
        let delta = 2.0 / alpha;
        let gamma_const = gamma_fn(1.0 - delta)? * gamma_fn(m + delta)? / gamma_fn(m)?;
        Ok(Self {
            m,
            alpha,
            delta,
            gamma_const,
        })
    }

    /// f(x) = A_t / D², choosing the evaluation route by x.
    pub fn normalized(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x <= SERIES_SWITCH {
            return Ok(self.normalized_series(x));
        }
        if self.m == 1.0 && self.alpha == 4.0 {
            return Ok(normalized_alpha4(x));
        }
        self.normalized_closed(x)
    }

    /// Closed form with the Gamma and Gauss hypergeometric terms.
    pub fn normalized_closed(&self, x: f64) -> Result<f64> {
        let m = self.m;
        let d = self.delta;
        let lead = self.gamma_const * (x / m).powf(d);
        let mid = (-m * (x / m).ln_1p()).exp_m1();
        let y = m / x;
        let f = hyp2f1(m + 1.0, m + d, m + d + 1.0, -y).map_err(unstable)?;
        let tail = m / (m + d) * y.powf(m) * f;
        Ok(lead + mid - tail)
    }

    /// Alternating power series Σ (-1)^(k+1) x^k E{H^k}/k! · 2/(αk - 2).
    pub fn normalized_series(&self, x: f64) -> f64 {
        let mut coeff = 1.0; // E{H^k}/k! for unit-mean Gamma(m, 1/m) fading
        let mut xk = x;
        let mut sum = 0.0;
        for k in 1..400 {
            let kf = k as f64;
            if k > 1 {
                coeff *= (self.m + kf - 1.0) / (self.m * kf);
                xk *= x;
            }
            let term = coeff * xk * 2.0 / (self.alpha * kf - 2.0);
            sum += if k % 2 == 1 { term } else { -term };
            if term <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    }
}

fn unstable(e: NumericsError) -> Error {
    Error::Numerics(e)
}

fn normalized_alpha4(x: f64) -> f64 {
    let s = x.sqrt();
    s * s.atan()
}

/// A_t for Nakagami-m interferers, in absolute units.
pub fn interference_a_nakagami(w: f64, d_alpha: f64, m: f64, alpha: f64) -> Result<f64> {
    let k = InterferenceKernel::new(m, alpha)?;
    Ok(d_alpha.powf(2.0 / alpha) * k.normalized_closed(w / d_alpha)?)
}

/// A_t for Rayleigh interferers (m = 1), using Γ(1-δ)Γ(1+δ) = πδ / sin(πδ).
pub fn interference_a_rayleigh(w: f64, d_alpha: f64, alpha: f64) -> Result<f64> {
    let d = 2.0 / alpha;
    let x = w / d_alpha;
    let lead = PI * d / (PI * d).sin() * x.powf(d);
    let mid = 1.0 / (1.0 + x) - 1.0;
    let f = hyp2f1(2.0, 1.0 + d, 2.0 + d, -1.0 / x).map_err(unstable)?;
    let tail = f / (x * (1.0 + d));
    Ok(d_alpha.powf(d) * (lead + mid - tail))
}

/// A_t for Rayleigh interferers with α = 4: √w · arctan(√(w / D^α)).
///
/// Written with arctan(√x) rather than arctan(√x) - π/2; the latter is
/// negative and would push the MGF above one.
pub fn interference_a_alpha4(w: f64, d_alpha: f64) -> f64 {
    w.sqrt() * (w / d_alpha).sqrt().atan()
}

/// Per-tier inputs of the interference MGF seen by one UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfererTier {
    pub displaced_density: f64,
    pub activity: f64,
    pub tx_power_w: f64,
    /// α-th power of the exclusion radius.
    pub d_alpha: f64,
    pub kernel: InterferenceKernel,
}

/// Conditioning state of the MGFs: serving tier, serving distance and the
/// per-tier activity probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfContext {
    pub serving: usize,
    pub distance: f64,
    /// Serving transmit power divided by the SINR gap.
    pub signal_power: f64,
    pub signal_alpha: f64,
    pub signal_m: f64,
    pub tiers: Vec<InterfererTier>,
}

impl MgfContext {
    /// Context with explicitly given activity probabilities.
    pub fn new(
        scenario: &NetworkScenario,
        serving: usize,
        distance: f64,
        activity: &[f64],
    ) -> Result<Self> {
        if serving >= scenario.num_tiers() || activity.len() != scenario.num_tiers() {
            return Err(Error::Precondition("serving tier or activity vector out of range".into()));
        }
        if !(distance > 0.0) {
            return Err(Error::Precondition(format!("serving distance must be > 0, got {distance}")));
        }
        if activity.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Precondition("activity probabilities must lie in [0, 1]".into()));
        }
        let s = &scenario.tiers()[serving];
        let ps = s.bias() * s.tx_power_w;
        let tiers = scenario
            .tiers()
            .iter()
            .zip(activity)
            .map(|(t, &a)| {
                Ok(InterfererTier {
                    displaced_density: t.displaced_density(),
                    activity: a,
                    tx_power_w: t.tx_power_w,
                    d_alpha: t.bias() * t.tx_power_w * distance.powf(s.pathloss_exponent) / ps,
                    kernel: InterferenceKernel::new(t.nakagami_m, t.pathloss_exponent)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            serving,
            distance,
            signal_power: s.tx_power_w / scenario.sinr_gap(),
            signal_alpha: s.pathloss_exponent,
            signal_m: s.nakagami_m,
            tiers,
        })
    }

    /// Context with load-proportional activity probabilities.
    pub fn load_aware(scenario: &NetworkScenario, serving: usize, distance: f64) -> Result<Self> {
        let activity = (0..scenario.num_tiers())
            .map(|t| activity_prob(scenario, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scenario, serving, distance, &activity)
    }

    /// Context where every deployed BS transmits.
    pub fn full_load(scenario: &NetworkScenario, serving: usize, distance: f64) -> Result<Self> {
        Self::new(scenario, serving, distance, &vec![1.0; scenario.num_tiers()])
    }

    /// MGF of the received serving power at argument z.
    pub fn signal_mgf(&self, z: f64) -> f64 {
        let u = z * self.signal_power * self.distance.powf(-self.signal_alpha);
        (-self.signal_m * (u / self.signal_m).ln_1p()).exp()
    }

    /// A_t at argument z.
    pub fn interference_a(&self, tier: usize, z: f64) -> Result<f64> {
        let t = self
            .tiers
            .get(tier)
            .ok_or_else(|| Error::Precondition(format!("no tier {tier}")))?;
        if t.activity < SILENT_ACTIVITY || z <= 0.0 {
            return Ok(0.0);
        }
        let w = z * t.activity * t.tx_power_w;
        let x = w / t.d_alpha;
        Ok(t.d_alpha.powf(t.kernel.delta) * t.kernel.normalized(x)?)
    }

    /// exp(-π Σ λ_t E{χ^(2/α_t)} A_t(z)).
    pub fn interference_mgf(&self, z: f64) -> Result<f64> {
        if z <= 0.0 {
            return Ok(1.0);
        }
        let mut exponent = 0.0;
        for (i, t) in self.tiers.iter().enumerate() {
            if t.displaced_density == 0.0 {
                continue;
            }
            exponent += PI * t.displaced_density * self.interference_a(i, z)?;
            if exponent > MGF_EXPONENT_CUTOFF {
                return Ok(0.0);
            }
        }
        Ok((-exponent).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Noise, TierConfig};

    fn one_tier(m: f64) -> NetworkScenario {
        NetworkScenario::new(
            vec![TierConfig::new("a", 1.0, 1.0).with_nakagami(m)],
            1.0,
            Noise::Watts(0.0),
        )
        .unwrap()
    }

    #[test]
    fn signal_examples() {
        let ctx = MgfContext::full_load(&one_tier(1.0), 0, 1.0).unwrap();
        assert_eq!(ctx.signal_mgf(0.0), 1.0);
        assert!((ctx.signal_mgf(1.0) - 0.5).abs() < 1e-15);
        let ctx2 = MgfContext::full_load(&one_tier(2.0), 0, 1.0).unwrap();
        assert!((ctx2.signal_mgf(2.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn silent_tier_contributes_nothing() {
        let ctx = MgfContext::new(&one_tier(2.0), 0, 1.0, &[0.0]).unwrap();
        assert_eq!(ctx.interference_a(0, 3.0).unwrap(), 0.0);
        assert_eq!(ctx.interference_mgf(3.0).unwrap(), 1.0);
    }

    #[test]
    fn forms_agree_at_the_unit_point() {
        let nak = interference_a_nakagami(1.0, 1.0, 1.0, 4.0).unwrap();
        let ray = interference_a_rayleigh(1.0, 1.0, 4.0).unwrap();
        let a4 = interference_a_alpha4(1.0, 1.0);
        assert!((nak - PI / 4.0).abs() < 1e-12);
        assert!((ray - PI / 4.0).abs() < 1e-12);
        assert!((a4 - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn series_matches_closed_form_near_switch() {
        for &(m, alpha) in &[(1.0, 4.0), (2.0, 4.0), (0.5, 3.0), (3.5, 2.5)] {
            let k = InterferenceKernel::new(m, alpha).unwrap();
            for &x in &[0.05, 0.2, 0.25, 0.3] {
                let s = k.normalized_series(x);
                let c = k.normalized_closed(x).unwrap();
                assert!(((s - c) / c).abs() < 1e-10, "m={m} alpha={alpha} x={x}: {s} vs {c}");
            }
        }
    }

    #[test]
    fn mgf_is_one_at_origin_and_bounded() {
        let ctx = MgfContext::load_aware(&one_tier(2.0), 0, 0.7).unwrap();
        assert_eq!(ctx.interference_mgf(0.0).unwrap(), 1.0);
        let mut prev = 1.0;
        for i in 0..60 {
            let z = 10f64.powf(-3.0 + 0.1 * i as f64);
            let v = ctx.interference_mgf(z).unwrap();
            assert!(v <= prev && v >= 0.0);
            prev = v;
        }
    }
}
