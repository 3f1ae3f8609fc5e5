//! Association statistics of maximum biased received power cell selection.
//!
//! With shadowing folded into the displaced densities λ_t·E{χ^(2/α_t)}, a UE
//! served by tier `s` at distance R sees no stronger tier-t BS inside the
//! exclusion radius (β_t P_t / β_s P_s)^(1/α_t) · R^(α_s/α_t).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Quadrature;
use crate::scenario::NetworkScenario;

/// Per-tier constants of the void probability seen from a tier-`serving` UE:
/// the exponent of the no-stronger-BS probability is
/// π Σ_t coef_t · R^(power_t).
#[derive(Debug, Clone, Copy)]
pub(crate) struct VoidTerm {
    pub coef: f64,
    pub power: f64,
}

pub(crate) fn void_terms(scenario: &NetworkScenario, serving: usize) -> Vec<VoidTerm> {
    let s = &scenario.tiers()[serving];
    let ps = s.bias() * s.tx_power_w;
    scenario
        .tiers()
        .iter()
        .map(|t| {
            let ratio = t.bias() * t.tx_power_w / ps;
            VoidTerm {
                coef: t.displaced_density() * ratio.powf(2.0 / t.pathloss_exponent),
                power: 2.0 * s.pathloss_exponent / t.pathloss_exponent,
            }
        })
        .collect()
}

pub(crate) fn void_exponent(terms: &[VoidTerm], r: f64) -> f64 {
    PI * terms
        .iter()
        .map(|t| if t.coef == 0.0 { 0.0 } else { t.coef * r.powf(t.power) })
        .sum::<f64>()
}

/// True when every tier shares one path-loss exponent.
pub fn equal_pathloss(scenario: &NetworkScenario) -> bool {
    let a0 = scenario.tiers()[0].pathloss_exponent;
    scenario.tiers().iter().all(|t| t.pathloss_exponent == a0)
}

fn check_tier(scenario: &NetworkScenario, tier: usize) -> Result<()> {
    if tier >= scenario.num_tiers() {
        return Err(Error::Precondition(format!(
            "tier index {tier} out of range for {} tiers",
            scenario.num_tiers()
        )));
    }
    Ok(())
}

/// Connection probability divided by the tier's displaced density. Finite and
/// smooth as that density goes to zero, which keeps the activity
/// probability well defined for empty tiers.
fn connect_per_displaced_density(scenario: &NetworkScenario, tier: usize) -> Result<f64> {
    let terms = void_terms(scenario, tier);
    if equal_pathloss(scenario) {
        let total: f64 = terms.iter().map(|t| t.coef).sum();
        if total == 0.0 {
            // A lone BS in an otherwise empty network collects every UE.
            return Ok(f64::INFINITY);
        }
        return Ok(1.0 / total);
    }
    // ∫ 2πR exp(-π Σ coef_t R^power_t) dR, written in v = R².
    let f = |v: f64| PI * (-void_exponent(&terms, v.sqrt())).exp();
    let r = Quadrature::new()
        .abs_tol(1e-12)
        .rel_tol(1e-11)
        .scale(scale_hint(&terms))
        .semi_infinite(f)?;
    Ok(r.value)
}

// Typical squared serving distance, used to scale the (0, ∞) map.
fn scale_hint(terms: &[VoidTerm]) -> f64 {
    let total: f64 = terms.iter().map(|t| t.coef).sum();
    if total > 0.0 {
        1.0 / (PI * total)
    } else {
        1.0
    }
}

/// Probability that the typical UE is served by `tier`.
pub fn tier_connect_prob(scenario: &NetworkScenario, tier: usize) -> Result<f64> {
    check_tier(scenario, tier)?;
    let lam = scenario.tiers()[tier].displaced_density();
    if lam == 0.0 {
        return Ok(0.0);
    }
    Ok((lam * connect_per_displaced_density(scenario, tier)?).min(1.0))
}

/// Density of the distance to the serving BS given service by `tier`, in
/// 1/km.
pub fn serving_distance_pdf(scenario: &NetworkScenario, tier: usize, r: f64) -> Result<f64> {
    check_tier(scenario, tier)?;
    if !(r >= 0.0) {
        return Err(Error::Precondition(format!("distance must be >= 0, got {r}")));
    }
    let lam = scenario.tiers()[tier].displaced_density();
    if lam == 0.0 {
        return Err(Error::Precondition(format!("tier {tier} has zero density")));
    }
    let phi = tier_connect_prob(scenario, tier)?;
    let terms = void_terms(scenario, tier);
    Ok(2.0 * PI * r * lam / phi * (-void_exponent(&terms, r)).exp())
}

/// Probability that a tier-`tier` BS serves at least one UE.
pub fn activity_prob(scenario: &NetworkScenario, tier: usize) -> Result<f64> {
    check_tier(scenario, tier)?;
    let lu = scenario.ue_density();
    if lu == 0.0 {
        return Ok(0.0);
    }
    let mean_users = lu * connect_per_displaced_density(scenario, tier)?;
    Ok(-(-mean_users).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierAssociation {
    pub tier_index: usize,
    pub connect_prob: f64,
    pub activity_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationStats {
    pub tiers: Vec<TierAssociation>,
}

impl AssociationStats {
    pub fn compute(scenario: &NetworkScenario) -> Result<Self> {
        let tiers = (0..scenario.num_tiers())
            .map(|i| {
                Ok(TierAssociation {
                    tier_index: i,
                    connect_prob: tier_connect_prob(scenario, i)?,
                    activity_prob: activity_prob(scenario, i)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tiers })
    }

    pub fn connect_probs(&self) -> Vec<f64> {
        self.tiers.iter().map(|t| t.connect_prob).collect()
    }

    pub fn activity_probs(&self) -> Vec<f64> {
        self.tiers.iter().map(|t| t.activity_prob).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Noise, TierConfig};

    fn two_tier(pm: f64, pp: f64) -> NetworkScenario {
        NetworkScenario::new(
            vec![TierConfig::new("m", 0.3, pm), TierConfig::new("p", 0.7, pp)],
            1.0,
            Noise::Watts(0.0),
        )
        .unwrap()
    }

    #[test]
    fn pdf_examples() {
        let s = NetworkScenario::homogeneous(1.0, 1.0).unwrap();
        assert_eq!(serving_distance_pdf(&s, 0, 0.0).unwrap(), 0.0);
        let want = 2.0 * PI * 0.5 * (-PI * 0.25f64).exp();
        assert!((serving_distance_pdf(&s, 0, 0.5).unwrap() - want).abs() < 1e-12);
        assert!((want - 1.43237).abs() < 1e-5);
    }

    #[test]
    fn symmetric_tiers_split_evenly() {
        let s = NetworkScenario::new(
            vec![TierConfig::new("a", 1.0, 1.0), TierConfig::new("b", 1.0, 1.0)],
            1.0,
            Noise::Watts(0.0),
        )
        .unwrap();
        assert!((tier_connect_prob(&s, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((tier_connect_prob(&s, 1).unwrap() - 0.5).abs() < 1e-15);
        let single = NetworkScenario::homogeneous(3.0, 1.0).unwrap();
        assert_eq!(tier_connect_prob(&single, 0).unwrap(), 1.0);
    }

    #[test]
    fn mixed_pathloss_uses_quadrature_and_sums_to_one() {
        let s = NetworkScenario::new(
            vec![
                TierConfig::new("a", 0.5, 6.3).with_pathloss(3.5),
                TierConfig::new("b", 2.0, 0.13).with_pathloss(4.0).with_shadowing(0.0, 4.0),
            ],
            1.0,
            Noise::Watts(0.0),
        )
        .unwrap();
        let total = tier_connect_prob(&s, 0).unwrap() + tier_connect_prob(&s, 1).unwrap();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn activity_examples() {
        let s = NetworkScenario::homogeneous(1.0, 1.0).unwrap();
        assert!((activity_prob(&s, 0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(activity_prob(&s.with_ue_density(0.0).unwrap(), 0).unwrap(), 0.0);
        assert!((activity_prob(&s.with_ue_density(1e6).unwrap(), 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bias_raises_connection() {
        let s = two_tier(6.3, 0.13);
        let base = tier_connect_prob(&s, 1).unwrap();
        let mut tiers = s.tiers().to_vec();
        tiers[1] = tiers[1].clone().with_bias_db(6.0);
        let biased = s.with_tiers(tiers).unwrap();
        assert!(tier_connect_prob(&biased, 1).unwrap() > base);
    }
}
