//! Area power consumption and the energy saved by putting idle BSs to sleep
//! over a daily traffic profile.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::optimize_deployment;
use crate::scenario::{NetworkScenario, TierConfig, TrafficProfile};

// Solver noise can leave an hourly optimum a hair above the peak-hour one.
const ORDER_SLACK: f64 = 1e-9;

fn check_lengths(tiers: &[TierConfig], a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != tiers.len() || b.len() != tiers.len() {
        return Err(Error::Precondition(format!(
            "expected {} densities per argument, got {} and {}",
            tiers.len(),
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::Precondition(format!("densities must be finite and >= 0, got {v}")));
    }
    Ok(())
}

/// Σ_t active_t·C_t + sleeping_t·P_sleep,t in W/km².
pub fn area_power(tiers: &[TierConfig], active: &[f64], sleeping: &[f64]) -> Result<f64> {
    check_lengths(tiers, active, sleeping)?;
    check_nonnegative(active)?;
    check_nonnegative(sleeping)?;
    Ok(tiers
        .iter()
        .zip(active.iter().zip(sleeping))
        .map(|(t, (a, s))| a * t.active_cost() + s * t.power_model.sleep_power_w)
        .sum())
}

/// Power saved by one tier-t BS switching from transmit to sleep, in W.
pub fn sleep_saving_per_bs(tier: &TierConfig) -> f64 {
    tier.active_cost() - tier.power_model.sleep_power_w
}

/// Σ_t (full_t − partial_t)·(C_t − P_sleep,t) in W/km²: what sleeping the
/// BSs not needed at partial load saves against keeping all of them on.
pub fn savings_per_area(full: &[f64], partial: &[f64], tiers: &[TierConfig]) -> Result<f64> {
    check_lengths(tiers, full, partial)?;
    check_nonnegative(full)?;
    check_nonnegative(partial)?;
    if let Some((t, (f, p))) = full
        .iter()
        .zip(partial)
        .enumerate()
        .find(|(_, (f, p))| p > f)
    {
        return Err(Error::Precondition(format!(
            "tier {t}: partial-load density {p} exceeds the deployed {f}"
        )));
    }
    Ok(tiers
        .iter()
        .zip(full.iter().zip(partial))
        .map(|(t, (f, p))| (f - p) * sleep_saving_per_bs(t))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlySavings {
    pub hour_start: u32,
    pub hour_end: u32,
    /// Fraction of the reference UE density, 1.0 = 100%.
    pub relative_load: f64,
    /// Densities that must transmit this hour, BSs/km².
    pub active_densities: Vec<f64>,
    /// W/km².
    pub consumption_with_sleep: f64,
    /// W/km², every deployed BS transmitting.
    pub consumption_full: f64,
    /// W/km².
    pub savings: f64,
    pub relative_saving: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedHour {
    pub hour_start: u32,
    pub hour_end: u32,
    pub relative_load: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavingsReport {
    pub r0: f64,
    /// Peak-load optimum, the densities actually built.
    pub deployed_densities: Vec<f64>,
    pub entries: Vec<HourlySavings>,
    pub failed_hours: Vec<FailedHour>,
    /// Time-weighted savings over time-weighted always-on consumption.
    pub daily_relative_saving: f64,
    /// Time-weighted mean savings, W/km².
    pub mean_savings: f64,
}

impl SavingsReport {
    pub fn is_complete(&self) -> bool {
        self.failed_hours.is_empty()
    }

    pub fn peak_savings(&self) -> f64 {
        self.entries.iter().map(|e| e.savings).fold(0.0, f64::max)
    }
}

/// Hour-by-hour comparison of sleep-mode operation against an always-on
/// network dimensioned for the peak load of `profile`.
///
/// `template.ue_density()` is the 100% reference load. Each distinct load
/// level is optimized once; an infeasible peak is an error, an infeasible
/// off-peak hour is recorded in `failed_hours`.
pub fn daily_savings(
    template: &NetworkScenario,
    profile: &TrafficProfile,
    r0: f64,
) -> Result<SavingsReport> {
    let mut loads: Vec<f64> = profile.entries().iter().map(|e| e.relative_load()).collect();
    loads.sort_by(f64::total_cmp);
    loads.dedup();
    let peak = profile.peak_load();
    let solved: Vec<(f64, Result<Vec<f64>>)> = loads
        .par_iter()
        .map(|&load| {
            let r = template
                .with_load(load)
                .and_then(|s| optimize_deployment(&s, r0))
                .map(|sol| sol.densities);
            (load, r)
        })
        .collect();
    let lookup = |load: f64| {
        solved
            .iter()
            .find(|(l, _)| *l == load)
            .map(|(_, r)| r.clone())
            .expect("every profile load was solved")
    };
    let full = lookup(peak)?;
    let tiers = template.tiers();
    let consumption_full = area_power(tiers, &full, &vec![0.0; full.len()])?;

    let mut entries = Vec::new();
    let mut failed_hours = Vec::new();
    for e in profile.entries() {
        let load = e.relative_load();
        let active = match lookup(load) {
            Ok(d) => d,
            Err(err) => {
                failed_hours.push(FailedHour {
                    hour_start: e.hour_start,
                    hour_end: e.hour_end,
                    relative_load: load,
                    error: err.to_string(),
                });
                continue;
            }
        };
        let active: Vec<f64> = active
            .iter()
            .zip(&full)
            .map(|(&a, &f)| if a > f && a <= f * (1.0 + ORDER_SLACK) { f } else { a })
            .collect();
        let sleeping: Vec<f64> = full.iter().zip(&active).map(|(f, a)| (f - a).max(0.0)).collect();
        let with_sleep = area_power(tiers, &active, &sleeping)?;
        let savings = savings_per_area(&full, &active, tiers)?;
        entries.push(HourlySavings {
            hour_start: e.hour_start,
            hour_end: e.hour_end,
            relative_load: load,
            active_densities: active,
            consumption_with_sleep: with_sleep,
            consumption_full,
            savings,
            relative_saving: if consumption_full > 0.0 { savings / consumption_full } else { 0.0 },
        });
    }
    let hours: f64 = entries.iter().map(|e| f64::from(e.hour_end - e.hour_start)).sum();
    let weighted_savings: f64 = entries
        .iter()
        .map(|e| f64::from(e.hour_end - e.hour_start) * e.savings)
        .sum();
    let mean_savings = if hours > 0.0 { weighted_savings / hours } else { 0.0 };
    Ok(SavingsReport {
        r0,
        deployed_densities: full,
        entries,
        failed_hours,
        daily_relative_saving: if consumption_full > 0.0 { mean_savings / consumption_full } else { 0.0 },
        mean_savings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn per_bs_savings() {
        assert!((sleep_saving_per_bs(&presets::macro_tier(1.0)) - 132.1).abs() < 1e-9);
        assert!((sleep_saving_per_bs(&presets::micro_tier(1.0)) - 33.53).abs() < 1e-9);
        assert!((sleep_saving_per_bs(&presets::pico_tier(1.0)) - 3.02).abs() < 1e-9);
    }

    #[test]
    fn area_power_examples() {
        let tiers = vec![presets::macro_tier(1.0)];
        assert!((area_power(&tiers, &[1.0], &[0.0]).unwrap() - 225.1).abs() < 1e-9);
        assert!((area_power(&tiers, &[0.0], &[2.0]).unwrap() - 186.0).abs() < 1e-9);
        assert_eq!(area_power(&tiers, &[0.0], &[0.0]).unwrap(), 0.0);
        assert!(area_power(&tiers, &[-1.0], &[0.0]).is_err());
    }

    #[test]
    fn savings_rejects_inverted_gap() {
        let tiers = vec![presets::pico_tier(1.0)];
        assert!(savings_per_area(&[1.0], &[2.0], &tiers).is_err());
        assert_eq!(savings_per_area(&[2.0], &[2.0], &tiers).unwrap(), 0.0);
    }

    #[test]
    fn flat_profile_saves_nothing() {
        let s = presets::dense_urban(vec![presets::pico_tier(1.0)]);
        let profile = TrafficProfile::flat(100.0).unwrap();
        let report = daily_savings(&s, &profile, 2.4).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].savings, 0.0);
        assert_eq!(report.daily_relative_saving, 0.0);
    }
}
