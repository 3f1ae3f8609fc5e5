mod common;

use approx::assert_relative_eq;
use densenet::geometry::{activity_prob, tier_connect_prob};
use densenet::mgf::{interference_a_alpha4, interference_a_nakagami};
use densenet::optimizer::{
    closed_form_density_bounds, deployment_objective, multi_tier_equal_params_reduction,
    optimize_single_tier, rate_at, SolutionFlag,
};
use densenet::power::{area_power, savings_per_area};
use densenet::rate::{
    average_rate, closed_form_rate_bounds, rate_alpha4_reciprocal_form, rate_alpha4_s_form,
};
use densenet::scenario::{presets, NetworkScenario, Noise, TierConfig, TrafficProfile};
use densenet::Error;
use proptest::prelude::*;

use common::{interference_a_oracle, rate_alpha4_oracle, rel, single_tier_activity};

fn two_tier(l0: f64, l1: f64, lu: f64, bias_db: f64) -> NetworkScenario {
    NetworkScenario::new(
        vec![
            TierConfig::new("macro", l0, 6.3),
            TierConfig::new("pico", l1, 0.13).with_bias_db(bias_db),
        ],
        lu,
        Noise::Watts(0.0),
    )
    .unwrap()
}

#[test]
fn nakagami_kernel_matches_definition() {
    for &(m, alpha) in &[(1.0, 3.0), (2.0, 4.0), (3.0, 3.5), (0.5, 4.0)] {
        for &x in &[1e-3, 0.1, 1.0, 10.0, 300.0] {
            let got = interference_a_nakagami(x, 1.0, m, alpha).unwrap();
            let want = interference_a_oracle(x, 1.0, m, alpha);
            assert!(rel(got, want) < 1e-6, "m={m} α={alpha} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn alpha4_rate_forms_agree_with_direct_integral() {
    for phi in [0.05, 0.3, 0.632, 1.0] {
        let oracle = rate_alpha4_oracle(phi);
        assert_relative_eq!(rate_alpha4_s_form(phi).unwrap().0, oracle, max_relative = 1e-8);
        assert_relative_eq!(rate_alpha4_reciprocal_form(phi).unwrap().0, oracle, max_relative = 1e-8);
    }
}

#[test]
fn full_load_homogeneous_rate_reference() {
    // Independently evaluated to 13 digits.
    let r = rate_alpha4_s_form(1.0).unwrap().0;
    assert!((r - 2.148_155_062_050_4).abs() < 1e-9);
    let s = NetworkScenario::homogeneous(3.0, 1e9).unwrap();
    assert!((average_rate(&s).unwrap().rate - r).abs() < 1e-6);
}

#[test]
fn equal_params_reduce_to_single_tier() {
    let base = NetworkScenario::new(
        vec![TierConfig::new("a", 1.0, 1.0), TierConfig::new("b", 1.0, 1.0)],
        2.0,
        Noise::Watts(0.0),
    )
    .unwrap();
    let sol = multi_tier_equal_params_reduction(&base, 2.4).unwrap();
    assert!(sol.has_flag(SolutionFlag::UniformSplit));
    let single = optimize_single_tier(&NetworkScenario::homogeneous(1.0, 2.0).unwrap(), 2.4).unwrap();
    assert_relative_eq!(sol.total_density(), single.densities[0], max_relative = 1e-6);
}

#[test]
fn dense_urban_profile_shape() {
    let p = TrafficProfile::dense_urban();
    let hours: u32 = p.entries().iter().map(|e| e.hours()).sum();
    assert_eq!(hours, 24);
    assert!(p.peak_load() > 1.0);
}

#[test]
fn scenario_json_rejects_unknown_fields() {
    let text = r#"{"tiers": [], "ue_density": 1.0, "typo": 3}"#;
    assert!(matches!(NetworkScenario::from_json(text), Err(Error::Parse(_))));
}

#[test]
fn infeasible_requirement_is_reported() {
    let s = NetworkScenario::new(
        vec![TierConfig::new("bs", 1.0, 1.0)],
        0.0,
        Noise::Watts(1.0),
    )
    .unwrap();
    assert!(matches!(optimize_single_tier(&s, 60.0), Err(Error::Infeasible { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connect_probabilities_sum_to_one(
        l0 in 0.01f64..10.0, l1 in 0.01f64..50.0, bias in 0.0f64..10.0,
    ) {
        let s = two_tier(l0, l1, 1.0, bias);
        let total = tier_connect_prob(&s, 0).unwrap() + tier_connect_prob(&s, 1).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_tier_activity_matches_formula(lb in 0.01f64..20.0, lu in 0.0f64..50.0) {
        let s = NetworkScenario::homogeneous(lb, lu).unwrap();
        let got = activity_prob(&s, 0).unwrap();
        prop_assert!((got - single_tier_activity(lu, lb)).abs() < 1e-12);
    }

    #[test]
    fn activity_grows_with_load(l0 in 0.1f64..5.0, l1 in 0.1f64..20.0, lu in 0.01f64..20.0) {
        let lo = two_tier(l0, l1, lu, 3.0);
        let hi = lo.with_ue_density(lu * 1.5).unwrap();
        for t in 0..2 {
            let (a, b) = (activity_prob(&lo, t).unwrap(), activity_prob(&hi, t).unwrap());
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b > a);
        }
    }

    #[test]
    fn kernel_is_increasing_and_scales(x in 1e-3f64..1e3, d in 0.1f64..10.0) {
        // The α = 4 kernel depends on w and D only through w/D^α, times D².
        let a = interference_a_alpha4(x * d.powi(4), d.powi(4));
        let unit = interference_a_alpha4(x, 1.0);
        prop_assert!((a - d * d * unit).abs() <= 1e-12 * a.abs());
        prop_assert!(interference_a_alpha4(x * 1.1, 1.0) > unit);
    }

    #[test]
    fn rate_bounds_bracket(phi in 0.01f64..=1.0) {
        let (lo, hi) = closed_form_rate_bounds(phi).unwrap();
        let exact = rate_alpha4_s_form(phi).unwrap().0;
        prop_assert!(lo <= exact && exact <= hi);
    }

    #[test]
    fn rate_grows_with_density(lb in 0.05f64..20.0, lu in 0.05f64..20.0) {
        let s = NetworkScenario::homogeneous(lb, lu).unwrap();
        let a = average_rate(&s).unwrap();
        let b = average_rate(&s.with_tier_density(0, lb * 1.2).unwrap()).unwrap().rate;
        prop_assert!(b >= a.rate);
        // Deep in saturation the activity rounds to 1 and both rates equal the
        // full-load value, so only demand a strict gain below that.
        if a.activity_prob[0] < 1.0 - 1e-6 {
            prop_assert!(b > a.rate);
        }
    }

    #[test]
    fn closed_form_density_is_linear_in_load(lu in 0.01f64..100.0, k in 0.1f64..10.0, r0 in 2.9f64..6.0) {
        let a = closed_form_density_bounds(lu, 1.0, r0).unwrap();
        let b = closed_form_density_bounds(k * lu, 1.0, r0).unwrap();
        prop_assert!((b.upper - k * a.upper).abs() <= 1e-9 * b.upper);
        prop_assert!((b.lower - k * a.lower).abs() <= 1e-9 * b.upper);
        prop_assert!(a.lower <= a.upper);
    }

    #[test]
    fn optimum_meets_requirement(lu in 0.1f64..20.0, r0 in 2.2f64..4.0) {
        let template = NetworkScenario::homogeneous(1.0, lu).unwrap();
        let sol = optimize_single_tier(&template, r0).unwrap();
        prop_assert!(sol.achieved_rate >= r0 - 1e-6);
        prop_assert!((rate_at(&template, &sol.densities).unwrap() - sol.achieved_rate).abs() < 1e-9);
        // A slightly sparser network misses the target.
        let sparser = [sol.densities[0] * 0.99];
        prop_assert!(rate_at(&template, &sparser).unwrap() < r0);
    }

    #[test]
    fn area_power_is_linear(a in 0.0f64..50.0, s in 0.0f64..50.0, k in 0.0f64..10.0) {
        let tiers = vec![presets::micro_tier(1.0)];
        let p = area_power(&tiers, &[a], &[s]).unwrap();
        let pk = area_power(&tiers, &[k * a], &[k * s]).unwrap();
        prop_assert!((pk - k * p).abs() <= 1e-9 * pk.max(1.0));
    }

    #[test]
    fn savings_are_nonnegative(full in 0.0f64..100.0, frac in 0.0f64..=1.0) {
        let tiers = vec![presets::pico_tier(1.0), presets::macro_tier(1.0)];
        let f = [full, full / 3.0];
        let p = [full * frac, full / 3.0 * frac];
        let saved = savings_per_area(&f, &p, &tiers).unwrap();
        prop_assert!(saved >= 0.0);
        let with_sleep = area_power(&tiers, &p, &[f[0] - p[0], f[1] - p[1]]).unwrap();
        let always_on = deployment_objective(&NetworkScenario::new(tiers.clone(), 1.0, Noise::Watts(0.0)).unwrap(), &f);
        prop_assert!((always_on - with_sleep - saved).abs() <= 1e-9 * always_on.max(1.0));
    }

    #[test]
    fn scenario_json_round_trips(l0 in 0.0f64..10.0, l1 in 0.01f64..10.0, lu in 0.0f64..100.0, snr in -10.0f64..90.0) {
        let s = two_tier(l0, l1, lu, 2.0).with_noise(Noise::SnrDb(snr)).unwrap();
        let back = NetworkScenario::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(s, back);
    }
}
