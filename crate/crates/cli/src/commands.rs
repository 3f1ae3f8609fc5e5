use densenet::geometry::tier_connect_prob;
use densenet::montecarlo::{simulate, SimulationConfig, Z_95};
use densenet::optimizer::{closed_form_density_bounds, optimize_deployment, ClosedFormDensityBounds};
use densenet::power::daily_savings;
use densenet::rate::{average_rate_with, closed_form_rate_bounds, RateOptions, RateResult};
use densenet::scenario::{NetworkScenario, TrafficProfile};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{model_status, CliError, ExitStatus};
use crate::output::{Cell, Report, Table};
use crate::sweep::{apply, Param, Sweep};

pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const MIN_VALIDATE_TRIALS: usize = 100;

/// Parsed and loaded inputs shared by every verb.
pub struct Inputs {
    pub scenario: NetworkScenario,
    pub r0: Option<f64>,
    pub profile: Option<TrafficProfile>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub sweep: Option<Sweep>,
    pub closed_bounds: bool,
    pub full_load_override: bool,
}

pub struct Outcome {
    pub report: Report,
    pub status: ExitStatus,
}

fn tier_names(s: &NetworkScenario) -> Vec<String> {
    s.tiers().iter().map(|t| t.name.clone()).collect()
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn snake(v: &impl Serialize) -> String {
    match to_json(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Swept points as (value, scenario, r0). A single unswept point has no value.
type Point = (Option<f64>, densenet::Result<(NetworkScenario, Option<f64>)>);

fn points(inputs: &Inputs) -> Vec<Point> {
    match &inputs.sweep {
        None => vec![(None, Ok((inputs.scenario.clone(), inputs.r0)))],
        Some(sw) => sw
            .values()
            .into_iter()
            .map(|v| (Some(v), apply(&sw.param, v, &inputs.scenario, inputs.r0)))
            .collect(),
    }
}

fn sweep_json(inputs: &Inputs) -> Value {
    inputs.sweep.as_ref().map_or(Value::Null, |s| {
        json!({"param": s.param.name(), "values": s.values()})
    })
}

fn reject(cond: bool, what: &str, verb: &str) -> Result<(), CliError> {
    if cond {
        Err(CliError::Usage(format!("{what} is not supported by '{verb}'")))
    } else {
        Ok(())
    }
}

/// Closed-form rate bounds need one interference-limited Rayleigh tier with α = 4.
fn closed_forms_apply(s: &NetworkScenario) -> bool {
    s.num_tiers() == 1 && s.tiers()[0].pathloss_exponent == 4.0 && s.tiers()[0].nakagami_m == 1.0
}

const CLOSED_FORM_SCOPE: &str =
    "closed-form bounds cover a single Rayleigh tier with α = 4 and ignore noise";

pub fn cmd_rate(inputs: &Inputs) -> Result<Outcome, CliError> {
    reject(inputs.r0.is_some(), "--r0", "rate")?;
    reject(inputs.profile.is_some(), "--profile", "rate")?;
    reject(inputs.trials.is_some() || inputs.seed.is_some(), "--trials/--seed", "rate")?;
    if let Some(sw) = &inputs.sweep {
        reject(sw.param == Param::R0, "sweeping r0", "rate")?;
    }
    let names = tier_names(&inputs.scenario);
    let mut columns = Vec::new();
    if let Some(sw) = &inputs.sweep {
        columns.push(sw.param.header());
    }
    columns.push("rate (b/s/Hz)".into());
    for n in &names {
        columns.push(format!("connect_{n} (prob)"));
        columns.push(format!("activity_{n} (prob)"));
    }
    if inputs.closed_bounds {
        columns.push("closed_lower (b/s/Hz)".into());
        columns.push("closed_upper (b/s/Hz)".into());
    }
    columns.push("status".into());
    let mut table = Table::new(columns);
    let opts = if inputs.full_load_override {
        RateOptions::full_load()
    } else {
        RateOptions::default()
    };
    let mut status = ExitStatus::Ok;
    let mut notes = Vec::new();
    let mut rows_json = Vec::new();
    if inputs.closed_bounds {
        notes.push(format!("note: {CLOSED_FORM_SCOPE}"));
    }
    for (value, p) in points(inputs) {
        let result = p.and_then(|(s, _)| {
            let r = average_rate_with(&s, &opts)?;
            let bounds = if inputs.closed_bounds && closed_forms_apply(&s) {
                let phi = if inputs.full_load_override { 1.0 } else { r.activity_prob[0] };
                Some(closed_form_rate_bounds(phi)?)
            } else {
                None
            };
            Ok((r, bounds))
        });
        let mut row: Vec<Cell> = value.map(Cell::from).into_iter().collect();
        match result {
            Ok((r, bounds)) => {
                row.push(if r.no_interference { Cell::Empty } else { r.rate.into() });
                for t in 0..names.len() {
                    row.push(r.connect_prob[t].into());
                    row.push(r.activity_prob[t].into());
                }
                if inputs.closed_bounds {
                    row.push(bounds.map(|b| b.0).into());
                    row.push(bounds.map(|b| b.1).into());
                }
                let st = if r.no_interference { "unbounded: no active interferer and no noise" } else { "ok" };
                row.push(st.into());
                rows_json.push(rate_row_json(value, Some(&r), bounds, None));
            }
            Err(e) => {
                status = status.max(model_status(&e));
                row.extend(std::iter::repeat_n(Cell::Empty, 1 + 2 * names.len()));
                if inputs.closed_bounds {
                    row.extend([Cell::Empty, Cell::Empty]);
                }
                row.push(format!("error: {e}").into());
                rows_json.push(rate_row_json(value, None, None, Some(e.to_string())));
            }
        }
        table.push(row);
    }
    if inputs.full_load_override {
        notes.push("every deployed BS transmits (full-load override)".into());
    }
    Ok(Outcome {
        report: Report {
            command: "rate",
            table,
            notes,
            json: json!({
                "full_load_override": inputs.full_load_override,
                "sweep": sweep_json(inputs),
                "tiers": names,
                "points": rows_json,
            }),
        },
        status,
    })
}

fn rate_row_json(value: Option<f64>, r: Option<&RateResult>, bounds: Option<(f64, f64)>, error: Option<String>) -> Value {
    json!({
        "value": value,
        "result": r.map(to_json),
        "closed_bounds_bps_hz": bounds.map(|(lo, hi)| json!({"lower": lo, "upper": hi})),
        "error": error,
    })
}

pub fn cmd_optimize(inputs: &Inputs) -> Result<Outcome, CliError> {
    reject(inputs.profile.is_some(), "--profile", "optimize")?;
    reject(inputs.trials.is_some() || inputs.seed.is_some(), "--trials/--seed", "optimize")?;
    reject(inputs.full_load_override, "--full-load-override", "optimize")?;
    let swept_r0 = inputs.sweep.as_ref().is_some_and(|s| s.param == Param::R0);
    if inputs.r0.is_none() && !swept_r0 {
        return Err(CliError::Usage("'optimize' needs --r0 or an r0 sweep".into()));
    }
    let names = tier_names(&inputs.scenario);
    let mut columns = Vec::new();
    if let Some(sw) = inputs.sweep.as_ref().filter(|_| !swept_r0) {
        columns.push(sw.param.header());
    }
    columns.push("r0 (b/s/Hz)".into());
    columns.extend(names.iter().map(|n| format!("density_{n} (BSs/km²)")));
    columns.push("objective (W/km²)".into());
    columns.push("achieved_rate (b/s/Hz)".into());
    columns.push("solver".into());
    columns.push("flags".into());
    if inputs.closed_bounds {
        columns.push("closed_lower (BSs/km²)".into());
        columns.push("closed_upper (BSs/km²)".into());
    }
    columns.push("status".into());
    let mut table = Table::new(columns);
    let mut status = ExitStatus::Ok;
    let mut rows_json = Vec::new();
    let mut notes = Vec::new();
    if inputs.closed_bounds {
        notes.push(format!("note: {CLOSED_FORM_SCOPE}"));
    }
    for (value, p) in points(inputs) {
        let mut row: Vec<Cell> = Vec::new();
        if !swept_r0 {
            row.extend(value.map(Cell::from));
        }
        let r0 = p.as_ref().ok().and_then(|(_, r0)| *r0);
        row.push(r0.into());
        let result = p.and_then(|(s, r0)| {
            let r0 = r0.expect("r0 checked above");
            let sol = optimize_deployment(&s, r0)?;
            let bounds = if inputs.closed_bounds && closed_forms_apply(&s) {
                let t = &s.tiers()[0];
                Some(closed_form_density_bounds(s.ue_density(), t.shadow_fractional_moment(), r0)?)
            } else {
                None
            };
            Ok((sol, bounds))
        });
        match result {
            Ok((sol, bounds)) => {
                row.extend(sol.densities.iter().map(|&d| Cell::from(d)));
                row.push(sol.objective.into());
                row.push(sol.achieved_rate.into());
                row.push(snake(&sol.solver).into());
                let flags: Vec<String> = sol.flags.iter().map(snake).collect();
                row.push(flags.join(" ").into());
                if inputs.closed_bounds {
                    row.push(bounds.map(|b| b.lower).into());
                    row.push(bounds.map(|b| b.upper).into());
                }
                row.push("ok".into());
                rows_json.push(optimize_row_json(value, r0, Some(to_json(&sol)), bounds, None));
            }
            Err(e) => {
                status = status.max(model_status(&e));
                row.extend(std::iter::repeat_n(Cell::Empty, names.len() + 4));
                if inputs.closed_bounds {
                    row.extend([Cell::Empty, Cell::Empty]);
                }
                row.push(format!("error: {e}").into());
                rows_json.push(optimize_row_json(value, r0, None, None, Some(e.to_string())));
            }
        }
        table.push(row);
    }
    Ok(Outcome {
        report: Report {
            command: "optimize",
            table,
            notes,
            json: json!({
                "sweep": sweep_json(inputs),
                "tiers": names,
                "points": rows_json,
            }),
        },
        status,
    })
}

fn optimize_row_json(
    value: Option<f64>,
    r0: Option<f64>,
    solution: Option<Value>,
    bounds: Option<ClosedFormDensityBounds>,
    error: Option<String>,
) -> Value {
    json!({
        "value": value,
        "r0": r0,
        "solution": solution,
        "closed_bounds": bounds.as_ref().map(to_json),
        "error": error,
    })
}

pub fn cmd_savings(inputs: &Inputs) -> Result<Outcome, CliError> {
    reject(inputs.sweep.is_some(), "--sweep", "savings")?;
    reject(inputs.closed_bounds, "--closed-bounds", "savings")?;
    reject(inputs.full_load_override, "--full-load-override", "savings")?;
    reject(inputs.trials.is_some() || inputs.seed.is_some(), "--trials/--seed", "savings")?;
    let r0 = inputs
        .r0
        .ok_or_else(|| CliError::Usage("'savings' needs --r0".into()))?;
    let (profile, source) = match (&inputs.profile, inputs.scenario.traffic_profile()) {
        (Some(p), _) => (p.clone(), "profile file"),
        (None, Some(p)) => (p.clone(), "scenario file"),
        (None, None) => (TrafficProfile::dense_urban(), "built-in dense-urban profile"),
    };
    let report = daily_savings(&inputs.scenario, &profile, r0)?;
    let names = tier_names(&inputs.scenario);
    let mut columns = vec!["hours".to_string(), "load (%)".into()];
    columns.extend(names.iter().map(|n| format!("active_{n} (BSs/km²)")));
    columns.extend([
        "consumption_sleep (W/km²)".into(),
        "consumption_always_on (W/km²)".into(),
        "savings (W/km²)".into(),
        "relative_saving (%)".into(),
    ]);
    let mut table = Table::new(columns);
    for e in &report.entries {
        let mut row: Vec<Cell> = vec![format!("{:02}-{:02}", e.hour_start, e.hour_end).into(), (100.0 * e.relative_load).into()];
        row.extend(e.active_densities.iter().map(|&d| Cell::from(d)));
        row.push(e.consumption_with_sleep.into());
        row.push(e.consumption_full.into());
        row.push(e.savings.into());
        row.push((100.0 * e.relative_saving).into());
        table.push(row);
    }
    let deployed: Vec<String> = names
        .iter()
        .zip(&report.deployed_densities)
        .map(|(n, d)| format!("{n} {d:.6}"))
        .collect();
    let mut notes = vec![
        format!("profile: {source}"),
        format!("deployed for peak load (BSs/km²): {}", deployed.join(", ")),
        format!("daily relative saving: {:.4} %", 100.0 * report.daily_relative_saving),
        format!("mean saving: {:.6} W/km²", report.mean_savings),
    ];
    for f in &report.failed_hours {
        notes.push(format!("failed {:02}-{:02}: {}", f.hour_start, f.hour_end, f.error));
    }
    let status = if report.is_complete() { ExitStatus::Ok } else { ExitStatus::Infeasible };
    Ok(Outcome {
        report: Report {
            command: "savings",
            table,
            notes,
            json: json!({"profile_source": source, "tiers": names, "report": to_json(&report)}),
        },
        status,
    })
}

fn sim_config(inputs: &Inputs, verb: &str) -> Result<SimulationConfig, CliError> {
    reject(inputs.sweep.is_some(), "--sweep", verb)?;
    reject(inputs.closed_bounds, "--closed-bounds", verb)?;
    reject(inputs.r0.is_some(), "--r0", verb)?;
    reject(inputs.profile.is_some(), "--profile", verb)?;
    let trials = inputs.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = inputs.seed.unwrap_or(DEFAULT_SEED);
    Ok(SimulationConfig::new(inputs.scenario.clone(), trials, seed)?.with_full_load(inputs.full_load_override))
}

pub fn cmd_simulate(inputs: &Inputs) -> Result<Outcome, CliError> {
    let cfg = sim_config(inputs, "simulate")?;
    let sim = simulate(&cfg)?;
    let names = tier_names(&inputs.scenario);
    let mut columns = vec![
        "trials".to_string(),
        "seed".into(),
        "region_radius (km)".into(),
        "rate_mean (b/s/Hz)".into(),
        "rate_ci95 (b/s/Hz)".into(),
        "rate_std (b/s/Hz)".into(),
    ];
    for n in &names {
        columns.push(format!("serving_{n} (fraction)"));
        columns.push(format!("activity_{n} (fraction)"));
    }
    columns.push("resampled_trials".into());
    let mut table = Table::new(columns);
    let freqs = sim.serving_frequencies();
    let mut row: Vec<Cell> = vec![
        cfg.trials.into(),
        Cell::Int(cfg.seed),
        cfg.region_radius_km.into(),
        sim.rate.mean.into(),
        sim.rate.half_width.into(),
        sim.rate.std_dev.into(),
    ];
    for t in 0..names.len() {
        row.push(freqs[t].into());
        row.push(sim.activity[t].into());
    }
    row.push(sim.resampled_trials.into());
    table.push(row);
    let mut notes = Vec::new();
    if inputs.full_load_override {
        notes.push("every deployed BS transmits (full-load override)".into());
    }
    Ok(Outcome {
        report: Report {
            command: "simulate",
            table,
            notes,
            json: json!({
                "trials": cfg.trials,
                "seed": cfg.seed,
                "region_radius_km": cfg.region_radius_km,
                "full_load_override": cfg.full_load_override,
                "tiers": names,
                "rate": to_json(&sim.rate),
                "serving_frequencies": freqs,
                "serving_counts": sim.serving_counts,
                "activity": sim.activity,
                "resampled_trials": sim.resampled_trials,
            }),
        },
        status: ExitStatus::Ok,
    })
}

pub fn cmd_validate(inputs: &Inputs) -> Result<Outcome, CliError> {
    let cfg = sim_config(inputs, "validate")?;
    if cfg.trials < MIN_VALIDATE_TRIALS {
        return Err(CliError::Usage(format!(
            "'validate' needs at least {MIN_VALIDATE_TRIALS} trials, got {}",
            cfg.trials
        )));
    }
    let opts = if inputs.full_load_override {
        RateOptions::full_load()
    } else {
        RateOptions::default()
    };
    let analytic = average_rate_with(&inputs.scenario, &opts)?;
    let sim = simulate(&cfg)?;
    let names = tier_names(&inputs.scenario);
    let n = sim.outcomes.len() as f64;
    let mut table = Table::new(vec![
        "quantity".into(),
        "analytic".into(),
        "simulated".into(),
        "ci95".into(),
        "check".into(),
    ]);
    let mc = sim.rate;
    let (rate_ok, rate_check) = if analytic.no_interference {
        let ok = mc.mean.is_infinite();
        (ok, if ok { "both unbounded" } else { "analytic unbounded, simulation finite" })
    } else if mc.mean >= analytic.rate - mc.half_width {
        (true, "lower bound holds")
    } else {
        (false, "lower bound violated beyond ci95")
    };
    table.push(vec![
        "rate (b/s/Hz)".into(),
        if analytic.no_interference { Cell::Empty } else { analytic.rate.into() },
        mc.mean.into(),
        mc.half_width.into(),
        rate_check.into(),
    ]);
    let freqs = sim.serving_frequencies();
    let mut assoc = Vec::new();
    for (t, name) in names.iter().enumerate() {
        let p = tier_connect_prob(&inputs.scenario, t)?;
        let ci = Z_95 * (p * (1.0 - p) / n).sqrt();
        let within = (freqs[t] - p).abs() <= 3.0 * (p * (1.0 - p) / n).sqrt();
        assoc.push(json!({"tier": name, "analytic": p, "simulated": freqs[t], "within_3_sigma": within}));
        table.push(vec![
            format!("connect_{name} (prob)").into(),
            p.into(),
            freqs[t].into(),
            ci.into(),
            (if within { "within 3 sigma" } else { "outside 3 sigma" }).into(),
        ]);
    }
    let mut activity = Vec::new();
    for (t, name) in names.iter().enumerate() {
        let a = analytic.activity_prob[t];
        let s = sim.activity[t];
        let gap = if a > 0.0 { 100.0 * (s - a) / a } else { 0.0 };
        activity.push(json!({"tier": name, "analytic": a, "simulated": s, "relative_gap_percent": gap}));
        table.push(vec![
            format!("activity_{name} (prob)").into(),
            a.into(),
            s.into(),
            Cell::Empty,
            format!("{gap:+.2} %").into(),
        ]);
    }
    let notes = vec![
        format!(
            "{} trials, seed {}, region radius {:.3} km{}",
            cfg.trials,
            cfg.seed,
            cfg.region_radius_km,
            if cfg.full_load_override { ", full-load override" } else { "" }
        ),
        "analytic activity treats cell loads as independent; simulated cells are Voronoi-correlated and run a few percent lower".into(),
        format!("verdict: {}", if rate_ok { "PASS" } else { "FAIL" }),
    ];
    Ok(Outcome {
        report: Report {
            command: "validate",
            table,
            notes,
            json: json!({
                "trials": cfg.trials,
                "seed": cfg.seed,
                "region_radius_km": cfg.region_radius_km,
                "full_load_override": cfg.full_load_override,
                "rate": {
                    "analytic": to_json(&analytic),
                    "simulated": to_json(&mc),
                    "lower_bound_holds": rate_ok,
                },
                "association": assoc,
                "activity": activity,
                "passed": rate_ok,
            }),
        },
        status: if rate_ok { ExitStatus::Ok } else { ExitStatus::Validation },
    })
}
