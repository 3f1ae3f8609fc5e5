//! Minimum-power deployment: the cheapest BS densities (Σ C_t λ_t) that still
//! deliver a target average rate.
//!
//! Every search reduces to one primitive, [`radial_solve`]: along a fixed
//! density direction the rate is increasing in the scale factor, so the
//! scale meeting the requirement is a single root. The single-tier solver
//! is exactly that root; the multi-tier solver runs a penalized simplex and
//! then projects each candidate radially onto the constraint surface.

use std::cell::RefCell;
use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent_root, nelder_mead_penalized, positive_real_roots, NelderMeadOptions};
use crate::rate::{
    average_rate_with, closed_form_rate_lower, closed_form_rate_upper, RateOptions,
};
use crate::scenario::NetworkScenario;

/// Largest density any search will try, in BSs/km².
pub const DENSITY_CAP: f64 = 1e6;
pub const DEFAULT_SEED: u64 = 42;
/// Slack allowed on the rate requirement when re-checking a solution.
pub const FEASIBILITY_TOL: f64 = 1e-3;

const RATE_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-9;
// Two candidates closer than this in objective but with visibly different
// splits expose a flat valley of the objective.
const RIDGE_OBJECTIVE_TOL: f64 = 1e-4;
const RIDGE_SPLIT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Brent,
    Simplex,
    ClosedLower,
    ClosedUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionFlag {
    /// The requirement is met even with every BS transmitting, so the
    /// density can shrink towards zero; the returned density is that limit.
    FullLoadBoundary,
    /// Several density splits reach the same objective.
    DegenerateRidge,
    /// The simplex point was rescaled onto the rate constraint.
    FeasibilityRestored,
    /// The winning simplex run stopped on its iteration budget.
    BudgetExhausted,
    /// A degenerate optimum was split evenly across tiers.
    UniformSplit,
}

/// One line of the solver log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: usize,
    pub stage: String,
    pub densities: Vec<f64>,
    pub rate: Option<f64>,
    pub objective: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentSolution {
    /// BSs/km² per tier.
    pub densities: Vec<f64>,
    /// Area power of the active deployment, W/km².
    pub objective: f64,
    /// b/s/Hz at the returned densities.
    pub achieved_rate: f64,
    pub solver: Solver,
    pub trace: Vec<TraceEntry>,
    pub flags: Vec<SolutionFlag>,
}

impl DeploymentSolution {
    pub fn has_flag(&self, flag: SolutionFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn total_density(&self) -> f64 {
        self.densities.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Random simplex starts on top of the single-tier corner starts.
    pub restarts: usize,
    pub seed: u64,
    pub simplex: NelderMeadOptions,
    /// Run the simplex starts on the rayon pool. The result does not depend
    /// on this.
    pub parallel: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            seed: DEFAULT_SEED,
            simplex: NelderMeadOptions {
                initial_penalty: 1e2,
                penalty_growth: 10.0,
                max_penalty: 1e10,
                restarts: 4,
                max_iterations: 400,
                xtol: 1e-8,
                ftol: 1e-12,
                feas_tol: 1e-9,
                initial_step: 0.25,
                ..NelderMeadOptions::default()
            },
            parallel: true,
        }
    }
}

/// Σ_t C_t λ_t for the given densities.
pub fn deployment_objective(scenario: &NetworkScenario, densities: &[f64]) -> f64 {
    scenario
        .tiers()
        .iter()
        .zip(densities)
        .map(|(t, &d)| t.active_cost() * d)
        .sum()
}

/// Load-aware average rate with the given densities substituted.
pub fn rate_at(template: &NetworkScenario, densities: &[f64]) -> Result<f64> {
    let s = template.with_densities(densities)?;
    let opts = RateOptions {
        tol: RATE_TOL,
        ..RateOptions::default()
    };
    Ok(average_rate_with(&s, &opts)?.rate)
}

fn check_r0(r0: f64) -> Result<()> {
    if r0 > 0.0 && r0.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("rate requirement must be positive and finite, got {r0}")))
    }
}

/// Where a radial search along one density direction ended.
#[derive(Debug, Clone)]
struct Radial {
    densities: Vec<f64>,
    rate: f64,
    boundary: bool,
    trace: Vec<TraceEntry>,
}

fn scaled(direction: &[f64], k: f64) -> Vec<f64> {
    direction.iter().map(|d| d * k).collect()
}

/// Smallest multiple k·direction meeting `rate >= r0`.
///
/// In an interference-limited network the rate tends to its full-load value
/// as k → 0, so when that value already meets the requirement the infimum is
/// k = 0 and the result is flagged as a boundary solution.
fn radial_solve(
    template: &NetworkScenario,
    direction: &[f64],
    r0: f64,
    stage: &str,
) -> Result<Radial> {
    let trace = RefCell::new(Vec::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let log = |densities: Vec<f64>, rate: Option<f64>, note: &str| {
        let mut t = trace.borrow_mut();
        let step = t.len();
        t.push(TraceEntry {
            step,
            stage: stage.to_string(),
            objective: deployment_objective(template, &densities),
            densities,
            rate,
            note: note.to_string(),
        });
    };
    let rate_k = |k: f64| -> Result<f64> {
        let d = scaled(direction, k);
        let r = rate_at(template, &d)?;
        log(d, Some(r), "");
        Ok(r)
    };

    if template.noise_w() == 0.0 {
        let limit = if template.ue_density() == 0.0 {
            f64::INFINITY
        } else {
            let s = template.with_densities(direction)?;
            average_rate_with(&s, &RateOptions::full_load())?.rate
        };
        if limit >= r0 {
            let d = vec![0.0; direction.len()];
            log(d.clone(), Some(limit), "full-load rate already meets the requirement");
            return Ok(Radial {
                densities: d,
                rate: limit,
                boundary: true,
                trace: trace.into_inner(),
            });
        }
    }

    let dmax = direction.iter().fold(0.0_f64, |m, &d| m.max(d));
    let (mut lo, mut hi) = (1.0, 1.0);
    let r_one = rate_k(1.0)?;
    if r_one >= r0 {
        loop {
            lo *= 0.25;
            if lo * dmax < 1e-12 {
                // Only reachable through rounding; the noise-free limit was
                // handled above and noise drives the rate to zero.
                let d = scaled(direction, hi);
                return Ok(Radial {
                    rate: rate_at(template, &d)?,
                    densities: d,
                    boundary: true,
                    trace: trace.into_inner(),
                });
            }
            if rate_k(lo)? < r0 {
                break;
            }
            hi = lo;
        }
    } else {
        loop {
            lo = hi;
            hi *= 4.0;
            if hi * dmax > DENSITY_CAP {
                return Err(Error::Infeasible {
                    r0,
                    reason: format!(
                        "rate saturates below the requirement before the {DENSITY_CAP} BSs/km² cap"
                    ),
                });
            }
            if rate_k(hi)? >= r0 {
                break;
            }
        }
    }

    let g = |k: f64| match rate_k(k) {
        Ok(r) => r - r0,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let root = brent_root(g, lo, hi, 1e-13 * hi);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let mut k = root?;
    // Step just past the root so the returned point is feasible.
    let mut rate = rate_k(k)?;
    let mut bump = 1e-12;
    while rate < r0 && k < hi {
        k = (k * (1.0 + bump)).min(hi);
        rate = rate_k(k)?;
        bump *= 4.0;
    }
    Ok(Radial {
        densities: scaled(direction, k),
        rate,
        boundary: false,
        trace: trace.into_inner(),
    })
}

fn seed_direction(template: &NetworkScenario) -> f64 {
    let lu = template.ue_density();
    if lu > 0.0 {
        lu
    } else {
        1.0
    }
}

/// Minimum density of a one-tier network meeting `r0` (Brent root of
/// rate(λ) − r0, bracket grown geometrically from λ_u up to the cap).
pub fn optimize_single_tier(template: &NetworkScenario, r0: f64) -> Result<DeploymentSolution> {
    if template.num_tiers() != 1 {
        return Err(Error::Precondition(format!(
            "single-tier optimization needs one tier, got {}",
            template.num_tiers()
        )));
    }
    check_r0(r0)?;
    let radial = radial_solve(template, &[seed_direction(template)], r0, "brent")?;
    let mut flags = Vec::new();
    if radial.boundary {
        flags.push(SolutionFlag::FullLoadBoundary);
    }
    Ok(DeploymentSolution {
        objective: deployment_objective(template, &radial.densities),
        densities: radial.densities,
        achieved_rate: radial.rate,
        solver: Solver::Brent,
        trace: radial.trace,
        flags,
    })
}

/// Single-tier Brent for one tier, penalized simplex otherwise.
pub fn optimize_deployment(template: &NetworkScenario, r0: f64) -> Result<DeploymentSolution> {
    if template.num_tiers() == 1 {
        optimize_single_tier(template, r0)
    } else {
        optimize_multi_tier(template, r0)
    }
}

struct Candidate {
    densities: Vec<f64>,
    objective: f64,
    rate: f64,
    boundary: bool,
    restored: bool,
    budget_exhausted: bool,
    label: String,
    trace: Vec<TraceEntry>,
}

fn identical_tiers(template: &NetworkScenario) -> Option<(usize, usize)> {
    let t = template.tiers();
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            let (a, b) = (&t[i], &t[j]);
            if a.tx_power_w == b.tx_power_w
                && a.bias_db == b.bias_db
                && a.pathloss_exponent == b.pathloss_exponent
                && a.nakagami_m == b.nakagami_m
                && a.shadow_mean_db == b.shadow_mean_db
                && a.shadow_std_db == b.shadow_std_db
                && a.active_cost() == b.active_cost()
            {
                return Some((i, j));
            }
        }
    }
    None
}

fn split(d: &[f64]) -> Vec<f64> {
    let total: f64 = d.iter().sum();
    if total == 0.0 {
        return vec![0.0; d.len()];
    }
    d.iter().map(|v| v / total).collect()
}

/// Minimum-power multi-tier deployment with default options.
pub fn optimize_multi_tier(template: &NetworkScenario, r0: f64) -> Result<DeploymentSolution> {
    optimize_multi_tier_with(template, r0, &OptimizerOptions::default())
}

/// Penalized downhill simplex over the tier densities.
///
/// Starts are the single-tier optima (one per tier) followed by
/// `options.restarts` log-uniform draws in [λ_u/100, 10 λ_u] per tier. Each
/// simplex result is rescaled onto the rate constraint, and the cheapest
/// candidate wins (ties: lowest tier-0 density).
pub fn optimize_multi_tier_with(
    template: &NetworkScenario,
    r0: f64,
    options: &OptimizerOptions,
) -> Result<DeploymentSolution> {
    let n = template.num_tiers();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "multi-tier optimization needs at least two tiers, got {n}"
        )));
    }
    check_r0(r0)?;
    let lu = seed_direction(template);
    let costs: Vec<f64> = template.tiers().iter().map(|t| t.active_cost()).collect();

    let mut trace = Vec::new();
    let mut candidates = Vec::new();
    let mut reference = vec![lu; n];
    for t in 0..n {
        let mut dir = vec![0.0; n];
        dir[t] = lu;
        match radial_solve(template, &dir, r0, &format!("corner {t}")) {
            Ok(r) => {
                if r.densities[t] > 0.0 {
                    reference[t] = r.densities[t];
                }
                candidates.push(Candidate {
                    objective: deployment_objective(template, &r.densities),
                    densities: r.densities,
                    rate: r.rate,
                    boundary: r.boundary,
                    restored: false,
                    budget_exhausted: false,
                    label: format!("tier {t} alone"),
                    trace: r.trace,
                });
            }
            Err(Error::Infeasible { reason, .. }) => trace.push(TraceEntry {
                step: 0,
                stage: format!("corner {t}"),
                densities: dir,
                rate: None,
                objective: f64::NAN,
                note: format!("tier {t} alone is infeasible: {reason}"),
            }),
            Err(e) => return Err(e),
        }
    }

    let best_corner = candidates
        .iter()
        .map(|c| c.objective)
        .fold(f64::INFINITY, f64::min);
    // A zero-cost corner cannot be beaten, the objective being nonnegative.
    let skip_simplex = best_corner == 0.0;
    let obj_scale = if best_corner.is_finite() && best_corner > 0.0 {
        best_corner
    } else {
        costs.iter().zip(&reference).map(|(c, r)| c * r).sum::<f64>().max(1.0)
    };

    if !skip_simplex {
        let mut starts: Vec<(String, Vec<f64>)> = candidates
            .iter()
            .map(|c| (format!("simplex from {}", c.label), c.densities.clone()))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let (a, b) = ((lu / 100.0).ln(), (10.0 * lu).ln());
        for i in 0..options.restarts {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(a..b).exp()).collect();
            starts.push((format!("simplex start {i}"), x));
        }
        let run = |(label, start): &(String, Vec<f64>)| {
            simplex_candidate(template, r0, &costs, &reference, obj_scale, start, label, options)
        };
        let results: Vec<Result<Candidate>> = if options.parallel {
            starts.par_iter().map(run).collect()
        } else {
            starts.iter().map(run).collect()
        };
        for r in results {
            match r {
                Ok(c) => candidates.push(c),
                Err(Error::Infeasible { reason, .. }) => trace.push(TraceEntry {
                    step: 0,
                    stage: "simplex".into(),
                    densities: vec![],
                    rate: None,
                    objective: f64::NAN,
                    note: reason,
                }),
                Err(e) => return Err(e),
            }
        }
    }

    let best = candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let tol = TIE_TOL * a.objective.abs().max(b.objective.abs());
            if (a.objective - b.objective).abs() <= tol {
                a.densities[0].total_cmp(&b.densities[0])
            } else {
                a.objective.total_cmp(&b.objective)
            }
        })
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Infeasible {
            r0,
            reason: "no start reached the requirement below the density cap".into(),
        })?;

    let mut flags = Vec::new();
    let winner = &candidates[best];
    if winner.boundary {
        flags.push(SolutionFlag::FullLoadBoundary);
    }
    if winner.restored {
        flags.push(SolutionFlag::FeasibilityRestored);
    }
    if winner.budget_exhausted {
        flags.push(SolutionFlag::BudgetExhausted);
    }
    let winner_split = split(&winner.densities);
    let mut ridge_note = None;
    if let Some((i, j)) = identical_tiers(template) {
        ridge_note = Some(format!(
            "tiers {i} and {j} are interchangeable; only their summed density matters"
        ));
    } else {
        for c in &candidates {
            let close = (c.objective - winner.objective).abs()
                <= RIDGE_OBJECTIVE_TOL * winner.objective.abs().max(1e-300);
            let apart = split(&c.densities)
                .iter()
                .zip(&winner_split)
                .any(|(a, b)| (a - b).abs() > RIDGE_SPLIT_TOL);
            if close && apart && winner.objective > 0.0 {
                ridge_note = Some(format!(
                    "{} reaches the same objective with split {:?}",
                    c.label,
                    split(&c.densities)
                ));
                break;
            }
        }
    }
    if ridge_note.is_some() {
        flags.push(SolutionFlag::DegenerateRidge);
    }

    for c in &candidates {
        for e in &c.trace {
            let mut e = e.clone();
            e.step = trace.len();
            trace.push(e);
        }
    }
    let summary = |c: &Candidate| TraceEntry {
        step: 0,
        stage: "candidate".into(),
        densities: c.densities.clone(),
        rate: Some(c.rate),
        objective: c.objective,
        note: c.label.clone(),
    };
    for c in &candidates {
        let mut e = summary(c);
        e.step = trace.len();
        trace.push(e);
    }
    let mut e = summary(winner);
    e.stage = "selected".into();
    if let Some(note) = ridge_note {
        e.note = format!("{}; degenerate ridge: {note}", e.note);
    }
    e.step = trace.len();
    trace.push(e);

    Ok(DeploymentSolution {
        densities: winner.densities.clone(),
        objective: winner.objective,
        achieved_rate: winner.rate,
        solver: Solver::Simplex,
        trace,
        flags,
    })
}

#[allow(clippy::too_many_arguments)]
fn simplex_candidate(
    template: &NetworkScenario,
    r0: f64,
    costs: &[f64],
    reference: &[f64],
    obj_scale: f64,
    start: &[f64],
    label: &str,
    options: &OptimizerOptions,
) -> Result<Candidate> {
    let n = costs.len();
    // Work in y_t = λ_t / reference_t so every coordinate is O(1).
    let to_density = |y: &[f64]| -> Vec<f64> { y.iter().zip(reference).map(|(a, r)| a * r).collect() };
    let objective = |y: &[f64]| {
        y.iter()
            .zip(costs.iter().zip(reference))
            .map(|(a, (c, r))| a * c * r)
            .sum::<f64>()
            / obj_scale
    };
    let constraint = |y: &[f64]| {
        if y.iter().all(|&v| v == 0.0) {
            return -r0;
        }
        match rate_at(template, &to_density(y)) {
            Ok(r) => r - r0,
            Err(_) => -r0 - 1.0,
        }
    };
    let mut nm = options.simplex.clone();
    nm.lower = Some(vec![0.0; n]);
    nm.upper = Some(reference.iter().map(|r| DENSITY_CAP / r).collect());
    let y0: Vec<f64> = start.iter().zip(reference).map(|(a, r)| a / r).collect();
    let out = nelder_mead_penalized(objective, constraint, &y0, &nm)?;

    let mut trace: Vec<TraceEntry> = out
        .trace
        .iter()
        .map(|rec| TraceEntry {
            step: 0,
            stage: label.to_string(),
            densities: to_density(&rec.x),
            rate: Some(rec.constraint + r0),
            objective: rec.objective * obj_scale,
            note: format!(
                "run {} penalty {:.1e} iterations {}{}",
                rec.restart,
                rec.penalty,
                rec.iterations,
                if rec.converged { "" } else { " (budget)" }
            ),
        })
        .collect();
    let found = to_density(&out.x);
    if found.iter().all(|&d| d == 0.0) {
        return Err(Error::Infeasible {
            r0,
            reason: format!("{label} collapsed to the empty deployment"),
        });
    }
    let radial = radial_solve(template, &found, r0, &format!("{label} projection"))?;
    let k = radial.densities.iter().sum::<f64>() / found.iter().sum::<f64>();
    trace.extend(radial.trace);
    Ok(Candidate {
        objective: deployment_objective(template, &radial.densities),
        densities: radial.densities,
        rate: radial.rate,
        boundary: radial.boundary,
        restored: !out.feasible || k > 1.0 + 1e-9,
        budget_exhausted: out.budget_exhausted,
        label: label.to_string(),
        trace,
    })
}

/// Tiers that differ only by name: solve the merged single-tier problem and
/// spread the total evenly. Any split with the same total is equally good.
pub fn multi_tier_equal_params_reduction(
    scenario: &NetworkScenario,
    r0: f64,
) -> Result<DeploymentSolution> {
    let tiers = scenario.tiers();
    let first = &tiers[0];
    let same = tiers.iter().all(|t| {
        t.tx_power_w == first.tx_power_w
            && t.bias_db == first.bias_db
            && t.pathloss_exponent == first.pathloss_exponent
            && t.nakagami_m == first.nakagami_m
            && t.shadow_mean_db == first.shadow_mean_db
            && t.shadow_std_db == first.shadow_std_db
            && t.active_cost() == first.active_cost()
    });
    if !same {
        return Err(Error::Precondition(
            "equal-parameter reduction needs tiers with identical power, bias, path loss, fading, shadowing and cost"
                .into(),
        ));
    }
    let merged = scenario.with_tiers(vec![first.clone()])?;
    let mut sol = optimize_single_tier(&merged, r0)?;
    let n = tiers.len();
    if n == 1 {
        return Ok(sol);
    }
    let total = sol.densities[0];
    sol.densities = vec![total / n as f64; n];
    sol.objective = deployment_objective(scenario, &sol.densities);
    sol.flags.push(SolutionFlag::UniformSplit);
    sol.flags.push(SolutionFlag::DegenerateRidge);
    sol.trace.push(TraceEntry {
        step: sol.trace.len(),
        stage: "split".into(),
        densities: sol.densities.clone(),
        rate: Some(sol.achieved_rate),
        objective: sol.objective,
        note: format!("total {total} BSs/km² spread evenly over {n} interchangeable tiers"),
    });
    Ok(sol)
}

/// Densities implied by the closed-form rate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormDensityBounds {
    /// Worst case: the density at which even the lower rate bound meets r0.
    pub upper: f64,
    /// Best case: the density at which the upper rate bound meets r0.
    pub lower: f64,
    pub phi_upper: f64,
    pub phi_lower: f64,
    /// The lower rate bound meets r0 at full load, so `upper` is 0.
    pub upper_at_full_load: bool,
    pub lower_at_full_load: bool,
}

/// BS density giving activity `phi` when UEs arrive at `lu` per km².
pub fn density_for_activity(lu: f64, shadow_moment: f64, phi: f64) -> f64 {
    if phi >= 1.0 {
        return 0.0;
    }
    lu / (shadow_moment * -(-phi).ln_1p())
}

// Solve bound(x²) = r0 for x = √φ̄ ∈ (0, 1]. Every bound diverges as
// φ̄ → 0 and decreases in φ̄, so the root is unique.
fn invert_bound(bound: fn(f64) -> Result<f64>, r0: f64) -> Result<(f64, bool)> {
    if bound(1.0)? >= r0 {
        return Ok((1.0, true));
    }
    let mut lo = 0.5;
    while bound(lo * lo)? < r0 {
        lo *= 0.5;
        if lo < 1e-150 {
            return Err(Error::Infeasible {
                r0,
                reason: "closed-form bound stays below the requirement".into(),
            });
        }
    }
    let g = |x: f64| bound(x * x).map(|v| v - r0).unwrap_or(f64::NAN);
    let x = brent_root(g, lo, 1.0, 1e-15)?;
    Ok((x * x, false))
}

/// Closed-form density bracket for an interference-limited Rayleigh network
/// with α = 4.
///
/// The exact closed-form rate bounds are inverted for φ̄ in x = √φ̄ and
/// φ̄ is mapped back to a density. Both results scale linearly in `lu`.
pub fn closed_form_density_bounds(
    lu: f64,
    shadow_moment: f64,
    r0: f64,
) -> Result<ClosedFormDensityBounds> {
    check_r0(r0)?;
    if !(lu >= 0.0) || !(shadow_moment > 0.0) {
        return Err(Error::Precondition(format!(
            "need UE density >= 0 and a positive shadowing moment, got {lu} and {shadow_moment}"
        )));
    }
    let (phi_upper, upper_at_full_load) = invert_bound(closed_form_rate_lower, r0)?;
    let (phi_lower, lower_at_full_load) = invert_bound(closed_form_rate_upper, r0)?;
    Ok(ClosedFormDensityBounds {
        upper: density_for_activity(lu, shadow_moment, phi_upper),
        lower: density_for_activity(lu, shadow_moment, phi_lower),
        phi_upper,
        phi_lower,
        upper_at_full_load,
        lower_at_full_load,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    Worst,
    Best,
}

/// Quartic in x = √φ̄ from the Taylor-simplified bound equations, with
/// ascending coefficients.
///
/// Best case: 9(π(x³ − (4/(3√3) + 1/π)x² + 2/(3√3)) − R0 ln2 (x⁴ − x² + 1)).
/// Worst case, with k = √(π(8−π)) and A = π − 2 arctan√(π/(8−π)):
/// k(4(1 − πx − x²) + 2π²x(x² + 1) − R0 ln2 (πx²(π(x² + 1) − 4) + 4)
///   + ln16 − 4 lnπ) − 4(2πx² + π − 4)A.
/// These simplified forms are kept for comparison only. They lose the root
/// in (0, 1) for requirements above about 2 b/s/Hz, which is why
/// [`closed_form_density_bounds`] inverts the exact bounds instead.
pub fn bound_polynomial(r0: f64, case: BoundCase) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let l = LN_2 * r0;
    match case {
        BoundCase::Best => {
            let s3 = 3f64.sqrt();
            vec![
                9.0 * (2.0 * pi / (3.0 * s3) - l),
                0.0,
                9.0 * (-pi * (4.0 / (3.0 * s3) + 1.0 / pi) + l),
                9.0 * pi,
                -9.0 * l,
            ]
        }
        BoundCase::Worst => {
            let k = (pi * (8.0 - pi)).sqrt();
            let a = pi - 2.0 * (pi / (8.0 - pi)).sqrt().atan();
            vec![
                k * (4.0 - 4.0 * l + 16f64.ln() - 4.0 * pi.ln()) - 4.0 * (pi - 4.0) * a,
                k * (2.0 * pi * pi - 4.0 * pi),
                k * (-4.0 - l * (pi * pi - 4.0 * pi)) - 8.0 * pi * a,
                k * 2.0 * pi * pi,
                -k * l * pi * pi,
            ]
        }
    }
}

/// Roots of [`bound_polynomial`] inside (0, 1), if any.
pub fn bound_polynomial_unit_roots(r0: f64, case: BoundCase) -> Result<Vec<f64>> {
    let roots = positive_real_roots(&bound_polynomial(r0, case))?;
    Ok(roots
        .positive_real_roots
        .into_iter()
        .filter(|&x| x < 1.0)
        .collect())
}
