//! Load-aware Monte-Carlo simulation of the network around a reference UE at
//! the origin.
//!
//! One trial draws every tier and the UE process on a disc, associates every
//! UE by maximum shadowed and biased received power, switches on exactly
//! the BSs that serve somebody, and records the reference UE's SINR. Trial
//! `i` uses ChaCha stream `i` of the master seed, so its outcome does not
//! depend on which thread ran it or in which order.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{serving_distance_pdf, tier_connect_prob};
use crate::numerics::{brent_root, Quadrature};
use crate::scenario::NetworkScenario;

/// Expected BS count of the sparsest tier the default disc must hold. The
/// interference missing beyond the disc biases the rate upwards by roughly
/// 1.6/N b/s/Hz for N BSs in an interference-limited α = 4 network, so 2000
/// keeps that bias under 1e-3.
pub const MIN_EXPECTED_BS: f64 = 2000.0;
pub const MIN_REGION_RADIUS_KM: f64 = 5.0;
/// Per-link shadowing is truncated this many standard deviations above its
/// mean so that UE association can prune far BSs. The cut mass is ~1e-9.
pub const SHADOW_TRUNCATION_SIGMAS: f64 = 6.0;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// Resampling budget for trials that draw no BS at all.
const MAX_EMPTY_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub scenario: NetworkScenario,
    pub region_radius_km: f64,
    pub trials: usize,
    pub seed: u64,
    /// Every deployed BS transmits regardless of load.
    pub full_load_override: bool,
    pub parallel: bool,
}

/// Disc radius holding at least [`MIN_EXPECTED_BS`] BSs of the sparsest
/// deployed tier on average, never below [`MIN_REGION_RADIUS_KM`].
pub fn default_region_radius(scenario: &NetworkScenario) -> f64 {
    let sparsest = scenario
        .tiers()
        .iter()
        .map(|t| t.density)
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !sparsest.is_finite() {
        return MIN_REGION_RADIUS_KM;
    }
    (MIN_EXPECTED_BS / (PI * sparsest)).sqrt().max(MIN_REGION_RADIUS_KM)
}

impl SimulationConfig {
    pub fn new(scenario: NetworkScenario, trials: usize, seed: u64) -> Result<Self> {
        let config = Self {
            region_radius_km: default_region_radius(&scenario),
            scenario,
            trials,
            seed,
            full_load_override: false,
            parallel: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_full_load(mut self, on: bool) -> Self {
        self.full_load_override = on;
        self
    }

    pub fn with_region_radius(mut self, radius_km: f64) -> Result<Self> {
        self.region_radius_km = radius_km;
        self.validate()?;
        Ok(self)
    }

    pub fn with_parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("need at least one trial".into()));
        }
        if !(self.region_radius_km > 0.0) || !self.region_radius_km.is_finite() {
            return Err(Error::Precondition(format!(
                "region radius must be positive, got {}",
                self.region_radius_km
            )));
        }
        if self.scenario.tiers().iter().all(|t| t.density == 0.0) {
            return Err(Error::Precondition("every tier has zero density".into()));
        }
        Ok(())
    }

    /// Random stream of trial `trial`.
    pub fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// BS and UE positions of one drawn network, in km.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Layout {
    /// `bs[t]` holds the tier-t BS positions.
    pub bs: Vec<Vec<[f64; 2]>>,
    /// UEs other than the reference UE at the origin.
    pub ues: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    /// Linear SINR before the SINR gap.
    pub sinr: f64,
    pub serving_tier: usize,
    pub serving_distance_km: f64,
    pub signal_power_w: f64,
    pub interference_w: f64,
    /// Fading power gain and shadowing factor of the serving link.
    pub serving_fading: f64,
    pub serving_shadowing: f64,
    /// Active BSs per tier over the whole disc.
    pub active_counts: Vec<usize>,
    /// BSs and active BSs per tier inside half the region radius, where
    /// edge effects on the load are negligible.
    pub inner_counts: Vec<usize>,
    pub inner_active_counts: Vec<usize>,
    /// log2(1 + sinr / gap).
    pub rate_sample: f64,
    /// Draws discarded because no BS landed in the disc.
    pub resamples: usize,
}

struct TierDraw {
    alpha: f64,
    // β_t P_t, the association weight without shadowing.
    weight: f64,
    power: f64,
    shadow: Option<Normal<f64>>,
    shadow_cap: f64,
    fading: Gamma<f64>,
}

fn tier_draws(scenario: &NetworkScenario) -> Result<Vec<TierDraw>> {
    scenario
        .tiers()
        .iter()
        .map(|t| {
            let shadow = if t.shadow_std_db > 0.0 {
                Some(
                    Normal::new(t.shadow_mean_db, t.shadow_std_db)
                        .map_err(|e| Error::Precondition(e.to_string()))?,
                )
            } else {
                None
            };
            let cap_db = t.shadow_mean_db + SHADOW_TRUNCATION_SIGMAS * t.shadow_std_db;
            Ok(TierDraw {
                alpha: t.pathloss_exponent,
                weight: t.bias() * t.tx_power_w,
                power: t.tx_power_w,
                shadow,
                shadow_cap: cap_db,
                fading: Gamma::new(t.nakagami_m, 1.0 / t.nakagami_m)
                    .map_err(|e| Error::Precondition(e.to_string()))?,
            })
        })
        .collect()
}

impl TierDraw {
    fn shadowing<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.shadow {
            None => 10f64.powf(self.shadow_cap / 10.0),
            Some(n) => 10f64.powf(n.sample(rng).min(self.shadow_cap) / 10.0),
        }
    }

    fn max_shadowing(&self) -> f64 {
        10f64.powf(self.shadow_cap / 10.0)
    }
}

fn uniform_in_disc<R: Rng>(rng: &mut R, radius: f64) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let th = 2.0 * PI * rng.random::<f64>();
    [r * th.cos(), r * th.sin()]
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> Result<usize> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(d.sample(rng) as usize)
}

/// Draw the BS tiers and the UE process on the disc.
pub fn sample_layout<R: Rng>(
    scenario: &NetworkScenario,
    radius: f64,
    with_ues: bool,
    rng: &mut R,
) -> Result<Layout> {
    let area = PI * radius * radius;
    let mut bs = Vec::with_capacity(scenario.num_tiers());
    for t in scenario.tiers() {
        let n = poisson(rng, t.density * area)?;
        bs.push((0..n).map(|_| uniform_in_disc(rng, radius)).collect());
    }
    let ues = if with_ues {
        let n = poisson(rng, scenario.ue_density() * area)?;
        (0..n).map(|_| uniform_in_disc(rng, radius)).collect()
    } else {
        Vec::new()
    };
    Ok(Layout { bs, ues })
}

/// Uniform bucket grid over the disc's bounding square.
struct Grid {
    origin: f64,
    cell: f64,
    side: usize,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn new(points: &[[f64; 2]], radius: f64, density: f64) -> Self {
        let target = if density > 0.0 { 1.0 / density.sqrt() } else { 2.0 * radius };
        let side = ((2.0 * radius / target).ceil() as usize).clamp(1, 2048);
        let cell = 2.0 * radius / side as f64;
        let mut cells = vec![Vec::new(); side * side];
        let g = Grid {
            origin: -radius,
            cell,
            side,
            cells: Vec::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = g.cell_of(p);
            cells[cy * side + cx].push(i as u32);
        }
        Grid { cells, ..g }
    }

    fn cell_of(&self, p: &[f64; 2]) -> (usize, usize) {
        let f = |v: f64| (((v - self.origin) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        (f(p[0]), f(p[1]))
    }
}

// Best (metric, index) of one tier for a UE at `p`, skipping every BS whose
// metric cannot beat `floor` even with maximal shadowing.
fn best_in_tier<R: Rng>(
    grid: &Grid,
    points: &[[f64; 2]],
    draw: &TierDraw,
    p: &[f64; 2],
    floor: f64,
    rng: &mut R,
) -> Option<(f64, usize)> {
    if points.is_empty() {
        return None;
    }
    let (cx, cy) = grid.cell_of(p);
    let ceiling = draw.weight * draw.max_shadowing();
    let mut best: Option<(f64, usize)> = None;
    let side = grid.side as isize;
    for ring in 0..grid.side as isize {
        // Every cell of this ring is at least (ring - 1) cells away.
        let d_min = (ring - 1).max(0) as f64 * grid.cell;
        let bar = best.map_or(floor, |b| b.0.max(floor));
        if d_min > 0.0 && ceiling * d_min.powf(-draw.alpha) < bar {
            break;
        }
        let (x0, x1) = (cx as isize - ring, cx as isize + ring);
        let (y0, y1) = (cy as isize - ring, cy as isize + ring);
        if x0 < 0 && y0 < 0 && x1 >= side && y1 >= side {
            // The ring lies entirely outside the grid, and so will every
            // later one.
            break;
        }
        for y in y0..=y1 {
            if y < 0 || y >= side {
                continue;
            }
            let on_edge_row = y == y0 || y == y1;
            let step = if on_edge_row { 1 } else { (x1 - x0).max(1) };
            let mut x = x0;
            while x <= x1 {
                if x >= 0 && x < side {
                    for &i in &grid.cells[(y * side + x) as usize] {
                        let q = points[i as usize];
                        let d = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
                        let gain = draw.weight * d.powf(-draw.alpha);
                        let bar = best.map_or(floor, |b| b.0.max(floor));
                        if gain * draw.max_shadowing() < bar {
                            continue;
                        }
                        let metric = gain * draw.shadowing(rng);
                        if best.is_none_or(|b| metric > b.0) {
                            best = Some((metric, i as usize));
                        }
                    }
                }
                x += step;
            }
        }
    }
    best
}

/// Evaluate one drawn network: associate, decide activity, and compute the
/// reference UE's SINR.
pub fn evaluate_layout<R: Rng>(
    scenario: &NetworkScenario,
    layout: &Layout,
    radius: f64,
    full_load: bool,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let draws = tier_draws(scenario)?;
    let n_tiers = draws.len();
    if layout.bs.len() != n_tiers {
        return Err(Error::Precondition("layout tier count differs from the scenario".into()));
    }
    if layout.bs.iter().all(|b| b.is_empty()) {
        return Err(Error::Precondition("layout has no BS".into()));
    }

    // Reference UE: shadowing drawn on every link, association on the
    // shadowed and biased received power.
    let mut ref_shadow: Vec<Vec<f64>> = Vec::with_capacity(n_tiers);
    let mut serving = (0usize, 0usize);
    let mut best = f64::NEG_INFINITY;
    for (t, (pts, d)) in layout.bs.iter().zip(&draws).enumerate() {
        let mut sh = Vec::with_capacity(pts.len());
        for (i, q) in pts.iter().enumerate() {
            let chi = d.shadowing(rng);
            sh.push(chi);
            let r = (q[0] * q[0] + q[1] * q[1]).sqrt();
            let m = d.weight * chi * r.powf(-d.alpha);
            if m > best {
                best = m;
                serving = (t, i);
            }
        }
        ref_shadow.push(sh);
    }

    let mut active: Vec<Vec<bool>> = layout
        .bs
        .iter()
        .map(|b| vec![full_load; b.len()])
        .collect();
    active[serving.0][serving.1] = true;
    if !full_load {
        let grids: Vec<Grid> = layout
            .bs
            .iter()
            .zip(scenario.tiers())
            .map(|(pts, t)| Grid::new(pts, radius, t.density))
            .collect();
        for ue in &layout.ues {
            let mut winner: Option<(f64, usize, usize)> = None;
            for t in 0..n_tiers {
                let floor = winner.map_or(0.0, |w| w.0);
                if let Some((m, i)) = best_in_tier(&grids[t], &layout.bs[t], &draws[t], ue, floor, rng) {
                    if winner.is_none_or(|w| m > w.0) {
                        winner = Some((m, t, i));
                    }
                }
            }
            if let Some((_, t, i)) = winner {
                active[t][i] = true;
            }
        }
    }

    let st = &draws[serving.0];
    let q = layout.bs[serving.0][serving.1];
    let r_serv = (q[0] * q[0] + q[1] * q[1]).sqrt();
    let serving_fading = st.fading.sample(rng);
    let serving_shadowing = ref_shadow[serving.0][serving.1];
    let signal = st.power * serving_fading * serving_shadowing * r_serv.powf(-st.alpha);
    let mut interference = 0.0;
    for (t, pts) in layout.bs.iter().enumerate() {
        let d = &draws[t];
        for (i, q) in pts.iter().enumerate() {
            if !active[t][i] || (t, i) == serving {
                continue;
            }
            let r = (q[0] * q[0] + q[1] * q[1]).sqrt();
            interference += d.power * d.fading.sample(rng) * ref_shadow[t][i] * r.powf(-d.alpha);
        }
    }
    let denom = interference + scenario.noise_w();
    let sinr = if denom > 0.0 { signal / denom } else { f64::INFINITY };

    let half = 0.5 * radius;
    let mut inner_counts = vec![0; n_tiers];
    let mut inner_active_counts = vec![0; n_tiers];
    for (t, pts) in layout.bs.iter().enumerate() {
        for (i, q) in pts.iter().enumerate() {
            if q[0] * q[0] + q[1] * q[1] <= half * half {
                inner_counts[t] += 1;
                if active[t][i] {
                    inner_active_counts[t] += 1;
                }
            }
        }
    }
    Ok(TrialOutcome {
        trial: 0,
        sinr,
        serving_tier: serving.0,
        serving_distance_km: r_serv,
        signal_power_w: signal,
        interference_w: interference,
        serving_fading,
        serving_shadowing,
        active_counts: active.iter().map(|a| a.iter().filter(|&&x| x).count()).collect(),
        inner_counts,
        inner_active_counts,
        rate_sample: (sinr / scenario.sinr_gap()).ln_1p() / std::f64::consts::LN_2,
        resamples: 0,
    })
}

/// One independent trial on its own random stream.
pub fn run_trial(config: &SimulationConfig, trial: usize) -> Result<TrialOutcome> {
    let mut rng = config.trial_rng(trial);
    let mut resamples = 0;
    loop {
        let layout = sample_layout(
            &config.scenario,
            config.region_radius_km,
            !config.full_load_override,
            &mut rng,
        )?;
        if layout.bs.iter().all(|b| b.is_empty()) {
            resamples += 1;
            if resamples > MAX_EMPTY_RESAMPLES {
                return Err(Error::Precondition(
                    "region too small: no BS drawn after repeated resampling".into(),
                ));
            }
            continue;
        }
        let mut out = evaluate_layout(
            &config.scenario,
            &layout,
            config.region_radius_km,
            config.full_load_override,
            &mut rng,
        )?;
        out.trial = trial;
        out.resamples = resamples;
        return Ok(out);
    }
}

/// Pairwise sum, so the rounding does not depend on how the terms were
/// produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// b/s/Hz.
    pub mean: f64,
    /// Normal-approximation 95% half-width, b/s/Hz.
    pub half_width: f64,
    pub std_dev: f64,
    pub trials: usize,
}

impl RateEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = pairwise_sum(samples) / n as f64;
        let dev: Vec<f64> = samples.iter().map(|x| (x - mean).powi(2)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        let sd = var.sqrt();
        Self {
            mean,
            half_width: Z_95 * sd / (n as f64).sqrt(),
            std_dev: sd,
            trials: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub rate: RateEstimate,
    /// Reference-UE serving-tier counts.
    pub serving_counts: Vec<usize>,
    /// Active fraction of the BSs inside half the region radius.
    pub activity: Vec<f64>,
    pub resampled_trials: usize,
    pub outcomes: Vec<TrialOutcome>,
}

impl SimulationReport {
    pub fn serving_frequencies(&self) -> Vec<f64> {
        let n = self.outcomes.len() as f64;
        self.serving_counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Run every trial and aggregate in trial order.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let outcomes: Vec<TrialOutcome> = if config.parallel {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect::<Result<_>>()?
    } else {
        (0..config.trials)
            .map(|i| run_trial(config, i))
            .collect::<Result<_>>()?
    };
    let n_tiers = config.scenario.num_tiers();
    let samples: Vec<f64> = outcomes.iter().map(|o| o.rate_sample).collect();
    let mut serving_counts = vec![0; n_tiers];
    let mut inner = vec![0usize; n_tiers];
    let mut inner_active = vec![0usize; n_tiers];
    for o in &outcomes {
        serving_counts[o.serving_tier] += 1;
        for t in 0..n_tiers {
            inner[t] += o.inner_counts[t];
            inner_active[t] += o.inner_active_counts[t];
        }
    }
    let activity = inner
        .iter()
        .zip(&inner_active)
        .map(|(&n, &a)| if n == 0 { 0.0 } else { a as f64 / n as f64 })
        .collect();
    Ok(SimulationReport {
        rate: RateEstimate::from_samples(&samples),
        serving_counts,
        activity,
        resampled_trials: outcomes.iter().filter(|o| o.resamples > 0).count(),
        outcomes,
    })
}

/// Mean rate and 95% half-width over `config.trials` trials.
pub fn estimate_rate(config: &SimulationConfig) -> Result<RateEstimate> {
    if config.trials < 100 {
        return Err(Error::Precondition(format!(
            "rate estimation needs at least 100 trials, got {}",
            config.trials
        )));
    }
    Ok(simulate(config)?.rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingCheck {
    pub base: RateEstimate,
    pub doubled: RateEstimate,
    /// |doubled − base| in b/s/Hz.
    pub difference: f64,
    /// 95% half-width of the difference of two independent means.
    pub tolerance: f64,
    pub passed: bool,
}

/// Edge-effect control: rerun with twice the region radius and compare.
pub fn doubling_test(config: &SimulationConfig) -> Result<DoublingCheck> {
    let base = estimate_rate(config)?;
    let mut wide = config.clone();
    wide.region_radius_km *= 2.0;
    // A different master seed keeps the two estimates independent.
    wide.seed = config.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let doubled = estimate_rate(&wide)?;
    let difference = (doubled.mean - base.mean).abs();
    let tolerance = base.half_width.hypot(doubled.half_width);
    Ok(DoublingCheck {
        base,
        doubled,
        difference,
        tolerance,
        passed: difference < tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub passed: bool,
    pub observed: Vec<usize>,
    pub expected: f64,
}

/// Upper 5% point of the chi-square distribution with 19 degrees of
/// freedom, the one used with 20 bins.
pub const CHI_SQUARE_19_DOF_5PCT: f64 = 30.143_527_205_646_16;

/// Probability that the serving distance is at most `r`, over all tiers.
pub fn serving_distance_cdf(scenario: &NetworkScenario, r: f64) -> Result<f64> {
    let mut total = 0.0;
    for t in 0..scenario.num_tiers() {
        let a = tier_connect_prob(scenario, t)?;
        if a == 0.0 || r <= 0.0 {
            continue;
        }
        let f = |x: f64| serving_distance_pdf(scenario, t, x).unwrap_or(f64::NAN);
        total += a * Quadrature::new().abs_tol(1e-12).finite(f, 0.0, r)?.value;
    }
    Ok(total.min(1.0))
}

/// Serving distance with the serving link's shadowing folded in,
/// r·S^(−1/α). Shadowed BSs form a displaced Poisson process in these
/// coordinates, which is what the analytic distance law describes.
pub fn equivalent_serving_distance(scenario: &NetworkScenario, outcome: &TrialOutcome) -> f64 {
    let alpha = scenario.tiers()[outcome.serving_tier].pathloss_exponent;
    outcome.serving_distance_km * outcome.serving_shadowing.powf(-1.0 / alpha)
}

/// Chi-square goodness of fit of simulated equivalent serving distances
/// (see [`equivalent_serving_distance`]) against the analytic distribution
/// with 20 equiprobable bins.
pub fn serving_distance_chi_square(
    scenario: &NetworkScenario,
    distances: &[f64],
) -> Result<ChiSquareResult> {
    const BINS: usize = 20;
    if distances.is_empty() {
        return Err(Error::Precondition("no distances to test".into()));
    }
    let mut edges = Vec::with_capacity(BINS - 1);
    let mut hi = 1.0;
    while serving_distance_cdf(scenario, hi)? < 1.0 - 0.5 / BINS as f64 {
        hi *= 2.0;
    }
    for k in 1..BINS {
        let q = k as f64 / BINS as f64;
        let g = |r: f64| serving_distance_cdf(scenario, r).map_or(f64::NAN, |c| c - q);
        edges.push(brent_root(g, 0.0, hi, 1e-12)?);
    }
    let mut observed = vec![0usize; BINS];
    for &d in distances {
        let bin = edges.partition_point(|&e| e < d);
        observed[bin] += 1;
    }
    let expected = distances.len() as f64 / BINS as f64;
    let statistic = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum::<f64>();
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: BINS - 1,
        critical_value: CHI_SQUARE_19_DOF_5PCT,
        passed: statistic <= CHI_SQUARE_19_DOF_5PCT,
        observed,
        expected,
    })
}

/// Write one CSV row per trial: trial, tier, distance_km, sinr_db,
/// rate_bps_hz and one active-count column per tier.
pub fn write_trials_csv<W: Write>(
    scenario: &NetworkScenario,
    outcomes: &[TrialOutcome],
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Precondition(format!("csv output failed: {e}"));
    let mut header = vec![
        "trial".to_string(),
        "tier".into(),
        "distance_km".into(),
        "sinr_db".into(),
        "rate_bps_hz".into(),
    ];
    header.extend(scenario.tiers().iter().map(|t| format!("active_{}", t.name)));
    w.write_record(&header).map_err(io)?;
    for o in outcomes {
        let mut row = vec![
            o.trial.to_string(),
            scenario.tiers()[o.serving_tier].name.clone(),
            o.serving_distance_km.to_string(),
            (10.0 * o.sinr.log10()).to_string(),
            o.rate_sample.to_string(),
        ];
        row.extend(o.active_counts.iter().map(|c| c.to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Precondition(format!("csv output failed: {e}")))?;
    Ok(())
}
