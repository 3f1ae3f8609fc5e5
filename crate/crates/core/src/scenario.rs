//! Network, tier, power-model and traffic-profile descriptions.
//!
//! Units: densities in BSs/km² and UEs/km², distances in km, powers in W.
//! Bias, SINR gap and shadowing statistics are carried in dB because that is
//! how they are specified; `TierConfig::bias` and `NetworkScenario::sinr_gap`
//! hand out the linear ratios used by the math.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Two-state linear base-station power model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Reciprocal of the power-amplifier drain efficiency.
    pub amp_slope: f64,
    pub circuit_power_w: f64,
    pub sleep_power_w: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            amp_slope: 1.0,
            circuit_power_w: 0.0,
            sleep_power_w: 0.0,
        }
    }
}

impl PowerModel {
    pub fn new(amp_slope: f64, circuit_power_w: f64, sleep_power_w: f64) -> Result<Self> {
        let pm = Self {
            amp_slope,
            circuit_power_w,
            sleep_power_w,
        };
        pm.validate()?;
        Ok(pm)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.amp_slope.is_finite()
            && self.amp_slope >= 0.0
            && self.sleep_power_w.is_finite()
            && self.sleep_power_w >= 0.0
            && self.circuit_power_w.is_finite()
            && self.circuit_power_w >= self.sleep_power_w;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!(
                "power model needs amp_slope >= 0 and circuit >= sleep >= 0, got {self:?}"
            )))
        }
    }
}

/// Radio, propagation and power parameters shared by all BSs of one tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierConfig {
    pub name: String,
    /// BSs/km².
    pub density: f64,
    pub tx_power_w: f64,
    #[serde(default)]
    pub bias_db: f64,
    #[serde(default = "default_pathloss")]
    pub pathloss_exponent: f64,
    #[serde(default = "default_m")]
    pub nakagami_m: f64,
    #[serde(default)]
    pub shadow_mean_db: f64,
    #[serde(default)]
    pub shadow_std_db: f64,
    #[serde(default)]
    pub power_model: PowerModel,
}

fn default_pathloss() -> f64 {
    4.0
}
fn default_m() -> f64 {
    1.0
}

impl TierConfig {
    /// A tier with no bias, α = 4, Rayleigh fading and no shadowing.
    pub fn new(name: impl Into<String>, density: f64, tx_power_w: f64) -> Self {
        Self {
            name: name.into(),
            density,
            tx_power_w,
            bias_db: 0.0,
            pathloss_exponent: 4.0,
            nakagami_m: 1.0,
            shadow_mean_db: 0.0,
            shadow_std_db: 0.0,
            power_model: PowerModel::default(),
        }
    }

    pub fn with_bias_db(mut self, bias_db: f64) -> Self {
        self.bias_db = bias_db;
        self
    }
    pub fn with_pathloss(mut self, alpha: f64) -> Self {
        self.pathloss_exponent = alpha;
        self
    }
    pub fn with_nakagami(mut self, m: f64) -> Self {
        self.nakagami_m = m;
        self
    }
    pub fn with_shadowing(mut self, mean_db: f64, std_db: f64) -> Self {
        self.shadow_mean_db = mean_db;
        self.shadow_std_db = std_db;
        self
    }
    pub fn with_power_model(mut self, pm: PowerModel) -> Self {
        self.power_model = pm;
        self
    }
    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    /// Linear cell-selection bias β.
    pub fn bias(&self) -> f64 {
        db_to_linear(self.bias_db)
    }

    pub fn shadow_fractional_moment(&self) -> f64 {
        shadow_fractional_moment(self)
    }

    pub fn displaced_density(&self) -> f64 {
        displaced_density(self)
    }

    pub fn active_cost(&self) -> f64 {
        active_cost(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidScenario(format!(
                "tier '{}': {what}",
                self.name
            )))
        };
        if !(self.density.is_finite() && self.density >= 0.0) {
            return bad("density must be finite and >= 0");
        }
        if !(self.tx_power_w.is_finite() && self.tx_power_w > 0.0) {
            return bad("tx_power_w must be > 0");
        }
        if !self.bias_db.is_finite() {
            return bad("bias_db must be finite");
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent > 2.0) {
            return bad("pathloss_exponent must exceed 2");
        }
        if !(self.nakagami_m.is_finite() && self.nakagami_m >= 0.5) {
            return bad("nakagami_m must be >= 0.5");
        }
        if !(self.shadow_mean_db.is_finite()
            && self.shadow_std_db.is_finite()
            && self.shadow_std_db >= 0.0)
        {
            return bad("shadowing statistics must be finite with std >= 0");
        }
        self.power_model.validate()
    }
}

/// E{χ^(2/α)} for log-normal shadowing χ with the tier's dB mean and
/// standard deviation.
pub fn shadow_fractional_moment(tier: &TierConfig) -> f64 {
    let s = 2.0 / tier.pathloss_exponent;
    let c = LN_10 / 10.0;
    (s * tier.shadow_mean_db * c + 0.5 * (s * tier.shadow_std_db * c).powi(2)).exp()
}

/// Density of the equivalent unshadowed point process.
pub fn displaced_density(tier: &TierConfig) -> f64 {
    tier.density * shadow_fractional_moment(tier)
}

/// Power drawn by one transmitting BS.
pub fn active_cost(tier: &TierConfig) -> f64 {
    tier.power_model.amp_slope * tier.tx_power_w + tier.power_model.circuit_power_w
}

/// Receiver noise, either absolute or derived from an SNR figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    Watts(f64),
    /// SNR in dB of the first tier's transmit power received at 1 km without
    /// fading: η = P_tx(first tier) / 10^(snr/10).
    SnrDb(f64),
}

/// One hourly slot of a daily traffic profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub hour_start: u32,
    pub hour_end: u32,
    pub relative_load_percent: f64,
}

impl ProfileEntry {
    pub fn hours(&self) -> u32 {
        self.hour_end - self.hour_start
    }
    pub fn relative_load(&self) -> f64 {
        self.relative_load_percent / 100.0
    }
    pub fn label(&self) -> String {
        format!("{:02}-{:02}", self.hour_start, self.hour_end)
    }
}

/// Relative load over the day, as a fraction of the reference UE density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProfileEntry>", into = "Vec<ProfileEntry>")]
pub struct TrafficProfile {
    entries: Vec<ProfileEntry>,
}

impl TryFrom<Vec<ProfileEntry>> for TrafficProfile {
    type Error = Error;
    fn try_from(entries: Vec<ProfileEntry>) -> Result<Self> {
        TrafficProfile::new(entries)
    }
}

impl From<TrafficProfile> for Vec<ProfileEntry> {
    fn from(p: TrafficProfile) -> Self {
        p.entries
    }
}

impl TrafficProfile {
    pub fn new(entries: Vec<ProfileEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidScenario("traffic profile is empty".into()));
        }
        let mut prev_end = 0;
        for (i, e) in entries.iter().enumerate() {
            if e.hour_end <= e.hour_start || e.hour_end > 24 {
                return Err(Error::InvalidScenario(format!(
                    "profile entry {i}: hours must satisfy start < end <= 24"
                )));
            }
            if i > 0 && e.hour_start < prev_end {
                return Err(Error::InvalidScenario(format!(
                    "profile entry {i} overlaps or is out of order"
                )));
            }
            if !(e.relative_load_percent.is_finite() && e.relative_load_percent > 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "profile entry {i}: relative load must be > 0"
                )));
            }
            prev_end = e.hour_end;
        }
        Ok(Self { entries })
    }

    /// A profile with a single load level for every hour of the day.
    pub fn flat(relative_load_percent: f64) -> Result<Self> {
        Self::new(vec![ProfileEntry {
            hour_start: 0,
            hour_end: 24,
            relative_load_percent,
        }])
    }

    /// Dense-urban daily profile covering every load level from 20% to 140%
    /// in steps of 10%, with the trough at 4-6 am and the peak at 4-10 pm.
    /// The time-weighted mean is exactly 100%.
    pub fn dense_urban() -> Self {
        const SLOTS: [(u32, u32, f64); 15] = [
            (0, 1, 110.0),
            (1, 2, 90.0),
            (2, 3, 70.0),
            (3, 4, 50.0),
            (4, 6, 20.0),
            (6, 7, 30.0),
            (7, 8, 40.0),
            (8, 9, 60.0),
            (9, 10, 80.0),
            (10, 11, 100.0),
            (11, 12, 120.0),
            (12, 16, 130.0),
            (16, 22, 140.0),
            (22, 23, 130.0),
            (23, 24, 120.0),
        ];
        let entries = SLOTS
            .iter()
            .map(|&(hour_start, hour_end, relative_load_percent)| ProfileEntry {
                hour_start,
                hour_end,
                relative_load_percent,
            })
            .collect();
        Self { entries }
    }

    /// Parse `hour_start,hour_end,relative_load_percent` rows with a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for row in rdr.deserialize::<ProfileEntry>() {
            entries.push(row.map_err(|e| Error::Parse(format!("traffic profile CSV: {e}")))?);
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn peak_load(&self) -> f64 {
        self.entries
            .iter()
            .map(ProfileEntry::relative_load)
            .fold(f64::MIN, f64::max)
    }

    /// Time-weighted mean relative load.
    pub fn mean_load(&self) -> f64 {
        let hours: u32 = self.entries.iter().map(ProfileEntry::hours).sum();
        let weighted: f64 = self
            .entries
            .iter()
            .map(|e| e.relative_load() * f64::from(e.hours()))
            .sum();
        weighted / f64::from(hours)
    }
}

/// Minimum average rate a deployment must deliver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRequirement {
    r0: f64,
}

impl RateRequirement {
    pub fn new(r0: f64) -> Result<Self> {
        if r0.is_finite() && r0 > 0.0 {
            Ok(Self { r0 })
        } else {
            Err(Error::InvalidScenario(format!("rate requirement must be > 0, got {r0}")))
        }
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
}

/// Complete network description. Immutable; the `with_*` methods return
/// modified copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct NetworkScenario {
    tiers: Vec<TierConfig>,
    ue_density: f64,
    noise: Noise,
    sinr_gap_db: f64,
    traffic_profile: Option<TrafficProfile>,
}

impl NetworkScenario {
    pub fn new(tiers: Vec<TierConfig>, ue_density: f64, noise: Noise) -> Result<Self> {
        let s = Self {
            tiers,
            ue_density,
            noise,
            sinr_gap_db: 0.0,
            traffic_profile: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Single-tier interference-limited Rayleigh network with α = 4.
    pub fn homogeneous(bs_density: f64, ue_density: f64) -> Result<Self> {
        Self::new(
            vec![TierConfig::new("tier", bs_density, 1.0)],
            ue_density,
            Noise::Watts(0.0),
        )
    }

    fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(Error::InvalidScenario("at least one tier is required".into()));
        }
        for t in &self.tiers {
            t.validate()?;
        }
        if !(self.ue_density.is_finite() && self.ue_density >= 0.0) {
            return Err(Error::InvalidScenario("ue_density must be finite and >= 0".into()));
        }
        match self.noise {
            Noise::Watts(w) if !(w.is_finite() && w >= 0.0) => {
                return Err(Error::InvalidScenario("noise_w must be finite and >= 0".into()))
            }
            Noise::SnrDb(s) if !s.is_finite() => {
                return Err(Error::InvalidScenario("noise_from_snr_db must be finite".into()))
            }
            _ => {}
        }
        if !(self.sinr_gap_db.is_finite() && self.sinr_gap_db >= 0.0) {
            return Err(Error::InvalidScenario("sinr_gap_db must be >= 0".into()));
        }
        Ok(())
    }

    pub fn tiers(&self) -> &[TierConfig] {
        &self.tiers
    }
    pub fn tier(&self, index: usize) -> Option<&TierConfig> {
        self.tiers.get(index)
    }
    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }
    pub fn ue_density(&self) -> f64 {
        self.ue_density
    }
    pub fn noise(&self) -> Noise {
        self.noise
    }
    /// Noise power η in W.
    pub fn noise_w(&self) -> f64 {
        match self.noise {
            Noise::Watts(w) => w,
            Noise::SnrDb(snr) => self.tiers[0].tx_power_w / db_to_linear(snr),
        }
    }
    pub fn sinr_gap_db(&self) -> f64 {
        self.sinr_gap_db
    }
    /// Linear SINR gap Γ ≥ 1.
    pub fn sinr_gap(&self) -> f64 {
        db_to_linear(self.sinr_gap_db)
    }
    pub fn traffic_profile(&self) -> Option<&TrafficProfile> {
        self.traffic_profile.as_ref()
    }
    pub fn densities(&self) -> Vec<f64> {
        self.tiers.iter().map(|t| t.density).collect()
    }

    pub fn with_ue_density(&self, ue_density: f64) -> Result<Self> {
        let mut s = self.clone();
        s.ue_density = ue_density;
        s.validate()?;
        Ok(s)
    }

    /// Scale the UE density by a relative load (1.0 = reference).
    pub fn with_load(&self, relative_load: f64) -> Result<Self> {
        self.with_ue_density(self.ue_density * relative_load)
    }

    pub fn with_densities(&self, densities: &[f64]) -> Result<Self> {
        if densities.len() != self.tiers.len() {
            return Err(Error::InvalidScenario(format!(
                "expected {} densities, got {}",
                self.tiers.len(),
                densities.len()
            )));
        }
        let mut s = self.clone();
        for (t, &d) in s.tiers.iter_mut().zip(densities) {
            t.density = d;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn with_tier_density(&self, index: usize, density: f64) -> Result<Self> {
        let mut d = self.densities();
        if index >= d.len() {
            return Err(Error::InvalidScenario(format!("no tier {index}")));
        }
        d[index] = density;
        self.with_densities(&d)
    }

    pub fn with_tiers(&self, tiers: Vec<TierConfig>) -> Result<Self> {
        let mut s = self.clone();
        s.tiers = tiers;
        s.validate()?;
        Ok(s)
    }

    pub fn with_noise(&self, noise: Noise) -> Result<Self> {
        let mut s = self.clone();
        s.noise = noise;
        s.validate()?;
        Ok(s)
    }

    pub fn with_sinr_gap_db(&self, gap_db: f64) -> Result<Self> {
        let mut s = self.clone();
        s.sinr_gap_db = gap_db;
        s.validate()?;
        Ok(s)
    }

    pub fn with_traffic_profile(&self, profile: Option<TrafficProfile>) -> Self {
        let mut s = self.clone();
        s.traffic_profile = profile;
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// On-disk scenario layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub tiers: Vec<TierConfig>,
    pub ue_density: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_from_snr_db: Option<f64>,
    #[serde(default)]
    pub sinr_gap_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic_profile: Option<TrafficProfile>,
}

impl TryFrom<ScenarioFile> for NetworkScenario {
    type Error = Error;
    fn try_from(f: ScenarioFile) -> Result<Self> {
        let noise = match (f.noise_w, f.noise_from_snr_db) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidScenario(
                    "give either noise_w or noise_from_snr_db, not both".into(),
                ))
            }
            (Some(w), None) => Noise::Watts(w),
            (None, Some(s)) => Noise::SnrDb(s),
            (None, None) => Noise::Watts(0.0),
        };
        let s = Self {
            tiers: f.tiers,
            ue_density: f.ue_density,
            noise,
            sinr_gap_db: f.sinr_gap_db,
            traffic_profile: f.traffic_profile,
        };
        s.validate()?;
        Ok(s)
    }
}

impl From<NetworkScenario> for ScenarioFile {
    fn from(s: NetworkScenario) -> Self {
        let (noise_w, noise_from_snr_db) = match s.noise {
            Noise::Watts(w) => (Some(w), None),
            Noise::SnrDb(d) => (None, Some(d)),
        };
        Self {
            tiers: s.tiers,
            ue_density: s.ue_density,
            noise_w,
            noise_from_snr_db,
            sinr_gap_db: s.sinr_gap_db,
            traffic_profile: s.traffic_profile,
        }
    }
}

/// Reference parameter sets used by the examples, tests and CLI fixtures.
pub mod presets {
    use super::*;

    /// UE density of the dense-urban scenario at 100% load.
    pub const DENSE_URBAN_UE_DENSITY: f64 = 84.87;

    pub fn macro_power() -> PowerModel {
        PowerModel {
            amp_slope: 5.32,
            circuit_power_w: 118.7,
            sleep_power_w: 93.0,
        }
    }
    pub fn micro_power() -> PowerModel {
        PowerModel {
            amp_slope: 3.1,
            circuit_power_w: 53.0,
            sleep_power_w: 39.0,
        }
    }
    pub fn pico_power() -> PowerModel {
        PowerModel {
            amp_slope: 4.0,
            circuit_power_w: 6.8,
            sleep_power_w: 4.3,
        }
    }

    fn dense_urban_tier(name: &str, density: f64, p: f64, pm: PowerModel) -> TierConfig {
        // Shadowing variance of 6 dB², i.e. a standard deviation of √6 dB.
        TierConfig::new(name, density, p)
            .with_nakagami(2.0)
            .with_shadowing(0.0, 6f64.sqrt())
            .with_power_model(pm)
    }

    pub fn macro_tier(density: f64) -> TierConfig {
        dense_urban_tier("macro", density, 20.0, macro_power())
    }
    pub fn micro_tier(density: f64) -> TierConfig {
        dense_urban_tier("micro", density, 6.3, micro_power())
    }
    pub fn pico_tier(density: f64) -> TierConfig {
        dense_urban_tier("pico", density, 0.13, pico_power())
    }

    /// Dense-urban scenario at 100% load with an SNR of 60 dB.
    pub fn dense_urban(tiers: Vec<TierConfig>) -> NetworkScenario {
        NetworkScenario::new(tiers, DENSE_URBAN_UE_DENSITY, Noise::SnrDb(60.0))
            .expect("preset is valid")
            .with_traffic_profile(Some(TrafficProfile::dense_urban()))
    }
}
