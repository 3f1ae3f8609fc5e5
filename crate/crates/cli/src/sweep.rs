//! `PARAM:start:stop:points:scale` sweeps.

use densenet::scenario::{NetworkScenario, Noise};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    /// UEs/km².
    UeDensity,
    /// Fraction of the scenario's UE density.
    Load,
    /// BSs/km² of the named tier.
    Density(String),
    SnrDb,
    NoiseW,
    SinrGapDb,
    /// Rate requirement, b/s/Hz.
    R0,
}

impl Param {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "ue_density" => Param::UeDensity,
            "load" => Param::Load,
            "snr_db" => Param::SnrDb,
            "noise_w" => Param::NoiseW,
            "sinr_gap_db" => Param::SinrGapDb,
            "r0" => Param::R0,
            _ => match s.strip_prefix("density.") {
                Some(tier) if !tier.is_empty() => Param::Density(tier.to_string()),
                _ => {
                    return Err(CliError::Usage(format!(
                        "unknown sweep parameter '{s}'; expected ue_density, load, density.<tier>, \
                         snr_db, noise_w, sinr_gap_db or r0"
                    )))
                }
            },
        })
    }

    /// Column header, with units.
    pub fn header(&self) -> String {
        match self {
            Param::UeDensity => "ue_density (UEs/km²)".into(),
            Param::Load => "load (fraction)".into(),
            Param::Density(t) => format!("swept density_{t} (BSs/km²)"),
            Param::SnrDb => "snr (dB)".into(),
            Param::NoiseW => "noise (W)".into(),
            Param::SinrGapDb => "sinr_gap (dB)".into(),
            Param::R0 => "r0 (b/s/Hz)".into(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Param::UeDensity => "ue_density".into(),
            Param::Load => "load".into(),
            Param::Density(t) => format!("density.{t}"),
            Param::SnrDb => "snr_db".into(),
            Param::NoiseW => "noise_w".into(),
            Param::SinrGapDb => "sinr_gap_db".into(),
            Param::R0 => "r0".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Lin,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = |why: &str| CliError::Usage(format!("bad --sweep '{text}': {why}"));
        if parts.len() != 5 {
            return Err(bad("expected PARAM:start:stop:points:lin|log"));
        }
        let param = Param::parse(parts[0])?;
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(&format!("'{s}' is not a finite number")))
        };
        let start = num(parts[1])?;
        let stop = num(parts[2])?;
        let points: usize = parts[3]
            .parse()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| bad("points must be a positive integer"))?;
        let scale = match parts[4] {
            "lin" => Scale::Lin,
            "log" => Scale::Log,
            other => return Err(bad(&format!("scale '{other}' is not lin or log"))),
        };
        if scale == Scale::Log && !(start > 0.0 && stop > 0.0) {
            return Err(bad("log sweeps need positive endpoints"));
        }
        Ok(Self {
            param,
            start,
            stop,
            points,
            scale,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                // Pin the endpoints so they print exactly as given.
                if i == 0 {
                    self.start
                } else if i + 1 == self.points {
                    self.stop
                } else {
                    match self.scale {
                        Scale::Lin => self.start + t * (self.stop - self.start),
                        Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                    }
                }
            })
            .collect()
    }
}

/// Apply one swept value. Returns the modified scenario and requirement.
pub fn apply(
    param: &Param,
    value: f64,
    scenario: &NetworkScenario,
    r0: Option<f64>,
) -> densenet::Result<(NetworkScenario, Option<f64>)> {
    let s = match param {
        Param::UeDensity => scenario.with_ue_density(value)?,
        Param::Load => scenario.with_load(value)?,
        Param::Density(name) => {
            let idx = scenario
                .tiers()
                .iter()
                .position(|t| &t.name == name)
                .ok_or_else(|| densenet::Error::InvalidScenario(format!("no tier named '{name}'")))?;
            scenario.with_tier_density(idx, value)?
        }
        Param::SnrDb => scenario.with_noise(Noise::SnrDb(value))?,
        Param::NoiseW => scenario.with_noise(Noise::Watts(value))?,
        Param::SinrGapDb => scenario.with_sinr_gap_db(value)?,
        Param::R0 => return Ok((scenario.clone(), Some(value))),
    };
    Ok((s, r0))
}
