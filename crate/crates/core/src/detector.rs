//! Photodiode pair of a balanced homodyne detector.
//!
//! Port intensities become voltages through a linear gain plus independent
//! Gaussian noise on each photodiode. The difference voltage is digitised by
//! its sign, or the two raw voltages are passed through threshold
//! discriminators.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::PortIntensities;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Volts per intensity unit.
    pub gain: f64,
    /// Per-photodiode noise standard deviation in volts.
    pub noise_sigma: f64,
    /// When set, outcomes come from [`discriminate`] instead of [`digitize`].
    pub discriminator_threshold: Option<f64>,
    /// Discriminate on voltages relative to the measured half-sum of the two
    /// photodiodes rather than on raw voltages.
    pub subtract_pedestal: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            gain: 1.0,
            noise_sigma: 0.0,
            discriminator_threshold: None,
            subtract_pedestal: false,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return Err(Error::invalid("gain", "gain > 0", self.gain));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::invalid("noise_sigma", "noise_sigma >= 0", self.noise_sigma));
        }
        if let Some(t) = self.discriminator_threshold {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::invalid(
                    "discriminator_threshold",
                    "discriminator_threshold >= 0",
                    t,
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneReading {
    pub v_reflected: f64,
    pub v_transmitted: f64,
    /// Always `v_reflected - v_transmitted`.
    pub v_diff: f64,
}

impl HomodyneReading {
    pub fn new(v_reflected: f64, v_transmitted: f64) -> Self {
        HomodyneReading {
            v_reflected,
            v_transmitted,
            v_diff: v_reflected - v_transmitted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plus,
    Minus,
    /// No click, or an ambiguous discriminator event.
    #[serde(rename = "none")]
    Null,
}

impl Outcome {
    /// `+1`, `-1` or `0`.
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
            Outcome::Null => 0,
        }
    }

    pub fn is_click(self) -> bool {
        self != Outcome::Null
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
            Outcome::Null => Outcome::Null,
        }
    }
}

/// Draws two standard normals (reflected first) regardless of `noise_sigma`.
pub fn read_homodyne<R: Rng + ?Sized>(
    intensities: PortIntensities,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> HomodyneReading {
    let z_r: f64 = rng.sample(StandardNormal);
    let z_t: f64 = rng.sample(StandardNormal);
    HomodyneReading::new(
        cfg.gain * intensities.reflected + cfg.noise_sigma * z_r,
        cfg.gain * intensities.transmitted + cfg.noise_sigma * z_t,
    )
}

/// Sign of the difference voltage; an exact zero is settled by a fair coin,
/// the only case that touches `rng`.
pub fn digitize<R: Rng + ?Sized>(v_diff: f64, rng: &mut R) -> Outcome {
    if v_diff > 0.0 {
        Outcome::Plus
    } else if v_diff < 0.0 {
        Outcome::Minus
    } else if rng.random_bool(0.5) {
        Outcome::Plus
    } else {
        Outcome::Minus
    }
}

/// Reflected port alone above threshold is `Plus`, transmitted alone is
/// `Minus`. Neither or both firing gives `Null`.
pub fn discriminate(reading: &HomodyneReading, cfg: &DetectorConfig) -> Result<Outcome> {
    let threshold = cfg.discriminator_threshold.ok_or(Error::MissingThreshold)?;
    let (vr, vt) = if cfg.subtract_pedestal {
        let pedestal = 0.5 * (reading.v_reflected + reading.v_transmitted);
        (reading.v_reflected - pedestal, reading.v_transmitted - pedestal)
    } else {
        (reading.v_reflected, reading.v_transmitted)
    };
    Ok(match (vr >= threshold, vt >= threshold) {
        (true, false) => Outcome::Plus,
        (false, true) => Outcome::Minus,
        _ => Outcome::Null,
    })
}

/// Digitises or discriminates depending on the detector configuration.
pub fn classify<R: Rng + ?Sized>(
    reading: &HomodyneReading,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> Outcome {
    match cfg.discriminator_threshold {
        Some(_) => discriminate(reading, cfg).expect("threshold is set"),
        None => digitize(reading.v_diff, rng),
    }
}
