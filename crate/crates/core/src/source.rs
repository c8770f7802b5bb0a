//! Degenerate down-conversion source with event-ready tap detectors.
//!
//! Each emission is a pair of pulses carrying the same hidden phase `alpha`
//! relative to the master laser and the same frequency. The phase class is
//! `0` or `pi` with equal weight in the binary model, uniform when the pump
//! phase is randomised, or pinned when the amplifier is seeded.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{FieldAmplitude, PhaseAngle};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaMode {
    /// `alpha` is `0` or `pi`, each with probability one half.
    Binary,
    /// `alpha` uniform on `[0, 2 pi)`.
    Uniform,
    /// Every emission has the given phase.
    Fixed(PhaseAngle),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeDistribution {
    /// Rayleigh distributed with scale `amplitude_scale`.
    Rayleigh,
    /// Always exactly `amplitude_scale`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub omega0: f64,
    pub sigma_omega: f64,
    pub amplitude_scale: f64,
    pub amplitude_distribution: AmplitudeDistribution,
    pub alpha_mode: AlphaMode,
    pub tap_reflectance: f64,
    pub pd_threshold: f64,
    pub pd_efficiency: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            omega0: 1.0,
            sigma_omega: 0.0,
            amplitude_scale: 1.0,
            amplitude_distribution: AmplitudeDistribution::Rayleigh,
            alpha_mode: AlphaMode::Binary,
            tap_reflectance: 0.1,
            pd_threshold: 0.0,
            pd_efficiency: 1.0,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::invalid("omega0", "omega0 > 0", self.omega0));
        }
        if !(self.sigma_omega.is_finite() && self.sigma_omega >= 0.0) {
            return Err(Error::invalid("sigma_omega", "sigma_omega >= 0", self.sigma_omega));
        }
        if !(self.amplitude_scale.is_finite() && self.amplitude_scale > 0.0) {
            return Err(Error::invalid(
                "amplitude_scale",
                "amplitude_scale > 0",
                self.amplitude_scale,
            ));
        }
        check_reflectance(self.tap_reflectance)?;
        if !(self.pd_threshold.is_finite() && self.pd_threshold >= 0.0) {
            return Err(Error::invalid("pd_threshold", "pd_threshold >= 0", self.pd_threshold));
        }
        if !(0.0..=1.0).contains(&self.pd_efficiency) {
            return Err(Error::invalid(
                "pd_efficiency",
                "pd_efficiency in [0,1]",
                self.pd_efficiency,
            ));
        }
        Ok(())
    }
}

fn check_reflectance(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("tap_reflectance", "tap_reflectance in (0,1)", r))
    }
}

/// One emission: both arms share `alpha` and `omega` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEvent {
    pub alpha: PhaseAngle,
    pub omega: f64,
    pub amp_a: FieldAmplitude,
    pub amp_b: FieldAmplitude,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapResult {
    pub tapped_intensity: f64,
    pub main_amplitude: FieldAmplitude,
}

/// Draws one pair. Consumes, in order: one uniform for `alpha` (drawn in
/// every mode), standard normals for `omega` until the result is positive,
/// and one uniform for the shared amplitude.
pub fn generate_pair<R: Rng + ?Sized>(cfg: &SourceConfig, rng: &mut R) -> PairEvent {
    let u_alpha: f64 = rng.random();
    let alpha = match cfg.alpha_mode {
        AlphaMode::Binary => {
            if u_alpha < 0.5 {
                PhaseAngle::ZERO
            } else {
                PhaseAngle::PI
            }
        }
        AlphaMode::Uniform => PhaseAngle::new(TAU * u_alpha),
        AlphaMode::Fixed(a) => a,
    };

    let omega = loop {
        let z: f64 = rng.sample(StandardNormal);
        let w = cfg.omega0 + cfg.sigma_omega * z;
        if w > 0.0 {
            break w;
        }
    };

    let u_amp: f64 = rng.random();
    let amp = match cfg.amplitude_distribution {
        // inverse CDF of Rayleigh(scale)
        AmplitudeDistribution::Rayleigh => {
            cfg.amplitude_scale * (-2.0 * (1.0 - u_amp).ln()).sqrt()
        }
        AmplitudeDistribution::Fixed => cfg.amplitude_scale,
    };
    let amp = FieldAmplitude::new(amp).expect("amplitude is finite and non-negative");

    PairEvent {
        alpha,
        omega,
        amp_a: amp,
        amp_b: amp,
    }
}

/// Splits an arm at the unbalanced tap beamsplitter.
pub fn tap_split(amp: FieldAmplitude, reflectance: f64) -> Result<TapResult> {
    check_reflectance(reflectance)?;
    Ok(TapResult {
        tapped_intensity: reflectance * amp.intensity(),
        main_amplitude: FieldAmplitude::new(amp.value() * (1.0 - reflectance).sqrt())?,
    })
}

/// Threshold test followed by a Bernoulli(`pd_efficiency`) draw. The uniform
/// is always consumed so the stream position does not depend on the outcome.
pub fn event_ready<R: Rng + ?Sized>(tapped_intensity: f64, cfg: &SourceConfig, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    tapped_intensity >= cfg.pd_threshold && u < cfg.pd_efficiency
}

/// Probability that a Rayleigh(`scale`) pulse clears the tap threshold.
pub fn rayleigh_acceptance(scale: f64, reflectance: f64, pd_threshold: f64) -> f64 {
    (-pd_threshold / (reflectance * 2.0 * scale * scale)).exp()
}
