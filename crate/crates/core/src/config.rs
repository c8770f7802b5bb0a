//! Run configuration: a flat, sectioned TOML document.
//!
//! ```toml
//! seed = 42
//! n_trials = 100000
//!
//! [source]
//! alpha_mode = "binary"          # "binary" | "uniform" | "fixed"
//! # fixed_alpha = 0.0            # required when alpha_mode = "fixed"
//!
//! [detector_a]
//! noise_sigma = 0.05
//!
//! [settings]
//! selection = "random"           # "random" | "fixed_pair" | "scan"
//!
//! [settings.a]
//! theta = "pi/2"                 # radians, or an expression like "-3pi/4"
//! [settings.a_prime]
//! theta = "pi/4"
//! [settings.b]
//! theta = "pi/2"
//! [settings.b_prime]
//! theta = "-pi/2"
//! ```
//!
//! Every key other than `seed`, `n_trials` and the four `theta` values has a
//! default (see [`SourceConfig::default`], [`DetectorConfig::default`]).
//! Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::detector::DetectorConfig;
use crate::error::{Error, Result};
use crate::optics::PhaseAngle;
use crate::runner::{Apparatus, ChannelSetting, ExperimentConfig, Selection, SettingsSchedule};
use crate::source::{AlphaMode, AmplitudeDistribution, SourceConfig};
use crate::stats::SettingPair;

/// Prefix of the environment variables that override file values:
/// `HOMODYNE_BELL_SEED`, `HOMODYNE_BELL_N_TRIALS`, `HOMODYNE_BELL_OUT`.
pub const ENV_PREFIX: &str = "HOMODYNE_BELL_";

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub n_trials: u64,
    pub seed: u64,
    /// Setting pair whose correlation enters `S` with a minus sign.
    pub subtracted_pair: SettingPair,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials", "n_trials >= 1", 0));
        }
        self.experiment.validate()
    }

    pub fn apparatus(&self) -> &Apparatus {
        &self.experiment.apparatus
    }

    pub fn schedule(&self) -> &SettingsSchedule {
        &self.experiment.schedule
    }

    /// Applies `HOMODYNE_BELL_*` overrides looked up through `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(v) = lookup(&format!("{ENV_PREFIX}SEED")) {
            self.seed = parse_seed(&v)?;
        }
        if let Some(v) = lookup(&format!("{ENV_PREFIX}N_TRIALS")) {
            self.n_trials = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{ENV_PREFIX}N_TRIALS: not an integer: {v:?}")))?;
        }
        if let Some(v) = lookup(&format!("{ENV_PREFIX}OUT")) {
            self.output_dir = PathBuf::from(v);
        }
        self.validate()
    }

    /// Canonical TOML form; parsing it yields an identical `RunConfig`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&RawConfig::from(self)).expect("raw config always serializes")
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let cfg = raw.into_config()?;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_seed(s: &str) -> Result<u64> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("seed: not an unsigned 64-bit integer: {s:?}")))
}

/// Parses radians written as a plain number or as a multiple of pi:
/// `"1.2"`, `"pi"`, `"-pi/2"`, `"3pi/4"`, `"0.25*pi"`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || Error::Config(format!("cannot parse angle {text:?}"));
    let Some(at) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let (coef, rest) = (&s[..at], &s[at + 2..]);
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match rest {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(coef * std::f64::consts::PI / denom)
}

// ---------------------------------------------------------------------------
// Document schema

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Number(f64),
    Text(String),
}

impl AngleRepr {
    fn radians(&self) -> Result<f64> {
        match self {
            AngleRepr::Number(x) => Ok(*x),
            AngleRepr::Text(s) => parse_angle(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum SeedRepr {
    Int(u64),
    Text(String),
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<SeedRepr>,
    n_trials: Option<u64>,
    #[serde(default)]
    source: RawSource,
    #[serde(default)]
    detector_a: RawDetector,
    #[serde(default)]
    detector_b: RawDetector,
    settings: Option<RawSettings>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    omega0: Option<f64>,
    sigma_omega: Option<f64>,
    amplitude_scale: Option<f64>,
    amplitude_distribution: Option<String>,
    alpha_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_alpha: Option<AngleRepr>,
    tap_reflectance: Option<f64>,
    pd_threshold: Option<f64>,
    pd_efficiency: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    gain: Option<f64>,
    noise_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discriminator_threshold: Option<f64>,
    subtract_pedestal: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSettings {
    selection: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_pair: Option<[u8; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan_start: Option<AngleRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan_end: Option<AngleRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan_steps: Option<usize>,
    drift_a: Option<f64>,
    drift_b: Option<f64>,
    subtracted_pair: Option<String>,
    a: Option<RawChannel>,
    a_prime: Option<RawChannel>,
    b: Option<RawChannel>,
    b_prime: Option<RawChannel>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    theta: Option<AngleRepr>,
    path_delay: Option<f64>,
    lo_amplitude: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

fn missing(key: &str) -> Error {
    Error::Config(format!("missing required key `{key}`"))
}

impl RawSource {
    fn into_source(self) -> Result<SourceConfig> {
        let d = SourceConfig::default();
        let alpha_mode = match self.alpha_mode.as_deref().unwrap_or("binary") {
            "binary" => AlphaMode::Binary,
            "uniform" => AlphaMode::Uniform,
            "fixed" => AlphaMode::Fixed(PhaseAngle::new(
                self.fixed_alpha
                    .as_ref()
                    .ok_or_else(|| missing("source.fixed_alpha"))?
                    .radians()?,
            )),
            other => {
                return Err(Error::Config(format!(
                    "source.alpha_mode: expected \"binary\", \"uniform\" or \"fixed\", got {other:?}"
                )))
            }
        };
        if self.fixed_alpha.is_some() && !matches!(alpha_mode, AlphaMode::Fixed(_)) {
            return Err(Error::Config(
                "source.fixed_alpha is only valid with alpha_mode = \"fixed\"".into(),
            ));
        }
        let amplitude_distribution = match self.amplitude_distribution.as_deref().unwrap_or("rayleigh") {
            "rayleigh" => AmplitudeDistribution::Rayleigh,
            "fixed" => AmplitudeDistribution::Fixed,
            other => {
                return Err(Error::Config(format!(
                    "source.amplitude_distribution: expected \"rayleigh\" or \"fixed\", got {other:?}"
                )))
            }
        };
        Ok(SourceConfig {
            omega0: self.omega0.unwrap_or(d.omega0),
            sigma_omega: self.sigma_omega.unwrap_or(d.sigma_omega),
            amplitude_scale: self.amplitude_scale.unwrap_or(d.amplitude_scale),
            amplitude_distribution,
            alpha_mode,
            tap_reflectance: self.tap_reflectance.unwrap_or(d.tap_reflectance),
            pd_threshold: self.pd_threshold.unwrap_or(d.pd_threshold),
            pd_efficiency: self.pd_efficiency.unwrap_or(d.pd_efficiency),
        })
    }
}

impl From<&SourceConfig> for RawSource {
    fn from(s: &SourceConfig) -> Self {
        let (mode, fixed) = match s.alpha_mode {
            AlphaMode::Binary => ("binary", None),
            AlphaMode::Uniform => ("uniform", None),
            AlphaMode::Fixed(a) => ("fixed", Some(AngleRepr::Number(a.radians()))),
        };
        RawSource {
            omega0: Some(s.omega0),
            sigma_omega: Some(s.sigma_omega),
            amplitude_scale: Some(s.amplitude_scale),
            amplitude_distribution: Some(
                match s.amplitude_distribution {
                    AmplitudeDistribution::Rayleigh => "rayleigh",
                    AmplitudeDistribution::Fixed => "fixed",
                }
                .into(),
            ),
            alpha_mode: Some(mode.into()),
            fixed_alpha: fixed,
            tap_reflectance: Some(s.tap_reflectance),
            pd_threshold: Some(s.pd_threshold),
            pd_efficiency: Some(s.pd_efficiency),
        }
    }
}

impl RawDetector {
    fn into_detector(self) -> DetectorConfig {
        let d = DetectorConfig::default();
        DetectorConfig {
            gain: self.gain.unwrap_or(d.gain),
            noise_sigma: self.noise_sigma.unwrap_or(d.noise_sigma),
            discriminator_threshold: self.discriminator_threshold,
            subtract_pedestal: self.subtract_pedestal.unwrap_or(d.subtract_pedestal),
        }
    }
}

impl From<&DetectorConfig> for RawDetector {
    fn from(d: &DetectorConfig) -> Self {
        RawDetector {
            gain: Some(d.gain),
            noise_sigma: Some(d.noise_sigma),
            discriminator_threshold: d.discriminator_threshold,
            subtract_pedestal: Some(d.subtract_pedestal),
        }
    }
}

impl RawChannel {
    fn into_setting(self, key: &str) -> Result<ChannelSetting> {
        let theta = self
            .theta
            .ok_or_else(|| missing(&format!("settings.{key}.theta")))?
            .radians()?;
        let setting = ChannelSetting::new(theta)
            .with_delay(self.path_delay.unwrap_or(0.0))
            .with_lo(self.lo_amplitude.unwrap_or(1.0))
            .map_err(|e| Error::Config(format!("settings.{key}.lo_amplitude: {e}")))?;
        setting.validate()?;
        Ok(setting)
    }
}

impl From<&ChannelSetting> for RawChannel {
    fn from(s: &ChannelSetting) -> Self {
        RawChannel {
            theta: Some(AngleRepr::Number(s.theta_set.radians())),
            path_delay: Some(s.path_delay),
            lo_amplitude: Some(s.lo_amplitude.value()),
        }
    }
}

impl RawConfig {
    fn into_config(self) -> Result<RunConfig> {
        let seed = match self.seed.ok_or_else(|| missing("seed"))? {
            SeedRepr::Int(x) => x,
            SeedRepr::Text(s) => parse_seed(&s)?,
        };
        let n_trials = self.n_trials.ok_or_else(|| missing("n_trials"))?;
        let settings = self.settings.ok_or_else(|| missing("settings"))?;

        let selection = match settings.selection.as_deref().unwrap_or("random") {
            "random" => Selection::RandomPerTrial,
            "fixed_pair" => {
                let [i, j] = settings.fixed_pair.ok_or_else(|| missing("settings.fixed_pair"))?;
                Selection::FixedPair(i, j)
            }
            "scan" => Selection::Scan {
                start: settings
                    .scan_start
                    .as_ref()
                    .ok_or_else(|| missing("settings.scan_start"))?
                    .radians()?,
                end: settings
                    .scan_end
                    .as_ref()
                    .ok_or_else(|| missing("settings.scan_end"))?
                    .radians()?,
                n_steps: settings.scan_steps.ok_or_else(|| missing("settings.scan_steps"))?,
            },
            other => {
                return Err(Error::Config(format!(
                    "settings.selection: expected \"random\", \"fixed_pair\" or \"scan\", got {other:?}"
                )))
            }
        };
        let subtracted_pair = match settings.subtracted_pair.as_deref() {
            None => SettingPair::ABPrime,
            Some(name) => SettingPair::from_name(name).ok_or_else(|| {
                Error::Config(format!(
                    "settings.subtracted_pair: expected one of a_b, a_bp, ap_b, ap_bp, got {name:?}"
                ))
            })?,
        };

        let channel = |c: Option<RawChannel>, key: &str| -> Result<ChannelSetting> {
            c.ok_or_else(|| missing(&format!("settings.{key}")))?.into_setting(key)
        };
        let schedule = SettingsSchedule {
            a: channel(settings.a, "a")?,
            a_prime: channel(settings.a_prime, "a_prime")?,
            b: channel(settings.b, "b")?,
            b_prime: channel(settings.b_prime, "b_prime")?,
            selection,
            drift_a: settings.drift_a.unwrap_or(0.0),
            drift_b: settings.drift_b.unwrap_or(0.0),
        };

        Ok(RunConfig {
            experiment: ExperimentConfig {
                apparatus: Apparatus {
                    source: self.source.into_source()?,
                    detector_a: self.detector_a.into_detector(),
                    detector_b: self.detector_b.into_detector(),
                },
                schedule,
            },
            n_trials,
            seed,
            subtracted_pair,
            output_dir: self.output.dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        })
    }
}

impl From<&RunConfig> for RawConfig {
    fn from(c: &RunConfig) -> Self {
        let s = &c.experiment.schedule;
        let mut settings = RawSettings {
            drift_a: Some(s.drift_a),
            drift_b: Some(s.drift_b),
            subtracted_pair: Some(c.subtracted_pair.name().into()),
            a: Some((&s.a).into()),
            a_prime: Some((&s.a_prime).into()),
            b: Some((&s.b).into()),
            b_prime: Some((&s.b_prime).into()),
            ..Default::default()
        };
        settings.selection = Some(
            match s.selection {
                Selection::RandomPerTrial => "random",
                Selection::FixedPair(i, j) => {
                    settings.fixed_pair = Some([i, j]);
                    "fixed_pair"
                }
                Selection::Scan { start, end, n_steps } => {
                    settings.scan_start = Some(AngleRepr::Number(start));
                    settings.scan_end = Some(AngleRepr::Number(end));
                    settings.scan_steps = Some(n_steps);
                    "scan"
                }
            }
            .into(),
        );
        let seed = if c.seed <= i64::MAX as u64 {
            SeedRepr::Int(c.seed)
        } else {
            SeedRepr::Text(format!("{:#x}", c.seed))
        };
        RawConfig {
            seed: Some(seed),
            n_trials: Some(c.n_trials),
            source: (&c.experiment.apparatus.source).into(),
            detector_a: (&c.experiment.apparatus.detector_a).into(),
            detector_b: (&c.experiment.apparatus.detector_b).into(),
            settings: Some(settings),
            output: RawOutput {
                dir: Some(c.output_dir.clone()),
            },
        }
    }
}
