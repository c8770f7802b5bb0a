//! Trial orchestration.
//!
//! A trial runs the full chain for both arms:
//!
//! ```text
//! generate_pair -> tap_split (A, B) -> event_ready (A, B)
//!   -> effective_phase -> output_intensities -> read_homodyne (A, B)
//!   -> digitize / discriminate (A, B)
//! ```
//!
//! Physics draws come from the trial's physics stream in this order: pair
//! `alpha`, pair `omega`, pair amplitude, arm-A tap Bernoulli, arm-B tap
//! Bernoulli, arm-A reflected and transmitted noise, arm-B reflected and
//! transmitted noise, arm-A tie coin (only on an exact zero), arm-B tie coin.
//! Setting indices come from the separate settings stream, so the physics of
//! trial `k` does not depend on which settings were chosen.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{classify, read_homodyne, DetectorConfig, HomodyneReading, Outcome};
use crate::error::{Error, Result};
use crate::optics::{output_intensities, FieldAmplitude, PhaseAngle};
use crate::source::{event_ready, generate_pair, tap_split, PairEvent, SourceConfig};
use crate::streams::{physics_stream, settings_stream, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arm {
    A,
    B,
}

/// Local-oscillator configuration of one analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSetting {
    pub theta_set: PhaseAngle,
    /// Optical path difference divided by c.
    pub path_delay: f64,
    pub lo_amplitude: FieldAmplitude,
}

impl ChannelSetting {
    pub fn new(theta_set: f64) -> Self {
        ChannelSetting {
            theta_set: PhaseAngle::new(theta_set),
            path_delay: 0.0,
            lo_amplitude: FieldAmplitude::new(1.0).unwrap(),
        }
    }

    pub fn with_delay(mut self, path_delay: f64) -> Self {
        self.path_delay = path_delay;
        self
    }

    pub fn with_lo(mut self, lo_amplitude: f64) -> Result<Self> {
        self.lo_amplitude = FieldAmplitude::new(lo_amplitude)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo_amplitude.value() > 0.0) {
            return Err(Error::invalid(
                "lo_amplitude",
                "lo_amplitude > 0",
                self.lo_amplitude.value(),
            ));
        }
        if !self.path_delay.is_finite() {
            return Err(Error::invalid("path_delay", "finite", self.path_delay));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    /// Each side picks its setting with a fair coin every trial.
    RandomPerTrial,
    /// Always the given `(a index, b index)`.
    FixedPair(u8, u8),
    /// Arm A's primary setting swept linearly from `start` to `end`
    /// (inclusive) over `n_steps` trials, repeating; arm B stays on `b`.
    Scan { start: f64, end: f64, n_steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsSchedule {
    pub a: ChannelSetting,
    pub a_prime: ChannelSetting,
    pub b: ChannelSetting,
    pub b_prime: ChannelSetting,
    pub selection: Selection,
    /// Path-delay drift per trial on arm A (thermal drift of the offset).
    pub drift_a: f64,
    pub drift_b: f64,
}

impl SettingsSchedule {
    pub fn new(a: ChannelSetting, a_prime: ChannelSetting, b: ChannelSetting, b_prime: ChannelSetting) -> Self {
        SettingsSchedule {
            a,
            a_prime,
            b,
            b_prime,
            selection: Selection::RandomPerTrial,
            drift_a: 0.0,
            drift_b: 0.0,
        }
    }

    pub fn setting(&self, arm: Arm, index: u8) -> &ChannelSetting {
        match (arm, index) {
            (Arm::A, 0) => &self.a,
            (Arm::A, _) => &self.a_prime,
            (Arm::B, 0) => &self.b,
            (Arm::B, _) => &self.b_prime,
        }
    }

    pub fn setting_mut(&mut self, arm: Arm, index: u8) -> &mut ChannelSetting {
        match (arm, index) {
            (Arm::A, 0) => &mut self.a,
            (Arm::A, _) => &mut self.a_prime,
            (Arm::B, 0) => &mut self.b,
            (Arm::B, _) => &mut self.b_prime,
        }
    }

    pub fn all_settings_mut(&mut self) -> [&mut ChannelSetting; 4] {
        [&mut self.a, &mut self.a_prime, &mut self.b, &mut self.b_prime]
    }

    pub fn validate(&self) -> Result<()> {
        for s in [&self.a, &self.a_prime, &self.b, &self.b_prime] {
            s.validate()?;
        }
        match self.selection {
            Selection::FixedPair(i, j) if i > 1 || j > 1 => {
                return Err(Error::invalid(
                    "fixed_pair",
                    "setting indices in {0,1}",
                    format!("[{i}, {j}]"),
                ))
            }
            Selection::Scan { n_steps, start, end } => {
                if n_steps < 2 {
                    return Err(Error::invalid("scan_steps", "scan_steps >= 2", n_steps));
                }
                if !(start.is_finite() && end.is_finite()) {
                    return Err(Error::invalid("scan range", "finite", format!("{start}..{end}")));
                }
            }
            _ => {}
        }
        if !(self.drift_a.is_finite() && self.drift_b.is_finite()) {
            return Err(Error::invalid("drift", "finite", format!("{} {}", self.drift_a, self.drift_b)));
        }
        Ok(())
    }
}

/// Everything physical about the apparatus: the source and both detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Apparatus {
    pub source: SourceConfig,
    pub detector_a: DetectorConfig,
    pub detector_b: DetectorConfig,
}

impl Apparatus {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.detector_a.validate()?;
        self.detector_b.validate()
    }

    pub fn detector(&self, arm: Arm) -> &DetectorConfig {
        match arm {
            Arm::A => &self.detector_a,
            Arm::B => &self.detector_b,
        }
    }

    pub fn detectors_mut(&mut self) -> [&mut DetectorConfig; 2] {
        [&mut self.detector_a, &mut self.detector_b]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub apparatus: Apparatus,
    pub schedule: SettingsSchedule,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.apparatus.validate()?;
        self.schedule.validate()
    }
}

/// Everything observed (and, for diagnostics, hidden) in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub setting_a_index: u8,
    pub setting_b_index: u8,
    pub ready_a: bool,
    pub ready_b: bool,
    pub reading_a: HomodyneReading,
    pub reading_b: HomodyneReading,
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
    /// Diagnostic only; estimators never read it.
    pub alpha: PhaseAngle,
    /// Diagnostic only.
    pub omega: f64,
}

impl TrialRecord {
    pub fn pair_index(&self) -> usize {
        2 * self.setting_a_index as usize + self.setting_b_index as usize
    }

    pub fn both_ready(&self) -> bool {
        self.ready_a && self.ready_b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSet {
    pub records: Vec<TrialRecord>,
    pub config: ExperimentConfig,
    pub seed: u64,
}

/// Phase difference between test beam and local oscillator seen by one arm:
/// applied shift plus the path phase `omega * delay`, minus the hidden phase.
pub fn effective_phase(setting: &ChannelSetting, pair: &PairEvent) -> PhaseAngle {
    PhaseAngle::new(
        setting.theta_set.radians() + pair.omega * setting.path_delay - pair.alpha.radians(),
    )
}

/// Runs one trial with explicit settings, drawing from `rng` in the order
/// documented at module level.
pub fn run_trial<R: Rng + ?Sized>(
    apparatus: &Apparatus,
    trial_id: u64,
    (index_a, setting_a): (u8, &ChannelSetting),
    (index_b, setting_b): (u8, &ChannelSetting),
    rng: &mut R,
) -> TrialRecord {
    let src = &apparatus.source;
    let pair = generate_pair(src, rng);

    let tap_a = tap_split(pair.amp_a, src.tap_reflectance).expect("validated reflectance");
    let tap_b = tap_split(pair.amp_b, src.tap_reflectance).expect("validated reflectance");
    let ready_a = event_ready(tap_a.tapped_intensity, src, rng);
    let ready_b = event_ready(tap_b.tapped_intensity, src, rng);

    let ports_a = output_intensities(
        tap_a.main_amplitude,
        setting_a.lo_amplitude,
        effective_phase(setting_a, &pair),
    );
    let ports_b = output_intensities(
        tap_b.main_amplitude,
        setting_b.lo_amplitude,
        effective_phase(setting_b, &pair),
    );
    let reading_a = read_homodyne(ports_a, &apparatus.detector_a, rng);
    let reading_b = read_homodyne(ports_b, &apparatus.detector_b, rng);
    let outcome_a = classify(&reading_a, &apparatus.detector_a, rng);
    let outcome_b = classify(&reading_b, &apparatus.detector_b, rng);

    TrialRecord {
        trial_id,
        setting_a_index: index_a,
        setting_b_index: index_b,
        ready_a,
        ready_b,
        reading_a,
        reading_b,
        outcome_a,
        outcome_b,
        alpha: pair.alpha,
        omega: pair.omega,
    }
}

fn drifted(setting: &ChannelSetting, rate: f64, trial_id: u64) -> ChannelSetting {
    let mut s = *setting;
    if rate != 0.0 {
        s.path_delay += rate * trial_id as f64;
    }
    s
}

fn scan_theta(start: f64, end: f64, n_steps: usize, step: usize) -> f64 {
    start + (end - start) * step as f64 / (n_steps - 1) as f64
}

fn choose_indices(selection: &Selection, rng: &mut TrialRng) -> (u8, u8) {
    match *selection {
        Selection::RandomPerTrial => (rng.random_bool(0.5) as u8, rng.random_bool(0.5) as u8),
        Selection::FixedPair(i, j) => (i, j),
        Selection::Scan { .. } => (0, 0),
    }
}

/// Replays trial `trial_id` of a run seeded with `seed`, forcing the given
/// setting indices. Drift and scan offsets are applied as in
/// [`run_experiment`].
pub fn run_indexed_trial(
    cfg: &ExperimentConfig,
    seed: u64,
    trial_id: u64,
    index_a: u8,
    index_b: u8,
) -> TrialRecord {
    let sched = &cfg.schedule;
    let mut setting_a = drifted(sched.setting(Arm::A, index_a), sched.drift_a, trial_id);
    let setting_b = drifted(sched.setting(Arm::B, index_b), sched.drift_b, trial_id);
    if let Selection::Scan { start, end, n_steps } = sched.selection {
        let step = (trial_id % n_steps as u64) as usize;
        setting_a.theta_set = PhaseAngle::new(scan_theta(start, end, n_steps, step));
    }
    let mut rng = physics_stream(seed, trial_id);
    run_trial(
        &cfg.apparatus,
        trial_id,
        (index_a, &setting_a),
        (index_b, &setting_b),
        &mut rng,
    )
}

/// Runs `n_trials` independent trials in parallel. The result is identical to
/// sequential execution for the same `(cfg, seed)`.
pub fn run_experiment(cfg: &ExperimentConfig, n_trials: u64, seed: u64) -> Result<TrialSet> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "n_trials >= 1", n_trials));
    }
    cfg.validate()?;
    let records = (0..n_trials)
        .into_par_iter()
        .map(|trial_id| {
            let mut settings_rng = settings_stream(seed, trial_id);
            let (i, j) = choose_indices(&cfg.schedule.selection, &mut settings_rng);
            run_indexed_trial(cfg, seed, trial_id, i, j)
        })
        .collect();
    Ok(TrialSet {
        records,
        config: cfg.clone(),
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Applied phase shift, not reduced, for plotting.
    pub theta: f64,
    pub v_diff: f64,
    /// Diagnostic hidden phase of the pulse.
    pub alpha: PhaseAngle,
}

/// Sweeps the applied phase of one arm's primary setting over
/// `[start, end]`, one fresh pulse per step, and returns that arm's
/// difference voltages.
pub fn scan_phase(
    cfg: &ExperimentConfig,
    arm: Arm,
    start: f64,
    end: f64,
    n_steps: usize,
    seed: u64,
) -> Result<Vec<ScanPoint>> {
    if n_steps < 2 {
        return Err(Error::invalid("n_steps", "n_steps >= 2", n_steps));
    }
    cfg.validate()?;
    let sched = &cfg.schedule;
    let points = (0..n_steps)
        .into_par_iter()
        .map(|step| {
            let trial_id = step as u64;
            let theta = scan_theta(start, end, n_steps, step);
            let mut setting_a = drifted(&sched.a, sched.drift_a, trial_id);
            let mut setting_b = drifted(&sched.b, sched.drift_b, trial_id);
            match arm {
                Arm::A => setting_a.theta_set = PhaseAngle::new(theta),
                Arm::B => setting_b.theta_set = PhaseAngle::new(theta),
            }
            let mut rng = physics_stream(seed, trial_id);
            let rec = run_trial(&cfg.apparatus, trial_id, (0, &setting_a), (0, &setting_b), &mut rng);
            let reading = match arm {
                Arm::A => rec.reading_a,
                Arm::B => rec.reading_b,
            };
            ScanPoint {
                theta,
                v_diff: reading.v_diff,
                alpha: rec.alpha,
            }
        })
        .collect();
    Ok(points)
}

/// Difference voltages of arm A with the applied phase drawn uniformly on
/// `(-pi, pi]` every pulse (from the settings stream), as when the local
/// oscillator phase is varied randomly.
pub fn random_phase_ensemble(cfg: &ExperimentConfig, n_trials: u64, seed: u64) -> Result<Vec<f64>> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "n_trials >= 1", n_trials));
    }
    cfg.validate()?;
    let sched = &cfg.schedule;
    Ok((0..n_trials)
        .into_par_iter()
        .map(|trial_id| {
            let mut settings_rng = settings_stream(seed, trial_id);
            let u: f64 = settings_rng.random();
            let mut setting_a = drifted(&sched.a, sched.drift_a, trial_id);
            setting_a.theta_set = PhaseAngle::new(PI - std::f64::consts::TAU * u);
            let setting_b = drifted(&sched.b, sched.drift_b, trial_id);
            let mut rng = physics_stream(seed, trial_id);
            run_trial(&cfg.apparatus, trial_id, (0, &setting_a), (0, &setting_b), &mut rng)
                .reading_a
                .v_diff
        })
        .collect())
}
