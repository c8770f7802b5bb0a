//! The `run`, `sweep`, `curves`, `scan` and `hist` commands.
//!
//! Each command computes its result, writes plain CSV (plus a JSON summary
//! for `run`) into the output directory, and returns the result. Floats are
//! written with 17 significant digits in `{:e}` notation, which is locale
//! independent and round-trips exactly.
//!
//! | command  | files                                                          |
//! |----------|----------------------------------------------------------------|
//! | `run`    | `tally.csv`, `summary.json`                                    |
//! | `sweep`  | `sweep.csv`                                                    |
//! | `curves` | `curves.csv`, `visibility.csv`                                 |
//! | `scan`   | `scan.csv`                                                     |
//! | `hist`   | `hist.csv`, `hist_stats.csv`                                   |

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::optics::PhaseAngle;
use crate::runner::{random_phase_ensemble, run_experiment, scan_phase, Arm, ScanPoint, Selection};
use crate::stats::{
    analytic_coincidence, arcsine_cdf, arcsine_goodness_of_fit, chsh_from_tally, diff_histogram,
    estimate, tail_fraction, two_curve_decomposition, visibility, ChshResult, CoincidenceTally,
    Decomposition, Estimator, GoodnessOfFit, Histogram, SettingPair,
};

pub const TALLY_COLUMNS: [&str; 11] = [
    "setting_pair",
    "n_trials",
    "n_ready",
    "n_pp",
    "n_pm",
    "n_mp",
    "n_mm",
    "e_fair",
    "e_fair_err",
    "e_post",
    "e_post_err",
];

pub const SWEEP_COLUMNS: [&str; 6] = [
    "parameter_value",
    "s_fair",
    "s_fair_err",
    "s_post",
    "s_post_err",
    "accepted_fraction",
];

pub const CURVE_COLUMNS: [&str; 8] = [
    "theta_b", "n_ready", "p_pp", "p_pm", "p_mp", "p_mm", "e_fair", "analytic_p_pp",
];

pub const SCAN_COLUMNS: [&str; 3] = ["theta", "v_diff", "class_label"];

pub const HIST_COLUMNS: [&str; 4] = ["bin_lo", "bin_hi", "count", "expected_arcsine"];

pub const HIST_STATS_COLUMNS: [&str; 6] =
    ["n_samples", "x_max", "tail_fraction", "chi_square", "dof", "p_value"];

/// Full-precision, locale-independent float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_csv<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// run

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub n_trials: u64,
    pub subtracted_pair: SettingPair,
    pub accepted_fraction: f64,
    pub tally: CoincidenceTally,
    /// `None` when some setting pair has no event-ready trials.
    pub fair: Option<ChshResult>,
    /// `None` when some setting pair has no observed coincidences.
    pub post_selected: Option<ChshResult>,
}

pub fn simulate_run(cfg: &RunConfig) -> Result<RunSummary> {
    let set = run_experiment(&cfg.experiment, cfg.n_trials, cfg.seed)?;
    let tally = CoincidenceTally::from_records(&set.records);
    Ok(RunSummary {
        seed: cfg.seed,
        n_trials: cfg.n_trials,
        subtracted_pair: cfg.subtracted_pair,
        accepted_fraction: tally.accepted_fraction(),
        fair: chsh_from_tally(&tally, Estimator::FairNAB, cfg.subtracted_pair).ok(),
        post_selected: chsh_from_tally(&tally, Estimator::PostSelected, cfg.subtracted_pair).ok(),
        tally,
    })
}

pub fn tally_rows(tally: &CoincidenceTally) -> Vec<Vec<String>> {
    SettingPair::ALL
        .iter()
        .map(|&p| {
            let r = tally.row(p);
            let fair = estimate(r, Estimator::FairNAB).ok();
            let post = estimate(r, Estimator::PostSelected).ok();
            vec![
                p.name().to_string(),
                r.n_trials.to_string(),
                r.n_ready.to_string(),
                r.n_pp.to_string(),
                r.n_pm.to_string(),
                r.n_mp.to_string(),
                r.n_mm.to_string(),
                fmt_opt(fair.map(|e| e.value)),
                fmt_opt(fair.map(|e| e.std_err)),
                fmt_opt(post.map(|e| e.value)),
                fmt_opt(post.map(|e| e.std_err)),
            ]
        })
        .collect()
}

pub fn cmd_run(cfg: &RunConfig) -> Result<RunSummary> {
    let summary = simulate_run(cfg)?;
    let dir = &cfg.output_dir;
    prepare(dir)?;
    write_csv(dir.join("tally.csv"), &TALLY_COLUMNS, &tally_rows(&summary.tally))?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Discriminator threshold of both detectors.
    DiscriminatorThreshold,
    /// Photodiode noise of both detectors.
    NoiseSigma,
    /// Frequency jitter of the source.
    SigmaOmega,
    /// Path delay of all four settings.
    PathDelay,
}

impl FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "discriminator_threshold" => SweepParameter::DiscriminatorThreshold,
            "noise_sigma" => SweepParameter::NoiseSigma,
            "sigma_omega" => SweepParameter::SigmaOmega,
            "path_delay" => SweepParameter::PathDelay,
            other => {
                return Err(Error::Usage(format!(
                    "unknown sweep parameter {other:?}; expected discriminator_threshold, \
                     noise_sigma, sigma_omega or path_delay"
                )))
            }
        })
    }
}

impl SweepParameter {
    pub fn apply(self, cfg: &mut RunConfig, value: f64) {
        let exp = &mut cfg.experiment;
        match self {
            SweepParameter::DiscriminatorThreshold => {
                for d in exp.apparatus.detectors_mut() {
                    d.discriminator_threshold = Some(value);
                }
            }
            SweepParameter::NoiseSigma => {
                for d in exp.apparatus.detectors_mut() {
                    d.noise_sigma = value;
                }
            }
            SweepParameter::SigmaOmega => exp.apparatus.source.sigma_omega = value,
            SweepParameter::PathDelay => {
                for s in exp.schedule.all_settings_mut() {
                    s.path_delay = value;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub fair: Option<ChshResult>,
    pub post_selected: Option<ChshResult>,
    pub accepted_fraction: f64,
}

/// One run per grid value, all with the configured seed.
pub fn simulate_sweep(cfg: &RunConfig, parameter: SweepParameter, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Usage("sweep grid is empty".into()));
    }
    grid.iter()
        .map(|&value| {
            let mut point = cfg.clone();
            parameter.apply(&mut point, value);
            point.validate()?;
            let s = simulate_run(&point)?;
            Ok(SweepRow {
                value,
                fair: s.fair,
                post_selected: s.post_selected,
                accepted_fraction: s.accepted_fraction,
            })
        })
        .collect()
}

pub fn cmd_sweep(cfg: &RunConfig, parameter: SweepParameter, grid: &[f64]) -> Result<Vec<SweepRow>> {
    let rows = simulate_sweep(cfg, parameter, grid)?;
    prepare(&cfg.output_dir)?;
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.value),
                fmt_opt(r.fair.map(|c| c.s)),
                fmt_opt(r.fair.map(|c| c.s_err)),
                fmt_opt(r.post_selected.map(|c| c.s)),
                fmt_opt(r.post_selected.map(|c| c.s_err)),
                fmt_f64(r.accepted_fraction),
            ]
        })
        .collect();
    write_csv(cfg.output_dir.join("sweep.csv"), &SWEEP_COLUMNS, &text)?;
    Ok(rows)
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    }
}

// ---------------------------------------------------------------------------
// curves

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub theta_b: f64,
    pub n_ready: u64,
    /// `(P_pp, P_pm, P_mp, P_mm)` over event-ready pairs.
    pub rates: [f64; 4],
    pub e_fair: Option<f64>,
    /// Noiseless binary-phase prediction, absent at multiples of pi.
    pub analytic_p_pp: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Curves {
    pub theta_a: f64,
    pub points: Vec<CurvePoint>,
    /// Visibility of each of the four rate curves; `None` if degenerate.
    pub visibility: [Option<f64>; 4],
}

/// Coincidence rates with arm A fixed at `theta_a` and arm B swept over
/// `theta_b_grid`, `n_trials` per point on the configured seed.
pub fn simulate_curves(cfg: &RunConfig, theta_a: f64, theta_b_grid: &[f64]) -> Result<Curves> {
    if theta_b_grid.is_empty() {
        return Err(Error::Usage("theta_b grid is empty".into()));
    }
    let points = theta_b_grid
        .iter()
        .map(|&theta_b| {
            let mut exp = cfg.experiment.clone();
            exp.schedule.a.theta_set = PhaseAngle::new(theta_a);
            exp.schedule.b.theta_set = PhaseAngle::new(theta_b);
            exp.schedule.selection = Selection::FixedPair(0, 0);
            let set = run_experiment(&exp, cfg.n_trials, cfg.seed)?;
            let tally = CoincidenceTally::from_records(&set.records);
            let row = tally.row(SettingPair::AB);
            let n = row.n_ready as f64;
            let rates = if row.n_ready == 0 {
                [0.0; 4]
            } else {
                [row.n_pp, row.n_pm, row.n_mp, row.n_mm].map(|c| c as f64 / n)
            };
            Ok(CurvePoint {
                theta_b,
                n_ready: row.n_ready,
                rates,
                e_fair: estimate(row, Estimator::FairNAB).ok().map(|e| e.value),
                analytic_p_pp: analytic_coincidence(PhaseAngle::new(theta_a), PhaseAngle::new(theta_b))
                    .ok()
                    .map(|p| p[0]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut vis = [None; 4];
    for (k, v) in vis.iter_mut().enumerate() {
        let curve: Vec<(f64, f64)> = points.iter().map(|p| (p.theta_b, p.rates[k])).collect();
        *v = visibility(&curve).ok();
    }
    Ok(Curves {
        theta_a,
        points,
        visibility: vis,
    })
}

pub fn cmd_curves(cfg: &RunConfig, theta_a: f64, theta_b_grid: &[f64]) -> Result<Curves> {
    let curves = simulate_curves(cfg, theta_a, theta_b_grid)?;
    let dir = &cfg.output_dir;
    prepare(dir)?;
    let rows: Vec<Vec<String>> = curves
        .points
        .iter()
        .map(|p| {
            let mut r = vec![fmt_f64(p.theta_b), p.n_ready.to_string()];
            r.extend(p.rates.iter().map(|&x| fmt_f64(x)));
            r.push(fmt_opt(p.e_fair));
            r.push(fmt_opt(p.analytic_p_pp));
            r
        })
        .collect();
    write_csv(dir.join("curves.csv"), &CURVE_COLUMNS, &rows)?;
    let vis_rows: Vec<Vec<String>> = ["p_pp", "p_pm", "p_mp", "p_mm"]
        .iter()
        .zip(curves.visibility)
        .map(|(name, v)| vec![name.to_string(), fmt_f64(curves.theta_a), fmt_opt(v)])
        .collect();
    write_csv(dir.join("visibility.csv"), &["curve", "theta_a", "visibility"], &vis_rows)?;
    Ok(curves)
}

// ---------------------------------------------------------------------------
// scan

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    pub decomposition: Decomposition,
}

pub fn simulate_scan(cfg: &RunConfig, arm: Arm, start: f64, end: f64, n_steps: usize) -> Result<ScanReport> {
    let points = scan_phase(&cfg.experiment, arm, start, end, n_steps, cfg.seed)?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.theta, p.v_diff)).collect();
    let decomposition = two_curve_decomposition(&pairs, None)?;
    Ok(ScanReport { points, decomposition })
}

pub fn cmd_scan(cfg: &RunConfig, arm: Arm, start: f64, end: f64, n_steps: usize) -> Result<ScanReport> {
    let report = simulate_scan(cfg, arm, start, end, n_steps)?;
    prepare(&cfg.output_dir)?;
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .zip(&report.decomposition.labels)
        .map(|(p, l)| vec![fmt_f64(p.theta), fmt_f64(p.v_diff), l.label().to_string()])
        .collect();
    write_csv(cfg.output_dir.join("scan.csv"), &SCAN_COLUMNS, &rows)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// hist

#[derive(Debug, Clone, Serialize)]
pub struct HistReport {
    pub histogram: Histogram,
    pub x_max: f64,
    pub tail_fraction: f64,
    /// Against the noiseless arcsine law; `None` if it cannot be formed.
    pub arcsine_fit: Option<GoodnessOfFit>,
}

pub fn simulate_hist(cfg: &RunConfig, n_bins: usize) -> Result<HistReport> {
    let values = random_phase_ensemble(&cfg.experiment, cfg.n_trials, cfg.seed)?;
    let histogram = diff_histogram(&values, n_bins)?;
    let x_max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(HistReport {
        tail_fraction: tail_fraction(&values)?,
        arcsine_fit: arcsine_goodness_of_fit(&histogram, x_max).ok(),
        histogram,
        x_max,
    })
}

pub fn cmd_hist(cfg: &RunConfig, n_bins: usize) -> Result<HistReport> {
    let report = simulate_hist(cfg, n_bins)?;
    let dir = &cfg.output_dir;
    prepare(dir)?;
    let h = &report.histogram;
    let mass = arcsine_cdf(h.hi, report.x_max) - arcsine_cdf(h.lo, report.x_max);
    let rows: Vec<Vec<String>> = (0..h.n_bins())
        .map(|b| {
            let (lo, hi) = h.edges(b);
            let expected = (report.x_max > 0.0 && mass > 0.0).then(|| {
                h.total as f64 * (arcsine_cdf(hi, report.x_max) - arcsine_cdf(lo, report.x_max)) / mass
            });
            vec![fmt_f64(lo), fmt_f64(hi), h.counts[b].to_string(), fmt_opt(expected)]
        })
        .collect();
    write_csv(dir.join("hist.csv"), &HIST_COLUMNS, &rows)?;
    let fit = report.arcsine_fit;
    write_csv(
        dir.join("hist_stats.csv"),
        &HIST_STATS_COLUMNS,
        &[vec![
            h.total.to_string(),
            fmt_f64(report.x_max),
            fmt_f64(report.tail_fraction),
            fmt_opt(fit.map(|f| f.chi_square)),
            fit.map(|f| f.dof.to_string()).unwrap_or_default(),
            fmt_opt(fit.map(|f| f.p_value)),
        ]],
    )?;
    Ok(report)
}

/// Paths written by each command, relative to the output directory.
pub fn output_files(command: &str) -> &'static [&'static str] {
    match command {
        "run" => &["tally.csv", "summary.json"],
        "sweep" => &["sweep.csv"],
        "curves" => &["curves.csv", "visibility.csv"],
        "scan" => &["scan.csv"],
        "hist" => &["hist.csv", "hist_stats.csv"],
        _ => &[],
    }
}
