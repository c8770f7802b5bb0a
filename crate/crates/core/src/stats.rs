//! Closed-form predictions of the binary-phase model, CHSH estimators, and
//! distribution analyses of the raw difference voltages.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::PhaseAngle;
use crate::runner::TrialRecord;

// ---------------------------------------------------------------------------
// Analytic oracles

/// `(p_minus, p_plus)` for a noiseless digitised homodyne detector.
///
/// `p_minus = 1` when `-pi < theta - alpha < 0` and `0` when
/// `0 < theta - alpha < pi`. Multiples of pi are rejected.
pub fn analytic_singles(theta: PhaseAngle, alpha: PhaseAngle) -> Result<(f64, f64)> {
    let d = PhaseAngle::new(theta.radians() - alpha.radians()).radians();
    if d == 0.0 || d == PI {
        return Err(Error::UndefinedAngle(d));
    }
    let p_minus = if d < 0.0 { 1.0 } else { 0.0 };
    Ok((p_minus, 1.0 - p_minus))
}

/// `(P_pp, P_pm, P_mp, P_mm)`: average over `alpha in {0, pi}` with weight one
/// half of the product of the single-arm probabilities.
pub fn analytic_coincidence(theta_a: PhaseAngle, theta_b: PhaseAngle) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for alpha in [PhaseAngle::ZERO, PhaseAngle::PI] {
        let (am, ap) = analytic_singles(theta_a, alpha)?;
        let (bm, bp) = analytic_singles(theta_b, alpha)?;
        out[0] += 0.5 * ap * bp;
        out[1] += 0.5 * ap * bm;
        out[2] += 0.5 * am * bp;
        out[3] += 0.5 * am * bm;
    }
    Ok(out)
}

/// `P_pp + P_mm - P_pm - P_mp`, which reduces to
/// `sgn(sin theta_a) * sgn(sin theta_b)`.
pub fn analytic_correlation(theta_a: PhaseAngle, theta_b: PhaseAngle) -> Result<f64> {
    let [pp, pm, mp, mm] = analytic_coincidence(theta_a, theta_b)?;
    Ok(pp + mm - pm - mp)
}

// ---------------------------------------------------------------------------
// Tallies

/// The four CHSH setting pairs, indexed `2 * a_index + b_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingPair {
    #[serde(rename = "a_b")]
    AB,
    #[serde(rename = "a_bp")]
    ABPrime,
    #[serde(rename = "ap_b")]
    APrimeB,
    #[serde(rename = "ap_bp")]
    APrimeBPrime,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair::AB,
        SettingPair::ABPrime,
        SettingPair::APrimeB,
        SettingPair::APrimeBPrime,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SettingPair::AB => "a_b",
            SettingPair::ABPrime => "a_bp",
            SettingPair::APrimeB => "ap_b",
            SettingPair::APrimeBPrime => "ap_bp",
        }
    }

    pub fn from_name(name: &str) -> Option<SettingPair> {
        SettingPair::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn indices(self) -> (u8, u8) {
        let i = self.index();
        ((i / 2) as u8, (i % 2) as u8)
    }
}

/// Coincidence counts for one setting pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyRow {
    /// Trials that used this setting pair.
    pub n_trials: u64,
    /// Trials where both event-ready detectors fired (`N_AB`).
    pub n_ready: u64,
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl TallyRow {
    pub fn observed(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    fn signed_sum(&self) -> f64 {
        (self.n_pp + self.n_mm) as f64 - (self.n_pm + self.n_mp) as f64
    }

    pub fn merge(&mut self, other: &TallyRow) {
        self.n_trials += other.n_trials;
        self.n_ready += other.n_ready;
        self.n_pp += other.n_pp;
        self.n_pm += other.n_pm;
        self.n_mp += other.n_mp;
        self.n_mm += other.n_mm;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceTally {
    pub rows: [TallyRow; 4],
}

impl CoincidenceTally {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> Self {
        let mut tally = CoincidenceTally::default();
        for r in records {
            tally.add(r);
        }
        tally
    }

    pub fn add(&mut self, r: &TrialRecord) {
        use crate::detector::Outcome::*;
        let row = &mut self.rows[r.pair_index()];
        row.n_trials += 1;
        if !r.both_ready() {
            return;
        }
        row.n_ready += 1;
        match (r.outcome_a, r.outcome_b) {
            (Plus, Plus) => row.n_pp += 1,
            (Plus, Minus) => row.n_pm += 1,
            (Minus, Plus) => row.n_mp += 1,
            (Minus, Minus) => row.n_mm += 1,
            _ => {}
        }
    }

    pub fn merge(&mut self, other: &CoincidenceTally) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.merge(b);
        }
    }

    pub fn row(&self, pair: SettingPair) -> &TallyRow {
        &self.rows[pair.index()]
    }

    /// Observed coincidences over event-ready pairs, all settings pooled.
    pub fn accepted_fraction(&self) -> f64 {
        let ready: u64 = self.rows.iter().map(|r| r.n_ready).sum();
        let observed: u64 = self.rows.iter().map(|r| r.observed()).sum();
        if ready == 0 {
            0.0
        } else {
            observed as f64 / ready as f64
        }
    }
}

// ---------------------------------------------------------------------------
// Correlation estimators

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    /// Denominator is the number of event-ready pairs.
    FairNAB,
    /// Denominator is the number of observed coincidences.
    PostSelected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

pub fn correlation_fair(row: &TallyRow) -> Result<f64> {
    if row.n_ready == 0 {
        return Err(Error::EmptyDenominator("n_ready = 0"));
    }
    Ok(row.signed_sum() / row.n_ready as f64)
}

pub fn correlation_postselected(row: &TallyRow) -> Result<f64> {
    let n = row.observed();
    if n == 0 {
        return Err(Error::EmptyDenominator("no observed coincidences"));
    }
    Ok(row.signed_sum() / n as f64)
}

/// Estimate with its standard error. Each event-ready pair contributes a
/// product in `{-1, 0, +1}` for the fair estimator and in `{-1, +1}` for the
/// post-selected one; the error is the standard error of that mean.
pub fn estimate(row: &TallyRow, estimator: Estimator) -> Result<Estimate> {
    let (value, n, second_moment) = match estimator {
        Estimator::FairNAB => {
            let e = correlation_fair(row)?;
            (e, row.n_ready, row.observed() as f64 / row.n_ready as f64)
        }
        Estimator::PostSelected => (correlation_postselected(row)?, row.observed(), 1.0),
    };
    let var = (second_moment - value * value).max(0.0);
    Ok(Estimate {
        value,
        std_err: (var / n as f64).sqrt(),
    })
}

/// `S` with the given setting pair subtracted and the other three added.
pub fn chsh_with(e: [f64; 4], subtracted: SettingPair) -> Result<f64> {
    if let Some(&bad) = e.iter().find(|x| !(x.abs() <= 1.0)) {
        return Err(Error::CorrelationDomain(bad));
    }
    Ok(e.iter()
        .enumerate()
        .map(|(i, &x)| if i == subtracted.index() { -x } else { x })
        .sum())
}

/// `E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
pub fn chsh(e_ab: f64, e_abp: f64, e_apb: f64, e_apbp: f64) -> Result<f64> {
    chsh_with([e_ab, e_abp, e_apb, e_apbp], SettingPair::ABPrime)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e_values: [f64; 4],
    pub e_errors: [f64; 4],
    pub s: f64,
    /// Per-correlation errors added in quadrature.
    pub s_err: f64,
    pub estimator: Estimator,
}

pub fn chsh_from_tally(
    tally: &CoincidenceTally,
    estimator: Estimator,
    subtracted: SettingPair,
) -> Result<ChshResult> {
    let mut e_values = [0.0; 4];
    let mut e_errors = [0.0; 4];
    for (i, row) in tally.rows.iter().enumerate() {
        let est = estimate(row, estimator)?;
        e_values[i] = est.value;
        e_errors[i] = est.std_err;
    }
    Ok(ChshResult {
        e_values,
        e_errors,
        s: chsh_with(e_values, subtracted)?,
        s_err: e_errors.iter().map(|x| x * x).sum::<f64>().sqrt(),
        estimator,
    })
}

/// `(max - min) / (max + min)` of a coincidence-rate curve.
pub fn visibility(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::EmptyInput("visibility curve"));
    }
    let (min, max) = curve
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, r)| (lo.min(r), hi.max(r)));
    if max + min == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    Ok((max - min) / (max + min))
}

// ---------------------------------------------------------------------------
// Histograms

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Lower edge of the first bin.
    pub lo: f64,
    /// Upper edge of the last bin.
    pub hi: f64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.bin_width();
        let lo = self.lo + w * bin as f64;
        let hi = if bin + 1 == self.counts.len() {
            self.hi
        } else {
            self.lo + w * (bin + 1) as f64
        };
        (lo, hi)
    }
}

/// Uniform-bin histogram over `[min, max]` of `values`; the maximum lands in
/// the last bin.
pub fn diff_histogram(values: &[f64], n_bins: usize) -> Result<Histogram> {
    if n_bins < 2 {
        return Err(Error::invalid("n_bins", "n_bins >= 2", n_bins));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput("histogram values"));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut counts = vec![0u64; n_bins];
    let width = (hi - lo) / n_bins as f64;
    for &x in values {
        let bin = if width > 0.0 {
            (((x - lo) / width) as usize).min(n_bins - 1)
        } else {
            0
        };
        counts[bin] += 1;
    }
    Ok(Histogram {
        lo,
        hi,
        counts,
        total: values.len() as u64,
    })
}

/// Fraction of samples with `|x| > max|x| / 2`. For `A sin(theta)` with
/// uniform `theta` this is two thirds.
pub fn tail_fraction(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("tail fraction values"));
    }
    let x_max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let n = values.iter().filter(|x| x.abs() > 0.5 * x_max).count();
    Ok(n as f64 / values.len() as f64)
}

/// Cumulative arcsine law of `x_max * sin(theta)`, `theta` uniform.
pub fn arcsine_cdf(x: f64, x_max: f64) -> f64 {
    0.5 + (x / x_max).clamp(-1.0, 1.0).asin() / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of a histogram against the arcsine law with amplitude
/// `x_max`, conditioned on the histogram range. Bins with an expected count
/// below 5 are pooled into their neighbour.
pub fn arcsine_goodness_of_fit(hist: &Histogram, x_max: f64) -> Result<GoodnessOfFit> {
    if !(x_max > 0.0) {
        return Err(Error::invalid("x_max", "x_max > 0", x_max));
    }
    let mass = arcsine_cdf(hist.hi, x_max) - arcsine_cdf(hist.lo, x_max);
    if !(mass > 0.0) {
        return Err(Error::EmptyInput("arcsine mass over histogram range"));
    }
    let n = hist.total as f64;
    let mut cells = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for bin in 0..hist.n_bins() {
        let (lo, hi) = hist.edges(bin);
        obs += hist.counts[bin] as f64;
        exp += n * (arcsine_cdf(hi, x_max) - arcsine_cdf(lo, x_max)) / mass;
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::EmptyInput("fewer than two usable histogram cells"));
    }
    let chi_square = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    Ok(GoodnessOfFit {
        chi_square,
        dof,
        p_value: chi_square_sf(chi_square, dof),
    })
}

/// Pearson chi-square test of independence for an `r x c` contingency table.
pub fn contingency_chi_square(table: &[Vec<u64>]) -> Result<GoodnessOfFit> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 || table.iter().any(|r| r.len() != cols) {
        return Err(Error::EmptyInput("contingency table must be rectangular, at least 2x2"));
    }
    let total: u64 = table.iter().flatten().sum();
    if total == 0 {
        return Err(Error::EmptyInput("contingency table is empty"));
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let mut chi_square = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = row_sums[i] * col_sums[j] / total as f64;
            if e > 0.0 {
                chi_square += (o as f64 - e).powi(2) / e;
            }
        }
    }
    let live_rows = row_sums.iter().filter(|&&s| s > 0.0).count();
    let live_cols = col_sums.iter().filter(|&&s| s > 0.0).count();
    let dof = live_rows.saturating_sub(1) * live_cols.saturating_sub(1);
    Ok(GoodnessOfFit {
        chi_square,
        dof,
        p_value: if dof == 0 { 1.0 } else { chi_square_sf(chi_square, dof) },
    })
}

fn chi_square_sf(x: f64, dof: usize) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(dof as f64)
        .map(|d| d.sf(x))
        .unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------------
// Two phase-class decomposition of a scan

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseClass {
    /// On `+A sin(theta)`, hidden phase 0.
    Zero,
    /// On `-A sin(theta)`, hidden phase pi.
    Pi,
}

impl PhaseClass {
    pub fn label(self) -> &'static str {
        match self {
            PhaseClass::Zero => "0",
            PhaseClass::Pi => "pi",
        }
    }

    /// Class of a diagnostic hidden phase: whichever of `0`, `pi` is nearer.
    pub fn of_alpha(alpha: PhaseAngle) -> PhaseClass {
        if alpha.radians().abs() <= PI / 2.0 {
            PhaseClass::Zero
        } else {
            PhaseClass::Pi
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub labels: Vec<PhaseClass>,
    /// Curve amplitude `A`, fitted unless supplied.
    pub amplitude: f64,
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
}

impl Decomposition {
    /// Fraction of points, among those passing `keep`, whose label disagrees
    /// with the class of the diagnostic `alphas`.
    pub fn misclassification_rate(
        &self,
        thetas: &[f64],
        alphas: &[PhaseAngle],
        keep: impl Fn(f64) -> bool,
    ) -> f64 {
        let mut n = 0usize;
        let mut wrong = 0usize;
        for ((label, &theta), &alpha) in self.labels.iter().zip(thetas).zip(alphas) {
            if !keep(theta) {
                continue;
            }
            n += 1;
            if *label != PhaseClass::of_alpha(alpha) {
                wrong += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            wrong as f64 / n as f64
        }
    }
}

/// Assigns each `(theta, v_diff)` to the nearer of `+A sin(theta)` and
/// `-A sin(theta)`. For `A > 0` the nearer curve is the one whose sign matches
/// `v_diff * sin(theta)`, independent of `A`, so labels are assigned first and
/// `A` is then the least-squares amplitude given the labels.
pub fn two_curve_decomposition(scan: &[(f64, f64)], amplitude: Option<f64>) -> Result<Decomposition> {
    if scan.is_empty() {
        return Err(Error::EmptyInput("scan"));
    }
    if let Some(a) = amplitude {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::invalid("amplitude", "finite and >= 0", a));
        }
    }
    let signs: Vec<f64> = scan
        .iter()
        .map(|&(th, v)| if v * th.sin() >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    let amplitude = amplitude.unwrap_or_else(|| {
        let (num, den) = scan
            .iter()
            .zip(&signs)
            .fold((0.0, 0.0), |(n, d), (&(th, v), s)| {
                let sn = th.sin();
                (n + s * v * sn, d + sn * sn)
            });
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    });
    let residuals: Vec<f64> = scan
        .iter()
        .zip(&signs)
        .map(|(&(th, v), s)| v - s * amplitude * th.sin())
        .collect();
    let rms_residual = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(Decomposition {
        labels: signs
            .iter()
            .map(|&s| if s > 0.0 { PhaseClass::Zero } else { PhaseClass::Pi })
            .collect(),
        amplitude,
        residuals,
        rms_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn ph(x: f64) -> PhaseAngle {
        PhaseAngle::new(x)
    }

    fn row(n_ready: u64, pp: u64, pm: u64, mp: u64, mm: u64) -> TallyRow {
        TallyRow {
            n_trials: n_ready,
            n_ready,
            n_pp: pp,
            n_pm: pm,
            n_mp: mp,
            n_mm: mm,
        }
    }

    #[test]
    fn singles_examples() {
        assert_eq!(analytic_singles(ph(FRAC_PI_2), ph(0.0)).unwrap(), (0.0, 1.0));
        assert_eq!(analytic_singles(ph(FRAC_PI_2), ph(PI)).unwrap(), (1.0, 0.0));
        assert!(matches!(
            analytic_singles(ph(0.0), ph(0.0)),
            Err(Error::UndefinedAngle(_))
        ));
        assert!(analytic_singles(ph(PI), ph(0.0)).is_err());
    }

    #[test]
    fn coincidence_examples() {
        for tb in [0.1, 1.0, 2.0, 3.0] {
            assert_eq!(analytic_coincidence(ph(FRAC_PI_2), ph(tb)).unwrap()[0], 0.5);
            assert_eq!(analytic_coincidence(ph(-FRAC_PI_2), ph(tb)).unwrap()[0], 0.0);
            assert_eq!(
                analytic_coincidence(ph(FRAC_PI_4), ph(tb)).unwrap(),
                analytic_coincidence(ph(FRAC_PI_2), ph(tb)).unwrap()
            );
        }
        assert!(analytic_coincidence(ph(FRAC_PI_2), ph(0.0)).is_err());
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(analytic_correlation(ph(FRAC_PI_2), ph(FRAC_PI_2)).unwrap(), 1.0);
        assert_eq!(analytic_correlation(ph(FRAC_PI_2), ph(-FRAC_PI_2)).unwrap(), -1.0);
        assert_eq!(analytic_correlation(ph(FRAC_PI_4), ph(3.0 * FRAC_PI_4)).unwrap(), 1.0);
    }

    #[test]
    fn fair_estimator_examples() {
        assert_eq!(correlation_fair(&row(100, 50, 0, 0, 50)).unwrap(), 1.0);
        assert_eq!(correlation_fair(&row(100, 25, 0, 0, 25)).unwrap(), 0.5);
        assert_eq!(correlation_fair(&row(100, 25, 25, 25, 25)).unwrap(), 0.0);
        assert!(matches!(
            correlation_fair(&row(0, 0, 0, 0, 0)),
            Err(Error::EmptyDenominator(_))
        ));
    }

    #[test]
    fn postselected_estimator_examples() {
        assert_eq!(correlation_postselected(&row(100, 25, 0, 0, 25)).unwrap(), 1.0);
        assert_eq!(correlation_postselected(&row(100, 25, 25, 25, 25)).unwrap(), 0.0);
        assert!((correlation_postselected(&row(100, 40, 10, 10, 40)).unwrap() - 0.6).abs() < 1e-15);
        assert!(correlation_postselected(&row(100, 0, 0, 0, 0)).is_err());
    }

    #[test]
    fn estimate_errors() {
        // products: 25 of +1, 25 of -1... fair: 50 nonzero of 100, mean 0
        let e = estimate(&row(100, 25, 25, 0, 0), Estimator::FairNAB).unwrap();
        assert_eq!(e.value, 0.0);
        assert!((e.std_err - (0.5f64 / 100.0).sqrt()).abs() < 1e-15);
        let e = estimate(&row(100, 40, 10, 10, 40), Estimator::PostSelected).unwrap();
        assert!((e.std_err - ((1.0 - 0.36f64) / 100.0).sqrt()).abs() < 1e-15);
        let e = estimate(&row(10, 10, 0, 0, 0), Estimator::PostSelected).unwrap();
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn chsh_examples() {
        assert_eq!(chsh(1.0, -1.0, 1.0, 1.0).unwrap(), 4.0);
        assert_eq!(chsh(0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(chsh(1.1, 0.0, 0.0, 0.0), Err(Error::CorrelationDomain(_))));
        assert!(chsh(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert_eq!(chsh_with([1.0, 1.0, -1.0, 1.0], SettingPair::APrimeB).unwrap(), 4.0);

        let (a, ap, b, bp) = (FRAC_PI_2, FRAC_PI_4, FRAC_PI_2, -FRAC_PI_2);
        let e = |x, y| analytic_correlation(ph(x), ph(y)).unwrap();
        assert_eq!(chsh(e(a, b), e(a, bp), e(ap, b), e(ap, bp)).unwrap(), 2.0);
    }

    #[test]
    fn visibility_examples() {
        let step: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, if i < 4 { 0.0 } else { 0.5 })).collect();
        assert_eq!(visibility(&step).unwrap(), 1.0);
        assert_eq!(visibility(&[(0.0, 0.3), (1.0, 0.3)]).unwrap(), 0.0);
        assert!((visibility(&[(0.0, 0.1), (1.0, 1.0)]).unwrap() - 9.0 / 11.0).abs() < 1e-15);
        assert!(matches!(visibility(&[(0.0, 0.0), (1.0, 0.0)]), Err(Error::DegenerateCurve)));
    }

    #[test]
    fn histogram_basics() {
        let h = diff_histogram(&[2.0; 10], 5).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.total, 10);

        let h = diff_histogram(&[0.0, 0.5, 1.0, 1.0], 2).unwrap();
        assert_eq!(h.counts, vec![1, 3]);
        assert_eq!(h.counts.iter().sum::<u64>(), h.total);
        assert!(diff_histogram(&[], 4).is_err());
        assert!(diff_histogram(&[1.0], 1).is_err());
    }

    #[test]
    fn tail_fraction_counts_strictly_above_half() {
        assert_eq!(tail_fraction(&[-2.0, 1.0, 1.5, 0.2]).unwrap(), 0.5);
    }

    #[test]
    fn contingency_hand_computed() {
        // row sums 30, 70; col sums 40, 60; expected 12,18,28,42
        let t = vec![vec![20, 10], vec![20, 50]];
        let g = contingency_chi_square(&t).unwrap();
        let expected = 64.0 / 12.0 + 64.0 / 18.0 + 64.0 / 28.0 + 64.0 / 42.0;
        assert!((g.chi_square - expected).abs() < 1e-12);
        assert_eq!(g.dof, 1);
        assert!(g.p_value < 1e-3);
    }

    #[test]
    fn decomposition_of_exact_curves() {
        let scan: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let th = 0.1 + i as f64 * 0.2;
                let s = if i % 3 == 0 { -1.0 } else { 1.0 };
                (th, s * 2.0 * th.sin())
            })
            .collect();
        let d = two_curve_decomposition(&scan, None).unwrap();
        assert!((d.amplitude - 2.0).abs() < 1e-12);
        assert!(d.rms_residual < 1e-12);
        for (i, l) in d.labels.iter().enumerate() {
            let expected = if i % 3 == 0 { PhaseClass::Pi } else { PhaseClass::Zero };
            assert_eq!(*l, expected);
        }
        assert!(two_curve_decomposition(&[], None).is_err());
    }
}
