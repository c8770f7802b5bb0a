//! Classical wave mixing at a lossless 50-50 beamsplitter.
//!
//! The test beam `E cos(phi)` and the local oscillator `E_L cos(phi + theta)`
//! enter a balanced beamsplitter. Each reflection adds a quarter-period delay,
//! so the two output intensities are
//!
//! ```text
//! I_r = (E^2 + E_L^2 + 2 E E_L sin theta) / 2
//! I_t = (E^2 + E_L^2 - 2 E E_L sin theta) / 2
//! ```
//!
//! and the homodyne difference is `2 E E_L sin theta`. [`real_wave_oracle`]
//! recomputes that difference by sampling the real-valued fields over one
//! optical period, without any complex arithmetic.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative, finite field amplitude in arbitrary field units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FieldAmplitude(f64);

impl FieldAmplitude {
    pub const ZERO: FieldAmplitude = FieldAmplitude(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(FieldAmplitude(value))
        } else {
            Err(Error::invalid("field amplitude", "finite and >= 0", value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Intensity carried by this amplitude (field squared).
    #[inline]
    pub fn intensity(self) -> f64 {
        self.0 * self.0
    }
}

impl TryFrom<f64> for FieldAmplitude {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        FieldAmplitude::new(value)
    }
}

impl From<FieldAmplitude> for f64 {
    fn from(a: FieldAmplitude) -> f64 {
        a.0
    }
}

/// A phase in radians, always stored reduced to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub const ZERO: PhaseAngle = PhaseAngle(0.0);
    pub const PI: PhaseAngle = PhaseAngle(PI);

    /// Reduces `radians` into `(-pi, pi]`. Values already inside the interval
    /// are kept bit-for-bit.
    pub fn new(radians: f64) -> Self {
        PhaseAngle(reduce(radians))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Exactly zero at the half turn, where `f64::sin(PI)` would leave a
    /// rounding residue of order `1e-16`.
    #[inline]
    pub fn sin(self) -> f64 {
        if self.0 == PI {
            0.0
        } else {
            self.0.sin()
        }
    }
}

impl From<f64> for PhaseAngle {
    fn from(radians: f64) -> Self {
        PhaseAngle::new(radians)
    }
}

impl From<PhaseAngle> for f64 {
    fn from(p: PhaseAngle) -> f64 {
        p.0
    }
}

impl fmt::Display for PhaseAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

fn reduce(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Intensities at the two output ports of the homodyne beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortIntensities {
    pub reflected: f64,
    pub transmitted: f64,
}

impl PortIntensities {
    pub fn total(&self) -> f64 {
        self.reflected + self.transmitted
    }

    /// Constant half-sum `(E^2 + E_L^2) / 2` common to both ports.
    pub fn pedestal(&self) -> f64 {
        0.5 * self.total()
    }
}

pub fn output_intensities(
    test: FieldAmplitude,
    lo: FieldAmplitude,
    theta: PhaseAngle,
) -> PortIntensities {
    let base = test.intensity() + lo.intensity();
    let beat = homodyne_difference(test, lo, theta);
    // |beat| <= base by AM-GM, clamp only guards the last ulp
    PortIntensities {
        reflected: (0.5 * (base + beat)).max(0.0),
        transmitted: (0.5 * (base - beat)).max(0.0),
    }
}

/// `2 E E_L sin(theta)`.
#[inline]
pub fn homodyne_difference(test: FieldAmplitude, lo: FieldAmplitude, theta: PhaseAngle) -> f64 {
    2.0 * (test.value() * lo.value()) * theta.sin()
}

/// Time-averaged port intensity difference computed from the real fields
///
/// ```text
/// E_r(phi) = (-E sin phi + E_L cos(phi + theta)) / sqrt 2
/// E_t(phi) = ( E cos phi - E_L sin(phi + theta)) / sqrt 2
/// ```
///
/// sampled at `n_samples` equally spaced points of one period. A cycle
/// average of `cos^2` is one half, so the mean-square difference is doubled
/// to put it on the same scale as [`homodyne_difference`].
pub fn real_wave_oracle(
    test: FieldAmplitude,
    lo: FieldAmplitude,
    theta: PhaseAngle,
    n_samples: usize,
) -> Result<f64> {
    if n_samples < 8 || !n_samples.is_multiple_of(4) {
        return Err(Error::invalid(
            "n_samples",
            "at least 8 and a multiple of 4",
            n_samples,
        ));
    }
    let (e, el, th) = (test.value(), lo.value(), theta.radians());
    let step = TAU / n_samples as f64;
    let (mut sum_r, mut sum_t) = (0.0, 0.0);
    for k in 0..n_samples {
        let phi = k as f64 * step;
        let er = FRAC_1_SQRT_2 * (-e * phi.sin() + el * (phi + th).cos());
        let et = FRAC_1_SQRT_2 * (e * phi.cos() - el * (phi + th).sin());
        sum_r += er * er;
        sum_t += et * et;
    }
    Ok(2.0 * (sum_r - sum_t) / n_samples as f64)
}
