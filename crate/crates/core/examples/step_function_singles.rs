//! Digitised single-channel outcome as a function of the applied phase for
//! each hidden phase class. Without noise the outcome is a square wave, and
//! the two classes are mirror images.

use std::f64::consts::PI;

use homodyne_bell::detector::DetectorConfig;
use homodyne_bell::optics::PhaseAngle;
use homodyne_bell::runner::{run_trial, Apparatus, ChannelSetting};
use homodyne_bell::source::{AlphaMode, SourceConfig};
use homodyne_bell::stats::analytic_singles;
use homodyne_bell::streams::physics_stream;

fn main() -> homodyne_bell::Result<()> {
    println!("{:>8} {:>8} {:>8} {:>10}", "theta", "alpha=0", "alpha=pi", "P(+) mix");
    for k in 0..24 {
        let theta = -PI + (k as f64 + 0.5) * 2.0 * PI / 24.0;
        let setting = ChannelSetting::new(theta);
        let mut row = Vec::new();
        for alpha in [PhaseAngle::ZERO, PhaseAngle::PI] {
            let apparatus = Apparatus {
                source: SourceConfig {
                    alpha_mode: AlphaMode::Fixed(alpha),
                    ..Default::default()
                },
                detector_a: DetectorConfig::default(),
                detector_b: DetectorConfig::default(),
            };
            let rec = run_trial(&apparatus, 0, (0, &setting), (0, &setting), &mut physics_stream(0, k));
            row.push(rec.outcome_a.value());
        }
        let (_, p0) = analytic_singles(PhaseAngle::new(theta), PhaseAngle::ZERO)?;
        let (_, p1) = analytic_singles(PhaseAngle::new(theta), PhaseAngle::PI)?;
        println!("{theta:>8.3} {:>8} {:>8} {:>10.2}", row[0], row[1], 0.5 * (p0 + p1));
    }
    Ok(())
}
