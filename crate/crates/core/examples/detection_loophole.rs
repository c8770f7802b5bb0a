//! Raising the discriminator thresholds discards weak pulses. The CHSH value
//! computed from the surviving coincidences climbs past 2, while the value
//! normalised by all event-ready pairs does not.

use std::f64::consts::PI;

use homodyne_bell::commands::{linear_grid, simulate_sweep, SweepParameter};
use homodyne_bell::detector::DetectorConfig;
use homodyne_bell::config::RunConfig;
use homodyne_bell::runner::{Apparatus, ChannelSetting, ExperimentConfig, SettingsSchedule};
use homodyne_bell::source::{AlphaMode, AmplitudeDistribution, SourceConfig};
use homodyne_bell::stats::SettingPair;

fn main() -> homodyne_bell::Result<()> {
    let source = SourceConfig {
        alpha_mode: AlphaMode::Uniform,
        amplitude_distribution: AmplitudeDistribution::Fixed,
        ..Default::default()
    };
    let cfg = RunConfig {
        experiment: ExperimentConfig {
            apparatus: Apparatus {
                source,
                detector_a: DetectorConfig::default(),
                detector_b: DetectorConfig::default(),
            },
            schedule: SettingsSchedule::new(
                ChannelSetting::new(0.0),
                ChannelSetting::new(PI / 2.0),
                ChannelSetting::new(PI / 4.0),
                ChannelSetting::new(3.0 * PI / 4.0),
            ),
        },
        n_trials: 100_000,
        seed: 6,
        subtracted_pair: SettingPair::ABPrime,
        output_dir: "out".into(),
    };
    let grid = linear_grid(0.95, 1.30, 8);
    let rows = simulate_sweep(&cfg, SweepParameter::DiscriminatorThreshold, &grid)?;
    println!("{:>9} {:>9} {:>9} {:>9}", "threshold", "accepted", "S_fair", "S_post");
    for r in rows {
        let s = |x: Option<homodyne_bell::stats::ChshResult>| x.map_or(f64::NAN, |c| c.s);
        println!(
            "{:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            r.value,
            r.accepted_fraction,
            s(r.fair),
            s(r.post_selected)
        );
    }
    Ok(())
}
