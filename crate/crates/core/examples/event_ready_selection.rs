//! Tapping a few percent of each pulse and keeping only pulses whose tapped
//! intensity clears a threshold selects the strongest emissions.

use homodyne_bell::source::{event_ready, generate_pair, rayleigh_acceptance, tap_split, SourceConfig};
use homodyne_bell::streams::physics_stream;

fn main() -> homodyne_bell::Result<()> {
    let n = 200_000u64;
    println!("{:>10} {:>10} {:>10} {:>12}", "threshold", "accepted", "expected", "mean amp");
    for threshold in [0.0, 0.02, 0.05, 0.1, 0.2, 0.4] {
        let cfg = SourceConfig {
            pd_threshold: threshold,
            ..Default::default()
        };
        let (mut kept, mut amp_sum) = (0u64, 0.0);
        for trial in 0..n {
            let mut rng = physics_stream(1, trial);
            let pair = generate_pair(&cfg, &mut rng);
            let tap = tap_split(pair.amp_a, cfg.tap_reflectance)?;
            if event_ready(tap.tapped_intensity, &cfg, &mut rng) {
                kept += 1;
                amp_sum += pair.amp_a.value();
            }
        }
        println!(
            "{threshold:>10.3} {:>10.4} {:>10.4} {:>12.4}",
            kept as f64 / n as f64,
            rayleigh_acceptance(cfg.amplitude_scale, cfg.tap_reflectance, threshold),
            amp_sum / kept as f64
        );
    }
    Ok(())
}
