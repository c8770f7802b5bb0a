//! Port intensities of a balanced homodyne detector as the relative phase
//! between test beam and local oscillator is turned, checked against a
//! time-domain average of the real fields.
//!
//! ```text
//! cargo run --example optics_homodyne
//! ```

use std::f64::consts::PI;

use homodyne_bell::optics::{
    homodyne_difference, output_intensities, real_wave_oracle, FieldAmplitude, PhaseAngle,
};

fn main() -> homodyne_bell::Result<()> {
    let test = FieldAmplitude::new(1.0)?;
    let lo = FieldAmplitude::new(2.0)?;

    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "theta", "I_r", "I_t", "I_r-I_t", "oracle");
    for k in -4..=4 {
        let theta = PhaseAngle::new(k as f64 * PI / 4.0);
        let p = output_intensities(test, lo, theta);
        let oracle = real_wave_oracle(test, lo, theta, 256)?;
        println!(
            "{:>8.4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            theta.radians(),
            p.reflected,
            p.transmitted,
            homodyne_difference(test, lo, theta),
            oracle
        );
    }
    Ok(())
}
