use std::f64::consts::PI;

use homodyne_bell::detector::{
    classify, digitize, discriminate, read_homodyne, DetectorConfig, HomodyneReading, Outcome,
};
use homodyne_bell::optics::{output_intensities, FieldAmplitude, PhaseAngle};
use homodyne_bell::streams::physics_stream;
use proptest::prelude::*;

fn ports(e: f64, l: f64, theta: f64) -> homodyne_bell::optics::PortIntensities {
    output_intensities(
        FieldAmplitude::new(e).unwrap(),
        FieldAmplitude::new(l).unwrap(),
        PhaseAngle::new(theta),
    )
}

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![1e-300..1e6f64, -1e6..-1e-300f64]
}

proptest! {
    #[test]
    fn digitizer_is_antisymmetric(v in nonzero(), seed in any::<u64>()) {
        let mut rng = physics_stream(seed, 0);
        prop_assert_eq!(digitize(-v, &mut rng), digitize(v, &mut rng).flipped());
    }

    #[test]
    fn noiseless_outcome_is_the_sign_of_sine(
        e in 0.01..5.0f64,
        l in 0.01..5.0f64,
        theta in -PI..=PI,
        gain in 0.1..10.0f64,
    ) {
        prop_assume!(theta.sin().abs() > 1e-6);
        let cfg = DetectorConfig { gain, ..Default::default() };
        let mut rng = physics_stream(0, 0);
        let reading = read_homodyne(ports(e, l, theta), &cfg, &mut rng);
        let expected = if theta.sin() > 0.0 { Outcome::Plus } else { Outcome::Minus };
        prop_assert_eq!(classify(&reading, &cfg, &mut rng), expected);
    }

    #[test]
    fn vanishing_pedestal_threshold_reduces_to_sign_rule(
        e in 0.01..5.0f64,
        l in 0.01..5.0f64,
        theta in -PI..=PI,
    ) {
        prop_assume!(theta.sin().abs() > 1e-6);
        let cfg = DetectorConfig {
            discriminator_threshold: Some(1e-12),
            subtract_pedestal: true,
            ..Default::default()
        };
        let mut rng = physics_stream(1, 0);
        let reading = read_homodyne(ports(e, l, theta), &cfg, &mut rng);
        let d = discriminate(&reading, &cfg).unwrap();
        prop_assert!(d.is_click());
        prop_assert_eq!(d, digitize(reading.v_diff, &mut rng));
    }

    #[test]
    fn raw_threshold_between_ports_reduces_to_sign_rule(
        e in 0.01..5.0f64,
        l in 0.01..5.0f64,
        theta in -PI..=PI,
        frac in 0.001..1.0f64,
    ) {
        prop_assume!(theta.sin().abs() > 1e-6);
        let p = ports(e, l, theta);
        let (lo, hi) = (p.reflected.min(p.transmitted), p.reflected.max(p.transmitted));
        let cfg = DetectorConfig {
            discriminator_threshold: Some(lo + frac * (hi - lo)),
            ..Default::default()
        };
        let reading = HomodyneReading::new(p.reflected, p.transmitted);
        let mut rng = physics_stream(2, 0);
        prop_assert_eq!(discriminate(&reading, &cfg).unwrap(), digitize(reading.v_diff, &mut rng));
        let below = DetectorConfig { discriminator_threshold: Some(lo * 0.999), ..Default::default() };
        prop_assert_eq!(discriminate(&reading, &below).unwrap(), Outcome::Null);
    }

    #[test]
    fn scaling_gain_and_noise_together_keeps_outcomes(
        e in 0.0..3.0f64,
        l in 0.0..3.0f64,
        theta in -PI..=PI,
        sigma in 0.0..2.0f64,
        k in 0.01..100.0f64,
        seed in any::<u64>(),
    ) {
        let base = DetectorConfig { noise_sigma: sigma, ..Default::default() };
        let scaled = DetectorConfig { gain: k, noise_sigma: k * sigma, ..Default::default() };
        let p = ports(e, l, theta);
        for trial in 0..32 {
            let mut r1 = physics_stream(seed, trial);
            let mut r2 = physics_stream(seed, trial);
            let v1 = read_homodyne(p, &base, &mut r1);
            let v2 = read_homodyne(p, &scaled, &mut r2);
            prop_assume!(v1.v_diff.abs() > 1e-9 * (1.0 + sigma));
            prop_assert_eq!(classify(&v1, &base, &mut r1), classify(&v2, &scaled, &mut r2));
        }
    }
}
