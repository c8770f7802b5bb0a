use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use homodyne_bell::detector::{DetectorConfig, Outcome};
use homodyne_bell::optics::PhaseAngle;
use homodyne_bell::runner::{
    effective_phase, run_experiment, run_indexed_trial, scan_phase, Apparatus, Arm,
    ChannelSetting, ExperimentConfig, Selection, SettingsSchedule,
};
use homodyne_bell::source::{AlphaMode, AmplitudeDistribution, PairEvent, SourceConfig};
use proptest::prelude::*;

fn experiment(source: SourceConfig, noise: f64, angles: [f64; 4]) -> ExperimentConfig {
    let detector = DetectorConfig {
        noise_sigma: noise,
        ..Default::default()
    };
    let [a, ap, b, bp] = angles.map(ChannelSetting::new);
    ExperimentConfig {
        apparatus: Apparatus {
            source,
            detector_a: detector.clone(),
            detector_b: detector,
        },
        schedule: SettingsSchedule::new(a, ap, b, bp),
    }
}

fn busy_experiment() -> ExperimentConfig {
    let source = SourceConfig {
        alpha_mode: AlphaMode::Uniform,
        sigma_omega: 0.3,
        pd_threshold: 0.05,
        pd_efficiency: 0.9,
        ..Default::default()
    };
    let mut cfg = experiment(source, 0.2, [0.1, 1.2, -0.7, 2.5]);
    cfg.schedule.b.path_delay = 1.5;
    cfg.schedule.drift_a = 1e-4;
    cfg
}

#[test]
fn repeated_runs_are_identical() {
    let cfg = busy_experiment();
    let first = run_experiment(&cfg, 10, 42).unwrap();
    let second = run_experiment(&cfg, 10, 42).unwrap();
    assert_eq!(first, second);
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&second).unwrap()
    );
    assert_ne!(first.records, run_experiment(&cfg, 10, 43).unwrap().records);
}

#[test]
fn parallel_run_matches_sequential_replay() {
    let cfg = busy_experiment();
    let set = run_experiment(&cfg, 2_000, 7).unwrap();
    for (i, rec) in set.records.iter().enumerate() {
        assert_eq!(rec.trial_id, i as u64);
        let replay = run_indexed_trial(&cfg, 7, rec.trial_id, rec.setting_a_index, rec.setting_b_index);
        assert_eq!(&replay, rec);
    }
}

#[test]
fn random_selection_balances_the_four_pairs() {
    let cfg = experiment(SourceConfig::default(), 0.0, [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4]);
    let set = run_experiment(&cfg, 100_000, 2024).unwrap();
    let mut counts = [0u64; 4];
    for r in &set.records {
        counts[r.pair_index()] += 1;
    }
    for c in counts {
        assert!((24_500..=25_500).contains(&c), "{counts:?}");
    }
}

#[test]
fn arm_a_never_sees_arm_b_setting() {
    let cfg = busy_experiment();
    let mut other = cfg.clone();
    other.schedule.b.theta_set = PhaseAngle::new(2.9);
    other.schedule.b_prime.path_delay = 4.0;
    other.apparatus.detector_b.noise_sigma = 3.0;
    let set = run_experiment(&cfg, 3_000, 99).unwrap();
    for rec in &set.records {
        for (c, j) in [(&cfg, 1 - rec.setting_b_index), (&other, rec.setting_b_index), (&other, 1 - rec.setting_b_index)] {
            let replay = run_indexed_trial(c, 99, rec.trial_id, rec.setting_a_index, j);
            assert_eq!(replay.ready_a, rec.ready_a);
            assert_eq!(replay.reading_a, rec.reading_a);
            assert_eq!(replay.outcome_a, rec.outcome_a);
        }
    }
}

#[test]
fn equal_settings_correlate_perfectly() {
    let mut cfg = experiment(SourceConfig::default(), 0.0, [FRAC_PI_2, 0.0, FRAC_PI_2, 0.0]);
    cfg.schedule.selection = Selection::FixedPair(0, 0);
    let set = run_experiment(&cfg, 10_000, 1).unwrap();
    assert!(set.records.iter().all(|r| r.outcome_a == r.outcome_b && r.outcome_a.is_click()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_generic_settings_correlate_perfectly(theta in -PI..PI, seed in any::<u64>()) {
        prop_assume!(theta.sin().abs() > 1e-9);
        let mut cfg = experiment(SourceConfig::default(), 0.0, [theta, 0.0, theta, 0.0]);
        cfg.schedule.selection = Selection::FixedPair(0, 0);
        let set = run_experiment(&cfg, 200, seed).unwrap();
        prop_assert!(set.records.iter().all(|r| r.outcome_a == r.outcome_b));
    }
}

#[test]
fn path_delay_phase_tracks_frequency_offset() {
    let setting = ChannelSetting::new(0.0).with_delay(1.0);
    let pair = |omega: f64| PairEvent {
        alpha: PhaseAngle::ZERO,
        omega,
        amp_a: homodyne_bell::optics::FieldAmplitude::new(1.0).unwrap(),
        amp_b: homodyne_bell::optics::FieldAmplitude::new(1.0).unwrap(),
    };
    let delta = 0.37;
    let shifted = effective_phase(&setting, &pair(1.0 + delta)).radians();
    let nominal = effective_phase(&setting, &pair(1.0)).radians();
    assert!((shifted - nominal - delta).abs() < 1e-12);
}

fn fixed_source(alpha_mode: AlphaMode) -> SourceConfig {
    SourceConfig {
        alpha_mode,
        amplitude_distribution: AmplitudeDistribution::Fixed,
        ..Default::default()
    }
}

#[test]
fn single_phase_class_scan_traces_one_sine() {
    let cfg = experiment(fixed_source(AlphaMode::Fixed(PhaseAngle::ZERO)), 0.0, [0.0; 4]);
    let a = 2.0 * 0.9f64.sqrt();
    for arm in [Arm::A, Arm::B] {
        let pts = scan_phase(&cfg, arm, 0.0, 2.0 * TAU, 401, 3).unwrap();
        assert_eq!(pts.first().unwrap().theta, 0.0);
        assert_eq!(pts.last().unwrap().theta, 2.0 * TAU);
        for p in pts {
            assert!((p.v_diff - a * p.theta.sin()).abs() < 1e-12, "theta {}", p.theta);
        }
    }
}

#[test]
fn noisy_scan_pinches_at_multiples_of_pi() {
    let cfg = experiment(fixed_source(AlphaMode::Binary), 0.1, [0.0; 4]);
    let pts = scan_phase(&cfg, Arm::A, 0.0, 2.0 * TAU, 4_000, 4).unwrap();
    let spread = |near: &dyn Fn(f64) -> bool| {
        let v: Vec<f64> = pts.iter().filter(|p| near(p.theta)).map(|p| p.v_diff.abs()).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let pinch = spread(&|t: f64| t.sin().abs() < 0.05);
    let belly = spread(&|t: f64| t.sin().abs() > 0.95);
    assert!(pinch < 0.2 && belly > 1.5, "pinch {pinch}, belly {belly}");
}

#[test]
fn binary_scan_never_leaves_the_two_curves() {
    let cfg = experiment(fixed_source(AlphaMode::Binary), 0.0, [0.0; 4]);
    let a = 2.0 * 0.9f64.sqrt();
    let pts = scan_phase(&cfg, Arm::B, -PI, 3.0 * PI, 777, 5).unwrap();
    let mut seen = [false; 2];
    for p in pts {
        let s = p.theta.sin();
        let on_zero = (p.v_diff - a * s).abs() < 1e-12;
        let on_pi = (p.v_diff + a * s).abs() < 1e-12;
        assert!(on_zero || on_pi);
        if s.abs() > 0.1 {
            seen[on_pi as usize] = true;
        }
    }
    assert_eq!(seen, [true, true]);
}

#[test]
fn fixed_phase_quarter_turn_always_clicks_plus() {
    let mut cfg = experiment(SourceConfig {
        alpha_mode: AlphaMode::Fixed(PhaseAngle::ZERO),
        ..Default::default()
    }, 0.0, [FRAC_PI_4, FRAC_PI_4, FRAC_PI_4, FRAC_PI_4]);
    cfg.schedule.selection = Selection::RandomPerTrial;
    let set = run_experiment(&cfg, 5_000, 12).unwrap();
    assert!(set.records.iter().all(|r| r.outcome_a == Outcome::Plus));
}

#[test]
fn noiseless_half_turn_is_settled_by_a_fair_coin() {
    let mut cfg = experiment(SourceConfig::default(), 0.0, [FRAC_PI_2, 0.0, 0.0, 0.0]);
    cfg.schedule.selection = Selection::FixedPair(0, 0);
    let set = run_experiment(&cfg, 40_000, 13).unwrap();
    for class in [PhaseAngle::ZERO, PhaseAngle::PI] {
        let outcomes: Vec<Outcome> = set.records.iter().filter(|r| r.alpha == class).map(|r| r.outcome_b).collect();
        let plus = outcomes.iter().filter(|&&o| o == Outcome::Plus).count() as f64 / outcomes.len() as f64;
        assert!((plus - 0.5).abs() < 0.015, "alpha {class}: P(+) = {plus}");
    }
}
