use std::f64::consts::{FRAC_PI_2, PI};

use homodyne_bell::commands::{simulate_run, simulate_scan, simulate_sweep, SweepParameter};
use homodyne_bell::config::RunConfig;
use homodyne_bell::detector::DetectorConfig;
use homodyne_bell::optics::PhaseAngle;
use homodyne_bell::runner::{
    run_experiment, Apparatus, Arm, ChannelSetting, ExperimentConfig, Selection, SettingsSchedule,
};
use homodyne_bell::source::{AlphaMode, AmplitudeDistribution, SourceConfig};
use homodyne_bell::stats::{
    analytic_coincidence, analytic_correlation, CoincidenceTally, SettingPair,
};
use proptest::prelude::*;

fn defined_angle() -> impl Strategy<Value = f64> {
    (-PI..PI).prop_filter("sin must not vanish", |t| t.sin().abs() > 1e-9)
}

fn run_config(source: SourceConfig, detector: DetectorConfig, angles: [f64; 4], n_trials: u64, seed: u64) -> RunConfig {
    let [a, ap, b, bp] = angles.map(ChannelSetting::new);
    RunConfig {
        experiment: ExperimentConfig {
            apparatus: Apparatus {
                source,
                detector_a: detector.clone(),
                detector_b: detector,
            },
            schedule: SettingsSchedule::new(a, ap, b, bp),
        },
        n_trials,
        seed,
        subtracted_pair: SettingPair::ABPrime,
        output_dir: "unused".into(),
    }
}

proptest! {
    #[test]
    fn coincidence_probabilities_sum_to_one(a in defined_angle(), b in defined_angle()) {
        let p = analytic_coincidence(PhaseAngle::new(a), PhaseAngle::new(b)).unwrap();
        prop_assert_eq!(p.iter().sum::<f64>(), 1.0);
        prop_assert!(p.iter().all(|&x| x == 0.0 || x == 0.5));
    }

    #[test]
    fn correlation_factorizes_through_quarter_turn(a in defined_angle(), b in defined_angle()) {
        let (ta, tb, q) = (PhaseAngle::new(a), PhaseAngle::new(b), PhaseAngle::new(FRAC_PI_2));
        let direct = analytic_correlation(ta, tb).unwrap();
        let split = analytic_correlation(ta, q).unwrap() * analytic_correlation(q, tb).unwrap();
        prop_assert_eq!(direct, split);
    }
}

#[test]
fn multiples_of_pi_are_undefined() {
    for bad in [0.0, PI, -PI] {
        assert!(analytic_coincidence(PhaseAngle::new(bad), PhaseAngle::new(1.0)).is_err());
        assert!(analytic_correlation(PhaseAngle::new(1.0), PhaseAngle::new(bad)).is_err());
    }
}

#[test]
fn monte_carlo_frequencies_match_closed_form() {
    let pairs = [(FRAC_PI_2, 0.4), (FRAC_PI_2, -2.0), (-0.3, 2.8), (1.1, -1.1), (2.0, 0.9)];
    for (k, &(ta, tb)) in pairs.iter().enumerate() {
        let mut cfg = run_config(SourceConfig::default(), DetectorConfig::default(), [ta, 0.0, tb, 0.0], 100_000, k as u64);
        cfg.experiment.schedule.selection = Selection::FixedPair(0, 0);
        let set = run_experiment(&cfg.experiment, cfg.n_trials, cfg.seed).unwrap();
        let row = *CoincidenceTally::from_records(&set.records).row(SettingPair::AB);
        let n = row.n_ready as f64;
        let expected = analytic_coincidence(PhaseAngle::new(ta), PhaseAngle::new(tb)).unwrap();
        for (count, p) in [row.n_pp, row.n_pm, row.n_mp, row.n_mm].into_iter().zip(expected) {
            let freq = count as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt();
            assert!((freq - p).abs() <= 3.0 * se, "({ta}, {tb}): {freq} vs {p}");
        }
    }
}

#[test]
fn rotations_with_equal_difference_disagree() {
    let p = |a: f64, b: f64| analytic_coincidence(PhaseAngle::new(a), PhaseAngle::new(b)).unwrap()[0];
    assert_ne!(p(FRAC_PI_2, FRAC_PI_2 + 2.0), p(PI / 4.0, PI / 4.0 + 2.0));
    assert_ne!(p(-FRAC_PI_2, -FRAC_PI_2 + 1.0), p(-0.2, 0.8));
}

fn any_alpha() -> impl Strategy<Value = AlphaMode> {
    prop_oneof![Just(AlphaMode::Binary), Just(AlphaMode::Uniform)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fair_chsh_respects_the_local_bound(
        alpha_mode in any_alpha(),
        noise in prop_oneof![Just(0.0), 0.01..1.0f64],
        threshold in proptest::option::of(0.1..2.0f64),
        pedestal in any::<bool>(),
        pd_threshold in 0.0..0.3f64,
        sigma_omega in 0.0..1.0f64,
        angles in proptest::array::uniform4(-PI..PI),
        delay in 0.0..3.0f64,
        seed in any::<u64>(),
    ) {
        let source = SourceConfig { alpha_mode, pd_threshold, sigma_omega, ..Default::default() };
        let detector = DetectorConfig {
            noise_sigma: noise,
            discriminator_threshold: threshold,
            subtract_pedestal: pedestal,
            ..Default::default()
        };
        let mut cfg = run_config(source, detector, angles, 20_000, seed);
        cfg.experiment.schedule.b.path_delay = delay;
        let fair = simulate_run(&cfg).unwrap().fair.unwrap();
        prop_assert!(fair.s.abs() <= 2.0 + 5.0 * fair.s_err + 1e-12, "S = {} +/- {}", fair.s, fair.s_err);
    }
}

#[test]
fn post_selection_grows_with_threshold_while_fair_stays_bounded() {
    let source = SourceConfig {
        alpha_mode: AlphaMode::Uniform,
        amplitude_distribution: AmplitudeDistribution::Fixed,
        ..Default::default()
    };
    let cfg = run_config(source, DetectorConfig::default(), [0.0, FRAC_PI_2, PI / 4.0, 3.0 * PI / 4.0], 50_000, 17);
    let grid = [0.95, 1.05, 1.15, 1.25];
    let rows = simulate_sweep(&cfg, SweepParameter::DiscriminatorThreshold, &grid).unwrap();
    let post: Vec<f64> = rows.iter().map(|r| r.post_selected.as_ref().unwrap().s).collect();
    assert!(post.windows(2).all(|w| w[1] >= w[0]), "{post:?}");
    assert!(*post.last().unwrap() > 2.0);
    let accepted: Vec<f64> = rows.iter().map(|r| r.accepted_fraction).collect();
    assert!(accepted.windows(2).all(|w| w[1] <= w[0]), "{accepted:?}");
    for r in &rows {
        let f = r.fair.as_ref().unwrap();
        assert!(f.s <= 2.0 + 5.0 * f.s_err);
    }
}

#[test]
fn continuous_hidden_phase_smears_the_two_curves() {
    let mk = |alpha_mode| {
        let source = SourceConfig {
            alpha_mode,
            amplitude_distribution: AmplitudeDistribution::Fixed,
            ..Default::default()
        };
        run_config(source, DetectorConfig::default(), [0.0; 4], 1, 21)
    };
    let binary = simulate_scan(&mk(AlphaMode::Binary), Arm::A, 0.0, 4.0 * PI, 1_000).unwrap();
    let uniform = simulate_scan(&mk(AlphaMode::Uniform), Arm::A, 0.0, 4.0 * PI, 1_000).unwrap();
    assert!(binary.decomposition.rms_residual < 1e-12);
    assert!(uniform.decomposition.rms_residual > 0.1, "{}", uniform.decomposition.rms_residual);
}
