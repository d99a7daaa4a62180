use dqcluster::cluster::GeometryGains;
use dqcluster::control::LawVariant;
use dqcluster::dq::Vec3;
use dqcluster::gains::{Envelope3R, FixedGainTerms, GainSchedule2R, GainTable3R};
use dqcluster::sim::{
    monte_carlo, simulate_run, ControllerMode, Formation, InitialOffset, NoiseParams, Reference2R,
    Reference3R, ScalarScript, Scenario, VectorScript, SCHEMA_VERSION,
};

fn base(duration: f64, formation: Formation, k_eta: f64) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: "test".into(),
        description: String::new(),
        duration,
        dt: 1e-3,
        controller: ControllerMode::Adaptive,
        law: LawVariant::Corrected,
        seed: 1,
        noise: NoiseParams::default(),
        fixed_gains: FixedGainTerms {
            k_v_p: 1.0,
            k_v_i: 0.5,
            k_eta,
            k_xi: 1.0,
        },
        geometry_gains: GeometryGains::default(),
        initial: InitialOffset::default(),
        formation,
    }
}

fn two_robot(duration: f64) -> Scenario {
    base(
        duration,
        Formation::TwoRobot {
            schedule: GainSchedule2R::default(),
            reference: Reference2R {
                position: VectorScript::constant(Vec3::new(0.0, 0.0, 10.0)),
                azimuth: ScalarScript::constant(0.3),
                elevation: ScalarScript::constant(0.2),
                distance: ScalarScript::constant(30.0),
            },
        },
        40.0,
    )
}

fn three_robot(duration: f64) -> Scenario {
    base(
        duration,
        Formation::ThreeRobot {
            schedule: GainTable3R::default(),
            envelope: Envelope3R::default(),
            reference: Reference3R {
                position: VectorScript::constant(Vec3::new(0.0, 0.0, 10.0)),
                attitude: VectorScript::constant(Vec3::new(0.1, -0.1, 0.2)),
                d2: ScalarScript::constant(35.0),
                d3: ScalarScript::constant(30.0),
                alpha: ScalarScript::constant(1.5),
            },
        },
        1.0,
    )
}

fn offset() -> InitialOffset {
    InitialOffset {
        position: [1.0, -2.0, 0.5],
        rotation: [0.2, 0.3, -0.4],
        distance: 3.0,
        alpha: 0.1,
    }
}

fn final_value(s: &Scenario, channel: &str) -> f64 {
    let run = simulate_run(s, 0).unwrap();
    assert!(run.failure.is_none(), "{:?}", run.failure);
    *run.channel(channel).unwrap().last().unwrap()
}

#[test]
fn runs_are_deterministic_per_seed() {
    let s = three_robot(2.0);
    let a = simulate_run(&s, 5).unwrap();
    let b = simulate_run(&s, 5).unwrap();
    let c = simulate_run(&s, 6).unwrap();
    assert_eq!(a.series, b.series);
    assert_ne!(a.series, c.series);
    assert_eq!(a.len(), 2001);
}

#[test]
fn noise_free_2r_converges() {
    let mut s = two_robot(30.0);
    s.noise.sigma = 0.0;
    s.initial = offset();
    for ch in [
        "dq_norm",
        "dp_norm",
        "distance_error",
        "azimuth_error",
        "elevation_error",
    ] {
        assert!(final_value(&s, ch).abs() < 1e-3, "{ch}");
    }
}

#[test]
fn noise_free_3r_converges() {
    let mut s = three_robot(60.0);
    s.noise.sigma = 0.0;
    s.initial = offset();
    for ch in [
        "dq_norm",
        "dp_norm",
        "roll_error",
        "pitch_error",
        "yaw_error",
    ] {
        assert!(final_value(&s, ch).abs() < 1e-3, "{ch}");
    }
    let run = simulate_run(&s, 0).unwrap();
    assert!((run.channel("d2").unwrap().last().unwrap() - 35.0).abs() < 1e-6);
    assert!((run.channel("alpha").unwrap().last().unwrap() - 1.5).abs() < 1e-6);
}

#[test]
fn fixed_and_adaptive_share_the_equilibrium() {
    for mut s in [two_robot(40.0), three_robot(60.0)] {
        s.noise.sigma = 0.0;
        s.initial = offset();
        let adaptive = final_value(&s, "lyapunov");
        s.controller = ControllerMode::Fixed;
        let fixed = final_value(&s, "lyapunov");
        assert!(adaptive < 1e-6 && fixed < 1e-6, "{adaptive} {fixed}");
    }
}

#[test]
fn batch_statistics_are_seed_ordered_and_deterministic() {
    let s = two_robot(1.0);
    let a = monte_carlo(&s, 4, 10).unwrap();
    let b = monte_carlo(&s, 4, 10).unwrap();
    assert_eq!(a.mean, b.mean);
    assert_eq!(a.std, b.std);
    assert_eq!(a.succeeded, 4);
    assert!(monte_carlo(&s, 1, 10).is_err());
}
