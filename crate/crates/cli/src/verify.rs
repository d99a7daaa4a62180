//! Numerical verification suite: each check reports a measured value against
//! its tolerance.

use std::f64::consts::{E, PI};
use std::time::Instant;

use dqcluster::cluster::{
    inverse_vel_3r, robots_from_cluster_3r, Cluster3RState, ClusterVelocity3R, Geometry3R,
};
use dqcluster::control::{GainSet, LawVariant};
use dqcluster::dq::{rotation_matrix, DualVector, Mat3, UnitDualQuaternion, UnitQuaternion, Vec3};
use dqcluster::gains::{
    fixed_gains_2r, interp_gains, lambda_from_distance, scheduled_gains_3r, Envelope3R,
    FixedGainTerms, GainSchedule2R, GainSchedule3R, GainTable3R, Inertia,
};
use dqcluster::sim::{
    align_axis, monte_carlo, regulate_pose, simulate_run, BatchStats, ControllerMode, Formation,
    GaussMarkov, InitialOffset, NoiseParams, ScalarScript, Scenario,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::presets;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:<5} {:<34} measured {:<12.4e} tolerance {:<10.3e} ({:.1} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

fn timed(
    id: &'static str,
    name: &'static str,
    f: impl FnOnce() -> (f64, f64, bool, String),
) -> Check {
    let t0 = Instant::now();
    let (measured, tolerance, passed, detail) = f();
    Check {
        id,
        name,
        measured,
        tolerance,
        passed,
        detail,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

fn failed(id: &'static str, name: &'static str, e: impl std::fmt::Display) -> Check {
    Check {
        id,
        name,
        measured: f64::NAN,
        tolerance: f64::NAN,
        passed: false,
        detail: format!("error: {e}"),
        seconds: 0.0,
    }
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn random_rotation<R: Rng>(rng: &mut R) -> UnitQuaternion {
    UnitQuaternion::from_axis_angle(&random_unit(rng), rng.random_range(0.0..PI))
}

/// Averaged 2R attitude gains with the translational terms used throughout.
pub fn averaged_gains() -> GainSet {
    let fixed = FixedGainTerms {
        k_v_p: 1.0,
        k_v_i: 0.5,
        k_eta: 35.0,
        k_xi: 1.0,
    };
    fixed_gains_2r(&GainSchedule2R::default(), &fixed)
}

/// Largest column-wise relative mismatch between the 3R inverse velocity map
/// and central differences of the position reconstruction.
pub fn jacobian_oracle(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let state = Cluster3RState::from_attitude(
            Vec3::new(
                rng.random_range(-50.0..50.0),
                rng.random_range(-50.0..50.0),
                rng.random_range(0.0..30.0),
            ),
            &random_rotation(&mut rng),
            rng.random_range(20.0..50.0),
            rng.random_range(20.0..50.0),
            rng.random_range(30f64.to_radians()..150f64.to_radians()),
        );
        let none = Geometry3R {
            d2: 0.0,
            d3: 0.0,
            alpha: 0.0,
        };
        let stacked = |s: &Cluster3RState| robots_from_cluster_3r(s).expect("nondegenerate sample");
        for col in 0..9 {
            let mut plus = state;
            let mut minus = state;
            let mut v = Vec3::zeros();
            let mut w = Vec3::zeros();
            let mut rates = none;
            match col {
                0..=2 => {
                    v[col] = 1.0;
                    plus.p[col] += h;
                    minus.p[col] -= h;
                }
                3..=5 => {
                    w[col - 3] = 1.0;
                    plus.rot =
                        UnitQuaternion::exp(&(w * (0.5 * h))).to_rotation_matrix() * state.rot;
                    minus.rot =
                        UnitQuaternion::exp(&(w * (-0.5 * h))).to_rotation_matrix() * state.rot;
                }
                6 => {
                    rates.d2 = 1.0;
                    plus.d2 += h;
                    minus.d2 -= h;
                }
                7 => {
                    rates.d3 = 1.0;
                    plus.d3 += h;
                    minus.d3 -= h;
                }
                _ => {
                    rates.alpha = 1.0;
                    plus.alpha += h;
                    minus.alpha -= h;
                }
            }
            let analytic = inverse_vel_3r(&state, &ClusterVelocity3R::new(&state, v, &w, &rates))
                .expect("nondegenerate");
            let (p, m) = (stacked(&plus), stacked(&minus));
            let mut num = 0.0;
            let mut den = 0.0;
            for k in 0..3 {
                let fd = (p[k] - m[k]) / (2.0 * h);
                num += (analytic[k] - fd).norm_squared();
                den += fd.norm_squared();
            }
            worst = worst.max((num / den).sqrt());
        }
    }
    worst
}

pub fn check_jacobian() -> Check {
    timed("AC1", "3R Jacobian vs finite differences", || {
        let worst = jacobian_oracle(100, 11);
        (
            worst,
            1e-5,
            worst <= 1e-5,
            "100 states, 9 columns, step 1e-6".into(),
        )
    })
}

/// Initial poses for the regulation checks: attitude error with `δq₀ > 0.1`
/// and a position offset inside a 10 m cube.
pub fn regulation_initial_conditions(n: usize, seed: u64) -> Vec<UnitDualQuaternion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_angle = 2.0 * 0.1f64.acos();
    (0..n)
        .map(|_| {
            let q = UnitQuaternion::from_axis_angle(
                &random_unit(&mut rng),
                rng.random_range(0.0..0.98 * max_angle),
            );
            let p = Vec3::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            UnitDualQuaternion::from_pose(&q, &p)
        })
        .collect()
}

pub fn check_convergence(law: LawVariant) -> Check {
    timed("AC2", "full-pose PI convergence + Lyapunov", || {
        let gains = averaged_gains();
        let mut worst_err: f64 = 0.0;
        let mut worst_inc = f64::NEG_INFINITY;
        for ic in regulation_initial_conditions(50, 7) {
            match regulate_pose(
                &ic,
                &UnitDualQuaternion::identity(),
                &gains,
                1e-3,
                30.0,
                law,
            ) {
                Ok(out) => {
                    worst_err = worst_err.max(out.max_error());
                    worst_inc = worst_inc.max(out.max_lyapunov_increase);
                }
                Err(e) => return (f64::NAN, 1e-3, false, format!("error: {e}")),
            }
        }
        let passed = worst_err < 1e-3 && worst_inc <= 1e-9;
        (
            worst_err,
            1e-3,
            passed,
            format!("50 ICs, 30 s; largest one-step V increase {worst_inc:.3e} (tolerance 1e-9)"),
        )
    })
}

pub fn check_alignment(law: LawVariant) -> Check {
    timed("AC3", "pointing-law alignment", || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gains = averaged_gains();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        while count < 50 {
            let (z, z_d) = (random_unit(&mut rng), random_unit(&mut rng));
            if z.dot(&z_d) <= -0.99 {
                continue;
            }
            count += 1;
            match align_axis(&z, &z_d, &gains, 1e-3, 20.0, law) {
                Ok(out) => worst = worst.max(out.misalignment),
                Err(e) => return (f64::NAN, 1e-6, false, format!("error: {e}")),
            }
        }
        let worst = if worst.is_nan() { f64::INFINITY } else { worst };
        (
            worst,
            1e-6,
            worst < 1e-6,
            "50 pairs, 20 s, worst 1 - <z, z_d>".into(),
        )
    })
}

/// Standard initial conditions for the sign audit.
pub fn audit_initial_conditions() -> Vec<UnitDualQuaternion> {
    vec![
        UnitDualQuaternion::from_pose(&UnitQuaternion::identity(), &Vec3::new(1.0, 0.0, 0.0)),
        UnitDualQuaternion::from_pose(
            &UnitQuaternion::from_axis_angle(&Vec3::z(), PI / 2.0),
            &Vec3::new(1.0, 2.0, 3.0),
        ),
    ]
}

pub fn check_sign_audit() -> Check {
    timed("AC4", "printed integrator sign breaks V", || {
        let gains = averaged_gains();
        let mut printed_max = f64::NEG_INFINITY;
        let mut corrected_max = f64::NEG_INFINITY;
        for ic in audit_initial_conditions() {
            let id = UnitDualQuaternion::identity();
            let p = regulate_pose(&ic, &id, &gains, 1e-3, 10.0, LawVariant::Printed);
            let c = regulate_pose(&ic, &id, &gains, 1e-3, 10.0, LawVariant::Corrected);
            match (p, c) {
                (Ok(p), Ok(c)) => {
                    printed_max = printed_max.max(p.max_lyapunov_increase);
                    corrected_max = corrected_max.max(c.max_lyapunov_increase);
                }
                (Err(e), _) | (_, Err(e)) => return (f64::NAN, 1e-9, false, format!("error: {e}")),
            }
        }
        (
            printed_max,
            1e-9,
            printed_max > 1e-9 && corrected_max <= 1e-9,
            format!("largest V increase: printed {printed_max:.3e}, corrected {corrected_max:.3e}"),
        )
    })
}

/// Sample standard deviation and lag-`lag` autocorrelation of one channel.
pub fn noise_statistics(samples: usize, lag: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = NoiseParams {
        sigma: 1.0,
        t_c: 2e-3,
    };
    let mut g = GaussMarkov::new(1, &params, 1e-3, &mut rng).expect("valid noise parameters");
    let xs: Vec<f64> = (0..samples).map(|_| g.step(&mut rng)[0]).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let cov = xs
        .windows(lag + 1)
        .map(|w| (w[0] - mean) * (w[lag] - mean))
        .sum::<f64>()
        / (n - lag as f64);
    (var.sqrt(), cov / var)
}

pub fn check_noise() -> Check {
    timed("AC5", "Gauss-Markov noise statistics", || {
        let (std, rho) = noise_statistics(1_000_000, 2, 99);
        let std_err = (std - 1.0).abs();
        let rho_err = (rho - 1.0 / E).abs();
        (
            std_err,
            0.02,
            std_err <= 0.02 && rho_err <= 0.02,
            format!(
                "std {std:.4}, lag-2ms autocorrelation {rho:.4} (target {:.4} +/- 0.02)",
                1.0 / E
            ),
        )
    })
}

fn with_controller(s: &Scenario, mode: ControllerMode) -> Scenario {
    let mut s = s.clone();
    s.controller = mode;
    s
}

fn window(stats: &BatchStats, channel: &str, t0: f64, t1: f64) -> f64 {
    stats.window_std(channel, t0, t1).unwrap_or(f64::NAN)
}

/// Azimuth-error std of fixed and adaptive hover batches: `(fixed at
/// d = 50, fixed at d = 10, adaptive at d = 10)`.
pub fn trend_2r(runs: usize) -> Result<(f64, f64, f64), crate::CliError> {
    let s = presets::preset("2r_hover_shrink")?;
    let fixed = monte_carlo(&with_controller(&s, ControllerMode::Fixed), runs, s.seed)?;
    let adaptive = monte_carlo(&with_controller(&s, ControllerMode::Adaptive), runs, s.seed)?;
    Ok((
        window(&fixed, "azimuth_error", 20.0, 40.0),
        window(&fixed, "azimuth_error", 100.0, 180.0),
        window(&adaptive, "azimuth_error", 100.0, 180.0),
    ))
}

pub fn check_trend_2r(runs: usize) -> Check {
    let t0 = Instant::now();
    let mut c = match trend_2r(runs) {
        Ok((f50, f10, a10)) => {
            let ratio = a10 / f10;
            Check {
                id: "AC6",
                name: "2R azimuth noise trend",
                measured: ratio,
                tolerance: 0.9,
                passed: f10 > f50 && ratio <= 0.9,
                detail: format!(
                    "{runs} runs; fixed std d=50 {f50:.3e}, d=10 {f10:.3e}; adaptive d=10 {a10:.3e} (ratio {ratio:.3})"
                ),
                seconds: 0.0,
            }
        }
        Err(e) => failed("AC6", "2R azimuth noise trend", e),
    };
    c.seconds = t0.elapsed().as_secs_f64();
    c
}

/// Roll-error std of fixed and adaptive 3R hover batches: `(fixed before,
/// adaptive before, fixed after, adaptive after)` the geometry transition.
pub fn trend_3r(runs: usize) -> Result<(f64, f64, f64, f64), crate::CliError> {
    let s = presets::preset("3r_hover_roll")?;
    let fixed = monte_carlo(&with_controller(&s, ControllerMode::Fixed), runs, s.seed)?;
    let adaptive = monte_carlo(&with_controller(&s, ControllerMode::Adaptive), runs, s.seed)?;
    Ok((
        window(&fixed, "roll_error", 10.0, 40.0),
        window(&adaptive, "roll_error", 10.0, 40.0),
        window(&fixed, "roll_error", 75.0, 180.0),
        window(&adaptive, "roll_error", 75.0, 180.0),
    ))
}

pub fn check_trend_3r(runs: usize) -> Check {
    let t0 = Instant::now();
    let mut c = match trend_3r(runs) {
        Ok((fb, ab, fa, aa)) => {
            let ratio = aa / fa;
            Check {
                id: "AC7",
                name: "3R roll noise trend",
                measured: ratio,
                tolerance: 0.9,
                passed: ratio <= 0.9 && ab >= fb,
                detail: format!(
                    "{runs} runs; before: fixed {fb:.3e}, adaptive {ab:.3e}; after: fixed {fa:.3e}, adaptive {aa:.3e} (ratio {ratio:.3})"
                ),
                seconds: 0.0,
            }
        }
        Err(e) => failed("AC7", "3R roll noise trend", e),
    };
    c.seconds = t0.elapsed().as_secs_f64();
    c
}

pub fn check_gain_tables() -> Check {
    timed("AC8", "gain-table endpoints", || {
        let s2 = GainSchedule2R::default();
        let mut mismatches = Vec::new();
        let at = |l: f64| s2.attitude_gains(l);
        if at(0.0) != (10.0, 50.0) || at(1.0) != (60.0, 300.0) {
            mismatches.push("2R endpoints".to_string());
        }
        if lambda_from_distance(30.0, &s2) != 0.5
            || interp_gains(0.5, 50.0, 300.0) != Ok(175.0)
            || at(0.5).1 != 175.0
        {
            mismatches.push("2R midpoint".to_string());
        }
        let fixed = FixedGainTerms {
            k_v_p: 1.0,
            k_v_i: 0.5,
            k_eta: 1.0,
            k_xi: 1.0,
        };
        match GainSchedule3R::new(&GainTable3R::default(), &Envelope3R::default()) {
            Ok(s3) => {
                let lo = scheduled_gains_3r(&Inertia::from_vec(&s3.i_min), &s3, &fixed);
                let hi = scheduled_gains_3r(&Inertia::from_vec(&s3.i_max), &s3, &fixed);
                if lo.k_omega_i != Mat3::from_diagonal(&Vec3::new(0.5, 0.32, 0.08)) {
                    mismatches.push("3R lower endpoint".into());
                }
                if hi.k_omega_i != Mat3::from_diagonal(&Vec3::new(2.5, 3.2, 0.8)) {
                    mismatches.push("3R upper endpoint".into());
                }
                if lo.k_omega_p != lo.k_omega_i * 0.5 || hi.k_omega_p != hi.k_omega_i * 0.5 {
                    mismatches.push("3R proportional = integral / 2".into());
                }
            }
            Err(e) => mismatches.push(e.to_string()),
        }
        let n = mismatches.len() as f64;
        let detail = if mismatches.is_empty() {
            "2R (10, 50, 60, 300), 3R (0.5, 0.32, 0.08, 2.5, 3.2, 0.8), k_p = k_i/2".to_string()
        } else {
            format!("mismatch: {}", mismatches.join("; "))
        };
        (n, 0.0, mismatches.is_empty(), detail)
    })
}

/// Times for the separation error to halve three times in a noise-free 2R
/// run, as fractions of `ln 2 / k_d`.
pub fn halving_ratios() -> Result<Vec<f64>, crate::CliError> {
    let mut s = presets::preset("2r_hover_shrink")?;
    s.duration = 10.0;
    s.noise.sigma = 0.0;
    s.controller = ControllerMode::Fixed;
    s.initial = InitialOffset {
        distance: 8.0,
        ..Default::default()
    };
    if let Formation::TwoRobot { reference, .. } = &mut s.formation {
        reference.distance = ScalarScript::constant(30.0);
    }
    let run = simulate_run(&s, 0)?;
    let e: Vec<f64> = run
        .channel("distance_error")
        .expect("2R channel")
        .iter()
        .map(|x| x.abs())
        .collect();
    let crossing = |level: f64| -> Option<f64> {
        let k = e.iter().position(|x| *x <= level)?;
        if k == 0 {
            return Some(0.0);
        }
        let f = (e[k - 1] - level) / (e[k - 1] - e[k]);
        Some((k as f64 - 1.0 + f) * s.dt)
    };
    let half_life = 2f64.ln() / s.geometry_gains.k_d;
    let e0 = e[0];
    let mut out = Vec::new();
    let mut prev = 0.0;
    for j in 1..=3 {
        let t = crossing(e0 / f64::from(1 << j))
            .ok_or_else(|| crate::CliError::Argument("error did not decay".into()))?;
        out.push((t - prev) / half_life);
        prev = t;
    }
    Ok(out)
}

pub fn check_halving() -> Check {
    timed(
        "AC9",
        "geometry controller half-life",
        || match halving_ratios() {
            Ok(r) => {
                let worst = r.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
                (
                    worst,
                    0.02,
                    worst <= 0.02,
                    format!(
                        "successive halvings / (ln2/k_d): {:?}",
                        r.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()
                    ),
                )
            }
            Err(e) => (f64::NAN, 0.02, false, format!("error: {e}")),
        },
    )
}

/// Worst deviations over `samples` random draws: `(double cover, SO(3),
/// adjoint homomorphism, dual adjoint closed form vs sandwich)`.
pub fn algebra_suite(samples: usize, seed: u64) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    for _ in 0..samples {
        let q = random_rotation(&mut rng);
        let p = random_rotation(&mut rng);
        let r = rotation_matrix(q.quaternion()).expect("unit");
        let rn = rotation_matrix(q.negate().quaternion()).expect("unit");
        worst[0] = worst[0].max((r - rn).abs().max());
        let so3 = (r.transpose() * r - Mat3::identity())
            .abs()
            .max()
            .max((r.determinant() - 1.0).abs());
        worst[1] = worst[1].max(so3);
        let x = random_unit(&mut rng) * rng.random_range(0.0..1.0);
        let hom = ((q * p).adjoint(&x) - q.adjoint(&p.adjoint(&x))).norm();
        worst[2] = worst[2].max(hom);
        let t = Vec3::new(
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        );
        let pose = UnitDualQuaternion::from_pose(&q, &t);
        let xv = DualVector::new(random_unit(&mut rng), random_unit(&mut rng));
        let a = pose.adjoint(&xv);
        let b = pose.adjoint_sandwich(&xv);
        worst[3] = worst[3].max(
            (a.principal - b.principal)
                .norm()
                .max((a.dual - b.dual).norm()),
        );
    }
    worst
}

pub fn check_algebra() -> Check {
    timed("AC10", "algebra invariants", || {
        let w = algebra_suite(10_000, 3);
        let tol = [1e-12, 1e-10, 1e-10, 1e-12];
        let passed = w.iter().zip(tol.iter()).all(|(a, b)| a <= b);
        let ratio = w
            .iter()
            .zip(tol.iter())
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max);
        (
            ratio,
            1.0,
            passed,
            format!(
                "10^4 samples; double cover {:.1e}, SO(3) {:.1e}, homomorphism {:.1e}, dual adjoint {:.1e} (reported: worst / tolerance)",
                w[0], w[1], w[2], w[3]
            ),
        )
    })
}

/// Runs the suite. `law` selects the integrator signs used by the Lyapunov
/// and alignment checks; the printed variant is expected to fail them.
pub fn run_verify(level: Level, law: LawVariant) -> Vec<Check> {
    let mut out = vec![
        check_jacobian(),
        check_convergence(law),
        check_alignment(law),
        check_sign_audit(),
        check_noise(),
        check_gain_tables(),
        check_halving(),
        check_algebra(),
    ];
    if level == Level::Full {
        out.push(check_trend_2r(100));
        out.push(check_trend_3r(100));
    }
    out
}
