//! Single closed-loop run of a 2R or 3R scenario.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::noise::GaussMarkov;
use super::scenario::{Formation, PreparedScenario, Reference2R, Reference3R, Scenario};
use super::ControllerMode;
use crate::cluster::{
    distance_rate, forward_2r, forward_3r, geometry_rates_3r, inverse_vel_2r, inverse_vel_3r,
    robots_from_cluster_2r, robots_from_cluster_3r, Cluster2RState, Cluster3RState,
    ClusterVelocity3R, Geometry3R,
};
use crate::control::{
    integrator_step, lyapunov_value, partial_attitude_control, partial_error, pose_pi_control,
    translation_control, translation_integrator_step, ControllerState,
};
use crate::dq::{UnitDualQuaternion, UnitQuaternion, Vec3};
use crate::gains::{
    fixed_gains_2r, fixed_gains_3r, inertia_3r, lambda_from_distance, scheduled_gains_2r,
    scheduled_gains_3r, GainSchedule3R,
};
use crate::kinematics::pose_error;
use crate::Error;

pub const CHANNELS_2R: &[&str] = &[
    "azimuth_error",
    "elevation_error",
    "distance",
    "distance_error",
    "dq0",
    "dq_norm",
    "dp_norm",
    "eta_norm",
    "xi_norm",
    "lyapunov",
    "lambda",
    "speed",
];

pub const CHANNELS_3R: &[&str] = &[
    "roll_error",
    "pitch_error",
    "yaw_error",
    "d2",
    "d3",
    "alpha",
    "dq0",
    "dq_norm",
    "dp_norm",
    "eta_norm",
    "xi_norm",
    "lyapunov",
    "lambda_x",
    "lambda_y",
    "lambda_z",
    "speed",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub time: f64,
    pub reason: String,
}

/// Per-step series of one run. Errors and geometry are measured on the true
/// (noise-free) robot positions; the controller only sees noisy ones.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub dt: f64,
    pub names: &'static [&'static str],
    pub series: Vec<Vec<f64>>,
    pub failure: Option<RunFailure>,
}

impl RunResult {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        let k = self.names.iter().position(|n| *n == name)?;
        Some(&self.series[k])
    }

    pub fn len(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

/// Azimuth `atan2(z_y, z_x)` and elevation `asin(z_z)`; the azimuth is 0 for
/// a vertical axis.
pub fn pointing_angles(z: &Vec3) -> (f64, f64) {
    let el = z.z.clamp(-1.0, 1.0).asin();
    let az = if z.z.abs() > 1.0 - 1e-9 {
        0.0
    } else {
        z.y.atan2(z.x)
    };
    (az, el)
}

pub fn axis_from_angles(azimuth: f64, elevation: f64) -> Vec3 {
    let (sa, ca) = azimuth.sin_cos();
    let (se, ce) = elevation.sin_cos();
    Vec3::new(ce * ca, ce * sa, se)
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

struct Recorder {
    series: Vec<Vec<f64>>,
}

impl Recorder {
    fn new(channels: usize, capacity: usize) -> Self {
        Self {
            series: (0..channels)
                .map(|_| Vec::with_capacity(capacity))
                .collect(),
        }
    }

    fn push(&mut self, row: &[f64]) {
        for (s, v) in self.series.iter_mut().zip(row) {
            s.push(*v);
        }
    }
}

fn same_hemisphere(q: UnitQuaternion, prev: &UnitQuaternion) -> UnitQuaternion {
    if q.quaternion().dot(prev.quaternion()) < 0.0 {
        q.negate()
    } else {
        q
    }
}

pub fn simulate_run(scenario: &Scenario, seed: u64) -> Result<RunResult, Error> {
    simulate_prepared(&scenario.prepare()?, seed)
}

/// Runs a prepared scenario. A formation that degenerates mid-run ends the
/// run early with [`RunResult::failure`] set.
pub fn simulate_prepared(prepared: &PreparedScenario, seed: u64) -> Result<RunResult, Error> {
    let sc = &prepared.scenario;
    match &sc.formation {
        Formation::TwoRobot {
            schedule,
            reference,
        } => run_2r(sc, schedule, reference, seed),
        Formation::ThreeRobot { reference, .. } => {
            let sched = prepared
                .schedule_3r
                .as_ref()
                .ok_or_else(|| Error::InvalidScenario("3R scenario was not prepared".into()))?;
            run_3r(sc, sched, reference, seed)
        }
    }
}

fn fail(
    rec: Recorder,
    seed: u64,
    dt: f64,
    names: &'static [&'static str],
    time: f64,
    e: Error,
) -> RunResult {
    RunResult {
        seed,
        dt,
        names,
        series: rec.series,
        failure: Some(RunFailure {
            time,
            reason: e.to_string(),
        }),
    }
}

fn run_2r(
    sc: &Scenario,
    schedule: &crate::gains::GainSchedule2R,
    re: &Reference2R,
    seed: u64,
) -> Result<RunResult, Error> {
    let n = sc.steps();
    let dt = sc.dt;
    let names = CHANNELS_2R;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = GaussMarkov::new(6, &sc.noise, dt, &mut rng)?;
    let z_ref = |t: f64| axis_from_angles(re.azimuth.eval(t), re.elevation.eval(t));

    let start = Cluster2RState {
        p: re.position.eval(0.0) + sc.offset_position(),
        z: UnitQuaternion::exp(&(sc.offset_rotation() * 0.5))
            .adjoint(&z_ref(0.0))
            .normalize(),
        d: re.distance.eval(0.0) + sc.initial.distance,
    };
    let (mut r1, mut r2) = robots_from_cluster_2r(&start);
    let mut state = ControllerState::default();
    let fixed = fixed_gains_2r(schedule, &sc.fixed_gains);
    let mut rec = Recorder::new(names.len(), n + 1);

    for k in 0..=n {
        let t = k as f64 * dt;
        let p_d = re.position.eval(t);
        let v_d = (re.position.eval(t + dt) - p_d) / dt;
        let z_d = z_ref(t);
        let d_d = re.distance.eval(t);

        let truth = match forward_2r(&r1, &r2).and_then(|c| Ok((c, partial_error(&c.z, &z_d)?))) {
            Ok(v) => v,
            Err(e) => return Ok(fail(rec, seed, dt, names, t, e)),
        };
        let (tc, te) = truth;

        let nz = noise.values();
        let m1 = r1 + Vec3::new(nz[0], nz[1], nz[2]);
        let m2 = r2 + Vec3::new(nz[3], nz[4], nz[5]);
        let meas = match forward_2r(&m1, &m2).and_then(|c| Ok((c, partial_error(&c.z, &z_d)?))) {
            Ok(v) => v,
            Err(e) => return Ok(fail(rec, seed, dt, names, t, e)),
        };
        let (mc, me) = meas;

        let (gains, lambda) = match sc.controller {
            ControllerMode::Fixed => (fixed, 0.5),
            ControllerMode::Adaptive => (
                scheduled_gains_2r(mc.d, schedule, &sc.fixed_gains),
                lambda_from_distance(mc.d, schedule),
            ),
        };
        let (omega, next) =
            partial_attitude_control(&me, &state, &gains, &Vec3::zeros(), dt, sc.law)?;
        let dp_m = mc.p - p_d;
        let v = translation_control(&dp_m, &state.xi, &gains, &v_d);
        let xi = translation_integrator_step(&dp_m, &state.xi, &gains, dt, sc.law)?;
        let ddot = distance_rate(mc.d, d_d, &sc.geometry_gains);
        let (v1, v2) = inverse_vel_2r(&mc, &v, &omega, ddot);

        let (az, el) = pointing_angles(&tc.z);
        let (az_d, el_d) = pointing_angles(&z_d);
        let dp = tc.p - p_d;
        let lyap = 0.5
            * (te.dq.norm_squared()
                + dp.norm_squared()
                + state.eta.vector().norm_squared()
                + state.xi.norm_squared());
        rec.push(&[
            wrap_angle(az - az_d),
            el - el_d,
            tc.d,
            tc.d - d_d,
            te.dq0,
            te.dq.norm(),
            dp.norm(),
            state.eta.vector().norm(),
            state.xi.norm(),
            lyap,
            lambda,
            v1.norm().max(v2.norm()),
        ]);

        if k == n {
            break;
        }
        r1 += v1 * dt;
        r2 += v2 * dt;
        state = ControllerState { eta: next.eta, xi };
        noise.step(&mut rng);
    }

    Ok(RunResult {
        seed,
        dt,
        names,
        series: rec.series,
        failure: None,
    })
}

fn reference_attitude(re: &Reference3R, t: f64) -> UnitQuaternion {
    let a = re.attitude.eval(t);
    UnitQuaternion::from_euler_zyx(a.x, a.y, a.z)
}

fn reference_geometry(re: &Reference3R, t: f64) -> Geometry3R {
    Geometry3R {
        d2: re.d2.eval(t),
        d3: re.d3.eval(t),
        alpha: re.alpha.eval(t),
    }
}

fn run_3r(
    sc: &Scenario,
    schedule: &GainSchedule3R,
    re: &Reference3R,
    seed: u64,
) -> Result<RunResult, Error> {
    let n = sc.steps();
    let dt = sc.dt;
    let names = CHANNELS_3R;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = GaussMarkov::new(9, &sc.noise, dt, &mut rng)?;

    let g0 = reference_geometry(re, 0.0);
    let q0 = (UnitQuaternion::exp(&(sc.offset_rotation() * 0.5)) * reference_attitude(re, 0.0))
        .renormalize();
    let start = Cluster3RState::from_attitude(
        re.position.eval(0.0) + sc.offset_position(),
        &q0,
        g0.d2 + sc.initial.distance,
        g0.d3 + sc.initial.distance,
        g0.alpha + sc.initial.alpha,
    );
    let mut robots = robots_from_cluster_3r(&start)?;
    let mut state = ControllerState::default();
    let fixed = fixed_gains_3r(schedule, &sc.fixed_gains);
    let mut q_true_prev = q0;
    let mut q_meas_prev = q0;
    let mut rec = Recorder::new(names.len(), n + 1);

    for k in 0..=n {
        let t = k as f64 * dt;
        let p_d = re.position.eval(t);
        let v_d = (re.position.eval(t + dt) - p_d) / dt;
        let q_d = reference_attitude(re, t);
        let omega_d = (q_d.conjugate() * reference_attitude(re, t + dt)).rotation_vector() / dt;
        let g_d = reference_geometry(re, t);
        let pose_d = UnitDualQuaternion::from_pose(&q_d, &p_d);

        let tc = match forward_3r(&robots[0], &robots[1], &robots[2]) {
            Ok(c) => c,
            Err(e) => return Ok(fail(rec, seed, dt, names, t, e)),
        };
        let q_true = same_hemisphere(tc.attitude(), &q_true_prev);
        q_true_prev = q_true;
        let te = pose_error(&pose_d, &UnitDualQuaternion::from_pose(&q_true, &tc.p));

        let nz = noise.values();
        let noisy: [Vec3; 3] =
            std::array::from_fn(|i| robots[i] + Vec3::new(nz[3 * i], nz[3 * i + 1], nz[3 * i + 2]));
        let mc = match forward_3r(&noisy[0], &noisy[1], &noisy[2]) {
            Ok(c) => c,
            Err(e) => return Ok(fail(rec, seed, dt, names, t, e)),
        };
        let q_meas = same_hemisphere(mc.attitude(), &q_meas_prev);
        q_meas_prev = q_meas;
        let me = pose_error(&pose_d, &UnitDualQuaternion::from_pose(&q_meas, &mc.p));

        let (gains, lambda) = match sc.controller {
            ControllerMode::Fixed => (fixed, Vec3::repeat(0.5)),
            ControllerMode::Adaptive => {
                let inertia = match inertia_3r(&mc) {
                    Ok(i) => i,
                    Err(e) => return Ok(fail(rec, seed, dt, names, t, e)),
                };
                (
                    scheduled_gains_3r(&inertia, schedule, &sc.fixed_gains),
                    schedule.lambda(&inertia),
                )
            }
        };
        let twist = pose_pi_control(&me, &state, &gains, &omega_d, &v_d);
        let next = integrator_step(&me, &state, &gains, dt, sc.law)?;
        let omega_i = mc.rot * twist.omega;
        let rates = geometry_rates_3r(&mc.geometry(), &g_d, &sc.geometry_gains);
        let vel = match inverse_vel_3r(
            &mc,
            &ClusterVelocity3R::new(&mc, twist.vel, &omega_i, &rates),
        ) {
            Ok(v) => v,
            Err(e) => return Ok(fail(rec, seed, dt, names, t, e)),
        };

        let angles = te.attitude().rotation_vector();
        rec.push(&[
            angles.x,
            angles.y,
            angles.z,
            tc.d2,
            tc.d3,
            tc.alpha,
            te.dq0,
            te.dq.norm(),
            te.dp.norm(),
            state.eta.vector().norm(),
            state.xi.norm(),
            lyapunov_value(&te, &state),
            lambda.x,
            lambda.y,
            lambda.z,
            vel.iter().map(|v| v.norm()).fold(0.0, f64::max),
        ]);

        if k == n {
            break;
        }
        for (r, v) in robots.iter_mut().zip(vel.iter()) {
            *r += v * dt;
        }
        state = next;
        noise.step(&mut rng);
    }

    Ok(RunResult {
        seed,
        dt,
        names,
        series: rec.series,
        failure: None,
    })
}
