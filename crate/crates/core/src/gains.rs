//! Geometry-adaptive gain scheduling.
//!
//! Attitude gains are interpolated between two endpoint tables by a
//! scheduling parameter `λ ∈ [0, 1]`: from the separation for 2R formations,
//! and per axis from the square root of the formation moment of inertia for
//! 3R formations. Translational and leakage gains stay fixed.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cluster::{formation_coords, Cluster3RState, Geometry3R};
use crate::control::GainSet;
use crate::dq::{Mat3, Vec3};
use crate::Error;

fn positive(name: &str, x: f64) -> Result<(), Error> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidGain(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

/// Convex combination `g1 (1 − λ) + g2 λ`.
pub fn interp_gains(lambda: f64, g1: f64, g2: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(g1 * (1.0 - lambda) + g2 * lambda)
}

fn lerp_clamped(lambda: f64, g1: f64, g2: f64) -> f64 {
    let l = lambda.clamp(0.0, 1.0);
    g1 * (1.0 - l) + g2 * l
}

/// Gains that are not scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedGainTerms {
    pub k_v_p: f64,
    pub k_v_i: f64,
    pub k_eta: f64,
    pub k_xi: f64,
}

impl FixedGainTerms {
    pub fn validate(&self) -> Result<(), Error> {
        positive("k_v_p", self.k_v_p)?;
        positive("k_v_i", self.k_v_i)?;
        positive("k_eta", self.k_eta)?;
        positive("k_xi", self.k_xi)
    }

    fn with_attitude(&self, k_omega_p: Mat3, k_omega_i: Mat3) -> GainSet {
        let i = Mat3::identity();
        GainSet {
            k_omega_p,
            k_omega_i,
            k_v_p: i * self.k_v_p,
            k_v_i: i * self.k_v_i,
            k_eta: i * self.k_eta,
            k_xi: i * self.k_xi,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSchedule2R {
    pub d_min: f64,
    pub d_max: f64,
    pub k_p1: f64,
    pub k_i1: f64,
    pub k_p2: f64,
    pub k_i2: f64,
}

impl Default for GainSchedule2R {
    fn default() -> Self {
        Self {
            d_min: 10.0,
            d_max: 50.0,
            k_p1: 10.0,
            k_i1: 50.0,
            k_p2: 60.0,
            k_i2: 300.0,
        }
    }
}

impl GainSchedule2R {
    pub fn validate(&self) -> Result<(), Error> {
        positive("d_min", self.d_min)?;
        if !(self.d_min < self.d_max) {
            return Err(Error::InvalidGain(format!(
                "d_min ({}) must be below d_max ({})",
                self.d_min, self.d_max
            )));
        }
        positive("k_p1", self.k_p1)?;
        positive("k_i1", self.k_i1)?;
        positive("k_p2", self.k_p2)?;
        positive("k_i2", self.k_i2)
    }

    /// `(k_p, k_i)` at a given `λ`, clamped to `[0, 1]`.
    pub fn attitude_gains(&self, lambda: f64) -> (f64, f64) {
        (
            lerp_clamped(lambda, self.k_p1, self.k_p2),
            lerp_clamped(lambda, self.k_i1, self.k_i2),
        )
    }

    /// Average of the two endpoints.
    pub fn fixed_attitude_gains(&self) -> (f64, f64) {
        self.attitude_gains(0.5)
    }
}

pub fn lambda_from_distance(d: f64, sched: &GainSchedule2R) -> f64 {
    ((d - sched.d_min) / (sched.d_max - sched.d_min)).clamp(0.0, 1.0)
}

fn scalar_attitude(fixed: &FixedGainTerms, kp: f64, ki: f64) -> GainSet {
    let i = Mat3::identity();
    fixed.with_attitude(i * kp, i * ki)
}

pub fn scheduled_gains_2r(d: f64, sched: &GainSchedule2R, fixed: &FixedGainTerms) -> GainSet {
    let (kp, ki) = sched.attitude_gains(lambda_from_distance(d, sched));
    scalar_attitude(fixed, kp, ki)
}

pub fn fixed_gains_2r(sched: &GainSchedule2R, fixed: &FixedGainTerms) -> GainSet {
    let (kp, ki) = sched.fixed_attitude_gains();
    scalar_attitude(fixed, kp, ki)
}

/// Principal moments of unit point masses about the formation-frame axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub ix: f64,
    pub iy: f64,
    pub iz: f64,
}

impl Inertia {
    /// Moments of unit masses at the given body-frame coordinates.
    pub fn of_points(points: &[Vec3]) -> Self {
        let mut out = Inertia {
            ix: 0.0,
            iy: 0.0,
            iz: 0.0,
        };
        for r in points {
            let (x2, y2, z2) = (r.x * r.x, r.y * r.y, r.z * r.z);
            out.ix += y2 + z2;
            out.iy += x2 + z2;
            out.iz += x2 + y2;
        }
        out
    }

    pub fn to_vec(&self) -> Vec3 {
        Vec3::new(self.ix, self.iy, self.iz)
    }

    pub fn from_vec(v: &Vec3) -> Self {
        Self {
            ix: v.x,
            iy: v.y,
            iz: v.z,
        }
    }
}

pub fn inertia_from_geometry(g: &Geometry3R) -> Result<Inertia, Error> {
    let c = formation_coords(g.d2, g.d3, g.alpha)?;
    Ok(Inertia::of_points(&c.map(|(x, y)| Vec3::new(x, y, 0.0))))
}

pub fn inertia_3r(state: &Cluster3RState) -> Result<Inertia, Error> {
    inertia_from_geometry(&state.geometry())
}

/// Shape envelope over which the 3R schedule is designed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope3R {
    pub d_min: f64,
    pub d_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl Default for Envelope3R {
    fn default() -> Self {
        Self {
            d_min: 20.0,
            d_max: 50.0,
            alpha_min: 30f64.to_radians(),
            alpha_max: 150f64.to_radians(),
        }
    }
}

/// Points per dimension of the envelope grid search.
pub const ENVELOPE_GRID: usize = 101;

impl Envelope3R {
    pub fn validate(&self) -> Result<(), Error> {
        positive("envelope d_min", self.d_min)?;
        if !(self.d_min < self.d_max) {
            return Err(Error::InvalidGain(format!(
                "envelope d_min ({}) must be below d_max ({})",
                self.d_min, self.d_max
            )));
        }
        let ok = |a: f64| a > 0.0 && a < std::f64::consts::PI;
        if !(ok(self.alpha_min) && ok(self.alpha_max) && self.alpha_min < self.alpha_max) {
            return Err(Error::InvalidGain(format!(
                "envelope angles must satisfy 0 < alpha_min < alpha_max < pi, got [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        Ok(())
    }

    /// Per-axis minimum and maximum moments over an `n³` grid.
    pub fn inertia_extremes(&self, n: usize) -> Result<(Vec3, Vec3), Error> {
        let n = n.max(2);
        let step = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for a in 0..n {
            let alpha = step(self.alpha_min, self.alpha_max, a);
            for i in 0..n {
                let d2 = step(self.d_min, self.d_max, i);
                for j in 0..n {
                    let d3 = step(self.d_min, self.d_max, j);
                    let v = inertia_from_geometry(&Geometry3R { d2, d3, alpha })?.to_vec();
                    lo = lo.inf(&v);
                    hi = hi.sup(&v);
                }
            }
        }
        Ok((lo, hi))
    }
}

/// Per-axis integral-gain endpoints for the 3R schedule; proportional gains
/// are half the integral gains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainTable3R {
    pub k_i1: [f64; 3],
    pub k_i2: [f64; 3],
}

impl Default for GainTable3R {
    fn default() -> Self {
        Self {
            k_i1: [0.5, 0.32, 0.08],
            k_i2: [2.5, 3.2, 0.8],
        }
    }
}

impl GainTable3R {
    pub fn validate(&self) -> Result<(), Error> {
        for k in self.k_i1.iter().chain(self.k_i2.iter()) {
            positive("3R integral gain", *k)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainSchedule3R {
    pub k_i1: Vec3,
    pub k_i2: Vec3,
    pub i_min: Vec3,
    pub i_max: Vec3,
}

impl GainSchedule3R {
    pub fn new(table: &GainTable3R, envelope: &Envelope3R) -> Result<Self, Error> {
        table.validate()?;
        envelope.validate()?;
        let (i_min, i_max) = if *envelope == Envelope3R::default() {
            *default_extremes()
        } else {
            envelope.inertia_extremes(ENVELOPE_GRID)?
        };
        let s = Self {
            k_i1: Vec3::from(table.k_i1),
            k_i2: Vec3::from(table.k_i2),
            i_min,
            i_max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for k in 0..3 {
            if !(self.i_min[k] >= 0.0 && self.i_min[k] < self.i_max[k]) {
                return Err(Error::InvalidGain(format!(
                    "axis {k}: inertia range [{}, {}] is empty",
                    self.i_min[k], self.i_max[k]
                )));
            }
        }
        Ok(())
    }

    /// Per-axis `λ = (√I − √I_min)/(√I_max − √I_min)`, clamped to `[0, 1]`.
    pub fn lambda(&self, inertia: &Inertia) -> Vec3 {
        let i = inertia.to_vec();
        Vec3::from_fn(|k, _| {
            let (lo, hi) = (self.i_min[k].sqrt(), self.i_max[k].sqrt());
            ((i[k].max(0.0).sqrt() - lo) / (hi - lo)).clamp(0.0, 1.0)
        })
    }

    pub fn integral_gains(&self, lambda: &Vec3) -> Vec3 {
        Vec3::from_fn(|k, _| lerp_clamped(lambda[k], self.k_i1[k], self.k_i2[k]))
    }
}

fn default_extremes() -> &'static (Vec3, Vec3) {
    static CELL: OnceLock<(Vec3, Vec3)> = OnceLock::new();
    CELL.get_or_init(|| {
        Envelope3R::default()
            .inertia_extremes(ENVELOPE_GRID)
            .expect("default envelope is non-degenerate")
    })
}

fn diagonal_attitude(fixed: &FixedGainTerms, ki: &Vec3) -> GainSet {
    fixed.with_attitude(Mat3::from_diagonal(&(ki * 0.5)), Mat3::from_diagonal(ki))
}

pub fn scheduled_gains_3r(
    inertia: &Inertia,
    sched: &GainSchedule3R,
    fixed: &FixedGainTerms,
) -> GainSet {
    diagonal_attitude(fixed, &sched.integral_gains(&sched.lambda(inertia)))
}

pub fn fixed_gains_3r(sched: &GainSchedule3R, fixed: &FixedGainTerms) -> GainSet {
    diagonal_attitude(fixed, &sched.integral_gains(&Vec3::repeat(0.5)))
}
