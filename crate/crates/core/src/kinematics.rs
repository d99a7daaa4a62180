//! Attitude and pose kinematics on the group, and the tracking error.

use crate::dq::{Twist, UnitDualQuaternion, UnitQuaternion, Vec3};
use crate::Error;

/// Default integration step, half the noise correlation time.
pub const DEFAULT_DT: f64 = 1e-3;

/// Tracking error `δq̃ = q̃_d* q̃`, with the translation part taken as the
/// inertial-frame difference `p − p_d` (the frame of the commanded `v`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoseError {
    pub dq0: f64,
    pub dq: Vec3,
    pub dp: Vec3,
}

impl PoseError {
    pub fn zero() -> Self {
        Self {
            dq0: 1.0,
            dq: Vec3::zeros(),
            dp: Vec3::zeros(),
        }
    }

    pub fn attitude(&self) -> UnitQuaternion {
        UnitQuaternion::new_unchecked(crate::dq::Quaternion::from_parts(self.dq0, self.dq))
    }

    /// Same error with the other quaternion representative `(−δq₀, −δq)`.
    pub fn flipped(&self) -> Self {
        Self {
            dq0: -self.dq0,
            dq: -self.dq,
            dp: self.dp,
        }
    }
}

fn check_dt(dt: f64) -> Result<(), Error> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveStep { dt })
    }
}

/// Exact group step of `q̇ = ½ q ω̄` for a body rate held constant over `dt`.
pub fn integrate_attitude(
    q: &UnitQuaternion,
    omega: &Vec3,
    dt: f64,
) -> Result<UnitQuaternion, Error> {
    check_dt(dt)?;
    Ok((*q * UnitQuaternion::exp(&(omega * (0.5 * dt)))).renormalize())
}

/// Exact step of `q̃̇ = ½ q̃ Ω(ω, v)` for a twist held constant over `dt`.
pub fn integrate_pose(
    pose: &UnitDualQuaternion,
    twist: &Twist,
    dt: f64,
) -> Result<UnitDualQuaternion, Error> {
    let (q, p) = pose.pose();
    let q = integrate_attitude(&q, &twist.omega, dt)?;
    Ok(UnitDualQuaternion::from_pose(&q, &(p + twist.vel * dt)))
}

pub fn pose_error(desired: &UnitDualQuaternion, current: &UnitDualQuaternion) -> PoseError {
    let (qd, pd) = desired.pose();
    let (q, p) = current.pose();
    let e = (qd.conjugate() * q).renormalize();
    PoseError {
        dq0: e.w(),
        dq: *e.vector(),
        dp: p - pd,
    }
}
