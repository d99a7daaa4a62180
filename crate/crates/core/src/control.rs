//! Full-pose PI tracking law, its integrator states, the partial-attitude
//! (pointing) law and the Lyapunov diagnostic.
//!
//! Sign conventions follow the form under which the Lyapunov function
//! `V = ½‖δq‖² + ½‖δp‖² + ½‖η‖² + ½‖ξ‖²` is non-increasing:
//!
//! ```text
//! ω = Ad_{δq*} ω_d − sign(δq₀) (K_ωp δq + η₀ K_ωi η)
//! v = v_d − K_vp δp − K_vi ξ
//! η̇ = ½ η (|δq₀| K_ωi δq − sign(η₀) K_η η)
//! ξ̇ = K_vi δp − K_ξ ξ
//! ```
//!
//! [`LawVariant::Printed`] flips the `ξ̇` signs (and, for the pointing law,
//! the `η̇` signs) for auditing; it is expected to fail the Lyapunov check.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::dq::{Mat3, Twist, UnitQuaternion, Vec3};
use crate::kinematics::PoseError;
use crate::Error;

/// `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawVariant {
    #[default]
    Corrected,
    /// Flipped integrator signs under which `V` grows; kept for auditing.
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerState {
    pub eta: UnitQuaternion,
    pub xi: Vec3,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self {
            eta: UnitQuaternion::identity(),
            xi: Vec3::zeros(),
        }
    }
}

/// Symmetric positive-definite gain matrices of the PI law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainSet {
    pub k_omega_p: Mat3,
    pub k_omega_i: Mat3,
    pub k_v_p: Mat3,
    pub k_v_i: Mat3,
    pub k_eta: Mat3,
    pub k_xi: Mat3,
}

impl GainSet {
    /// All six gains as scalar multiples of the identity.
    pub fn scalar(
        k_omega_p: f64,
        k_omega_i: f64,
        k_v_p: f64,
        k_v_i: f64,
        k_eta: f64,
        k_xi: f64,
    ) -> Self {
        let i = Mat3::identity();
        Self {
            k_omega_p: i * k_omega_p,
            k_omega_i: i * k_omega_i,
            k_v_p: i * k_v_p,
            k_v_i: i * k_v_i,
            k_eta: i * k_eta,
            k_xi: i * k_xi,
        }
    }

    fn matrices(&self) -> [(&'static str, &Mat3); 6] {
        [
            ("k_omega_p", &self.k_omega_p),
            ("k_omega_i", &self.k_omega_i),
            ("k_v_p", &self.k_v_p),
            ("k_v_i", &self.k_v_i),
            ("k_eta", &self.k_eta),
            ("k_xi", &self.k_xi),
        ]
    }

    /// Checks symmetry and positive definiteness; returns the `(k_min, k_max)`
    /// eigenvalue bounds over all six matrices.
    pub fn validate(&self) -> Result<(f64, f64), Error> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (name, m) in self.matrices() {
            let asym = (m - m.transpose()).abs().max();
            if asym > 1e-12 {
                return Err(Error::InvalidGain(format!(
                    "{name} is not symmetric ({asym:e})"
                )));
            }
            let (a, b) = eigen_bounds(m);
            if !(a > 0.0) {
                return Err(Error::InvalidGain(format!(
                    "{name} is not positive definite (min eigenvalue {a})"
                )));
            }
            lo = lo.min(a);
            hi = hi.max(b);
        }
        Ok((lo, hi))
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_bounds(m: &Mat3) -> (f64, f64) {
    let e = SymmetricEigen::new(*m).eigenvalues;
    (e.min(), e.max())
}

/// Pointing error of the partial-attitude law. The quaternion
/// `δq₀ + δq` rotates `z_d` onto `z`; its conjugate rotates `z` onto `z_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialAttitudeError {
    pub dq0: f64,
    pub dq: Vec3,
}

impl PartialAttitudeError {
    pub fn quaternion(&self) -> UnitQuaternion {
        UnitQuaternion::new_unchecked(crate::dq::Quaternion::from_parts(self.dq0, self.dq))
    }
}

fn attitude_command(
    dq0: f64,
    dq: &Vec3,
    eta: &UnitQuaternion,
    gains: &GainSet,
    omega_d: &Vec3,
) -> Vec3 {
    let e = UnitQuaternion::new_unchecked(crate::dq::Quaternion::from_parts(dq0, *dq));
    let feedforward = e.conjugate().adjoint(omega_d);
    feedforward - (gains.k_omega_p * dq + gains.k_omega_i * eta.vector() * eta.w()) * sign(dq0)
}

fn eta_step(
    eta: &UnitQuaternion,
    dq0: f64,
    dq: &Vec3,
    gains: &GainSet,
    dt: f64,
    flipped: bool,
) -> UnitQuaternion {
    let mut u = gains.k_omega_i * dq * dq0.abs() - gains.k_eta * eta.vector() * sign(eta.w());
    if flipped {
        u = -u;
    }
    (*eta * UnitQuaternion::exp(&(u * (0.5 * dt)))).renormalize()
}

fn xi_step(xi: &Vec3, dp: &Vec3, gains: &GainSet, dt: f64, variant: LawVariant) -> Vec3 {
    let rate = gains.k_v_i * dp - gains.k_xi * xi;
    match variant {
        LawVariant::Corrected => xi + rate * dt,
        LawVariant::Printed => xi - rate * dt,
    }
}

fn check_dt(dt: f64) -> Result<(), Error> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveStep { dt })
    }
}

/// Commanded twist: body angular rate `ω` and inertial velocity `v`.
pub fn pose_pi_control(
    err: &PoseError,
    state: &ControllerState,
    gains: &GainSet,
    omega_d: &Vec3,
    v_d: &Vec3,
) -> Twist {
    let omega = attitude_command(err.dq0, &err.dq, &state.eta, gains, omega_d);
    let vel = v_d - gains.k_v_p * err.dp - gains.k_v_i * state.xi;
    Twist::new(omega, vel)
}

/// Advances `η` by its group step and `ξ` by an Euler step.
pub fn integrator_step(
    err: &PoseError,
    state: &ControllerState,
    gains: &GainSet,
    dt: f64,
    variant: LawVariant,
) -> Result<ControllerState, Error> {
    check_dt(dt)?;
    Ok(ControllerState {
        eta: eta_step(&state.eta, err.dq0, &err.dq, gains, dt, false),
        xi: xi_step(&state.xi, &err.dp, gains, dt, variant),
    })
}

/// Proportional-integral translation command for the formation center; used
/// alongside the pointing law, which carries no translation part.
pub fn translation_control(dp: &Vec3, xi: &Vec3, gains: &GainSet, v_d: &Vec3) -> Vec3 {
    v_d - gains.k_v_p * dp - gains.k_v_i * xi
}

pub fn translation_integrator_step(
    dp: &Vec3,
    xi: &Vec3,
    gains: &GainSet,
    dt: f64,
    variant: LawVariant,
) -> Result<Vec3, Error> {
    check_dt(dt)?;
    Ok(xi_step(xi, dp, gains, dt, variant))
}

pub fn lyapunov_value(err: &PoseError, state: &ControllerState) -> f64 {
    0.5 * (err.dq.norm_squared()
        + err.dp.norm_squared()
        + state.eta.vector().norm_squared()
        + state.xi.norm_squared())
}

/// Axis threshold below which `z` and `z_d` count as antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-8;

pub fn partial_error(z: &Vec3, z_d: &Vec3) -> Result<PartialAttitudeError, Error> {
    for n in [z.norm(), z_d.norm()] {
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::NonUnitAxis { norm: n });
        }
    }
    let cos = z.dot(z_d);
    if cos < -1.0 + ANTIPODAL_TOL {
        return Err(Error::AntipodalAxes { cos });
    }
    let s = (z + z_d).norm();
    let dq0 = (1.0 + cos) / s;
    let dq = z_d.cross(z) / s;
    // Remove the rounding left by slightly non-unit inputs.
    let n = (dq0 * dq0 + dq.norm_squared()).sqrt();
    Ok(PartialAttitudeError {
        dq0: dq0 / n,
        dq: dq / n,
    })
}

/// Pointing law: commanded angular rate and the advanced integrator state.
/// `ξ` is carried through unchanged.
pub fn partial_attitude_control(
    err: &PartialAttitudeError,
    state: &ControllerState,
    gains: &GainSet,
    omega_d: &Vec3,
    dt: f64,
    variant: LawVariant,
) -> Result<(Vec3, ControllerState), Error> {
    check_dt(dt)?;
    let omega = attitude_command(err.dq0, &err.dq, &state.eta, gains, omega_d);
    let eta = eta_step(
        &state.eta,
        err.dq0,
        &err.dq,
        gains,
        dt,
        variant == LawVariant::Printed,
    );
    Ok((omega, ControllerState { eta, xi: state.xi }))
}
