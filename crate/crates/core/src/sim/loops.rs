//! Noise-free single-body closed loops used to check the control laws in
//! isolation from the formation kinematics.

use crate::control::{
    integrator_step, lyapunov_value, partial_attitude_control, partial_error, pose_pi_control,
    ControllerState, GainSet, LawVariant,
};
use crate::dq::{UnitDualQuaternion, UnitQuaternion, Vec3};
use crate::kinematics::{integrate_pose, pose_error, PoseError};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct RegulationOutcome {
    pub error: PoseError,
    pub state: ControllerState,
    pub initial_lyapunov: f64,
    pub final_lyapunov: f64,
    /// Largest one-step increase of `V` (negative if `V` always decreased).
    pub max_lyapunov_increase: f64,
}

impl RegulationOutcome {
    /// Largest of `‖δq‖`, `‖δp‖`, `‖η‖`, `‖ξ‖` at the end of the run.
    pub fn max_error(&self) -> f64 {
        self.error
            .dq
            .norm()
            .max(self.error.dp.norm())
            .max(self.state.eta.vector().norm())
            .max(self.state.xi.norm())
    }
}

/// Drives a rigid body from `initial` to a constant `reference` with the
/// full-pose PI law.
pub fn regulate_pose(
    initial: &UnitDualQuaternion,
    reference: &UnitDualQuaternion,
    gains: &GainSet,
    dt: f64,
    duration: f64,
    variant: LawVariant,
) -> Result<RegulationOutcome, Error> {
    let steps = (duration / dt).round() as usize;
    let mut pose = *initial;
    let mut state = ControllerState::default();
    let mut err = pose_error(reference, &pose);
    let v0 = lyapunov_value(&err, &state);
    let mut v_prev = v0;
    let mut max_inc = f64::NEG_INFINITY;
    for _ in 0..steps {
        let twist = pose_pi_control(&err, &state, gains, &Vec3::zeros(), &Vec3::zeros());
        state = integrator_step(&err, &state, gains, dt, variant)?;
        pose = integrate_pose(&pose, &twist, dt)?;
        err = pose_error(reference, &pose);
        let v = lyapunov_value(&err, &state);
        max_inc = max_inc.max(v - v_prev);
        v_prev = v;
    }
    Ok(RegulationOutcome {
        error: err,
        state,
        initial_lyapunov: v0,
        final_lyapunov: v_prev,
        max_lyapunov_increase: max_inc,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentOutcome {
    pub z: Vec3,
    /// `1 − ⟨z, z_d⟩` at the end of the run.
    pub misalignment: f64,
}

/// Rotates the axis `z0` onto the constant `z_d` with the pointing law; the
/// commanded rate is applied in the inertial frame.
pub fn align_axis(
    z0: &Vec3,
    z_d: &Vec3,
    gains: &GainSet,
    dt: f64,
    duration: f64,
    variant: LawVariant,
) -> Result<AlignmentOutcome, Error> {
    let steps = (duration / dt).round() as usize;
    let mut z = *z0;
    let mut state = ControllerState::default();
    for _ in 0..steps {
        let err = partial_error(&z, z_d)?;
        let (omega, next) =
            partial_attitude_control(&err, &state, gains, &Vec3::zeros(), dt, variant)?;
        z = UnitQuaternion::exp(&(omega * (0.5 * dt)))
            .adjoint(&z)
            .normalize();
        state = next;
    }
    Ok(AlignmentOutcome {
        z,
        misalignment: 1.0 - z.dot(z_d),
    })
}
