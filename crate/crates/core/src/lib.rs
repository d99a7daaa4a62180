//! Dual-quaternion cluster-space control for two- and three-vehicle formations.
//!
//! The crate is layered bottom-up:
//!
//! - [`dq`]: quaternion and dual-quaternion algebra.
//! - [`kinematics`]: group integrators and the pose tracking error.
//! - [`control`]: the full-pose PI law with its integrator states, the
//!   partial-attitude (pointing) law and the Lyapunov diagnostic.
//! - [`cluster`]: formation forward kinematics, inverse velocity maps and
//!   geometry controllers.
//! - [`gains`]: geometry-adaptive gain scheduling.
//! - [`sim`]: closed-loop scenario simulation with correlated measurement
//!   noise and Monte-Carlo batching.
//!
//! Vehicles are velocity-commanded points; every function is pure apart from
//! the explicit RNG streams owned by a simulation run.

// `!(x > tol)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod control;
pub mod dq;
pub mod gains;
pub mod kinematics;
pub mod sim;

pub use cluster::{Cluster2RState, Cluster3RState, ClusterVelocity3R, Geometry3R, GeometryGains};
pub use control::{ControllerState, GainSet, LawVariant, PartialAttitudeError};
pub use dq::{
    DualQuaternion, DualVector, Mat3, Quaternion, Twist, UnitDualQuaternion, UnitQuaternion, Vec3,
};
pub use gains::{FixedGainTerms, GainSchedule2R, GainSchedule3R, Inertia};
pub use kinematics::PoseError;
pub use sim::{BatchStats, NoiseParams, RunResult, Scenario};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quaternion is not unit norm (norm = {norm})")]
    NonUnit { norm: f64 },
    #[error("dual quaternion is not purely imaginary (real part {real})")]
    NotPure { real: f64 },
    #[error("time step must be positive, got {dt}")]
    NonPositiveStep { dt: f64 },
    #[error("axis is not unit norm (norm = {norm})")]
    NonUnitAxis { norm: f64 },
    #[error("antipodal pointing error: z and z_d are opposite (<z, z_d> = {cos})")]
    AntipodalAxes { cos: f64 },
    #[error("degenerate formation: {0}")]
    DegenerateFormation(&'static str),
    #[error("singular formation geometry (m = {m})")]
    SingularGeometry { m: f64 },
    #[error("invalid gain: {0}")]
    InvalidGain(String),
    #[error("interpolation parameter {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("only {succeeded} runs succeeded, at least {required} are needed")]
    TooFewRuns { succeeded: usize, required: usize },
}
