//! Closed-loop formation simulation with correlated measurement noise.
//!
//! Robots are ideal velocity-commanded points. At each step the true robot
//! positions are corrupted by Gauss-Markov noise, the controller runs on the
//! noisy cluster state, and the commanded robot velocities are integrated
//! exactly on the true positions.

mod batch;
mod loops;
mod noise;
mod run;
mod scenario;
mod script;

pub use batch::{monte_carlo, monte_carlo_keep, BatchAccumulator, BatchStats};
pub use loops::{align_axis, regulate_pose, AlignmentOutcome, RegulationOutcome};
pub use noise::{GaussMarkov, NoiseParams};
pub use run::{
    axis_from_angles, pointing_angles, simulate_prepared, simulate_run, RunFailure, RunResult,
    CHANNELS_2R, CHANNELS_3R,
};
pub use scenario::{
    ControllerMode, Formation, InitialOffset, PreparedScenario, Reference2R, Reference3R, Scenario,
    SCHEMA_VERSION,
};
pub use script::{ScalarScript, VectorScript};
