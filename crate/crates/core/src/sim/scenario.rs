//! Scenario description and validation.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::noise::NoiseParams;
use super::script::{ScalarScript, VectorScript};
use crate::cluster::{GeometryGains, COINCIDENT_TOL};
use crate::control::LawVariant;
use crate::dq::Vec3;
use crate::gains::{Envelope3R, FixedGainTerms, GainSchedule2R, GainSchedule3R, GainTable3R};
use crate::kinematics::DEFAULT_DT;
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    /// Attitude gains held at the average of the schedule endpoints.
    Fixed,
    /// Attitude gains scheduled on the measured geometry.
    Adaptive,
}

/// 2R reference: centroid path, pointing direction as azimuth/elevation
/// (rad), separation (m).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference2R {
    pub position: VectorScript,
    pub azimuth: ScalarScript,
    pub elevation: ScalarScript,
    pub distance: ScalarScript,
}

/// 3R reference: centroid path, attitude as roll/pitch/yaw (rad, Z-Y-X), and
/// shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference3R {
    pub position: VectorScript,
    pub attitude: VectorScript,
    pub d2: ScalarScript,
    pub d3: ScalarScript,
    pub alpha: ScalarScript,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Formation {
    #[serde(rename = "2r")]
    TwoRobot {
        #[serde(default)]
        schedule: GainSchedule2R,
        reference: Reference2R,
    },
    #[serde(rename = "3r")]
    ThreeRobot {
        #[serde(default)]
        schedule: GainTable3R,
        #[serde(default)]
        envelope: Envelope3R,
        reference: Reference3R,
    },
}

/// Offset of the initial formation from the reference at `t = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialOffset {
    /// Centroid offset (m).
    #[serde(default)]
    pub position: [f64; 3],
    /// Attitude offset as an inertial rotation vector (rad). For 2R
    /// formations it rotates the pointing axis.
    #[serde(default)]
    pub rotation: [f64; 3],
    /// Added to `d` (2R) or to both `d₂` and `d₃` (3R) (m).
    #[serde(default)]
    pub distance: f64,
    /// Added to `α` (3R only, rad).
    #[serde(default)]
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Simulated time (s).
    pub duration: f64,
    /// Step size (s).
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub controller: ControllerMode,
    #[serde(default)]
    pub law: LawVariant,
    /// Default base seed for batches.
    #[serde(default)]
    pub seed: u64,
    pub noise: NoiseParams,
    pub fixed_gains: FixedGainTerms,
    #[serde(default)]
    pub geometry_gains: GeometryGains,
    #[serde(default)]
    pub initial: InitialOffset,
    pub formation: Formation,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn invalid(msg: String) -> Error {
    Error::InvalidScenario(msg)
}

impl Scenario {
    pub fn is_two_robot(&self) -> bool {
        matches!(self.formation, Formation::TwoRobot { .. })
    }

    /// Number of integration steps; the series hold `steps() + 1` samples.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        let n = self.duration / self.dt;
        if (n - n.round()).abs() > 1e-6 {
            return Err(invalid(format!(
                "duration {} is not a whole number of steps of {}",
                self.duration, self.dt
            )));
        }
        self.noise.validate()?;
        if self.dt > 0.5 * self.noise.t_c * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "dt = {} does not resolve the noise correlation time t_c = {} (need dt <= t_c/2)",
                self.dt, self.noise.t_c
            )));
        }
        self.fixed_gains.validate()?;
        self.geometry_gains.validate()?;
        let off = &self.initial;
        if off
            .position
            .iter()
            .chain(off.rotation.iter())
            .any(|v| !v.is_finite())
            || !off.distance.is_finite()
            || !off.alpha.is_finite()
        {
            return Err(invalid("initial offset must be finite".into()));
        }
        match &self.formation {
            Formation::TwoRobot {
                schedule,
                reference,
            } => {
                schedule.validate()?;
                reference.position.validate("reference.position")?;
                reference.azimuth.validate("reference.azimuth")?;
                reference.elevation.validate("reference.elevation")?;
                reference.distance.validate("reference.distance")?;
                if reference.elevation.values().any(|e| e.abs() > FRAC_PI_2) {
                    return Err(invalid(
                        "reference.elevation must lie in [-pi/2, pi/2]".into(),
                    ));
                }
                for d in reference
                    .distance
                    .values()
                    .chain([reference.distance.eval(0.0) + off.distance])
                {
                    if !(d > COINCIDENT_TOL) {
                        return Err(invalid(format!("2R distance must be positive, got {d}")));
                    }
                }
            }
            Formation::ThreeRobot {
                schedule,
                envelope,
                reference,
            } => {
                schedule.validate()?;
                envelope.validate().map_err(|e| invalid(e.to_string()))?;
                reference.position.validate("reference.position")?;
                reference.attitude.validate("reference.attitude")?;
                reference.d2.validate("reference.d2")?;
                reference.d3.validate("reference.d3")?;
                reference.alpha.validate("reference.alpha")?;
                let d_ok = |d: f64| d > COINCIDENT_TOL;
                if !reference.d2.values().chain(reference.d3.values()).all(d_ok)
                    || !d_ok(reference.d2.eval(0.0) + off.distance)
                    || !d_ok(reference.d3.eval(0.0) + off.distance)
                {
                    return Err(invalid("3R edge lengths must be positive".into()));
                }
                let a_ok = |a: f64| a > 0.0 && a < PI;
                if !reference.alpha.values().all(a_ok)
                    || !a_ok(reference.alpha.eval(0.0) + off.alpha)
                {
                    return Err(invalid("3R alpha must lie in (0, pi)".into()));
                }
            }
        }
        Ok(())
    }

    /// Validates and precomputes everything shared by the runs of a batch.
    pub fn prepare(&self) -> Result<PreparedScenario, Error> {
        self.validate()?;
        let schedule_3r = match &self.formation {
            Formation::ThreeRobot {
                schedule, envelope, ..
            } => Some(GainSchedule3R::new(schedule, envelope)?),
            Formation::TwoRobot { .. } => None,
        };
        Ok(PreparedScenario {
            scenario: self.clone(),
            schedule_3r,
        })
    }

    pub(crate) fn offset_position(&self) -> Vec3 {
        Vec3::from(self.initial.position)
    }

    pub(crate) fn offset_rotation(&self) -> Vec3 {
        Vec3::from(self.initial.rotation)
    }
}

#[derive(Clone, Debug)]
pub struct PreparedScenario {
    pub scenario: Scenario,
    pub schedule_3r: Option<GainSchedule3R>,
}
