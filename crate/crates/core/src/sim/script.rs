//! Piecewise-linear reference scripts, held constant outside their knots.

use serde::{Deserialize, Serialize};

use crate::dq::Vec3;
use crate::Error;

fn check_times<'a>(name: &str, times: impl Iterator<Item = &'a f64>) -> Result<(), Error> {
    let mut prev = f64::NEG_INFINITY;
    let mut first = true;
    for &t in times {
        if !t.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "{name}: knot time {t} is not finite"
            )));
        }
        if first && t != 0.0 {
            return Err(Error::InvalidScenario(format!(
                "{name}: first knot must be at t = 0, got {t}"
            )));
        }
        if t < prev {
            return Err(Error::InvalidScenario(format!(
                "{name}: knot times must be non-decreasing"
            )));
        }
        prev = t;
        first = false;
    }
    if first {
        return Err(Error::InvalidScenario(format!(
            "{name}: script has no knots"
        )));
    }
    Ok(())
}

/// Index of the segment containing `t` and the blend factor inside it.
fn locate<const N: usize>(knots: &[[f64; N]], t: f64) -> (usize, f64) {
    if t <= knots[0][0] {
        return (0, 0.0);
    }
    let last = knots.len() - 1;
    if t >= knots[last][0] {
        return (last, 0.0);
    }
    // first knot strictly after t
    let k = knots.partition_point(|x| x[0] <= t);
    let (t0, t1) = (knots[k - 1][0], knots[k][0]);
    (k - 1, (t - t0) / (t1 - t0))
}

/// Scalar script: knots `[t, value]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarScript(pub Vec<[f64; 2]>);

impl ScalarScript {
    pub fn constant(v: f64) -> Self {
        Self(vec![[0.0, v]])
    }

    pub fn validate(&self, name: &str) -> Result<(), Error> {
        check_times(name, self.0.iter().map(|k| &k[0]))?;
        if self.0.iter().any(|k| !k[1].is_finite()) {
            return Err(Error::InvalidScenario(format!("{name}: non-finite value")));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (k, s) = locate(&self.0, t);
        if s == 0.0 {
            return self.0[k][1];
        }
        self.0[k][1] * (1.0 - s) + self.0[k + 1][1] * s
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|k| k[1])
    }
}

/// 3-vector script: knots `[t, x, y, z]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorScript(pub Vec<[f64; 4]>);

impl VectorScript {
    pub fn constant(v: Vec3) -> Self {
        Self(vec![[0.0, v.x, v.y, v.z]])
    }

    pub fn validate(&self, name: &str) -> Result<(), Error> {
        check_times(name, self.0.iter().map(|k| &k[0]))?;
        if self.0.iter().any(|k| k[1..].iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidScenario(format!("{name}: non-finite value")));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        let (k, s) = locate(&self.0, t);
        let at = |i: usize| Vec3::new(self.0[i][1], self.0[i][2], self.0[i][3]);
        if s == 0.0 {
            return at(k);
        }
        at(k) * (1.0 - s) + at(k + 1) * s
    }

    pub fn values(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.0.iter().map(|k| Vec3::new(k[1], k[2], k[3]))
    }
}
