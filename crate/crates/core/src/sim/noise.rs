//! First-order Gauss-Markov measurement noise.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    /// Stationary standard deviation per axis (m).
    pub sigma: f64,
    /// Correlation time (s).
    pub t_c: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            t_c: 2e-3,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "noise sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if !(self.t_c > 0.0 && self.t_c.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "noise t_c must be > 0, got {}",
                self.t_c
            )));
        }
        Ok(())
    }

    /// One-step correlation `φ = e^(−dt/t_c)`.
    pub fn phi(&self, dt: f64) -> f64 {
        (-dt / self.t_c).exp()
    }
}

/// Bank of independent Gauss-Markov channels sharing one step size.
#[derive(Clone, Debug)]
pub struct GaussMarkov {
    values: Vec<f64>,
    phi: f64,
    drive: f64,
}

impl GaussMarkov {
    /// Channels start from the stationary distribution.
    pub fn new<R: Rng + ?Sized>(
        channels: usize,
        params: &NoiseParams,
        dt: f64,
        rng: &mut R,
    ) -> Result<Self, Error> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::NonPositiveStep { dt });
        }
        let phi = params.phi(dt);
        let values = (0..channels)
            .map(|_| params.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(Self {
            values,
            phi,
            drive: params.sigma * (1.0 - phi * phi).sqrt(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x ← φ x + σ √(1 − φ²) w` on every channel.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[f64] {
        for x in &mut self.values {
            let w: f64 = rng.sample(StandardNormal);
            *x = self.phi * *x + self.drive * w;
        }
        &self.values
    }
}
