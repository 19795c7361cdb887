use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SpdeError;

/// dt ≤ STABILITY_CONSTANT/(Aλ_M) for the explicit drift. Empirical, not proven.
pub const STABILITY_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpdeParams {
    pub a: f64,
    pub d: f64,
    pub ebar: f64,
    pub modes: usize,
    pub dt: f64,
    pub eps: f64,
}

impl SpdeParams {
    /// The particle-limit values A = 1, D = 1/2 with M = 32, ε = 1/32 and the
    /// default step.
    pub fn limit(ebar: f64) -> Self {
        SpdeParams::new(1.0, 0.5, ebar, 32, 1.0 / 32.0).expect("defaults are valid")
    }

    pub fn new(a: f64, d: f64, ebar: f64, modes: usize, eps: f64) -> Result<Self, SpdeError> {
        let p = SpdeParams {
            a,
            d,
            ebar,
            modes,
            dt: Self::default_dt(a, modes),
            eps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self, SpdeError> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SpdeError> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(SpdeError::Param(format!("A must be positive, got {}", self.a)));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(SpdeError::Param(format!("D must be non-negative, got {}", self.d)));
        }
        if !self.ebar.is_finite() {
            return Err(SpdeError::Param("Ebar must be finite".into()));
        }
        if self.modes == 0 {
            return Err(SpdeError::Param("need at least one mode".into()));
        }
        if !(self.eps > 0.0 && self.eps < 0.25) {
            return Err(SpdeError::EpsRange(self.eps));
        }
        if !(self.dt > 0.0) {
            return Err(SpdeError::Param(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    /// 0.1/(Aλ_M).
    pub fn default_dt(a: f64, modes: usize) -> f64 {
        0.1 / (a * lambda(modes))
    }

    pub fn stability_bound(&self) -> f64 {
        STABILITY_CONSTANT / (self.a * lambda(self.modes))
    }

    /// D/(2A), the stationary variance of every mode.
    pub fn stationary_variance(&self) -> f64 {
        self.d / (2.0 * self.a)
    }

    /// The equivalent problem with A = 1, D = 2. Returns the new parameters,
    /// the time factor and the amplitude: Y_t = amp·Ỹ_{t·time}.
    pub fn reduced(&self) -> (SpdeParams, f64, f64) {
        let amp = (self.d / (2.0 * self.a)).sqrt();
        let p = SpdeParams {
            a: 1.0,
            d: 2.0,
            ebar: self.ebar * (self.d / (2.0 * self.a.powi(3))).sqrt(),
            modes: self.modes,
            dt: self.dt * self.a,
            eps: self.eps,
        };
        (p, self.a, amp)
    }
}

pub(crate) fn lambda(m: usize) -> f64 {
    let k = m as f64 * PI;
    k * k
}

/// Mode coefficients y_m = Y(e_m), m = 1..=M, at time t.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinState {
    pub y: Vec<f64>,
    pub t: f64,
    pub params: SpdeParams,
}

impl GalerkinState {
    pub fn zero(params: SpdeParams) -> Self {
        GalerkinState {
            y: vec![0.0; params.modes],
            t: 0.0,
            params,
        }
    }

    /// A draw from the white-noise law with variance D/(2A) per mode.
    pub fn stationary<R: Rng + ?Sized>(params: SpdeParams, rng: &mut R) -> Self {
        let sd = params.stationary_variance().sqrt();
        GalerkinState {
            y: (0..params.modes).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect(),
            t: 0.0,
            params,
        }
    }

    /// Y(φ) for φ given by its sine coefficients.
    pub fn pair(&self, coeffs: &[f64]) -> f64 {
        self.y.iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }
}
