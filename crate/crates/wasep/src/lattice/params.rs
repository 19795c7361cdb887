use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("lattice size n={0} must be at least 3")]
    LatticeTooSmall(usize),
    #[error("reservoir density rho={0} must lie strictly between 0 and 1")]
    Density(f64),
    #[error("asymmetry exponent gamma={0} must be at least 1/2")]
    Exponent(f64),
    #[error("asymmetry strength E={0} must be finite with 1 + E/n^gamma > 0")]
    Strength(f64),
    #[error("time horizon T={0} must be finite and nonnegative")]
    Horizon(f64),
    #[error(
        "transport-term rule: gamma={gamma} < 3/2 with E={e} != 0 requires rho = 1/2, got rho={rho}"
    )]
    TransportGate { gamma: f64, e: f64, rho: f64 },
}

/// Rate parameters of the chain: lattice size, asymmetry and reservoir density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Model {
    pub n: usize,
    pub gamma: f64,
    pub e: f64,
    pub rho: f64,
}

impl Model {
    pub fn new(n: usize, gamma: f64, e: f64, rho: f64) -> Result<Self, ParamError> {
        if n < 3 {
            return Err(ParamError::LatticeTooSmall(n));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(ParamError::Density(rho));
        }
        if !(gamma >= 0.5) || !gamma.is_finite() {
            return Err(ParamError::Exponent(gamma));
        }
        let m = Model { n, gamma, e, rho };
        if !e.is_finite() || m.bias() <= 0.0 {
            return Err(ParamError::Strength(e));
        }
        Ok(m)
    }

    /// ε_n = E / n^γ.
    pub fn asymmetry(&self) -> f64 {
        self.e / (self.n as f64).powf(self.gamma)
    }

    /// 1 + ε_n, the rate of a rightward bulk jump.
    pub fn bias(&self) -> f64 {
        1.0 + self.asymmetry()
    }

    pub fn chi(&self) -> f64 {
        self.rho * (1.0 - self.rho)
    }

    /// Below γ = 3/2 a nonzero drift only yields a centred field at ρ = 1/2.
    pub fn check_transport(&self) -> Result<(), ParamError> {
        if self.gamma < 1.5 && self.e != 0.0 && (self.rho - 0.5).abs() > 1e-12 {
            return Err(ParamError::TransportGate {
                gamma: self.gamma,
                e: self.e,
                rho: self.rho,
            });
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.n - 1
    }

    pub fn channel_count(&self) -> usize {
        2 * (self.n - 2) + 4
    }
}

/// One trajectory: model, macroscopic horizon and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimParams {
    pub model: Model,
    pub t_end: f64,
    pub seed: u64,
}

impl SimParams {
    pub fn new(model: Model, t_end: f64, seed: u64) -> Result<Self, ParamError> {
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(ParamError::Horizon(t_end));
        }
        model.check_transport()?;
        Ok(SimParams { model, t_end, seed })
    }

    pub fn n(&self) -> usize {
        self.model.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_ranges() {
        assert_eq!(Model::new(2, 0.5, 1.0, 0.5), Err(ParamError::LatticeTooSmall(2)));
        assert!(Model::new(10, 0.5, 1.0, 1.0).is_err());
        assert!(Model::new(10, 0.4, 1.0, 0.5).is_err());
        assert!(Model::new(4, 0.5, -2.0, 0.5).is_err());
        assert!(Model::new(4, 0.5, -1.0, 0.5).is_ok());
    }

    #[test]
    fn transport_gate() {
        let m = Model::new(100, 0.5, 1.0, 0.3).unwrap();
        let err = SimParams::new(m, 1.0, 7).unwrap_err();
        assert!(err.to_string().contains("transport-term rule"));
        let m = Model::new(100, 1.5, 1.0, 0.3).unwrap();
        assert!(SimParams::new(m, 1.0, 7).is_ok());
        let m = Model::new(100, 0.5, 0.0, 0.3).unwrap();
        assert!(SimParams::new(m, 1.0, 7).is_ok());
    }

    #[test]
    fn asymmetry_value() {
        let m = Model::new(100, 0.5, 1.0, 0.5).unwrap();
        assert!((m.bias() - 1.1).abs() < 1e-15);
        assert_eq!(m.channel_count(), 200);
    }
}
