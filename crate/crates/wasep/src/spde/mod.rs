//! Limit-side reference processes on the sine basis: the Dirichlet OU process
//! sampled exactly, and a Galerkin integrator for the mollified stochastic
//! Burgers drift together with its Cole-Hopf image near the boundary.

mod burgers;
mod ou;
mod params;
mod she;

use thiserror::Error;

pub use burgers::{burgers_drift, burgers_step, BurgersIntegrator, BurgersOperator};
pub use ou::{ou_step, ou_transition};
pub use params::{GalerkinState, SpdeParams, STABILITY_CONSTANT};
pub use she::{psi_coeffs, she_consistency, she_mean_defect, she_stationary_mean, SheReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpdeError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("eps = {0} outside (0, 1/4)")]
    EpsRange(f64),
    #[error("step dt = {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("trajectory blew up at t = {0}")]
    Unstable(f64),
    #[error("state has {got} modes, operator has {want}")]
    Modes { got: usize, want: usize },
}
