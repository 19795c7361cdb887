//! Deterministic analysis objects on [0,1]: eigenbases, heat kernels, Θ
//! kernels, Sobolev norms, discrete difference operators and the constant K^ε.

mod basis;
mod estimates;
mod heat;
mod iota;
mod ops;
pub mod quad;
mod series;
mod sobolev;
mod theta;

use thiserror::Error;

pub use basis::{lattice_grid, unit_grid, BasisFn, BasisKind};
pub use estimates::{kernel_estimates_check, loglog_slope, BoundFit, KernelEstimates};
pub use heat::{heat_kernel, heat_kernel_with, kernel_row, mode_cutoff, KernelKind, KernelTable, TableKind};
pub use iota::{iota_coeff, iota_window, IotaWindow};
pub use ops::{discrete_ops, DiscreteOp};
pub use series::{cos_series, sin_series};
pub use sobolev::{field_norm, sobolev_norm_sq, SobolevCoeffs, FIELD_NORM_MODES, FIELD_NORM_ORDER};
pub use theta::{
    k_eps, k_eps_l2_defect, k_eps_quadrature, theta, theta0, theta0_norm_sq_quadrature,
    theta0_norm_sq_series, theta_coeff, theta_diag, theta_norm_sq,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("time or smoothing parameter must be positive and finite, got {0}")]
    NonPositiveTime(f64),
    #[error("grid has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error("eps = {eps} outside ({lo}, {hi})")]
    EpsRange { eps: f64, lo: f64, hi: f64 },
}
