//! Fluctuation fields and path functionals of a running chain.

mod bg;
mod cole_hopf;
mod consts;
mod fields;
mod linear;
mod martingale;

use thiserror::Error;

use crate::lattice::{Channel, Occupancy};

pub use bg::{bg_average, BgObserver};
pub use cole_hopf::{
    cole_hopf_field, direct_compensator, log_xi, mean_current_field0, mean_xi0, t_n_apply, ColeHopfObserver,
    ColeHopfSample,
};
pub use consts::DriftConstants;
pub use fields::{
    density_field, density_sample, height_field, height_sample, relation_residual, renormalized_square,
    FieldSample, RelationResidual,
};
pub use linear::{LinearObserver, LinearSample};
pub use martingale::{realized_qv, MartSample, MartingaleObserver};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("grid has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error("window length {ell} must satisfy 1 <= l < n/4 (n = {n})")]
    Window { ell: usize, n: usize },
    #[error("site {x} outside 1..=n-2 (n = {n})")]
    Site { x: usize, n: usize },
    #[error("eps = {0} outside (0, 1/4)")]
    EpsRange(f64),
    #[error("eps = {eps} is not a whole number of the {cells} grid cells")]
    EpsGrid { eps: f64, cells: usize },
    #[error("this observable needs rho = 1/2, got {0}")]
    Density(f64),
}

/// η(x) just before `ch` fired, given the state just after.
pub(crate) fn site_before(eta: &Occupancy, ch: Channel, x: usize) -> u8 {
    let n = eta.n();
    let now = eta.get(x);
    let hit = match ch {
        Channel::BulkRight(y) | Channel::BulkLeft(y) => x == y || x == y + 1,
        Channel::EnterLeft | Channel::ExitLeft => x == 1,
        Channel::EnterRight | Channel::ExitRight => x == n - 1,
    };
    if hit {
        1 - now
    } else {
        now
    }
}

/// Sites whose occupation `ch` changes.
pub(crate) fn changed_sites(n: usize, ch: Channel) -> ([usize; 2], usize) {
    match ch {
        Channel::BulkRight(x) | Channel::BulkLeft(x) => ([x, x + 1], 2),
        Channel::EnterLeft | Channel::ExitLeft => ([1, 0], 1),
        Channel::EnterRight | Channel::ExitRight => ([n - 1, 0], 1),
    }
}
