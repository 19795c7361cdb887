//! Experiment catalog: each entry resolves a flat key=value configuration,
//! runs on the rayon pool and returns a table with pass/fail criteria.

mod boundary;
mod cole_hopf;
mod deterministic;
mod exact;
mod fields;
mod martingale;
mod report;
mod sbe;
mod settings;
mod stats;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lattice::{EngineError, ExactError, Model, ParamError};
use crate::observables::ObservableError;
use crate::spde::SpdeError;
use crate::spectral::SpectralError;

pub use report::{Criterion, Report, Row, StatTable, Verdict};
pub use settings::{KeySpec, Settings};
pub use stats::{bonferroni_z, jackknife, mean, mean_se, pairwise_sum, run_replicas, Estimate};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
    #[error("unknown key '{key}' for experiment '{exp}'")]
    UnknownKey { key: String, exp: String },
    #[error("bad value '{value}' for '{key}': {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Spde(#[from] SpdeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl HarnessError {
    /// True for errors in the configuration rather than in the run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            HarnessError::UnknownExperiment(_)
                | HarnessError::UnknownKey { .. }
                | HarnessError::BadValue { .. }
                | HarnessError::Param(_)
        )
    }
}

type Hook = fn(&Settings) -> Result<(), HarnessError>;
type Runner = fn(&Settings) -> Result<Report, HarnessError>;

/// One runnable experiment.
pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub gating: bool,
    pub keys: &'static [KeySpec],
    check: Hook,
    run: Runner,
}

static CATALOG: [ExperimentInfo; 12] = [
    ExperimentInfo {
        id: "invariance",
        summary: "Bernoulli product measure is invariant; detailed balance only without drift",
        gating: true,
        keys: exact::KEYS,
        check: exact::check,
        run: exact::run,
    },
    ExperimentInfo {
        id: "stationary_covariance",
        summary: "equal-time covariance of the density field against chi times the L2 pairing",
        gating: true,
        keys: fields::COV_KEYS,
        check: fields::cov_check,
        run: fields::cov_run,
    },
    ExperimentInfo {
        id: "ou_limit",
        summary: "without effective drift the fluctuation field is the Dirichlet OU process",
        gating: true,
        keys: fields::OU_KEYS,
        check: fields::ou_check,
        run: fields::ou_run,
    },
    ExperimentInfo {
        id: "martingale",
        summary: "Dynkin martingale is centred and its quadratic variation matches the predictable one",
        gating: true,
        keys: martingale::KEYS,
        check: martingale::check,
        run: martingale::run,
    },
    ExperimentInfo {
        id: "bg_principle",
        summary: "second-order Boltzmann-Gibbs replacement error scales like t(l/n + t n/l^2)",
        gating: true,
        keys: boundary::BG_KEYS,
        check: boundary::bg_check,
        run: boundary::bg_run,
    },
    ExperimentInfo {
        id: "height_boundary",
        summary: "boundary heights minus the linear drift vanish like 1/n after n^(-3/2) scaling",
        gating: true,
        keys: boundary::HEIGHT_KEYS,
        check: boundary::height_check,
        run: boundary::height_run,
    },
    ExperimentInfo {
        id: "boundary_field",
        summary: "time-integrated field tested against boundary windows shrinks with the window",
        gating: true,
        keys: boundary::FIELD_KEYS,
        check: boundary::field_check,
        run: boundary::field_run,
    },
    ExperimentInfo {
        id: "cole_hopf",
        summary: "Cole-Hopf constants converge and the microscopic transform is a martingale",
        gating: true,
        keys: cole_hopf::KEYS,
        check: cole_hopf::check,
        run: cole_hopf::run,
    },
    ExperimentInfo {
        id: "sbe_match",
        summary: "particle fluctuations against the Galerkin stochastic Burgers equation",
        gating: false,
        keys: sbe::KEYS,
        check: sbe::check,
        run: sbe::run,
    },
    ExperimentInfo {
        id: "k_constant",
        summary: "the renormalisation function K tends to E^2/12 in L2",
        gating: true,
        keys: deterministic::K_KEYS,
        check: deterministic::k_check,
        run: deterministic::k_run,
    },
    ExperimentInfo {
        id: "theta",
        summary: "norm of the antiderivative kernel and its diagonal limit",
        gating: true,
        keys: deterministic::THETA_KEYS,
        check: deterministic::theta_check,
        run: deterministic::theta_run,
    },
    ExperimentInfo {
        id: "heat_kernel",
        summary: "Dirichlet and Neumann heat-kernel bounds as power laws in t",
        gating: true,
        keys: deterministic::HEAT_KEYS,
        check: deterministic::heat_check,
        run: deterministic::heat_run,
    },
];

pub fn catalog() -> &'static [ExperimentInfo] {
    &CATALOG
}

pub fn find(id: &str) -> Result<&'static ExperimentInfo, HarnessError> {
    CATALOG
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| HarnessError::UnknownExperiment(id.to_string()))
}

/// Defaults overlaid with `overrides`, validated without running anything.
pub fn resolve(id: &str, seed: u64, overrides: &BTreeMap<String, String>) -> Result<Settings, HarnessError> {
    let info = find(id)?;
    let s = Settings::resolve(info.id, info.keys, seed, overrides)?;
    (info.check)(&s)?;
    Ok(s)
}

/// Convenience for callers holding string pairs.
pub fn resolve_pairs(id: &str, seed: u64, pairs: &[(&str, &str)]) -> Result<Settings, HarnessError> {
    let map = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    resolve(id, seed, &map)
}

pub fn run(s: &Settings) -> Result<Report, HarnessError> {
    let info = find(&s.id)?;
    (info.check)(s)?;
    (info.run)(s)
}

/// Model from the n, gamma, E, rho keys, with the transport-term rule applied.
fn model_from(s: &Settings, n: usize) -> Result<Model, HarnessError> {
    let m = Model::new(n, s.f64("gamma")?, s.f64("E")?, s.f64("rho")?)?;
    m.check_transport()?;
    Ok(m)
}

/// e_m(x/n) at sites x = 1..n−1.
fn sine_sites(n: usize, m: usize) -> Vec<f64> {
    let g = crate::spectral::BasisFn::sine(m).grid(n);
    g[1..n].to_vec()
}

fn require_half(s: &Settings) -> Result<(), HarnessError> {
    if (s.f64("rho")? - 0.5).abs() > 1e-12 {
        return Err(s.reject("rho", "this experiment needs rho = 1/2"));
    }
    Ok(())
}

/// Evenly spaced record times j·t/k for j = from..=k.
fn record_grid(t: f64, k: usize, from: usize) -> Vec<f64> {
    (from..=k).map(|j| t * j as f64 / k as f64).collect()
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}
