use std::f64::consts::PI;

use super::settings::{KeySpec, Settings};
use super::stats::{jackknife, mean, mean_se, run_replicas};
use super::{model_from, record_grid, require_half, sine_sites, Criterion, HarnessError, Report};
use crate::lattice::{replica_rng, Engine, Model};
use crate::observables::LinearObserver;
use crate::spde::{ou_step, GalerkinState, SpdeParams};

/// Stream offset separating the Galerkin replicas from the particle ones.
const SPDE_STREAM: u64 = 1 << 32;

pub(super) const COV_KEYS: &[KeySpec] = &[
    KeySpec::new("n", "1024", "lattice size"),
    KeySpec::new("gamma", "0.5", "asymmetry exponent"),
    KeySpec::new("E", "1", "asymmetry strength"),
    KeySpec::new("rho", "0.5", "reservoir density (must be 1/2)"),
    KeySpec::new("replicas", "64", "independent trajectories"),
    KeySpec::new("t", "0.08", "macroscopic horizon"),
    KeySpec::new("snapshots", "160", "evenly spaced snapshots per trajectory"),
    KeySpec::new("modes", "2", "test functions e_1..e_modes"),
    KeySpec::new("z", "3", "CI width in standard errors"),
    KeySpec::new("limit_tol", "0.01", "allowed gap between the finite-n pairing and its limit, relative to chi"),
];

struct CovCfg {
    model: Model,
    replicas: usize,
    t: f64,
    snapshots: usize,
    modes: usize,
    z: f64,
    limit_tol: f64,
}

fn cov_parse(s: &Settings) -> Result<CovCfg, HarnessError> {
    require_half(s)?;
    let model = model_from(s, s.usize("n")?)?;
    let modes = s.count("modes")?;
    if modes >= model.n {
        return Err(s.reject("modes", "must be below n"));
    }
    Ok(CovCfg {
        model,
        replicas: s.count("replicas")?.max(2),
        t: s.positive("t")?,
        snapshots: s.count("snapshots")?,
        modes,
        z: s.positive("z")?,
        limit_tol: s.positive("limit_tol")?,
    })
}

pub(super) fn cov_check(s: &Settings) -> Result<(), HarnessError> {
    cov_parse(s).map(|_| ())
}

pub(super) fn cov_run(s: &Settings) -> Result<Report, HarnessError> {
    let c = cov_parse(s)?;
    let n = c.model.n;
    let weights: Vec<Vec<f64>> = (1..=c.modes).map(|m| sine_sites(n, m)).collect();
    let pairs: Vec<(usize, usize)> = (0..c.modes).flat_map(|i| (i..c.modes).map(move |j| (i, j))).collect();
    let records = record_grid(c.t, c.snapshots, 1);
    let per: Vec<Vec<f64>> = run_replicas(c.replicas, |i| {
        let mut eng = Engine::stationary(c.model, replica_rng(s.seed, i));
        let mut obs = LinearObserver::new(eng.eta(), c.model.rho, weights.clone())?;
        eng.run(c.t, &records, &mut obs)?;
        Ok::<_, HarnessError>(
            pairs
                .iter()
                .map(|&(a, b)| {
                    let v: Vec<f64> = obs.samples.iter().map(|smp| smp.y[a] * smp.y[b]).collect();
                    mean(&v)
                })
                .collect(),
        )
    })?;
    let chi = c.model.chi();
    let mut r = Report::new(&s.id, true);
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let v: Vec<f64> = per.iter().map(|p| p[k]).collect();
        let est = mean_se(&v);
        let finite = chi / n as f64 * weights[a].iter().zip(&weights[b]).map(|(x, y)| x * y).sum::<f64>();
        let limit = if a == b { chi } else { 0.0 };
        let tag = format!("{}_{}", a + 1, b + 1);
        r.table.push(format!("cov {tag}"), est);
        r.table.push_exact(format!("finite-n pairing {tag}"), finite);
        r.table.push_exact(format!("limit {tag}"), limit);
        r.criteria.push(Criterion::gate(
            format!("covariance ({tag}) matches chi<e_m,e_k>_n"),
            est.covers(finite, c.z),
            format!("{:.5} +- {:.5} vs {finite:.5}", est.mean, est.se),
        ));
        r.criteria.push(Criterion::gate(
            format!("finite-n pairing ({tag}) near its limit"),
            (finite - limit).abs() <= c.limit_tol * chi,
            format!("{finite:.6} vs {limit}"),
        ));
    }
    Ok(r)
}

pub(super) const OU_KEYS: &[KeySpec] = &[
    KeySpec::new("n", "1024", "lattice size"),
    KeySpec::new("gamma", "1", "asymmetry exponent; E = 0 or gamma > 1/2"),
    KeySpec::new("E", "0", "asymmetry strength"),
    KeySpec::new("rho", "0.5", "reservoir density (must be 1/2)"),
    KeySpec::new("replicas", "40", "particle trajectories"),
    KeySpec::new("t", "0.25", "macroscopic horizon"),
    KeySpec::new("spacing", "0.005", "record spacing"),
    KeySpec::new("lags", "0.02,0.05,0.1", "autocovariance lags, multiples of spacing"),
    KeySpec::new("ou_replicas", "400", "exact OU trajectories"),
    KeySpec::new("z", "3", "CI width in standard errors"),
];

struct OuCfg {
    model: Model,
    replicas: usize,
    t: f64,
    spacing: f64,
    steps: usize,
    lags: Vec<usize>,
    ou_replicas: usize,
    z: f64,
}

fn ou_parse(s: &Settings) -> Result<OuCfg, HarnessError> {
    require_half(s)?;
    let model = model_from(s, s.usize("n")?)?;
    if model.e != 0.0 && model.gamma <= 0.5 {
        return Err(s.reject("gamma", "the OU limit needs E = 0 or gamma > 1/2"));
    }
    let t = s.positive("t")?;
    let spacing = s.positive("spacing")?;
    let steps = (t / spacing).round() as usize;
    if steps == 0 || (steps as f64 * spacing - t).abs() > 1e-9 * t {
        return Err(s.reject("spacing", "must divide t"));
    }
    let mut lags = Vec::new();
    for l in s.f64_list("lags")? {
        let k = (l / spacing).round() as usize;
        if k == 0 || (k as f64 * spacing - l).abs() > 1e-9 * l || k >= steps {
            return Err(s.reject("lags", "each lag must be a positive multiple of spacing below t"));
        }
        lags.push(k);
    }
    Ok(OuCfg {
        model,
        replicas: s.count("replicas")?.max(2),
        t,
        spacing,
        steps,
        lags,
        ou_replicas: s.count("ou_replicas")?.max(2),
        z: s.positive("z")?,
    })
}

pub(super) fn ou_check(s: &Settings) -> Result<(), HarnessError> {
    ou_parse(s).map(|_| ())
}

/// Per-trajectory statistics of the e_1 series: autocovariances at the
/// requested lags (lag 0 first), second and fourth moments.
fn series_stats(y: &[f64], lags: &[usize]) -> (Vec<f64>, f64, f64) {
    let acov = std::iter::once(0)
        .chain(lags.iter().copied())
        .map(|k| {
            let v: Vec<f64> = y.windows(k + 1).map(|w| w[0] * w[k]).collect();
            mean(&v)
        })
        .collect();
    let m2 = mean(&y.iter().map(|v| v * v).collect::<Vec<_>>());
    let m4 = mean(&y.iter().map(|v| v.powi(4)).collect::<Vec<_>>());
    (acov, m2, m4)
}

fn kurtosis(recs: &[(Vec<f64>, f64, f64)]) -> f64 {
    let m2 = mean(&recs.iter().map(|r| r.1).collect::<Vec<_>>());
    let m4 = mean(&recs.iter().map(|r| r.2).collect::<Vec<_>>());
    m4 / (m2 * m2)
}

pub(super) fn ou_run(s: &Settings) -> Result<Report, HarnessError> {
    let c = ou_parse(s)?;
    let n = c.model.n;
    let w = sine_sites(n, 1);
    let records = record_grid(c.t, c.steps, 0);
    let particle: Vec<(Vec<f64>, f64, f64)> = run_replicas(c.replicas, |i| {
        let mut eng = Engine::stationary(c.model, replica_rng(s.seed, i));
        let mut obs = LinearObserver::new(eng.eta(), c.model.rho, vec![w.clone()])?;
        eng.run(c.t, &records, &mut obs)?;
        let y: Vec<f64> = obs.samples.iter().map(|smp| smp.y[0]).collect();
        Ok::<_, HarnessError>(series_stats(&y, &c.lags))
    })?;
    let params = SpdeParams::new(1.0, 2.0 * c.model.chi(), 0.0, 1, 0.125)?;
    let ou: Vec<(Vec<f64>, f64, f64)> = run_replicas(c.ou_replicas, |i| {
        let mut rng = replica_rng(s.seed, SPDE_STREAM + i);
        let mut st = GalerkinState::stationary(params, &mut rng);
        let mut y = Vec::with_capacity(c.steps + 1);
        y.push(st.y[0]);
        for _ in 0..c.steps {
            st = ou_step(&st, c.spacing, &mut rng);
            y.push(st.y[0]);
        }
        Ok::<_, HarnessError>(series_stats(&y, &c.lags))
    })?;
    let chi = c.model.chi();
    let mut r = Report::new(&s.id, true);
    let lag_times: Vec<f64> = std::iter::once(0.0)
        .chain(c.lags.iter().map(|&k| k as f64 * c.spacing))
        .collect();
    for (j, &lag) in lag_times.iter().enumerate() {
        let p = mean_se(&particle.iter().map(|x| x.0[j]).collect::<Vec<_>>());
        let o = mean_se(&ou.iter().map(|x| x.0[j]).collect::<Vec<_>>());
        let target = chi * (-PI * PI * lag).exp();
        r.table.push(format!("particle autocovariance lag={lag}"), p);
        r.table.push(format!("ou autocovariance lag={lag}"), o);
        r.table.push_exact(format!("target autocovariance lag={lag}"), target);
        r.criteria.push(Criterion::gate(
            format!("particle autocovariance at lag {lag} matches chi*exp(-pi^2 s)"),
            p.covers(target, c.z),
            format!("{:.5} +- {:.5} vs {target:.5}", p.mean, p.se),
        ));
        let zd = p.z_diff(&o);
        r.criteria.push(Criterion::gate(
            format!("particle and OU agree at lag {lag}"),
            zd.abs() <= c.z,
            format!("z = {zd:.2}"),
        ));
    }
    let kp = jackknife(&particle, kurtosis);
    let ko = jackknife(&ou, kurtosis);
    r.table.push("particle kurtosis", kp);
    r.table.push("ou kurtosis", ko);
    r.criteria.push(Criterion::gate(
        "particle marginal is Gaussian (kurtosis 3)",
        kp.covers(3.0, c.z),
        format!("{:.3} +- {:.3}", kp.mean, kp.se),
    ));
    Ok(r)
}
