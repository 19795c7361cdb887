use super::settings::{KeySpec, Settings};
use super::stats::{jackknife, mean, mean_se, run_replicas, Estimate};
use super::{record_grid, require_half, sine_sites, Criterion, HarnessError, Report};
use crate::lattice::{replica_rng, Engine, Model};
use crate::observables::LinearObserver;
use crate::spde::{BurgersIntegrator, GalerkinState, SpdeParams};

const SPDE_STREAM: u64 = 1 << 32;

pub(super) const KEYS: &[KeySpec] = &[
    KeySpec::new("n", "128", "lattice size"),
    KeySpec::new("gamma", "0.5", "asymmetry exponent"),
    KeySpec::new("E", "2", "asymmetry strength; both signs are run"),
    KeySpec::new("rho", "0.5", "reservoir density (must be 1/2)"),
    KeySpec::new("t", "20", "particle horizon"),
    KeySpec::new("lag", "0.02", "record spacing"),
    KeySpec::new("replicas", "20", "particle trajectories per sign"),
    KeySpec::new("modes", "16", "Galerkin modes"),
    KeySpec::new("eps", "0.0625", "Galerkin window width"),
    KeySpec::new("spde_t", "20", "Galerkin horizon"),
    KeySpec::new("spde_replicas", "20", "Galerkin trajectories per sign"),
    KeySpec::new("z", "3", "CI width in standard errors"),
];

struct Cfg {
    models: [Model; 2],
    t: f64,
    lag: f64,
    replicas: usize,
    spde: [SpdeParams; 2],
    steps_per_lag: usize,
    spde_t: f64,
    spde_replicas: usize,
    z: f64,
}

fn parse(s: &Settings) -> Result<Cfg, HarnessError> {
    require_half(s)?;
    let e = s.f64("E")?.abs();
    if e == 0.0 {
        return Err(s.reject("E", "the comparison needs E != 0"));
    }
    let (n, gamma, rho) = (s.usize("n")?, s.f64("gamma")?, s.f64("rho")?);
    let models = [Model::new(n, gamma, e, rho)?, Model::new(n, gamma, -e, rho)?];
    let t = s.positive("t")?;
    let lag = s.positive("lag")?;
    let spde_t = s.positive("spde_t")?;
    if lag * 2.0 > t.min(spde_t) {
        return Err(s.reject("lag", "need at least two lags within each horizon"));
    }
    let modes = s.count("modes")?;
    let eps = s.positive("eps")?;
    let base = SpdeParams::new(1.0, 0.5, e, modes, eps)?;
    let steps_per_lag = (lag / base.dt).ceil() as usize;
    let dt = lag / steps_per_lag as f64;
    let spde = [
        base.with_dt(dt)?,
        SpdeParams::new(1.0, 0.5, -e, modes, eps)?.with_dt(dt)?,
    ];
    Ok(Cfg {
        models,
        t,
        lag,
        replicas: s.count("replicas")?.max(2),
        spde,
        steps_per_lag,
        spde_t,
        spde_replicas: s.count("spde_replicas")?.max(2),
        z: s.positive("z")?,
    })
}

pub(super) fn check(s: &Settings) -> Result<(), HarnessError> {
    parse(s).map(|_| ())
}

/// Per-trajectory moments of the (Y(e_1), Y(e_2)) series.
#[derive(Debug, Clone, Copy)]
struct Rec {
    /// mean of (Y(e_2)_{i+1} − Y(e_2)_i)·Y(e_1)_i².
    odd: f64,
    /// Raw moments 2 and 3 of the e_1 and e_2 increments.
    d1: [f64; 2],
    d2: [f64; 2],
    /// Raw moments 2 and 4 of Y(e_1).
    m2: f64,
    m4: f64,
}

fn moments(y1: &[f64], y2: &[f64]) -> Rec {
    let k = y1.len() - 1;
    let pick = |f: &dyn Fn(usize) -> f64| mean(&(0..k).map(f).collect::<Vec<_>>());
    let inc1 = |i: usize| y1[i + 1] - y1[i];
    let inc2 = |i: usize| y2[i + 1] - y2[i];
    Rec {
        odd: pick(&|i| inc2(i) * y1[i] * y1[i]),
        d1: [pick(&|i| inc1(i).powi(2)), pick(&|i| inc1(i).powi(3))],
        d2: [pick(&|i| inc2(i).powi(2)), pick(&|i| inc2(i).powi(3))],
        m2: mean(&y1.iter().map(|v| v * v).collect::<Vec<_>>()),
        m4: mean(&y1.iter().map(|v| v.powi(4)).collect::<Vec<_>>()),
    }
}

fn skew(recs: &[Rec], pick: fn(&Rec) -> [f64; 2]) -> f64 {
    let m2 = mean(&recs.iter().map(|r| pick(r)[0]).collect::<Vec<_>>());
    let m3 = mean(&recs.iter().map(|r| pick(r)[1]).collect::<Vec<_>>());
    m3 / m2.powf(1.5)
}

fn kurt(recs: &[Rec]) -> f64 {
    let m2 = mean(&recs.iter().map(|r| r.m2).collect::<Vec<_>>());
    let m4 = mean(&recs.iter().map(|r| r.m4).collect::<Vec<_>>());
    m4 / (m2 * m2)
}

struct Side {
    odd: Estimate,
    skew1: Estimate,
    skew2: Estimate,
    kurt: Estimate,
}

fn summarise(recs: &[Rec]) -> Side {
    Side {
        odd: mean_se(&recs.iter().map(|r| r.odd).collect::<Vec<_>>()),
        skew1: jackknife(recs, |r| skew(r, |x| x.d1)),
        skew2: jackknife(recs, |r| skew(r, |x| x.d2)),
        kurt: jackknife(recs, kurt),
    }
}

fn particle(s: &Settings, c: &Cfg, sign: usize) -> Result<Vec<Rec>, HarnessError> {
    let model = c.models[sign];
    let n = model.n;
    let w = vec![sine_sites(n, 1), sine_sites(n, 2)];
    let k = (c.t / c.lag).floor() as usize;
    let records = record_grid(k as f64 * c.lag, k, 0);
    run_replicas(c.replicas, |i| {
        let mut eng = Engine::stationary(model, replica_rng(s.seed, ((sign as u64) << 40) + i));
        let mut obs = LinearObserver::new(eng.eta(), model.rho, w.clone())?;
        eng.run(k as f64 * c.lag, &records, &mut obs)?;
        let y1: Vec<f64> = obs.samples.iter().map(|x| x.y[0]).collect();
        let y2: Vec<f64> = obs.samples.iter().map(|x| x.y[1]).collect();
        Ok(moments(&y1, &y2))
    })
}

fn galerkin(s: &Settings, c: &Cfg, sign: usize) -> Result<Vec<Rec>, HarnessError> {
    let params = c.spde[sign];
    let integ = BurgersIntegrator::new(&params)?;
    let k = (c.spde_t / c.lag).floor() as usize;
    run_replicas(c.spde_replicas, |i| {
        let mut rng = replica_rng(s.seed, SPDE_STREAM + ((sign as u64) << 40) + i);
        let mut st = GalerkinState::stationary(params, &mut rng);
        let (mut y1, mut y2) = (vec![st.y[0]], vec![st.y[1]]);
        for _ in 0..k {
            for _ in 0..c.steps_per_lag {
                integ.step(&mut st, &mut rng)?;
            }
            y1.push(st.y[0]);
            y2.push(st.y[1]);
        }
        Ok::<_, HarnessError>(moments(&y1, &y2))
    })
}

pub(super) fn run(s: &Settings) -> Result<Report, HarnessError> {
    let c = parse(s)?;
    if c.spde[0].modes < 2 {
        return Err(s.reject("modes", "need at least two modes"));
    }
    let mut r = Report::new(&s.id, false);
    let mut sides = Vec::new();
    for sign in 0..2 {
        let e = c.models[sign].e;
        let p = summarise(&particle(s, &c, sign)?);
        let g = summarise(&galerkin(s, &c, sign)?);
        for (who, side) in [("particle", &p), ("galerkin", &g)] {
            r.table.push(format!("{who} odd statistic E={e}"), side.odd);
            r.table.push(format!("{who} e_1 increment skewness E={e}"), side.skew1);
            r.table.push(format!("{who} e_2 increment skewness E={e}"), side.skew2);
            r.table.push(format!("{who} kurtosis E={e}"), side.kurt);
        }
        // Leading order in the lag under the white-noise law.
        let small_lag = e * c.lag * std::f64::consts::SQRT_2 * std::f64::consts::PI / 8.0;
        r.table.push_exact(format!("small-lag odd statistic E={e}"), small_lag);
        let zd = p.odd.z_diff(&g.odd);
        r.criteria.push(Criterion::gate(
            format!("odd statistic agrees across sides at E={e}"),
            zd.abs() <= c.z,
            format!("particle {:.3e}, galerkin {:.3e}, z = {zd:.2}", p.odd.mean, g.odd.mean),
        ));
        for (who, side) in [("particle", &p), ("galerkin", &g)] {
            r.criteria.push(Criterion::gate(
                format!("{who} marginal is Gaussian at E={e}"),
                side.kurt.covers(3.0, c.z),
                format!("kurtosis {:.3} +- {:.3}", side.kurt.mean, side.kurt.se),
            ));
        }
        sides.push((p, g));
    }
    for (who, k) in [("particle", 0), ("galerkin", 1)] {
        let pick = |i: usize| if k == 0 { &sides[i].0 } else { &sides[i].1 };
        let (a, b) = (pick(0), pick(1));
        r.criteria.push(Criterion::gate(
            format!("{who} odd statistic flips sign with E"),
            a.odd.mean * b.odd.mean < 0.0,
            format!("{:.3e} and {:.3e}", a.odd.mean, b.odd.mean),
        ));
        r.criteria.push(Criterion::note(
            format!("{who} increment skewness"),
            format!(
                "e_1: {:.3} / {:.3}, e_2: {:.3} / {:.3} for +E / -E; e_1 vanishes by reflection symmetry",
                a.skew1.mean, b.skew1.mean, a.skew2.mean, b.skew2.mean
            ),
        ));
    }
    Ok(r)
}
