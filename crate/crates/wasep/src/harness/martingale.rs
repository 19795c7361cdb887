use std::f64::consts::PI;

use super::settings::{KeySpec, Settings};
use super::stats::{jackknife, mean, mean_se, run_replicas};
use super::{model_from, Criterion, HarnessError, Report};
use crate::lattice::{replica_rng, Engine, Model};
use crate::observables::{MartSample, MartingaleObserver};
use crate::spectral::BasisFn;

pub(super) const KEYS: &[KeySpec] = &[
    KeySpec::new("n", "256", "lattice size"),
    KeySpec::new("gamma", "0.5", "asymmetry exponent"),
    KeySpec::new("E", "1", "asymmetry strength"),
    KeySpec::new("rho", "0.5", "reservoir density"),
    KeySpec::new("replicas", "400", "independent trajectories"),
    KeySpec::new("times", "0.1,0.5,1", "sorted observation times"),
    KeySpec::new("mode", "1", "test function e_mode"),
    KeySpec::new("tol", "0.05", "relative tolerance between empirical and predictable QV"),
    KeySpec::new("z", "3", "CI width in standard errors"),
];

struct Cfg {
    model: Model,
    replicas: usize,
    times: Vec<f64>,
    mode: usize,
    tol: f64,
    z: f64,
}

fn parse(s: &Settings) -> Result<Cfg, HarnessError> {
    let model = model_from(s, s.usize("n")?)?;
    let times = s.f64_list("times")?;
    if times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(s.reject("times", "must be positive and increasing"));
    }
    let mode = s.count("mode")?;
    if mode >= model.n {
        return Err(s.reject("mode", "must be below n"));
    }
    let tol = s.f64("tol")?;
    if tol < 0.0 {
        return Err(s.reject("tol", "must be non-negative"));
    }
    Ok(Cfg {
        model,
        replicas: s.count("replicas")?.max(2),
        times,
        mode,
        tol,
        z: s.positive("z")?,
    })
}

pub(super) fn check(s: &Settings) -> Result<(), HarnessError> {
    parse(s).map(|_| ())
}

/// Stationary means per unit time of the predictable QV with exact rates and
/// in the (1+ε)(η(x)−η(x+1))² form.
fn stationary_qv_rates(model: &Model, phi: &[f64]) -> (f64, f64) {
    let n = model.n;
    let nf = n as f64;
    let chi = model.chi();
    let eps = model.asymmetry();
    let g2: Vec<f64> = (0..n).map(|b| (nf * (phi[b + 1] - phi[b])).powi(2)).collect();
    let exact = (2.0 + eps) * chi * g2.iter().sum::<f64>() / nf;
    let ends = g2[0] + g2[n - 1];
    let avg = ((2.0 + eps) * chi * ends + 2.0 * (1.0 + eps) * chi * (g2.iter().sum::<f64>() - ends)) / nf;
    (exact, avg)
}

fn ratio(recs: &[MartSample], num: fn(&MartSample) -> f64, den: fn(&MartSample) -> f64) -> f64 {
    mean(&recs.iter().map(num).collect::<Vec<_>>()) / mean(&recs.iter().map(den).collect::<Vec<_>>())
}

pub(super) fn run(s: &Settings) -> Result<Report, HarnessError> {
    let c = parse(s)?;
    let n = c.model.n;
    let phi = BasisFn::sine(c.mode).grid(n);
    let t_end = *c.times.last().unwrap();
    let per: Vec<Vec<MartSample>> = run_replicas(c.replicas, |i| {
        let mut eng = Engine::stationary(c.model, replica_rng(s.seed, i));
        let mut obs = MartingaleObserver::new(&c.model, eng.eta(), &phi)?;
        eng.run(t_end, &c.times, &mut obs)?;
        Ok::<_, HarnessError>(obs.samples)
    })?;
    let (rate_exact, rate_avg) = stationary_qv_rates(&c.model, &phi);
    let limit_rate = 2.0 * c.model.chi() * (c.mode as f64 * PI).powi(2);
    let mut r = Report::new(&s.id, true);
    for (k, &t) in c.times.iter().enumerate() {
        let at: Vec<MartSample> = per.iter().map(|v| v[k]).collect();
        let col = |f: fn(&MartSample) -> f64| mean_se(&at.iter().map(f).collect::<Vec<_>>());
        let m = col(|x| x.m);
        let jump = col(|x| x.qv_jump);
        let pred = col(|x| x.qv_pred);
        let avg = col(|x| x.qv_avg);
        let rp = jackknife(&at, |xs| ratio(xs, |x| x.qv_jump, |x| x.qv_avg));
        let re = jackknife(&at, |xs| ratio(xs, |x| x.qv_jump, |x| x.qv_pred));
        r.table.push(format!("M t={t}"), m);
        r.table.push(format!("empirical QV t={t}"), jump);
        r.table.push(format!("predictable QV t={t}"), pred);
        r.table.push(format!("predictable QV averaged-rate form t={t}"), avg);
        r.table.push(format!("empirical/predictable averaged-rate form t={t}"), rp);
        r.table.push(format!("empirical/predictable t={t}"), re);
        r.table.push_exact(format!("stationary predictable QV t={t}"), rate_exact * t);
        r.table.push_exact(format!("stationary predictable QV averaged-rate form t={t}"), rate_avg * t);
        r.table.push_exact(format!("limit QV t={t}"), limit_rate * t);
        r.criteria.push(Criterion::gate(
            format!("E[M_t] = 0 at t={t}"),
            m.covers(0.0, c.z),
            format!("{:.4} +- {:.4}", m.mean, m.se),
        ));
        if k + 1 == c.times.len() {
            r.criteria.push(Criterion::gate(
                "empirical QV within tol of predictable QV (averaged-rate form)",
                (rp.mean - 1.0).abs() <= c.tol,
                format!("ratio {:.4} +- {:.4}, tol {}", rp.mean, rp.se, c.tol),
            ));
            r.criteria.push(Criterion::gate(
                "empirical QV within tol of predictable QV (exact rates)",
                (re.mean - 1.0).abs() <= c.tol,
                format!("ratio {:.4} +- {:.4}, tol {}", re.mean, re.se, c.tol),
            ));
            r.criteria.push(Criterion::gate(
                "predictable QV matches its stationary mean",
                pred.covers(rate_exact * t, c.z),
                format!("{:.4} +- {:.4} vs {:.4}", pred.mean, pred.se, rate_exact * t),
            ));
            r.criteria.push(Criterion::gate(
                "empirical QV within CI of the limit 2chi t (m pi)^2",
                jump.covers(limit_rate * t, c.z),
                format!(
                    "{:.4} +- {:.4} vs {:.4} (stationary finite-n mean {:.4})",
                    jump.mean,
                    jump.se,
                    limit_rate * t,
                    rate_exact * t
                ),
            ));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_rates_tend_to_limit() {
        let m = Model::new(1 << 16, 0.5, 1.0, 0.5).unwrap();
        let phi = BasisFn::sine(1).grid(m.n);
        let (e, p) = stationary_qv_rates(&m, &phi);
        let lim = PI * PI / 2.0;
        assert!((e / lim - 1.0).abs() < 3e-3);
        assert!((p / lim - 1.0).abs() < 6e-3);
        // At E = 0 both forms coincide.
        let m0 = Model::new(64, 0.5, 0.0, 0.5).unwrap();
        let phi = BasisFn::sine(1).grid(64);
        let (a, b) = stationary_qv_rates(&m0, &phi);
        assert!((a - b).abs() < 1e-12);
    }
}
