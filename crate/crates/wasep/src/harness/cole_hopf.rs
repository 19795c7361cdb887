use super::settings::{KeySpec, Settings};
use super::stats::{mean_se, run_replicas};
use super::{decreasing, fmt_list, Criterion, HarnessError, Report};
use crate::lattice::{replica_rng, Engine, Model};
use crate::observables::{mean_current_field0, ColeHopfObserver, ColeHopfSample, DriftConstants};

pub(super) const KEYS: &[KeySpec] = &[
    KeySpec::new("E", "1", "asymmetry strength (gamma is fixed at 1/2, rho at 1/2)"),
    KeySpec::new("n_det", "100,1000,10000,100000,1000000", "sizes for the constant tables"),
    KeySpec::new("alpha_tol", "1e-3", "allowed gap of alpha_n to E^2/8 at the largest size"),
    KeySpec::new("n_init", "64,256,1024,4096,16384,65536", "sizes for the initial mean"),
    KeySpec::new("init_tol", "1e-2", "allowed gap of E[J_0(1)] to its limit at the largest size"),
    KeySpec::new("n", "256", "lattice size of the stochastic check"),
    KeySpec::new("t", "0.1", "macroscopic horizon of the stochastic check"),
    KeySpec::new("replicas", "50", "independent trajectories"),
    KeySpec::new("z", "3", "CI width in standard errors"),
];

struct Cfg {
    e: f64,
    n_det: Vec<usize>,
    alpha_tol: f64,
    n_init: Vec<usize>,
    init_tol: f64,
    model: Model,
    t: f64,
    replicas: usize,
    z: f64,
}

fn parse(s: &Settings) -> Result<Cfg, HarnessError> {
    let e = s.f64("E")?;
    let n_det = s.usize_list("n_det")?;
    let n_init = s.usize_list("n_init")?;
    for (key, ns) in [("n_det", &n_det), ("n_init", &n_init)] {
        if ns.len() < 2 || ns.iter().any(|&n| n < 3) || ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(s.reject(key, "need at least two increasing sizes >= 3"));
        }
        // The closed forms need 1 + E/sqrt(n) > 0.
        Model::new(ns[0], 0.5, e, 0.5)?;
    }
    Ok(Cfg {
        e,
        n_det,
        alpha_tol: s.positive("alpha_tol")?,
        n_init,
        init_tol: s.positive("init_tol")?,
        model: Model::new(s.usize("n")?, 0.5, e, 0.5)?,
        t: s.positive("t")?,
        replicas: s.count("replicas")?.max(2),
        z: s.positive("z")?,
    })
}

pub(super) fn check(s: &Settings) -> Result<(), HarnessError> {
    parse(s).map(|_| ())
}

/// lim E[J_0(1)] = ∫₀¹ e^{uE²/8} du.
pub fn initial_mean_limit(e: f64) -> f64 {
    let a = e * e / 8.0;
    if a == 0.0 {
        1.0
    } else {
        a.exp_m1() / a
    }
}

pub(super) fn run(s: &Settings) -> Result<Report, HarnessError> {
    let c = parse(s)?;
    let mut r = Report::new(&s.id, true);
    let target = c.e * c.e / 8.0;
    let (mut ga, mut gd) = (Vec::new(), Vec::new());
    for &n in &c.n_det {
        let k = DriftConstants::cole_hopf(c.e, n as f64);
        let sn = (n as f64).sqrt();
        r.table.push_exact(format!("alpha n={n}"), k.alpha_n);
        r.table.push_exact(format!("D n={n}"), k.d_n);
        r.table.push_exact(format!("sqrt(n) alpha gap n={n}"), sn * (k.alpha_n - target));
        r.table.push_exact(format!("sqrt(n) D gap n={n}"), sn * (k.d_n - 1.0));
        ga.push((k.alpha_n - target).abs());
        gd.push((k.d_n - 1.0).abs());
    }
    if c.e != 0.0 {
        r.criteria.push(Criterion::gate("alpha_n gap shrinks", decreasing(&ga), fmt_list(&ga)));
        r.criteria.push(Criterion::gate("D_n gap shrinks", decreasing(&gd), fmt_list(&gd)));
    }
    let last = *ga.last().unwrap();
    r.criteria.push(Criterion::gate(
        "alpha_n near E^2/8 at the largest size",
        last <= c.alpha_tol,
        format!("gap {last:.3e} vs {}", c.alpha_tol),
    ));

    let limit = initial_mean_limit(c.e);
    r.table.push_exact("initial mean limit", limit);
    let mut gi = Vec::new();
    for &n in &c.n_init {
        let k = DriftConstants::cole_hopf(c.e, n as f64);
        let m = mean_current_field0(&k, &vec![1.0; n]);
        r.table.push_exact(format!("initial mean n={n}"), m);
        gi.push((m - limit).abs());
    }
    let gl = *gi.last().unwrap();
    r.criteria.push(Criterion::gate(
        "E[J_0(1)] converges to the integral of exp(u E^2/8)",
        (c.e == 0.0 || decreasing(&gi)) && gl <= c.init_tol,
        format!("gap {gl:.3e} at n={}, limit {limit:.5}", c.n_init.last().unwrap()),
    ));
    let other = if c.e == 0.0 { 1.0 } else { 2.0 / (c.e * c.e) * (c.e * c.e / 2.0).exp_m1() };
    r.criteria.push(Criterion::note(
        "integral of exp(u E^2/2)",
        format!("{other:.5}, not the limit of the exact finite-n means"),
    ));

    let n = c.model.n;
    let phi = vec![1.0; n];
    let records = [c.t / 2.0, c.t];
    let per: Vec<(f64, Vec<ColeHopfSample>)> = run_replicas(c.replicas, |i| {
        let mut eng = Engine::stationary(c.model, replica_rng(s.seed, i));
        let mut obs = ColeHopfObserver::new(&c.model, eng.state(), &phi)?;
        let j0 = obs.current().j;
        eng.run(c.t, &records, &mut obs)?;
        Ok::<_, HarnessError>((j0, obs.samples))
    })?;
    let j0 = mean_se(&per.iter().map(|p| p.0).collect::<Vec<_>>());
    let exact = mean_current_field0(&DriftConstants::new(&c.model), &phi);
    r.table.push(format!("J_0 n={n}"), j0);
    r.table.push_exact(format!("exact initial mean n={n}"), exact);
    r.criteria.push(Criterion::gate(
        "sampled J_0(1) matches its exact mean",
        j0.covers(exact, c.z),
        format!("{:.5} +- {:.5} vs {exact:.5}", j0.mean, j0.se),
    ));
    for (k, &t) in records.iter().enumerate() {
        let col = |f: fn(&ColeHopfSample) -> f64| mean_se(&per.iter().map(|p| f(&p.1[k])).collect::<Vec<_>>());
        let m = col(|x| x.m_tn);
        let md = col(|x| x.m_direct);
        let dq = col(|x| x.qv_jump - x.qv_pred);
        r.table.push(format!("M t={t}"), m);
        r.table.push(format!("M from rates t={t}"), md);
        r.table.push(format!("empirical QV t={t}"), col(|x| x.qv_jump));
        r.table.push(format!("predictable QV t={t}"), col(|x| x.qv_pred));
        r.table.push(format!("QV difference t={t}"), dq);
        r.criteria.push(Criterion::gate(
            format!("compensated J is centred at t={t}"),
            m.covers(0.0, c.z),
            format!("{:.3e} +- {:.3e}", m.mean, m.se),
        ));
        r.criteria.push(Criterion::gate(
            format!("empirical QV tracks the predictable QV at t={t}"),
            dq.covers(0.0, c.z),
            format!("{:.3e} +- {:.3e}", dq.mean, dq.se),
        ));
    }
    Ok(r)
}
