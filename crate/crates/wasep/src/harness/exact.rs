use super::settings::{KeySpec, Settings};
use super::stats::{bonferroni_z, mean_se, run_replicas};
use super::{model_from, Criterion, HarnessError, Report};
use crate::lattice::{
    detailed_balance_defect, invariance_residual, replica_rng, Engine, Model, MAX_EXACT_N,
};

pub(super) const KEYS: &[KeySpec] = &[
    KeySpec::new("mode", "exact", "exact (enumerate the generator, n <= 12) or mc"),
    KeySpec::new("n", "3,4,5,6,7,8", "lattice sizes; one value in mc mode"),
    KeySpec::new("E", "0,0.5,1", "asymmetry strengths; one value in mc mode"),
    KeySpec::new("gamma", "0.5,1", "asymmetry exponents; one value in mc mode"),
    KeySpec::new("rho", "0.3,0.5,0.7", "reservoir densities; one value in mc mode"),
    KeySpec::new("tol", "1e-12", "bound on the exact residual"),
    KeySpec::new("replicas", "200", "mc replicas"),
    KeySpec::new("t", "1", "mc horizon"),
    KeySpec::new("z", "3", "mc family-wise threshold before Bonferroni correction"),
];

enum Cfg {
    Exact {
        models: Vec<Model>,
        tol: f64,
    },
    Mc {
        model: Model,
        replicas: usize,
        t: f64,
        z: f64,
    },
}

fn parse(s: &Settings) -> Result<Cfg, HarnessError> {
    match s.str("mode") {
        "exact" => {
            let ns = s.usize_list("n")?;
            if let Some(&n) = ns.iter().find(|&&n| n > MAX_EXACT_N) {
                return Err(s.reject("n", format!("exact mode needs n <= {MAX_EXACT_N}, got {n}")));
            }
            let mut models = Vec::new();
            for &n in &ns {
                for &e in &s.f64_list("E")? {
                    for &g in &s.f64_list("gamma")? {
                        for &r in &s.f64_list("rho")? {
                            models.push(Model::new(n, g, e, r)?);
                        }
                    }
                }
            }
            Ok(Cfg::Exact {
                models,
                tol: s.positive("tol")?,
            })
        }
        "mc" => {
            for key in ["n", "E", "gamma", "rho"] {
                if s.str(key).contains(',') {
                    return Err(s.reject(key, "mc mode takes a single value"));
                }
            }
            Ok(Cfg::Mc {
                model: model_from(s, s.usize("n")?)?,
                replicas: s.count("replicas")?.max(2),
                t: s.positive("t")?,
                z: s.positive("z")?,
            })
        }
        _ => Err(s.reject("mode", "expected exact or mc")),
    }
}

pub(super) fn check(s: &Settings) -> Result<(), HarnessError> {
    parse(s).map(|_| ())
}

pub(super) fn run(s: &Settings) -> Result<Report, HarnessError> {
    let mut r = Report::new(&s.id, true);
    match parse(s)? {
        Cfg::Exact { models, tol } => {
            let mut ns: Vec<usize> = models.iter().map(|m| m.n).collect();
            ns.dedup();
            let mut worst_all = 0.0f64;
            for n in ns {
                let mut worst = 0.0f64;
                for m in models.iter().filter(|m| m.n == n) {
                    worst = worst.max(invariance_residual(m)?);
                }
                r.table.push_exact(format!("residual n={n}"), worst);
                worst_all = worst_all.max(worst);
            }
            r.criteria.push(Criterion::gate(
                "Bernoulli measure annihilates the generator",
                worst_all < tol,
                format!("max residual {worst_all:.2e} over {} models", models.len()),
            ));
            let driven = detailed_balance_defect(&Model::new(4, 0.5, 1.0, 0.5)?)?.0;
            let free = detailed_balance_defect(&Model::new(4, 0.5, 0.0, 0.5)?)?.0;
            r.criteria.push(Criterion::gate(
                "not reversible with drift (n=4, E=1)",
                driven > 1e-6,
                format!("defect {driven:.3e}"),
            ));
            r.criteria.push(Criterion::gate(
                "reversible without drift (n=4, E=0, rho=1/2)",
                free < tol,
                format!("defect {free:.3e}"),
            ));
        }
        Cfg::Mc { model, replicas, t, z } => {
            let n = model.n;
            let rho = model.rho;
            let finals: Vec<Vec<u8>> = run_replicas(replicas, |i| {
                let mut eng = Engine::stationary(model, replica_rng(s.seed, i));
                eng.run(t, &[], &mut ())?;
                Ok::<_, HarnessError>(eng.eta().as_slice().to_vec())
            })?;
            let thr_site = bonferroni_z(z, n - 1);
            let thr_pair = bonferroni_z(z, (n - 2).max(1));
            let chi = model.chi();
            let (mut worst_site, mut worst_pair) = (0.0f64, 0.0f64);
            for x in 0..n - 1 {
                let v: Vec<f64> = finals.iter().map(|e| e[x] as f64).collect();
                let est = mean_se(&v);
                // Under the null the exact standard error is sqrt(chi/R).
                let zs = (est.mean - rho) / (chi / replicas as f64).sqrt();
                worst_site = worst_site.max(zs.abs());
                r.table.push(format!("occupation x={}", x + 1), est);
                if x + 1 < n - 1 {
                    let p: Vec<f64> = finals
                        .iter()
                        .map(|e| (e[x] as f64 - rho) * (e[x + 1] as f64 - rho))
                        .collect();
                    let est = mean_se(&p);
                    let zp = est.mean / (chi / (replicas as f64).sqrt());
                    worst_pair = worst_pair.max(zp.abs());
                    r.table.push(format!("covariance x={}", x + 1), est);
                }
            }
            r.criteria.push(Criterion::gate(
                "one-site marginals are Bernoulli(rho)",
                worst_site <= thr_site,
                format!("max |z| {worst_site:.2} vs {thr_site:.2}"),
            ));
            r.criteria.push(Criterion::gate(
                "adjacent sites uncorrelated",
                worst_pair <= thr_pair,
                format!("max |z| {worst_pair:.2} vs {thr_pair:.2}"),
            ));
        }
    }
    Ok(r)
}
