//! Kernel-side checks that involve no randomness.

use super::settings::{KeySpec, Settings};
use super::{decreasing, fmt_list, Criterion, HarnessError, Report};
use crate::spectral::{
    k_eps_l2_defect, kernel_estimates_check, theta0_norm_sq_quadrature, theta0_norm_sq_series, theta_diag,
    theta_norm_sq, unit_grid,
};


pub(super) const K_KEYS: &[KeySpec] = &[
    KeySpec::new("eps", "0.01,0.001", "smoothing scales, decreasing"),
    KeySpec::new("intervals", "4096", "quadrature cells in u (even)"),
    KeySpec::new("bound", "1e-3", "required L2 defect at the smallest eps"),
];

struct KCfg {
    eps: Vec<f64>,
    intervals: usize,
    bound: f64,
}

fn k_parse(s: &Settings) -> Result<KCfg, HarnessError> {
    let eps = s.f64_list("eps")?;
    if eps.iter().any(|&e| e <= 0.0) {
        return Err(s.reject("eps", "must be positive"));
    }
    let intervals = s.count("intervals")?;
    if intervals % 2 != 0 {
        return Err(s.reject("intervals", "must be even"));
    }
    Ok(KCfg {
        eps,
        intervals,
        bound: s.positive("bound")?,
    })
}

pub(super) fn k_check(s: &Settings) -> Result<(), HarnessError> {
    k_parse(s).map(|_| ())
}

pub(super) fn k_run(s: &Settings) -> Result<Report, HarnessError> {
    let c = k_parse(s)?;
    let mut r = Report::new(&s.id, true);
    let defects: Vec<f64> = c
        .eps
        .iter()
        .map(|&e| k_eps_l2_defect(e, c.intervals))
        .collect::<Result<_, _>>()?;
    for (e, d) in c.eps.iter().zip(&defects) {
        r.table.push_exact(format!("defect eps={e}"), *d);
    }
    r.criteria.push(Criterion::gate(
        "defect decreases with eps",
        decreasing(&defects),
        format!("defects {}", fmt_list(&defects)),
    ));
    let last = *defects.last().unwrap();
    r.criteria.push(Criterion::gate(
        "defect below bound at the smallest eps",
        last < c.bound,
        format!("{last:.3e} vs bound {:.1e}", c.bound),
    ));
    Ok(r)
}

pub(super) const THETA_KEYS: &[KeySpec] = &[
    KeySpec::new("u_points", "11", "evenly spaced u in [0,1] for the norm check"),
    KeySpec::new("tol", "1e-6", "tolerance for the norm and the final diagonal defect"),
    KeySpec::new("series_modes", "1000000", "modes in the Parseval sum"),
    KeySpec::new("eps", "0.01,0.001,0.0001", "smoothing scales for the diagonal, decreasing"),
    KeySpec::new("diag_points", "9", "interior u values for the diagonal"),
];

struct ThetaCfg {
    u_points: usize,
    tol: f64,
    modes: usize,
    eps: Vec<f64>,
    diag_points: usize,
}

fn theta_parse(s: &Settings) -> Result<ThetaCfg, HarnessError> {
    let u_points = s.count("u_points")?;
    if u_points < 2 {
        return Err(s.reject("u_points", "need at least 2 points"));
    }
    let eps = s.f64_list("eps")?;
    if eps.iter().any(|&e| e <= 0.0) {
        return Err(s.reject("eps", "must be positive"));
    }
    Ok(ThetaCfg {
        u_points,
        tol: s.positive("tol")?,
        modes: s.count("series_modes")?,
        eps,
        diag_points: s.count("diag_points")?,
    })
}

pub(super) fn theta_check(s: &Settings) -> Result<(), HarnessError> {
    theta_parse(s).map(|_| ())
}

pub(super) fn theta_run(s: &Settings) -> Result<Report, HarnessError> {
    let c = theta_parse(s)?;
    let mut r = Report::new(&s.id, true);
    let (mut worst_q, mut worst_s) = (0.0f64, 0.0f64);
    for i in 0..c.u_points {
        let u = i as f64 / (c.u_points - 1) as f64;
        let exact = theta_norm_sq(0.0, u);
        let q = theta0_norm_sq_quadrature(u, 64);
        let ser = theta0_norm_sq_series(u, c.modes);
        r.table.push_exact(format!("norm closed u={u}"), exact);
        r.table.push_exact(format!("norm quadrature u={u}"), q);
        r.table.push_exact(format!("norm series u={u}"), ser);
        worst_q = worst_q.max((q - exact).abs());
        worst_s = worst_s.max((ser - exact).abs());
    }
    r.criteria.push(Criterion::gate(
        "norm matches u^2-u+1/3 by quadrature",
        worst_q < c.tol,
        format!("max error {worst_q:.2e}"),
    ));
    r.criteria.push(Criterion::gate(
        "norm matches u^2-u+1/3 by Parseval",
        worst_s < c.tol,
        format!("max error {worst_s:.2e} with {} modes", c.modes),
    ));
    let diag: Vec<f64> = c
        .eps
        .iter()
        .map(|&e| {
            (1..=c.diag_points)
                .map(|j| {
                    let u = j as f64 / (c.diag_points + 1) as f64;
                    (theta_diag(2.0 * e, u) - (u - 0.5)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    for (e, d) in c.eps.iter().zip(&diag) {
        r.table.push_exact(format!("diagonal defect eps={e}"), *d);
    }
    r.criteria.push(Criterion::gate(
        "diagonal tends to u-1/2",
        decreasing(&diag) && *diag.last().unwrap() < c.tol,
        format!("max defects {}", fmt_list(&diag)),
    ));
    Ok(r)
}

pub(super) const HEAT_KEYS: &[KeySpec] = &[
    KeySpec::new(
        "t",
        "0.0001,0.00031622776601683794,0.001,0.0031622776601683794,0.01,0.031622776601683794,0.1",
        "time grid for the fits",
    ),
    KeySpec::new("u_points", "21", "evenly spaced u in [0,1] for the suprema"),
    KeySpec::new("slope_tol", "0.1", "allowed distance of each fitted exponent"),
];

struct HeatCfg {
    t: Vec<f64>,
    u_points: usize,
    slope_tol: f64,
}

fn heat_parse(s: &Settings) -> Result<HeatCfg, HarnessError> {
    let t = s.f64_list("t")?;
    if t.len() < 2 || t.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
        return Err(s.reject("t", "need at least two times in (0, 1]"));
    }
    let u_points = s.count("u_points")?;
    if u_points < 2 {
        return Err(s.reject("u_points", "need at least 2 points"));
    }
    Ok(HeatCfg {
        t,
        u_points,
        slope_tol: s.positive("slope_tol")?,
    })
}

pub(super) fn heat_check(s: &Settings) -> Result<(), HarnessError> {
    heat_parse(s).map(|_| ())
}

pub(super) fn heat_run(s: &Settings) -> Result<Report, HarnessError> {
    let c = heat_parse(s)?;
    let mut r = Report::new(&s.id, true);
    let est = kernel_estimates_check(&c.t, &unit_grid(c.u_points - 1))?;
    let series: [(&str, &Vec<f64>); 6] = [
        ("sup_dir", &est.sup_dir),
        ("holder_half", &est.holder_half),
        ("holder_one", &est.holder_one),
        ("mass_defect_l2", &est.mass_defect_l2),
        ("neu_dir_mid", &est.neu_dir_mid),
        ("neu_dir_ratio", &est.neu_dir_ratio),
    ];
    for (name, vals) in series {
        for (t, v) in c.t.iter().zip(vals.iter()) {
            r.table.push_exact(format!("{name} t={t}"), *v);
        }
    }
    for f in &est.fits {
        r.table.push_exact(format!("slope {}", f.name), f.slope);
        r.table.push_exact(format!("constant {}", f.name), f.constant);
        let detail = format!("slope {:.4} vs {}", f.slope, f.expected);
        let gated = matches!(f.name.as_str(), "sup_dir" | "mass_defect_l2" | "neu_dir_mid");
        if gated {
            let ok = (f.slope - f.expected).abs() <= c.slope_tol;
            r.criteria.push(Criterion::gate(format!("exponent of {}", f.name), ok, detail));
        } else {
            r.criteria.push(Criterion::note(format!("exponent of {}", f.name), detail));
        }
    }
    let ratio = est.neu_dir_ratio.iter().cloned().fold(0.0, f64::max);
    r.criteria.push(Criterion::note(
        "Neumann-Dirichlet L1 gap over min(sqrt(t)/(u(1-u)), 1)",
        format!("max ratio {ratio:.3}"),
    ));
    Ok(r)
}
