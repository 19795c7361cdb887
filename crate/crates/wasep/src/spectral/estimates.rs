use serde::Serialize;

use super::basis::{unit_grid, BasisFn};
use super::heat::{kernel_row, mode_cutoff, KernelKind};
use super::quad::{richardson, DEFAULT_INTERVALS};
use super::SpectralError;

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// A power-law bound y ≤ C·t^expected checked along the t grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundFit {
    pub name: String,
    pub expected: f64,
    pub slope: f64,
    /// Smallest C for which the bound holds on the grid.
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelEstimates {
    pub t: Vec<f64>,
    /// sup_{u,v}|p^Dir_t(u,v)|.
    pub sup_dir: Vec<f64>,
    /// sup_u ‖p^Dir_t(u,·)|u−·|^{1/2}‖_{L¹}.
    pub holder_half: Vec<f64>,
    /// sup_u ‖p^Dir_t(u,·)|u−·|‖_{L¹}.
    pub holder_one: Vec<f64>,
    /// ‖⟨p^Dir_t(u,·),1⟩ − 1‖_{L²_u}.
    pub mass_defect_l2: Vec<f64>,
    /// |⟨p^Dir_t(1/2,·),1⟩ − 1|.
    pub mass_defect_mid: Vec<f64>,
    /// |⟨p^Dir_t(√t,·),1⟩ − 1|.
    pub mass_defect_edge: Vec<f64>,
    /// ‖p^Neu_t(1/2,·) − p^Dir_t(1/2,·)‖_{L¹}.
    pub neu_dir_mid: Vec<f64>,
    /// max over the u grid of ‖p^Neu_t(u,·) − p^Dir_t(u,·)‖_{L¹} / (t^{1/2}/(u(1−u)) ∧ 1).
    pub neu_dir_ratio: Vec<f64>,
    pub fits: Vec<BoundFit>,
}

/// ⟨p^Dir_t(u,·), 1⟩ from the series.
pub fn dirichlet_mass(t: f64, u: f64) -> f64 {
    (1..=mode_cutoff(t))
        .map(|k| {
            let e = BasisFn::sine(k);
            (-t * e.eigenvalue()).exp() * e.eval(u) * e.integral()
        })
        .sum()
}

/// sup of p^Dir_t. Cauchy-Schwarz on the series puts it on the diagonal,
/// which is scanned on a fine grid.
fn sup_dirichlet(t: f64) -> f64 {
    let k = mode_cutoff(t);
    // The peak is near the center for t ≳ 0.05 and flat otherwise.
    let pts = 4 * DEFAULT_INTERVALS;
    (0..=pts / 2)
        .map(|j| {
            let u = j as f64 / pts as f64;
            (1..=k)
                .map(|m| {
                    let e = BasisFn::sine(m);
                    (-t * e.eigenvalue()).exp() * e.eval(u).powi(2)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn l1_weighted(row: &[f64], grid: &[f64], u: f64, lambda: f64) -> f64 {
    let vals: Vec<f64> = row
        .iter()
        .zip(grid)
        .map(|(p, v)| p.abs() * (u - v).abs().powf(lambda))
        .collect();
    richardson(&vals)
}

fn fit(name: &str, t: &[f64], ys: &[f64], expected: f64) -> BoundFit {
    let constant = t
        .iter()
        .zip(ys)
        .map(|(t, y)| y / t.powf(expected))
        .fold(0.0, f64::max);
    BoundFit {
        name: name.to_string(),
        expected,
        slope: loglog_slope(t, ys),
        constant,
    }
}

/// Evaluates the heat-kernel bounds along `t_grid`, taking suprema in u over
/// `u_grid`.
pub fn kernel_estimates_check(t_grid: &[f64], u_grid: &[f64]) -> Result<KernelEstimates, SpectralError> {
    for &t in t_grid {
        if !(t > 0.0 && t <= 1.0) {
            return Err(SpectralError::NonPositiveTime(t));
        }
    }
    let grid = unit_grid(DEFAULT_INTERVALS);
    let fine = unit_grid(4 * DEFAULT_INTERVALS);
    let mut out = KernelEstimates {
        t: t_grid.to_vec(),
        sup_dir: vec![],
        holder_half: vec![],
        holder_one: vec![],
        mass_defect_l2: vec![],
        mass_defect_mid: vec![],
        mass_defect_edge: vec![],
        neu_dir_mid: vec![],
        neu_dir_ratio: vec![],
        fits: vec![],
    };
    for &t in t_grid {
        out.sup_dir.push(sup_dirichlet(t));

        let (mut h_half, mut h_one, mut ratio) = (0.0f64, 0.0f64, 0.0f64);
        for &u in u_grid {
            let dir = kernel_row(KernelKind::Dirichlet, t, u, &grid)?;
            h_half = h_half.max(l1_weighted(&dir, &grid, u, 0.5));
            h_one = h_one.max(l1_weighted(&dir, &grid, u, 1.0));
            if u > 0.0 && u < 1.0 {
                let neu = kernel_row(KernelKind::Neumann, t, u, &grid)?;
                let diff: Vec<f64> = neu.iter().zip(&dir).map(|(a, b)| (a - b).abs()).collect();
                let bound = (t.sqrt() / (u * (1.0 - u))).min(1.0);
                ratio = ratio.max(richardson(&diff) / bound);
            }
        }
        out.holder_half.push(h_half);
        out.holder_one.push(h_one);
        out.neu_dir_ratio.push(ratio);

        let defect: Vec<f64> = fine.iter().map(|&u| (dirichlet_mass(t, u) - 1.0).powi(2)).collect();
        out.mass_defect_l2.push(richardson(&defect).sqrt());
        out.mass_defect_mid.push((dirichlet_mass(t, 0.5) - 1.0).abs());
        out.mass_defect_edge.push((dirichlet_mass(t, t.sqrt()) - 1.0).abs());

        let dir = kernel_row(KernelKind::Dirichlet, t, 0.5, &grid)?;
        let neu = kernel_row(KernelKind::Neumann, t, 0.5, &grid)?;
        let diff: Vec<f64> = neu.iter().zip(&dir).map(|(a, b)| (a - b).abs()).collect();
        out.neu_dir_mid.push(richardson(&diff));
    }
    let t = &out.t;
    out.fits = vec![
        fit("sup_dir", t, &out.sup_dir, -0.5),
        fit("holder_half", t, &out.holder_half, 0.25),
        fit("holder_one", t, &out.holder_one, 0.5),
        fit("mass_defect_l2", t, &out.mass_defect_l2, 0.25),
        fit("neu_dir_mid", t, &out.neu_dir_mid, 0.5),
    ];
    Ok(out)
}
