use std::f64::consts::{LN_10, PI, SQRT_2};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::basis::{unit_grid, BasisFn};
use super::series::{cos_series, sin_series};
use super::theta::theta;
use super::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    Dirichlet,
    Neumann,
}

/// Smallest K with e^{−tπ²K²} ≤ 1e−12.
pub fn mode_cutoff(t: f64) -> usize {
    ((12.0 * LN_10 / (t * PI * PI)).sqrt().ceil() as usize).max(1)
}

fn check_time(t: f64) -> Result<(), SpectralError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::NonPositiveTime(t))
    }
}

fn mode(kind: KernelKind, k: usize) -> BasisFn {
    match kind {
        KernelKind::Dirichlet => BasisFn::sine(k),
        KernelKind::Neumann => BasisFn::cosine(k),
    }
}

/// p_t(u,v) = Σ_k e^{−tπ²k²} e_k(u) e_k(v) (plus the constant mode for Neumann).
pub fn heat_kernel(kind: KernelKind, t: f64, u: f64, v: f64) -> Result<f64, SpectralError> {
    heat_kernel_with(kind, t, u, v, mode_cutoff(t))
}

/// Same series truncated at an explicit cutoff.
pub fn heat_kernel_with(
    kind: KernelKind,
    t: f64,
    u: f64,
    v: f64,
    cutoff: usize,
) -> Result<f64, SpectralError> {
    check_time(t)?;
    let mut s = if kind == KernelKind::Neumann { 1.0 } else { 0.0 };
    for k in 1..=cutoff {
        let b = mode(kind, k);
        s += (-t * b.eigenvalue()).exp() * b.eval(u) * b.eval(v);
    }
    Ok(s)
}

/// v ↦ p_t(u, v) on `grid`.
pub fn kernel_row(kind: KernelKind, t: f64, u: f64, grid: &[f64]) -> Result<Vec<f64>, SpectralError> {
    check_time(t)?;
    // Fold √2 of e_k(v) into the coefficients and sum with Clenshaw.
    let coeffs: Vec<f64> = (1..=mode_cutoff(t))
        .map(|k| {
            let b = mode(kind, k);
            SQRT_2 * (-t * b.eigenvalue()).exp() * b.eval(u)
        })
        .collect();
    Ok(grid
        .iter()
        .map(|&v| match kind {
            KernelKind::Dirichlet => sin_series(&coeffs, PI * v),
            KernelKind::Neumann => 1.0 + cos_series(&coeffs, PI * v),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    Dirichlet,
    Neumann,
    /// Θ^ε_u(v) with rows indexed by u.
    Theta,
}

/// Kernel values on a uniform grid in both arguments.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub kind: TableKind,
    /// Time t, or ε for Θ.
    pub param: f64,
    pub grid: Vec<f64>,
    pub values: Array2<f64>,
    pub mode_cutoff: usize,
}

impl KernelTable {
    pub fn new(kind: TableKind, param: f64, intervals: usize) -> Result<Self, SpectralError> {
        let grid = unit_grid(intervals);
        let g = grid.len();
        if kind == TableKind::Theta && param == 0.0 {
            let values = Array2::from_shape_fn((g, g), |(i, j)| theta(0.0, grid[i], grid[j]));
            return Ok(KernelTable {
                kind,
                param,
                grid,
                values,
                mode_cutoff: 0,
            });
        }
        check_time(param)?;
        let cutoff = mode_cutoff(param);
        let (left, right, base) = match kind {
            TableKind::Dirichlet => (
                Array2::from_shape_fn((g, cutoff), |(i, k)| BasisFn::sine(k + 1).eval(grid[i])),
                Array2::from_shape_fn((cutoff, g), |(k, j)| BasisFn::sine(k + 1).eval(grid[j])),
                0.0,
            ),
            TableKind::Neumann => (
                Array2::from_shape_fn((g, cutoff), |(i, k)| BasisFn::cosine(k + 1).eval(grid[i])),
                Array2::from_shape_fn((cutoff, g), |(k, j)| BasisFn::cosine(k + 1).eval(grid[j])),
                1.0,
            ),
            // Θ^ε_u(v) = Σ e^{−επ²ℓ²}(−ℓπ)^{−1} ẽ_ℓ(u) e_ℓ(v)
            TableKind::Theta => (
                Array2::from_shape_fn((g, cutoff), |(i, k)| {
                    -BasisFn::cosine(k + 1).eval(grid[i]) / ((k + 1) as f64 * PI)
                }),
                Array2::from_shape_fn((cutoff, g), |(k, j)| BasisFn::sine(k + 1).eval(grid[j])),
                0.0,
            ),
        };
        let w = Array1::from_shape_fn(cutoff, |k| {
            (-param * BasisFn::sine(k + 1).eigenvalue()).exp()
        });
        let scaled = &left * &w;
        let values = scaled.dot(&right) + base;
        Ok(KernelTable {
            kind,
            param,
            grid,
            values,
            mode_cutoff: cutoff,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::quad::{richardson, trapezoid};

    #[test]
    fn dirichlet_vanishes_on_boundary() {
        for v in [0.1, 0.5, 0.93] {
            assert!(heat_kernel(KernelKind::Dirichlet, 0.01, 0.0, v).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn neumann_conserves_mass() {
        let grid = unit_grid(4096);
        for t in [1e-3, 1e-2, 0.3] {
            for u in [0.0, 0.2, 0.77] {
                let row = kernel_row(KernelKind::Neumann, t, u, &grid).unwrap();
                assert!((trapezoid(&row) - 1.0).abs() < 1e-10, "t={t} u={u}");
            }
        }
    }

    #[test]
    fn semigroup() {
        let grid = unit_grid(4096);
        let (s, t) = (0.01, 0.02);
        for (u, v) in [(0.3, 0.4), (0.11, 0.8), (0.5, 0.5)] {
            let a = kernel_row(KernelKind::Dirichlet, s, u, &grid).unwrap();
            let b = kernel_row(KernelKind::Dirichlet, t, v, &grid).unwrap();
            let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            let want = heat_kernel(KernelKind::Dirichlet, s + t, u, v).unwrap();
            assert!((richardson(&prod) - want).abs() < 1e-8);
        }
    }

    #[test]
    fn truncation_is_converged() {
        for t in [1e-4, 1e-3, 0.1] {
            let k = mode_cutoff(t);
            for kind in [KernelKind::Dirichlet, KernelKind::Neumann] {
                let a = heat_kernel_with(kind, t, 0.3, 0.31, k).unwrap();
                let b = heat_kernel_with(kind, t, 0.3, 0.31, 2 * k).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn table_matches_pointwise_and_is_symmetric() {
        let tab = KernelTable::new(TableKind::Neumann, 0.01, 64).unwrap();
        for (i, j) in [(3, 40), (10, 10), (0, 64)] {
            let p = heat_kernel(KernelKind::Neumann, 0.01, tab.grid[i], tab.grid[j]).unwrap();
            assert!((tab.values[[i, j]] - p).abs() < 1e-12);
            assert!((tab.values[[i, j]] - tab.values[[j, i]]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_time() {
        assert!(heat_kernel(KernelKind::Dirichlet, 0.0, 0.1, 0.2).is_err());
    }
}
