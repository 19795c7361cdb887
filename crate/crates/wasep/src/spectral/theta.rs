use std::f64::consts::{PI, SQRT_2};

use super::basis::{unit_grid, BasisFn};
use super::heat::{kernel_row, mode_cutoff, KernelKind};
use super::quad::richardson;
use super::SpectralError;

/// Coefficient of Θ^ε_u on e_ℓ: −√2 e^{−επ²ℓ²} cos(ℓπu)/(ℓπ). ε = 0 gives Θ⁰_u.
#[inline]
pub fn theta_coeff(eps: f64, u: f64, l: usize) -> f64 {
    let k = l as f64 * PI;
    -SQRT_2 * (-eps * k * k).exp() * (k * u).cos() / k
}

/// Θ⁰_u(v) = 1_{[0,u]}(v) + v − 1.
pub fn theta0(u: f64, v: f64) -> f64 {
    let ind = if v <= u { 1.0 } else { 0.0 };
    ind + v - 1.0
}

/// Θ^ε_u(v); the series for ε > 0 and the closed form at ε = 0.
pub fn theta(eps: f64, u: f64, v: f64) -> f64 {
    assert!(eps >= 0.0, "theta needs eps >= 0");
    if eps == 0.0 {
        return theta0(u, v);
    }
    (1..=mode_cutoff(eps))
        .map(|l| theta_coeff(eps, u, l) * BasisFn::sine(l).eval(v))
        .sum()
}

/// ‖Θ^ε_u‖²_{L²} by Parseval; exact closed form u² − u + 1/3 at ε = 0.
pub fn theta_norm_sq(eps: f64, u: f64) -> f64 {
    assert!(eps >= 0.0);
    if eps == 0.0 {
        return u * u - u + 1.0 / 3.0;
    }
    (1..=mode_cutoff(2.0 * eps))
        .map(|l| theta_coeff(eps, u, l).powi(2))
        .sum()
}

/// Parseval sum of the ε = 0 coefficients truncated at `modes`.
pub fn theta0_norm_sq_series(u: f64, modes: usize) -> f64 {
    (1..=modes).map(|l| theta_coeff(0.0, u, l).powi(2)).sum()
}

/// ‖Θ⁰_u‖² by quadrature, splitting at the jump v = u.
pub fn theta0_norm_sq_quadrature(u: f64, intervals: usize) -> f64 {
    let piece = |a: f64, b: f64, jump: f64| {
        if b <= a {
            return 0.0;
        }
        let vals: Vec<f64> = (0..=intervals)
            .map(|j| {
                let v = a + (b - a) * j as f64 / intervals as f64;
                (jump + v - 1.0).powi(2)
            })
            .collect();
        (b - a) * richardson(&vals)
    };
    piece(0.0, u, 1.0) + piece(u, 1.0, 0.0)
}

/// Θ^ε_u(u) = −Σ_ℓ e^{−επ²ℓ²} sin(2ℓπu)/(ℓπ).
pub fn theta_diag(eps: f64, u: f64) -> f64 {
    assert!(eps > 0.0, "the diagonal needs eps > 0");
    (1..=mode_cutoff(eps))
        .map(|l| theta_coeff(eps, u, l) * BasisFn::sine(l).eval(u))
        .sum()
}

fn check_eps(eps: f64) -> Result<(), SpectralError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::NonPositiveTime(eps))
    }
}

/// K^ε_u = E²(‖Θ^ε_u‖² − Θ^{2ε}_u(u)²).
pub fn k_eps(e: f64, eps: f64, u: f64) -> Result<f64, SpectralError> {
    check_eps(eps)?;
    Ok(e * e * (theta_norm_sq(eps, u) - theta_diag(2.0 * eps, u).powi(2)))
}

/// K^ε_u from its defining integrals
/// E²(∫p^Neu_ε(u,w)Θ^ε_u(w)²dw − (∫p^Dir_ε(u,v)Θ^ε_u(v)dv)²).
pub fn k_eps_quadrature(e: f64, eps: f64, u: f64, intervals: usize) -> Result<f64, SpectralError> {
    check_eps(eps)?;
    let grid = unit_grid(intervals);
    let pn = kernel_row(KernelKind::Neumann, eps, u, &grid)?;
    let pd = kernel_row(KernelKind::Dirichlet, eps, u, &grid)?;
    let th: Vec<f64> = grid.iter().map(|&w| theta(eps, u, w)).collect();
    let first: Vec<f64> = pn.iter().zip(&th).map(|(p, t)| p * t * t).collect();
    let second: Vec<f64> = pd.iter().zip(&th).map(|(p, t)| p * t).collect();
    Ok(e * e * (richardson(&first) - richardson(&second).powi(2)))
}

/// ∫₀¹ |K^ε_u/E² − 1/12|² du.
pub fn k_eps_l2_defect(eps: f64, intervals: usize) -> Result<f64, SpectralError> {
    check_eps(eps)?;
    let vals: Vec<f64> = unit_grid(intervals)
        .iter()
        .map(|&u| k_eps(1.0, eps, u).map(|k| (k - 1.0 / 12.0).powi(2)))
        .collect::<Result<_, _>>()?;
    Ok(richardson(&vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::heat::heat_kernel;
    use crate::spectral::quad::trapezoid;

    #[test]
    fn norm_closed_form_matches_quadrature() {
        for i in 0..=10 {
            let u = i as f64 / 10.0;
            let q = theta0_norm_sq_quadrature(u, 64);
            assert!((q - theta_norm_sq(0.0, u)).abs() < 1e-12);
        }
        assert!((theta_norm_sq(0.0, 0.5) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn diag_tends_to_midpoint() {
        for u in [0.25, 0.5, 0.75] {
            let d: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&e| (theta_diag(2.0 * e, u) - (u - 0.5)).abs())
                .collect();
            assert!(d[2] < 1e-6, "u={u}: {d:?}");
        }
    }

    #[test]
    fn routes_agree() {
        for eps in [1e-2, 1e-3] {
            for u in [0.05, 0.3, 0.5, 0.9] {
                let a = k_eps(1.0, eps, u).unwrap();
                let b = k_eps_quadrature(1.0, eps, u, 4096).unwrap();
                assert!((a - b).abs() < 1e-8, "eps={eps} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn k_scales_with_e_squared() {
        let k1 = k_eps(1.0, 1e-2, 0.3).unwrap();
        assert_eq!(k_eps(0.0, 1e-2, 0.3).unwrap(), 0.0);
        assert_eq!(k_eps(3.0, 1e-2, 0.3).unwrap(), 9.0 * k1);
    }

    #[test]
    fn u_derivative_is_dirichlet_kernel() {
        let (eps, h) = (1e-2, 1e-5);
        for (u, v) in [(0.3, 0.6), (0.5, 0.2), (0.8, 0.81)] {
            let fd = (theta(eps, u + h, v) - theta(eps, u - h, v)) / (2.0 * h);
            let p = heat_kernel(KernelKind::Dirichlet, eps, u, v).unwrap();
            assert!((fd - p).abs() < 1e-6);
        }
    }

    #[test]
    fn v_derivative_is_neumann_defect() {
        let (eps, h) = (1e-2, 1e-5);
        for (u, v) in [(0.3, 0.6), (0.5, 0.2), (0.8, 0.81)] {
            let fd = (theta(eps, u, v + h) - theta(eps, u, v - h)) / (2.0 * h);
            let p = heat_kernel(KernelKind::Neumann, eps, u, v).unwrap();
            assert!((fd + (p - 1.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_mean_in_u() {
        let grid = unit_grid(2048);
        for v in [0.2, 0.5, 0.7] {
            let vals: Vec<f64> = grid.iter().map(|&u| theta(1e-3, u, v)).collect();
            assert!(trapezoid(&vals).abs() < 1e-10);
        }
    }
}
