use serde::{Deserialize, Serialize};

use super::{DriftConstants, ObservableError};
use crate::lattice::{HeightState, Occupancy};
use crate::spectral::{quad::trapezoid, BasisFn, BasisKind};

/// A field tested against the first M basis functions at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub modes: Vec<f64>,
    pub basis_kind: BasisKind,
    pub t_macro: f64,
}

fn check_len(got: usize, want: usize) -> Result<(), ObservableError> {
    if got == want {
        Ok(())
    } else {
        Err(ObservableError::Length { got, want })
    }
}

/// Y^n(φ) = n^{-1/2} Σ_{x=1}^{n−1} φ(x/n)(η(x) − ρ), with `phi[x−1] = φ(x/n)`.
pub fn density_field(eta: &Occupancy, rho: f64, phi: &[f64]) -> Result<f64, ObservableError> {
    let n = eta.n();
    check_len(phi.len(), n - 1)?;
    let s: f64 = eta
        .as_slice()
        .iter()
        .zip(phi)
        .map(|(&v, p)| p * (v as f64 - rho))
        .sum();
    Ok(s / (n as f64).sqrt())
}

/// Z^n(φ) = n^{-3/2} Σ_{x=1}^{n} φ(x/n)(h(x) − c_n t), with `phi[x−1] = φ(x/n)`.
pub fn height_field(state: &HeightState, phi: &[f64], consts: &DriftConstants) -> Result<f64, ObservableError> {
    let n = state.eta.n();
    check_len(phi.len(), n)?;
    let shift = consts.c_n * state.t_macro;
    let s: f64 = state
        .heights()
        .iter()
        .zip(phi)
        .map(|(h, p)| p * (h - shift))
        .sum();
    Ok(s / (n as f64).powf(1.5))
}

/// Y^n(e_m) for m = 1..=modes.
pub fn density_sample(eta: &Occupancy, rho: f64, modes: usize, t: f64) -> FieldSample {
    let n = eta.n();
    let modes = (1..=modes)
        .map(|m| {
            let g = BasisFn::sine(m).grid(n);
            density_field(eta, rho, &g[1..n]).expect("grid length")
        })
        .collect();
    FieldSample {
        modes,
        basis_kind: BasisKind::DirichletSine,
        t_macro: t,
    }
}

/// Z^n(ẽ_m) for m = 0..modes.
pub fn height_sample(state: &HeightState, consts: &DriftConstants, modes: usize) -> FieldSample {
    let n = state.eta.n();
    let modes = (0..modes)
        .map(|m| {
            let g = BasisFn::cosine(m).grid(n);
            height_field(state, &g[1..=n], consts).expect("grid length")
        })
        .collect();
    FieldSample {
        modes,
        basis_kind: BasisKind::NeumannCosine,
        t_macro: state.t_macro,
    }
}

/// Residuals of the height/density duality for φ(x/n) given at x = 0..=n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResidual {
    /// Z(∇̃φ) + Y(τφ) + boundary terms, with τφ(x/n) = φ((x+1)/n). Zero up to rounding.
    pub exact: f64,
    /// The same identity with Y(φ) in place of Y(τφ). Off by n^{-1/2}Σ(φ_{x+1}−φ_x)η̄(x).
    pub unshifted: f64,
}

pub fn relation_residual(
    state: &HeightState,
    phi: &[f64],
    consts: &DriftConstants,
) -> Result<RelationResidual, ObservableError> {
    let n = state.eta.n();
    check_len(phi.len(), n + 1)?;
    let nf = n as f64;
    let mut grad = vec![0.0; n];
    for x in 1..n {
        grad[x - 1] = nf * (phi[x + 1] - phi[x]);
    }
    // ∇̃φ(n/n) = 0.
    let z = height_field(state, &grad, consts)?;
    let shift = consts.c_n * state.t_macro;
    let boundary = (-phi[1] * (state.h1 as f64 - shift) + phi[n] * (state.height(n) - shift)) / nf.sqrt();
    let y_shift = density_field(&state.eta, state.rho, &phi[2..=n])?;
    let y = density_field(&state.eta, state.rho, &phi[1..n])?;
    Ok(RelationResidual {
        exact: z - (-y_shift + boundary),
        unshifted: z - (-y + boundary),
    })
}

/// ∇_ε Z(u) on a uniform grid, where ε is `k` cells.
fn nabla_eps(z: &[f64], k: usize) -> Vec<f64> {
    let cells = z.len() - 1;
    let eps = k as f64 / cells as f64;
    (0..=cells)
        .map(|j| {
            // u < 1 − 2ε ⇔ j < cells − 2k.
            if j + 2 * k < cells {
                (z[j + k] - z[j]) / eps
            } else {
                (z[j] - z[j - k]) / eps
            }
        })
        .collect()
}

/// ∫₀¹ ((∇_ε Z(u))² − 1/(4ε)) φ(u) du by the trapezoid rule. `z` and `phi`
/// share a uniform grid on which ε is a whole number of cells.
pub fn renormalized_square(z: &[f64], phi: &[f64], eps: f64) -> Result<f64, ObservableError> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(ObservableError::EpsRange(eps));
    }
    check_len(phi.len(), z.len())?;
    let cells = z.len() - 1;
    let k = (eps * cells as f64).round() as usize;
    if k == 0 || ((k as f64) - eps * cells as f64).abs() > 1e-9 {
        return Err(ObservableError::EpsGrid { eps, cells });
    }
    let vals: Vec<f64> = nabla_eps(z, k)
        .iter()
        .zip(phi)
        .map(|(g, p)| (g * g - 1.0 / (4.0 * eps)) * p)
        .collect();
    Ok(trapezoid(&vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{sample_initial, Model};
    use crate::spectral::lattice_grid;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(n: usize, seed: u64, h1: i64, t: f64) -> HeightState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HeightState {
            eta: sample_initial(n, 0.5, &mut rng),
            h1,
            t_macro: t,
            rho: 0.5,
        }
    }

    #[test]
    fn zero_profile_gives_zero() {
        let eta = Occupancy::from_sites(vec![1, 0, 0, 1, 1, 0]).unwrap();
        let m = Model::new(7, 0.5, 0.0, 0.5).unwrap();
        let hs = HeightState {
            eta: eta.clone(),
            h1: 0,
            t_macro: 0.0,
            rho: 0.5,
        };
        // Prefix sums of η̄ at x = 1..7: 0, .5, 0, −.5, 0, .5, 0; pick φ on the zeros.
        let phi = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        assert_eq!(height_field(&hs, &phi, &DriftConstants::new(&m)).unwrap(), 0.0);
        assert_eq!(density_field(&eta, 0.5, &[0.0; 6]).unwrap(), 0.0);
        assert!(density_field(&eta, 0.5, &[0.0; 5]).is_err());
    }

    #[test]
    fn relation_identity_is_exact() {
        let m = Model::new(64, 0.5, 1.0, 0.5).unwrap();
        let c = DriftConstants::new(&m);
        for seed in 0..20 {
            let hs = state(64, seed, seed as i64 - 7, 0.013 * seed as f64);
            let phi = BasisFn::sine(1 + seed as usize % 3).grid(64);
            let r = relation_residual(&hs, &phi, &c).unwrap();
            assert!(r.exact.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn unshifted_relation_misses_by_gradient_term() {
        let m = Model::new(64, 0.5, 1.0, 0.5).unwrap();
        let c = DriftConstants::new(&m);
        let hs = state(64, 3, 2, 0.1);
        let phi = BasisFn::sine(2).grid(64);
        let r = relation_residual(&hs, &phi, &c).unwrap();
        let miss: f64 = (1..64)
            .map(|x| (phi[x + 1] - phi[x]) * (hs.eta.get(x) as f64 - 0.5))
            .sum::<f64>()
            / 8.0;
        assert!((r.unshifted - r.exact + miss).abs() < 1e-12);
    }

    #[test]
    fn linear_profile_renormalized_square() {
        let cells = 256;
        let a = 3.0;
        let z = lattice_grid(cells, |u| a * u);
        let phi = lattice_grid(cells, |u| 1.0 + u);
        for eps in [1.0 / 16.0, 1.0 / 64.0] {
            let got = renormalized_square(&z, &phi, eps).unwrap();
            let want = (a * a - 1.0 / (4.0 * eps)) * 1.5;
            assert!((got - want).abs() < 1e-10);
        }
        // Forward and backward differences agree for linear Z.
        let g = nabla_eps(&z, 4);
        assert!(g.iter().all(|v| (v - a).abs() < 1e-12));
        assert!(renormalized_square(&z, &phi, 0.3).is_err());
        assert!(renormalized_square(&z, &phi, 0.001).is_err());
    }

    proptest! {
        #[test]
        fn density_field_is_linear(seed in 0u64..1000, a in -3.0..3.0f64, b in -3.0..3.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = sample_initial(33, 0.5, &mut rng);
            let f: Vec<f64> = (0..32).map(|i| ((i * 7 + seed as usize) % 11) as f64 - 5.0).collect();
            let g: Vec<f64> = (0..32).map(|i| ((i * 3 + 1) as f64).sin()).collect();
            let h: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            let lhs = density_field(&eta, 0.5, &h).unwrap();
            let rhs = a * density_field(&eta, 0.5, &f).unwrap() + b * density_field(&eta, 0.5, &g).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
