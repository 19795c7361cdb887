use serde::Serialize;

use super::{GalerkinState, SpdeParams};
use crate::spectral::theta_coeff;

/// Sine coefficients of Θ⁰_u, so that Y(Θ⁰_u) = Σ y_k c_k.
pub fn psi_coeffs(u: f64, modes: usize) -> Vec<f64> {
    (1..=modes).map(|k| theta_coeff(0.0, u, k)).collect()
}

/// E[Ψ(u)] for Ψ(u) = exp((Ē/A)Y(Θ⁰_u)) under the truncated white-noise law.
pub fn she_stationary_mean(params: &SpdeParams, u: f64) -> f64 {
    let s: f64 = psi_coeffs(u, params.modes).iter().map(|c| c * c).sum();
    let k = params.ebar / params.a;
    (0.5 * k * k * params.stationary_variance() * s).exp()
}

fn robin_constant(p: &SpdeParams) -> f64 {
    p.d * p.ebar * p.ebar / (4.0 * p.a.powi(3))
}

/// Mean per unit time of the left and right Robin defects under the truncated
/// white-noise law.
pub fn she_mean_defect(params: &SpdeParams, eps: f64) -> (f64, f64) {
    let c = robin_constant(params);
    let m = |u| she_stationary_mean(params, u);
    let left = (m(eps) - m(0.0)) / eps + c * m(0.0);
    let right = (m(1.0) - m(1.0 - eps)) / eps - c * m(1.0);
    (left, right)
}

/// Time integrals along one trajectory, one entry per ε.
#[derive(Debug, Clone, Serialize)]
pub struct SheReport {
    pub eps: Vec<f64>,
    pub t: f64,
    /// DĒ²/(4A³).
    pub robin_constant: f64,
    /// ∫((Ψ(ε)−Ψ(0))/ε + cΨ(0))ds.
    pub robin_left: Vec<f64>,
    /// ∫((Ψ(1)−Ψ(1−ε))/ε − cΨ(1))ds.
    pub robin_right: Vec<f64>,
    /// ∫(Ψ(ε)−Ψ(0))/ε ds.
    pub naive_left: Vec<f64>,
    pub naive_right: Vec<f64>,
    /// ∫Ψ(0)ds and ∫Ψ(1)ds.
    pub psi_left: f64,
    pub psi_right: f64,
}

fn trapezoid_in_time(ts: &[f64], vals: &[f64]) -> f64 {
    ts.windows(2)
        .zip(vals.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Robin and naive boundary defects of the Cole-Hopf image along a Galerkin
/// trajectory, integrated in time with the trapezoid rule.
pub fn she_consistency(traj: &[GalerkinState], eps: &[f64]) -> SheReport {
    assert!(traj.len() >= 2, "need at least two states");
    let p = traj[0].params;
    let c = robin_constant(&p);
    let k = p.ebar / p.a;
    let ts: Vec<f64> = traj.iter().map(|s| s.t).collect();
    let psi_at = |u: f64| -> Vec<f64> {
        let cf = psi_coeffs(u, p.modes);
        traj.iter().map(|s| (k * s.pair(&cf)).exp()).collect()
    };
    let p0 = psi_at(0.0);
    let p1 = psi_at(1.0);
    let psi_left = trapezoid_in_time(&ts, &p0);
    let psi_right = trapezoid_in_time(&ts, &p1);
    let mut rep = SheReport {
        eps: eps.to_vec(),
        t: ts[ts.len() - 1] - ts[0],
        robin_constant: c,
        robin_left: vec![],
        robin_right: vec![],
        naive_left: vec![],
        naive_right: vec![],
        psi_left,
        psi_right,
    };
    for &e in eps {
        let pl: Vec<f64> = psi_at(e).iter().zip(&p0).map(|(a, b)| (a - b) / e).collect();
        let pr: Vec<f64> = p1.iter().zip(psi_at(1.0 - e)).map(|(a, b)| (a - b) / e).collect();
        let nl = trapezoid_in_time(&ts, &pl);
        let nr = trapezoid_in_time(&ts, &pr);
        rep.naive_left.push(nl);
        rep.naive_right.push(nr);
        rep.robin_left.push(nl + c * psi_left);
        rep.robin_right.push(nr - c * psi_right);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spde::ou_step;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_without_nonlinearity() {
        let p = SpdeParams::limit(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut traj = vec![GalerkinState::stationary(p, &mut rng)];
        for _ in 0..10 {
            let next = ou_step(traj.last().unwrap(), 0.01, &mut rng);
            traj.push(next);
        }
        let r = she_consistency(&traj, &[0.125, 0.0625]);
        assert!(r.robin_left.iter().chain(&r.robin_right).all(|&v| v == 0.0));
        assert!((r.psi_left - 0.1).abs() < 1e-12);
        assert_eq!(she_mean_defect(&p, 0.1), (0.0, 0.0));
    }

    #[test]
    fn closed_form_mean_matches_sampling() {
        let p = SpdeParams::limit(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cf = psi_coeffs(0.1, p.modes);
        let reps = 40_000;
        let v: Vec<f64> = (0..reps)
            .map(|_| (GalerkinState::stationary(p, &mut rng).pair(&cf)).exp())
            .collect();
        let mean = v.iter().sum::<f64>() / reps as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / reps as f64).sqrt();
        let want = she_stationary_mean(&p, 0.1);
        assert!((mean - want).abs() < 3.0 * sd / (reps as f64).sqrt());
    }

    #[test]
    fn mean_defect_shrinks_and_naive_one_does_not() {
        // Fine truncation so the boundary layer of the mode cutoff is far below ε.
        let p = SpdeParams::new(1.0, 0.5, 1.0, 4096, 0.01).unwrap();
        let c = robin_constant(&p);
        let m0 = she_stationary_mean(&p, 0.0);
        let mut prev = f64::INFINITY;
        for e in [0.125, 0.0625, 0.03125] {
            let (l, r) = she_mean_defect(&p, e);
            assert!(l.abs() < prev);
            assert!((l + r).abs() < 1e-9);
            prev = l.abs();
            // Naive defect stays near −c·E[Ψ(0)].
            let naive = l - c * m0;
            assert!((naive + c * m0).abs() < 0.2 * c * m0);
        }
    }
}
