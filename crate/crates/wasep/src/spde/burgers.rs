use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use super::ou::ou_transition;
use super::{GalerkinState, SpdeError, SpdeParams};
use crate::spectral::quad::richardson_weights;
use crate::spectral::{BasisFn, IotaWindow};

/// The mollified nonlinearity N_m(y) = −∫₀¹ (Y(ι_ε(u)))² ∇e_m(u) du as a
/// quadratic form in the mode coefficients, tabulated once per (M, ε).
#[derive(Debug, Clone)]
pub struct BurgersOperator {
    modes: usize,
    eps: f64,
    /// tensor[(m·M + k)·M + l]
    tensor: Vec<f64>,
}

/// Window coefficient ⟨ι_ε(u), e_k⟩ with the orientation forced, so the two
/// sides of the switch point can both be evaluated there.
fn window(eps: f64, u: f64, forward: bool) -> IotaWindow {
    let (lo, hi) = if forward { (u, u + eps) } else { (u - eps, u) };
    IotaWindow {
        eps,
        u,
        lo,
        hi,
        forward,
    }
}

impl BurgersOperator {
    pub fn new(modes: usize, eps: f64) -> Result<Self, SpdeError> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(SpdeError::EpsRange(eps));
        }
        // (Y(ι_ε(u)))² is smooth on either side of u = 1−2ε and jumps there,
        // so each side gets its own grid.
        let s = 1.0 - 2.0 * eps;
        let base = (256 * modes).max(8192) as f64;
        let mut nodes = Vec::new();
        for (a, b, forward) in [(0.0, s, true), (s, 1.0, false)] {
            let cells = (((b - a) * base / 2.0).ceil() as usize * 2).max(256);
            for (j, w) in richardson_weights(cells).into_iter().enumerate() {
                let u = a + (b - a) * j as f64 / cells as f64;
                nodes.push((u, w * (b - a), forward));
            }
        }
        let q = nodes.len();
        let coeff = Array2::from_shape_fn((q, modes), |(i, k)| {
            let (u, _, fwd) = nodes[i];
            window(eps, u, fwd).sine_coeff(k + 1)
        });
        let mut tensor = Vec::with_capacity(modes * modes * modes);
        for m in 1..=modes {
            let e = BasisFn::sine(m);
            let w: Vec<f64> = nodes.iter().map(|&(u, w, _)| -w * e.grad(u)).collect();
            let mut weighted = coeff.clone();
            for (mut row, wq) in weighted.axis_iter_mut(Axis(0)).zip(&w) {
                row *= *wq;
            }
            let t = coeff.t().dot(&weighted);
            tensor.extend(t.iter());
        }
        Ok(BurgersOperator { modes, eps, tensor })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn nonlinearity(&self, y: &[f64]) -> Vec<f64> {
        let m = self.modes;
        assert_eq!(y.len(), m);
        self.tensor
            .chunks_exact(m * m)
            .map(|t| {
                t.chunks_exact(m)
                    .zip(y)
                    .map(|(row, yk)| yk * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    /// Ē·N(y).
    pub fn drift(&self, y: &[f64], ebar: f64) -> Vec<f64> {
        let mut d = self.nonlinearity(y);
        d.iter_mut().for_each(|v| *v *= ebar);
        d
    }
}

/// drift_m = −Ē∫(Y(ι_ε(u)))²∇e_m(u)du. Tabulates the operator on each call;
/// reuse a [`BurgersOperator`] inside loops.
pub fn burgers_drift(state: &GalerkinState, eps: f64) -> Result<Vec<f64>, SpdeError> {
    let op = BurgersOperator::new(state.params.modes, eps)?;
    Ok(op.drift(&state.y, state.params.ebar))
}

/// Exponential Euler: the linear part is the exact OU transition and the
/// drift enters through φ₁(z) = (e^z − 1)/z.
pub fn burgers_step<R: Rng + ?Sized>(
    state: &GalerkinState,
    dt: f64,
    op: &BurgersOperator,
    rng: &mut R,
) -> Result<GalerkinState, SpdeError> {
    let p = state.params;
    if state.y.len() != op.modes {
        return Err(SpdeError::Modes {
            got: state.y.len(),
            want: op.modes,
        });
    }
    if !(dt > 0.0) {
        return Err(SpdeError::Param(format!("dt must be positive, got {dt}")));
    }
    let bound = p.stability_bound();
    if dt > bound {
        return Err(SpdeError::StepTooLarge { dt, bound });
    }
    let drift = if p.ebar == 0.0 {
        vec![0.0; op.modes]
    } else {
        op.drift(&state.y, p.ebar)
    };
    let mut y = Vec::with_capacity(op.modes);
    for (i, (&yi, &fi)) in state.y.iter().zip(&drift).enumerate() {
        let (decay, var) = ou_transition(p.a, p.d, i + 1, dt);
        let z = -p.a * ((i + 1) as f64 * PI).powi(2) * dt;
        let phi1 = z.exp_m1() / z;
        let v = decay * yi + dt * phi1 * fi + var.sqrt() * rng.sample::<f64, _>(StandardNormal);
        if !v.is_finite() || v.abs() > 1e8 {
            return Err(SpdeError::Unstable(state.t + dt));
        }
        y.push(v);
    }
    Ok(GalerkinState {
        y,
        t: state.t + dt,
        params: p,
    })
}

/// Fixed-step exponential Euler with the per-mode coefficients cached, for
/// long trajectories.
#[derive(Debug, Clone)]
pub struct BurgersIntegrator {
    op: BurgersOperator,
    decay: Vec<f64>,
    gain: Vec<f64>,
    sd: Vec<f64>,
    dt: f64,
    ebar: f64,
}

impl BurgersIntegrator {
    /// Uses `params.dt` and `params.eps`.
    pub fn new(params: &SpdeParams) -> Result<Self, SpdeError> {
        params.validate()?;
        let bound = params.stability_bound();
        if params.dt > bound {
            return Err(SpdeError::StepTooLarge { dt: params.dt, bound });
        }
        let op = BurgersOperator::new(params.modes, params.eps)?;
        let dt = params.dt;
        let mut decay = Vec::with_capacity(params.modes);
        let mut gain = Vec::with_capacity(params.modes);
        let mut sd = Vec::with_capacity(params.modes);
        for m in 1..=params.modes {
            let (g, var) = ou_transition(params.a, params.d, m, dt);
            let z = -params.a * (m as f64 * PI).powi(2) * dt;
            decay.push(g);
            gain.push(dt * (z.exp_m1() / z));
            sd.push(var.sqrt());
        }
        Ok(BurgersIntegrator {
            op,
            decay,
            gain,
            sd,
            dt,
            ebar: params.ebar,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut GalerkinState, rng: &mut R) -> Result<(), SpdeError> {
        let drift = if self.ebar == 0.0 {
            vec![0.0; self.op.modes]
        } else {
            self.op.drift(&state.y, self.ebar)
        };
        state.t += self.dt;
        for (i, y) in state.y.iter_mut().enumerate() {
            let v = self.decay[i] * *y + self.gain[i] * drift[i] + self.sd[i] * rng.sample::<f64, _>(StandardNormal);
            if !v.is_finite() || v.abs() > 1e8 {
                return Err(SpdeError::Unstable(state.t));
            }
            *y = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spde::ou_step;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(y: Vec<f64>, ebar: f64, eps: f64) -> GalerkinState {
        let p = SpdeParams::new(1.0, 0.5, ebar, y.len(), eps).unwrap();
        GalerkinState { y, t: 0.0, params: p }
    }

    /// Y(ι_ε(u)) by a midpoint rule over the window.
    fn smoothed(y: &[f64], eps: f64, u: f64) -> f64 {
        let forward = u < 1.0 - 2.0 * eps;
        let lo = if forward { u } else { u - eps };
        let k = 1000;
        (0..k)
            .map(|j| {
                let v = lo + eps * (j as f64 + 0.5) / k as f64;
                y.iter().enumerate().map(|(i, c)| c * BasisFn::sine(i + 1).eval(v)).sum::<f64>()
            })
            .sum::<f64>()
            / k as f64
    }

    #[test]
    fn zero_state_has_zero_drift() {
        let d = burgers_drift(&state(vec![0.0; 6], 1.0, 0.1), 0.1).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_mode_matches_double_integral() {
        let eps = 0.125;
        let y = vec![1.0, 0.0, 0.0, 0.0];
        let d = burgers_drift(&state(y.clone(), 1.0, eps), eps).unwrap();
        // Dense midpoint grid aligned with the switch at 3/4.
        let cells = 20_000;
        for m in 1..=4 {
            let e = BasisFn::sine(m);
            let want: f64 = -(0..cells)
                .map(|j| {
                    let u = (j as f64 + 0.5) / cells as f64;
                    smoothed(&y, eps, u).powi(2) * e.grad(u)
                })
                .sum::<f64>()
                / cells as f64;
            assert!((d[m - 1] - want).abs() < 1e-6, "m={m}: {} vs {want}", d[m - 1]);
        }
    }

    #[test]
    fn quadratic_in_the_state() {
        let op = BurgersOperator::new(5, 0.05).unwrap();
        let y = vec![0.3, -0.2, 0.5, 0.1, -0.4];
        let a = op.nonlinearity(&y);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let dbl: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        for ((p, q), r) in a.iter().zip(op.nonlinearity(&neg)).zip(op.nonlinearity(&dbl)) {
            assert!((p - q).abs() < 1e-14);
            assert!((4.0 * p - r).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_integral_is_a_boundary_term() {
        let eps = 0.125;
        let low = [0.8, -0.5, 0.3];
        let mut errs = Vec::new();
        for modes in [16, 64] {
            let mut y = vec![0.0; modes];
            y[..3].copy_from_slice(&low);
            let d = burgers_drift(&state(y.clone(), 1.0, eps), eps).unwrap();
            let total: f64 = d.iter().enumerate().map(|(i, v)| v * BasisFn::sine(i + 1).integral()).sum();
            let g = |u: f64| {
                let w = window(eps, u, u < 1.0 - 2.0 * eps);
                y.iter().enumerate().map(|(i, c)| c * w.sine_coeff(i + 1)).sum::<f64>().powi(2)
            };
            errs.push((total - (g(1.0) - g(0.0))).abs());
        }
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1] < 0.05, "{errs:?}");
    }

    #[test]
    fn zero_nonlinearity_is_the_ou_step() {
        let p = SpdeParams::limit(0.0);
        let op = BurgersOperator::new(p.modes, p.eps).unwrap();
        let s = GalerkinState::stationary(p, &mut ChaCha8Rng::seed_from_u64(9));
        let a = burgers_step(&s, p.dt, &op, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = ou_step(&s, p.dt, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
    }

    #[test]
    fn integrator_matches_single_steps() {
        let p = SpdeParams::new(1.0, 0.5, 1.5, 8, 0.1).unwrap();
        let op = BurgersOperator::new(8, 0.1).unwrap();
        let int = BurgersIntegrator::new(&p).unwrap();
        let mut a = GalerkinState::stationary(p, &mut ChaCha8Rng::seed_from_u64(1));
        let mut b = a.clone();
        let (mut ra, mut rb) = (ChaCha8Rng::seed_from_u64(2), ChaCha8Rng::seed_from_u64(2));
        for _ in 0..50 {
            a = burgers_step(&a, p.dt, &op, &mut ra).unwrap();
            int.step(&mut b, &mut rb).unwrap();
        }
        assert_eq!(a.y, b.y);
        assert!((a.t - b.t).abs() < 1e-15);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let p = SpdeParams::limit(1.0);
        let op = BurgersOperator::new(p.modes, p.eps).unwrap();
        let s = GalerkinState::zero(p);
        let err = burgers_step(&s, 10.0 * p.stability_bound(), &op, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(SpdeError::StepTooLarge { .. })));
    }

    #[test]
    fn blow_up_is_reported() {
        let p = SpdeParams::new(1.0, 0.0, 1.0, 4, 0.1).unwrap();
        let op = BurgersOperator::new(4, 0.1).unwrap();
        let mut s = GalerkinState {
            y: vec![1e7, 1e7, 0.0, 0.0],
            t: 0.0,
            params: p,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut out = Ok(());
        for _ in 0..1000 {
            match burgers_step(&s, p.stability_bound(), &op, &mut rng) {
                Ok(n) => s = n,
                Err(e) => {
                    out = Err(e);
                    break;
                }
            }
        }
        assert!(matches!(out, Err(SpdeError::Unstable(_))));
    }
}
