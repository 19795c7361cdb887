use rand::Rng;
use rand_distr::StandardNormal;

use super::params::lambda;
use super::GalerkinState;

/// Per-mode transition over dt: y ← decay·y + N(0, var).
pub fn ou_transition(a: f64, d: f64, m: usize, dt: f64) -> (f64, f64) {
    let r = a * lambda(m) * dt;
    let decay = (-r).exp();
    let var = d / (2.0 * a) * -(-2.0 * r).exp_m1();
    (decay, var)
}

/// Exact OU step of size dt, modes independent.
pub fn ou_step<R: Rng + ?Sized>(state: &GalerkinState, dt: f64, rng: &mut R) -> GalerkinState {
    assert!(dt > 0.0, "ou_step needs dt > 0");
    let p = state.params;
    let y = state
        .y
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let (decay, var) = ou_transition(p.a, p.d, i + 1, dt);
            decay * y + var.sqrt() * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    GalerkinState {
        y,
        t: state.t + dt,
        params: p,
    }
}
