use serde::Serialize;

use super::{changed_sites, site_before, ObservableError};
use crate::lattice::{ChainState, Event, Observer, Occupancy};

/// Values at one record time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearSample {
    pub t: f64,
    /// Y^n(w_k).
    pub y: Vec<f64>,
    /// ∫₀ᵗ Y^n_s(w_k) ds.
    pub integral: Vec<f64>,
    pub h1: i64,
    /// h(n).
    pub h_right: f64,
}

/// Tracks Y^n(w_k) = n^{-1/2} Σ w_k(x) η̄(x) for several weight vectors,
/// with exact time integrals, and snapshots them at record times.
#[derive(Debug, Clone)]
pub struct LinearObserver {
    n: usize,
    rho: f64,
    scale: f64,
    /// Weights over sites 1..n−1, stored at index x−1.
    weights: Vec<Vec<f64>>,
    sums: Vec<f64>,
    integrals: Vec<f64>,
    pub samples: Vec<LinearSample>,
}

impl LinearObserver {
    pub fn new(eta: &Occupancy, rho: f64, weights: Vec<Vec<f64>>) -> Result<Self, ObservableError> {
        let n = eta.n();
        for w in &weights {
            if w.len() != n - 1 {
                return Err(ObservableError::Length { got: w.len(), want: n - 1 });
            }
        }
        let k = weights.len();
        let mut obs = LinearObserver {
            n,
            rho,
            scale: 1.0 / (n as f64).sqrt(),
            weights,
            sums: vec![0.0; k],
            integrals: vec![0.0; k],
            samples: Vec::new(),
        };
        obs.rebuild(eta);
        Ok(obs)
    }

    fn rebuild(&mut self, eta: &Occupancy) {
        for (s, w) in self.sums.iter_mut().zip(&self.weights) {
            *s = eta
                .as_slice()
                .iter()
                .zip(w)
                .map(|(&v, wx)| wx * (v as f64 - self.rho))
                .sum();
        }
    }

    /// Current Y^n(w_k).
    pub fn values(&self) -> Vec<f64> {
        self.sums.iter().map(|s| s * self.scale).collect()
    }

    pub fn integrals(&self) -> &[f64] {
        &self.integrals
    }
}

impl Observer for LinearObserver {
    fn hold(&mut self, _st: &ChainState, dt: f64) {
        let f = self.scale * dt;
        for (i, s) in self.integrals.iter_mut().zip(&self.sums) {
            *i += s * f;
        }
    }

    fn jump(&mut self, st: &ChainState, ev: &Event) {
        let (sites, k) = changed_sites(self.n, ev.channel);
        for &x in &sites[..k] {
            let d = st.eta.get(x) as f64 - site_before(&st.eta, ev.channel, x) as f64;
            for (s, w) in self.sums.iter_mut().zip(&self.weights) {
                *s += w[x - 1] * d;
            }
        }
        if st.events % (1 << 20) == 0 {
            self.rebuild(&st.eta);
        }
    }

    fn record(&mut self, st: &ChainState, t: f64) {
        self.samples.push(LinearSample {
            t,
            y: self.values(),
            integral: self.integrals.clone(),
            h1: st.h1,
            h_right: st.h_right(),
        });
    }
}
