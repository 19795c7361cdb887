use serde::Serialize;

use super::{changed_sites, site_before, DriftConstants, ObservableError};
use crate::lattice::{ChainState, Channel, Event, HeightState, Model, Observer, Occupancy};

/// log ξ(x) = (θ_n/√n) h(x) + λ_n n² t for x = 1..=n.
pub fn log_xi(state: &HeightState, consts: &DriftConstants) -> Vec<f64> {
    let n = state.eta.n();
    let k = consts.theta_n / (n as f64).sqrt();
    let shift = consts.lambda_macro(n) * state.t_macro;
    state.heights().iter().map(|h| k * h + shift).collect()
}

/// ξ(x) for x = 1..=n and J^n(φ) = (1/n) Σ φ(x/n) ξ(x), `phi[x−1] = φ(x/n)`.
pub fn cole_hopf_field(
    state: &HeightState,
    consts: &DriftConstants,
    phi: &[f64],
) -> Result<(Vec<f64>, f64), ObservableError> {
    let n = state.eta.n();
    if phi.len() != n {
        return Err(ObservableError::Length { got: phi.len(), want: n });
    }
    let xi: Vec<f64> = log_xi(state, consts).into_iter().map(f64::exp).collect();
    let j = xi.iter().zip(phi).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    Ok((xi, j))
}

/// (T_n ξ)(x), x = 1..=n, with unscaled differences.
pub fn t_n_apply(xi: &[f64], consts: &DriftConstants) -> Vec<f64> {
    let n = xi.len();
    let nf = n as f64;
    let dn2 = consts.d_n * nf * nf;
    (0..n)
        .map(|i| {
            if i == 0 {
                nf * consts.alpha_n * xi[0] + dn2 * (xi[1] - xi[0])
            } else if i == n - 1 {
                nf * consts.beta_n * xi[i] - dn2 * (xi[i] - xi[i - 1])
            } else {
                dn2 * (xi[i + 1] + xi[i - 1] - 2.0 * xi[i])
            }
        })
        .collect()
}

/// The compensator read off the jump rates: n² ξ(x)[λ_n + ε_n(η(x) − η(x−1))],
/// with η(0) = η(n) = ρ.
pub fn direct_compensator(xi: &[f64], eta: &Occupancy, rho: f64, consts: &DriftConstants, e: f64) -> Vec<f64> {
    let n = xi.len();
    let nf = n as f64;
    let eps = e / nf.sqrt();
    let val = |x: usize| if x == 0 || x == n { rho } else { eta.get(x) as f64 };
    (1..=n)
        .map(|x| nf * nf * xi[x - 1] * (consts.lambda_n + eps * (val(x) - val(x - 1))))
        .collect()
}

/// E_ν[ξ_0(x)] = cosh(θ_n/(2√n))^{x−1} at ρ = 1/2.
pub fn mean_xi0(consts: &DriftConstants, n: usize, x: usize) -> f64 {
    (consts.theta_n / (2.0 * (n as f64).sqrt())).cosh().powi(x as i32 - 1)
}

/// E_ν[J_0(φ)] = (1/n) Σ φ(x/n) E[ξ_0(x)], `phi[x−1] = φ(x/n)`.
pub fn mean_current_field0(consts: &DriftConstants, phi: &[f64]) -> f64 {
    let n = phi.len();
    phi.iter()
        .enumerate()
        .map(|(i, p)| p * mean_xi0(consts, n, i + 1))
        .sum::<f64>()
        / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColeHopfSample {
    pub t: f64,
    pub j: f64,
    /// J_t − J_0 − ∫(1/n)Σ φ (T_n ξ) ds.
    pub m_tn: f64,
    /// J_t − J_0 minus the compensator read off the rates.
    pub m_direct: f64,
    /// The predictable QV from the rates.
    pub qv_pred: f64,
    pub qv_jump: f64,
}

/// Follows J^n(φ) and its compensators along a trajectory. ξ is kept as
/// e^{Λt}ψ(x) with Λ = λ_n n² and ψ(x) = e^{θ_n h(x)/√n}; the time factor is
/// integrated in closed form.
#[derive(Debug, Clone)]
pub struct ColeHopfObserver {
    n: usize,
    rho: f64,
    eps: f64,
    lam: f64,
    lambda_n: f64,
    k: f64,
    /// φ(x/n)/n, index x−1.
    w: Vec<f64>,
    /// Adjoint weights: Σ_x wt[x] ψ(x) = (1/n) Σ φ (T_n ψ).
    wt: Vec<f64>,
    /// h(x) + ρ(x−1), an integer, index x−1.
    kx: Vec<i64>,
    psi: Vec<f64>,
    s_j: f64,
    s_t: f64,
    s_d: f64,
    s_q: f64,
    t: f64,
    j0: f64,
    int_t: f64,
    int_d: f64,
    qv_pred: f64,
    qv_jump: f64,
    pub samples: Vec<ColeHopfSample>,
}

impl ColeHopfObserver {
    /// `phi[x−1] = φ(x/n)` for x = 1..=n.
    pub fn new(model: &Model, st: &ChainState, phi: &[f64]) -> Result<Self, ObservableError> {
        let n = model.n;
        if (model.rho - 0.5).abs() > 1e-12 {
            return Err(ObservableError::Density(model.rho));
        }
        if phi.len() != n {
            return Err(ObservableError::Length { got: phi.len(), want: n });
        }
        let consts = DriftConstants::new(model);
        let nf = n as f64;
        let w: Vec<f64> = phi.iter().map(|p| p / nf).collect();
        // wt = Tᵀ w.
        let mut wt = vec![0.0; n];
        for y in 0..n {
            let mut unit = vec![0.0; n];
            unit[y] = 1.0;
            let col = t_n_apply(&unit, &consts);
            wt[y] = col.iter().zip(&w).map(|(a, b)| a * b).sum();
        }
        let mut obs = ColeHopfObserver {
            n,
            rho: model.rho,
            eps: model.e / nf.sqrt(),
            lam: consts.lambda_macro(n),
            lambda_n: consts.lambda_n,
            k: consts.theta_n / nf.sqrt(),
            w,
            wt,
            kx: vec![0; n],
            psi: vec![0.0; n],
            s_j: 0.0,
            s_t: 0.0,
            s_d: 0.0,
            s_q: 0.0,
            t: st.macro_time(),
            j0: 0.0,
            int_t: 0.0,
            int_d: 0.0,
            qv_pred: 0.0,
            qv_jump: 0.0,
            samples: Vec::new(),
        };
        obs.rebuild(st);
        obs.j0 = obs.j_now();
        Ok(obs)
    }

    fn rebuild(&mut self, st: &ChainState) {
        let n = self.n;
        let mut acc = st.h1;
        for x in 1..=n {
            if x > 1 {
                acc += st.eta.get(x - 1) as i64;
            }
            self.kx[x - 1] = acc;
            self.psi[x - 1] = self.psi_of(x);
        }
        self.s_j = self.psi.iter().zip(&self.w).map(|(a, b)| a * b).sum();
        self.s_t = self.psi.iter().zip(&self.wt).map(|(a, b)| a * b).sum();
        let val = |x: usize| self.val(&st.eta, x);
        let (d, q): (Vec<f64>, Vec<f64>) = (1..=n).map(|x| self.local(x, val(x), val(x - 1), self.psi[x - 1])).unzip();
        self.s_d = d.iter().sum();
        self.s_q = q.iter().sum();
    }

    fn psi_of(&self, x: usize) -> f64 {
        let h = self.kx[x - 1] as f64 - self.rho * (x - 1) as f64;
        (self.k * h).exp()
    }

    fn val(&self, eta: &Occupancy, x: usize) -> f64 {
        if x == 0 || x == self.n {
            self.rho
        } else {
            eta.get(x) as f64
        }
    }

    /// Site x's share of the direct compensator and QV rates, without time factors.
    fn local(&self, x: usize, here: f64, left: f64, psi: f64) -> (f64, f64) {
        let nf = self.n as f64;
        let w = self.w[x - 1];
        let d = nf * nf * w * psi * (self.lambda_n + self.eps * (here - left));
        let e2 = self.eps * self.eps * nf;
        let bracket = here * (1.0 - left) + left * (1.0 - here) / (1.0 + self.eps);
        let q = e2 * (nf * w * w) * psi * psi * bracket;
        (d, q)
    }

    fn j_now(&self) -> f64 {
        (self.lam * self.t).exp() * self.s_j
    }

    /// ∫_{t}^{t+dt} e^{c s} ds.
    fn exp_integral(c: f64, t: f64, dt: f64) -> f64 {
        if c == 0.0 {
            dt
        } else {
            (c * t).exp() * (c * dt).exp_m1() / c
        }
    }

    pub fn current(&self) -> ColeHopfSample {
        let j = self.j_now();
        ColeHopfSample {
            t: self.t,
            j,
            m_tn: j - self.j0 - self.int_t,
            m_direct: j - self.j0 - self.int_d,
            qv_pred: self.qv_pred,
            qv_jump: self.qv_jump,
        }
    }

    /// ψ index changed by a channel, with the change of h there.
    fn moved(ch: Channel, n: usize) -> (usize, i64) {
        match ch {
            Channel::BulkRight(x) => (x + 1, -1),
            Channel::BulkLeft(x) => (x + 1, 1),
            Channel::ExitLeft => (1, 1),
            Channel::EnterLeft => (1, -1),
            Channel::ExitRight => (n, -1),
            Channel::EnterRight => (n, 1),
        }
    }
}

impl Observer for ColeHopfObserver {
    fn hold(&mut self, _st: &ChainState, dt: f64) {
        let e1 = Self::exp_integral(self.lam, self.t, dt);
        let e2 = Self::exp_integral(2.0 * self.lam, self.t, dt);
        self.int_t += self.s_t * e1;
        self.int_d += self.s_d * e1;
        self.qv_pred += self.s_q * e2;
        self.t += dt;
    }

    fn jump(&mut self, st: &ChainState, ev: &Event) {
        let n = self.n;
        let ch = ev.channel;
        let eta = &st.eta;
        let (px, dh) = Self::moved(ch, n);
        let (sites, k) = changed_sites(n, ch);
        // Sites whose local terms can change: px and x, x+1 for each changed site x.
        let mut xs = [px, 0, 0, 0, 0];
        let mut m = 1;
        for &s in &sites[..k] {
            for x in [s, s + 1] {
                if x <= n && !xs[..m].contains(&x) {
                    xs[m] = x;
                    m += 1;
                }
            }
        }
        let before = |x: usize| -> f64 {
            if x == 0 || x == n {
                self.rho
            } else {
                site_before(eta, ch, x) as f64
            }
        };
        let old_psi = self.psi[px - 1];
        for &x in &xs[..m] {
            let (d, q) = self.local(x, before(x), before(x - 1), self.psi[x - 1]);
            self.s_d -= d;
            self.s_q -= q;
        }
        self.kx[px - 1] += dh;
        let new_psi = self.psi_of(px);
        self.psi[px - 1] = new_psi;
        let dpsi = new_psi - old_psi;
        self.s_j += self.w[px - 1] * dpsi;
        self.s_t += self.wt[px - 1] * dpsi;
        for &x in &xs[..m] {
            let (d, q) = self.local(x, self.val(eta, x), self.val(eta, x - 1), self.psi[x - 1]);
            self.s_d += d;
            self.s_q += q;
        }
        let dj = (self.lam * self.t).exp() * self.w[px - 1] * dpsi;
        self.qv_jump += dj * dj;
        if st.events % (1 << 16) == 0 {
            self.rebuild(st);
        }
    }

    fn record(&mut self, _st: &ChainState, t: f64) {
        let mut s = self.current();
        s.t = t;
        self.samples.push(s);
    }
}
