use serde::Serialize;

use super::{changed_sites, site_before, ObservableError};
use crate::lattice::{Channel, ChainState, Event, Model, Observer, Occupancy};

/// Martingale decomposition of Y^n(φ) at one record time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MartSample {
    pub t: f64,
    pub y: f64,
    /// I_t = ∫ Y_s(Δ_n φ) ds.
    pub i: f64,
    /// A_t = −(√n/n^γ) ∫ Σ ∇⁺_nφ η̄(x)η̄(x+1) ds, without the factor E.
    pub a_raw: f64,
    /// E·A_t, the term that enters the decomposition.
    pub a_scaled: f64,
    /// Compensator part that is linear in η̄ with coefficient ε_n(1/2 − ρ); zero at ρ = 1/2.
    pub transport: f64,
    /// M_t = Y_t − Y_0 − (1 + ε_n/2) I_t − E·A_t − transport.
    pub m: f64,
    /// ∫ (1/n) Σ_{bonds} r_{x,x+1}(η) (∇⁺_nφ)² ds, the predictable QV.
    pub qv_pred: f64,
    /// Same with the bulk rate replaced by (1 + ε_n)(η(x) − η(x+1))².
    pub qv_avg: f64,
    /// Σ over jumps of (ΔY)², the optional QV.
    pub qv_jump: f64,
}

/// Follows the martingale decomposition of Y^n(φ) for a Dirichlet test
/// function, integrating every compensator exactly over the jump chain.
#[derive(Debug, Clone)]
pub struct MartingaleObserver {
    n: usize,
    rho: f64,
    eps: f64,
    e: f64,
    sqrt_n: f64,
    a_pref: f64,
    t_pref: f64,
    /// φ_x, x = 0..=n, with φ_0 = φ_n = 0.
    phi: Vec<f64>,
    /// Δ_nφ_x at index x (ends unused).
    lap: Vec<f64>,
    /// ∇⁺_nφ_x, x = 0..n−1.
    grad: Vec<f64>,
    /// φ_{x+1} − φ_{x−1}.
    tw: Vec<f64>,
    y: f64,
    ylap: f64,
    quad: f64,
    trans: f64,
    qv_rate: f64,
    qv_avg_rate: f64,
    y0: f64,
    int_lap: f64,
    int_quad: f64,
    int_trans: f64,
    qv_pred: f64,
    qv_avg: f64,
    qv_jump: f64,
    pub samples: Vec<MartSample>,
}

impl MartingaleObserver {
    /// `phi[x] = φ(x/n)` for x = 0..=n; the end values are taken to be 0.
    pub fn new(model: &Model, eta: &Occupancy, phi: &[f64]) -> Result<Self, ObservableError> {
        let n = model.n;
        if phi.len() != n + 1 {
            return Err(ObservableError::Length { got: phi.len(), want: n + 1 });
        }
        let nf = n as f64;
        let mut p = phi.to_vec();
        p[0] = 0.0;
        p[n] = 0.0;
        let mut lap = vec![0.0; n + 1];
        let mut tw = vec![0.0; n + 1];
        for x in 1..n {
            lap[x] = nf * nf * (p[x + 1] + p[x - 1] - 2.0 * p[x]);
            tw[x] = p[x + 1] - p[x - 1];
        }
        let grad = (0..n).map(|x| nf * (p[x + 1] - p[x])).collect();
        let eps = model.asymmetry();
        let mut obs = MartingaleObserver {
            n,
            rho: model.rho,
            eps,
            e: model.e,
            sqrt_n: nf.sqrt(),
            a_pref: -nf.sqrt() / nf.powf(model.gamma),
            t_pref: eps * (0.5 - model.rho) * nf.powf(1.5),
            phi: p,
            lap,
            grad,
            tw,
            y: 0.0,
            ylap: 0.0,
            quad: 0.0,
            trans: 0.0,
            qv_rate: 0.0,
            qv_avg_rate: 0.0,
            y0: 0.0,
            int_lap: 0.0,
            int_quad: 0.0,
            int_trans: 0.0,
            qv_pred: 0.0,
            qv_avg: 0.0,
            qv_jump: 0.0,
            samples: Vec::new(),
        };
        obs.rebuild(eta);
        obs.y0 = obs.y;
        Ok(obs)
    }

    fn val(&self, eta: &Occupancy, x: usize) -> f64 {
        if x == 0 || x == self.n {
            self.rho
        } else {
            eta.get(x) as f64
        }
    }

    /// (r_b g_b², averaged-rate rate · g_b², g_b η̄_b η̄_{b+1}) for bond (b, b+1).
    fn bond(&self, a: f64, b: f64, bond: usize) -> (f64, f64, f64) {
        let g2 = self.grad[bond] * self.grad[bond];
        let r = (1.0 + self.eps) * a * (1.0 - b) + b * (1.0 - a);
        if bond == 0 || bond == self.n - 1 {
            (r * g2, r * g2, 0.0)
        } else {
            let d = a - b;
            let q = self.grad[bond] * (a - self.rho) * (b - self.rho);
            (r * g2, (1.0 + self.eps) * d * d * g2, q)
        }
    }

    fn rebuild(&mut self, eta: &Occupancy) {
        let n = self.n;
        let (mut y, mut yl, mut tr) = (0.0, 0.0, 0.0);
        for x in 1..n {
            let v = eta.get(x) as f64 - self.rho;
            y += self.phi[x] * v;
            yl += self.lap[x] * v;
            tr += self.tw[x] * v;
        }
        let (mut qr, mut qp, mut qd) = (0.0, 0.0, 0.0);
        for b in 0..n {
            let (r, p, q) = self.bond(self.val(eta, b), self.val(eta, b + 1), b);
            qr += r;
            qp += p;
            qd += q;
        }
        self.y = y;
        self.ylap = yl;
        self.trans = tr;
        self.qv_rate = qr;
        self.qv_avg_rate = qp;
        self.quad = qd;
    }

    /// Instantaneous compensator rate d/dt of (1+ε/2)I + E·A + transport.
    pub fn drift_rate(&self) -> f64 {
        (1.0 + self.eps / 2.0) * self.ylap / self.sqrt_n
            + self.e * self.a_pref * self.quad
            + self.t_pref * self.trans
    }

    /// Instantaneous predictable QV rate.
    pub fn qv_rate(&self) -> f64 {
        self.qv_rate / self.n as f64
    }

    pub fn current(&self) -> MartSample {
        let y = self.y / self.sqrt_n;
        let i = self.int_lap / self.sqrt_n;
        let a_raw = self.a_pref * self.int_quad;
        let transport = self.t_pref * self.int_trans;
        let a_scaled = self.e * a_raw;
        MartSample {
            t: 0.0,
            y,
            i,
            a_raw,
            a_scaled,
            transport,
            m: y - self.y0 / self.sqrt_n - (1.0 + self.eps / 2.0) * i - a_scaled - transport,
            qv_pred: self.qv_pred,
            qv_avg: self.qv_avg,
            qv_jump: self.qv_jump,
        }
    }

    fn touched(&self, ch: Channel) -> std::ops::RangeInclusive<usize> {
        let n = self.n;
        match ch {
            Channel::BulkRight(x) | Channel::BulkLeft(x) => x - 1..=(x + 1).min(n - 1),
            Channel::EnterLeft | Channel::ExitLeft => 0..=1,
            Channel::EnterRight | Channel::ExitRight => n - 2..=n - 1,
        }
    }
}

impl Observer for MartingaleObserver {
    fn hold(&mut self, _st: &ChainState, dt: f64) {
        self.int_lap += self.ylap * dt;
        self.int_quad += self.quad * dt;
        self.int_trans += self.trans * dt;
        let inv_n = 1.0 / self.n as f64;
        self.qv_pred += self.qv_rate * inv_n * dt;
        self.qv_avg += self.qv_avg_rate * inv_n * dt;
    }

    fn jump(&mut self, st: &ChainState, ev: &Event) {
        let eta = &st.eta;
        let ch = ev.channel;
        let before = |x: usize| -> f64 {
            if x == 0 || x == self.n {
                self.rho
            } else {
                site_before(eta, ch, x) as f64
            }
        };
        let (mut dr, mut dp, mut dq) = (0.0, 0.0, 0.0);
        for b in self.touched(ch) {
            let (r0, p0, q0) = self.bond(before(b), before(b + 1), b);
            let (r1, p1, q1) = self.bond(self.val(eta, b), self.val(eta, b + 1), b);
            dr += r1 - r0;
            dp += p1 - p0;
            dq += q1 - q0;
        }
        let (sites, k) = changed_sites(self.n, ch);
        let mut dy = 0.0;
        for &x in &sites[..k] {
            let d = eta.get(x) as f64 - site_before(eta, ch, x) as f64;
            dy += self.phi[x] * d;
            self.ylap += self.lap[x] * d;
            self.trans += self.tw[x] * d;
        }
        self.y += dy;
        self.qv_rate += dr;
        self.qv_avg_rate += dp;
        self.quad += dq;
        self.qv_jump += dy * dy / self.n as f64;
        if st.events % (1 << 20) == 0 {
            self.rebuild(eta);
        }
    }

    fn record(&mut self, _st: &ChainState, t: f64) {
        let mut s = self.current();
        s.t = t;
        self.samples.push(s);
    }
}

/// Σ (M_{t_{i+s}} − M_{t_i})² over the record grid taken with stride `s`.
pub fn realized_qv(samples: &[MartSample], stride: usize) -> f64 {
    assert!(stride >= 1);
    let ms: Vec<f64> = samples.iter().step_by(stride).map(|s| s.m).collect();
    ms.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_channel, channel_rates, replica_rng, sample_initial, Engine};
    use crate::spectral::BasisFn;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn y_of(eta: &Occupancy, phi: &[f64], rho: f64) -> f64 {
        let n = eta.n();
        (1..n).map(|x| phi[x] * (eta.get(x) as f64 - rho)).sum::<f64>() / (n as f64).sqrt()
    }

    /// n²LY(φ) and n²Σ rate·(ΔY)² by brute force over the channels.
    fn brute(model: &Model, eta: &Occupancy, phi: &[f64]) -> (f64, f64) {
        let n2 = (model.n * model.n) as f64;
        let y0 = y_of(eta, phi, model.rho);
        let (mut drift, mut qv) = (0.0, 0.0);
        for tc in channel_rates(eta, model) {
            if tc.rate == 0.0 {
                continue;
            }
            let mut e2 = eta.clone();
            apply_channel(&mut e2, tc.kind);
            let d = y_of(&e2, phi, model.rho) - y0;
            drift += n2 * tc.rate * d;
            qv += n2 * tc.rate * d * d;
        }
        (drift, qv)
    }

    #[test]
    fn compensator_matches_generator() {
        let cases = [(0.5, 1.0, 0.5), (0.5, -2.0, 0.5), (1.0, 1.0, 0.5), (1.5, 3.0, 0.3), (2.0, 0.0, 0.8)];
        for (k, &(gamma, e, rho)) in cases.iter().enumerate() {
            let model = Model::new(30, gamma, e, rho).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let eta = sample_initial(30, rho, &mut rng);
            for m in 1..4 {
                let mut phi = BasisFn::sine(m).grid(30);
                phi[0] = 0.0;
                phi[30] = 0.0;
                let obs = MartingaleObserver::new(&model, &eta, &phi).unwrap();
                let (drift, qv) = brute(&model, &eta, &phi);
                assert!((obs.drift_rate() - drift).abs() < 1e-9 * drift.abs().max(1.0), "{drift} {}", obs.drift_rate());
                assert!((obs.qv_rate() - qv).abs() < 1e-9 * qv.max(1.0));
            }
        }
    }

    #[test]
    fn incremental_state_matches_rebuild() {
        let model = Model::new(25, 0.5, 1.0, 0.5).unwrap();
        let mut eng = Engine::stationary(model, replica_rng(4, 2));
        let phi = BasisFn::sine(2).grid(25);
        let mut obs = MartingaleObserver::new(&model, eng.eta(), &phi).unwrap();
        for _ in 0..3000 {
            let ev = eng.step().unwrap();
            obs.jump(eng.state(), &ev);
        }
        let fresh = MartingaleObserver::new(&model, eng.eta(), &phi).unwrap();
        assert!((obs.drift_rate() - fresh.drift_rate()).abs() < 1e-8);
        assert!((obs.qv_rate() - fresh.qv_rate()).abs() < 1e-8);
        assert!((obs.qv_avg_rate - fresh.qv_avg_rate).abs() < 1e-8);
        assert!((obs.y - fresh.y).abs() < 1e-12);
    }

    #[test]
    fn symmetric_case_has_no_asymmetric_term() {
        let model = Model::new(32, 0.5, 0.0, 0.5).unwrap();
        let mut eng = Engine::stationary(model, replica_rng(1, 0));
        let mut obs = MartingaleObserver::new(&model, eng.eta(), &BasisFn::sine(1).grid(32)).unwrap();
        eng.run(0.1, &[0.1], &mut obs).unwrap();
        let s = obs.samples[0];
        assert_eq!(s.a_scaled, 0.0);
        assert_eq!(s.transport, 0.0);
        assert!(s.qv_jump > 0.0);
    }

    #[test]
    fn realized_qv_strides() {
        let mk = |m: f64| MartSample {
            t: 0.0,
            y: 0.0,
            i: 0.0,
            a_raw: 0.0,
            a_scaled: 0.0,
            transport: 0.0,
            m,
            qv_pred: 0.0,
            qv_avg: 0.0,
            qv_jump: 0.0,
        };
        let s: Vec<MartSample> = [0.0, 1.0, 3.0, 2.0, 4.0].iter().map(|&m| mk(m)).collect();
        assert_eq!(realized_qv(&s, 1), 1.0 + 4.0 + 1.0 + 4.0);
        assert_eq!(realized_qv(&s, 2), 9.0 + 1.0);
    }
}
