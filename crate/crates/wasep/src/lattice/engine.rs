use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;
use thiserror::Error;

use super::grouped::{ChannelIndex, GroupedIndex};
use super::params::{Model, SimParams};
use super::rate_index::RateIndex;
use super::state::{apply_channel, sample_initial, Channel, Occupancy, RateTable};

const REBUILD_EVERY: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("rate index corrupted: total rate {0}")]
    Corrupt(f64),
    #[error("record times must be sorted and lie in [now, {t_end}]")]
    RecordTimes { t_end: f64 },
}

/// One fired transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub channel: Channel,
    /// Microscopic holding time preceding the jump.
    pub dt: f64,
    pub dh_left: i64,
    pub dn_right: i64,
}

/// Occupancy plus the left-boundary counter h(1) at a macroscopic time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightState {
    pub eta: Occupancy,
    pub h1: i64,
    pub t_macro: f64,
    pub rho: f64,
}

impl HeightState {
    /// h(x) = h(1) + Σ_{y<x} (η(y) − ρ), for x = 1..=n.
    pub fn height(&self, x: usize) -> f64 {
        let ones: i64 = self.eta.as_slice()[..x - 1].iter().map(|&v| v as i64).sum();
        self.h1 as f64 + ones as f64 - self.rho * (x - 1) as f64
    }

    /// Heights h(1), …, h(n).
    pub fn heights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.eta.n());
        let mut ones = 0i64;
        out.push(self.h1 as f64);
        for (k, &v) in self.eta.as_slice().iter().enumerate() {
            ones += v as i64;
            out.push(self.h1 as f64 + ones as f64 - self.rho * (k + 1) as f64);
        }
        out
    }
}

/// Everything about a running chain except its sampler and random stream.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub model: Model,
    pub table: RateTable,
    pub eta: Occupancy,
    /// h(1): particles removed minus particles added at the left reservoir.
    pub h1: i64,
    /// Particles added minus particles removed at the right reservoir.
    pub right_in: i64,
    /// Microscopic clock.
    pub tau: f64,
    pub events: u64,
}

impl ChainState {
    pub fn n(&self) -> usize {
        self.model.n
    }

    pub fn macro_time(&self) -> f64 {
        let n = self.model.n as f64;
        self.tau / (n * n)
    }

    /// h(n) = h(1) + Σ_{y<n} (η(y) − ρ).
    pub fn h_right(&self) -> f64 {
        self.h1 as f64 + self.eta.particles() as f64 - self.model.rho * (self.model.n - 1) as f64
    }

    pub fn height_state(&self) -> HeightState {
        HeightState {
            eta: self.eta.clone(),
            h1: self.h1,
            t_macro: self.macro_time(),
            rho: self.model.rho,
        }
    }
}

/// Hooks into a running trajectory. Holding times are macroscopic.
pub trait Observer {
    /// The chain sat in the current state for `dt` macroscopic time units.
    fn hold(&mut self, _st: &ChainState, _dt: f64) {}
    /// `ev` has just been applied.
    fn jump(&mut self, _st: &ChainState, _ev: &Event) {}
    /// Snapshot request at macroscopic time `t`.
    fn record(&mut self, _st: &ChainState, _t: f64) {}
}

impl Observer for () {}

impl<A: Observer, B: Observer> Observer for (A, B) {
    fn hold(&mut self, st: &ChainState, dt: f64) {
        self.0.hold(st, dt);
        self.1.hold(st, dt);
    }
    fn jump(&mut self, st: &ChainState, ev: &Event) {
        self.0.jump(st, ev);
        self.1.jump(st, ev);
    }
    fn record(&mut self, st: &ChainState, t: f64) {
        self.0.record(st, t);
        self.1.record(st, t);
    }
}

/// Gillespie direct-method chain, generic over the channel sampler.
#[derive(Debug, Clone)]
pub struct Chain<I: ChannelIndex> {
    state: ChainState,
    index: I,
    rng: ChaCha8Rng,
}

/// Production engine: grouped O(1) sampler.
pub type Engine = Chain<GroupedIndex>;
/// Reference engine: binary sum tree over all channels.
pub type TreeEngine = Chain<RateIndex>;

/// Stream `replica` of `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

impl<I: ChannelIndex> Chain<I> {
    pub fn new(model: Model, eta: Occupancy, rng: ChaCha8Rng) -> Self {
        assert_eq!(eta.n(), model.n, "occupancy does not match lattice size");
        let table = RateTable::new(&model);
        let index = I::build(&table, &eta);
        Chain {
            state: ChainState {
                model,
                table,
                eta,
                h1: 0,
                right_in: 0,
                tau: 0.0,
                events: 0,
            },
            index,
            rng,
        }
    }

    /// Start from ν_ρ drawn from the chain's own stream.
    pub fn stationary(model: Model, mut rng: ChaCha8Rng) -> Self {
        let eta = sample_initial(model.n, model.rho, &mut rng);
        Chain::new(model, eta, rng)
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn eta(&self) -> &Occupancy {
        &self.state.eta
    }

    pub fn index(&self) -> &I {
        &self.index
    }

    pub fn total_rate(&self) -> f64 {
        self.index.total()
    }

    pub fn events(&self) -> u64 {
        self.state.events
    }

    pub fn macro_time(&self) -> f64 {
        self.state.macro_time()
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    #[inline]
    fn draw_wait(&mut self) -> Result<f64, EngineError> {
        let total = self.index.total();
        if !(total > 0.0 && total.is_finite()) {
            return Err(EngineError::Corrupt(total));
        }
        let e: f64 = self.rng.sample(Exp1);
        Ok(e / total)
    }

    #[inline]
    fn fire(&mut self, dt: f64) -> Event {
        let u: f64 = self.rng.random();
        let channel = self.index.pick(u);
        let st = &mut self.state;
        apply_channel(&mut st.eta, channel);
        self.index.update(&st.table, &st.eta, channel);
        let ev = Event {
            channel,
            dt,
            dh_left: channel.dh_left(),
            dn_right: channel.dn_right(),
        };
        st.h1 += ev.dh_left;
        st.right_in += ev.dn_right;
        st.tau += dt;
        st.events += 1;
        if st.events % REBUILD_EVERY == 0 {
            self.index.rebuild(&st.table, &st.eta);
        }
        ev
    }

    /// Draw the holding time, then fire one event.
    pub fn step(&mut self) -> Result<Event, EngineError> {
        let dt = self.draw_wait()?;
        Ok(self.fire(dt))
    }

    /// Advance to macroscopic time `t_end`, calling `record` at each of `records`
    /// (sorted, within [now, t_end]) with the right-continuous state.
    pub fn run<O: Observer>(
        &mut self,
        t_end: f64,
        records: &[f64],
        obs: &mut O,
    ) -> Result<(), EngineError> {
        let n = self.state.model.n as f64;
        let n2 = n * n;
        let tau_end = t_end * n2;
        let start = self.state.macro_time();
        if records.windows(2).any(|w| w[1] < w[0])
            || records.iter().any(|&r| r < start - 1e-12 || r > t_end + 1e-12)
        {
            return Err(EngineError::RecordTimes { t_end });
        }
        let mut next = 0;
        loop {
            let dt = self.draw_wait()?;
            let tau_next = self.state.tau + dt;
            let mut clock = self.state.tau;
            while next < records.len() && records[next] * n2 <= tau_next.min(tau_end) {
                let tr = records[next] * n2;
                if tr > clock {
                    obs.hold(&self.state, (tr - clock) / n2);
                    clock = tr;
                }
                obs.record(&self.state, records[next]);
                next += 1;
            }
            if tau_next > tau_end {
                if tau_end > clock {
                    obs.hold(&self.state, (tau_end - clock) / n2);
                }
                // Memorylessness: the pending clock is discarded.
                self.state.tau = tau_end;
                break;
            }
            obs.hold(&self.state, (tau_next - clock) / n2);
            let ev = self.fire(dt);
            obs.jump(&self.state, &ev);
        }
        for &r in &records[next..] {
            obs.record(&self.state, r);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySummary {
    pub events: u64,
    pub final_state: HeightState,
    pub right_in: i64,
}

struct Recorder<F>(F);

impl<F: FnMut(&HeightState, f64)> Observer for Recorder<F> {
    fn record(&mut self, st: &ChainState, t: f64) {
        let mut hs = st.height_state();
        hs.t_macro = t;
        (self.0)(&hs, t);
    }
}

/// Run one trajectory from ν_ρ on stream 0 of `params.seed`.
pub fn simulate<F: FnMut(&HeightState, f64)>(
    params: &SimParams,
    record_times: &[f64],
    recorder: F,
) -> Result<TrajectorySummary, EngineError> {
    let mut eng = Engine::stationary(params.model, replica_rng(params.seed, 0));
    let mut rec = Recorder(recorder);
    eng.run(params.t_end, record_times, &mut rec)?;
    Ok(TrajectorySummary {
        events: eng.events(),
        final_state: eng.state().height_state(),
        right_in: eng.state().right_in,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, e: f64) -> Model {
        Model::new(n, 0.5, e, 0.5).unwrap()
    }

    #[test]
    fn full_lattice_only_exits() {
        let m = model(6, 0.0);
        let mut eng = Engine::new(m, Occupancy::filled(6, 1), replica_rng(1, 0));
        assert!((eng.total_rate() - 1.0).abs() < 1e-15);
        let ev = eng.step().unwrap();
        assert!(matches!(ev.channel, Channel::ExitLeft | Channel::ExitRight));
    }

    #[test]
    fn bulk_swap_moves_one_particle() {
        let m = model(8, 1.0);
        let eta = Occupancy::from_sites(vec![0, 0, 1, 0, 0, 0, 0]).unwrap();
        let mut eng = TreeEngine::new(m, eta, replica_rng(2, 0));
        for _ in 0..200 {
            let before = eng.eta().clone();
            let ev = eng.step().unwrap();
            if let Channel::BulkRight(x) = ev.channel {
                assert_eq!((before.get(x), before.get(x + 1)), (1, 0));
                assert_eq!((eng.eta().get(x), eng.eta().get(x + 1)), (0, 1));
                for y in (1..8).filter(|&y| y != x && y != x + 1) {
                    assert_eq!(before.get(y), eng.eta().get(y));
                }
            }
        }
    }

    #[test]
    fn zero_horizon_records_initial_state() {
        let p = SimParams::new(model(16, 1.0), 0.0, 11).unwrap();
        let mut seen = Vec::new();
        let s = simulate(&p, &[0.0], |hs, t| seen.push((hs.clone(), t))).unwrap();
        assert_eq!(seen.len(), 1);
        assert_eq!(s.events, 0);
        assert_eq!(seen[0].0.eta, s.final_state.eta);
    }

    #[test]
    fn deterministic_given_seed() {
        let p = SimParams::new(model(32, 1.0), 0.05, 99).unwrap();
        let a = simulate(&p, &[0.01, 0.05], |_, _| {}).unwrap();
        let b = simulate(&p, &[0.01, 0.05], |_, _| {}).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.final_state, b.final_state);
    }

    #[test]
    fn records_outside_horizon_rejected() {
        let p = SimParams::new(model(8, 0.0), 0.1, 1).unwrap();
        assert!(simulate(&p, &[0.2], |_, _| {}).is_err());
        assert!(simulate(&p, &[0.05, 0.01], |_, _| {}).is_err());
    }

    #[test]
    fn heights_telescope() {
        let hs = HeightState {
            eta: Occupancy::from_sites(vec![1, 0, 1, 1, 0]).unwrap(),
            h1: -3,
            t_macro: 0.0,
            rho: 0.5,
        };
        let h = hs.heights();
        assert_eq!(h.len(), 6);
        for x in 1..6 {
            assert_eq!(h[x] - h[x - 1], hs.eta.get(x) as f64 - 0.5);
            assert_eq!(h[x], hs.height(x + 1));
        }
    }
}
