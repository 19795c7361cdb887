use rand::Rng;
use serde::Serialize;

use super::params::Model;

/// Occupation variables η(1), …, η(n−1). Site x lives at index x − 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Occupancy {
    sites: Vec<u8>,
}

impl Occupancy {
    /// `None` if any entry is not 0 or 1 or fewer than two sites are given.
    pub fn from_sites(sites: Vec<u8>) -> Option<Self> {
        if sites.len() < 2 || sites.iter().any(|&s| s > 1) {
            return None;
        }
        Some(Occupancy { sites })
    }

    pub fn filled(n: usize, value: u8) -> Self {
        assert!(n >= 3 && value <= 1);
        Occupancy {
            sites: vec![value; n - 1],
        }
    }

    /// Bit x−1 of `mask` is η(x).
    pub fn from_mask(n: usize, mask: u32) -> Self {
        Occupancy {
            sites: (0..n - 1).map(|i| ((mask >> i) & 1) as u8).collect(),
        }
    }

    pub fn mask(&self) -> u32 {
        assert!(self.sites.len() <= 32);
        self.sites
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &s)| m | (u32::from(s) << i))
    }

    /// Lattice size n (one more than the number of sites).
    pub fn n(&self) -> usize {
        self.sites.len() + 1
    }

    #[inline]
    pub fn get(&self, x: usize) -> u8 {
        self.sites[x - 1]
    }

    #[inline]
    pub(crate) fn set(&mut self, x: usize, v: u8) {
        self.sites[x - 1] = v;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.sites
    }

    pub fn particles(&self) -> usize {
        self.sites.iter().map(|&s| s as usize).sum()
    }
}

/// Independent Bernoulli(ρ) sites.
pub fn sample_initial<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Occupancy {
    assert!(rho > 0.0 && rho < 1.0, "rho must lie in (0,1)");
    Occupancy {
        sites: (1..n).map(|_| u8::from(rng.random::<f64>() < rho)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Channel {
    /// Particle at x jumps to x+1.
    BulkRight(usize),
    /// Particle at x+1 jumps to x.
    BulkLeft(usize),
    EnterLeft,
    ExitLeft,
    EnterRight,
    ExitRight,
}

impl Channel {
    /// Slot in the rate index. Both directions of bond x are adjacent.
    #[inline]
    pub fn index(self, n: usize) -> usize {
        let b = 2 * (n - 2);
        match self {
            Channel::BulkRight(x) => 2 * (x - 1),
            Channel::BulkLeft(x) => 2 * (x - 1) + 1,
            Channel::EnterLeft => b,
            Channel::ExitLeft => b + 1,
            Channel::EnterRight => b + 2,
            Channel::ExitRight => b + 3,
        }
    }

    #[inline]
    pub fn from_index(i: usize, n: usize) -> Channel {
        let b = 2 * (n - 2);
        if i < b {
            let x = i / 2 + 1;
            if i % 2 == 0 {
                Channel::BulkRight(x)
            } else {
                Channel::BulkLeft(x)
            }
        } else {
            match i - b {
                0 => Channel::EnterLeft,
                1 => Channel::ExitLeft,
                2 => Channel::EnterRight,
                3 => Channel::ExitRight,
                _ => panic!("channel index {i} out of range for n={n}"),
            }
        }
    }

    /// Change of h(1): +1 when a particle leaves at the left, −1 when one enters.
    pub fn dh_left(self) -> i64 {
        match self {
            Channel::ExitLeft => 1,
            Channel::EnterLeft => -1,
            _ => 0,
        }
    }

    /// Net particles supplied by the right reservoir.
    pub fn dn_right(self) -> i64 {
        match self {
            Channel::EnterRight => 1,
            Channel::ExitRight => -1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionChannel {
    pub kind: Channel,
    pub rate: f64,
}

/// Precomputed rate constants of a model.
#[derive(Debug, Clone, Copy)]
pub struct RateTable {
    pub n: usize,
    pub bias: f64,
    pub enter_left: f64,
    pub exit_left: f64,
    pub enter_right: f64,
    pub exit_right: f64,
}

impl RateTable {
    pub fn new(m: &Model) -> Self {
        let bias = m.bias();
        RateTable {
            n: m.n,
            bias,
            enter_left: bias * m.rho,
            exit_left: 1.0 - m.rho,
            enter_right: m.rho,
            exit_right: bias * (1.0 - m.rho),
        }
    }

    #[inline]
    pub fn rate(&self, eta: &Occupancy, ch: Channel) -> f64 {
        let s = eta.as_slice();
        match ch {
            Channel::BulkRight(x) => {
                if s[x - 1] == 1 && s[x] == 0 {
                    self.bias
                } else {
                    0.0
                }
            }
            Channel::BulkLeft(x) => {
                if s[x] == 1 && s[x - 1] == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Channel::EnterLeft => self.enter_left * f64::from(1 - s[0]),
            Channel::ExitLeft => self.exit_left * f64::from(s[0]),
            Channel::EnterRight => self.enter_right * f64::from(1 - s[self.n - 2]),
            Channel::ExitRight => self.exit_right * f64::from(s[self.n - 2]),
        }
    }

    /// r_{x,x+1}(η) for x = 0..n−1 with η(0) = η(n) = ρ folded into the boundary rates.
    pub fn bond_rate(&self, eta: &Occupancy, x: usize) -> f64 {
        if x == 0 {
            self.rate(eta, Channel::EnterLeft) + self.rate(eta, Channel::ExitLeft)
        } else if x == self.n - 1 {
            self.rate(eta, Channel::EnterRight) + self.rate(eta, Channel::ExitRight)
        } else {
            self.rate(eta, Channel::BulkRight(x)) + self.rate(eta, Channel::BulkLeft(x))
        }
    }
}

/// All 2(n−2)+4 channels with their current rates, in index order.
pub fn channel_rates(eta: &Occupancy, model: &Model) -> Vec<TransitionChannel> {
    let table = RateTable::new(model);
    (0..model.channel_count())
        .map(|i| {
            let kind = Channel::from_index(i, model.n);
            TransitionChannel {
                kind,
                rate: table.rate(eta, kind),
            }
        })
        .collect()
}

/// Apply a channel's transition to η. Panics if the channel is disabled.
pub fn apply_channel(eta: &mut Occupancy, ch: Channel) {
    let n = eta.n();
    match ch {
        Channel::BulkRight(x) => {
            debug_assert!(eta.get(x) == 1 && eta.get(x + 1) == 0);
            eta.set(x, 0);
            eta.set(x + 1, 1);
        }
        Channel::BulkLeft(x) => {
            debug_assert!(eta.get(x) == 0 && eta.get(x + 1) == 1);
            eta.set(x, 1);
            eta.set(x + 1, 0);
        }
        Channel::EnterLeft => eta.set(1, 1),
        Channel::ExitLeft => eta.set(1, 0),
        Channel::EnterRight => eta.set(n - 1, 1),
        Channel::ExitRight => eta.set(n - 1, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_roundtrip() {
        for n in [3, 4, 17] {
            for i in 0..2 * (n - 2) + 4 {
                assert_eq!(Channel::from_index(i, n).index(n), i);
            }
        }
    }

    #[test]
    fn bulk_rate_substitution() {
        let m = Model::new(100, 0.5, 1.0, 0.5).unwrap();
        let mut eta = Occupancy::filled(100, 0);
        eta.set(10, 1);
        let rates = channel_rates(&eta, &m);
        assert_eq!(rates.len(), 200);
        let r = rates[Channel::BulkRight(10).index(100)];
        assert_eq!(r.kind, Channel::BulkRight(10));
        assert!((r.rate - 1.1).abs() < 1e-15);
        assert_eq!(rates[Channel::BulkLeft(10).index(100)].rate, 0.0);
        assert_eq!(rates[Channel::BulkLeft(9).index(100)].rate, 1.0);
    }

    #[test]
    fn exclusion_blocks_both_directions() {
        let m = Model::new(10, 0.5, 1.0, 0.5).unwrap();
        let eta = Occupancy::filled(10, 1);
        let rates = channel_rates(&eta, &m);
        for x in 1..=7 {
            assert_eq!(rates[Channel::BulkRight(x).index(10)].rate, 0.0);
            assert_eq!(rates[Channel::BulkLeft(x).index(10)].rate, 0.0);
        }
    }

    #[test]
    fn symmetric_boundary_rates() {
        let m = Model::new(10, 0.5, 0.0, 0.5).unwrap();
        let eta = Occupancy::filled(10, 0);
        let t = RateTable::new(&m);
        assert_eq!(t.rate(&eta, Channel::EnterLeft), 0.5);
        assert_eq!(t.rate(&eta, Channel::ExitLeft), 0.0);
    }

    #[test]
    fn bernoulli_sampling_uniform_on_small_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0u32; 16];
        let draws = 160_000;
        for _ in 0..draws {
            counts[sample_initial(5, 0.5, &mut rng).mask() as usize] += 1;
        }
        let p = 1.0 / 16.0;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 * p).abs() < 4.0 * sd);
        }
    }
}
