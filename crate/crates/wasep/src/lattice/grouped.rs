use super::rate_index::RateIndex;
use super::state::{Channel, Occupancy, RateTable};

/// Channel bookkeeping behind the event loop.
pub trait ChannelIndex: Clone + std::fmt::Debug {
    fn build(table: &RateTable, eta: &Occupancy) -> Self;
    fn total(&self) -> f64;
    /// Channel at cumulative position `u · total`, `u ∈ [0,1)`. Never a disabled channel.
    fn pick(&self, u: f64) -> Channel;
    /// Refresh the channels touched by `fired` (already applied to `eta`).
    fn update(&mut self, table: &RateTable, eta: &Occupancy, fired: Channel);
    fn rate(&self, ch: Channel) -> f64;
    /// Recompute every cached aggregate from scratch.
    fn rebuild(&mut self, table: &RateTable, eta: &Occupancy);
}

/// Bonds touched by a transition, clipped to 1..=n−2, plus whether the
/// left or right reservoir channels must be refreshed.
#[inline]
fn touched(n: usize, fired: Channel) -> (usize, usize, bool, bool) {
    match fired {
        Channel::BulkRight(x) | Channel::BulkLeft(x) => {
            ((x - 1).max(1), (x + 1).min(n - 2), x == 1, x + 1 == n - 1)
        }
        Channel::EnterLeft | Channel::ExitLeft => (1, 1, true, false),
        Channel::EnterRight | Channel::ExitRight => (n - 2, n - 2, false, true),
    }
}

const BOUNDARY: [Channel; 4] = [
    Channel::EnterLeft,
    Channel::ExitLeft,
    Channel::EnterRight,
    Channel::ExitRight,
];

impl ChannelIndex for RateIndex {
    fn build(table: &RateTable, eta: &Occupancy) -> Self {
        let n = table.n;
        let rates: Vec<f64> = (0..2 * (n - 2) + 4)
            .map(|i| table.rate(eta, Channel::from_index(i, n)))
            .collect();
        RateIndex::new(&rates)
    }

    fn total(&self) -> f64 {
        RateIndex::total(self)
    }

    fn pick(&self, u: f64) -> Channel {
        let n = (self.len() - 4) / 2 + 2;
        Channel::from_index(self.find(u * RateIndex::total(self)), n)
    }

    fn update(&mut self, table: &RateTable, eta: &Occupancy, fired: Channel) {
        let n = table.n;
        let (lo, hi, left, right) = touched(n, fired);
        let mut set = |ch: Channel| self.set(ch.index(n), table.rate(eta, ch));
        for b in lo..=hi {
            set(Channel::BulkRight(b));
            set(Channel::BulkLeft(b));
        }
        if left {
            set(Channel::EnterLeft);
            set(Channel::ExitLeft);
        }
        if right {
            set(Channel::EnterRight);
            set(Channel::ExitRight);
        }
    }

    fn rate(&self, ch: Channel) -> f64 {
        let n = (self.len() - 4) / 2 + 2;
        RateIndex::rate(self, ch.index(n))
    }

    fn rebuild(&mut self, _table: &RateTable, _eta: &Occupancy) {
        RateIndex::rebuild(self);
    }
}

/// Unordered set of bond labels with O(1) insert, remove and indexed access.
#[derive(Debug, Clone)]
struct BondSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl BondSet {
    fn new(n: usize) -> Self {
        BondSet {
            items: Vec::with_capacity(n),
            pos: vec![ABSENT; n],
        }
    }

    #[inline]
    fn assign(&mut self, b: usize, member: bool) {
        let p = self.pos[b];
        if member && p == ABSENT {
            self.pos[b] = self.items.len() as u32;
            self.items.push(b as u32);
        } else if !member && p != ABSENT {
            let last = *self.items.last().unwrap();
            self.items.swap_remove(p as usize);
            if last as usize != b {
                self.pos[last as usize] = p;
            }
            self.pos[b] = ABSENT;
        }
    }

    #[inline]
    fn len(&self) -> usize {
        self.items.len()
    }

    fn contains(&self, b: usize) -> bool {
        self.pos[b] != ABSENT
    }
}

/// Bulk rates only take the values 0, 1 and 1+ε_n, so active bonds are kept in
/// two sets and sampled uniformly within each; the reservoirs are four scalars.
/// The total is recomputed from integer counts, hence carries no drift.
#[derive(Debug, Clone)]
pub struct GroupedIndex {
    bias: f64,
    right: BondSet,
    left: BondSet,
    boundary: [f64; 4],
}

impl GroupedIndex {
    #[inline]
    fn classify(&mut self, eta: &Occupancy, b: usize) {
        let s = eta.as_slice();
        let (a, c) = (s[b - 1], s[b]);
        self.right.assign(b, a == 1 && c == 0);
        self.left.assign(b, a == 0 && c == 1);
    }

    #[inline]
    fn bulk_total(&self) -> (f64, f64) {
        (self.bias * self.right.len() as f64, self.left.len() as f64)
    }
}

impl ChannelIndex for GroupedIndex {
    fn build(table: &RateTable, eta: &Occupancy) -> Self {
        let n = table.n;
        let mut g = GroupedIndex {
            bias: table.bias,
            right: BondSet::new(n),
            left: BondSet::new(n),
            boundary: [0.0; 4],
        };
        g.rebuild(table, eta);
        g
    }

    #[inline]
    fn total(&self) -> f64 {
        let (r, l) = self.bulk_total();
        r + l + self.boundary.iter().sum::<f64>()
    }

    #[inline]
    fn pick(&self, u: f64) -> Channel {
        let (r, l) = self.bulk_total();
        let mut target = u * self.total();
        if target < r {
            let k = ((target / self.bias) as usize).min(self.right.len() - 1);
            return Channel::BulkRight(self.right.items[k] as usize);
        }
        target -= r;
        if target < l {
            let k = (target as usize).min(self.left.len() - 1);
            return Channel::BulkLeft(self.left.items[k] as usize);
        }
        target -= l;
        let mut last = None;
        for (ch, &rate) in BOUNDARY.iter().zip(&self.boundary) {
            if rate > 0.0 {
                if target < rate {
                    return *ch;
                }
                target -= rate;
                last = Some(*ch);
            }
        }
        // Rounding spill past the final live channel.
        match last {
            Some(ch) => ch,
            None if self.left.len() > 0 => Channel::BulkLeft(self.left.items[0] as usize),
            None => Channel::BulkRight(self.right.items[self.right.len() - 1] as usize),
        }
    }

    #[inline]
    fn update(&mut self, table: &RateTable, eta: &Occupancy, fired: Channel) {
        let (lo, hi, left, right) = touched(table.n, fired);
        for b in lo..=hi {
            self.classify(eta, b);
        }
        if left {
            self.boundary[0] = table.rate(eta, Channel::EnterLeft);
            self.boundary[1] = table.rate(eta, Channel::ExitLeft);
        }
        if right {
            self.boundary[2] = table.rate(eta, Channel::EnterRight);
            self.boundary[3] = table.rate(eta, Channel::ExitRight);
        }
    }

    fn rate(&self, ch: Channel) -> f64 {
        match ch {
            Channel::BulkRight(x) => {
                if self.right.contains(x) {
                    self.bias
                } else {
                    0.0
                }
            }
            Channel::BulkLeft(x) => f64::from(u8::from(self.left.contains(x))),
            Channel::EnterLeft => self.boundary[0],
            Channel::ExitLeft => self.boundary[1],
            Channel::EnterRight => self.boundary[2],
            Channel::ExitRight => self.boundary[3],
        }
    }

    fn rebuild(&mut self, table: &RateTable, eta: &Occupancy) {
        for b in 1..table.n - 1 {
            self.classify(eta, b);
        }
        for (slot, ch) in self.boundary.iter_mut().zip(BOUNDARY) {
            *slot = table.rate(eta, ch);
        }
    }
}
