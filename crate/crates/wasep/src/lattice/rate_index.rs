/// Complete binary sum tree over channel rates.
///
/// Internal nodes are always recomputed from their two children, so the root is
/// a deterministic function of the leaves regardless of update history.
#[derive(Debug, Clone)]
pub struct RateIndex {
    len: usize,
    cap: usize,
    tree: Vec<f64>,
}

impl RateIndex {
    pub fn new(rates: &[f64]) -> Self {
        let len = rates.len();
        let cap = len.next_power_of_two().max(2);
        let mut idx = RateIndex {
            len,
            cap,
            tree: vec![0.0; 2 * cap],
        };
        idx.tree[cap..cap + len].copy_from_slice(rates);
        idx.rebuild();
        idx
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    #[inline]
    pub fn rate(&self, i: usize) -> f64 {
        self.tree[self.cap + i]
    }

    pub fn leaves(&self) -> &[f64] {
        &self.tree[self.cap..self.cap + self.len]
    }

    /// Recompute every internal node from the leaves.
    pub fn rebuild(&mut self) {
        for k in (1..self.cap).rev() {
            self.tree[k] = self.tree[2 * k] + self.tree[2 * k + 1];
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, rate: f64) {
        debug_assert!(i < self.len && rate >= 0.0);
        let mut k = self.cap + i;
        if self.tree[k] == rate {
            return;
        }
        self.tree[k] = rate;
        k >>= 1;
        while k >= 1 {
            self.tree[k] = self.tree[2 * k] + self.tree[2 * k + 1];
            k >>= 1;
        }
    }

    /// Index of the leaf whose cumulative interval contains `target ∈ [0, total)`.
    /// Never returns a zero-rate leaf.
    #[inline]
    pub fn find(&self, mut target: f64) -> usize {
        let mut k = 1;
        while k < self.cap {
            let left = self.tree[2 * k];
            if target < left || self.tree[2 * k + 1] == 0.0 {
                k *= 2;
            } else {
                target -= left;
                k = 2 * k + 1;
            }
        }
        k - self.cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_respects_cumulative_intervals() {
        let idx = RateIndex::new(&[0.5, 0.0, 1.0, 0.25, 0.0]);
        assert_eq!(idx.total(), 1.75);
        assert_eq!(idx.find(0.0), 0);
        assert_eq!(idx.find(0.49), 0);
        assert_eq!(idx.find(0.5), 2);
        assert_eq!(idx.find(1.49), 2);
        assert_eq!(idx.find(1.5), 3);
        // Rounding past the end still lands on a live channel.
        assert_eq!(idx.find(1.75), 3);
    }

    #[test]
    fn updates_track_leaf_sum() {
        let mut idx = RateIndex::new(&[1.0; 7]);
        idx.set(3, 0.0);
        idx.set(6, 2.5);
        assert_eq!(idx.total(), 7.5);
        assert_eq!(idx.find(5.9), 6);
    }
}
