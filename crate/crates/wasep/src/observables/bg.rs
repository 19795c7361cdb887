use super::{site_before, ObservableError};
use crate::lattice::{Channel, ChainState, Event, Observer, Occupancy};

fn check_window(n: usize, ell: usize) -> Result<(), ObservableError> {
    if ell >= 1 && 4 * ell < n {
        Ok(())
    } else {
        Err(ObservableError::Window { ell, n })
    }
}

/// Q(x, ℓ, η): the squared centered block average minus χ/ℓ, using the box to
/// the right of x when x ≤ n−2ℓ−1 and the box to its left otherwise.
pub fn bg_average(x: usize, ell: usize, eta: &Occupancy, rho: f64, chi: f64) -> Result<f64, ObservableError> {
    let n = eta.n();
    check_window(n, ell)?;
    if x < 1 || x > n - 2 {
        return Err(ObservableError::Site { x, n });
    }
    let range = if x + 2 * ell < n {
        x + 1..=x + ell
    } else {
        x - ell..=x - 1
    };
    let s: f64 = range.map(|z| eta.get(z) as f64 - rho).sum();
    let avg = s / ell as f64;
    Ok(avg * avg - chi / ell as f64)
}

/// Per-ℓ block sums for Σ_x v(x) Q(x, ℓ, η), updated in O(1) per bulk swap.
#[derive(Debug, Clone)]
struct Blocks {
    ell: usize,
    /// Block sum used by Q at x, indexed by x (entries 0 and n−1 unused).
    sums: Vec<i64>,
    /// Σ_x v(x) sums[x]².
    weighted: f64,
    integral: f64,
}

impl Blocks {
    fn right(&self, n: usize, x: usize) -> bool {
        x + 2 * self.ell < n
    }

    fn covers(&self, n: usize, x: usize, z: usize) -> bool {
        if self.right(n, x) {
            z > x && z <= x + self.ell
        } else {
            z + self.ell >= x && z < x
        }
    }

    /// Change the block sum at x by d.
    fn bump(&mut self, v: &[f64], x: usize, d: i64) {
        let old = self.sums[x];
        let new = old + d;
        self.sums[x] = new;
        self.weighted += v[x] * ((new * new - old * old) as f64);
    }
}

/// Integrates Σ_x v(x)[η̄(x)η̄(x+1) − Q(x, ℓ, η)] along a trajectory for
/// several ℓ at once. Occupations are stored doubled, 2η̄ ∈ {−1, 1}, valid at ρ = 1/2.
#[derive(Debug, Clone)]
pub struct BgObserver {
    n: usize,
    chi: f64,
    sum_v: f64,
    /// v(x), x = 1..=n−2 (index 0 unused).
    v: Vec<f64>,
    blocks: Vec<Blocks>,
    /// Σ v(x) (2η̄(x))(2η̄(x+1)).
    pair_f: f64,
    pair_integral: f64,
    /// 2η̄(x), index 0 unused.
    spin: Vec<i64>,
}

impl BgObserver {
    /// `v[x]` for x = 1..=n−2; the other entries are ignored.
    pub fn new(eta: &Occupancy, rho: f64, v: Vec<f64>, ells: &[usize]) -> Result<Self, ObservableError> {
        let n = eta.n();
        if (rho - 0.5).abs() > 1e-12 {
            return Err(ObservableError::Density(rho));
        }
        if v.len() != n - 1 {
            return Err(ObservableError::Length { got: v.len(), want: n - 1 });
        }
        for &ell in ells {
            check_window(n, ell)?;
        }
        let mut obs = BgObserver {
            n,
            chi: rho * (1.0 - rho),
            sum_v: v[1..=n - 2].iter().sum(),
            v,
            blocks: ells
                .iter()
                .map(|&ell| Blocks {
                    ell,
                    sums: vec![0; n - 1],
                    weighted: 0.0,
                    integral: 0.0,
                })
                .collect(),
            pair_f: 0.0,
            pair_integral: 0.0,
            spin: vec![0; n],
        };
        obs.rebuild(eta);
        Ok(obs)
    }

    fn rebuild(&mut self, eta: &Occupancy) {
        let n = self.n;
        for x in 1..n {
            self.spin[x] = 2 * eta.get(x) as i64 - 1;
        }
        self.pair_f = (1..=n - 2)
            .map(|x| self.v[x] * (self.spin[x] * self.spin[x + 1]) as f64)
            .sum();
        for b in &mut self.blocks {
            b.weighted = 0.0;
            for x in 1..=n - 2 {
                let range = if x + 2 * b.ell < n {
                    x + 1..=x + b.ell
                } else {
                    x - b.ell..=x - 1
                };
                let s: i64 = range.map(|z| self.spin[z]).sum();
                b.sums[x] = s;
                b.weighted += self.v[x] * (s * s) as f64;
            }
        }
    }

    /// Σ v(x) η̄(x)η̄(x+1) and Σ v(x) Q(x, ℓ) for each ℓ, in the current state.
    pub fn current(&self) -> (f64, Vec<f64>) {
        let q = self
            .blocks
            .iter()
            .map(|b| {
                let l = b.ell as f64;
                b.weighted / (4.0 * l * l) - self.chi / l * self.sum_v
            })
            .collect();
        (self.pair_f / 4.0, q)
    }

    /// ∫ Σ v(x)[η̄(x)η̄(x+1) − Q(x, ℓ)] ds for each ℓ, in sweep order.
    pub fn integrals(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| self.pair_integral - b.integral).collect()
    }

    pub fn ells(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.ell).collect()
    }

    fn flip(&mut self, z: usize, d: i64) {
        let n = self.n;
        for x in [z.wrapping_sub(1), z] {
            if (1..=n - 2).contains(&x) {
                let old = self.spin[x] * self.spin[x + 1];
                let (a, b) = if x == z {
                    (self.spin[x] + d, self.spin[x + 1])
                } else {
                    (self.spin[x], self.spin[x + 1] + d)
                };
                self.pair_f += self.v[x] * ((a * b - old) as f64);
            }
        }
        let v = &self.v;
        for b in &mut self.blocks {
            let lo = z.saturating_sub(b.ell).max(1);
            let hi = (z + b.ell).min(n - 2);
            for x in lo..=hi {
                if b.covers(n, x, z) {
                    b.bump(v, x, d);
                }
            }
        }
        self.spin[z] += d;
    }

    /// Particle moves between x and x+1; `d` is the change of 2η̄(x).
    fn swap(&mut self, x: usize, d: i64) {
        let n = self.n;
        // Pair terms at bonds x−1, x, x+1.
        let lo = x.saturating_sub(1).max(1);
        let hi = (x + 1).min(n - 2);
        let before: f64 = (lo..=hi)
            .map(|y| self.v[y] * (self.spin[y] * self.spin[y + 1]) as f64)
            .sum();
        self.spin[x] += d;
        self.spin[x + 1] -= d;
        let after: f64 = (lo..=hi)
            .map(|y| self.v[y] * (self.spin[y] * self.spin[y + 1]) as f64)
            .sum();
        self.pair_f += after - before;
        // Only blocks holding exactly one of x, x+1 change.
        let v = &self.v;
        for b in &mut self.blocks {
            let l = b.ell;
            for y in [x.wrapping_sub(l), x, x + 1, x + l + 1] {
                if !(1..=n - 2).contains(&y) {
                    continue;
                }
                let (cx, cx1) = (b.covers(n, y, x), b.covers(n, y, x + 1));
                if cx && !cx1 {
                    b.bump(v, y, d);
                } else if cx1 && !cx {
                    b.bump(v, y, -d);
                }
            }
        }
    }
}

impl Observer for BgObserver {
    fn hold(&mut self, _st: &ChainState, dt: f64) {
        self.pair_integral += self.pair_f / 4.0 * dt;
        for b in &mut self.blocks {
            let l = b.ell as f64;
            b.integral += (b.weighted / (4.0 * l * l) - self.chi / l * self.sum_v) * dt;
        }
    }

    fn jump(&mut self, st: &ChainState, ev: &Event) {
        let n = self.n;
        match ev.channel {
            Channel::BulkRight(x) | Channel::BulkLeft(x) => {
                let was = site_before(&st.eta, ev.channel, x);
                let d = 2 * (st.eta.get(x) as i64 - was as i64);
                self.swap(x, d);
            }
            Channel::EnterLeft | Channel::ExitLeft => {
                let d = 2 * st.eta.get(1) as i64 - 1 - self.spin[1];
                self.flip(1, d);
            }
            Channel::EnterRight | Channel::ExitRight => {
                let d = 2 * st.eta.get(n - 1) as i64 - 1 - self.spin[n - 1];
                self.flip(n - 1, d);
            }
        }
        if st.events % (1 << 20) == 0 {
            self.rebuild(&st.eta);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{replica_rng, Engine, Model};

    #[test]
    fn full_lattice_value() {
        let eta = Occupancy::filled(64, 1);
        for ell in [1, 3, 15] {
            let q = bg_average(5, ell, &eta, 0.5, 0.25).unwrap();
            assert!((q - (0.25 - 0.25 / ell as f64)).abs() < 1e-15);
        }
        assert!(bg_average(5, 16, &eta, 0.5, 0.25).is_err());
    }

    #[test]
    fn window_switch() {
        // Right box for x ≤ n−2ℓ−1, left box from x = n−2ℓ on.
        let n = 40;
        let ell = 5;
        let mut sites = vec![0u8; n - 1];
        for z in 30..=34 {
            sites[z - 1] = 1;
        }
        let eta = Occupancy::from_sites(sites).unwrap();
        let x = n - 2 * ell - 1; // 29: box 30..34, all ones
        let q = bg_average(x, ell, &eta, 0.5, 0.25).unwrap();
        assert!((q - (0.25 - 0.05)).abs() < 1e-15);
        // 30: box 25..29, all zeros
        let q = bg_average(x + 1, ell, &eta, 0.5, 0.25).unwrap();
        assert!((q - (0.25 - 0.05)).abs() < 1e-15);
        let q = bg_average(x + 3, ell, &eta, 0.5, 0.25).unwrap();
        // box 27..31 holds two ones: mean −0.1
        assert!((q - (0.01 - 0.05)).abs() < 1e-15);
    }

    fn scratch(eta: &Occupancy, v: &[f64], ells: &[usize]) -> (f64, Vec<f64>) {
        let n = eta.n();
        let pair = (1..=n - 2)
            .map(|x| v[x] * (eta.get(x) as f64 - 0.5) * (eta.get(x + 1) as f64 - 0.5))
            .sum();
        let q = ells
            .iter()
            .map(|&l| (1..=n - 2).map(|x| v[x] * bg_average(x, l, eta, 0.5, 0.25).unwrap()).sum())
            .collect();
        (pair, q)
    }

    #[test]
    fn incremental_sums_match_scratch() {
        let m = Model::new(48, 0.5, 1.0, 0.5).unwrap();
        let mut eng = Engine::stationary(m, replica_rng(9, 0));
        let v: Vec<f64> = (0..47).map(|x| (x as f64 * 0.37).cos()).collect();
        let ells = [1, 2, 5, 11];
        let mut obs = BgObserver::new(eng.eta(), 0.5, v.clone(), &ells).unwrap();
        for _ in 0..5000 {
            let ev = eng.step().unwrap();
            obs.jump(eng.state(), &ev);
            let (p, q) = obs.current();
            let (ps, qs) = scratch(eng.eta(), &v, &ells);
            assert!((p - ps).abs() < 1e-9);
            for (a, b) in q.iter().zip(&qs) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }
}
