use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Pairwise summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// A replica-level estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            mean: value,
            se: 0.0,
            n: 0,
        }
    }

    /// |mean − target| ≤ z·se.
    pub fn covers(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.se
    }

    /// z-score of the difference of two independent estimates.
    pub fn z_diff(&self, other: &Estimate) -> f64 {
        let s = (self.se * self.se + other.se * other.se).sqrt();
        (self.mean - other.mean) / s
    }
}

/// Sample mean and its standard error from one value per replica.
pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len();
    assert!(n >= 2, "need two replicas for a standard error");
    let m = mean(xs);
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    Estimate {
        mean: m,
        se: (var / n as f64).sqrt(),
        n,
    }
}

/// Delete-one jackknife of a statistic of replica-level records.
pub fn jackknife<T: Clone>(xs: &[T], f: impl Fn(&[T]) -> f64) -> Estimate {
    let n = xs.len();
    assert!(n >= 2, "need two replicas for a jackknife");
    let full = f(xs);
    let mut buf: Vec<T> = Vec::with_capacity(n - 1);
    let loo: Vec<f64> = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend(xs[..i].iter().cloned());
            buf.extend(xs[i + 1..].iter().cloned());
            f(&buf)
        })
        .collect();
    let m = mean(&loo);
    let dev: Vec<f64> = loo.iter().map(|x| (x - m) * (x - m)).collect();
    Estimate {
        mean: full,
        se: ((n - 1) as f64 / n as f64 * pairwise_sum(&dev)).sqrt(),
        n,
    }
}

/// Runs `f` for replicas 0..count on the rayon pool and returns the results in
/// replica order, so reductions do not depend on the thread count.
pub fn run_replicas<T, E, F>(count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync,
{
    (0..count as u64).into_par_iter().map(&f).collect()
}

/// Two-sided normal threshold for `tests` simultaneous checks at the
/// per-check level implied by `z`.
pub fn bonferroni_z(z: f64, tests: usize) -> f64 {
    let std = Normal::standard();
    let alpha = 2.0 * (1.0 - std.cdf(z));
    std.inverse_cdf(1.0 - alpha / (2.0 * tests as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sqrt()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn mean_and_se() {
        let e = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(e.covers(2.0, 1.0));
        assert!(!e.covers(0.0, 3.0));
    }

    #[test]
    fn jackknife_of_the_mean_is_the_usual_se() {
        let xs = [0.3, 1.7, 2.2, -0.4, 0.9];
        let j = jackknife(&xs, mean);
        let m = mean_se(&xs);
        assert!((j.mean - m.mean).abs() < 1e-15);
        assert!((j.se - m.se).abs() < 1e-14);
    }

    #[test]
    fn replicas_come_back_in_order() {
        let v: Vec<u64> = run_replicas(100, |r| Ok::<_, ()>(r * r)).unwrap();
        assert!(v.iter().enumerate().all(|(i, &x)| x == (i * i) as u64));
    }

    #[test]
    fn bonferroni_is_stricter() {
        assert!((bonferroni_z(3.0, 1) - 3.0).abs() < 1e-6);
        assert!(bonferroni_z(3.0, 255) > 4.0);
    }
}
