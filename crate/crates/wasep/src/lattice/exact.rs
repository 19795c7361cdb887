//! Exact enumeration of the generator on {0,1}^{n−1} for small n.

use ndarray::Array2;
use thiserror::Error;

use super::params::Model;
use super::state::{apply_channel, Channel, Occupancy, RateTable};

pub const MAX_EXACT_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("exact enumeration needs n <= {MAX_EXACT_N}, got n={0}")]
    TooLarge(usize),
    #[error("function has {got} values, state space has {want}")]
    Length { got: usize, want: usize },
}

fn states(m: &Model) -> Result<usize, ExactError> {
    if m.n > MAX_EXACT_N {
        return Err(ExactError::TooLarge(m.n));
    }
    Ok(1usize << (m.n - 1))
}

/// Generator matrix indexed by configuration masks (bit x−1 is η(x)).
pub fn exact_generator(m: &Model) -> Result<Array2<f64>, ExactError> {
    let size = states(m)?;
    let table = RateTable::new(m);
    let mut l = Array2::<f64>::zeros((size, size));
    for s in 0..size {
        let eta = Occupancy::from_mask(m.n, s as u32);
        let mut out = 0.0;
        for i in 0..m.channel_count() {
            let ch = Channel::from_index(i, m.n);
            let r = table.rate(&eta, ch);
            if r == 0.0 {
                continue;
            }
            let mut next = eta.clone();
            apply_channel(&mut next, ch);
            l[[s, next.mask() as usize]] += r;
            out += r;
        }
        l[[s, s]] -= out;
    }
    Ok(l)
}

/// ν_ρ(η) for every configuration mask.
pub fn bernoulli_weights(m: &Model) -> Result<Vec<f64>, ExactError> {
    let size = states(m)?;
    Ok((0..size)
        .map(|s| {
            let k = (s as u32).count_ones() as i32;
            m.rho.powi(k) * (1.0 - m.rho).powi(m.n as i32 - 1 - k)
        })
        .collect())
}

/// ‖ν_ρ L‖_∞.
pub fn invariance_residual(m: &Model) -> Result<f64, ExactError> {
    let l = exact_generator(m)?;
    let nu = ndarray::Array1::from(bernoulli_weights(m)?);
    Ok(nu.dot(&l).iter().fold(0.0f64, |a, v| a.max(v.abs())))
}

/// Largest |ν(η)L(η,η′) − ν(η′)L(η′,η)| over pairs, with the maximizing pair.
pub fn detailed_balance_defect(m: &Model) -> Result<(f64, (usize, usize)), ExactError> {
    let l = exact_generator(m)?;
    let nu = bernoulli_weights(m)?;
    let mut worst = (0.0, (0, 0));
    for a in 0..nu.len() {
        for b in a + 1..nu.len() {
            let d = (nu[a] * l[[a, b]] - nu[b] * l[[b, a]]).abs();
            if d > worst.0 {
                worst = (d, (a, b));
            }
        }
    }
    Ok(worst)
}

fn check_len(f: &[f64], size: usize) -> Result<(), ExactError> {
    if f.len() != size {
        return Err(ExactError::Length {
            got: f.len(),
            want: size,
        });
    }
    Ok(())
}

/// ∫ f (−L f) dν_ρ.
pub fn dirichlet_form(f: &[f64], m: &Model) -> Result<f64, ExactError> {
    let size = states(m)?;
    check_len(f, size)?;
    let l = exact_generator(m)?;
    let nu = bernoulli_weights(m)?;
    let fv = ndarray::ArrayView1::from(f);
    let lf = l.dot(&fv);
    Ok(-(0..size).map(|s| nu[s] * f[s] * lf[s]).sum::<f64>())
}

/// Bond-by-bond pieces of the Dirichlet form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletParts {
    /// ½ Σ_{x=1}^{n−2} ∫ r_{x,x+1} (f(σ^{x,x+1}η) − f(η))² dν
    pub bulk: f64,
    /// ½ ∫ r_{0,1}(f(σ¹η) − f)² dν + ½ ∫ r_{n−1,n}(f(σ^{n−1}η) − f)² dν
    pub boundary: f64,
}

impl DirichletParts {
    pub fn total(&self) -> f64 {
        self.bulk + self.boundary
    }
}

/// Quadratic-form decomposition of the Dirichlet form over bonds.
pub fn dirichlet_parts(f: &[f64], m: &Model) -> Result<DirichletParts, ExactError> {
    let size = states(m)?;
    check_len(f, size)?;
    let table = RateTable::new(m);
    let nu = bernoulli_weights(m)?;
    let mut parts = DirichletParts {
        bulk: 0.0,
        boundary: 0.0,
    };
    for s in 0..size {
        let eta = Occupancy::from_mask(m.n, s as u32);
        for i in 0..m.channel_count() {
            let ch = Channel::from_index(i, m.n);
            let r = table.rate(&eta, ch);
            if r == 0.0 {
                continue;
            }
            let mut next = eta.clone();
            apply_channel(&mut next, ch);
            let d = f[next.mask() as usize] - f[s];
            let c = 0.5 * nu[s] * r * d * d;
            match ch {
                Channel::BulkRight(_) | Channel::BulkLeft(_) => parts.bulk += c,
                _ => parts.boundary += c,
            }
        }
    }
    Ok(parts)
}

/// The bulk and boundary forms written with (1+ε_n)(η(x)−η(x+1))² on every bulk
/// bond and without the factor ½. Dominates the true Dirichlet form.
pub fn dirichlet_upper_form(f: &[f64], m: &Model) -> Result<f64, ExactError> {
    let size = states(m)?;
    check_len(f, size)?;
    let table = RateTable::new(m);
    let nu = bernoulli_weights(m)?;
    let flip = |s: usize, x: usize| s ^ (1 << (x - 1));
    let mut total = 0.0;
    for s in 0..size {
        let eta = Occupancy::from_mask(m.n, s as u32);
        for x in 1..m.n - 1 {
            if eta.get(x) != eta.get(x + 1) {
                let t = flip(flip(s, x), x + 1);
                total += nu[s] * table.bias * (f[t] - f[s]).powi(2);
            }
        }
        for (x, bond) in [(1, 0), (m.n - 1, m.n - 1)] {
            let d = f[flip(s, x)] - f[s];
            total += nu[s] * table.bond_rate(&eta, bond) * d * d;
        }
    }
    Ok(total)
}
