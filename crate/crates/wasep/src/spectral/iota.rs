use std::f64::consts::{PI, SQRT_2};

use super::SpectralError;

/// The window kernel ι_ε(u) = ε^{-1}·1_window, with window (u, u+ε] when
/// u < 1−2ε and [u−ε, u) otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IotaWindow {
    pub eps: f64,
    pub u: f64,
    pub lo: f64,
    pub hi: f64,
    pub forward: bool,
}

pub fn iota_window(eps: f64, u: f64) -> Result<IotaWindow, SpectralError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(SpectralError::EpsRange { eps, lo: 0.0, hi: 0.5 });
    }
    let forward = u < 1.0 - 2.0 * eps;
    let (lo, hi) = if forward { (u, u + eps) } else { (u - eps, u) };
    Ok(IotaWindow {
        eps,
        u,
        lo,
        hi,
        forward,
    })
}

impl IotaWindow {
    pub fn eval(&self, v: f64) -> f64 {
        let inside = if self.forward {
            v > self.lo && v <= self.hi
        } else {
            v >= self.lo && v < self.hi
        };
        if inside {
            1.0 / self.eps
        } else {
            0.0
        }
    }

    /// ⟨ι_ε(u), 1⟩; exactly 1 since the window stays inside [0,1].
    pub fn mass(&self) -> f64 {
        (self.hi - self.lo) / self.eps
    }

    /// ‖ι_ε(u,·)|·−u|^{1/2}‖_{L¹} = (2/3)ε^{1/2}.
    pub fn holder_moment(&self) -> f64 {
        2.0 / 3.0 * self.eps.sqrt()
    }

    /// ⟨ι_ε(u), e_k⟩ = √2 (cos(kπ lo) − cos(kπ hi)) / (εkπ).
    pub fn sine_coeff(&self, k: usize) -> f64 {
        let w = k as f64 * PI;
        SQRT_2 * ((w * self.lo).cos() - (w * self.hi).cos()) / (self.eps * w)
    }

    /// ι_ε(u)(x/n) for x = 1..n−1; the lattice sum n^{-1/2}Σ w_x η̄(x) is Y^n(ι_ε(u)).
    pub fn lattice_weights(&self, n: usize) -> Vec<f64> {
        // Compare in units of 1/n so edges landing on a site are not lost to rounding.
        let nf = n as f64;
        let tol = 1e-9;
        (1..n)
            .map(|x| {
                let v = x as f64;
                let (lo, hi) = (self.lo * nf, self.hi * nf);
                let inside = if self.forward {
                    v > lo + tol && v <= hi + tol
                } else {
                    v >= lo - tol && v < hi - tol
                };
                if inside {
                    1.0 / self.eps
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// ⟨ι_ε(u), e_k⟩.
pub fn iota_coeff(eps: f64, u: f64, k: usize) -> Result<f64, SpectralError> {
    Ok(iota_window(eps, u)?.sine_coeff(k))
}
