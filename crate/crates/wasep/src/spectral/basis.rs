use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    /// e_m(u) = √2 sin(mπu), m ≥ 1.
    DirichletSine,
    /// ẽ_0 = 1, ẽ_m(u) = √2 cos(mπu).
    NeumannCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisFn {
    pub kind: BasisKind,
    pub m: usize,
}

impl BasisFn {
    pub fn sine(m: usize) -> Self {
        assert!(m >= 1, "sine modes start at 1");
        BasisFn {
            kind: BasisKind::DirichletSine,
            m,
        }
    }

    pub fn cosine(m: usize) -> Self {
        BasisFn {
            kind: BasisKind::NeumannCosine,
            m,
        }
    }

    /// λ_m = (mπ)².
    pub fn eigenvalue(&self) -> f64 {
        let k = self.m as f64 * PI;
        k * k
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let k = self.m as f64 * PI;
        match self.kind {
            BasisKind::DirichletSine => SQRT_2 * (k * u).sin(),
            BasisKind::NeumannCosine if self.m == 0 => 1.0,
            BasisKind::NeumannCosine => SQRT_2 * (k * u).cos(),
        }
    }

    /// Derivative in u.
    pub fn grad(&self, u: f64) -> f64 {
        let k = self.m as f64 * PI;
        match self.kind {
            BasisKind::DirichletSine => SQRT_2 * k * (k * u).cos(),
            BasisKind::NeumannCosine => -SQRT_2 * k * (k * u).sin(),
        }
    }

    /// ∫₀¹ of the basis function.
    pub fn integral(&self) -> f64 {
        let k = self.m as f64 * PI;
        match self.kind {
            BasisKind::DirichletSine => {
                let odd = if self.m % 2 == 1 { 2.0 } else { 0.0 };
                SQRT_2 * odd / k
            }
            BasisKind::NeumannCosine if self.m == 0 => 1.0,
            BasisKind::NeumannCosine => 0.0,
        }
    }

    /// Values at the lattice points x/n for x = 0..=n. Every module that needs
    /// φ(x/n) goes through here so the numbers agree bit for bit.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        lattice_grid(n, |u| self.eval(u))
    }
}

/// f(x/n) for x = 0..=n.
pub fn lattice_grid<F: Fn(f64) -> f64>(n: usize, f: F) -> Vec<f64> {
    (0..=n).map(|x| f(x as f64 / n as f64)).collect()
}

/// Uniform grid on [0,1] with `intervals` cells.
pub fn unit_grid(intervals: usize) -> Vec<f64> {
    lattice_grid(intervals, |u| u)
}
