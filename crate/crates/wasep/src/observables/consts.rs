use serde::Serialize;

use crate::lattice::Model;

/// Drift and Cole-Hopf constants of a model.
///
/// The Cole-Hopf constants are only meaningful at γ = 1/2, where the
/// transform linearizes the drift; they are computed from E and n alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftConstants {
    /// c_n = −χ n^{2−γ} E, the mean speed of h in macroscopic time.
    pub c_n: f64,
    pub chi: f64,
    /// θ_n with e^{θ_n/√n} = 1 + E/√n.
    pub theta_n: f64,
    /// Per unit microscopic time.
    pub lambda_n: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub alpha_n: f64,
    /// Equal to α_n; the constant of the right boundary.
    pub beta_n: f64,
    pub d_n: f64,
}

impl DriftConstants {
    pub fn new(m: &Model) -> Self {
        let n = m.n as f64;
        let chi = m.chi();
        let mut c = Self::cole_hopf(m.e, n);
        c.c_n = -chi * n.powf(2.0 - m.gamma) * m.e;
        c.chi = chi;
        c
    }

    /// Closed forms in r = √(1 + E/√n), free of cancellation for large n.
    pub fn cole_hopf(e: f64, n: f64) -> Self {
        let x = e / n.sqrt();
        let r = (1.0 + x).sqrt();
        let b = x / (r + 1.0);
        let lambda = b * b;
        let alpha = n * lambda / 2.0;
        DriftConstants {
            c_n: 0.0,
            chi: 0.25,
            theta_n: n.sqrt() * x.ln_1p(),
            lambda_n: lambda,
            a_n: -x / r,
            b_n: b,
            alpha_n: alpha,
            beta_n: alpha,
            d_n: r,
        }
    }

    /// The same constants evaluated literally from their defining formulas.
    pub fn cole_hopf_from_definitions(e: f64, n: f64) -> Self {
        let sn = n.sqrt();
        let theta = sn * (1.0 + e / sn).ln();
        let half = (theta / (2.0 * sn)).exp();
        let a = 1.0 / half - half;
        let b = half - 1.0;
        let lambda = -(e / a) * b * b / half / sn;
        let d = -e / (a * sn);
        let alpha = n * lambda - e * sn / 2.0 * ((2.0 - half - 1.0 / half) / a);
        DriftConstants {
            c_n: 0.0,
            chi: 0.25,
            theta_n: theta,
            lambda_n: lambda,
            a_n: a,
            b_n: b,
            alpha_n: alpha,
            beta_n: alpha,
            d_n: d,
        }
    }

    /// λ_n per unit macroscopic time.
    pub fn lambda_macro(&self, n: usize) -> f64 {
        self.lambda_n * (n * n) as f64
    }
}
