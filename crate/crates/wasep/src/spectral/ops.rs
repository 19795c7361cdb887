use serde::{Deserialize, Serialize};

use super::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiscreteOp {
    /// n(φ_{x+1} − φ_x), x = 0..n−1.
    GradPlus,
    /// n(φ_x − φ_{x−1}), x = 1..n.
    GradMinus,
    /// n²(φ_{x+1} + φ_{x−1} − 2φ_x), x = 1..n−1.
    Lap,
    /// Lap on 1..n−1, and 2n²(φ_{n−1} − φ_n) at x = n.
    LapTildeNeu,
    /// Lap on 1..n−1, and Lap at n−1 repeated at x = n.
    LapTildeTildeCH,
}

/// Applies a difference operator to φ(x/n), x = 0..=n. The output has the
/// same indexing; points outside the operator's domain are NaN.
pub fn discrete_ops(phi: &[f64], n: usize, which: DiscreteOp) -> Result<Vec<f64>, SpectralError> {
    if phi.len() != n + 1 {
        return Err(SpectralError::Length {
            got: phi.len(),
            want: n + 1,
        });
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let mut out = vec![f64::NAN; n + 1];
    let lap = |x: usize| n2 * (phi[x + 1] + phi[x - 1] - 2.0 * phi[x]);
    match which {
        DiscreteOp::GradPlus => {
            for x in 0..n {
                out[x] = nf * (phi[x + 1] - phi[x]);
            }
        }
        DiscreteOp::GradMinus => {
            for x in 1..=n {
                out[x] = nf * (phi[x] - phi[x - 1]);
            }
        }
        DiscreteOp::Lap | DiscreteOp::LapTildeNeu | DiscreteOp::LapTildeTildeCH => {
            for x in 1..n {
                out[x] = lap(x);
            }
            match which {
                DiscreteOp::LapTildeNeu => out[n] = 2.0 * n2 * (phi[n - 1] - phi[n]),
                DiscreteOp::LapTildeTildeCH => out[n] = out[n - 1],
                _ => {}
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{loglog_slope, BasisFn};
    use std::f64::consts::PI;

    #[test]
    fn laplacian_is_second_order() {
        let e1 = BasisFn::sine(1);
        let ns: Vec<usize> = (6..=12).map(|k| 1usize << k).collect();
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let phi = e1.grid(n);
                let lap = discrete_ops(&phi, n, DiscreteOp::Lap).unwrap();
                (1..n)
                    .map(|x| (lap[x] + PI * PI * phi[x]).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let slope = loglog_slope(&xs, &errs);
        assert!((slope + 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn linear_functions_are_harmonic() {
        let n = 50;
        let phi: Vec<f64> = (0..=n).map(|x| 3.0 - 2.0 * x as f64 / n as f64).collect();
        let lap = discrete_ops(&phi, n, DiscreteOp::Lap).unwrap();
        assert!(lap[1..n].iter().all(|v| v.abs() < 1e-9));
        let gp = discrete_ops(&phi, n, DiscreteOp::GradPlus).unwrap();
        assert!(gp[..n].iter().all(|v| (v + 2.0).abs() < 1e-9));
    }

    #[test]
    fn neumann_row_tends_to_laplacian() {
        // ∇φ(1) = 0 for cosines, so the one-sided row is consistent.
        let c = BasisFn::cosine(2);
        let want = -c.eigenvalue() * c.eval(1.0);
        let mut last = f64::INFINITY;
        for n in [64, 256, 1024, 4096] {
            let l = discrete_ops(&c.grid(n), n, DiscreteOp::LapTildeNeu).unwrap();
            let err = (l[n] - want).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn special_rows_and_domains() {
        let n = 8;
        let phi: Vec<f64> = (0..=n).map(|x| (x * x) as f64).collect();
        let a = discrete_ops(&phi, n, DiscreteOp::LapTildeTildeCH).unwrap();
        assert_eq!(a[n], a[n - 1]);
        assert!(a[0].is_nan());
        let g = discrete_ops(&phi, n, DiscreteOp::GradMinus).unwrap();
        assert!(g[0].is_nan() && !g[n].is_nan());
        assert!(discrete_ops(&phi[..n], n, DiscreteOp::Lap).is_err());
    }
}
