use std::f64::consts::PI;

use ndarray::Array2;

/// Mode cutoff for H^{−k} norms of field samples.
pub const FIELD_NORM_MODES: usize = 64;
/// Order k of the H^{−k} norm reported for field samples.
pub const FIELD_NORM_ORDER: i32 = 3;

/// Coefficients ⟨f, e_k⟩ in the sine basis; entry 0 is mode 1.
#[derive(Debug, Clone, PartialEq)]
pub enum SobolevCoeffs {
    One(Vec<f64>),
    /// ⟨f, e_{k1} ⊗ e_{k2}⟩.
    Two(Array2<f64>),
}

/// Σ |πk|^{2·order} ⟨f,e_k⟩².
pub fn sobolev_norm_sq(coeffs: &SobolevCoeffs, order: i32) -> f64 {
    match coeffs {
        SobolevCoeffs::One(c) => c
            .iter()
            .enumerate()
            .map(|(i, ck)| ((i + 1) as f64 * PI).powi(2).powi(order) * ck * ck)
            .sum(),
        SobolevCoeffs::Two(c) => c
            .indexed_iter()
            .map(|((i, j), ck)| {
                let k2 = ((i + 1) * (i + 1) + (j + 1) * (j + 1)) as f64 * PI * PI;
                k2.powi(order) * ck * ck
            })
            .sum(),
    }
}

/// ‖Y‖_{H^{−k}} from the first `FIELD_NORM_MODES` (or fewer) modes of a
/// field sample.
pub fn field_norm(modes: &[f64], k: i32) -> f64 {
    let m = modes.len().min(FIELD_NORM_MODES);
    sobolev_norm_sq(&SobolevCoeffs::One(modes[..m].to_vec()), -k).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_mode() {
        let e1 = SobolevCoeffs::One(vec![1.0]);
        assert!((sobolev_norm_sq(&e1, 1) - PI * PI).abs() < 1e-12);
        assert!((sobolev_norm_sq(&e1, -1) - 1.0 / (PI * PI)).abs() < 1e-15);
        let mut c = Array2::zeros((2, 2));
        c[[0, 1]] = 1.0;
        let two = SobolevCoeffs::Two(c);
        assert!((sobolev_norm_sq(&two, 1) - 5.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn field_norm_truncates() {
        let long = vec![1.0; 100];
        let short = vec![1.0; FIELD_NORM_MODES];
        assert_eq!(field_norm(&long, 3), field_norm(&short, 3));
    }

    proptest! {
        #[test]
        fn duality(f in prop::collection::vec(-5.0..5.0f64, 8), g in prop::collection::vec(-5.0..5.0f64, 8)) {
            let inner: f64 = f.iter().zip(&g).map(|(a, b)| a * b).sum();
            let bound = (sobolev_norm_sq(&SobolevCoeffs::One(f), -1)
                * sobolev_norm_sq(&SobolevCoeffs::One(g), 1)).sqrt();
            prop_assert!(inner.abs() <= bound * (1.0 + 1e-12) + 1e-12);
        }
    }
}
