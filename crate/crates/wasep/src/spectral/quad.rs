//! Quadrature on [0,1] from samples on a uniform grid.

/// Default number of cells.
pub const DEFAULT_INTERVALS: usize = 1 << 12;

/// Composite trapezoid rule; `values[j] = f(j/N)` for j = 0..=N.
pub fn trapezoid(values: &[f64]) -> f64 {
    assert!(values.len() >= 2, "need at least one cell");
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().sum();
    (inner + 0.5 * (values[0] + values[n])) / n as f64
}

/// One Richardson step combining the grid with its every-other-point subgrid.
/// Requires an even number of cells.
pub fn richardson(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 2 && n % 2 == 0, "richardson needs an even cell count");
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    (4.0 * trapezoid(values) - trapezoid(&coarse)) / 3.0
}

/// Weights w with Σ w_j f(j/N) = richardson(f values) on [0,1].
pub fn richardson_weights(cells: usize) -> Vec<f64> {
    assert!(cells >= 2 && cells % 2 == 0, "richardson needs an even cell count");
    let h = 1.0 / cells as f64;
    (0..=cells)
        .map(|j| {
            let c = if j == 0 || j == cells {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// ∫₀¹ f on `intervals` cells with one Richardson step.
pub fn integrate<F: Fn(f64) -> f64>(f: F, intervals: usize) -> f64 {
    let values: Vec<f64> = (0..=intervals)
        .map(|j| f(j as f64 / intervals as f64))
        .collect();
    richardson(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        assert!((trapezoid(&[0.0, 0.5, 1.0]) - 0.5).abs() < 1e-15);
        assert!((integrate(|u| u * u * u, 64) - 0.25).abs() < 1e-15);
        assert!((integrate(|u| (3.0 * u).exp(), 1024) - ((3f64).exp() - 1.0) / 3.0).abs() < 1e-11);
    }

    #[test]
    fn weights_reproduce_richardson() {
        let vals: Vec<f64> = (0..=16).map(|j| (j as f64 * 0.37).sin()).collect();
        let w = richardson_weights(16);
        let s: f64 = w.iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!((s - richardson(&vals)).abs() < 1e-15);
    }
}
