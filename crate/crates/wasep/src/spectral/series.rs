//! Clenshaw summation of short trigonometric series.

/// Σ_{k=1}^{K} c[k−1] sin(kθ).
#[inline]
pub fn sin_series(c: &[f64], theta: f64) -> f64 {
    let two_cos = 2.0 * theta.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().rev() {
        let b0 = ck + two_cos * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 * theta.sin()
}

/// Σ_{k=1}^{K} c[k−1] cos(kθ).
#[inline]
pub fn cos_series(c: &[f64], theta: f64) -> f64 {
    let cos = theta.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().rev() {
        let b0 = ck + 2.0 * cos * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // b1 here is b_1 of the recurrence; cos-sum = b_1 cos θ − b_2.
    b1 * cos - b2
}
