//! Trapezoidal quadrature on uniform node grids.

/// Trapezoid weights for `n` equally spaced nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if let Some(first) = w.first_mut() {
        *first = 0.5 * h;
    }
    if n > 1 {
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Trapezoidal integral of node values with uniform spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Trapezoidal integral of the pointwise product `a * b`.
pub fn trapezoid_product(a: &[f64], b: &[f64], h: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "quadrature operands differ in length");
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = (1..n - 1).map(|i| a[i] * b[i]).sum();
    h * (0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]) + inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_linear_exactly() {
        let h = 0.25;
        let v: Vec<f64> = (0..5).map(|i| 2.0 * i as f64 * h + 1.0).collect();
        assert!((trapezoid(&v, h) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn weights_match_rule() {
        let v = [1.0, 3.0, 2.0, 5.0];
        let w = trapezoid_weights(v.len(), 0.1);
        let by_weights: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!((by_weights - trapezoid(&v, 0.1)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(trapezoid(&[], 1.0), 0.0);
        assert_eq!(trapezoid(&[4.0], 1.0), 0.0);
    }
}
