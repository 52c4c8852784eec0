//! Central finite-difference stencils on scalar-to-vector curves.

/// Fourth-order five-point first derivative of `f` at `x`.
pub fn first_derivative<F: Fn(f64) -> Vec<f64>>(f: &F, x: f64, h: f64) -> Vec<f64> {
    let m2 = f(x - 2.0 * h);
    let m1 = f(x - h);
    let p1 = f(x + h);
    let p2 = f(x + 2.0 * h);
    m2.iter()
        .zip(&m1)
        .zip(&p1)
        .zip(&p2)
        .map(|(((a, b), c), d)| (a - 8.0 * b + 8.0 * c - d) / (12.0 * h))
        .collect()
}

/// Fourth-order five-point second derivative of `f` at `x`.
pub fn second_derivative<F: Fn(f64) -> Vec<f64>>(f: &F, x: f64, h: f64) -> Vec<f64> {
    let m2 = f(x - 2.0 * h);
    let m1 = f(x - h);
    let c0 = f(x);
    let p1 = f(x + h);
    let p2 = f(x + 2.0 * h);
    (0..c0.len())
        .map(|i| {
            (-m2[i] + 16.0 * m1[i] - 30.0 * c0[i] + 16.0 * p1[i] - p2[i]) / (12.0 * h * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_sine() {
        let f = |x: f64| vec![x.sin()];
        let d1 = first_derivative(&f, 0.7, 1e-2);
        assert!((d1[0] - 0.7f64.cos()).abs() < 1e-9);
        let d2 = second_derivative(&f, 0.7, 1e-2);
        assert!((d2[0] + 0.7f64.sin()).abs() < 1e-8);
    }
}
