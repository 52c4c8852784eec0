//! Shared numerical machinery: compensated summation, adaptive quadrature,
//! an embedded Runge-Kutta pair and finite-difference stencils.

pub mod diff;
pub mod ode;
pub mod quadrature;

/// Neumaier-compensated accumulator. Mass sums and volume budgets must be
/// order-independent to machine precision, so plain `f64` addition is not
/// enough.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sums a sequence with compensation.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e-16 added 1e6 times loses the tail with naive summation.
        let mut kahan = KahanSum::new();
        kahan.add(1.0);
        for _ in 0..1_000_000 {
            kahan.add(1e-16);
        }
        let expected = 1.0 + 1e-10;
        assert!((kahan.value() - expected).abs() < 1e-15);
    }

    #[test]
    fn order_independent_within_tolerance() {
        let masses = [0.1, 0.4, 0.5, 0.2, 0.8, 0.99, 0.01];
        let forward = kahan_sum(masses.iter().copied());
        let backward = kahan_sum(masses.iter().rev().copied());
        assert!((forward - backward).abs() < 1e-15);
    }
}
