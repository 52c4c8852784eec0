//! Analytic multiobjective test problems and their reference fronts.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::interval::Interval;
use crate::macs::ProblemDefinition;
use crate::pareto::ObjectiveVector;

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("component {index} = {value} is outside [{lo}, {hi}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("expected {expected} components, got {got}")]
    WrongDimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkId {
    Deb,
    Zdt4,
}

/// Constants of the constrained DEB problem.
#[derive(Debug, Clone, Copy)]
pub struct DebConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub theta: f64,
}

impl Default for DebConstants {
    fn default() -> Self {
        Self {
            a: 0.2,
            b: 10.0,
            c: 1.0,
            d: 6.0,
            e: 1.0,
            // The published table omits theta; this follows the constrained
            // test-problem family the function comes from.
            theta: -0.2 * PI,
        }
    }
}

/// Problem family, dimension, bounds and constants.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub id: BenchmarkId,
    pub n: usize,
    pub constants: DebConstants,
}

impl BenchmarkSpec {
    pub fn new(id: BenchmarkId) -> Self {
        Self {
            id,
            n: 10,
            constants: DebConstants::default(),
        }
    }

    pub fn bounds(&self) -> Vec<Interval> {
        match self.id {
            BenchmarkId::Deb => vec![Interval { lo: 0.0, hi: 1.0 }; self.n],
            BenchmarkId::Zdt4 => {
                let mut bounds = vec![Interval { lo: -5.0, hi: 5.0 }; self.n];
                bounds[0] = Interval { lo: 0.0, hi: 1.0 };
                bounds
            }
        }
    }

    fn check(&self, x: &[f64]) -> Result<(), BenchmarkError> {
        if x.len() != self.n {
            return Err(BenchmarkError::WrongDimension {
                expected: self.n,
                got: x.len(),
            });
        }
        for (i, (iv, &v)) in self.bounds().iter().zip(x).enumerate() {
            if !iv.contains(v) {
                return Err(BenchmarkError::OutOfBounds {
                    index: i,
                    value: v,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(())
    }
}

/// ZDT4: `f1 = x1`, `f2 = g (1 - sqrt(f1/g))` with the multimodal
/// `g = 1 + 10(n-1) + sum(x_i^2 - 10 cos(4 pi x_i))`.
pub fn zdt4(spec: &BenchmarkSpec, x: &[f64]) -> Result<(f64, f64), BenchmarkError> {
    spec.check(x)?;
    let n = spec.n;
    let f1 = x[0];
    let mut g = 1.0 + 10.0 * (n as f64 - 1.0);
    for &xi in &x[1..] {
        g += xi * xi - 10.0 * (4.0 * PI * xi).cos();
    }
    let f2 = g * (1.0 - (f1 / g).sqrt());
    Ok((f1, f2))
}

/// Constrained DEB problem: convex front fragmented by `C >= 0`.
pub fn deb(spec: &BenchmarkSpec, x: &[f64]) -> Result<(f64, f64, f64), BenchmarkError> {
    spec.check(x)?;
    let n = spec.n;
    let f1 = x[0];
    let g = 1.0 + 9.0 / (n as f64 - 1.0) * x[1..].iter().sum::<f64>();
    let f2 = g * (1.0 - (f1 / g).sqrt());
    let c = deb_constraint(&spec.constants, f1, f2);
    Ok((f1, f2, c))
}

/// The DEB constraint as a function of the objective pair.
pub fn deb_constraint(k: &DebConstants, f1: f64, f2: f64) -> f64 {
    let (sin_t, cos_t) = k.theta.sin_cos();
    let phase = (sin_t * (f2 - k.e) + f1 * cos_t).powf(k.c);
    cos_t * (f2 - k.e) - f1 * sin_t - k.a * (k.b * PI * phase).sin().abs().powf(k.d)
}

/// Uniformly spaced points on the true front: `f2 = 1 - sqrt(f1)` for ZDT4,
/// the same curve filtered to `C >= 0` for DEB (disconnected segments).
pub fn reference_front(spec: &BenchmarkSpec, count: usize) -> Vec<ObjectiveVector> {
    assert!(count >= 2);
    let curve = (0..count).map(|i| {
        let t = i as f64 / (count - 1) as f64;
        (t, 1.0 - t.sqrt())
    });
    match spec.id {
        BenchmarkId::Zdt4 => curve
            .map(|(f1, f2)| ObjectiveVector(vec![f1, f2]))
            .collect(),
        BenchmarkId::Deb => curve
            .filter(|&(f1, f2)| deb_constraint(&spec.constants, f1, f2) >= 0.0)
            .map(|(f1, f2)| ObjectiveVector(vec![f1, f2]))
            .collect(),
    }
}

/// ZDT4 as an engine problem.
pub fn zdt4_problem() -> ProblemDefinition {
    let spec = BenchmarkSpec::new(BenchmarkId::Zdt4);
    let bounds = spec.bounds();
    ProblemDefinition::new(
        "zdt4",
        0,
        bounds,
        2,
        Arc::new(move |x: &[f64]| {
            let (f1, f2) = zdt4(&spec, x).expect("engine keeps positions inside the box");
            vec![f1, f2]
        }),
    )
}

/// DEB as an engine problem; the constraint handle returns `-C` so that
/// feasibility is `c <= 0`.
pub fn deb_problem() -> ProblemDefinition {
    let spec = BenchmarkSpec::new(BenchmarkId::Deb);
    let bounds = spec.bounds();
    let objective_spec = spec.clone();
    let constraint_spec = spec;
    ProblemDefinition::new(
        "deb",
        0,
        bounds,
        2,
        Arc::new(move |x: &[f64]| {
            let (f1, f2, _) = deb(&objective_spec, x).expect("engine keeps positions inside the box");
            vec![f1, f2]
        }),
    )
    .with_constraints(
        1,
        Some(Arc::new(move |x: &[f64]| {
            let (_, _, c) =
                deb(&constraint_spec, x).expect("engine keeps positions inside the box");
            vec![-c]
        })),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zdt4_reference_values() {
        let spec = BenchmarkSpec::new(BenchmarkId::Zdt4);
        let mut x = vec![0.0; 10];
        x[0] = 0.5;
        let (f1, f2) = zdt4(&spec, &x).unwrap();
        assert_eq!(f1, 0.5);
        assert!((f2 - (1.0 - 0.5f64.sqrt())).abs() < 1e-12, "f2 = {f2}");

        let zero = vec![0.0; 10];
        let (f1, f2) = zdt4(&spec, &zero).unwrap();
        assert_eq!(f1, 0.0);
        assert!((f2 - 1.0).abs() < 1e-12, "g = 1 gives f2 = 1 at f1 = 0");
    }

    #[test]
    fn zdt4_global_front_shape() {
        let spec = BenchmarkSpec::new(BenchmarkId::Zdt4);
        for i in 0..20 {
            let mut x = vec![0.0; 10];
            x[0] = i as f64 / 19.0;
            let (f1, f2) = zdt4(&spec, &x).unwrap();
            assert!(
                (f2 - (1.0 - f1.sqrt())).abs() < 1e-10,
                "on the global front f2 = 1 - sqrt(f1)"
            );
        }
    }

    #[test]
    fn zdt4_rejects_out_of_bounds() {
        let spec = BenchmarkSpec::new(BenchmarkId::Zdt4);
        let mut x = vec![0.0; 10];
        x[0] = 1.5;
        assert!(matches!(
            zdt4(&spec, &x),
            Err(BenchmarkError::OutOfBounds { index: 0, .. })
        ));
    }

    #[test]
    fn deb_reference_values() {
        let spec = BenchmarkSpec::new(BenchmarkId::Deb);
        let mut x = vec![0.0; 10];
        x[0] = 1.0;
        let (f1, f2, _) = deb(&spec, &x).unwrap();
        assert_eq!(f1, 1.0);
        assert!((f2 - 0.0).abs() < 1e-12);

        let mut ones = vec![1.0; 10];
        ones[0] = 0.0;
        let g = 1.0 + 9.0 / 9.0 * 9.0;
        assert_eq!(g, 10.0);
        let (_, f2, _) = deb(&spec, &ones).unwrap();
        assert!((f2 - 10.0).abs() < 1e-12, "f2 = g at f1 = 0, got {f2}");
    }

    #[test]
    fn deb_constraint_matches_independent_expression() {
        // Re-derivation of the constraint with separately written code.
        let k = DebConstants::default();
        let (f1, f2) = (0.5, 0.5);
        let theta = -0.2 * PI;
        let inner = (theta.sin() * (f2 - 1.0) + f1 * theta.cos()).powi(1);
        let expected = theta.cos() * (f2 - 1.0)
            - f1 * theta.sin()
            - 0.2 * (10.0 * PI * inner).sin().abs().powi(6);
        let got = deb_constraint(&k, f1, f2);
        assert!((got - expected).abs() < 1e-14, "got {got}, expected {expected}");
    }

    #[test]
    fn reference_front_examples() {
        let spec = BenchmarkSpec::new(BenchmarkId::Zdt4);
        let front = reference_front(&spec, 3);
        assert_eq!(front.len(), 3);
        assert_eq!(front[0].0, vec![0.0, 1.0]);
        assert!((front[1].0[1] - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert_eq!(front[2].0, vec![1.0, 0.0]);
        for p in &front {
            assert!((p.0[1] - (1.0 - p.0[0].sqrt())).abs() < 1e-15);
        }

        let deb_spec = BenchmarkSpec::new(BenchmarkId::Deb);
        let filtered = reference_front(&deb_spec, 500);
        assert!(!filtered.is_empty());
        assert!(filtered.len() < 500, "the constraint fragments the curve");
        for p in &filtered {
            assert!(deb_constraint(&deb_spec.constants, p.0[0], p.0[1]) >= 0.0);
        }
    }

    #[test]
    fn evaluations_are_bitwise_repeatable() {
        let spec = BenchmarkSpec::new(BenchmarkId::Zdt4);
        let x = vec![0.3, 1.7, -2.4, 0.1, 4.9, -0.6, 3.3, 2.2, -1.1, 0.8];
        let a = zdt4(&spec, &x).unwrap();
        let b = zdt4(&spec, &x).unwrap();
        assert_eq!(a, b);
    }
}
