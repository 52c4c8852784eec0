//! Seeded sampling utilities: Latin hypercube designs, uniform box draws
//! and the nonuniform perturbation schedule used by agent random walks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::interval::Interval;

/// Latin hypercube design of `count` points over `bounds`: each dimension
/// is split into `count` equal strata holding exactly one point, with
/// independently permuted stratum assignments per dimension.
pub fn latin_hypercube<R: Rng>(bounds: &[Interval], count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let dim = bounds.len();
    let mut strata: Vec<Vec<usize>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut order: Vec<usize> = (0..count).collect();
        order.shuffle(rng);
        strata.push(order);
    }
    (0..count)
        .map(|i| {
            (0..dim)
                .map(|d| {
                    let cell = strata[d][i] as f64;
                    let u: f64 = rng.gen();
                    let frac = (cell + u) / count as f64;
                    bounds[d].lo + frac * bounds[d].width()
                })
                .collect()
        })
        .collect()
}

/// Uniform draw from a box.
pub fn uniform_in_box<R: Rng>(bounds: &[Interval], rng: &mut R) -> Vec<f64> {
    bounds
        .iter()
        .map(|iv| {
            if iv.width() > 0.0 {
                rng.gen_range(iv.lo..=iv.hi)
            } else {
                iv.lo
            }
        })
        .collect()
}

/// Nonuniform perturbation magnitude: `radius * (1 - u^((1 - progress)^b))`
/// with `u ~ U(0,1)`. Early in a run (`progress` near 0) the factor spreads
/// over the whole radius; late it concentrates near zero.
pub fn nonuniform_step<R: Rng>(radius: f64, progress: f64, b: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let exponent = (1.0 - progress.clamp(0.0, 1.0)).powf(b);
    let magnitude = radius * (1.0 - u.powf(exponent));
    if rng.gen::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn latin_hypercube_stratifies_exactly() {
        let bounds = vec![Interval::new(0.0, 1.0).unwrap(); 3];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let points = latin_hypercube(&bounds, 1000, &mut rng);
        for d in 0..3 {
            let mut counts = [0usize; 10];
            for p in &points {
                let decile = ((p[d] * 10.0) as usize).min(9);
                counts[decile] += 1;
            }
            assert!(
                counts.iter().all(|&c| c == 100),
                "dimension {d} deciles {counts:?}"
            );
        }
    }

    #[test]
    fn nonuniform_step_stays_in_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = nonuniform_step(0.5, 0.3, 5.0, &mut rng);
            assert!(s.abs() <= 0.5);
        }
    }

    #[test]
    fn late_progress_shrinks_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mean = |progress: f64, rng: &mut ChaCha8Rng| {
            (0..4000)
                .map(|_| nonuniform_step(1.0, progress, 5.0, rng).abs())
                .sum::<f64>()
                / 4000.0
        };
        let early = mean(0.0, &mut rng);
        let late = mean(0.95, &mut rng);
        assert!(late < early, "late {late} should be below early {early}");
    }
}
