//! Individual agent behavior: the random-walk/linear/quadratic sampling
//! rounds inside the perception region, the swarm displacement, and the
//! region contraction/expansion rule.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Agent, ProblemDefinition};
use crate::interval::Interval;
use crate::sampling::nonuniform_step;

/// One evaluated perception sample.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub displacement: Vec<f64>,
    pub position: Vec<f64>,
    pub objectives: Vec<f64>,
    pub constraints: Vec<f64>,
    /// Task scalar (augmented where the constraint rule applies).
    pub scalar: f64,
}

/// Outcome of one perception pass.
#[derive(Debug, Clone, Default)]
pub struct BehaviorOutcome {
    /// Local-scheme samples; all of them lie inside the region.
    pub samples: Vec<SamplePoint>,
    /// Indices into `samples` that improve on the agent.
    pub accepted: Vec<usize>,
    /// The appended displacement along a communicated or remembered
    /// direction. It moves at box scale, not region scale.
    pub social_sample: Option<SamplePoint>,
    pub social_accepted: bool,
    /// Scalar of the agent's own position under the same task weights.
    pub baseline_scalar: f64,
    /// True when the evaluation budget ran out mid-pass.
    pub truncated: bool,
}

impl BehaviorOutcome {
    /// Index of the accepted sample with the lowest scalar.
    pub fn best_accepted(&self) -> Option<usize> {
        self.accepted.iter().copied().min_by(|&a, &b| {
            self.samples[a]
                .scalar
                .partial_cmp(&self.samples[b].scalar)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    /// Index of the least bad sample, accepted or not.
    pub fn best_sample(&self) -> Option<usize> {
        (0..self.samples.len()).min_by(|&a, &b| {
            self.samples[a]
                .scalar
                .partial_cmp(&self.samples[b].scalar)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

/// The swarm displacement with explicit random factors:
/// `w0 (x - x_prev) - w1 r1 (x - x_local) - w2 r2 (x - x_global)`,
/// clipped so that the stepped position stays inside the box.
pub fn social_displacement_with(
    position: &[f64],
    previous: &[f64],
    local_best: &[f64],
    global_best: &[f64],
    weights: (f64, f64, f64),
    r1: f64,
    r2: f64,
    bounds: &[Interval],
) -> Vec<f64> {
    let (w0, w1, w2) = weights;
    position
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let raw = w0 * (x - previous[i])
                - w1 * r1 * (x - local_best[i])
                - w2 * r2 * (x - global_best[i]);
            bounds[i].clamp(x + raw) - x
        })
        .collect()
}

/// Swarm displacement with fresh uniform draws for the random factors.
pub fn social_displacement<R: Rng>(
    agent: &Agent,
    global_best: &[f64],
    weights: (f64, f64, f64),
    bounds: &[Interval],
    rng: &mut R,
) -> Vec<f64> {
    let r1: f64 = rng.gen();
    let r2: f64 = rng.gen();
    social_displacement_with(
        &agent.position,
        &agent.previous_position,
        &agent.best_seen.position,
        global_best,
        weights,
        r1,
        r2,
        bounds,
    )
}

/// Region update rule: with no accepted sample the radius contracts to the
/// distance of the least bad sampled point (measured in region-normalized
/// coordinates, `half_widths` being the region half widths the samples were
/// drawn in); with an improvement `rho` doubles, capped at 1. Returns the
/// converged flag.
pub fn update_region(
    agent: &mut Agent,
    outcome: &BehaviorOutcome,
    half_widths: &[f64],
    rho_min: f64,
) -> bool {
    if outcome.accepted.is_empty() {
        if let Some(best) = outcome.best_sample() {
            let sample = &outcome.samples[best];
            let mut ratio = 0.0f64;
            for (i, (&s, &x)) in sample.position.iter().zip(&agent.position).enumerate() {
                if half_widths[i] > 0.0 {
                    ratio = ratio.max((s - x).abs() / half_widths[i]);
                }
            }
            agent.rho *= ratio.clamp(0.0, 1.0);
        } else {
            agent.rho *= 0.5;
        }
    } else {
        agent.rho = (agent.rho * 2.0).min(1.0);
    }
    agent.converged = agent.rho < rho_min;
    agent.converged
}

/// Task context for one perception pass.
pub struct PerceptionContext<'a> {
    pub problem: &'a ProblemDefinition,
    pub region: Vec<Interval>,
    /// Fraction of the evaluation budget already spent.
    pub progress: f64,
    pub epsilon: f64,
    pub mutation_b: f64,
    pub weights: (f64, f64, f64),
}

impl Agent {
    /// Clips a candidate into the region and repairs integer components so
    /// they stay inside both the region and the box.
    fn into_region(&self, ctx: &PerceptionContext<'_>, mut candidate: Vec<f64>) -> Vec<f64> {
        for (i, iv) in ctx.region.iter().enumerate() {
            candidate[i] = iv.clamp(candidate[i]);
            if i < ctx.problem.n_l {
                let lo = iv.lo.ceil();
                let hi = iv.hi.floor();
                if lo <= hi {
                    candidate[i] = candidate[i].round().clamp(lo, hi);
                } else {
                    // No integer fits in the region slice; keep the agent's
                    // own integral coordinate.
                    candidate[i] = self.position[i];
                }
            }
        }
        candidate
    }
}

/// Runs the perception rounds for one agent. `evaluate` returns
/// `(objectives, constraints, task scalar)` or `None` when the budget is
/// spent. Up to `resources` rounds of (random walk, linear step, quadratic
/// step) run inside the region, quitting early once a sample improves on
/// the agent; afterwards one displacement along the pending communicated
/// direction (through the swarm rule) or the remembered best improvement
/// direction is appended.
pub fn perception_step<R: Rng>(
    agent: &Agent,
    ctx: &PerceptionContext<'_>,
    baseline_scalar: f64,
    evaluate: &mut dyn FnMut(&[f64]) -> Option<(Vec<f64>, Vec<f64>, f64)>,
    rng: &mut R,
) -> BehaviorOutcome {
    let mut outcome = BehaviorOutcome {
        baseline_scalar,
        ..Default::default()
    };
    let x = &agent.position;
    let epsilon = ctx.epsilon;
    let mut record = |outcome: &mut BehaviorOutcome, position: Vec<f64>| -> Option<Option<f64>> {
        if position == *x {
            return Some(None);
        }
        let Some((objectives, constraints, scalar)) = evaluate(&position) else {
            return None;
        };
        let displacement: Vec<f64> = position.iter().zip(x).map(|(&p, &q)| p - q).collect();
        outcome.samples.push(SamplePoint {
            displacement,
            position,
            objectives,
            constraints,
            scalar,
        });
        if scalar < baseline_scalar + epsilon {
            outcome.accepted.push(outcome.samples.len() - 1);
        }
        Some(Some(scalar))
    };

    // Pattern-search style probe order: rounds sweep the coordinates in a
    // fresh random permutation, so a full-resource pass touches every
    // coordinate once before repeating any.
    let mut probe_order: Vec<usize> = (0..x.len()).collect();
    probe_order.shuffle(rng);
    'rounds: for round in 0..agent.resources.max(1) {
        // (1) Random walk: perturb one coordinate by the nonuniform
        // magnitude; the subsequent line steps move along that coordinate.
        let mut walk = x.clone();
        let coord = probe_order[round % probe_order.len()];
        let half = 0.5 * ctx.region[coord].width();
        walk[coord] += nonuniform_step(half, ctx.progress, ctx.mutation_b, rng);
        let walk = agent.into_region(ctx, walk);
        let f_walk = match record(&mut outcome, walk.clone()) {
            None => {
                outcome.truncated = true;
                break 'rounds;
            }
            Some(None) => continue,
            Some(Some(s)) => s,
        };
        let direction: Vec<f64> = walk.iter().zip(x).map(|(&w, &q)| w - q).collect();
        // Parameter range of the line x + t * direction inside the region.
        let (t_min, t_max) = line_range(x, &direction, &ctx.region);
        // (2) Linear model: its predicted minimizer on a line is the
        // region boundary along the descent direction.
        let t_lin = if f_walk < baseline_scalar {
            t_max
        } else if f_walk > baseline_scalar {
            t_min
        } else {
            0.0
        };
        let mut quad_input: Option<(f64, f64)> = None;
        if t_lin != 0.0 && (t_lin - 1.0).abs() > 1e-12 {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(&q, &d)| q + t_lin * d)
                .collect();
            let candidate = agent.into_region(ctx, candidate);
            match record(&mut outcome, candidate) {
                None => {
                    outcome.truncated = true;
                    break 'rounds;
                }
                Some(Some(s)) => quad_input = Some((t_lin, s)),
                Some(None) => {}
            }
        }
        // (3) Quadratic through the three collinear samples; step to the
        // vertex when the curvature is positive and the vertex is interior.
        if let Some((t2, f2)) = quad_input {
            let (f0, f1) = (baseline_scalar, f_walk);
            let denom = t2 * (t2 - 1.0);
            if denom.abs() > 1e-12 {
                let a = (f2 - f0 - (f1 - f0) * t2) / denom;
                let b = (f1 - f0) - a;
                if a > 0.0 {
                    let t_v = -b / (2.0 * a);
                    let interior = t_v > t_min && t_v < t_max;
                    let fresh = (t_v - t2).abs() > 1e-9
                        && t_v.abs() > 1e-9
                        && (t_v - 1.0).abs() > 1e-9;
                    if interior && fresh {
                        let candidate: Vec<f64> = x
                            .iter()
                            .zip(&direction)
                            .map(|(&q, &d)| q + t_v * d)
                            .collect();
                        let candidate = agent.into_region(ctx, candidate);
                        if record(&mut outcome, candidate).is_none() {
                            outcome.truncated = true;
                            break 'rounds;
                        }
                    }
                }
            }
        }
        if !outcome.accepted.is_empty() {
            break 'rounds;
        }
    }

    // Final displacement: a communicated direction takes precedence over
    // the remembered best improvement direction. It moves through the
    // swarm rule at box scale so knowledge travels across regions.
    if !outcome.truncated {
        let extra: Option<Vec<f64>> = if let Some(pending) = &agent.pending_direction {
            let target: Vec<f64> = x.iter().zip(pending).map(|(&q, &d)| q + d).collect();
            Some(social_displacement(
                agent,
                &target,
                ctx.weights,
                &ctx.problem.bounds,
                rng,
            ))
        } else {
            agent.best_improvement.as_ref().map(|(d, _)| d.clone())
        };
        if let Some(delta) = extra {
            let mut candidate: Vec<f64> = x.iter().zip(&delta).map(|(&q, &d)| q + d).collect();
            ctx.problem.repair(&mut candidate);
            if candidate != *x {
                match evaluate(&candidate) {
                    None => outcome.truncated = true,
                    Some((objectives, constraints, scalar)) => {
                        let displacement: Vec<f64> =
                            candidate.iter().zip(x).map(|(&p, &q)| p - q).collect();
                        outcome.social_accepted = scalar < baseline_scalar + epsilon;
                        outcome.social_sample = Some(SamplePoint {
                            displacement,
                            position: candidate,
                            objectives,
                            constraints,
                            scalar,
                        });
                    }
                }
            }
        }
    }
    debug_assert!(
        outcome.samples.iter().all(|s| {
            s.position
                .iter()
                .zip(&ctx.region)
                .all(|(&v, iv)| iv.lo - 1e-12 <= v && v <= iv.hi + 1e-12)
        }),
        "perception samples stay inside the region"
    );
    outcome
}

/// Range of `t` keeping `x + t d` inside the region box.
fn line_range(x: &[f64], direction: &[f64], region: &[Interval]) -> (f64, f64) {
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for ((&xi, &di), iv) in x.iter().zip(direction).zip(region) {
        if di == 0.0 {
            continue;
        }
        let a = (iv.lo - xi) / di;
        let b = (iv.hi - xi) / di;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        t_min = t_min.max(lo);
        t_max = t_max.min(hi);
    }
    if !t_min.is_finite() || !t_max.is_finite() {
        (0.0, 0.0)
    } else {
        (t_min, t_max)
    }
}
