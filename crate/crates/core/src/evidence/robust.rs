//! Lifts a deterministic design problem to Belief-valued objectives and
//! constraints: each design evaluation sweeps the joint focal elements of
//! the uncertain space once, bounds every response output per element and
//! turns threshold events into Belief values that an assembler maps to the
//! final objective and constraint vectors.

use std::sync::Arc;

use super::{
    belief_plausibility_batch, EventDirection, EvidenceError, ExtremumMethod, ThresholdEvent,
    UncertainSpace,
};
use crate::interval::Interval;
use crate::macs::{ProblemDefinition, ResponseHandle};

/// Where an event threshold comes from: a constant, or a component of the
/// design vector (e.g. a mass budget that is itself optimized).
#[derive(Debug, Clone, Copy)]
pub enum ThresholdSource {
    Fixed(f64),
    DesignComponent(usize),
}

/// One Belief-valued quantity computed per design evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EventSpec {
    pub response_index: usize,
    pub direction: EventDirection,
    pub threshold: ThresholdSource,
}

impl EventSpec {
    fn resolve(&self, design: &[f64]) -> ThresholdEvent {
        let threshold = match self.threshold {
            ThresholdSource::Fixed(v) => v,
            ThresholdSource::DesignComponent(i) => design[i],
        };
        ThresholdEvent {
            response_index: self.response_index,
            threshold,
            direction: self.direction,
        }
    }
}

/// Couples a design component (a margin in `[0, 1]`) to an uncertain
/// dimension whose intervals it scales.
#[derive(Debug, Clone, Copy)]
pub struct MarginBinding {
    pub dim_index: usize,
    pub design_index: usize,
}

/// Belief/Plausibility of every registered event for one design.
#[derive(Debug, Clone)]
pub struct BeliefValues {
    pub belief: Vec<f64>,
    pub plausibility: Vec<f64>,
}

/// Deterministic response of the underlying model: maps a design vector
/// and a point of the uncertain space to the model outputs.
pub type JointResponse = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Maps `(design, belief values)` to `(objectives, constraints <= 0)`.
pub type Assembler = Arc<dyn Fn(&[f64], &BeliefValues) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// A deterministic problem lifted to Belief-valued form.
pub struct RobustProblem {
    space: UncertainSpace,
    response: JointResponse,
    events: Vec<EventSpec>,
    margin_bindings: Vec<MarginBinding>,
    method: ExtremumMethod,
    assemble: Assembler,
}

impl RobustProblem {
    pub fn new(
        mut space: UncertainSpace,
        response: JointResponse,
        events: Vec<EventSpec>,
        margin_bindings: Vec<MarginBinding>,
        method: ExtremumMethod,
        assemble: Assembler,
    ) -> Self {
        space.margin_indices = margin_bindings
            .iter()
            .enumerate()
            .map(|(slot, binding)| (binding.dim_index, slot))
            .collect();
        Self {
            space,
            response,
            events,
            margin_bindings,
            method,
            assemble,
        }
    }

    pub fn space(&self) -> &UncertainSpace {
        &self.space
    }

    fn margins(&self, design: &[f64]) -> Vec<f64> {
        self.margin_bindings
            .iter()
            .map(|b| design[b.design_index].clamp(0.0, 1.0))
            .collect()
    }

    /// One full joint-focal-element sweep for a design.
    pub fn belief_values(&self, design: &[f64]) -> Result<BeliefValues, EvidenceError> {
        let margins = self.margins(design);
        let events: Vec<ThresholdEvent> = self.events.iter().map(|e| e.resolve(design)).collect();
        let response = |p: &[f64]| (self.response)(design, p);
        let pairs =
            belief_plausibility_batch(&self.space, &margins, &response, &events, self.method)?;
        Ok(BeliefValues {
            belief: pairs.iter().map(|&(b, _)| b).collect(),
            plausibility: pairs.iter().map(|&(_, p)| p).collect(),
        })
    }

    /// Objectives and constraints for a design.
    pub fn evaluate(&self, design: &[f64]) -> Result<(Vec<f64>, Vec<f64>), EvidenceError> {
        let values = self.belief_values(design)?;
        Ok((self.assemble)(design, &values))
    }

    /// The deterministic response at one point of the uncertain space.
    pub fn raw_response(&self, design: &[f64], uncertain: &[f64]) -> Vec<f64> {
        (self.response)(design, uncertain)
    }

    /// Wraps the lifted evaluation into an engine problem definition. The
    /// engine sees plain objective/constraint handles; every invocation
    /// triggers one joint-focal-element sweep.
    pub fn into_problem(
        self,
        name: impl Into<String>,
        n_l: usize,
        bounds: Vec<Interval>,
        objective_count: usize,
        constraint_count: usize,
    ) -> ProblemDefinition {
        let shared = Arc::new(self);
        let for_objectives = Arc::clone(&shared);
        let objectives: ResponseHandle = Arc::new(move |x: &[f64]| {
            let (obj, _) = for_objectives
                .evaluate(x)
                .unwrap_or_else(|e| panic!("belief evaluation failed: {e}"));
            debug_assert_eq!(obj.len(), objective_count);
            obj
        });
        let for_constraints = Arc::clone(&shared);
        let constraints: Option<ResponseHandle> = if constraint_count > 0 {
            Some(Arc::new(move |x: &[f64]| {
                let (_, con) = for_constraints
                    .evaluate(x)
                    .unwrap_or_else(|e| panic!("belief evaluation failed: {e}"));
                debug_assert_eq!(con.len(), constraint_count);
                con
            }))
        } else {
            None
        };
        ProblemDefinition::new(name, n_l, bounds, objective_count, objectives)
            .with_constraints(constraint_count, constraints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::BpaStructure;

    /// Design is (threshold, margin); uncertain dimension is a single
    /// interval [2, 6] scaled by the margin; response is the identity.
    fn margin_problem() -> RobustProblem {
        let bpa = BpaStructure::from_rows("p", &[(2.0, 6.0, 1.0)]).unwrap();
        let space = UncertainSpace::new(vec![bpa]).unwrap();
        RobustProblem::new(
            space,
            Arc::new(|_design: &[f64], p: &[f64]| vec![p[0]]),
            vec![EventSpec {
                response_index: 0,
                direction: EventDirection::Leq,
                threshold: ThresholdSource::DesignComponent(0),
            }],
            vec![MarginBinding {
                dim_index: 0,
                design_index: 1,
            }],
            ExtremumMethod::Corners,
            Arc::new(|_design, values: &BeliefValues| (vec![1.0 - values.belief[0]], vec![])),
        )
    }

    #[test]
    fn margin_couples_design_to_space() {
        let problem = margin_problem();
        // Full margin: box is [2, 6]; event x <= 5 does not contain it.
        let full = problem.belief_values(&[5.0, 1.0]).unwrap();
        assert_eq!(full.belief[0], 0.0);
        // Half margin: box is [3, 5]; event x <= 5 contains it.
        let half = problem.belief_values(&[5.0, 0.5]).unwrap();
        assert_eq!(half.belief[0], 1.0);
    }

    #[test]
    fn lifted_problem_evaluates_objectives() {
        let problem = margin_problem();
        let bounds = vec![
            Interval::new(0.0, 10.0).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
        ];
        let lifted = problem.into_problem("margin-demo", 0, bounds, 1, 0);
        let obj = lifted.objectives(&[5.0, 0.5]);
        assert_eq!(obj, vec![0.0]);
        let obj = lifted.objectives(&[5.0, 1.0]);
        assert_eq!(obj, vec![1.0]);
    }
}
