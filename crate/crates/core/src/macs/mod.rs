//! The multiagent collaborative search engine.
//!
//! A population of agents explores the search box. Each agent carries a
//! hypercube perception region scaled by `rho`, a resource budget bounding
//! its sampling rounds, and a history of its best improvement direction.
//! Agents rank by dominance, the best `n_f` perceive, the rest hibernate or
//! relocate into the least-sampled subdomain of an adaptive partition.
//! Nondominated positions feed a global archive whose isolated entries
//! communicate pull directions back into the population. Problems with
//! inequality constraints split the population into a feasible task and a
//! residual-minimizing task with agents jumping between them.

mod engine;
mod perception;

pub use engine::{run, run_with_observer, GenerationReport, RunResult, RunStats};
pub use perception::{
    perception_step, social_displacement, social_displacement_with, update_region,
    BehaviorOutcome, PerceptionContext, SamplePoint,
};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::SelectionMode;
use crate::interval::Interval;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("population size must be positive")]
    EmptyPopulation,
    #[error("filter size {n_f} exceeds population size {population}")]
    FilterTooLarge { n_f: usize, population: usize },
    #[error("rho_min must lie in (0, 1), got {0}")]
    BadRhoMin(f64),
    #[error("problem has {n_l} integer components but only {n} dimensions")]
    BadIntegerCount { n_l: usize, n: usize },
    #[error("bounds must be finite and ordered")]
    BadBounds,
}

/// Objective or constraint handle: a pure function of the decision vector.
pub type ResponseHandle = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A bound-constrained problem with optional inequality constraints
/// (`c <= 0` feasible). The first `n_l` decision components are integers.
#[derive(Clone)]
pub struct ProblemDefinition {
    pub name: String,
    pub n_l: usize,
    pub bounds: Vec<Interval>,
    pub objective_count: usize,
    pub constraint_count: usize,
    objectives: ResponseHandle,
    constraints: Option<ResponseHandle>,
}

impl std::fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("name", &self.name)
            .field("n", &self.bounds.len())
            .field("n_l", &self.n_l)
            .field("objective_count", &self.objective_count)
            .field("constraint_count", &self.constraint_count)
            .finish()
    }
}

impl ProblemDefinition {
    pub fn new(
        name: impl Into<String>,
        n_l: usize,
        bounds: Vec<Interval>,
        objective_count: usize,
        objectives: ResponseHandle,
    ) -> Self {
        Self {
            name: name.into(),
            n_l,
            bounds,
            objective_count,
            constraint_count: 0,
            objectives,
            constraints: None,
        }
    }

    pub fn with_constraints(
        mut self,
        constraint_count: usize,
        constraints: Option<ResponseHandle>,
    ) -> Self {
        self.constraint_count = constraint_count;
        self.constraints = constraints;
        self
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    pub fn has_constraints(&self) -> bool {
        self.constraints.is_some() && self.constraint_count > 0
    }

    /// Raw objective evaluation (uncounted; the engine counts through its
    /// budget guard).
    pub fn objectives(&self, x: &[f64]) -> Vec<f64> {
        (self.objectives)(x)
    }

    /// Raw constraint residuals; empty when unconstrained.
    pub fn constraints(&self, x: &[f64]) -> Vec<f64> {
        match &self.constraints {
            Some(handle) => handle(x),
            None => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n_l > self.n() {
            return Err(EngineError::BadIntegerCount {
                n_l: self.n_l,
                n: self.n(),
            });
        }
        if self
            .bounds
            .iter()
            .any(|iv| !iv.lo.is_finite() || !iv.hi.is_finite() || iv.lo > iv.hi)
        {
            return Err(EngineError::BadBounds);
        }
        Ok(())
    }

    /// Clamps into the box and rounds the integer components to the nearest
    /// feasible integer.
    pub fn repair(&self, x: &mut [f64]) {
        for (i, iv) in self.bounds.iter().enumerate() {
            x[i] = iv.clamp(x[i]);
            if i < self.n_l {
                let lo = iv.lo.ceil();
                let hi = iv.hi.floor();
                x[i] = x[i].round().clamp(lo, hi);
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.bounds.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }
}

/// Which task an agent currently serves in a constrained run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subpopulation {
    FeasibleTask,
    ConstraintTask,
}

/// Best position an agent has seen, with its evaluation.
#[derive(Debug, Clone)]
pub struct BestSeen {
    pub position: Vec<f64>,
    pub objectives: Vec<f64>,
    pub feasible: bool,
    /// Constraint residual sum at the position (zero when feasible).
    pub residual: f64,
}

/// One agent: a candidate solution with its perception region, resources
/// and history.
#[derive(Debug, Clone)]
pub struct Agent {
    pub position: Vec<f64>,
    pub previous_position: Vec<f64>,
    pub objectives: Vec<f64>,
    pub constraint_values: Vec<f64>,
    /// Region scale in (0, 1].
    pub rho: f64,
    /// Sampling rounds available this generation, in `[1, n]`.
    pub resources: usize,
    pub best_seen: BestSeen,
    pub improved_last_gen: bool,
    pub subpopulation: Subpopulation,
    pub converged: bool,
    /// Displacement of the largest registered improvement.
    pub best_improvement: Option<(Vec<f64>, f64)>,
    /// Direction suggested by another agent or the archive, consumed by the
    /// next perception.
    pub pending_direction: Option<Vec<f64>>,
}

impl Agent {
    pub fn feasible(&self) -> bool {
        self.constraint_values.iter().all(|&r| r <= 0.0)
    }

    /// Constraint residual sum `sum_j max(0, R_j)`.
    pub fn residual_sum(&self) -> f64 {
        self.constraint_values.iter().map(|&r| r.max(0.0)).sum()
    }

    /// The perception hypercube: half-width `rho * fraction * range / 2`
    /// per coordinate, clipped at the search box.
    pub fn region(&self, bounds: &[Interval], fraction: f64) -> Vec<Interval> {
        self.position
            .iter()
            .zip(bounds)
            .map(|(&x, iv)| {
                let half = 0.5 * self.rho * fraction * iv.width();
                Interval {
                    lo: (x - half).max(iv.lo),
                    hi: (x + half).min(iv.hi),
                }
            })
            .collect()
    }
}

/// Engine tuning knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub population_size: usize,
    /// Perceiving subpopulation size.
    pub n_f: usize,
    pub max_evaluations: u64,
    pub rho_min: f64,
    /// Normalized decision-space distance below which intersecting agents
    /// collide.
    pub collision_distance: f64,
    pub seed: u64,
    /// Inertia and attraction weights of the swarm displacement.
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
    /// Improvement slack of the perception acceptance test.
    pub epsilon_accept: f64,
    /// Fraction of each bound range spanned by a full-scale region.
    pub region_fraction: f64,
    pub archive_capacity: usize,
    /// Generations between branching rounds.
    pub branch_interval: u64,
    pub max_branch_depth: usize,
    pub selection_mode: SelectionMode,
    /// Exploration weight of the merit selection.
    pub nu: f64,
    /// Branching candidates are skipped above this no-improvement count.
    pub no_improve_threshold: usize,
    /// Fraction of feasible agents allowed to explore across the
    /// constraint boundary (the best feasible agent never does).
    pub boundary_exploration_fraction: f64,
    /// Exponent of the nonuniform random-walk schedule.
    pub mutation_b: f64,
    /// Coordinates split by the first branching rounds.
    pub initial_split_indices: Vec<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            population_size: 10,
            n_f: 5,
            max_evaluations: 10_000,
            rho_min: 1e-4,
            collision_distance: 1e-4,
            seed: 0,
            w0: 0.7,
            w1: 1.4,
            w2: 1.4,
            epsilon_accept: 0.0,
            region_fraction: 0.25,
            archive_capacity: 200,
            branch_interval: 10,
            max_branch_depth: 10,
            selection_mode: SelectionMode::FrontGuided,
            nu: 0.5,
            no_improve_threshold: 3,
            boundary_exploration_fraction: 0.3,
            mutation_b: 5.0,
            initial_split_indices: vec![0],
        }
    }
}

impl EngineConfig {
    pub fn validate(&self, problem: &ProblemDefinition) -> Result<(), EngineError> {
        problem.validate()?;
        if self.population_size == 0 {
            return Err(EngineError::EmptyPopulation);
        }
        if self.n_f > self.population_size {
            return Err(EngineError::FilterTooLarge {
                n_f: self.n_f,
                population: self.population_size,
            });
        }
        if !(self.rho_min > 0.0 && self.rho_min < 1.0) {
            return Err(EngineError::BadRhoMin(self.rho_min));
        }
        Ok(())
    }
}

/// Clamped resource update: one unit up on improvement, one down otherwise,
/// within `[1, n]`.
pub fn update_resources(resources: usize, improved: bool, n: usize) -> usize {
    if improved {
        (resources + 1).min(n.max(1))
    } else {
        resources.saturating_sub(1).max(1)
    }
}
