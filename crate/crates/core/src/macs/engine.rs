//! The generation loop: ranking, filtering, perception, relocation,
//! collisions, archive maintenance, communication and branching.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::perception::{perception_step, update_region, PerceptionContext, SamplePoint};
use super::{
    update_resources, Agent, BestSeen, EngineConfig, EngineError, ProblemDefinition,
    Subpopulation,
};
use crate::decomposition::{adapt_scheme, BranchingScheme, FrontMember, Partition};
use crate::pareto::{
    crowding_values, dominance_index, ArchiveEntry, ObjectiveVector, Origin, ParetoArchive,
};
use crate::sampling::{latin_hypercube, uniform_in_box};

/// Counters and run-level flags.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub evaluations: u64,
    pub generations: u64,
    pub regenerations: u64,
    pub mutations: u64,
    pub collisions: u64,
    pub branchings: u64,
    /// Pairwise comparisons spent managing the archive.
    pub archive_pairwise_ops: u64,
    /// Accumulated `n_A (n_p + n_A)` envelope for the archive work.
    pub archive_ops_bound: u64,
    /// Objective evaluations spent inside perception passes.
    pub perception_evaluations: u64,
    /// Accumulated `n_p (n + n_p)` envelope for the perception work.
    pub perception_ops_bound: u64,
    pub subdomain_densities: Vec<f64>,
    /// Budget ran out before the first generation completed.
    pub incomplete: bool,
}

/// Per-generation progress snapshot.
#[derive(Debug, Clone)]
pub struct GenerationReport {
    pub generation: u64,
    pub evaluations: u64,
    pub archive_size: usize,
    /// Agents with dominance index zero (feasible ones).
    pub nondominated_agents: usize,
    pub feasible_agents: usize,
    pub subdomains: usize,
}

#[derive(Debug)]
pub struct RunResult {
    pub archive: ParetoArchive,
    pub stats: RunStats,
    pub partition: Partition,
}

struct Budget {
    used: u64,
    max: u64,
}

impl Budget {
    fn try_spend(&mut self) -> bool {
        if self.used >= self.max {
            return false;
        }
        self.used += 1;
        true
    }
}

struct Ranking {
    /// Agent indices best to worst.
    order: Vec<usize>,
    /// Dominance index per agent; infeasible agents get `usize::MAX`.
    dominance: Vec<usize>,
}

/// Task scalar of one evaluated point. Constraint-task agents minimize the
/// residual sum; feasible-task agents minimize the weighted normalized
/// objective sum, augmented by the largest violated residual unless the
/// agent explores the constraint boundary.
fn task_scalar(
    task: Subpopulation,
    explorer: bool,
    weights: &[f64],
    z_lo: &[f64],
    z_range: &[f64],
    objectives: &[f64],
    constraints: &[f64],
) -> f64 {
    match task {
        Subpopulation::ConstraintTask => constraints.iter().map(|&r| r.max(0.0)).sum(),
        Subpopulation::FeasibleTask => {
            let base: f64 = objectives
                .iter()
                .enumerate()
                .map(|(k, &f)| weights[k] * (f - z_lo[k]) / z_range[k])
                .sum();
            let max_r = constraints.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !constraints.is_empty() && max_r > 0.0 && !explorer {
                base + max_r
            } else {
                base
            }
        }
    }
}

pub(super) struct Engine<'p> {
    problem: &'p ProblemDefinition,
    config: &'p EngineConfig,
    rng: ChaCha8Rng,
    agents: Vec<Agent>,
    archive: ParetoArchive,
    partition: Partition,
    scheme: BranchingScheme,
    budget: Budget,
    stats: RunStats,
    explorers: Vec<bool>,
    gen_samples: Vec<Vec<f64>>,
    last_report: GenerationReport,
}

impl<'p> Engine<'p> {
    fn new(problem: &'p ProblemDefinition, config: &'p EngineConfig) -> Self {
        let partition = Partition::new(problem.bounds.clone(), config.max_branch_depth);
        let scheme = BranchingScheme::new(
            &problem.bounds,
            config
                .initial_split_indices
                .iter()
                .copied()
                .filter(|&i| i < problem.n()),
        );
        Self {
            problem,
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            agents: Vec::new(),
            archive: ParetoArchive::new(config.archive_capacity),
            partition,
            scheme,
            budget: Budget {
                used: 0,
                max: config.max_evaluations,
            },
            stats: RunStats::default(),
            explorers: vec![false; config.population_size],
            gen_samples: Vec::new(),
            last_report: GenerationReport {
                generation: 0,
                evaluations: 0,
                archive_size: 0,
                nondominated_agents: 0,
                feasible_agents: 0,
                subdomains: 1,
            },
        }
    }

    fn initialize(&mut self) {
        let positions = latin_hypercube(
            &self.problem.bounds,
            self.config.population_size,
            &mut self.rng,
        );
        let n = self.problem.n();
        let mut candidates = Vec::new();
        for mut position in positions {
            self.problem.repair(&mut position);
            // Initialization always completes; the budget guard starts with
            // the generation loop.
            self.budget.used += 1;
            let objectives = self.problem.objectives(&position);
            let constraint_values = self.problem.constraints(&position);
            let feasible = constraint_values.iter().all(|&r| r <= 0.0);
            let residual: f64 = constraint_values.iter().map(|&r| r.max(0.0)).sum();
            let agent = Agent {
                previous_position: position.clone(),
                objectives: objectives.clone(),
                constraint_values,
                rho: 1.0,
                resources: n,
                best_seen: BestSeen {
                    position: position.clone(),
                    objectives: objectives.clone(),
                    feasible,
                    residual,
                },
                improved_last_gen: false,
                subpopulation: if feasible {
                    Subpopulation::FeasibleTask
                } else {
                    Subpopulation::ConstraintTask
                },
                converged: false,
                best_improvement: None,
                pending_direction: None,
                position,
            };
            if feasible || !self.problem.has_constraints() {
                candidates.push(ArchiveEntry::new(
                    agent.position.clone(),
                    ObjectiveVector(objectives),
                    Origin::AgentBest,
                ));
            }
            self.agents.push(agent);
        }
        let sampled: Vec<Vec<f64>> = self.agents.iter().map(|a| a.position.clone()).collect();
        self.partition.record_samples(&sampled);
        self.update_archive(candidates);
        if self.budget.used >= self.budget.max {
            self.stats.incomplete = true;
        }
    }

    fn eval_counted(&mut self, x: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.budget.try_spend() {
            return None;
        }
        Some((self.problem.objectives(x), self.problem.constraints(x)))
    }

    /// Refreshes subpopulation labels from the current residuals; agents
    /// jump between the feasible task and the constraint task.
    fn constraint_split_step(&mut self) {
        for agent in &mut self.agents {
            agent.subpopulation = if agent.feasible() {
                Subpopulation::FeasibleTask
            } else {
                Subpopulation::ConstraintTask
            };
        }
    }

    /// Ranks agents best to worst: feasible agents by (dominance index,
    /// crowding), then infeasible agents by residual.
    fn rank_agents(&mut self) -> Ranking {
        let feasible: Vec<usize> = (0..self.agents.len())
            .filter(|&i| self.agents[i].feasible() || !self.problem.has_constraints())
            .collect();
        let objs: Vec<ObjectiveVector> = feasible
            .iter()
            .map(|&i| ObjectiveVector(self.agents[i].objectives.clone()))
            .collect();
        let dom = dominance_index(&objs);
        let crowd = crowding_values(&objs);
        self.stats.archive_pairwise_ops += (objs.len() * objs.len()) as u64 * 2;
        let mut dominance = vec![usize::MAX; self.agents.len()];
        let mut crowding = vec![0.0f64; self.agents.len()];
        for (k, &i) in feasible.iter().enumerate() {
            dominance[i] = dom[k];
            crowding[i] = crowd[k];
        }
        let mut order: Vec<usize> = (0..self.agents.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = dominance[a] != usize::MAX;
            let fb = dominance[b] != usize::MAX;
            match (fa, fb) {
                (true, false) => std::cmp::Ordering::Less,
                (false, true) => std::cmp::Ordering::Greater,
                (true, true) => dominance[a]
                    .cmp(&dominance[b])
                    .then(
                        crowding[a]
                            .partial_cmp(&crowding[b])
                            .unwrap_or(std::cmp::Ordering::Equal),
                    )
                    .then(a.cmp(&b)),
                (false, false) => {
                    let ra = self.agents[a].residual_sum();
                    let rb = self.agents[b].residual_sum();
                    ra.partial_cmp(&rb)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                }
            }
        });
        Ranking { order, dominance }
    }

    /// Splits the ranked population: the best `n_f` perceive; the rest
    /// mutate with probability rising linearly from 0.1 just below the
    /// filter to 0.9 at the worst rank, otherwise hibernate.
    fn filter_population(&mut self, ranking: &Ranking) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let n_f = self.config.n_f.min(ranking.order.len());
        let perceivers: Vec<usize> = ranking.order[..n_f].to_vec();
        let rest = &ranking.order[n_f..];
        let mut hibernated = Vec::new();
        let mut mutated = Vec::new();
        for (k, &idx) in rest.iter().enumerate() {
            let p = if rest.len() <= 1 {
                0.9
            } else {
                0.1 + 0.8 * k as f64 / (rest.len() - 1) as f64
            };
            if self.rng.gen::<f64>() < p {
                mutated.push(idx);
            } else {
                hibernated.push(idx);
            }
        }
        (perceivers, hibernated, mutated)
    }

    /// Chooses the feasible agents allowed to cross the constraint
    /// boundary this generation; the best feasible agent never does.
    fn select_boundary_explorers(&mut self, ranking: &Ranking) {
        self.explorers.iter_mut().for_each(|e| *e = false);
        if !self.problem.has_constraints() {
            return;
        }
        let feasible_ranked: Vec<usize> = ranking
            .order
            .iter()
            .copied()
            .filter(|&i| self.agents[i].feasible())
            .collect();
        if feasible_ranked.len() < 2 {
            return;
        }
        let eligible = &feasible_ranked[1..];
        let count =
            (self.config.boundary_exploration_fraction * feasible_ranked.len() as f64) as usize;
        let chosen: Vec<usize> = eligible
            .choose_multiple(&mut self.rng, count.min(eligible.len()))
            .copied()
            .collect();
        for idx in chosen {
            self.explorers[idx] = true;
        }
    }

    /// Normalization window for the weighted objective scalarization. The
    /// archive's own objective ranges define the window once the front has
    /// a few entries: trading objectives at front scale keeps moves along
    /// the front acceptable. A small or degenerate archive falls back to
    /// the population ranges.
    fn objective_normalization(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.problem.objective_count;
        let window = |objs: &mut dyn Iterator<Item = &[f64]>| -> (Vec<f64>, Vec<f64>) {
            let mut lo = vec![f64::INFINITY; m];
            let mut hi = vec![f64::NEG_INFINITY; m];
            for values in objs {
                for k in 0..m {
                    lo[k] = lo[k].min(values[k]);
                    hi[k] = hi[k].max(values[k]);
                }
            }
            (lo, hi)
        };
        if self.archive.len() >= 2 {
            let mut it = self.archive.entries().iter().map(|e| e.objectives.as_slice());
            let (lo, hi) = window(&mut it);
            if lo.iter().zip(&hi).all(|(&l, &h)| h > l) {
                let range = hi.iter().zip(&lo).map(|(&h, &l)| h - l).collect();
                return (lo, range);
            }
        }
        let mut it = self
            .agents
            .iter()
            .map(|a| a.objectives.as_slice())
            .chain(self.archive.entries().iter().map(|e| e.objectives.as_slice()));
        let (lo, hi) = window(&mut it);
        let range: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| if h > l { h - l } else { 1.0 })
            .collect();
        let lo = lo
            .into_iter()
            .map(|v| if v.is_finite() { v } else { 0.0 })
            .collect();
        (lo, range)
    }

    fn draw_simplex_weights(&mut self, m: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..m)
            .map(|_| -(self.rng.gen::<f64>().max(1e-12)).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }

    fn update_archive(&mut self, candidates: Vec<ArchiveEntry>) {
        let n_cands = candidates.len();
        let before: Vec<Vec<f64>> = self
            .archive
            .entries()
            .iter()
            .map(|e| e.decision.clone())
            .collect();
        self.archive.update(candidates);
        let n_a = self.archive.len();
        self.stats.archive_ops_bound += ((n_a + n_cands)
            * (self.config.population_size + n_a + n_cands)) as u64;
        // Fresh nondominated decisions mark their subdomain as improved.
        let fresh: Vec<Vec<f64>> = self
            .archive
            .entries()
            .iter()
            .filter(|e| !before.contains(&e.decision))
            .map(|e| e.decision.clone())
            .collect();
        for decision in fresh {
            self.partition.mark_improvement(&decision);
        }
    }

    /// Relocates an agent into the lowest-density subdomain with a fresh
    /// state. Returns false when the evaluation budget is exhausted.
    fn relocate(&mut self, idx: usize) -> bool {
        let boxed = self.partition.lowest_density_subdomain().boxed.clone();
        let mut position = uniform_in_box(&boxed, &mut self.rng);
        self.problem.repair(&mut position);
        let Some((objectives, constraint_values)) = self.eval_counted(&position) else {
            return false;
        };
        let feasible = constraint_values.iter().all(|&r| r <= 0.0);
        let residual: f64 = constraint_values.iter().map(|&r| r.max(0.0)).sum();
        self.gen_samples.push(position.clone());
        let n = self.problem.n();
        self.agents[idx] = Agent {
            previous_position: position.clone(),
            objectives: objectives.clone(),
            constraint_values,
            rho: 1.0,
            resources: n,
            best_seen: BestSeen {
                position: position.clone(),
                objectives,
                feasible,
                residual,
            },
            improved_last_gen: false,
            subpopulation: if feasible {
                Subpopulation::FeasibleTask
            } else {
                Subpopulation::ConstraintTask
            },
            converged: false,
            best_improvement: None,
            pending_direction: None,
            position,
        };
        true
    }

    /// Converged agents enter the archive and respawn; colliding agents
    /// lose the worse of the pair.
    fn handle_collisions_and_convergence(
        &mut self,
        ranking: &Ranking,
        candidates: &mut Vec<ArchiveEntry>,
    ) {
        for idx in 0..self.agents.len() {
            if !self.agents[idx].converged {
                continue;
            }
            let best = &self.agents[idx].best_seen;
            if best.feasible || !self.problem.has_constraints() {
                candidates.push(ArchiveEntry::new(
                    best.position.clone(),
                    ObjectiveVector(best.objectives.clone()),
                    Origin::Converged,
                ));
            }
            if self.relocate(idx) {
                self.stats.regenerations += 1;
            }
        }
        // Collision sweep: intersecting regions closer than the threshold
        // in normalized decision space regenerate the worse agent.
        let rank_of: Vec<usize> = {
            let mut r = vec![0usize; self.agents.len()];
            for (pos, &idx) in ranking.order.iter().enumerate() {
                r[idx] = pos;
            }
            r
        };
        let fraction = self.config.region_fraction;
        let bounds = &self.problem.bounds;
        let mut dead = vec![false; self.agents.len()];
        for i in 0..self.agents.len() {
            for j in (i + 1)..self.agents.len() {
                if dead[i] || dead[j] {
                    continue;
                }
                let (a, b) = (&self.agents[i], &self.agents[j]);
                let region_a = a.region(bounds, fraction);
                let region_b = b.region(bounds, fraction);
                let intersect = region_a
                    .iter()
                    .zip(&region_b)
                    .all(|(ra, rb)| ra.intersects(rb));
                if !intersect {
                    continue;
                }
                let dist: f64 = a
                    .position
                    .iter()
                    .zip(&b.position)
                    .zip(bounds)
                    .map(|((&xa, &xb), iv)| {
                        let w = iv.width().max(1e-300);
                        ((xa - xb) / w).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                if dist >= self.config.collision_distance {
                    continue;
                }
                let worse = if rank_of[i] > rank_of[j] { i } else { j };
                if self.relocate(worse) {
                    dead[worse] = true;
                    self.stats.collisions += 1;
                    self.stats.regenerations += 1;
                }
            }
        }
    }

    /// Archive entries (most isolated first) send pull directions to
    /// dominated or stagnant agents; improving agents exchange directions
    /// with randomly chosen peers.
    fn communicate(&mut self, ranking: &Ranking) {
        let recipients: Vec<usize> = (0..self.agents.len())
            .filter(|&i| ranking.dominance[i] != 0 || !self.agents[i].improved_last_gen)
            .collect();
        if !self.archive.is_empty() {
            let order = self.archive.isolation_order();
            for (k, &idx) in recipients.iter().enumerate() {
                let entry = &self.archive.entries()[order[k % order.len()]];
                let direction: Vec<f64> = entry
                    .decision
                    .iter()
                    .zip(&self.agents[idx].position)
                    .map(|(&d, &x)| d - x)
                    .collect();
                self.agents[idx].pending_direction = Some(direction);
            }
        }
        let improvers: Vec<usize> = (0..self.agents.len())
            .filter(|&i| self.agents[i].improved_last_gen)
            .collect();
        for &imp in &improvers {
            if self.agents.len() < 2 {
                break;
            }
            let mut target = self.rng.gen_range(0..self.agents.len());
            if target == imp {
                target = (target + 1) % self.agents.len();
            }
            if self.agents[target].pending_direction.is_none() {
                let direction: Vec<f64> = self.agents[imp]
                    .position
                    .iter()
                    .zip(&self.agents[target].position)
                    .map(|(&a, &b)| a - b)
                    .collect();
                self.agents[target].pending_direction = Some(direction);
            }
        }
    }

    fn front_members(&self) -> Vec<FrontMember> {
        // Archive entries are mutually nondominated, so the branching
        // fitness falls back to the first objective.
        self.archive
            .entries()
            .iter()
            .map(|e| FrontMember {
                decision: e.decision.clone(),
                fitness: e.objectives.0[0],
            })
            .collect()
    }

    fn generation(&mut self) {
        self.stats.generations += 1;
        self.gen_samples.clear();
        let mut candidates: Vec<ArchiveEntry> = Vec::new();

        if self.problem.has_constraints() {
            self.constraint_split_step();
        }
        let ranking = self.rank_agents();
        let (perceivers, _hibernated, mutated) = self.filter_population(&ranking);
        self.select_boundary_explorers(&ranking);
        let (z_lo, z_range) = self.objective_normalization();
        let progress = self.budget.used as f64 / self.budget.max.max(1) as f64;
        let constrained = self.problem.has_constraints();

        self.stats.perception_ops_bound += (self.config.population_size
            * (self.problem.n() + self.config.population_size))
            as u64;

        for &idx in &perceivers {
            let weights = self.draw_simplex_weights(self.problem.objective_count);
            let task = self.agents[idx].subpopulation;
            let explorer = self.explorers[idx];
            let region = self.agents[idx].region(&self.problem.bounds, self.config.region_fraction);
            let half_widths: Vec<f64> = self
                .problem
                .bounds
                .iter()
                .map(|iv| 0.5 * self.agents[idx].rho * self.config.region_fraction * iv.width())
                .collect();
            let baseline = task_scalar(
                task,
                explorer,
                &weights,
                &z_lo,
                &z_range,
                &self.agents[idx].objectives,
                &self.agents[idx].constraint_values,
            );
            let ctx = PerceptionContext {
                problem: self.problem,
                region,
                progress,
                epsilon: self.config.epsilon_accept,
                mutation_b: self.config.mutation_b,
                weights: (self.config.w0, self.config.w1, self.config.w2),
            };
            let outcome = {
                let problem = self.problem;
                let budget = &mut self.budget;
                let perception_evals = &mut self.stats.perception_evaluations;
                let mut evaluate = |p: &[f64]| -> Option<(Vec<f64>, Vec<f64>, f64)> {
                    if !budget.try_spend() {
                        return None;
                    }
                    *perception_evals += 1;
                    let objectives = problem.objectives(p);
                    let constraints = problem.constraints(p);
                    let scalar = task_scalar(
                        task,
                        explorer,
                        &weights,
                        &z_lo,
                        &z_range,
                        &objectives,
                        &constraints,
                    );
                    Some((objectives, constraints, scalar))
                };
                perception_step(
                    &self.agents[idx],
                    &ctx,
                    baseline,
                    &mut evaluate,
                    &mut self.rng,
                )
            };
            for sample in &outcome.samples {
                self.gen_samples.push(sample.position.clone());
            }
            if let Some(social) = &outcome.social_sample {
                self.gen_samples.push(social.position.clone());
            }
            let agent = &mut self.agents[idx];
            agent.pending_direction = None;
            if outcome.samples.is_empty() && outcome.social_sample.is_none() {
                agent.improved_last_gen = false;
                continue;
            }
            if !outcome.samples.is_empty() {
                update_region(agent, &outcome, &half_widths, self.config.rho_min);
            }
            let improved = !outcome.accepted.is_empty() || outcome.social_accepted;
            agent.resources = update_resources(agent.resources, improved, self.problem.n());
            agent.improved_last_gen = improved;
            // Commit to the best improving sample, the social jump included.
            let committed: Option<SamplePoint> = {
                let mut best: Option<&SamplePoint> = outcome.best_accepted().map(|i| &outcome.samples[i]);
                if outcome.social_accepted {
                    if let Some(social) = &outcome.social_sample {
                        if best.map_or(true, |b| social.scalar < b.scalar) {
                            best = Some(social);
                        }
                    }
                }
                best.cloned()
            };
            if let Some(sample) = committed {
                let gain = baseline - sample.scalar;
                match &agent.best_improvement {
                    Some((_, recorded)) if *recorded >= gain => {}
                    _ => {
                        agent.best_improvement = Some((sample.displacement.clone(), gain));
                    }
                }
                agent.previous_position = std::mem::replace(
                    &mut agent.position,
                    sample.position.clone(),
                );
                agent.objectives = sample.objectives.clone();
                agent.constraint_values = sample.constraints.clone();
                let feasible = agent.feasible();
                let residual = agent.residual_sum();
                let replace = if feasible {
                    !agent.best_seen.feasible
                        || dominates_slice(&agent.objectives, &agent.best_seen.objectives)
                } else {
                    !agent.best_seen.feasible && residual < agent.best_seen.residual
                };
                if replace {
                    agent.best_seen = BestSeen {
                        position: agent.position.clone(),
                        objectives: agent.objectives.clone(),
                        feasible,
                        residual,
                    };
                }
            }
            // Candidates: the achieved location plus the best distinct
            // perceived one.
            let agent = &self.agents[idx];
            if agent.feasible() || !constrained {
                candidates.push(ArchiveEntry::new(
                    agent.position.clone(),
                    ObjectiveVector(agent.objectives.clone()),
                    Origin::AgentBest,
                ));
            }
            if let Some(best) = outcome.best_accepted() {
                let sample = &outcome.samples[best];
                if sample.position != agent.position {
                    let feasible = sample.constraints.iter().all(|&r| r <= 0.0);
                    if feasible || !constrained {
                        candidates.push(ArchiveEntry::new(
                            sample.position.clone(),
                            ObjectiveVector(sample.objectives.clone()),
                            Origin::Perceived,
                        ));
                    }
                }
            }
        }

        for &idx in &mutated {
            if self.relocate(idx) {
                self.stats.mutations += 1;
            }
        }

        self.handle_collisions_and_convergence(&ranking, &mut candidates);
        let sampled = std::mem::take(&mut self.gen_samples);
        self.partition.record_samples(&sampled);
        self.gen_samples = sampled;
        self.update_archive(candidates);
        self.communicate(&ranking);

        if self.config.branch_interval > 0
            && self.stats.generations % self.config.branch_interval == 0
        {
            let members = self.front_members();
            adapt_scheme(&mut self.scheme, &self.problem.bounds, &members);
            if self
                .partition
                .select_and_branch(
                    &mut self.scheme,
                    &members,
                    self.config.selection_mode,
                    self.config.nu,
                    self.config.no_improve_threshold,
                )
                .is_some()
            {
                self.stats.branchings += 1;
            }
        }

        let feasible_agents = self
            .agents
            .iter()
            .filter(|a| a.feasible() || !constrained)
            .count();
        let nondominated = ranking.dominance.iter().filter(|&&d| d == 0).count();
        self.last_report = GenerationReport {
            generation: self.stats.generations,
            evaluations: self.budget.used,
            archive_size: self.archive.len(),
            nondominated_agents: nondominated,
            feasible_agents,
            subdomains: self.partition.subdomains().len(),
        };
    }

    fn finish(mut self) -> RunResult {
        self.stats.evaluations = self.budget.used;
        self.stats.archive_pairwise_ops += self.archive.pairwise_ops;
        self.stats.subdomain_densities = self
            .partition
            .subdomains()
            .iter()
            .map(|s| s.density)
            .collect();
        RunResult {
            archive: self.archive,
            stats: self.stats,
            partition: self.partition,
        }
    }
}

fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Runs the engine to budget exhaustion.
pub fn run(problem: &ProblemDefinition, config: &EngineConfig) -> Result<RunResult, EngineError> {
    run_with_observer(problem, config, |_| {})
}

/// Runs the engine, reporting one snapshot per generation.
pub fn run_with_observer(
    problem: &ProblemDefinition,
    config: &EngineConfig,
    mut observer: impl FnMut(&GenerationReport),
) -> Result<RunResult, EngineError> {
    config.validate(problem)?;
    let mut engine = Engine::new(problem, config);
    engine.initialize();
    while engine.budget.used < engine.budget.max {
        engine.generation();
        observer(&engine.last_report);
    }
    Ok(engine.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use std::sync::Arc;

    fn sphere_problem(n: usize) -> ProblemDefinition {
        ProblemDefinition::new(
            "sphere",
            0,
            vec![Interval { lo: -5.0, hi: 5.0 }; n],
            1,
            Arc::new(|x: &[f64]| vec![x.iter().map(|v| v * v).sum()]),
        )
    }

    #[test]
    fn task_scalar_follows_the_constraint_rule() {
        // Residual objective: sum of positive residuals.
        let f = task_scalar(
            Subpopulation::ConstraintTask,
            false,
            &[1.0],
            &[0.0],
            &[1.0],
            &[3.0],
            &[0.5, -1.0, 2.0],
        );
        assert!((f - 2.5).abs() < 1e-15);

        // Feasible sample: augmented objective equals the plain scalar.
        let clean = task_scalar(
            Subpopulation::FeasibleTask,
            false,
            &[1.0],
            &[0.0],
            &[1.0],
            &[3.0],
            &[-0.5, -1.0],
        );
        assert!((clean - 3.0).abs() < 1e-15);

        // Violating sample: the largest residual is added.
        let augmented = task_scalar(
            Subpopulation::FeasibleTask,
            false,
            &[1.0],
            &[0.0],
            &[1.0],
            &[3.0],
            &[0.5, 2.0],
        );
        assert!((augmented - 5.0).abs() < 1e-15);

        // Boundary explorers skip the augmentation.
        let explorer = task_scalar(
            Subpopulation::FeasibleTask,
            true,
            &[1.0],
            &[0.0],
            &[1.0],
            &[3.0],
            &[0.5, 2.0],
        );
        assert!((explorer - 3.0).abs() < 1e-15);
    }

    #[test]
    fn seeded_runs_are_bitwise_identical() {
        let problem = sphere_problem(4);
        let config = EngineConfig {
            population_size: 6,
            n_f: 3,
            max_evaluations: 400,
            seed: 42,
            ..EngineConfig::default()
        };
        let a = run(&problem, &config).unwrap();
        let b = run(&problem, &config).unwrap();
        assert_eq!(a.stats.evaluations, b.stats.evaluations);
        assert_eq!(a.stats.generations, b.stats.generations);
        assert_eq!(a.archive.len(), b.archive.len());
        for (ea, eb) in a.archive.entries().iter().zip(b.archive.entries()) {
            assert_eq!(ea.decision, eb.decision);
            assert_eq!(ea.objectives.0, eb.objectives.0);
        }
    }

    #[test]
    fn budget_accounting_is_exact() {
        use std::sync::atomic::{AtomicU64, Ordering};
        let calls = Arc::new(AtomicU64::new(0));
        let calls_in = Arc::clone(&calls);
        let problem = ProblemDefinition::new(
            "counted",
            0,
            vec![Interval { lo: 0.0, hi: 1.0 }; 3],
            1,
            Arc::new(move |x: &[f64]| {
                calls_in.fetch_add(1, Ordering::Relaxed);
                vec![x.iter().sum()]
            }),
        );
        let config = EngineConfig {
            population_size: 5,
            n_f: 2,
            max_evaluations: 300,
            seed: 7,
            ..EngineConfig::default()
        };
        let result = run(&problem, &config).unwrap();
        assert_eq!(result.stats.evaluations, calls.load(Ordering::Relaxed));
        assert!(
            result.stats.evaluations <= config.max_evaluations + config.population_size as u64,
            "{} evaluations exceed the budget slack",
            result.stats.evaluations
        );
    }

    #[test]
    fn sphere_converges_toward_origin() {
        let problem = sphere_problem(3);
        let config = EngineConfig {
            population_size: 8,
            n_f: 4,
            max_evaluations: 3000,
            seed: 3,
            ..EngineConfig::default()
        };
        let result = run(&problem, &config).unwrap();
        let best = result
            .archive
            .entries()
            .iter()
            .map(|e| e.objectives.0[0])
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-3, "best sphere value {best}");
    }

    #[test]
    fn positions_and_resources_stay_legal() {
        let problem = sphere_problem(4);
        let config = EngineConfig {
            population_size: 6,
            n_f: 3,
            max_evaluations: 800,
            seed: 11,
            ..EngineConfig::default()
        };
        config.validate(&problem).unwrap();
        let mut engine = Engine::new(&problem, &config);
        engine.initialize();
        for _ in 0..20 {
            if engine.budget.used >= engine.budget.max {
                break;
            }
            engine.generation();
            for agent in &engine.agents {
                assert!(problem.contains(&agent.position));
                assert!((1..=problem.n()).contains(&agent.resources));
            }
        }
    }

    #[test]
    fn integer_components_stay_integral() {
        let problem = ProblemDefinition::new(
            "mixed",
            1,
            vec![
                Interval { lo: 1.0, hi: 4.0 },
                Interval { lo: 0.0, hi: 1.0 },
            ],
            1,
            Arc::new(|x: &[f64]| vec![x[1] + (x[0] - 2.0).abs()]),
        );
        let config = EngineConfig {
            population_size: 5,
            n_f: 3,
            max_evaluations: 400,
            seed: 13,
            ..EngineConfig::default()
        };
        let result = run(&problem, &config).unwrap();
        for entry in result.archive.entries() {
            assert_eq!(entry.decision[0].fract(), 0.0, "integer component drifted");
        }
    }

    #[test]
    fn rejects_zero_population() {
        let problem = sphere_problem(2);
        let config = EngineConfig {
            population_size: 0,
            ..EngineConfig::default()
        };
        assert!(matches!(
            run(&problem, &config),
            Err(EngineError::EmptyPopulation)
        ));
    }

    #[test]
    fn tiny_budget_flags_incomplete() {
        let problem = sphere_problem(2);
        let config = EngineConfig {
            population_size: 10,
            n_f: 5,
            max_evaluations: 5,
            seed: 1,
            ..EngineConfig::default()
        };
        let result = run(&problem, &config).unwrap();
        assert!(result.stats.incomplete);
    }
}
