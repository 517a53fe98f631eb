//! Penalty-constrained archive sampler for the mixed-integer problem.
//!
//! Constraints are encoded as a G vector: one equality per node for the
//! bandwidth sum (Σ b − B_v = 0) followed by one inequality per node for the
//! compute budget (C_v − Σ c ≥ 0). Candidates are drawn by perturbing archive
//! members chosen with rank-linear weights; bandwidth moves shrink from B_v/4
//! to 1 MHz as the budget is spent.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::random_solution;
use crate::num::Scalar;
use crate::problem::{apportion, Evaluator, ObjectiveKind, Scenario, Solution};
use crate::report::{self, CurvePoint, SolverReport};

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltySpec<T = f64> {
    pub equality: Vec<usize>,
    pub inequality: Vec<usize>,
    /// Seconds added per unit of violation.
    pub weight: T,
    pub objective: ObjectiveKind,
}

impl<T: Scalar> PenaltySpec<T> {
    pub fn for_scenario(scenario: &Scenario<T>, weight: T, objective: ObjectiveKind) -> Self {
        let v = scenario.node_count();
        Self {
            equality: (0..v).collect(),
            inequality: (v..2 * v).collect(),
            weight,
            objective,
        }
    }

    /// Total violation of a G vector.
    pub fn violation(&self, g: &[T]) -> T {
        let eq: T = self.equality.iter().map(|&i| g[i].abs()).sum();
        let ineq: T = self.inequality.iter().map(|&i| (-g[i]).max(T::zero())).sum();
        eq + ineq
    }

    /// (penalized fitness, raw objective, feasible).
    pub fn assess(&self, eval: &Evaluator<'_, T>, solution: &Solution) -> Result<(T, T, bool)> {
        let objective = eval.objective(solution, self.objective)?;
        let violation = self.violation(&internal_constraints(eval.scenario(), solution));
        Ok((objective + self.weight * violation, objective, violation == T::zero()))
    }
}

/// G vector: bandwidth-sum equalities then compute-capacity inequalities.
pub fn internal_constraints<T: Scalar>(scenario: &Scenario<T>, solution: &Solution) -> Vec<T> {
    let (bw, cpu) = crate::problem::node_loads(scenario, solution);
    let mut g = Vec::with_capacity(2 * scenario.node_count());
    for (v, node) in scenario.nodes.iter().enumerate() {
        g.push(T::lit(bw[v] as f64 - node.bandwidth_capacity as f64));
    }
    for (v, node) in scenario.nodes.iter().enumerate() {
        g.push(node.compute_capacity - cpu[v]);
    }
    g
}

pub fn penalized_fitness<T: Scalar>(
    scenario: &Scenario<T>,
    solution: &Solution,
    spec: &PenaltySpec<T>,
) -> Result<T> {
    Ok(spec.assess(&Evaluator::new(scenario)?, solution)?.0)
}

/// Fixed-capacity pool of distinct solutions sorted by ascending fitness.
#[derive(Clone, Debug)]
pub struct Archive<T = f64> {
    capacity: usize,
    entries: Vec<(Solution, T)>,
}

impl<T: Scalar> Archive<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 2, "archive capacity must be at least 2");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity + 1),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Solution, T)] {
        &self.entries
    }

    pub fn best(&self) -> Option<&(Solution, T)> {
        self.entries.first()
    }

    /// Inserts unless the archive is full of better solutions or already holds
    /// this exact solution. Returns whether the archive changed.
    pub fn insert(&mut self, solution: Solution, fitness: T) -> bool {
        if self.entries.len() == self.capacity
            && !(fitness < self.entries[self.capacity - 1].1)
        {
            return false;
        }
        if self.entries.iter().any(|(s, _)| *s == solution) {
            return false;
        }
        let at = self.entries.partition_point(|(_, f)| *f <= fitness);
        self.entries.insert(at, (solution, fitness));
        self.entries.truncate(self.capacity);
        true
    }

    /// Index drawn with weight `len - rank`.
    pub fn sample_rank<R: Rng>(&self, rng: &mut R) -> usize {
        let n = self.entries.len();
        let mut ticket = rng.gen_range(0..n * (n + 1) / 2);
        for rank in 0..n {
            let w = n - rank;
            if ticket < w {
                return rank;
            }
            ticket -= w;
        }
        n - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvoParams {
    pub budget: u64,
    pub archive_capacity: usize,
    pub penalty_weight: f64,
    /// Chance that a candidate moves one request to another node.
    pub flip_probability: f64,
    pub objective: ObjectiveKind,
    pub seed: u64,
}

impl Default for EvoParams {
    fn default() -> Self {
        Self {
            budget: 5000,
            archive_capacity: 20,
            penalty_weight: 10.0,
            flip_probability: 0.3,
            objective: ObjectiveKind::Total,
            seed: 0,
        }
    }
}

impl EvoParams {
    pub fn new(budget: u64, seed: u64) -> Self {
        Self {
            budget,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.archive_capacity < 2 {
            return Err(Error::Config("archive_capacity must be at least 2".into()));
        }
        if self.budget < self.archive_capacity as u64 {
            return Err(Error::Config(format!(
                "budget {} is smaller than the archive capacity {}",
                self.budget, self.archive_capacity
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(Error::Config("flip_probability must lie in [0, 1]".into()));
        }
        if !(self.penalty_weight >= 0.0) {
            return Err(Error::Config("penalty_weight must be non-negative".into()));
        }
        Ok(())
    }
}

/// Largest bandwidth move for a node at the given fraction of the budget.
pub fn step_size(capacity: u32, progress: f64) -> u32 {
    let start = capacity as f64 / 4.0;
    let step = start + (1.0 - start) * progress.clamp(0.0, 1.0);
    (step.round() as u32).max(1)
}

fn perturb<T: Scalar, R: Rng>(
    base: &Solution,
    scenario: &Scenario<T>,
    params: &EvoParams,
    progress: f64,
    rng: &mut R,
) -> Result<Solution> {
    let mut sol = base.clone();
    let n = sol.len();
    let v = scenario.node_count();

    if v > 1 && rng.gen_bool(params.flip_probability) {
        let k = rng.gen_range(0..n);
        let source = sol.assignment[k];
        let partners: Vec<usize> = (0..n).filter(|&j| sol.assignment[j] != source).collect();
        if !partners.is_empty() && rng.gen_bool(0.5) {
            // Exchange nodes with a request elsewhere; node counts are unchanged.
            let j = partners[rng.gen_range(0..partners.len())];
            let target = sol.assignment[j];
            sol.assignment.swap(k, j);
            for node in [source, target] {
                rescale_node(&mut sol, scenario, node);
            }
        } else {
            let mut target = rng.gen_range(0..v - 1);
            if target >= source {
                target += 1;
            }
            let load = sol.assignment.iter().filter(|&&a| a == target).count() as u32;
            if load < scenario.nodes[target].bandwidth_capacity {
                sol.assignment[k] = target;
                // The moved request keeps its share; both nodes are rescaled to
                // their budgets so the other allocations keep their proportions.
                for node in [source, target] {
                    rescale_node(&mut sol, scenario, node);
                }
            }
        }
    }

    // Transfer bandwidth between two requests sharing a node.
    let moves = if rng.gen_bool(0.5) { 1 } else { 2 };
    for _ in 0..moves {
        let from = rng.gen_range(0..n);
        let node = sol.assignment[from];
        let peers: Vec<usize> = (0..n).filter(|&k| k != from && sol.assignment[k] == node).collect();
        if peers.is_empty() || sol.bandwidth[from] <= 1 {
            continue;
        }
        let to = peers[rng.gen_range(0..peers.len())];
        let cap = step_size(scenario.nodes[node].bandwidth_capacity, progress);
        let amount = rng.gen_range(1..=cap).min(sol.bandwidth[from] - 1);
        sol.bandwidth[from] -= amount;
        sol.bandwidth[to] += amount;
    }

    Ok(sol)
}

/// Proportional repair of one node's bandwidth sum.
fn rescale_node<T: Scalar>(sol: &mut Solution, scenario: &Scenario<T>, node: usize) {
    let members = sol.members(node);
    let weights: Vec<f64> = members.iter().map(|&k| sol.bandwidth[k] as f64).collect();
    if let Some(split) = apportion(&weights, scenario.nodes[node].bandwidth_capacity) {
        for (k, b) in members.into_iter().zip(split) {
            sol.bandwidth[k] = b;
        }
    }
}

pub fn solve_evo<T: Scalar>(scenario: &Scenario<T>, params: &EvoParams) -> Result<SolverReport<T>> {
    params.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let eval = Evaluator::new(scenario)?;
    let spec = PenaltySpec::for_scenario(scenario, T::lit(params.penalty_weight), params.objective);
    let mut archive = Archive::new(params.archive_capacity);
    let mut best: Option<(Solution, T)> = None;
    let mut curve: Vec<CurvePoint<T>> = Vec::new();
    let mut evaluations = 0u64;
    let mut best_fitness = T::infinity();

    let mut consider = |sol: Solution,
                        archive: &mut Archive<T>,
                        evaluations: &mut u64,
                        curve: &mut Vec<CurvePoint<T>>|
     -> Result<()> {
        let (fitness, objective, feasible) = spec.assess(&eval, &sol)?;
        *evaluations += 1;
        if feasible && best.as_ref().is_none_or(|(_, b)| objective < *b) {
            best = Some((sol.clone(), objective));
        }
        if fitness < best_fitness {
            best_fitness = fitness;
            report::record_improvement(curve, *evaluations, fitness);
        }
        archive.insert(sol, fitness);
        Ok(())
    };

    for _ in 0..params.archive_capacity {
        let sol = random_solution(scenario, &mut rng)?;
        consider(sol, &mut archive, &mut evaluations, &mut curve)?;
    }
    while evaluations < params.budget {
        let progress = evaluations as f64 / params.budget as f64;
        let parent = &archive.entries()[archive.sample_rank(&mut rng)].0;
        let candidate = perturb(parent, scenario, params, progress, &mut rng)?;
        consider(candidate, &mut archive, &mut evaluations, &mut curve)?;
    }
    report::close_curve(&mut curve, evaluations);

    let (solution, objective) = best.ok_or(Error::NoFeasibleSolution)?;
    let delays = eval.evaluate(&solution)?;
    Ok(SolverReport {
        solver: "evo".into(),
        kind: params.objective,
        solution,
        objective,
        delays,
        evaluations,
        generations: None,
        wall_time_s: start.elapsed().as_secs_f64(),
        curve,
    })
}
