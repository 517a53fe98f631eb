//! Genetic algorithm over combined assignment + bandwidth chromosomes.
//!
//! Each generation pairs random fathers and mothers, splices them at a random
//! point, repairs every node's bandwidth sum back to B_v, mutates, and keeps
//! the best `population_size` of parents and children.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evo::PenaltySpec;
use crate::num::Scalar;
use crate::problem::{Evaluator, ObjectiveKind, Scenario, Solution};
use crate::report::{self, CurvePoint, SolverReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gene {
    pub node: usize,
    pub bandwidth: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chromosome<T = f64> {
    pub genes: Vec<Gene>,
    pub cached_fitness: Option<T>,
}

impl<T: Scalar> Chromosome<T> {
    pub fn from_solution(solution: &Solution) -> Self {
        Self {
            genes: solution
                .assignment
                .iter()
                .zip(&solution.bandwidth)
                .map(|(&node, &bandwidth)| Gene { node, bandwidth })
                .collect(),
            cached_fitness: None,
        }
    }

    pub fn to_solution(&self) -> Solution {
        Solution::new(
            self.genes.iter().map(|g| g.node).collect(),
            self.genes.iter().map(|g| g.bandwidth).collect(),
        )
    }

    pub fn bandwidths(&self) -> Vec<u32> {
        self.genes.iter().map(|g| g.bandwidth).collect()
    }

    fn group(&self, node: usize) -> Vec<usize> {
        (0..self.genes.len()).filter(|&k| self.genes[k].node == node).collect()
    }
}

/// Mutation branch boundaries for the uniform draw μ ∈ (0, 1).
///
/// μ ≥ `rotate_from` rotates, μ ≤ min(`idle_above`, `balance_up_to`)
/// balances, anything else leaves the bandwidth genes alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationThresholds {
    pub idle_above: f64,
    pub balance_up_to: f64,
    pub rotate_from: f64,
}

impl Default for MutationThresholds {
    fn default() -> Self {
        Self {
            idle_above: 0.3,
            balance_up_to: 0.5,
            rotate_from: 0.75,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationBranch {
    Balance,
    Idle,
    Rotate,
}

impl MutationThresholds {
    pub fn branch(&self, mu: f64) -> MutationBranch {
        if mu >= self.rotate_from {
            MutationBranch::Rotate
        } else if mu <= self.idle_above.min(self.balance_up_to) {
            MutationBranch::Balance
        } else {
            MutationBranch::Idle
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub generation_budget: u64,
    pub thresholds: MutationThresholds,
    /// Chance that a child moves one random request to another node.
    pub flip_probability: f64,
    /// Seconds of penalty per MHz of compute overload.
    pub penalty_weight: f64,
    pub objective: ObjectiveKind,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 50,
            generation_budget: 100,
            thresholds: MutationThresholds::default(),
            flip_probability: 0.1,
            penalty_weight: 10.0,
            objective: ObjectiveKind::Total,
            seed: 0,
        }
    }
}

impl GaParams {
    /// Generations needed so that the initial population plus all children
    /// costs `evaluations` objective evaluations (rounded down, at least 0).
    pub fn generations_for(population_size: usize, evaluations: u64) -> u64 {
        let p = population_size.max(1) as u64;
        evaluations.saturating_sub(p) / p
    }

    pub fn with_evaluation_budget(mut self, evaluations: u64) -> Self {
        self.generation_budget = Self::generations_for(self.population_size, evaluations);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
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

/// Uniform random split of `total` MHz into `parts` whole-MHz shares, each ≥ 1.
pub(crate) fn random_composition<R: Rng>(rng: &mut R, total: u32, parts: usize) -> Vec<u32> {
    debug_assert!(parts >= 1 && parts as u32 <= total);
    let mut cuts: Vec<u32> = sample(rng, total as usize - 1, parts - 1)
        .into_iter()
        .map(|c| c as u32 + 1)
        .collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(total - prev);
    out
}

const INIT_ATTEMPTS: usize = 64;

/// Random solution whose bandwidth sums match every B_v exactly. Compute
/// capacity is respected when a few dozen uniform draws find such an
/// assignment; otherwise the first draw that fits the bandwidth is used.
pub(crate) fn random_solution<T: Scalar, R: Rng>(
    scenario: &Scenario<T>,
    rng: &mut R,
) -> Result<Solution> {
    let n = scenario.request_count();
    let v = scenario.node_count();
    let fits_bandwidth = |a: &[usize]| {
        let mut counts = vec![0u32; v];
        a.iter().for_each(|&node| counts[node] += 1);
        counts
            .iter()
            .zip(&scenario.nodes)
            .all(|(&c, node)| c <= node.bandwidth_capacity)
    };
    let fits_compute = |a: &[usize]| {
        let mut load = vec![T::zero(); v];
        a.iter()
            .enumerate()
            .for_each(|(k, &node)| load[node] += scenario.requests[k].demand);
        load.iter()
            .zip(&scenario.nodes)
            .all(|(&l, node)| l <= node.compute_capacity)
    };

    let mut fallback = None;
    let mut chosen = None;
    for _ in 0..INIT_ATTEMPTS {
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..v)).collect();
        if !fits_bandwidth(&a) {
            continue;
        }
        if fits_compute(&a) {
            chosen = Some(a);
            break;
        }
        fallback.get_or_insert(a);
    }
    let assignment = match chosen.or(fallback) {
        Some(a) => a,
        None => {
            // Fill nodes in order up to one request per MHz.
            let mut a = Vec::with_capacity(n);
            let mut node = 0;
            let mut used = 0u32;
            for _ in 0..n {
                while node < v && used >= scenario.nodes[node].bandwidth_capacity {
                    node += 1;
                    used = 0;
                }
                if node == v {
                    return Err(Error::RepairInfeasible {
                        node: v - 1,
                        assigned: n,
                        capacity: scenario.nodes.iter().map(|x| x.bandwidth_capacity).sum(),
                    });
                }
                a.push(node);
                used += 1;
            }
            a
        }
    };

    let mut bandwidth = vec![0u32; n];
    for node in 0..v {
        let members: Vec<usize> = (0..n).filter(|&k| assignment[k] == node).collect();
        if members.is_empty() {
            continue;
        }
        let split = random_composition(rng, scenario.nodes[node].bandwidth_capacity, members.len());
        for (k, b) in members.into_iter().zip(split) {
            bandwidth[k] = b;
        }
    }
    Ok(Solution::new(assignment, bandwidth))
}

pub fn init_population<T: Scalar, R: Rng>(
    scenario: &Scenario<T>,
    params: &GaParams,
    rng: &mut R,
) -> Result<Vec<Chromosome<T>>> {
    (0..params.population_size)
        .map(|_| {
            let sol = random_solution(scenario, rng)?;
            repair_bandwidth(Chromosome::from_solution(&sol), scenario, rng)
        })
        .collect()
}

/// Father's first `splice` genes followed by the mother's remaining ones.
pub fn crossover<T: Scalar>(father: &Chromosome<T>, mother: &Chromosome<T>, splice: usize) -> Chromosome<T> {
    assert_eq!(father.genes.len(), mother.genes.len(), "parents differ in length");
    assert!(
        splice >= 1 && splice < father.genes.len(),
        "splice point {splice} outside [1, {})",
        father.genes.len()
    );
    let mut genes = Vec::with_capacity(father.genes.len());
    genes.extend_from_slice(&father.genes[..splice]);
    genes.extend_from_slice(&mother.genes[splice..]);
    Chromosome {
        genes,
        cached_fitness: None,
    }
}

/// Forces each node's bandwidth sum to B_v with random ±1 unit steps on genes
/// assigned to that node. Genes at 0 MHz are first lifted to 1.
pub fn repair_bandwidth<T: Scalar, R: Rng>(
    mut child: Chromosome<T>,
    scenario: &Scenario<T>,
    rng: &mut R,
) -> Result<Chromosome<T>> {
    let mut changed = false;
    for g in child.genes.iter_mut().filter(|g| g.bandwidth == 0) {
        g.bandwidth = 1;
        changed = true;
    }
    for (node, spec) in scenario.nodes.iter().enumerate() {
        let members = child.group(node);
        if members.is_empty() {
            continue;
        }
        let capacity = spec.bandwidth_capacity;
        if members.len() as u64 > capacity as u64 {
            return Err(Error::RepairInfeasible {
                node,
                assigned: members.len(),
                capacity,
            });
        }
        let sum: i64 = members.iter().map(|&k| child.genes[k].bandwidth as i64).sum();
        let mut delta = sum - capacity as i64;
        changed |= delta != 0;
        while delta > 0 {
            let k = members[rng.gen_range(0..members.len())];
            if child.genes[k].bandwidth > 1 {
                child.genes[k].bandwidth -= 1;
                delta -= 1;
            }
        }
        while delta < 0 {
            let k = members[rng.gen_range(0..members.len())];
            child.genes[k].bandwidth += 1;
            delta += 1;
        }
    }
    if changed {
        child.cached_fitness = None;
    }
    Ok(child)
}

fn rotate_group<T: Scalar>(c: &mut Chromosome<T>, members: &[usize]) {
    if members.len() < 2 {
        return;
    }
    let first = c.genes[members[0]].bandwidth;
    for w in members.windows(2) {
        c.genes[w[0]].bandwidth = c.genes[w[1]].bandwidth;
    }
    c.genes[*members.last().unwrap()].bandwidth = first;
}

fn balance_group<T: Scalar>(c: &mut Chromosome<T>, members: &[usize]) {
    let mut hi = None::<usize>;
    let mut lo = None::<usize>;
    for &k in members {
        let b = c.genes[k].bandwidth;
        if hi.is_none_or(|h| b > c.genes[h].bandwidth) {
            hi = Some(k);
        }
        if lo.is_none_or(|l| b < c.genes[l].bandwidth) {
            lo = Some(k);
        }
    }
    if let (Some(h), Some(l)) = (hi, lo) {
        if h != l {
            c.genes[h].bandwidth -= 1;
            c.genes[l].bandwidth += 1;
        }
    }
}

/// Applies the μ-selected bandwidth mutation within every node's gene group,
/// then with `params.flip_probability` moves one request to another node and
/// repairs the affected bandwidth sums.
pub fn mutate<T: Scalar, R: Rng>(
    mut child: Chromosome<T>,
    mu: f64,
    scenario: &Scenario<T>,
    params: &GaParams,
    rng: &mut R,
) -> Result<Chromosome<T>> {
    let branch = params.thresholds.branch(mu);
    if branch != MutationBranch::Idle {
        for node in 0..scenario.node_count() {
            let members = child.group(node);
            match branch {
                MutationBranch::Rotate => rotate_group(&mut child, &members),
                MutationBranch::Balance => balance_group(&mut child, &members),
                MutationBranch::Idle => {}
            }
        }
        child.cached_fitness = None;
    }
    let v = scenario.node_count();
    if v > 1 && params.flip_probability > 0.0 && rng.gen_bool(params.flip_probability) {
        let k = rng.gen_range(0..child.genes.len());
        let mut target = rng.gen_range(0..v - 1);
        if target >= child.genes[k].node {
            target += 1;
        }
        let load = child.genes.iter().filter(|g| g.node == target).count() as u32;
        if load < scenario.nodes[target].bandwidth_capacity {
            child.genes[k].node = target;
            child.cached_fitness = None;
            child = repair_bandwidth(child, scenario, rng)?;
        }
    }
    Ok(child)
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let mu: f64 = rng.gen();
        if mu > 0.0 {
            return mu;
        }
    }
}

struct Tracker<T: Scalar> {
    best: Option<(Solution, T)>,
}

impl<T: Scalar> Tracker<T> {
    fn offer(&mut self, eval: &Evaluator<'_, T>, spec: &PenaltySpec<T>, c: &Chromosome<T>) -> Result<T> {
        let sol = c.to_solution();
        let (fitness, objective, feasible) = spec.assess(eval, &sol)?;
        if feasible && self.best.as_ref().is_none_or(|(_, b)| objective < *b) {
            self.best = Some((sol, objective));
        }
        Ok(fitness)
    }
}

pub fn solve_ga<T: Scalar>(scenario: &Scenario<T>, params: &GaParams) -> Result<SolverReport<T>> {
    params.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let eval = Evaluator::new(scenario)?;
    let spec = PenaltySpec::for_scenario(scenario, T::lit(params.penalty_weight), params.objective);
    let n = scenario.request_count();
    let mut tracker = Tracker { best: None };
    let mut evaluations = 0u64;
    let mut curve: Vec<CurvePoint<T>> = Vec::new();

    let mut population = init_population(scenario, params, &mut rng)?;
    for c in population.iter_mut() {
        c.cached_fitness = Some(tracker.offer(&eval, &spec, c)?);
        evaluations += 1;
    }
    let by_fitness = |a: &Chromosome<T>, b: &Chromosome<T>| {
        a.cached_fitness.unwrap().to_f64_lossy().total_cmp(&b.cached_fitness.unwrap().to_f64_lossy())
    };
    population.sort_by(by_fitness);
    report::record_improvement(&mut curve, evaluations, population[0].cached_fitness.unwrap());

    let size = params.population_size;
    for _ in 0..params.generation_budget {
        let mut children = Vec::with_capacity(size);
        for _ in 0..size {
            let f = rng.gen_range(0..size);
            let mut m = rng.gen_range(0..size - 1);
            if m >= f {
                m += 1;
            }
            let child = if n >= 2 {
                crossover(&population[f], &population[m], rng.gen_range(1..n))
            } else {
                population[f].clone()
            };
            let child = match repair_bandwidth(child, scenario, &mut rng) {
                Ok(c) => c,
                Err(Error::RepairInfeasible { .. }) => continue,
                Err(e) => return Err(e),
            };
            let mu = open_unit(&mut rng);
            let mut child = match mutate(child, mu, scenario, params, &mut rng) {
                Ok(c) => c,
                Err(Error::RepairInfeasible { .. }) => continue,
                Err(e) => return Err(e),
            };
            child.cached_fitness = Some(tracker.offer(&eval, &spec, &child)?);
            evaluations += 1;
            children.push(child);
        }
        population.extend(children);
        population.sort_by(by_fitness);
        population.truncate(size);
        report::record_improvement(&mut curve, evaluations, population[0].cached_fitness.unwrap());
    }
    report::close_curve(&mut curve, evaluations);

    let (solution, objective) = tracker.best.ok_or(Error::NoFeasibleSolution)?;
    let delays = eval.evaluate(&solution)?;
    Ok(SolverReport {
        solver: "ga".into(),
        kind: params.objective,
        solution,
        objective,
        delays,
        evaluations,
        generations: Some(params.generation_budget),
        wall_time_s: start.elapsed().as_secs_f64(),
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::fixtures::scenario;
    use crate::problem::check_feasibility;
    use crate::scengen::{generate, GenConfig};

    fn chromo(nodes: &[usize], bw: &[u32]) -> Chromosome<f64> {
        Chromosome::from_solution(&Solution::new(nodes.to_vec(), bw.to_vec()))
    }

    fn one_node(b: u32) -> Scenario<f64> {
        scenario(&[(b, 1000.0)], &[(10.0, 10.0, &[40.0]), (20.0, 10.0, &[50.0]), (30.0, 10.0, &[60.0])])
    }

    #[test]
    fn splice_example() {
        let f = chromo(&[0, 0, 0], &[3, 2, 5]);
        let m = chromo(&[0, 0, 0], &[1, 4, 5]);
        assert_eq!(crossover(&f, &m, 1).bandwidths(), vec![3, 4, 5]);
        assert_eq!(crossover(&f, &f, 2), f);
        assert_eq!(crossover(&m, &m, 1).genes, m.genes);
    }

    #[test]
    fn crossover_carries_nodes_with_bandwidth() {
        let f = chromo(&[0, 1, 0], &[3, 2, 5]);
        let m = chromo(&[1, 0, 1], &[1, 4, 5]);
        let c = crossover(&f, &m, 2);
        assert_eq!(c.to_solution(), Solution::new(vec![0, 1, 1], vec![3, 2, 5]));
    }

    #[test]
    #[should_panic]
    fn crossover_rejects_edge_splice() {
        let f = chromo(&[0, 0, 0], &[3, 2, 5]);
        crossover(&f, &f, 3);
    }

    #[test]
    fn repair_removes_surplus() {
        let s = one_node(10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = repair_bandwidth(chromo(&[0, 0, 0], &[3, 4, 5]), &s, &mut rng).unwrap();
        assert_eq!(c.bandwidths().iter().sum::<u32>(), 10);
        assert!(c.bandwidths().iter().zip([3, 4, 5]).all(|(&a, b)| a <= b));
        // Same seed, same outcome.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let again = repair_bandwidth(chromo(&[0, 0, 0], &[3, 4, 5]), &s, &mut rng).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn repair_fills_deficit_and_lifts_zeros() {
        let s = one_node(10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = repair_bandwidth(chromo(&[0, 0, 0], &[0, 1, 2]), &s, &mut rng).unwrap();
        assert_eq!(c.bandwidths().iter().sum::<u32>(), 10);
        assert!(c.bandwidths().iter().all(|&b| b >= 1));
    }

    #[test]
    fn repair_is_identity_on_balanced_chromosomes() {
        let s = one_node(10);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = chromo(&[0, 0, 0], &[2, 3, 5]);
        let r = repair_bandwidth(c.clone(), &s, &mut rng).unwrap();
        assert_eq!(r, c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let once = repair_bandwidth(chromo(&[0, 0, 0], &[9, 9, 9]), &s, &mut rng).unwrap();
        let twice = repair_bandwidth(once.clone(), &s, &mut rng).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn repair_rejects_overcrowded_node() {
        let s = one_node(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            repair_bandwidth(chromo(&[0, 0, 0], &[1, 1, 1]), &s, &mut rng),
            Err(Error::RepairInfeasible { node: 0, assigned: 3, capacity: 2 })
        ));
    }

    #[test]
    fn mutation_branches() {
        let s = one_node(12);
        let params = GaParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = chromo(&[0, 0, 0], &[4, 2, 6]);
        let rot = mutate(c.clone(), 0.8, &s, &params, &mut rng).unwrap();
        assert_eq!(rot.bandwidths(), vec![2, 6, 4]);
        let bal = mutate(c.clone(), 0.2, &s, &params, &mut rng).unwrap();
        assert_eq!(bal.bandwidths(), vec![4, 3, 5]);
        let idle = mutate(c.clone(), 0.5, &s, &params, &mut rng).unwrap();
        assert_eq!(idle.bandwidths(), vec![4, 2, 6]);
        assert_eq!(params.thresholds.branch(0.3), MutationBranch::Balance);
        assert_eq!(params.thresholds.branch(0.31), MutationBranch::Idle);
        assert_eq!(params.thresholds.branch(0.75), MutationBranch::Rotate);
    }

    #[test]
    fn balance_ties_use_lowest_index() {
        let s = one_node(12);
        let params = GaParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = mutate(chromo(&[0, 0, 0], &[5, 1, 5]), 0.1, &s, &params, &mut rng).unwrap();
        assert_eq!(c.bandwidths(), vec![4, 2, 5]);
        let flat = mutate(chromo(&[0, 0, 0], &[4, 4, 4]), 0.1, &s, &params, &mut rng).unwrap();
        assert_eq!(flat.bandwidths(), vec![4, 4, 4]);
    }

    #[test]
    fn mutation_works_per_node_group() {
        let s = scenario(
            &[(10, 1000.0), (10, 1000.0)],
            &[(10.0, 10.0, &[40.0, 40.0]), (10.0, 10.0, &[40.0, 40.0]), (10.0, 10.0, &[40.0, 40.0]), (10.0, 10.0, &[40.0, 40.0])],
        );
        let params = GaParams {
            flip_probability: 0.0,
            ..GaParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = chromo(&[0, 1, 0, 1], &[3, 1, 7, 9]);
        let rot = mutate(c.clone(), 0.9, &s, &params, &mut rng).unwrap();
        assert_eq!(rot.bandwidths(), vec![7, 9, 3, 1]);
        let bal = mutate(c, 0.1, &s, &params, &mut rng).unwrap();
        assert_eq!(bal.bandwidths(), vec![4, 2, 6, 8]);
    }

    #[test]
    fn population_is_seeded_and_balanced() {
        let s: Scenario = generate(&GenConfig::default().with_seed(4)).unwrap();
        let params = GaParams::default();
        let a = init_population(&s, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = init_population(&s, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        for c in &a {
            let sol = c.to_solution();
            let (bw, _) = crate::problem::node_loads(&s, &sol);
            assert!(bw.iter().all(|&x| x == 100));
        }
        let two = GaParams {
            population_size: 2,
            ..GaParams::default()
        };
        assert_eq!(init_population(&s, &two, &mut ChaCha8Rng::seed_from_u64(1)).unwrap().len(), 2);
    }

    #[test]
    fn random_compositions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (total, parts) in [(1u32, 1usize), (5, 5), (100, 10), (7, 3)] {
            let c = random_composition(&mut rng, total, parts);
            assert_eq!(c.len(), parts);
            assert_eq!(c.iter().sum::<u32>(), total);
            assert!(c.iter().all(|&b| b >= 1));
        }
    }

    #[test]
    fn zero_generations_returns_initial_best() {
        let s: Scenario = generate(&GenConfig::default().with_seed(8)).unwrap();
        let params = GaParams {
            generation_budget: 0,
            seed: 3,
            ..GaParams::default()
        };
        let r = solve_ga(&s, &params).unwrap();
        assert_eq!(r.evaluations, 50);
        let pop = init_population(&s, &params, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let eval = Evaluator::new(&s).unwrap();
        let best = pop
            .iter()
            .map(|c| c.to_solution())
            .filter(|sol| check_feasibility(&s, sol).is_empty())
            .map(|sol| eval.objective(&sol, ObjectiveKind::Total).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.objective, best);
    }

    #[test]
    fn run_is_deterministic_monotone_and_feasible() {
        let s: Scenario = generate(&GenConfig::default().with_seed(5)).unwrap();
        let params = GaParams {
            seed: 9,
            ..GaParams::default()
        }
        .with_evaluation_budget(3000);
        let a = solve_ga(&s, &params).unwrap();
        let b = solve_ga(&s, &params).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.curve, b.curve);
        assert!(a.curve.windows(2).all(|w| w[1].best <= w[0].best));
        assert!(check_feasibility(&s, &a.solution).is_empty());
        assert_eq!(a.evaluations, 3000);
        assert_eq!(a.objective, a.delays.sum_total);
    }

    #[test]
    fn budget_conversion() {
        assert_eq!(GaParams::generations_for(50, 5000), 99);
        assert_eq!(GaParams::generations_for(50, 50_000), 999);
        assert_eq!(GaParams::generations_for(50, 10), 0);
    }
}
