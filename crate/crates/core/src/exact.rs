//! Exhaustive optimum for small instances.
//!
//! Enumerates every node assignment and, per node, every integer composition of
//! the node's bandwidth over its requests. Using the whole band is never worse
//! because each request's rate grows with its bandwidth, so compositions are
//! restricted to those summing to exactly B_v.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::{Evaluator, ObjectiveKind, Scenario, Solution};
use crate::report::SolverReport;

pub const MAX_ASSIGNMENTS: u64 = 1_000_000;
pub const MAX_COMPOSITIONS: u64 = 1_000_000;

/// Relative gap under which two objective values are treated as equal.
const TIE_RTOL: f64 = 1e-12;

fn is_tie<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(TIE_RTOL) * a.abs().max(b.abs())
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// Number of ways to split `bandwidth` whole MHz over `parts` requests, each
/// getting at least 1.
pub fn composition_count(bandwidth: u32, parts: usize) -> u64 {
    match parts {
        0 => u64::from(bandwidth == 0),
        _ if parts as u64 > bandwidth as u64 => 0,
        _ => binomial(bandwidth as u64 - 1, parts as u64 - 1),
    }
}

struct SplitSearch<'e, T: Scalar> {
    members: &'e [usize],
    kind: ObjectiveKind,
    /// `table[i][b - 1]`: delay of member `i` with `b` MHz.
    table: Vec<Vec<T>>,
    current: Vec<u32>,
    best: Option<(Vec<u32>, T)>,
}

impl<T: Scalar> SplitSearch<'_, T> {
    fn recurse(&mut self, i: usize, remaining: u32, acc: T) {
        let m = self.members.len();
        if i + 1 == m {
            self.current[i] = remaining;
            let value = self.kind.accumulate(acc, self.table[i][remaining as usize - 1]);
            // Ascending lexicographic enumeration: replacing on ties leaves the
            // lexicographically largest split, so lower ids take extra units.
            let replace = match &self.best {
                None => true,
                Some((_, best)) => value < *best || is_tie(value, *best),
            };
            if replace {
                self.best = Some((self.current.clone(), value));
            }
            return;
        }
        let reserve = (m - i - 1) as u32;
        for b in 1..=remaining - reserve {
            self.current[i] = b;
            let next = self.kind.accumulate(acc, self.table[i][b as usize - 1]);
            self.recurse(i + 1, remaining - b, next);
        }
    }
}

/// Best whole-MHz split of `bandwidth` over `members` (request ids) at `node`,
/// minimising the node-local objective. Ties go to the split that gives more
/// bandwidth to lower ids.
pub fn optimal_bandwidth_split<T: Scalar>(
    eval: &Evaluator<'_, T>,
    node: usize,
    members: &[usize],
    bandwidth: u32,
    kind: ObjectiveKind,
) -> Result<(Vec<u32>, T)> {
    if members.is_empty() {
        return Ok((Vec::new(), T::zero()));
    }
    if members.len() as u64 > bandwidth as u64 {
        return Err(Error::InfeasibleInstance(format!(
            "{} requests cannot share {bandwidth} MHz at node {node}",
            members.len()
        )));
    }
    let count = composition_count(bandwidth, members.len());
    if count > MAX_COMPOSITIONS {
        return Err(Error::InstanceTooLarge(format!(
            "{count} bandwidth splits at node {node}"
        )));
    }
    let max_b = bandwidth - (members.len() as u32 - 1);
    let table = members
        .iter()
        .map(|&k| {
            (1..=max_b)
                .map(|b| eval.request_total(k, node, b))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut search = SplitSearch {
        members,
        kind,
        table,
        current: vec![0; members.len()],
        best: None,
    };
    search.recurse(0, bandwidth, T::zero());
    Ok(search.best.expect("at least one composition exists"))
}

fn check_guards<T: Scalar>(scenario: &Scenario<T>) -> Result<()> {
    let v = scenario.node_count() as u64;
    let k = scenario.request_count() as u32;
    let assignments = v.checked_pow(k).unwrap_or(u64::MAX);
    if assignments > MAX_ASSIGNMENTS {
        return Err(Error::InstanceTooLarge(format!(
            "{v}^{k} assignments exceed {MAX_ASSIGNMENTS}"
        )));
    }
    for node in &scenario.nodes {
        let b = node.bandwidth_capacity;
        let worst = (1..=scenario.request_count().min(b as usize))
            .map(|m| composition_count(b, m))
            .max()
            .unwrap_or(0);
        if worst > MAX_COMPOSITIONS {
            return Err(Error::InstanceTooLarge(format!(
                "node {} admits {worst} bandwidth splits",
                node.id
            )));
        }
    }
    Ok(())
}

/// Best split of one node and its local objective.
type Split<T> = (Vec<u32>, T);

/// Provably optimal solution and its objective value. Among equal optima the
/// lexicographically smallest assignment vector wins.
pub fn solve_exact<T: Scalar>(scenario: &Scenario<T>, kind: ObjectiveKind) -> Result<(Solution, T)> {
    check_guards(scenario)?;
    let eval = Evaluator::new(scenario)?;
    let n = scenario.request_count();
    let v = scenario.node_count();
    let mut assignment = vec![0usize; n];
    let mut memo: HashMap<(usize, Vec<usize>), Option<Split<T>>> = HashMap::new();
    let mut best: Option<(Solution, T)> = None;

    loop {
        let mut value = T::zero();
        let mut bandwidth = vec![0u32; n];
        let mut ok = true;
        for node in 0..v {
            let members: Vec<usize> = (0..n).filter(|&k| assignment[k] == node).collect();
            let demand: T = members.iter().map(|&k| scenario.requests[k].demand).sum();
            if demand > scenario.nodes[node].compute_capacity {
                ok = false;
                break;
            }
            let entry = match memo.get(&(node, members.clone())) {
                Some(e) => e.clone(),
                None => {
                    let e = match optimal_bandwidth_split(
                        &eval,
                        node,
                        &members,
                        scenario.nodes[node].bandwidth_capacity,
                        kind,
                    ) {
                        Ok(s) => Some(s),
                        Err(Error::InfeasibleInstance(_)) => None,
                        Err(e) => return Err(e),
                    };
                    memo.insert((node, members.clone()), e.clone());
                    e
                }
            };
            match entry {
                Some((split, local)) => {
                    for (&k, &b) in members.iter().zip(&split) {
                        bandwidth[k] = b;
                    }
                    value = kind.accumulate(value, local);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let better = match &best {
                None => true,
                Some((_, b)) => value < *b && !is_tie(value, *b),
            };
            if better {
                best = Some((Solution::new(assignment.clone(), bandwidth), value));
            }
        }

        // Odometer over assignments, last request varying fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                let (sol, _) = best.ok_or_else(|| {
                    Error::InfeasibleInstance("no assignment satisfies the capacity constraints".into())
                })?;
                let value = eval.objective(&sol, kind)?;
                return Ok((sol, value));
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < v {
                break;
            }
            assignment[pos] = 0;
        }
    }
}

/// [`solve_exact`] wrapped as a solver report. `evaluations` counts the
/// assignment vectors visited.
pub fn solve_exact_report<T: Scalar>(scenario: &Scenario<T>, kind: ObjectiveKind) -> Result<SolverReport<T>> {
    let start = Instant::now();
    let (solution, objective) = solve_exact(scenario, kind)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let delays = Evaluator::new(scenario)?.evaluate(&solution)?;
    let evaluations = (scenario.node_count() as u64).saturating_pow(scenario.request_count() as u32);
    Ok(SolverReport {
        solver: "exact".into(),
        kind,
        solution,
        objective,
        delays,
        evaluations,
        generations: None,
        wall_time_s,
        curve: Vec::new(),
    })
}
