//! Instance and solution model, delay evaluation, objective and feasibility.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{self, WirelessParams};
use crate::error::{Error, Result};
use crate::num::Scalar;

pub const SCENARIO_VERSION: &str = "edgesched-scenario/1 prng=chacha8 seed=base+index";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EdgeNode<T = f64> {
    pub id: usize,
    /// Wireless bandwidth B_v, whole MHz.
    #[serde(rename = "bandwidth_mhz")]
    pub bandwidth_capacity: u32,
    /// Processing capacity C_v, MHz.
    #[serde(rename = "capacity_mhz")]
    pub compute_capacity: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Request<T = f64> {
    pub id: usize,
    /// Job size L_k in Mbit; also the processing work in mega-cycles.
    #[serde(rename = "size_mbit")]
    pub size: T,
    /// Hardware demand c_k in MHz. Processing runs at this rate.
    #[serde(rename = "demand_mhz")]
    pub demand: T,
    /// Distance to every node, in node order.
    #[serde(rename = "distances_m")]
    pub distances: Vec<T>,
}

fn default_slots() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Scenario<T = f64> {
    pub version: String,
    pub seed: u64,
    pub wireless: WirelessParams<T>,
    pub nodes: Vec<EdgeNode<T>>,
    pub requests: Vec<Request<T>>,
    #[serde(default = "default_slots")]
    pub slot_count: usize,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        nodes: Vec<EdgeNode<T>>,
        requests: Vec<Request<T>>,
        wireless: WirelessParams<T>,
        seed: u64,
    ) -> Result<Self> {
        let s = Self {
            version: SCENARIO_VERSION.to_string(),
            seed,
            wireless,
            nodes,
            requests,
            slot_count: 1,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn request_count(&self) -> usize {
        self.requests.len()
    }

    /// Checks the shape invariants. Zero-size requests are accepted so that
    /// degenerate fixtures can be expressed; generated scenarios never contain
    /// them.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        self.wireless.validate()?;
        if self.nodes.is_empty() {
            return bad("no edge nodes".into());
        }
        if self.requests.is_empty() {
            return bad("no requests".into());
        }
        if self.slot_count == 0 {
            return bad("slot_count must be at least 1".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return bad(format!("node at position {i} has id {}", n.id));
            }
            if n.bandwidth_capacity == 0 {
                return bad(format!("node {i} has zero bandwidth"));
            }
            if !(n.compute_capacity > T::zero()) || !n.compute_capacity.is_finite() {
                return bad(format!("node {i} has non-positive compute capacity"));
            }
        }
        for (k, r) in self.requests.iter().enumerate() {
            if r.id != k {
                return bad(format!("request at position {k} has id {}", r.id));
            }
            if r.size < T::zero() || !r.size.is_finite() {
                return bad(format!("request {k} has invalid size {}", r.size));
            }
            if !(r.demand > T::zero()) || !r.demand.is_finite() {
                return bad(format!("request {k} has non-positive demand {}", r.demand));
            }
            if r.distances.len() != self.nodes.len() {
                return bad(format!(
                    "request {k} has {} distances for {} nodes",
                    r.distances.len(),
                    self.nodes.len()
                ));
            }
            if let Some(d) = r.distances.iter().find(|d| !(**d >= T::lit(channel::MIN_DISTANCE_M))) {
                return bad(format!("request {k} has distance {d} below 1 m"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Node choice and whole-MHz bandwidth for every request, indexed by request id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    pub assignment: Vec<usize>,
    pub bandwidth: Vec<u32>,
}

impl Solution {
    pub fn new(assignment: Vec<usize>, bandwidth: Vec<u32>) -> Self {
        Self {
            assignment,
            bandwidth,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Request ids assigned to `node`, ascending.
    pub fn members(&self, node: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == node)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentEntry {
    request: usize,
    node: usize,
    bandwidth_mhz: u32,
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    assignments: Vec<AssignmentEntry>,
}

impl Serialize for Solution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SolutionFile {
            assignments: self
                .assignment
                .iter()
                .zip(&self.bandwidth)
                .enumerate()
                .map(|(request, (&node, &bandwidth_mhz))| AssignmentEntry {
                    request,
                    node,
                    bandwidth_mhz,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Solution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = SolutionFile::deserialize(d)?;
        let n = file.assignments.len();
        let mut assignment = vec![usize::MAX; n];
        let mut bandwidth = vec![0; n];
        for e in file.assignments {
            if e.request >= n {
                return Err(D::Error::custom(format!("request id {} out of range", e.request)));
            }
            if assignment[e.request] != usize::MAX {
                return Err(D::Error::custom(format!(
                    "request {} assigned more than once",
                    e.request
                )));
            }
            assignment[e.request] = e.node;
            bandwidth[e.request] = e.bandwidth_mhz;
        }
        Ok(Solution {
            assignment,
            bandwidth,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RequestDelay<T = f64> {
    pub transmission: T,
    pub processing: T,
    pub total: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DelayReport<T = f64> {
    pub per_request: Vec<RequestDelay<T>>,
    pub sum_total: T,
    pub max_total: T,
}

impl<T: Scalar> DelayReport<T> {
    pub fn from_requests(per_request: Vec<RequestDelay<T>>) -> Self {
        let mut sum_total = T::zero();
        let mut max_total = T::zero();
        for r in &per_request {
            sum_total += r.total;
            max_total = max_total.max(r.total);
        }
        Self {
            per_request,
            sum_total,
            max_total,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Sum of per-request delays.
    #[default]
    Total,
    /// Largest per-request delay.
    Makespan,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::Total => "total",
            ObjectiveKind::Makespan => "makespan",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Self::Total),
            "makespan" => Ok(Self::Makespan),
            other => Err(Error::Config(format!("unknown objective kind `{other}`"))),
        }
    }
}

impl ObjectiveKind {
    /// Folds per-request delays into the objective.
    #[inline]
    pub fn accumulate<T: Scalar>(self, acc: T, value: T) -> T {
        match self {
            ObjectiveKind::Total => acc + value,
            ObjectiveKind::Makespan => acc.max(value),
        }
    }
}

pub fn objective<T: Scalar>(report: &DelayReport<T>, kind: ObjectiveKind) -> T {
    match kind {
        ObjectiveKind::Total => report.sum_total,
        ObjectiveKind::Makespan => report.max_total,
    }
}

fn assigned_bandwidth<T: Scalar>(
    scenario: &Scenario<T>,
    solution: &Solution,
    request_id: usize,
) -> Result<(usize, T)> {
    let node = *solution
        .assignment
        .get(request_id)
        .ok_or_else(|| Error::InfeasibleSolution(format!("request {request_id} is unassigned")))?;
    if node >= scenario.node_count() {
        return Err(Error::InfeasibleSolution(format!(
            "request {request_id} assigned to unknown node {node}"
        )));
    }
    let b = solution.bandwidth.get(request_id).copied().unwrap_or(0);
    if b == 0 {
        return Err(Error::InfeasibleSolution(format!(
            "request {request_id} has no bandwidth"
        )));
    }
    Ok((node, T::lit(b as f64)))
}

/// Seconds to upload request `request_id` to its assigned node.
pub fn transmission_delay<T: Scalar>(
    scenario: &Scenario<T>,
    solution: &Solution,
    request_id: usize,
) -> Result<T> {
    let (node, b) = assigned_bandwidth(scenario, solution, request_id)?;
    let r = &scenario.requests[request_id];
    channel::transmission_time(&scenario.wireless, r.distances[node], b, r.size)
}

/// Seconds to process request `request_id`, which runs at its own demand c_k.
pub fn processing_delay<T: Scalar>(
    scenario: &Scenario<T>,
    _solution: &Solution,
    request_id: usize,
) -> Result<T> {
    let r = scenario
        .requests
        .get(request_id)
        .ok_or_else(|| Error::InfeasibleSolution(format!("no request {request_id}")))?;
    Ok(r.size / r.demand)
}

pub fn evaluate<T: Scalar>(scenario: &Scenario<T>, solution: &Solution) -> Result<DelayReport<T>> {
    Evaluator::new(scenario)?.evaluate(solution)
}

/// Delay evaluator with the distance-dependent part of the channel chain
/// precomputed. Produces values bit-identical to [`transmission_delay`] and
/// [`processing_delay`].
#[derive(Clone, Debug)]
pub struct Evaluator<'a, T: Scalar = f64> {
    scenario: &'a Scenario<T>,
    /// Received power in mW, row-major by request then node.
    signal: Vec<T>,
    processing: Vec<T>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub fn new(scenario: &'a Scenario<T>) -> Result<Self> {
        let mut signal = Vec::with_capacity(scenario.request_count() * scenario.node_count());
        for r in &scenario.requests {
            for &d in &r.distances {
                signal.push(scenario.wireless.received_signal_mw(d)?);
            }
        }
        let processing = scenario.requests.iter().map(|r| r.size / r.demand).collect();
        Ok(Self {
            scenario,
            signal,
            processing,
        })
    }

    pub fn scenario(&self) -> &'a Scenario<T> {
        self.scenario
    }

    #[inline]
    pub fn transmission(&self, request: usize, node: usize, bandwidth: u32) -> Result<T> {
        if bandwidth == 0 {
            return Err(Error::InfeasibleSolution(format!("request {request} has no bandwidth")));
        }
        let s = self.signal[request * self.scenario.node_count() + node];
        channel::transmission_time_from_signal(
            s,
            self.scenario.wireless.noise_density,
            T::lit(bandwidth as f64),
            self.scenario.requests[request].size,
        )
    }

    #[inline]
    pub fn processing(&self, request: usize) -> T {
        self.processing[request]
    }

    #[inline]
    pub fn request_total(&self, request: usize, node: usize, bandwidth: u32) -> Result<T> {
        Ok(self.transmission(request, node, bandwidth)? + self.processing(request))
    }

    fn check_shape(&self, solution: &Solution) -> Result<()> {
        let n = self.scenario.request_count();
        if solution.assignment.len() != n || solution.bandwidth.len() != n {
            return Err(Error::InfeasibleSolution(format!(
                "solution covers {} requests, scenario has {n}",
                solution.assignment.len()
            )));
        }
        if let Some((k, v)) = solution
            .assignment
            .iter()
            .enumerate()
            .find(|(_, v)| **v >= self.scenario.node_count())
        {
            return Err(Error::InfeasibleSolution(format!(
                "request {k} assigned to unknown node {v}"
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, solution: &Solution) -> Result<DelayReport<T>> {
        self.check_shape(solution)?;
        let per_request = (0..solution.len())
            .map(|k| {
                let transmission =
                    self.transmission(k, solution.assignment[k], solution.bandwidth[k])?;
                let processing = self.processing(k);
                Ok(RequestDelay {
                    transmission,
                    processing,
                    total: transmission + processing,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DelayReport::from_requests(per_request))
    }

    /// Objective value without materialising a report.
    pub fn objective(&self, solution: &Solution, kind: ObjectiveKind) -> Result<T> {
        self.check_shape(solution)?;
        let mut acc = T::zero();
        for k in 0..solution.len() {
            let t = self.request_total(k, solution.assignment[k], solution.bandwidth[k])?;
            acc = kind.accumulate(acc, t);
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Σ b over a node exceeds B_v.
    Bandwidth,
    /// Σ c over a node exceeds C_v.
    Compute,
    /// A request is not mapped to exactly one existing node.
    Assignment,
    /// A request was given no bandwidth.
    MinBandwidth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Violation<T = f64> {
    pub constraint: Constraint,
    pub node: Option<usize>,
    pub request: Option<usize>,
    pub excess: T,
}

impl<T: Scalar> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} constraint violated", self.constraint)?;
        if let Some(v) = self.node {
            write!(f, " at node {v}")?;
        }
        if let Some(k) = self.request {
            write!(f, " by request {k}")?;
        }
        write!(f, " (excess {})", self.excess)
    }
}

/// Per-node bandwidth and compute sums over the requests a solution assigns
/// there. Requests with out-of-range nodes are skipped.
pub fn node_loads<T: Scalar>(scenario: &Scenario<T>, solution: &Solution) -> (Vec<u64>, Vec<T>) {
    let mut bw = vec![0u64; scenario.node_count()];
    let mut cpu = vec![T::zero(); scenario.node_count()];
    for (k, &v) in solution.assignment.iter().enumerate() {
        if v < scenario.node_count() && k < scenario.request_count() {
            bw[v] += solution.bandwidth.get(k).copied().unwrap_or(0) as u64;
            cpu[v] += scenario.requests[k].demand;
        }
    }
    (bw, cpu)
}

pub fn check_feasibility<T: Scalar>(scenario: &Scenario<T>, solution: &Solution) -> Vec<Violation<T>> {
    let mut out = Vec::new();
    let n = scenario.request_count();
    for k in 0..n.max(solution.assignment.len()) {
        let node = solution.assignment.get(k).copied();
        let ok = k < n && matches!(node, Some(v) if v < scenario.node_count());
        if !ok {
            out.push(Violation {
                constraint: Constraint::Assignment,
                node: node.filter(|v| *v != usize::MAX),
                request: Some(k),
                excess: T::one(),
            });
        }
        if k < n && solution.bandwidth.get(k).copied().unwrap_or(0) == 0 {
            out.push(Violation {
                constraint: Constraint::MinBandwidth,
                node,
                request: Some(k),
                excess: T::one(),
            });
        }
    }
    let (bw, cpu) = node_loads(scenario, solution);
    for (v, node) in scenario.nodes.iter().enumerate() {
        if bw[v] > node.bandwidth_capacity as u64 {
            out.push(Violation {
                constraint: Constraint::Bandwidth,
                node: Some(v),
                request: None,
                excess: T::lit((bw[v] - node.bandwidth_capacity as u64) as f64),
            });
        }
        if cpu[v] > node.compute_capacity {
            out.push(Violation {
                constraint: Constraint::Compute,
                node: Some(v),
                request: None,
                excess: cpu[v] - node.compute_capacity,
            });
        }
    }
    out
}

pub fn is_feasible<T: Scalar>(scenario: &Scenario<T>, solution: &Solution) -> bool {
    check_feasibility(scenario, solution).is_empty()
}

/// Splits `total` whole MHz over `weights` proportionally, every share at
/// least 1, using largest-remainder rounding. Ties go to the lower index.
///
/// Non-positive or non-finite weights count as zero; all-zero weights split
/// evenly. Returns `None` when `total` is smaller than the number of shares.
pub fn apportion<T: Scalar>(weights: &[T], total: u32) -> Option<Vec<u32>> {
    let m = weights.len();
    if m == 0 {
        return Some(Vec::new());
    }
    if (m as u64) > total as u64 {
        return None;
    }
    let clean: Vec<f64> = weights
        .iter()
        .map(|w| {
            let w = w.to_f64_lossy();
            if w.is_finite() && w > 0.0 {
                w
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = clean.iter().sum();
    let ideal: Vec<f64> = if sum > 0.0 {
        clean.iter().map(|w| w / sum * total as f64).collect()
    } else {
        vec![total as f64 / m as f64; m]
    };
    let mut out: Vec<u32> = ideal.iter().map(|x| (x.floor() as u32).max(1)).collect();
    let mut assigned: u64 = out.iter().map(|&b| b as u64).sum();
    let remainder = |i: usize, out: &[u32]| ideal[i] - out[i] as f64;
    while assigned < total as u64 {
        let i = (0..m)
            .max_by(|&a, &b| remainder(a, &out).total_cmp(&remainder(b, &out)).then(b.cmp(&a)))
            .unwrap();
        out[i] += 1;
        assigned += 1;
    }
    while assigned > total as u64 {
        let i = (0..m)
            .filter(|&i| out[i] > 1)
            .min_by(|&a, &b| remainder(a, &out).total_cmp(&remainder(b, &out)).then(b.cmp(&a)))
            .unwrap();
        out[i] -= 1;
        assigned -= 1;
    }
    Some(out)
}
