//! Learned scheduler: a two-layer LSTM reads the requests in id order and
//! emits, per request, node logits and a bandwidth share. Decoding packs the
//! requests greedily by descending demand and turns shares into whole-MHz
//! allocations, so the result always respects the bandwidth budgets.

mod io;
pub mod net;

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evo::{solve_evo, EvoParams};
use crate::num::Scalar;
use crate::problem::{apportion, Evaluator, ObjectiveKind, Scenario, Solution};
use crate::report::SolverReport;

pub use io::{
    label_file_name, load_dataset, load_model, read_model, save_dataset, save_model, write_model,
    MODEL_VERSION,
};
pub use net::{gradient_check, sequence_loss, Dims, Network, StepOutput, StepTarget};

/// Corpus-wide maxima used to scale features into [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub size: f64,
    pub demand: f64,
    pub distance: f64,
    pub bandwidth: f64,
    pub capacity: f64,
}

impl Normalization {
    pub fn from_corpus<T: Scalar>(corpus: &[Scenario<T>]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Config("cannot normalise an empty corpus".into()));
        }
        let mut n = Normalization {
            size: 0.0,
            demand: 0.0,
            distance: 0.0,
            bandwidth: 0.0,
            capacity: 0.0,
        };
        for s in corpus {
            for r in &s.requests {
                n.size = n.size.max(r.size.to_f64_lossy());
                n.demand = n.demand.max(r.demand.to_f64_lossy());
                for d in &r.distances {
                    n.distance = n.distance.max(d.to_f64_lossy());
                }
            }
            for node in &s.nodes {
                n.bandwidth = n.bandwidth.max(node.bandwidth_capacity as f64);
                n.capacity = n.capacity.max(node.compute_capacity.to_f64_lossy());
            }
        }
        // All-zero sizes are legal; keep the divisor usable.
        if n.size == 0.0 {
            n.size = 1.0;
        }
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("size", self.size),
            ("demand", self.demand),
            ("distance", self.distance),
            ("bandwidth", self.bandwidth),
            ("capacity", self.capacity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "normalisation constant `{name}` must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-request feature rows in request-id order:
/// `[size, demand, distance to each node.., B_v of each node.., C_v of each node..]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSequence<T = f64> {
    pub rows: Vec<Vec<T>>,
}

pub fn feature_width(node_count: usize) -> usize {
    2 + 3 * node_count
}

pub fn featurize<T: Scalar>(scenario: &Scenario<T>, norm: &Normalization) -> Result<FeatureSequence<T>> {
    norm.validate()?;
    let unit = |x: f64, max: f64| T::lit((x / max).clamp(0.0, 1.0));
    let node_part: Vec<T> = scenario
        .nodes
        .iter()
        .map(|n| unit(n.bandwidth_capacity as f64, norm.bandwidth))
        .chain(
            scenario
                .nodes
                .iter()
                .map(|n| unit(n.compute_capacity.to_f64_lossy(), norm.capacity)),
        )
        .collect();
    let rows = scenario
        .requests
        .iter()
        .map(|r| {
            let mut row = Vec::with_capacity(feature_width(scenario.node_count()));
            row.push(unit(r.size.to_f64_lossy(), norm.size));
            row.push(unit(r.demand.to_f64_lossy(), norm.demand));
            row.extend(r.distances.iter().map(|d| unit(d.to_f64_lossy(), norm.distance)));
            row.extend_from_slice(&node_part);
            row
        })
        .collect();
    Ok(FeatureSequence { rows })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub corpus_seed: u64,
    pub label_solver: String,
    /// Mean training loss per epoch.
    pub loss_curve: Vec<f64>,
    /// Validation loss per epoch.
    pub validation_curve: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateModel<T = f64> {
    pub network: Network<T>,
    pub normalization: Normalization,
    pub metadata: TrainingMetadata,
}

impl<T: Scalar> SurrogateModel<T> {
    pub fn hidden(&self) -> usize {
        self.network.dims.hidden
    }

    pub fn node_count(&self) -> usize {
        self.network.dims.nodes
    }

    pub fn check_scenario(&self, scenario: &Scenario<T>) -> Result<()> {
        if scenario.node_count() != self.node_count() {
            return Err(Error::Dimension(format!(
                "model was trained for {} nodes, scenario has {}",
                self.node_count(),
                scenario.node_count()
            )));
        }
        Ok(())
    }
}

pub fn forward<T: Scalar>(model: &SurrogateModel<T>, features: &FeatureSequence<T>) -> Result<Vec<StepOutput<T>>> {
    model.network.forward(&features.rows)
}

/// Turns raw outputs into a schedule that honours every bandwidth budget and,
/// when the greedy packing succeeds, every compute budget.
pub fn decode_with_repair<T: Scalar>(scenario: &Scenario<T>, outputs: &[StepOutput<T>]) -> Result<Solution> {
    let n = scenario.request_count();
    let v = scenario.node_count();
    if outputs.len() != n {
        return Err(Error::Dimension(format!("{} outputs for {n} requests", outputs.len())));
    }
    if let Some(o) = outputs.iter().find(|o| o.logits.len() != v) {
        return Err(Error::Dimension(format!("{} logits for {v} nodes", o.logits.len())));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (da, db) = (scenario.requests[a].demand, scenario.requests[b].demand);
        db.partial_cmp(&da).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let mut room: Vec<T> = scenario.nodes.iter().map(|n| n.compute_capacity).collect();
    let mut slots: Vec<u32> = scenario.nodes.iter().map(|n| n.bandwidth_capacity).collect();
    let mut assignment = vec![usize::MAX; n];
    for &k in &order {
        let logits = &outputs[k].logits;
        let mut prefs: Vec<usize> = (0..v).collect();
        prefs.sort_by(|&a, &b| {
            logits[b].partial_cmp(&logits[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        let demand = scenario.requests[k].demand;
        let node = prefs
            .into_iter()
            .find(|&node| slots[node] > 0 && room[node] >= demand)
            .ok_or(Error::InfeasibleDecode { request: k })?;
        assignment[k] = node;
        room[node] -= demand;
        slots[node] -= 1;
    }

    let mut bandwidth = vec![0u32; n];
    for node in 0..v {
        let members: Vec<usize> = (0..n).filter(|&k| assignment[k] == node).collect();
        let shares: Vec<T> = members.iter().map(|&k| outputs[k].share).collect();
        let split = apportion(&shares, scenario.nodes[node].bandwidth_capacity)
            .expect("slot accounting keeps members within the bandwidth budget");
        for (k, b) in members.into_iter().zip(split) {
            bandwidth[k] = b;
        }
    }
    Ok(Solution::new(assignment, bandwidth))
}

/// Per-request supervision derived from a labelled solution.
pub fn targets_from_label<T: Scalar>(scenario: &Scenario<T>, label: &Solution) -> Result<Vec<StepTarget<T>>> {
    if label.len() != scenario.request_count() {
        return Err(Error::Dimension(format!(
            "label covers {} requests, scenario has {}",
            label.len(),
            scenario.request_count()
        )));
    }
    label
        .assignment
        .iter()
        .zip(&label.bandwidth)
        .map(|(&node, &b)| {
            let cap = scenario
                .nodes
                .get(node)
                .ok_or_else(|| Error::Dimension(format!("label uses unknown node {node}")))?
                .bandwidth_capacity;
            Ok(StepTarget {
                node,
                share: T::lit(b as f64 / cap as f64),
            })
        })
        .collect()
}

/// Cross-entropy on the node choice plus `lambda` × squared share error,
/// averaged over requests.
pub fn loss<T: Scalar>(
    scenario: &Scenario<T>,
    prediction: &[StepOutput<T>],
    label: &Solution,
    lambda: T,
) -> Result<T> {
    sequence_loss(prediction, &targets_from_label(scenario, label)?, lambda)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    #[default]
    Sgd,
    Adam,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Labelled scenarios to use; 0 means the whole corpus.
    pub dataset_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub validation_fraction: f64,
    pub seed: u64,
    pub hidden: usize,
    pub lambda: f64,
    pub optimizer: Optimizer,
    /// Global gradient-norm cap per batch; 0 disables clipping.
    pub clip_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dataset_size: 0,
            epochs: 30,
            learning_rate: 0.01,
            batch_size: 16,
            validation_fraction: 0.1,
            seed: 0,
            hidden: 64,
            lambda: 1.0,
            optimizer: Optimizer::Sgd,
            clip_norm: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.epochs == 0 || self.batch_size == 0 || self.hidden == 0 {
            return err("epochs, batch_size and hidden must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return err("learning_rate must be positive");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction <= 0.5) {
            return err("validation_fraction must lie in (0, 0.5]");
        }
        if !(self.lambda >= 0.0) || !(self.clip_norm >= 0.0) {
            return err("lambda and clip_norm must be non-negative");
        }
        Ok(())
    }
}

struct Adam<T> {
    m: Vec<T>,
    v: Vec<T>,
    step: i32,
}

impl<T: Scalar> Adam<T> {
    fn new(n: usize) -> Self {
        Self {
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            step: 0,
        }
    }

    fn apply(&mut self, params: &mut [T], grad: &[T], lr: T) {
        let (b1, b2, eps) = (T::lit(0.9), T::lit(0.999), T::lit(1e-8));
        self.step += 1;
        let c1 = T::one() - b1.powi(self.step);
        let c2 = T::one() - b2.powi(self.step);
        for i in 0..params.len() {
            self.m[i] = b1 * self.m[i] + (T::one() - b1) * grad[i];
            self.v[i] = b2 * self.v[i] + (T::one() - b2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + eps);
        }
    }
}

struct Example<T> {
    rows: Vec<Vec<T>>,
    targets: Vec<StepTarget<T>>,
}

/// Labels a corpus with the evolutionary solver; scenario `i` uses seed
/// `params.seed + i`. Scenarios run in parallel, output order is corpus order.
pub fn label_corpus<T: Scalar>(corpus: &[Scenario<T>], params: &EvoParams) -> Result<Vec<Solution>> {
    corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let p = EvoParams {
                seed: params.seed.wrapping_add(i as u64),
                ..params.clone()
            };
            Ok(solve_evo(s, &p)?.solution)
        })
        .collect()
}

/// Indices of the training and validation scenarios `train` uses for a
/// dataset of `n` scenarios. At least one scenario is held out when `n >= 2`.
pub fn train_validation_split(n: usize, config: &TrainConfig) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let n_val = if n < 2 {
        0
    } else {
        ((n as f64 * config.validation_fraction).round() as usize).clamp(1, n - 1)
    };
    let val = order.split_off(n - n_val);
    (order, val)
}

/// Supervised training on `(scenario, label)` pairs. The split into training
/// and validation sets, the initial weights and the batch order all derive
/// from `config.seed`.
pub fn train<T: Scalar>(
    corpus: &[Scenario<T>],
    labels: &[Solution],
    config: &TrainConfig,
) -> Result<SurrogateModel<T>> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::Config("training corpus is empty".into()));
    }
    if corpus.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} scenarios but {} labels",
            corpus.len(),
            labels.len()
        )));
    }
    let used = if config.dataset_size == 0 {
        corpus.len()
    } else {
        config.dataset_size.min(corpus.len())
    };
    let corpus = &corpus[..used];
    let labels = &labels[..used];
    let nodes = corpus[0].node_count();
    if let Some(s) = corpus.iter().find(|s| s.node_count() != nodes) {
        return Err(Error::Dimension(format!(
            "corpus mixes {nodes}-node and {}-node scenarios",
            s.node_count()
        )));
    }
    let norm = Normalization::from_corpus(corpus)?;
    let examples = corpus
        .iter()
        .zip(labels)
        .map(|(s, l)| {
            Ok(Example {
                rows: featurize(s, &norm)?.rows,
                targets: targets_from_label(s, l)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (mut train_idx, val_idx) = train_validation_split(used, config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let dims = Dims {
        input: feature_width(nodes),
        hidden: config.hidden,
        nodes,
    };
    let mut network = Network::<T>::random(dims, &mut rng);
    let lambda = T::lit(config.lambda);
    let lr = T::lit(config.learning_rate);
    let mut adam = Adam::new(dims.param_count());
    let mut metadata = TrainingMetadata {
        corpus_seed: corpus[0].seed,
        ..TrainingMetadata::default()
    };
    let mut grad = vec![T::zero(); dims.param_count()];

    for epoch in 1..=config.epochs {
        train_idx.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in train_idx.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = T::zero());
            for &i in batch {
                let ex = &examples[i];
                let l = network.accumulate_grad(&ex.rows, &ex.targets, lambda, &mut grad)?;
                epoch_loss += l.to_f64_lossy();
            }
            let inv = T::one() / T::lit(batch.len() as f64);
            grad.iter_mut().for_each(|g| *g *= inv);
            if config.clip_norm > 0.0 {
                let norm = grad.iter().map(|g| g.to_f64_lossy().powi(2)).sum::<f64>().sqrt();
                if norm > config.clip_norm {
                    let s = T::lit(config.clip_norm / norm);
                    grad.iter_mut().for_each(|g| *g *= s);
                }
            }
            match config.optimizer {
                Optimizer::Sgd => network
                    .params
                    .iter_mut()
                    .zip(&grad)
                    .for_each(|(p, &g)| *p -= lr * g),
                Optimizer::Adam => adam.apply(&mut network.params, &grad, lr),
            }
        }
        let epoch_loss = epoch_loss / train_idx.len() as f64;
        if !epoch_loss.is_finite() || network.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDiverged { epoch });
        }
        let mut val_loss = 0.0;
        for &i in &val_idx {
            let ex = &examples[i];
            let out = network.forward(&ex.rows)?;
            val_loss += sequence_loss(&out, &ex.targets, lambda)?.to_f64_lossy();
        }
        metadata.loss_curve.push(epoch_loss);
        metadata
            .validation_curve
            .push(if val_idx.is_empty() { f64::NAN } else { val_loss / val_idx.len() as f64 });
    }

    Ok(SurrogateModel {
        network,
        normalization: norm,
        metadata,
    })
}

/// Fraction of requests whose most likely node matches the label.
pub fn assignment_accuracy<T: Scalar>(model: &SurrogateModel<T>, corpus: &[Scenario<T>], labels: &[Solution]) -> Result<f64> {
    let mut hit = 0usize;
    let mut total = 0usize;
    for (s, l) in corpus.iter().zip(labels) {
        let out = forward(model, &featurize(s, &model.normalization)?)?;
        for (o, &node) in out.iter().zip(&l.assignment) {
            let best = (0..o.logits.len())
                .max_by(|&a, &b| o.logits[a].partial_cmp(&o.logits[b]).unwrap().then(b.cmp(&a)))
                .unwrap();
            hit += usize::from(best == node);
            total += 1;
        }
    }
    Ok(hit as f64 / total.max(1) as f64)
}

/// One-shot schedule: featurize, forward, decode, evaluate.
pub fn infer<T: Scalar>(model: &SurrogateModel<T>, scenario: &Scenario<T>, kind: ObjectiveKind) -> Result<SolverReport<T>> {
    model.check_scenario(scenario)?;
    let start = Instant::now();
    let features = featurize(scenario, &model.normalization)?;
    let outputs = forward(model, &features)?;
    let solution = decode_with_repair(scenario, &outputs)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let eval = Evaluator::new(scenario)?;
    let delays = eval.evaluate(&solution)?;
    let objective = crate::problem::objective(&delays, kind);
    Ok(SolverReport {
        solver: "surrogate".into(),
        kind,
        solution,
        objective,
        delays,
        evaluations: 1,
        generations: None,
        wall_time_s,
        curve: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::check_feasibility;
    use crate::problem::fixtures::scenario;
    use crate::scengen::{generate, GenConfig};

    fn norm() -> Normalization {
        Normalization {
            size: 100.0,
            demand: 150.0,
            distance: 200.0,
            bandwidth: 100.0,
            capacity: 1500.0,
        }
    }

    fn out(logits: &[f64], share: f64) -> StepOutput<f64> {
        StepOutput {
            logits: logits.to_vec(),
            share,
        }
    }

    #[test]
    fn features_are_scaled() {
        let s = scenario(
            &[(100, 1500.0), (50, 750.0)],
            &[(50.0, 150.0, &[200.0, 30.0]), (50.0, 150.0, &[200.0, 30.0])],
        );
        let f = featurize(&s, &norm()).unwrap();
        assert_eq!(f.rows.len(), 2);
        assert_eq!(f.rows[0], vec![0.5, 1.0, 1.0, 0.15, 1.0, 0.5, 1.0, 0.5]);
        assert_eq!(f.rows[0], f.rows[1]);
        assert!(f.rows.iter().flatten().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn features_follow_request_order() {
        let s = scenario(&[(100, 1500.0)], &[(10.0, 60.0, &[40.0]), (90.0, 140.0, &[180.0])]);
        let mut swapped = s.clone();
        swapped.requests.swap(0, 1);
        swapped.requests[0].id = 0;
        swapped.requests[1].id = 1;
        let a = featurize(&s, &norm()).unwrap();
        let b = featurize(&swapped, &norm()).unwrap();
        assert_eq!(a.rows[0], b.rows[1]);
        assert_eq!(a.rows[1], b.rows[0]);
    }

    #[test]
    fn bad_normalisation_is_a_config_error() {
        let s = scenario(&[(100, 1500.0)], &[(10.0, 60.0, &[40.0])]);
        let bad = Normalization {
            distance: 0.0,
            ..norm()
        };
        assert!(matches!(featurize(&s, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn decode_single_node() {
        let s = scenario(&[(10, 1500.0)], &[(10.0, 60.0, &[40.0]), (10.0, 80.0, &[50.0])]);
        let sol = decode_with_repair(&s, &[out(&[0.0], 0.5), out(&[0.0], 0.5)]).unwrap();
        assert_eq!(sol, Solution::new(vec![0, 0], vec![5, 5]));
        let sol = decode_with_repair(&s, &[out(&[0.0], 0.7), out(&[0.0], 0.3)]).unwrap();
        assert_eq!(sol.bandwidth, vec![7, 3]);
    }

    #[test]
    fn decode_respects_compute_capacity() {
        // Both prefer node 0, which only fits one of them; the larger demand
        // is placed first and keeps its preference.
        let s = scenario(
            &[(10, 100.0), (10, 100.0)],
            &[(10.0, 60.0, &[40.0, 40.0]), (10.0, 80.0, &[50.0, 50.0])],
        );
        let sol = decode_with_repair(&s, &[out(&[2.0, 1.0], 0.5), out(&[3.0, 0.0], 0.5)]).unwrap();
        assert_eq!(sol.assignment, vec![1, 0]);
        assert_eq!(sol.bandwidth, vec![10, 10]);
        assert!(check_feasibility(&s, &sol).is_empty());
    }

    #[test]
    fn decode_reports_unplaceable_request() {
        let s = scenario(&[(10, 100.0)], &[(10.0, 60.0, &[40.0]), (10.0, 80.0, &[50.0])]);
        assert!(matches!(
            decode_with_repair(&s, &[out(&[0.0], 0.5), out(&[0.0], 0.5)]),
            Err(Error::InfeasibleDecode { request: 0 })
        ));
    }

    #[test]
    fn decode_never_overfills_bandwidth_slots() {
        let s = scenario(
            &[(2, 1000.0), (5, 1000.0)],
            &[(1.0, 10.0, &[40.0, 40.0]), (1.0, 10.0, &[40.0, 40.0]), (1.0, 10.0, &[40.0, 40.0])],
        );
        let o = vec![out(&[5.0, 0.0], 0.9); 3];
        let sol = decode_with_repair(&s, &o).unwrap();
        assert!(check_feasibility(&s, &sol).is_empty());
        assert_eq!(sol.members(0).len(), 2);
    }

    #[test]
    fn loss_against_label() {
        let s = scenario(&[(10, 1500.0), (10, 1500.0)], &[(10.0, 60.0, &[40.0, 40.0])]);
        let label = Solution::new(vec![1], vec![10]);
        let exact = loss(&s, &[out(&[-40.0, 40.0], 1.0)], &label, 1.0).unwrap();
        assert!(exact < 1e-12);
        let cls = loss(&s, &[out(&[0.0, 0.0], 0.5)], &label, 0.0).unwrap();
        assert!((cls - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_model_infers_feasible_schedule() {
        let s: Scenario = generate(&GenConfig::default().with_seed(3)).unwrap();
        let model = SurrogateModel {
            network: Network::zeros(Dims {
                input: feature_width(2),
                hidden: 8,
                nodes: 2,
            }),
            normalization: norm(),
            metadata: TrainingMetadata::default(),
        };
        let a = infer(&model, &s, ObjectiveKind::Total).unwrap();
        let b = infer(&model, &s, ObjectiveKind::Total).unwrap();
        assert_eq!(a.solution, b.solution);
        assert!(check_feasibility(&s, &a.solution).is_empty());
        let three: Scenario = generate(&GenConfig {
            node_count: 3,
            ..GenConfig::default()
        })
        .unwrap();
        assert!(matches!(infer(&model, &three, ObjectiveKind::Total), Err(Error::Dimension(_))));
    }

    #[test]
    fn training_rejects_bad_input() {
        let s: Scenario = generate(&GenConfig::default()).unwrap();
        let cfg = TrainConfig::default();
        assert!(matches!(train::<f64>(&[], &[], &cfg), Err(Error::Config(_))));
        assert!(train(&[s], &[], &cfg).is_err());
        let bad = TrainConfig {
            validation_fraction: 0.9,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let corpus: Vec<Scenario<f32>> = crate::scengen::generate_corpus(&GenConfig::default(), 4).unwrap();
        let labels: Vec<Solution> = corpus
            .iter()
            .map(|s| crate::evo::solve_evo(s, &crate::evo::EvoParams::new(100, 0)).unwrap().solution)
            .collect();
        let cfg = TrainConfig {
            // Overflows f32 on the first update.
            learning_rate: 1e300,
            hidden: 4,
            epochs: 5,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&corpus, &labels, &cfg), Err(Error::TrainingDiverged { epoch: 1 })));
    }
}
