//! Two stacked LSTM layers with a per-step head, forward and backward passes
//! over a single flat parameter vector.
//!
//! Layout, per layer: `W` (4H × (in + H), row-major, gate blocks i f g o)
//! then `b` (4H). After both layers: node logits `W_o` (V × H), `b_o` (V),
//! share weights `w_s` (H), share bias `b_s` (1).

use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use crate::error::{Error, Result};
use crate::num::Scalar;

pub const LAYERS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub input: usize,
    pub hidden: usize,
    pub nodes: usize,
}

impl Dims {
    pub fn layer_input(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input
        } else {
            self.hidden
        }
    }

    fn layer_size(&self, layer: usize) -> usize {
        let h = self.hidden;
        4 * h * (self.layer_input(layer) + h) + 4 * h
    }

    pub fn weight_offset(&self, layer: usize) -> usize {
        (0..layer).map(|l| self.layer_size(l)).sum()
    }

    pub fn bias_offset(&self, layer: usize) -> usize {
        self.weight_offset(layer) + 4 * self.hidden * (self.layer_input(layer) + self.hidden)
    }

    pub fn head_offset(&self) -> usize {
        self.weight_offset(LAYERS)
    }

    pub fn param_count(&self) -> usize {
        self.head_offset() + self.nodes * self.hidden + self.nodes + self.hidden + 1
    }
}

/// Raw per-request output: one logit per node and a bandwidth share in (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput<T = f64> {
    pub logits: Vec<T>,
    pub share: T,
}

/// Supervision for one request.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepTarget<T = f64> {
    pub node: usize,
    pub share: T,
}

#[inline]
pub(crate) fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    y.iter_mut().zip(x).for_each(|(y, &x)| *y += alpha * x);
}

fn log_softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    let lse = max + logits.iter().map(|&x| (x - max).exp()).sum::<T>().ln();
    logits.iter().map(|&x| x - lse).collect()
}

/// Activations of one layer over a sequence, kept for backpropagation.
struct LayerTrace<T> {
    /// `[x_t; h_{t-1}]` per step.
    xh: Vec<Vec<T>>,
    /// Activated gates (i f g o) per step.
    gates: Vec<Vec<T>>,
    cells: Vec<Vec<T>>,
    tanh_cells: Vec<Vec<T>>,
    hidden: Vec<Vec<T>>,
}

pub(crate) struct Trace<T> {
    layers: Vec<LayerTrace<T>>,
    pub outputs: Vec<StepOutput<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network<T = f64> {
    pub dims: Dims,
    pub params: Vec<T>,
}

impl<T: Scalar> Network<T> {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            params: vec![T::zero(); dims.param_count()],
        }
    }

    /// Uniform ±1/√H weights with forget-gate biases at 1.
    pub fn random<R: Rng>(dims: Dims, rng: &mut R) -> Self {
        let k = 1.0 / (dims.hidden as f64).sqrt();
        let dist = Uniform::new_inclusive(-k, k);
        let mut params: Vec<T> = (0..dims.param_count()).map(|_| T::lit(dist.sample(rng))).collect();
        for layer in 0..LAYERS {
            let b = dims.bias_offset(layer) + dims.hidden;
            params[b..b + dims.hidden].iter_mut().for_each(|p| *p = T::one());
        }
        Self { dims, params }
    }

    pub fn from_params(dims: Dims, params: Vec<T>) -> Result<Self> {
        if params.len() != dims.param_count() {
            return Err(Error::Dimension(format!(
                "expected {} parameters, got {}",
                dims.param_count(),
                params.len()
            )));
        }
        Ok(Self { dims, params })
    }

    fn check_input(&self, rows: &[Vec<T>]) -> Result<()> {
        if let Some(r) = rows.iter().find(|r| r.len() != self.dims.input) {
            return Err(Error::Dimension(format!(
                "feature row has {} entries, network expects {}",
                r.len(),
                self.dims.input
            )));
        }
        Ok(())
    }

    pub fn forward(&self, rows: &[Vec<T>]) -> Result<Vec<StepOutput<T>>> {
        Ok(self.trace(rows)?.outputs)
    }

    pub(crate) fn trace(&self, rows: &[Vec<T>]) -> Result<Trace<T>> {
        self.check_input(rows)?;
        let d = self.dims;
        let h = d.hidden;
        let steps = rows.len();
        let mut layers = Vec::with_capacity(LAYERS);
        let mut inputs: Vec<Vec<T>> = rows.to_vec();
        for layer in 0..LAYERS {
            let n_in = d.layer_input(layer);
            let w = &self.params[d.weight_offset(layer)..d.bias_offset(layer)];
            let b = &self.params[d.bias_offset(layer)..d.bias_offset(layer) + 4 * h];
            let mut tr = LayerTrace {
                xh: Vec::with_capacity(steps),
                gates: Vec::with_capacity(steps),
                cells: Vec::with_capacity(steps),
                tanh_cells: Vec::with_capacity(steps),
                hidden: Vec::with_capacity(steps),
            };
            let mut h_prev = vec![T::zero(); h];
            let mut c_prev = vec![T::zero(); h];
            for x in &inputs {
                let mut xh = Vec::with_capacity(n_in + h);
                xh.extend_from_slice(x);
                xh.extend_from_slice(&h_prev);
                let mut gates: Vec<T> = (0..4 * h)
                    .map(|r| b[r] + dot(&w[r * (n_in + h)..(r + 1) * (n_in + h)], &xh))
                    .collect();
                for j in 0..h {
                    gates[j] = sigmoid(gates[j]);
                    gates[h + j] = sigmoid(gates[h + j]);
                    gates[2 * h + j] = gates[2 * h + j].tanh();
                    gates[3 * h + j] = sigmoid(gates[3 * h + j]);
                }
                let c: Vec<T> = (0..h)
                    .map(|j| gates[h + j] * c_prev[j] + gates[j] * gates[2 * h + j])
                    .collect();
                let tc: Vec<T> = c.iter().map(|v| v.tanh()).collect();
                let hid: Vec<T> = (0..h).map(|j| gates[3 * h + j] * tc[j]).collect();
                h_prev = hid.clone();
                c_prev = c.clone();
                tr.xh.push(xh);
                tr.gates.push(gates);
                tr.cells.push(c);
                tr.tanh_cells.push(tc);
                tr.hidden.push(hid);
            }
            inputs = tr.hidden.clone();
            layers.push(tr);
        }

        let head = d.head_offset();
        let w_o = &self.params[head..head + d.nodes * h];
        let b_o = &self.params[head + d.nodes * h..head + d.nodes * h + d.nodes];
        let w_s = &self.params[head + d.nodes * h + d.nodes..head + d.nodes * h + d.nodes + h];
        let b_s = self.params[head + d.nodes * h + d.nodes + h];
        let outputs = layers[LAYERS - 1]
            .hidden
            .iter()
            .map(|hid| StepOutput {
                logits: (0..d.nodes).map(|v| b_o[v] + dot(&w_o[v * h..(v + 1) * h], hid)).collect(),
                share: sigmoid(b_s + dot(w_s, hid)),
            })
            .collect();
        Ok(Trace { layers, outputs })
    }

    /// Loss of one sequence and its gradient with respect to every parameter.
    pub fn loss_and_grad(
        &self,
        rows: &[Vec<T>],
        targets: &[StepTarget<T>],
        lambda: T,
    ) -> Result<(T, Vec<T>)> {
        let mut grad = vec![T::zero(); self.params.len()];
        let loss = self.accumulate_grad(rows, targets, lambda, &mut grad)?;
        Ok((loss, grad))
    }

    /// Adds this sequence's gradient into `grad` and returns its loss.
    pub fn accumulate_grad(
        &self,
        rows: &[Vec<T>],
        targets: &[StepTarget<T>],
        lambda: T,
        grad: &mut [T],
    ) -> Result<T> {
        let trace = self.trace(rows)?;
        let loss = sequence_loss(&trace.outputs, targets, lambda)?;
        let d = self.dims;
        let h = d.hidden;
        let steps = rows.len();
        let scale = T::one() / T::lit(steps as f64);

        // Head.
        let head = d.head_offset();
        let wo_at = head;
        let bo_at = head + d.nodes * h;
        let ws_at = bo_at + d.nodes;
        let bs_at = ws_at + h;
        let top = &trace.layers[LAYERS - 1];
        let mut dh_ext: Vec<Vec<T>> = vec![vec![T::zero(); h]; steps];
        for t in 0..steps {
            let out = &trace.outputs[t];
            let tgt = targets[t];
            let logp = log_softmax(&out.logits);
            let hid = &top.hidden[t];
            for v in 0..d.nodes {
                let onehot = if v == tgt.node { T::one() } else { T::zero() };
                let dz = (logp[v].exp() - onehot) * scale;
                axpy(dz, hid, &mut grad[wo_at + v * h..wo_at + (v + 1) * h]);
                grad[bo_at + v] += dz;
                axpy(dz, &self.params[wo_at + v * h..wo_at + (v + 1) * h], &mut dh_ext[t]);
            }
            let s = out.share;
            let ds = T::lit(2.0) * lambda * (s - tgt.share) * s * (T::one() - s) * scale;
            axpy(ds, hid, &mut grad[ws_at..ws_at + h]);
            grad[bs_at] += ds;
            axpy(ds, &self.params[ws_at..ws_at + h], &mut dh_ext[t]);
        }

        // Layers, top to bottom, each through time.
        for layer in (0..LAYERS).rev() {
            let tr = &trace.layers[layer];
            let n_in = d.layer_input(layer);
            let width = n_in + h;
            let w_at = d.weight_offset(layer);
            let b_at = d.bias_offset(layer);
            let mut dx_all = vec![vec![T::zero(); n_in]; steps];
            let mut dh_next = vec![T::zero(); h];
            let mut dc_next = vec![T::zero(); h];
            let mut dz = vec![T::zero(); 4 * h];
            for t in (0..steps).rev() {
                let g = &tr.gates[t];
                let tc = &tr.tanh_cells[t];
                for j in 0..h {
                    let (i, f, gg, o) = (g[j], g[h + j], g[2 * h + j], g[3 * h + j]);
                    let c_prev = if t > 0 { tr.cells[t - 1][j] } else { T::zero() };
                    let dh = dh_ext[t][j] + dh_next[j];
                    let dc = dc_next[j] + dh * o * (T::one() - tc[j] * tc[j]);
                    dz[j] = dc * gg * i * (T::one() - i);
                    dz[h + j] = dc * c_prev * f * (T::one() - f);
                    dz[2 * h + j] = dc * i * (T::one() - gg * gg);
                    dz[3 * h + j] = dh * tc[j] * o * (T::one() - o);
                    dc_next[j] = dc * f;
                }
                let xh = &tr.xh[t];
                let mut dxh = vec![T::zero(); width];
                for r in 0..4 * h {
                    if dz[r] == T::zero() {
                        continue;
                    }
                    axpy(dz[r], xh, &mut grad[w_at + r * width..w_at + (r + 1) * width]);
                    grad[b_at + r] += dz[r];
                    axpy(dz[r], &self.params[w_at + r * width..w_at + (r + 1) * width], &mut dxh);
                }
                dx_all[t].copy_from_slice(&dxh[..n_in]);
                dh_next.copy_from_slice(&dxh[n_in..]);
            }
            if layer > 0 {
                dh_ext = dx_all;
            }
        }
        Ok(loss)
    }
}

/// Mean over steps of node cross-entropy plus `lambda` times squared share error.
pub fn sequence_loss<T: Scalar>(
    outputs: &[StepOutput<T>],
    targets: &[StepTarget<T>],
    lambda: T,
) -> Result<T> {
    if outputs.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} outputs for {} targets",
            outputs.len(),
            targets.len()
        )));
    }
    if outputs.is_empty() {
        return Ok(T::zero());
    }
    let mut total = T::zero();
    for (out, tgt) in outputs.iter().zip(targets) {
        if tgt.node >= out.logits.len() {
            return Err(Error::Dimension(format!("target node {} out of range", tgt.node)));
        }
        let ce = -log_softmax(&out.logits)[tgt.node];
        let err = out.share - tgt.share;
        total += ce + lambda * err * err;
    }
    Ok(total / T::lit(outputs.len() as f64))
}

/// Largest relative error between the analytic gradient and central finite
/// differences with step `eps`, over every parameter. Each relative error is
/// `|a - n| / max(|a| + |n|, floor)` so parameters with vanishing gradients
/// do not dominate.
pub fn gradient_check<T: Scalar>(
    network: &Network<T>,
    rows: &[Vec<T>],
    targets: &[StepTarget<T>],
    lambda: T,
    eps: T,
) -> Result<f64> {
    let (_, analytic) = network.loss_and_grad(rows, targets, lambda)?;
    let mut probe = network.clone();
    let mut worst = 0.0f64;
    for (i, &a) in analytic.iter().enumerate() {
        let base = probe.params[i];
        probe.params[i] = base + eps;
        let up = sequence_loss(&probe.forward(rows)?, targets, lambda)?;
        probe.params[i] = base - eps;
        let down = sequence_loss(&probe.forward(rows)?, targets, lambda)?;
        probe.params[i] = base;
        let numeric = ((up - down) / (eps + eps)).to_f64_lossy();
        let a = a.to_f64_lossy();
        let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dims() -> Dims {
        Dims {
            input: 5,
            hidden: 4,
            nodes: 2,
        }
    }

    #[test]
    fn parameter_layout() {
        let d = dims();
        assert_eq!(d.bias_offset(0), 16 * 9);
        assert_eq!(d.weight_offset(1), 16 * 9 + 16);
        assert_eq!(d.head_offset(), 16 * 9 + 16 + 16 * 8 + 16);
        assert_eq!(d.param_count(), d.head_offset() + 8 + 2 + 4 + 1);
    }

    #[test]
    fn zero_network_is_uninformative() {
        let net = Network::<f64>::zeros(dims());
        let rows = vec![vec![0.3, 0.1, 0.9, 0.5, 0.2]; 6];
        let out = net.forward(&rows).unwrap();
        assert_eq!(out.len(), 6);
        for o in out {
            assert_eq!(o.logits, vec![0.0, 0.0]);
            assert_eq!(o.share, 0.5);
        }
    }

    #[test]
    fn rejects_wrong_width() {
        let net = Network::<f64>::zeros(dims());
        assert!(matches!(net.forward(&[vec![0.0; 4]]), Err(Error::Dimension(_))));
    }

    #[test]
    fn finite_outputs_at_full_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = Dims {
            input: 8,
            hidden: 64,
            nodes: 2,
        };
        for _ in 0..20 {
            let mut net = Network::<f64>::random(d, &mut rng);
            // Blow the weights up to stress saturation.
            net.params.iter_mut().for_each(|p| *p *= 50.0);
            let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..8).map(|_| rng.gen::<f64>()).collect()).collect();
            for o in net.forward(&rows).unwrap() {
                assert!(o.logits.iter().all(|x| x.is_finite()));
                assert!(o.share.is_finite() && o.share >= 0.0 && o.share <= 1.0);
            }
        }
    }

    #[test]
    fn loss_floor_and_lambda() {
        let targets = [StepTarget { node: 1, share: 0.25 }];
        let confident = [StepOutput {
            logits: vec![-30.0, 30.0],
            share: 0.25,
        }];
        assert!(sequence_loss(&confident, &targets, 1.0).unwrap() < 1e-12);
        let vague = [StepOutput {
            logits: vec![0.0, 0.0],
            share: 0.75,
        }];
        let with = sequence_loss(&vague, &targets, 1.0).unwrap();
        let without = sequence_loss(&vague, &targets, 0.0).unwrap();
        assert!((without - 2f64.ln()).abs() < 1e-12);
        assert!((with - without - 0.25).abs() < 1e-12);
        let closer = [StepOutput {
            logits: vec![0.0, 1.0],
            share: 0.75,
        }];
        assert!(sequence_loss(&closer, &targets, 0.0).unwrap() < without);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let d = Dims {
            input: 8,
            hidden: 4,
            nodes: 2,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let net = Network::<f64>::random(d, &mut rng);
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..d.input).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let targets = vec![
            StepTarget { node: 0, share: 0.3 },
            StepTarget { node: 1, share: 0.8 },
            StepTarget { node: 1, share: 0.5 },
        ];
        let err = gradient_check(&net, &rows, &targets, 1.0, 1e-5).unwrap();
        assert!(err <= 1e-4, "relative error {err}");
    }
}
