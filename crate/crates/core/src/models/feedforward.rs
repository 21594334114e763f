//! One-hidden-layer rectifier network over bag-of-words counts.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_training_set, log_softmax, TrainConfig};
use crate::error::{ModelError, ModelResult};
use crate::features::SparseVector;
use crate::rng;

/// Parameters of `softmax(W2 relu(W1 x + b1) + b2)`.
///
/// `input_weights` is `W1` transposed and flattened: the `hidden`-long
/// block starting at `i * hidden` holds the weights leaving input `i`, so a
/// sparse input touches only its own blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardModel {
    pub inputs: usize,
    pub hidden: usize,
    pub input_weights: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    /// `W2`, row-major `classes x hidden`.
    pub output_weights: Vec<f64>,
    pub output_bias: Vec<f64>,
}

struct Forward {
    pre: Vec<f64>,
    act: Vec<f64>,
    logits: Vec<f64>,
}

impl FeedForwardModel {
    pub fn zeros(inputs: usize, hidden: usize, classes: usize) -> Self {
        FeedForwardModel {
            inputs,
            hidden,
            input_weights: vec![0.0; inputs * hidden],
            hidden_bias: vec![0.0; hidden],
            output_weights: vec![0.0; classes * hidden],
            output_bias: vec![0.0; classes],
        }
    }

    /// Uniform initialization in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init(inputs: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut m = Self::zeros(inputs, hidden, classes);
        let mut r = rng::stream(seed, 0);
        let a = (6.0 / (inputs + hidden) as f64).sqrt();
        m.input_weights.iter_mut().for_each(|w| *w = r.gen_range(-a..=a));
        let a = (6.0 / (hidden + classes) as f64).sqrt();
        m.output_weights.iter_mut().for_each(|w| *w = r.gen_range(-a..=a));
        m
    }

    pub fn n_classes(&self) -> usize {
        self.output_bias.len()
    }

    pub fn dim(&self) -> usize {
        self.inputs
    }

    fn forward(&self, x: &SparseVector) -> Forward {
        let h = self.hidden;
        let mut pre = self.hidden_bias.clone();
        for &(i, xi) in x.entries() {
            let block = &self.input_weights[i * h..(i + 1) * h];
            for (z, w) in pre.iter_mut().zip(block) {
                *z += xi * w;
            }
        }
        let act: Vec<f64> = pre.iter().map(|&z| z.max(0.0)).collect();
        let logits = self
            .output_bias
            .iter()
            .enumerate()
            .map(|(k, b)| b + dot(&self.output_weights[k * h..(k + 1) * h], &act))
            .collect();
        Forward { pre, act, logits }
    }

    /// Output logits.
    pub fn scores(&self, x: &SparseVector) -> ModelResult<Vec<f64>> {
        if x.dim() != self.inputs {
            return Err(ModelError::DimensionMismatch { expected: self.inputs, actual: x.dim() });
        }
        Ok(self.forward(x).logits)
    }

    pub fn hidden_activations(&self, x: &SparseVector) -> Vec<f64> {
        self.forward(x).act
    }

    fn squared_weight_norm(&self) -> f64 {
        self.input_weights.iter().chain(&self.output_weights).map(|w| w * w).sum()
    }

    /// Accumulates `scale * dLoss/dParams` for one example into `grad`,
    /// returning the example's cross-entropy.
    fn backprop(&self, x: &SparseVector, label: usize, scale: f64, grad: &mut FeedForwardModel) -> f64 {
        let h = self.hidden;
        let f = self.forward(x);
        let logp = log_softmax(&f.logits);
        let mut delta_hidden = vec![0.0; h];
        for (k, lp) in logp.iter().enumerate() {
            let d = scale * (lp.exp() - f64::from(u8::from(k == label)));
            grad.output_bias[k] += d;
            let row = k * h..(k + 1) * h;
            for ((g, w), (a, dh)) in grad.output_weights[row.clone()]
                .iter_mut()
                .zip(&self.output_weights[row])
                .zip(f.act.iter().zip(delta_hidden.iter_mut()))
            {
                *g += d * a;
                *dh += d * w;
            }
        }
        for (dh, &z) in delta_hidden.iter_mut().zip(&f.pre) {
            if z <= 0.0 {
                *dh = 0.0;
            }
        }
        for (g, dh) in grad.hidden_bias.iter_mut().zip(&delta_hidden) {
            *g += dh;
        }
        for &(i, xi) in x.entries() {
            for (g, dh) in grad.input_weights[i * h..(i + 1) * h].iter_mut().zip(&delta_hidden) {
                *g += xi * dh;
            }
        }
        -logp[label]
    }

    /// Flat view of every parameter, in a fixed order.
    pub fn params(&self) -> Vec<f64> {
        [&self.input_weights, &self.hidden_bias, &self.output_weights, &self.output_bias]
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        let mut it = flat.iter().copied();
        for slot in [&mut self.input_weights, &mut self.hidden_bias, &mut self.output_weights, &mut self.output_bias] {
            slot.iter_mut().for_each(|p| *p = it.next().expect("parameter count"));
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean cross-entropy plus `(l2 / 2)` times the squared weight norm (biases unpenalized).
pub fn feedforward_objective(model: &FeedForwardModel, x: &[SparseVector], y: &[usize], l2: f64) -> ModelResult<f64> {
    let mut loss = 0.0;
    for (v, &c) in x.iter().zip(y) {
        loss -= log_softmax(&model.scores(v)?)[c];
    }
    Ok(loss / x.len() as f64 + 0.5 * l2 * model.squared_weight_norm())
}

/// Backpropagated gradient of [`feedforward_objective`].
pub fn feedforward_gradient(
    model: &FeedForwardModel,
    x: &[SparseVector],
    y: &[usize],
    l2: f64,
) -> ModelResult<FeedForwardModel> {
    let mut grad = FeedForwardModel::zeros(model.inputs, model.hidden, model.n_classes());
    let scale = 1.0 / x.len() as f64;
    for (v, &c) in x.iter().zip(y) {
        if v.dim() != model.inputs {
            return Err(ModelError::DimensionMismatch { expected: model.inputs, actual: v.dim() });
        }
        model.backprop(v, c, scale, &mut grad);
    }
    for (g, w) in grad.input_weights.iter_mut().zip(&model.input_weights) {
        *g += l2 * w;
    }
    for (g, w) in grad.output_weights.iter_mut().zip(&model.output_weights) {
        *g += l2 * w;
    }
    Ok(grad)
}

/// Per-example SGD with backpropagation, constant learning rate.
pub fn train_feedforward(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
) -> ModelResult<FeedForwardModel> {
    cfg.validate()?;
    if cfg.hidden_units == 0 {
        return Err(ModelError::Config("hidden_units must be at least 1".into()));
    }
    let dim = check_training_set(x, y, n_classes)?;
    let mut model = FeedForwardModel::init(dim, cfg.hidden_units, n_classes, cfg.seed);
    let mut grad = FeedForwardModel::zeros(dim, cfg.hidden_units, n_classes);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut shuffle_rng = rng::stream(cfg.seed, 1);
    let h = cfg.hidden_units;
    let lr = cfg.learning_rate;
    let mut step = 0;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for &i in &order {
            let loss = model.backprop(&x[i], y[i], 1.0, &mut grad);
            if !loss.is_finite() {
                return Err(ModelError::Diverged { epoch, step });
            }
            if cfg.l2_lambda > 0.0 {
                let shrink = 1.0 - lr * cfg.l2_lambda;
                model.input_weights.iter_mut().for_each(|w| *w *= shrink);
                model.output_weights.iter_mut().for_each(|w| *w *= shrink);
            }
            // only the touched input blocks are nonzero in `grad`
            for &(j, _) in x[i].entries() {
                for (w, g) in
                    model.input_weights[j * h..(j + 1) * h].iter_mut().zip(&mut grad.input_weights[j * h..(j + 1) * h])
                {
                    *w -= lr * *g;
                    *g = 0.0;
                }
            }
            for (w, g) in model
                .hidden_bias
                .iter_mut()
                .chain(model.output_weights.iter_mut())
                .chain(model.output_bias.iter_mut())
                .zip(
                    grad.hidden_bias
                        .iter_mut()
                        .chain(grad.output_weights.iter_mut())
                        .chain(grad.output_bias.iter_mut()),
                )
            {
                *w -= lr * *g;
                *g = 0.0;
            }
            step += 1;
        }
    }
    if !model.params().iter().all(|p| p.is_finite()) {
        return Err(ModelError::Diverged { epoch: cfg.epochs, step });
    }
    Ok(model)
}
