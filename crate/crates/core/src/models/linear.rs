//! Softmax logistic regression and one-vs-rest linear SVM, both trained by
//! per-example stochastic (sub)gradient descent.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{check_training_set, log_softmax, TrainConfig};
use crate::error::{ModelError, ModelResult};
use crate::features::SparseVector;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Logistic,
    Svm,
}

/// `scores = W x + b` with `W` stored row-per-class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(kind: LinearKind, n_classes: usize, dim: usize) -> Self {
        LinearModel { kind, weights: vec![vec![0.0; dim]; n_classes], bias: vec![0.0; n_classes] }
    }

    pub fn n_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn scores(&self, x: &SparseVector) -> ModelResult<Vec<f64>> {
        if x.dim() != self.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.dim(), actual: x.dim() });
        }
        Ok(self.weights.iter().zip(&self.bias).map(|(w, b)| x.dot(w) + b).collect())
    }

    fn squared_norm(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w * w).sum()
    }
}

/// Mean softmax cross-entropy plus `(l2 / 2) * ||W||^2` (bias unpenalized).
pub fn logistic_objective(model: &LinearModel, x: &[SparseVector], y: &[usize], l2: f64) -> ModelResult<f64> {
    let mut loss = 0.0;
    for (v, &c) in x.iter().zip(y) {
        loss -= log_softmax(&model.scores(v)?)[c];
    }
    Ok(loss / x.len() as f64 + 0.5 * l2 * model.squared_norm())
}

/// Gradient of [`logistic_objective`] as a model-shaped value.
pub fn logistic_gradient(model: &LinearModel, x: &[SparseVector], y: &[usize], l2: f64) -> ModelResult<LinearModel> {
    let n = x.len() as f64;
    let mut grad = LinearModel::zeros(model.kind, model.n_classes(), model.dim());
    for (v, &c) in x.iter().zip(y) {
        let p: Vec<f64> = log_softmax(&model.scores(v)?).iter().map(|l| l.exp()).collect();
        for (k, pk) in p.iter().enumerate() {
            let d = (pk - f64::from(u8::from(k == c))) / n;
            grad.bias[k] += d;
            for &(i, xi) in v.entries() {
                grad.weights[k][i] += d * xi;
            }
        }
    }
    for (g, w) in grad.weights.iter_mut().flatten().zip(model.weights.iter().flatten()) {
        *g += l2 * w;
    }
    Ok(grad)
}

/// Weight rows held as `scale * raw` so the per-step L2 shrink is O(1).
struct ScaledRows {
    scale: f64,
    raw: Vec<Vec<f64>>,
}

impl ScaledRows {
    fn new(rows: usize, dim: usize) -> Self {
        ScaledRows { scale: 1.0, raw: vec![vec![0.0; dim]; rows] }
    }

    fn dot(&self, row: usize, x: &SparseVector) -> f64 {
        self.scale * x.dot(&self.raw[row])
    }

    fn shrink(&mut self, factor: f64) {
        if factor <= 0.0 {
            self.raw.iter_mut().flatten().for_each(|w| *w = 0.0);
            self.scale = 1.0;
            return;
        }
        self.scale *= factor;
        if self.scale < 1e-9 {
            let s = self.scale;
            self.raw.iter_mut().flatten().for_each(|w| *w *= s);
            self.scale = 1.0;
        }
    }

    fn add(&mut self, row: usize, x: &SparseVector, coef: f64) {
        let c = coef / self.scale;
        for &(i, xi) in x.entries() {
            self.raw[row][i] += c * xi;
        }
    }

    fn into_weights(self) -> Vec<Vec<f64>> {
        let s = self.scale;
        self.raw.into_iter().map(|row| row.into_iter().map(|w| w * s).collect()).collect()
    }
}

/// Per-example SGD on the softmax objective with step
/// `lr / (1 + lr * l2 * t)`, zero initialization and a seeded shuffle per epoch.
pub fn train_logistic(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
) -> ModelResult<LinearModel> {
    cfg.validate()?;
    let dim = check_training_set(x, y, n_classes)?;
    let mut w = ScaledRows::new(n_classes, dim);
    let mut bias = vec![0.0; n_classes];
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut shuffle_rng = rng::stream(cfg.seed, 0);
    let mut scores = vec![0.0; n_classes];
    let mut t = 0usize;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for &i in &order {
            let lr = cfg.learning_rate / (1.0 + cfg.learning_rate * cfg.l2_lambda * t as f64);
            for k in 0..n_classes {
                scores[k] = w.dot(k, &x[i]) + bias[k];
            }
            let logp = log_softmax(&scores);
            if !logp[y[i]].is_finite() {
                return Err(ModelError::Diverged { epoch, step: t });
            }
            w.shrink(1.0 - lr * cfg.l2_lambda);
            for k in 0..n_classes {
                let d = logp[k].exp() - f64::from(u8::from(k == y[i]));
                if d != 0.0 {
                    w.add(k, &x[i], -lr * d);
                    bias[k] -= lr * d;
                }
            }
            t += 1;
        }
    }
    let model = LinearModel { kind: LinearKind::Logistic, weights: w.into_weights(), bias };
    ensure_finite(&model)?;
    Ok(model)
}

fn ensure_finite(model: &LinearModel) -> ModelResult<()> {
    if model.weights.iter().flatten().chain(&model.bias).all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ModelError::Diverged { epoch: usize::MAX, step: usize::MAX })
    }
}

/// Subgradient of `(l2 / 2)(||w||^2 + b^2) + max(0, 1 - y (w.x + b))` for
/// one example with `y` in {-1, +1}. The bias is treated as the weight of a
/// constant feature.
pub fn hinge_subgradient(w: &[f64], b: f64, x: &SparseVector, y: f64, l2: f64) -> (Vec<f64>, f64) {
    let mut gw: Vec<f64> = w.iter().map(|v| l2 * v).collect();
    let mut gb = l2 * b;
    if y * (x.dot(w) + b) < 1.0 {
        for &(i, xi) in x.entries() {
            gw[i] -= y * xi;
        }
        gb -= y;
    }
    (gw, gb)
}

/// One-vs-rest Pegasos: for each class a binary hinge-loss machine trained
/// with step `1 / (l2 * t)`. Machine `k` shuffles with its own stream
/// derived from `(seed, k)`.
pub fn train_linear_svm(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
) -> ModelResult<LinearModel> {
    cfg.validate()?;
    if cfg.l2_lambda <= 0.0 {
        return Err(ModelError::Config("svm requires l2_lambda > 0".into()));
    }
    let dim = check_training_set(x, y, n_classes)?;
    let mut weights = Vec::with_capacity(n_classes);
    let mut bias = Vec::with_capacity(n_classes);
    for k in 0..n_classes {
        let (w, b) = train_binary_pegasos(x, y, k, dim, cfg)?;
        weights.push(w);
        bias.push(b);
    }
    let model = LinearModel { kind: LinearKind::Svm, weights, bias };
    ensure_finite(&model)?;
    Ok(model)
}

fn train_binary_pegasos(
    x: &[SparseVector],
    y: &[usize],
    positive: usize,
    dim: usize,
    cfg: &TrainConfig,
) -> ModelResult<(Vec<f64>, f64)> {
    let mut w = ScaledRows::new(1, dim);
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut shuffle_rng = rng::stream(cfg.seed, 1000 + positive as u64);
    let mut t = 0usize;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for &i in &order {
            t += 1;
            let lr = 1.0 / (cfg.l2_lambda * t as f64);
            let label = if y[i] == positive { 1.0 } else { -1.0 };
            let margin = label * (w.dot(0, &x[i]) + b);
            if !margin.is_finite() {
                return Err(ModelError::Diverged { epoch, step: t });
            }
            let shrink = 1.0 - lr * cfg.l2_lambda;
            w.shrink(shrink);
            b *= shrink;
            if margin < 1.0 {
                w.add(0, &x[i], lr * label);
                b += lr * label;
            }
        }
    }
    let w = w.into_weights().pop().unwrap_or_default();
    Ok((w, b))
}
