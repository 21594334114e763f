//! Reference implementations that share no code with the library: metrics by
//! per-document counting, Naive Bayes by direct Bayes-rule products, and
//! gradients by central differences.
#![allow(dead_code)]

use negclass_core::eval::{aggregate, confusion, per_class_metrics};
use negclass_core::features::SparseVector;
use negclass_core::models::{
    feedforward_gradient, feedforward_objective, logistic_gradient, logistic_objective, train_naive_bayes,
    FeedForwardModel, LinearKind, LinearModel,
};
use negclass_core::rng;
use rand::Rng;

/// Random (truth, predicted) with skewed class frequencies so that some
/// classes are rare or absent.
pub fn random_labels(r: &mut impl Rng, n: usize, k: usize) -> (Vec<usize>, Vec<usize>) {
    let weights: Vec<f64> = (0..k).map(|_| r.gen::<f64>().powi(3)).collect();
    let total: f64 = weights.iter().sum();
    let draw = |r: &mut dyn rand::RngCore| {
        let mut u = r.gen::<f64>() * total;
        for (c, w) in weights.iter().enumerate() {
            if u < *w {
                return c;
            }
            u -= w;
        }
        k - 1
    };
    let truth: Vec<usize> = (0..n).map(|_| draw(r)).collect();
    let pred = truth.iter().map(|&t| if r.gen_bool(0.6) { t } else { r.gen_range(0..k) }).collect();
    (truth, pred)
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

pub struct BruteMetrics {
    /// (precision, recall, f1, support) per class.
    pub per_class: Vec<(f64, f64, f64, u64)>,
    pub accuracy: f64,
    pub macro_avg: (f64, f64, f64),
    pub weighted_avg: (f64, f64, f64),
}

pub fn brute_metrics(truth: &[usize], pred: &[usize], k: usize) -> BruteMetrics {
    let mut per_class = Vec::new();
    for c in 0..k {
        let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
        for (&t, &p) in truth.iter().zip(pred) {
            match (t == c, p == c) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        let precision = safe_div(tp as f64, (tp + fp) as f64);
        let recall = safe_div(tp as f64, (tp + fn_) as f64);
        let f1 = safe_div(2.0 * precision * recall, precision + recall);
        per_class.push((precision, recall, f1, tp + fn_));
    }
    let correct = truth.iter().zip(pred).filter(|(t, p)| t == p).count();
    let n = truth.len() as f64;
    let mut macro_avg = (0.0, 0.0, 0.0);
    let mut weighted_avg = (0.0, 0.0, 0.0);
    for &(p, r, f, s) in &per_class {
        macro_avg.0 += p / k as f64;
        macro_avg.1 += r / k as f64;
        macro_avg.2 += f / k as f64;
        let w = s as f64 / n;
        weighted_avg.0 += p * w;
        weighted_avg.1 += r * w;
        weighted_avg.2 += f * w;
    }
    BruteMetrics { per_class, accuracy: correct as f64 / n, macro_avg, weighted_avg }
}

/// Largest absolute deviation between the library and the counting oracle
/// over `instances` random problems.
pub fn metric_max_error(instances: usize, n_docs: usize, k: usize, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..instances {
        let mut r = rng::stream(seed, i as u64);
        let (truth, pred) = random_labels(&mut r, n_docs, k);
        let m = confusion(&truth, &pred, k).unwrap();
        let lib = per_class_metrics(&m);
        let sum = aggregate(&lib, &m).unwrap();
        let oracle = brute_metrics(&truth, &pred, k);
        for (a, b) in lib.iter().zip(&oracle.per_class) {
            assert_eq!(a.support, b.3, "support differs");
            worst = worst.max((a.precision - b.0).abs()).max((a.recall - b.1).abs()).max((a.f1 - b.2).abs());
        }
        worst = worst
            .max((sum.accuracy - oracle.accuracy).abs())
            .max((sum.macro_avg.precision - oracle.macro_avg.0).abs())
            .max((sum.macro_avg.recall - oracle.macro_avg.1).abs())
            .max((sum.macro_avg.f1 - oracle.macro_avg.2).abs())
            .max((sum.weighted_avg.precision - oracle.weighted_avg.0).abs())
            .max((sum.weighted_avg.recall - oracle.weighted_avg.1).abs())
            .max((sum.weighted_avg.f1 - oracle.weighted_avg.2).abs());
    }
    worst
}

fn gradient_instance(r: &mut impl Rng, n: usize, v: usize, k: usize) -> (Vec<SparseVector>, Vec<usize>) {
    let x = (0..n)
        .map(|_| {
            let dense: Vec<f64> = (0..v).map(|_| if r.gen_bool(0.4) { 0.0 } else { r.gen_range(0.0..2.0) }).collect();
            SparseVector::from_dense(&dense)
        })
        .collect();
    let y = (0..n).map(|_| r.gen_range(0..k)).collect();
    (x, y)
}

fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, b)| a - b).collect();
    let scale = norm(analytic).max(norm(numeric));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

fn central_differences(theta: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = theta.to_vec();
    (0..theta.len())
        .map(|j| {
            p[j] = theta[j] + h;
            let up = f(&p);
            p[j] = theta[j] - h;
            let down = f(&p);
            p[j] = theta[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn linear_flat(m: &LinearModel) -> Vec<f64> {
    m.weights.iter().flatten().chain(&m.bias).copied().collect()
}

fn linear_from_flat(flat: &[f64], k: usize, v: usize) -> LinearModel {
    LinearModel {
        kind: LinearKind::Logistic,
        weights: flat[..k * v].chunks(v).map(<[f64]>::to_vec).collect(),
        bias: flat[k * v..].to_vec(),
    }
}

/// Worst relative gradient error of the softmax objective over `points`
/// random parameter vectors.
pub fn logistic_gradient_error(points: usize, n: usize, v: usize, k: usize, h: f64, seed: u64) -> f64 {
    let mut r = rng::stream(seed, 0);
    let (x, y) = gradient_instance(&mut r, n, v, k);
    let l2 = 0.01;
    (0..points)
        .map(|_| {
            let theta: Vec<f64> = (0..k * v + k).map(|_| r.gen_range(-1.0..1.0)).collect();
            let model = linear_from_flat(&theta, k, v);
            let analytic = linear_flat(&logistic_gradient(&model, &x, &y, l2).unwrap());
            let numeric =
                central_differences(&theta, h, |p| logistic_objective(&linear_from_flat(p, k, v), &x, &y, l2).unwrap());
            relative_error(&analytic, &numeric)
        })
        .fold(0.0, f64::max)
}

/// Same for the one-hidden-layer network.
pub fn feedforward_gradient_error(points: usize, n: usize, v: usize, k: usize, h: f64, seed: u64) -> f64 {
    let hidden = 4;
    let mut r = rng::stream(seed, 1);
    let (x, y) = gradient_instance(&mut r, n, v, k);
    let l2 = 0.01;
    let template = FeedForwardModel::zeros(v, hidden, k);
    let size = template.params().len();
    (0..points)
        .map(|_| {
            let theta: Vec<f64> = (0..size).map(|_| r.gen_range(-1.0..1.0)).collect();
            let mut model = template.clone();
            model.set_params(&theta);
            let analytic = feedforward_gradient(&model, &x, &y, l2).unwrap().params();
            let mut probe = template.clone();
            let numeric = central_differences(&theta, h, |p| {
                probe.set_params(p);
                feedforward_objective(&probe, &x, &y, l2).unwrap()
            });
            relative_error(&analytic, &numeric)
        })
        .fold(0.0, f64::max)
}

/// Log of `P(c) * prod_tokens P(t | c)` computed by counting tokens directly.
fn bayes_rule_log_joint(
    docs: &[Vec<usize>],
    labels: &[usize],
    k: usize,
    v: usize,
    alpha: f64,
    query: &[usize],
) -> Vec<f64> {
    (0..k)
        .map(|c| {
            let members: Vec<&Vec<usize>> = docs.iter().zip(labels).filter(|(_, &l)| l == c).map(|(d, _)| d).collect();
            let prior = members.len() as f64 / docs.len() as f64;
            let total: usize = members.iter().map(|d| d.len()).sum();
            let mut joint = prior;
            for &t in query {
                let count = members.iter().flat_map(|d| d.iter()).filter(|&&u| u == t).count();
                joint *= (count as f64 + alpha) / (total as f64 + alpha * v as f64);
            }
            joint.ln()
        })
        .collect()
}

fn counts(doc: &[usize], v: usize) -> SparseVector {
    let mut dense = vec![0.0; v];
    doc.iter().for_each(|&t| dense[t] += 1.0);
    SparseVector::from_dense(&dense)
}

/// Worst absolute log-posterior deviation over `trials` random corpora with
/// V <= 5, K <= 3 and at most 20 documents.
pub fn naive_bayes_max_error(trials: usize, seed: u64) -> f64 {
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let mut r = rng::stream(seed, trial as u64);
        let v = r.gen_range(1..=5);
        let k = r.gen_range(1..=3);
        let n = r.gen_range(k..=20);
        let alpha = r.gen_range(0.1..2.0);
        // the first k documents cover every class
        let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.gen_range(0..k) }).collect();
        let docs: Vec<Vec<usize>> =
            (0..n).map(|_| (0..r.gen_range(0..=6)).map(|_| r.gen_range(0..v)).collect()).collect();
        let x: Vec<SparseVector> = docs.iter().map(|d| counts(d, v)).collect();
        let model = train_naive_bayes(&x, &labels, k, alpha).unwrap();
        let mut queries = docs.clone();
        queries.push(Vec::new());
        queries.extend((0..5).map(|_| (0..r.gen_range(1..=8)).map(|_| r.gen_range(0..v)).collect()));
        for q in &queries {
            let lib = model.log_posterior(&counts(q, v)).unwrap();
            let oracle = bayes_rule_log_joint(&docs, &labels, k, v, alpha, q);
            for (a, b) in lib.iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}
