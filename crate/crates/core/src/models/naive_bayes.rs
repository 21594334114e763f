use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ModelResult};
use crate::features::SparseVector;

/// Multinomial Naive Bayes with additive smoothing, stored in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    pub log_prior: Vec<f64>,
    /// `log_likelihood[class][token]`.
    pub log_likelihood: Vec<Vec<f64>>,
}

pub fn train_naive_bayes(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    alpha: f64,
) -> ModelResult<NaiveBayesModel> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ModelError::Config(format!("nb alpha must be positive, got {alpha}")));
    }
    let dim = super::check_training_set(x, y, n_classes)?;
    let mut doc_counts = vec![0usize; n_classes];
    let mut token_counts = vec![vec![0.0f64; dim]; n_classes];
    for (v, &c) in x.iter().zip(y) {
        doc_counts[c] += 1;
        for &(i, count) in v.entries() {
            token_counts[c][i] += count;
        }
    }
    if let Some(empty) = doc_counts.iter().position(|&n| n == 0) {
        return Err(ModelError::EmptyClass(format!("class index {empty}")));
    }
    let n = x.len() as f64;
    let log_prior = doc_counts.iter().map(|&c| (c as f64 / n).ln()).collect();
    let log_likelihood = token_counts
        .iter()
        .map(|counts| {
            let total: f64 = counts.iter().sum::<f64>() + alpha * dim as f64;
            counts.iter().map(|&c| ((c + alpha) / total).ln()).collect()
        })
        .collect();
    Ok(NaiveBayesModel { alpha, log_prior, log_likelihood })
}

impl NaiveBayesModel {
    pub fn n_classes(&self) -> usize {
        self.log_prior.len()
    }

    pub fn dim(&self) -> usize {
        self.log_likelihood.first().map_or(0, Vec::len)
    }

    /// Unnormalized log posterior: `log P(c) + sum_t count(t) log P(t | c)`.
    pub fn log_posterior(&self, x: &SparseVector) -> ModelResult<Vec<f64>> {
        if x.dim() != self.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.dim(), actual: x.dim() });
        }
        Ok(self
            .log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(&prior, ll)| prior + x.entries().iter().map(|&(i, c)| c * ll[i]).sum::<f64>())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::categories::argmax;
    use approx::assert_relative_eq;

    // x = index 0, y = index 1
    fn toy() -> (Vec<SparseVector>, Vec<usize>) {
        let v = |x: f64, y: f64| SparseVector::from_dense(&[x, y]);
        (vec![v(2.0, 0.0), v(1.0, 1.0), v(0.0, 2.0)], vec![0, 0, 1])
    }

    #[test]
    fn hand_computed_parameters() {
        let (x, y) = toy();
        let m = train_naive_bayes(&x, &y, 2, 1.0).unwrap();
        assert_relative_eq!(m.log_prior[0].exp(), 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(m.log_likelihood[0][0].exp(), 4.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(m.log_likelihood[0][1].exp(), 2.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(m.log_likelihood[1][0].exp(), 1.0 / 4.0, epsilon = 1e-12);
        assert_relative_eq!(m.log_likelihood[1][1].exp(), 3.0 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn posterior_examples() {
        let (x, y) = toy();
        let m = train_naive_bayes(&x, &y, 2, 1.0).unwrap();
        let s = m.log_posterior(&SparseVector::from_dense(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(s[0], (2.0f64 / 3.0 * 2.0 / 3.0).ln(), epsilon = 1e-12);
        assert_relative_eq!(s[1], (1.0f64 / 3.0 * 1.0 / 4.0).ln(), epsilon = 1e-12);
        assert_eq!(argmax(&s), 0);
        let empty = m.log_posterior(&SparseVector::empty(2)).unwrap();
        assert_eq!(empty, m.log_prior);
        assert!(m.log_posterior(&SparseVector::empty(3)).is_err());
    }

    #[test]
    fn single_class_and_ties() {
        let (x, _) = toy();
        let m = train_naive_bayes(&x, &[0, 0, 0], 1, 1.0).unwrap();
        assert_eq!(m.log_prior, [0.0]);
        // two classes trained on identical data score identically
        let x2 = [x.clone(), x].concat();
        let m = train_naive_bayes(&x2, &[0, 0, 0, 1, 1, 1], 2, 0.5).unwrap();
        let s = m.log_posterior(&SparseVector::from_dense(&[3.0, 1.0])).unwrap();
        assert_eq!(s[0], s[1]);
        assert_eq!(argmax(&s), 0);
    }

    #[test]
    fn mirrored_data_mirrored_likelihoods() {
        let v = |a: f64, b: f64| SparseVector::from_dense(&[a, b]);
        let x = vec![v(3.0, 1.0), v(2.0, 0.0), v(1.0, 3.0), v(0.0, 2.0)];
        let m = train_naive_bayes(&x, &[0, 0, 1, 1], 2, 1.0).unwrap();
        assert_eq!(m.log_likelihood[0][0], m.log_likelihood[1][1]);
        assert_eq!(m.log_likelihood[0][1], m.log_likelihood[1][0]);
    }

    #[test]
    fn errors() {
        let (x, y) = toy();
        assert!(matches!(train_naive_bayes(&x, &y, 3, 1.0), Err(ModelError::EmptyClass(_))));
        assert!(train_naive_bayes(&x, &y, 2, 0.0).is_err());
        assert!(train_naive_bayes(&x, &[0, 5, 0], 2, 1.0).is_err());
    }

    #[test]
    fn distributions_normalized() {
        let (x, y) = toy();
        let m = train_naive_bayes(&x, &y, 2, 0.3).unwrap();
        let prior: f64 = m.log_prior.iter().map(|l| l.exp()).sum();
        assert!((prior - 1.0).abs() < 1e-9);
        for row in &m.log_likelihood {
            assert!((row.iter().map(|l| l.exp()).sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
