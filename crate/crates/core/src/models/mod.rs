//! The four multiclass engines and the shared inference contract.

mod feedforward;
mod linear;
mod naive_bayes;
mod persist;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use feedforward::{feedforward_gradient, feedforward_objective, train_feedforward, FeedForwardModel};
pub use linear::{
    hinge_subgradient, logistic_gradient, logistic_objective, train_linear_svm, train_logistic, LinearKind, LinearModel,
};
pub use naive_bayes::{train_naive_bayes, NaiveBayesModel};
pub use persist::{load_model, read_model, save_model, write_model, FORMAT_VERSION};

use crate::categories::{argmax, CategorySet};
use crate::corpus::Document;
use crate::error::{DataError, ModelError, ModelResult};
use crate::features::{FeatureKind, Featurizer, SparseVector};
use crate::textprep::analyze;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "logreg")]
    Logistic,
    #[serde(rename = "svm")]
    Svm,
    #[serde(rename = "ffnn")]
    FeedForward,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] =
        [ModelKind::NaiveBayes, ModelKind::Logistic, ModelKind::Svm, ModelKind::FeedForward];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "nb",
            ModelKind::Logistic => "logreg",
            ModelKind::Svm => "svm",
            ModelKind::FeedForward => "ffnn",
        }
    }

    /// Display name used in reports.
    pub fn title(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "Naive Bayes",
            ModelKind::Logistic => "Logistic Regression",
            ModelKind::Svm => "Linear SVM",
            ModelKind::FeedForward => "BOW Feed-Forward",
        }
    }

    /// Raw counts for the generative and network models, TF-IDF for the linear ones.
    pub fn default_features(self) -> FeatureKind {
        match self {
            ModelKind::NaiveBayes | ModelKind::FeedForward => FeatureKind::Counts,
            ModelKind::Logistic | ModelKind::Svm => FeatureKind::Tfidf,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nb" | "naive-bayes" => Ok(ModelKind::NaiveBayes),
            "logreg" | "logistic" => Ok(ModelKind::Logistic),
            "svm" | "linear-svm" => Ok(ModelKind::Svm),
            "ffnn" | "feedforward" | "bow-net" => Ok(ModelKind::FeedForward),
            other => Err(format!("unknown model `{other}` (expected nb, logreg, svm or ffnn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub seed: u64,
    pub hidden_units: usize,
    pub nb_alpha: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::for_kind(ModelKind::Logistic)
    }
}

impl TrainConfig {
    pub fn for_kind(kind: ModelKind) -> Self {
        let base =
            TrainConfig { epochs: 20, learning_rate: 0.1, l2_lambda: 1e-4, seed: 42, hidden_units: 64, nb_alpha: 1.0 };
        match kind {
            ModelKind::NaiveBayes | ModelKind::Logistic | ModelKind::Svm => base,
            ModelKind::FeedForward => TrainConfig { epochs: 30, learning_rate: 0.05, l2_lambda: 0.0, ..base },
        }
    }

    pub fn validate(&self) -> ModelResult<()> {
        let fail = |m: String| Err(ModelError::Config(m));
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return fail(format!("l2_lambda must be non-negative, got {}", self.l2_lambda));
        }
        if !(self.nb_alpha > 0.0 && self.nb_alpha.is_finite()) {
            return fail(format!("nb_alpha must be positive, got {}", self.nb_alpha));
        }
        Ok(())
    }
}

/// Vocabulary settings used when fitting a model's featurizer.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub min_df: usize,
    pub max_features: Option<usize>,
    /// Overrides the model's default pairing when set.
    pub kind: Option<FeatureKind>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { min_df: 2, max_features: Some(20000), kind: None }
    }
}

/// Numerically stable `log softmax`.
pub fn log_softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    scores.iter().map(|s| s - lse).collect()
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    log_softmax(scores).into_iter().map(f64::exp).collect()
}

/// Checks shapes and labels; returns the shared input dimension.
pub(crate) fn check_training_set(x: &[SparseVector], y: &[usize], n_classes: usize) -> ModelResult<usize> {
    if x.is_empty() {
        return Err(ModelError::Data(DataError::Empty("no training documents".into())));
    }
    if x.len() != y.len() {
        return Err(ModelError::Config(format!("{} vectors but {} labels", x.len(), y.len())));
    }
    if n_classes == 0 {
        return Err(ModelError::Config("need at least one class".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(ModelError::Config(format!("label {bad} out of range for {n_classes} classes")));
    }
    let dim = x[0].dim();
    if let Some(v) = x.iter().find(|v| v.dim() != dim) {
        return Err(ModelError::DimensionMismatch { expected: dim, actual: v.dim() });
    }
    Ok(dim)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(NaiveBayesModel),
    Linear(LinearModel),
    FeedForward(FeedForwardModel),
}

impl ModelParams {
    pub fn scores(&self, x: &SparseVector) -> ModelResult<Vec<f64>> {
        match self {
            ModelParams::NaiveBayes(m) => m.log_posterior(x),
            ModelParams::Linear(m) => m.scores(x),
            ModelParams::FeedForward(m) => m.scores(x),
        }
    }
}

/// A trained classifier with everything needed to run it on raw text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub categories: CategorySet,
    pub featurizer: Featurizer,
    pub config: TrainConfig,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

impl TrainedModel {
    /// Label and per-class scores for an already featurized document.
    pub fn predict(&self, x: &SparseVector) -> ModelResult<Prediction> {
        if x.dim() != self.featurizer.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.featurizer.dim(), actual: x.dim() });
        }
        let scores = self.params.scores(x)?;
        Ok(Prediction { label: argmax(&scores), scores })
    }

    pub fn featurize(&self, text: &str) -> ModelResult<SparseVector> {
        self.featurizer.transform(&analyze(text))
    }

    pub fn predict_text(&self, text: &str) -> ModelResult<Prediction> {
        self.predict(&self.featurize(text)?)
    }

    pub fn predict_batch(&self, docs: &[Document]) -> ModelResult<Vec<Prediction>> {
        docs.iter().map(|d| self.predict_text(&d.text)).collect()
    }
}

/// Featurizes labeled documents and trains the requested model.
pub fn train_model(
    kind: ModelKind,
    docs: &[Document],
    categories: &CategorySet,
    features: &FeatureConfig,
    config: &TrainConfig,
) -> ModelResult<TrainedModel> {
    config.validate()?;
    let labels = docs
        .iter()
        .map(|d| {
            let name = d.label.as_deref().ok_or_else(|| DataError::Document {
                id: d.id.clone(),
                message: "training document is unlabeled".into(),
            })?;
            Ok(categories.require(name)?)
        })
        .collect::<ModelResult<Vec<usize>>>()?;
    if kind == ModelKind::NaiveBayes {
        let mut seen = vec![false; categories.len()];
        labels.iter().for_each(|&c| seen[c] = true);
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(ModelError::EmptyClass(categories.name(missing).to_string()));
        }
    }
    let tokens: Vec<Vec<String>> = docs.iter().map(|d| analyze(&d.text)).collect();
    let feature_kind = features.kind.unwrap_or_else(|| kind.default_features());
    let featurizer = Featurizer::fit(&tokens, feature_kind, features.min_df, features.max_features)?;
    let x = tokens.iter().map(|t| featurizer.transform(t)).collect::<ModelResult<Vec<_>>>()?;
    let k = categories.len();
    let params = match kind {
        ModelKind::NaiveBayes => ModelParams::NaiveBayes(train_naive_bayes(&x, &labels, k, config.nb_alpha)?),
        ModelKind::Logistic => ModelParams::Linear(train_logistic(&x, &labels, k, config)?),
        ModelKind::Svm => ModelParams::Linear(train_linear_svm(&x, &labels, k, config)?),
        ModelKind::FeedForward => ModelParams::FeedForward(train_feedforward(&x, &labels, k, config)?),
    };
    Ok(TrainedModel { kind, categories: categories.clone(), featurizer, config: config.clone(), params })
}
