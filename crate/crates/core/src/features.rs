//! Vocabulary fitting and sparse bag-of-words / TF-IDF vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{DataError, DataResult, ModelError, ModelResult};

/// Token-to-index map with per-token document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    document_frequency: Vec<usize>,
    n_docs: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    tokens: Vec<String>,
    document_frequency: Vec<usize>,
    n_docs: usize,
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = String;

    fn try_from(r: VocabularyRepr) -> Result<Self, String> {
        if r.tokens.len() != r.document_frequency.len() {
            return Err("vocabulary token and frequency lists differ in length".into());
        }
        let index: HashMap<String, usize> = r.tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if index.len() != r.tokens.len() {
            return Err("vocabulary has duplicate tokens".into());
        }
        if r.document_frequency.iter().any(|&df| df > r.n_docs) {
            return Err("document frequency exceeds document count".into());
        }
        Ok(Vocabulary { tokens: r.tokens, index, document_frequency: r.document_frequency, n_docs: r.n_docs })
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr { tokens: v.tokens, document_frequency: v.document_frequency, n_docs: v.n_docs }
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn document_frequency(&self, index: usize) -> usize {
        self.document_frequency[index]
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }
}

/// Keeps tokens with document frequency `>= min_df`, optionally the top
/// `max_features` by (df desc, token asc). Indices follow lexicographic
/// token order.
pub fn fit_vocabulary<S: AsRef<str>>(
    docs: &[Vec<S>],
    min_df: usize,
    max_features: Option<usize>,
) -> DataResult<Vocabulary> {
    if docs.is_empty() {
        return Err(DataError::Empty("cannot fit a vocabulary on zero documents".into()));
    }
    if min_df == 0 {
        return Err(DataError::Invalid("min_df must be at least 1".into()));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let unique: HashSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, n)| n >= min_df).collect();
    if let Some(limit) = max_features {
        if kept.len() > limit {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            kept.truncate(limit);
            kept.sort_by(|a, b| a.0.cmp(b.0));
        }
    }
    if kept.is_empty() {
        return Err(DataError::Empty("every token was filtered out of the vocabulary".into()));
    }
    let tokens: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
    let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary { tokens, index, document_frequency: kept.iter().map(|&(_, n)| n).collect(), n_docs: docs.len() })
}

/// Sorted `(index, value)` pairs with no stored zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        SparseVector { dim, entries: Vec::new() }
    }

    /// Builds a vector from arbitrary pairs: duplicates are summed, zeros dropped.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> DataResult<Self> {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, v) in pairs {
            if i >= dim {
                return Err(DataError::Invalid(format!("index {i} out of range for dimension {dim}")));
            }
            *acc.entry(i).or_default() += v;
        }
        Ok(SparseVector { dim, entries: acc.into_iter().filter(|&(_, v)| v != 0.0).collect() })
    }

    /// Dense slice to sparse.
    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, &v)| (i, v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Multiplicity of each in-vocabulary token; unknown tokens are dropped.
pub fn count_vector<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    SparseVector { dim: vocab.len(), entries: counts.into_iter().collect() }
}

/// Smoothed inverse document frequency, `ln((1 + n) / (1 + df)) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfWeights {
    pub weights: Vec<f64>,
    pub n_docs: usize,
}

pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

pub fn fit_idf(vectors: &[SparseVector], vocab: &Vocabulary) -> DataResult<IdfWeights> {
    if vectors.is_empty() {
        return Err(DataError::Empty("cannot fit idf on zero documents".into()));
    }
    let mut df = vec![0usize; vocab.len()];
    for v in vectors {
        if v.dim != vocab.len() {
            return Err(DataError::Invalid(format!(
                "vector dimension {} does not match vocabulary size {}",
                v.dim,
                vocab.len()
            )));
        }
        for &(i, _) in &v.entries {
            df[i] += 1;
        }
    }
    Ok(IdfWeights { weights: df.iter().map(|&d| smoothed_idf(vectors.len(), d)).collect(), n_docs: vectors.len() })
}

/// Scales counts by idf and L2-normalizes; the zero vector stays zero.
pub fn tfidf(counts: &SparseVector, idf: &IdfWeights) -> ModelResult<SparseVector> {
    if counts.dim != idf.weights.len() {
        return Err(ModelError::DimensionMismatch { expected: idf.weights.len(), actual: counts.dim });
    }
    let scaled: Vec<(usize, f64)> = counts.entries.iter().map(|&(i, c)| (i, c * idf.weights[i])).collect();
    let norm = scaled.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
    let entries = if norm > 0.0 { scaled.into_iter().map(|(i, v)| (i, v / norm)).collect() } else { Vec::new() };
    Ok(SparseVector { dim: counts.dim, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Counts,
    Tfidf,
}

/// Fitted text-to-vector transform stored alongside every model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Featurizer {
    pub kind: FeatureKind,
    pub vocabulary: Vocabulary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idf: Option<IdfWeights>,
}

impl Featurizer {
    pub fn fit<S: AsRef<str>>(
        docs: &[Vec<S>],
        kind: FeatureKind,
        min_df: usize,
        max_features: Option<usize>,
    ) -> DataResult<Self> {
        let vocabulary = fit_vocabulary(docs, min_df, max_features)?;
        let idf = match kind {
            FeatureKind::Counts => None,
            FeatureKind::Tfidf => {
                let counts: Vec<SparseVector> = docs.iter().map(|d| count_vector(d, &vocabulary)).collect();
                Some(fit_idf(&counts, &vocabulary)?)
            }
        };
        Ok(Featurizer { kind, vocabulary, idf })
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn transform<S: AsRef<str>>(&self, tokens: &[S]) -> ModelResult<SparseVector> {
        let counts = count_vector(tokens, &self.vocabulary);
        match (self.kind, &self.idf) {
            (FeatureKind::Counts, _) => Ok(counts),
            (FeatureKind::Tfidf, Some(idf)) => tfidf(&counts, idf),
            (FeatureKind::Tfidf, None) => Err(ModelError::Malformed("tfidf featurizer without idf weights".into())),
        }
    }
}
