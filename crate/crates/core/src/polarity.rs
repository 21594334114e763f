//! Stage-one gate: picks the negative documents that go on to the
//! multiclass models, either by lexicon score or from a pre-labeled column.

use std::collections::HashSet;
use std::path::Path;

use crate::corpus::{Document, Polarity};
use crate::error::{DataError, DataResult};
use crate::textprep::analyze;

#[derive(Debug, Clone)]
pub struct PolarityLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl PolarityLexicon {
    pub fn new<S: AsRef<str>>(
        positive: impl IntoIterator<Item = S>,
        negative: impl IntoIterator<Item = S>,
    ) -> DataResult<Self> {
        let positive: HashSet<String> = positive.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        let negative: HashSet<String> = negative.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        Self::checked(positive, negative)
    }

    fn checked(positive: HashSet<String>, negative: HashSet<String>) -> DataResult<Self> {
        if positive.is_empty() || negative.is_empty() {
            return Err(DataError::Invalid("lexicon needs both positive and negative entries".into()));
        }
        if let Some(both) = positive.intersection(&negative).min() {
            return Err(DataError::Invalid(format!("token `{both}` is both positive and negative")));
        }
        Ok(PolarityLexicon { positive, negative })
    }

    /// Parses `token<TAB>pos|neg` lines; `#` comments and blank lines are skipped.
    pub fn parse(source: &str, origin: &str) -> DataResult<Self> {
        let mut positive = HashSet::new();
        let mut negative = HashSet::new();
        for (n, line) in source.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |field: &str, message: String| DataError::Field {
                path: origin.to_string(),
                line: n + 1,
                field: field.to_string(),
                message,
            };
            let (token, tag) = trimmed
                .split_once('\t')
                .ok_or_else(|| err("line", "expected `token<TAB>pos` or `token<TAB>neg`".into()))?;
            let token = token.trim();
            if token.is_empty() || token.to_lowercase() != token {
                return Err(err("token", format!("`{token}` must be a non-empty lowercase token")));
            }
            match tag.trim() {
                "pos" => positive.insert(token.to_string()),
                "neg" => negative.insert(token.to_string()),
                other => return Err(err("polarity", format!("expected `pos` or `neg`, got `{other}`"))),
            };
        }
        Self::checked(positive, negative).map_err(|e| match e {
            DataError::Invalid(m) => DataError::Invalid(format!("{origin}: {m}")),
            other => other,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> DataResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn is_positive(&self, token: &str) -> bool {
        self.positive.contains(token)
    }

    pub fn is_negative(&self, token: &str) -> bool {
        self.negative.contains(token)
    }
}

/// `(positive hits - negative hits) / token count`, 0 for no tokens.
pub fn polarity_score<S: AsRef<str>>(tokens: &[S], lexicon: &PolarityLexicon) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    let mut balance = 0i64;
    for t in tokens {
        let t = t.as_ref();
        if lexicon.is_positive(t) {
            balance += 1;
        } else if lexicon.is_negative(t) {
            balance -= 1;
        }
    }
    balance as f64 / tokens.len() as f64
}

#[derive(Debug, Clone)]
pub enum GateMode<'a> {
    /// Negative iff score `< threshold`.
    Lexicon { lexicon: &'a PolarityLexicon, threshold: f64 },
    /// Negative iff the document's `polarity` field says so.
    Column,
}

/// Returns (negative, non-negative).
pub fn gate_negative(corpus: Vec<Document>, mode: &GateMode<'_>) -> DataResult<(Vec<Document>, Vec<Document>)> {
    match mode {
        GateMode::Column => {
            if let Some(d) = corpus.iter().find(|d| d.polarity.is_none()) {
                return Err(DataError::Document {
                    id: d.id.clone(),
                    message: "column gate requires a polarity value".into(),
                });
            }
            Ok(corpus.into_iter().partition(|d| d.polarity == Some(Polarity::Negative)))
        }
        GateMode::Lexicon { lexicon, threshold } => {
            Ok(corpus.into_iter().partition(|d| polarity_score(&analyze(&d.text), lexicon) < *threshold))
        }
    }
}
