//! Normalization, tokenization, and the dictionary-ratio English filter.

use std::collections::HashSet;
use std::path::Path;

use crate::corpus::Document;
use crate::error::{DataError, DataResult};

const URL_PREFIXES: [&str; 3] = ["http://", "https://", "www."];

/// Lowercases, strips URLs and @-mentions, drops the `#` of hashtags, and
/// collapses whitespace.
pub fn normalize(text: &str) -> String {
    let lower = text.to_lowercase();
    let mut out = String::with_capacity(lower.len());
    for chunk in lower.split_whitespace() {
        let cut = URL_PREFIXES.iter().filter_map(|p| chunk.find(p)).min().unwrap_or(chunk.len());
        let cleaned = strip_marks(&chunk[..cut]);
        if cleaned.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&cleaned);
    }
    out
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn strip_marks(chunk: &str) -> String {
    let chars: Vec<char> = chunk.chars().collect();
    let mut out = String::with_capacity(chunk.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next_is_word = chars.get(i + 1).is_some_and(|&n| is_word_char(n));
        if c == '@' && next_is_word {
            i += 1;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            continue;
        }
        if c == '#' && next_is_word {
            i += 1;
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

/// Splits on runs of non-alphanumeric characters, dropping single-character
/// and digits-only tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2 && !t.chars().all(|c| c.is_numeric()))
        .map(str::to_string)
        .collect()
}

/// `tokenize(normalize(text))`.
pub fn analyze(text: &str) -> Vec<String> {
    tokenize(&normalize(text))
}

/// Lowercase word list used to decide whether a text is English.
#[derive(Debug, Clone)]
pub struct Dictionary {
    words: HashSet<String>,
}

impl Dictionary {
    pub fn new<S: AsRef<str>>(words: impl IntoIterator<Item = S>) -> DataResult<Self> {
        let mut set = HashSet::new();
        for w in words {
            let w = w.as_ref();
            validate_entry(w).map_err(DataError::Invalid)?;
            set.insert(w.to_string());
        }
        if set.is_empty() {
            return Err(DataError::Empty("dictionary has no words".into()));
        }
        Ok(Dictionary { words: set })
    }

    /// Reads one word per line; blank lines and `#` comments are skipped.
    pub fn parse(source: &str, origin: &str) -> DataResult<Self> {
        let mut set = HashSet::new();
        for (n, line) in source.lines().enumerate() {
            let w = line.trim();
            if w.is_empty() || w.starts_with('#') {
                continue;
            }
            validate_entry(w).map_err(|message| DataError::Field {
                path: origin.to_string(),
                line: n + 1,
                field: "word".into(),
                message,
            })?;
            set.insert(w.to_string());
        }
        if set.is_empty() {
            return Err(DataError::Empty(format!("{origin}: dictionary has no words")));
        }
        Ok(Dictionary { words: set })
    }

    pub fn load(path: impl AsRef<Path>) -> DataResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn validate_entry(w: &str) -> Result<(), String> {
    if w.is_empty() {
        return Err("empty entry".into());
    }
    if w.chars().any(char::is_whitespace) {
        return Err(format!("entry `{w}` contains whitespace"));
    }
    if w.to_lowercase() != w {
        return Err(format!("entry `{w}` is not lowercase"));
    }
    Ok(())
}

/// Share of tokens (with multiplicity) found in the dictionary; 0 for no tokens.
pub fn english_ratio<S: AsRef<str>>(tokens: &[S], dict: &Dictionary) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    let hits = tokens.iter().filter(|t| dict.contains(t.as_ref())).count();
    hits as f64 / tokens.len() as f64
}

/// Partitions a corpus into (kept, dropped) by English ratio `>= threshold`.
pub fn filter_english(
    corpus: Vec<Document>,
    dict: &Dictionary,
    threshold: f64,
) -> DataResult<(Vec<Document>, Vec<Document>)> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(DataError::Invalid(format!("english threshold {threshold} outside [0, 1]")));
    }
    Ok(corpus.into_iter().partition(|doc| english_ratio(&analyze(&doc.text), dict) >= threshold))
}
